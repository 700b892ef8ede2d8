from .kappa import ConfusionMatrix, quadratic_weighted_kappa, quadratic_weights
from .roc import roc_auc, sensitivity_at_specificity
from .localization import RecallCurve, best_iom_per_box, iom, recall_curves
from .binary import BinaryTask, binary_accuracy, binary_scores, ensemble_average
from .report import BinaryMetrics, HeadMetrics, MetricsReport, binary_metrics, head_metrics
