from .affinity import ClusterResult, SimilarityMatrix, ap_cluster
from .features import ClusterPoint, cell_box, gather_features, top_cells
from .montage import compose_montage, export_cluster_montage
