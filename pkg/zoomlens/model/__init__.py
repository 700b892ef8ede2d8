from .batch import EyePairBatch
from .layers import Conv2d, ConvTrunk, Linear, Module, plan_trunk, standardize
from .mnet import MNet, MNetOutput, mnet_forward
from .anet import ANet, ANetOutput, anet_logits, gate, spatial_softmax
from .cnet import CNet, CNetOutput, cnet_forward
from .loss import active_heads, training_loss
from .zoomnet import (
    EyeOutput,
    ModelConfig,
    ZoomNet,
    ZoomNetOutput,
    predicted_grade,
    zoomnet_forward,
)
