from .bbox import BBox
from .regions import (
    ZoomRegion,
    ZoomRegions,
    crop_patches,
    greedy_sample,
    resize_bilinear,
    stop_threshold,
    to_high_res,
    upsample_attention,
)
