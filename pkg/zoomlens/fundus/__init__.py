from .lesions import LESION_SPECS, Lesion, LesionKind, LesionSpec, lesion_counts
from .sample import Eye, FundusSample, read_png, write_png
from .render import DiscGeometry, FundusSpec, render
from .pairs import NEAR_PROBABILITY, draw_right_grade, generate_indexed_pair, generate_pair
from .preprocess import (
    augment,
    border_box,
    crop_black_borders,
    dihedral,
    dihedral_box,
    map_box_through_crop,
    prepare_eye,
)
from .dataset import (
    FundusDataset,
    FundusPair,
    PreparedPair,
    load_dataset,
    prepare_pair,
    split_of,
    write_dataset,
)
