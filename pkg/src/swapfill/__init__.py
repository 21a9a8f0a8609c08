"""swapfill: feature-space patch matching and image completion.

Pipeline: infer a coarse fill for the hole, match every hole-overlapping
feature patch to its best boundary patch by normalized cross-correlation,
then translate the matches back to pixels by coordinate-mapped pasting.
"""

from .diffusion import DiffusionSettings, diffusion_fill
from .errors import (
    BoundsError,
    DataError,
    FormatError,
    GeometryError,
    HoleSpecError,
    NoBoundaryError,
    NoCandidatesError,
    SizeError,
    SwapFillError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)
from .features import FeatureSpec, extract_builtin_features, load_external_features
from .fmap import read_fmap, write_fmap
from .masks import (
    CenterHole,
    RandomHoles,
    RectHole,
    downsample_mask,
    parse_hole_spec,
    rasterize_hole,
)
from .matching import (
    MatchRecord,
    Patch,
    PatchAssignment,
    cross_map_swap,
    enumerate_candidate_patches,
    enumerate_query_patches,
    match_brute_force,
    match_convolutional,
    ncc,
    patch_swap,
)
from .metrics import (
    WeightedMask,
    build_weighted_mask,
    mean_l1,
    perceptual_distance,
    ssim,
)
from .pipeline import (
    InpaintConfig,
    inpaint_multiscale,
    inpaint_single_scale,
    style_transfer,
)
from .reconstruct import align_color, composite, paste_reconstruct
from .types import FeatureMap, FeatureMask, Image, Mask

__version__ = "0.1.0"
