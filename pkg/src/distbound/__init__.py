"""Distance-to-boundary estimation for 2-D binary shapes.

Three method families against one exact oracle:

* exact Euclidean distance transform (brute force and an equivalent fast
  two-pass algorithm), used as ground truth;
* convolutional estimators (logconv / softmin over boundary samples) and
  their error-cancelling blend;
* screened-Poisson estimators (heat-style log, first and second order
  extrapolation in the decay rate) with an optional gradient-normalisation
  post-process.
"""

from .convdist import (
    BlendConfig,
    ConvOptions,
    blend_field,
    blend_weights,
    logconv_field,
    logconv_values,
    softmin_field,
    softmin_values,
)
from .edt import edt_bruteforce, edt_fast, medial_axis
from .errors import (
    BadConfig,
    BadLambda,
    ClampWarning,
    DegenerateSum,
    DistboundError,
    DoesNotFit,
    EmptyMask,
    EmptySlice,
    MaskMismatch,
    MaskTouchesBorder,
    ParseError,
    TooSmall,
)
from .estimators import EstimatorKind, heat_log, normalize_gradient, taylor1, taylor2
from .grid import (
    BinaryMask,
    BoundarySet,
    ScalarField,
    VectorField,
    divergence,
    extract_boundary,
    gradient,
    validate_mask,
)
from .metrics import (
    ErrorReport,
    error_l2,
    error_linf,
    error_map,
    gradient_magnitude_map,
    slice_extract,
)
from .poisson import (
    PdeBundle,
    ScreenedOperator,
    SolverConfig,
    solve_bundle,
    solve_spd,
    solve_v,
    solve_vprime,
    solve_vsecond,
)
from .shapeio import (
    make_shape,
    parse_shape_spec,
    read_field_csv,
    read_mask_pgm,
    write_field_csv,
    write_heatmap_ppm,
    write_mask_pgm,
)

__version__ = "0.1.0"
