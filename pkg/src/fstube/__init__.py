"""Focal distances, principal curvatures and tube volumes of complex submanifolds of CP^n."""

__version__ = "0.1.0"

from .config import DEFAULT, Tolerances  # noqa: E402
from .fs_core import (  # noqa: E402
    ProjectivePoint,
    TangentVector,
    curvature_operator,
    curvature_tensor,
    fs_distance,
    geodesic,
    parallel_transport,
    projective_volume,
    uniform_sample,
)
from .polynomial import HomogeneousPolynomial, PolynomialFormatError, fermat, parse_polynomial  # noqa: E402
from .riccati import (  # noqa: E402
    FocalReport,
    JacobiState,
    RiccatiBranch,
    focal_distance_along,
    jacobi_integrate,
    min_focal_distance_estimate,
    riccati_closed_form,
    riccati_integrate_numeric,
)
from .submanifold import (  # noqa: E402
    Hypersurface,
    ProjectiveSubspace,
    RationalCurve,
    SegreModel,
    curve_volume,
    local_geometry,
    model,
    shape_operator,
    tangent_normal_frame,
)
from .tube_volume import (  # noqa: E402
    ChernIntegrals,
    VolumeReport,
    distance_to_submanifold,
    gray_tube_volume_general,
    mc_tube_volume,
    tube_volume_curve,
    tube_volume_hypersurface,
)

__all__ = [
    "__version__",
    "DEFAULT",
    "Tolerances",
    "ProjectivePoint",
    "TangentVector",
    "curvature_operator",
    "curvature_tensor",
    "fs_distance",
    "geodesic",
    "parallel_transport",
    "projective_volume",
    "uniform_sample",
    "HomogeneousPolynomial",
    "PolynomialFormatError",
    "fermat",
    "parse_polynomial",
    "FocalReport",
    "JacobiState",
    "RiccatiBranch",
    "focal_distance_along",
    "jacobi_integrate",
    "min_focal_distance_estimate",
    "riccati_closed_form",
    "riccati_integrate_numeric",
    "Hypersurface",
    "ProjectiveSubspace",
    "RationalCurve",
    "SegreModel",
    "curve_volume",
    "local_geometry",
    "model",
    "shape_operator",
    "tangent_normal_frame",
    "ChernIntegrals",
    "VolumeReport",
    "distance_to_submanifold",
    "gray_tube_volume_general",
    "mc_tube_volume",
    "tube_volume_curve",
    "tube_volume_hypersurface",
]
