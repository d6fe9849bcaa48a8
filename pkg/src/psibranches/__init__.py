"""Branches of psi, the multivalued inverse of f(w) = sinh(a w) e^w, 0 < a < 1."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Category,
    CriticalPoint,
    Parameter,
    as_parameter,
    branch_points,
    critical_point,
    critical_points,
    eval_f,
    f_prime,
    f_second,
    jacobian,
    period,
    psi_prime,
    strip_phase,
    strips_per_period,
    x_a,
    xi_a,
)
from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    NearBranchPointWarning,
    PsiError,
    RangeError,
    SingularityError,
    UnsupportedCategoryError,
)
from .geometry import (  # noqa: E402
    RegionId,
    RegionKind,
    Shape,
    boundary_image_x,
    g_curve,
    gamma_curves,
    region_of,
    xi,
    xi_domain,
    xi_extrema,
    xi_zeros,
)
from .branches import (  # noqa: E402
    BranchFamily,
    BranchId,
    Principal,
    Tilde,
    branch_domain,
    codomain,
    lambert_w,
    psi0_real,
    psi_branch,
    psi_minus1_real,
    psi_near_one,
    psi_one_third,
    psi_small_a,
)
from .continuation import (  # noqa: E402
    GluingAtlas,
    PathSpec,
    build_atlas,
    continue_path,
    monodromy_probe,
)
