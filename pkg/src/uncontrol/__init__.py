"""Near-uncontrollability of random linear systems dx/dt = Ax + bu.

The package measures how likely a random system (A drawn from the Gaussian
orthogonal ensemble, b an independent standard Gaussian vector) is to come
within distance-like margin eps of losing controllability, in the sense that
some eigenvector of A is nearly orthogonal to b. It provides

* deterministic samplers with counter-based substreams (sampling),
* a verified symmetric eigendecomposition front end (symeig),
* controllability statistics and a rank-based cross-check (control),
* closed forms and upper bounds for the failure probability plus spherical
  cap geometry (theory), backed by adaptive quadrature (numerics),
* reproducible Monte Carlo estimators and grid sweeps (mc),
* a command-line interface (cli, installed as `uncontrol`).
"""

from .control import (
    CouplingStat,
    RandomSystem,
    coupling_stat,
    default_zero_tol,
    is_controllable_eig,
    kalman_rank,
)
from .mc import (
    Estimate,
    ResampleBudgetError,
    SweepRow,
    estimate_cap_measure,
    estimate_p_eps,
    estimate_p_eps_b,
    sweep,
)
from .numerics import (
    DEFAULT_TOL,
    QuadratureError,
    QuadratureResult,
    Tolerance,
    integrate_interval,
    integrate_semi_infinite,
    log_gamma,
    reg_incomplete_beta,
    sphere_area,
)
from .sampling import (
    STREAM_B,
    STREAM_GOE,
    STREAM_RESAMPLE,
    STREAM_SPHERE,
    InputVector,
    RngState,
    SymMatrix,
    gaussian,
    sample_b,
    sample_goe,
    sample_sphere,
    substream_id,
)
from .symeig import EigenConvergenceError, EigenDecomposition, eig_symmetric, sign_normalize
from .theory import (
    BOUND_KINDS,
    BoundValue,
    CapSpec,
    cap_area_lower,
    cap_area_upper,
    cap_measure_exact,
    growth_rate_bound,
    p_eps_b_bound,
    p_eps_b_exact_n2,
    p_eps_bound_integral,
    p_eps_bound_poly,
    p_eps_exact_n2,
    p_eps_n2_alt,
)

__version__ = "0.1.0"

__all__ = [
    "BOUND_KINDS",
    "BoundValue",
    "CapSpec",
    "CouplingStat",
    "DEFAULT_TOL",
    "EigenConvergenceError",
    "EigenDecomposition",
    "Estimate",
    "InputVector",
    "QuadratureError",
    "QuadratureResult",
    "RandomSystem",
    "ResampleBudgetError",
    "RngState",
    "STREAM_B",
    "STREAM_GOE",
    "STREAM_RESAMPLE",
    "STREAM_SPHERE",
    "SweepRow",
    "SymMatrix",
    "Tolerance",
    "cap_area_lower",
    "cap_area_upper",
    "cap_measure_exact",
    "coupling_stat",
    "default_zero_tol",
    "eig_symmetric",
    "estimate_cap_measure",
    "estimate_p_eps",
    "estimate_p_eps_b",
    "gaussian",
    "growth_rate_bound",
    "integrate_interval",
    "integrate_semi_infinite",
    "is_controllable_eig",
    "kalman_rank",
    "log_gamma",
    "p_eps_b_bound",
    "p_eps_b_exact_n2",
    "p_eps_bound_integral",
    "p_eps_bound_poly",
    "p_eps_exact_n2",
    "p_eps_n2_alt",
    "reg_incomplete_beta",
    "sample_b",
    "sample_goe",
    "sample_sphere",
    "sign_normalize",
    "sphere_area",
    "substream_id",
    "sweep",
    "__version__",
]
