"""Radially symmetric spectral solver and diagnostics for the defocusing
intercritical nonlinear Schrodinger equation i u_t + Delta u = |u|^(p-1) u."""

__version__ = "0.1.0"

from .grid import (  # noqa: F401
    RadialField,
    RadialGrid,
    apply_multiplier,
    field_from_profile,
    from_frequency,
    make_grid,
    radial_derivative,
    radial_integral,
    to_frequency,
    zero_field,
)
from .dyadic import (  # noqa: F401
    CutoffProfile,
    DyadicPartition,
    besov_norm,
    critical_exponent,
    default_partition,
    project,
    sobolev_norm,
    tail_radius,
)
from .evolution import (  # noqa: F401
    StepPolicy,
    Trajectory,
    free_flow,
    nls_step,
    rescale_initial_data,
    simulate,
    spacetime_norm,
)
from .diagnostics import (  # noqa: F401
    NormReport,
    PseudoconformalRecord,
    dispersive_ratio,
    energy,
    local_dyadic_bound,
    mass,
    momentum,
    monotonicity_defect,
    morawetz_rhs,
    norm_report,
    pseudoconformal_energy,
    vector_field,
    weighted_sup,
)
from .decompose import (  # noqa: F401
    DecompositionState,
    SplitMode,
    evolve_decomposed,
    split_data,
    w_smallness_report,
)
