"""rcjc: mapping damped spin-boson dynamics onto tunable multiphoton
Jaynes-Cummings models through a reaction-coordinate collective mode."""

from .dissipator import (
    RateOperators,
    apply_dissipator,
    build_liouvillian,
    build_rate_operators,
    conjugate_rates,
)
from .evolve import (
    Generator,
    NumericalGuardError,
    TimeSeries,
    default_dt,
    integrate_rk4,
    propagate_spectral,
    record_observables,
)
from .hilbert import (
    SpaceLayout,
    displacement,
    embed,
    ladder,
    pauli,
    product_state,
    thermal_occupation,
    thermal_state,
)
from .linalg import (
    TOL,
    DensityMatrix,
    Operator,
    Tolerances,
    func_of_hermitian,
    hermitian_eig,
    kron,
    partial_trace,
    partial_trace_op,
    trace_norm,
)
from .metrics import (
    fidelity,
    positive_intervals,
    purity,
    sigma_series,
    sigma_threshold,
    trace_distance,
    vn_entropy,
)
from .models import (
    ModelSpec,
    coupling_strength,
    h_b,
    h_n,
    h_n2,
    h_s_prime,
    h_s_rc,
    h_spin_drivings,
    transfer_time,
    validity_duration,
    validity_factor,
)
from .scenarios import (
    ConfigError,
    PRESETS,
    load_config,
    resolve_model,
    run_comparison,
    run_sweep,
    validate,
)
from .spectral import (
    OhmicRcSD,
    RcParams,
    UnderdampedSD,
    eval_underdamped,
    map_to_rc,
    rate_factor,
    reconstruct_sb,
)
from .transforms import (
    FrameMap,
    from_multiphoton_frame,
    phi,
    t_alpha,
    to_multiphoton_frame,
    u_a0,
    u_b0,
)

__version__ = "0.1.0"
