"""Magnetic-gradient laser-cooling simulator and analysis toolkit.

Builds the scheme's Hamiltonians and dissipators at controllable Lamb-Dicke
expansion order, integrates the Lindblad master equation with truncation and
conservation monitoring, evaluates the analytic rate machinery (resonance
condition, dressed states, adiabatic-elimination spectra), and regenerates
the published figures and tables as CSV data.
"""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DegenerateSteadyStateError,
    DimensionError,
    FitError,
    GradCoolError,
    IntegratorError,
    SingularResolventError,
    TruncationError,
)
from .hilbert import (
    INTERNAL,
    CompositeSpace,
    FockSpace,
    InternalSpace,
    dag,
    displacement,
    expect,
    fock_ops,
    kron,
    thermal_diagonal,
)
from .model import (
    ION_PRESETS,
    GradientSpec,
    LindbladModel,
    SystemParams,
    build_dissipators,
    build_multimode_model,
    build_rwa_hamiltonian,
    build_sw_hamiltonian,
    build_sw_unitary,
    dressed_rotation,
    eta_from_gradient,
    gradient_from_eta,
)
from .modes import ModeSpec, chain_equilibrium_positions, modes_for_chain
from .dynamics import (
    CoolingTrace,
    IntegratorConfig,
    evolve,
    initial_state,
    lindblad_rhs,
    liouvillian_matrix,
    steady_state,
)
from .rates import (
    DressedInfo,
    RateResult,
    SpectralRates,
    adiabatic_rates,
    dressed_info,
    extract_rate,
    internal_liouvillian,
    omega_eff_at_resonance,
    rate_formula,
    resonance_detuning,
)
from .experiments import (
    PRESET_IDS,
    PresetResult,
    SweepPlan,
    measure_rate,
    optimize_omega,
    run_preset,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
