"""Spin-1/2 dynamics toolkit: split-step state-vector propagation, stochastic
trace estimation, spectral densities, and equilibrium thermodynamics."""

__version__ = "0.1.0"

from .model import (
    Bond,
    LatticeSpec,
    SpinHamiltonian,
    build_triangular,
    dense_matrix,
    energy_bound,
    triangle_coordinates,
)
from .statevec import (
    RandomStateKind,
    StateVector,
    basis_state,
    inner_product,
    load_amplitudes,
    random_state,
    save_amplitudes,
)
from .evolve import (
    NumericalError,
    TrotterPlan,
    apply_axis_rotation,
    apply_diagonal_phase,
    evolve,
    trotter_step,
)
from .spectral import (
    CorrelationSeries,
    DosEstimate,
    SeriesMethod,
    WindowKind,
    correlation_sample,
    dos_from_series,
    nyquist_interval,
    trace_estimate,
)
from .thermo import (
    DegenerateDosError,
    ThermoCurve,
    curve_from_dos,
    energy_and_heat,
    log_partition,
    partition_function,
    sample_statistics,
    temperature_grid,
)
from .oracle import (
    SpectrumResult,
    exact_propagator,
    exact_spectrum,
    exact_thermo,
    exact_trace_series,
)
from .config import ConfigError, RunConfig, Schedule, config_from_dict, config_from_file, resolve_schedule
