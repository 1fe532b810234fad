"""Temporal Clauser-Horne functional for a Bell pair across an XX chain.

The package has two independent computational routes and the tooling to
confront them:

* closed form: :mod:`bellchain.spectral`, :mod:`bellchain.propagator` and
  :mod:`bellchain.inequality` evaluate the exact free-fermion expression
  for the functional and analyze violations, restoration times and
  revivals at any chain length;
* brute force: :mod:`bellchain.oracle` rebuilds the same quantities by
  dense exact diagonalization on small chains, plus the fermionic
  contraction identities behind them;
* :mod:`bellchain.hidden_variables` demonstrates the medium-free limit
  where a deterministic description always exists;
* :mod:`bellchain.cli` exposes curve generation, verification suites,
  conjecture scans, parameter sweeps and the hidden-variable demos.
"""

from .errors import ResourceLimitError, UsageError, VerificationFailure
from .inequality import (
    CHCurve,
    I_CH_AT_ZERO,
    MeasurementSettings,
    PeakChannel,
    ViolationReport,
    curvature_at_zero,
    find_violations,
    i_ch_closed_form,
    revival_peaks,
    sample_curve,
    t_star_estimate,
    t_star_numeric,
)
from .oracle import (
    ChainOracle,
    FermionSet,
    build_hamiltonian,
    conditional_probability,
    contraction_identity_deviation,
    i_ch_oracle,
    i_ch_six_term_oracle,
    initial_state,
    jordan_wigner,
    resolve_convention,
    vacuum_contractions,
)
from .propagator import (
    PropagatorMatrix,
    fermion_heisenberg_coefficients,
    propagator_entry,
    propagator_matrix,
)
from .spectral import (
    ChainParams,
    Convention,
    Mode,
    SingleParticleBasis,
    build_modes,
    chebyshev_u,
    eigenbasis,
    group_velocity,
)

__version__ = "0.1.0"

__all__ = [
    "CHCurve",
    "ChainOracle",
    "ChainParams",
    "Convention",
    "FermionSet",
    "I_CH_AT_ZERO",
    "MeasurementSettings",
    "Mode",
    "PeakChannel",
    "PropagatorMatrix",
    "ResourceLimitError",
    "SingleParticleBasis",
    "UsageError",
    "VerificationFailure",
    "ViolationReport",
    "build_hamiltonian",
    "build_modes",
    "chebyshev_u",
    "conditional_probability",
    "contraction_identity_deviation",
    "curvature_at_zero",
    "eigenbasis",
    "fermion_heisenberg_coefficients",
    "find_violations",
    "group_velocity",
    "i_ch_closed_form",
    "i_ch_oracle",
    "i_ch_six_term_oracle",
    "initial_state",
    "jordan_wigner",
    "propagator_entry",
    "propagator_matrix",
    "resolve_convention",
    "revival_peaks",
    "sample_curve",
    "t_star_estimate",
    "t_star_numeric",
    "vacuum_contractions",
    "__version__",
]
