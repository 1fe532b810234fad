"""Brute-force many-body oracle: dense 2^N ground truth for everything.

The closed-form results in :mod:`bellchain.inequality` rest on the
free-fermion solution of the XX chain.  This module rebuilds the same
physics with no free-fermion input at all: the spin Hamiltonian as a dense
matrix, time evolution by exact eigendecomposition, projective
measurements as explicit projectors, and Jordan-Wigner fermions as
concrete operators.  Agreement between the two routes is the correctness
argument for the whole toolkit, and disagreement under one eigenvector
sign convention is what resolves that convention.

Dense scaling is exponential, so sizes are capped (default 10 sites, hard
maximum 12); the cap guards both memory and the test-suite runtime.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache, cached_property

import numpy as np

from . import operators as ops
from .errors import ResourceLimitError, UsageError, VerificationFailure
from .inequality import SQRT2, MeasurementSettings
from .propagator import propagator_matrix
from .spectral import ChainParams, Convention

logger = logging.getLogger(__name__)

DEFAULT_SITE_CAP = 10
HARD_SITE_CAP = 12

OUTCOMES = (+1, -1)
ALICE_SETTINGS = ("A1", "A2")
BOB_SETTINGS = ("B1", "B2")


def check_site_cap(n_sites: int, site_cap: int = DEFAULT_SITE_CAP, n_operators: int = 1) -> None:
    """Reject sizes beyond the cap; log the dense-allocation estimate."""
    if site_cap > HARD_SITE_CAP:
        raise UsageError(f"site cap {site_cap} exceeds the hard maximum {HARD_SITE_CAP}")
    if n_sites > site_cap:
        raise ResourceLimitError(
            f"n_sites={n_sites} exceeds the oracle cap {site_cap}"
            f" (hard maximum {HARD_SITE_CAP})"
        )
    mib = n_operators * (4.0**n_sites) * 16.0 / 2**20
    logger.info("allocating %d dense operator(s) at N=%d: ~%.1f MiB", n_operators, n_sites, mib)


@dataclass(frozen=True)
class FermionSet:
    """All N Jordan-Wigner annihilation operators as dense matrices."""

    n_sites: int
    f: list[np.ndarray]


def jordan_wigner(n_sites: int, site_cap: int = DEFAULT_SITE_CAP) -> FermionSet:
    """f_i = (prod_{j<i} (1 - 2 n_j)) sigma_i^-, built site by site.

    The string factor is the explicit product of single-site (1 - 2n)
    matrices, not a phase shortcut, so the anticommutation relations are
    a genuine test of the construction.
    """
    check_site_cap(n_sites, site_cap, n_operators=n_sites)
    f = []
    for i in range(1, n_sites + 1):
        site_ops = {j: ops.STRING for j in range(1, i)}
        site_ops[i] = ops.SIGMA_MINUS
        f.append(ops.embed(site_ops, n_sites))
    return FermionSet(n_sites=n_sites, f=f)


def build_hamiltonian(params: ChainParams, site_cap: int = DEFAULT_SITE_CAP) -> np.ndarray:
    """Dense XX Hamiltonian in transverse field, open boundaries.

    H = -(J/2) sum_i (sx_i sx_{i+1} + sy_i sy_{i+1})
        - (mu/2) sum_i (sz_i + 1).

    The vacuum (all spins down) is its exact zero-energy eigenstate.
    """
    n = params.n_sites
    check_site_cap(n, site_cap)
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(1, n):
        h -= params.coupling_j / 2.0 * ops.embed({i: ops.SIGMA_X, i + 1: ops.SIGMA_X}, n)
        h -= params.coupling_j / 2.0 * ops.embed({i: ops.SIGMA_Y, i + 1: ops.SIGMA_Y}, n)
    for i in range(1, n + 1):
        h -= params.mu / 2.0 * (ops.site_operator(ops.SIGMA_Z, i, n) + np.eye(dim))
    return h


def hopping_hamiltonian(fermions: FermionSet, params: ChainParams) -> np.ndarray:
    """The same Hamiltonian rebuilt from the fermion set: -J sum (f_i^dag
    f_{i+1} + h.c.) - mu sum f_i^dag f_i.  Cross-check only."""
    f = fermions.f
    n = fermions.n_sites
    h = np.zeros_like(f[0])
    for i in range(n - 1):
        hop = f[i].conj().T @ f[i + 1]
        h -= params.coupling_j * (hop + hop.conj().T)
    for i in range(n):
        h -= params.mu * (f[i].conj().T @ f[i])
    return h


def initial_state(n_sites: int) -> np.ndarray:
    """Bell pair (up-up + down-down)/sqrt(2) on sites (1, N), middles down.

    In fermionic language (1 + f_1^dag f_N^dag)|0>/sqrt(2).
    """
    if n_sites < 2:
        raise ValueError("need at least 2 sites")
    vac = ops.vacuum_state(n_sites)
    pair = ops.apply_creation(ops.apply_creation(vac, n_sites, n_sites), 1, n_sites)
    return (vac + pair) / SQRT2


def sigma_x_from_fermions(n_sites: int) -> np.ndarray:
    """sigma_N^x = prod_{j<N} (1 - 2 f_j^dag f_j) (f_N^dag + f_N), applied
    columnwise through the bitwise fermion appliers."""
    dim = 2**n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[col] = 1.0
        v = ops.apply_creation(e, n_sites, n_sites) + ops.apply_annihilation(e, n_sites, n_sites)
        for j in range(n_sites - 1, 0, -1):
            v = v - 2.0 * ops.apply_number(v, j)
        out[:, col] = v
    return out


@dataclass(frozen=True)
class VacuumContractions:
    """Named vacuum expectation values behind the probability algebra.

    ``pair`` denotes the two-particle state f_1^dag f_N^dag |0>; ``sigma``
    is the Heisenberg-evolved end-site sigma_N^x(t).
    """

    pair_number_pair: complex  # <pair| f_N^dag(t) f_N(t) |pair>
    pair_sigma_pair: complex  # <pair| sigma(t) |pair>, odd in fermion parity: 0
    vac_sigma_fn: complex  # <0| sigma(t) f_N^dag |0> = conj(G_NN)
    vac_sigma_f1: complex  # <0| sigma(t) f_1^dag |0> = conj(G_1N)
    pair_sigma_f1: complex  # <pair| sigma(t) f_1^dag |0>
    pair_sigma_fn: complex  # <pair| sigma(t) f_N^dag |0>


class ChainOracle:
    """Dense many-body engine for one (N, J, mu) cell.

    Eigendecomposes the Hamiltonian once and reuses it for every time;
    instances are immutable after construction and safe to share.
    """

    def __init__(self, params: ChainParams, site_cap: int = DEFAULT_SITE_CAP):
        check_site_cap(params.n_sites, site_cap)
        self.params = params
        self.n = params.n_sites
        self.settings = MeasurementSettings.default()

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return build_hamiltonian(self.params, site_cap=HARD_SITE_CAP)

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(self.hamiltonian)
        return w, v

    @cached_property
    def psi_initial(self) -> np.ndarray:
        return initial_state(self.n)

    def evolve(self, state: np.ndarray, t: float) -> np.ndarray:
        """exp(-iHt) |state> through the cached eigendecomposition."""
        w, v = self._eig
        return v @ (np.exp(-1j * w * t) * (v.conj().T @ state))

    # -- projective measurements ------------------------------------------

    def observable_matrix(self, party: str) -> np.ndarray:
        """Dense realization of a named observable on its chain site."""
        if party in ALICE_SETTINGS:
            return ops.site_operator(self.settings.alice(party), 1, self.n)
        if party in BOB_SETTINGS:
            return ops.site_operator(self.settings.bob(party), self.n, self.n)
        raise ValueError(f"unknown observable {party!r}")

    def _apply_observable(self, state: np.ndarray, party: str) -> np.ndarray:
        if party == "A1":
            return ops.apply_sigma_z(state, 1)
        if party == "A2":
            return ops.apply_sigma_x(state, 1)
        zn = ops.apply_sigma_z(state, self.n)
        xn = ops.apply_sigma_x(state, self.n)
        if party == "B1":
            return (zn + xn) / SQRT2
        if party == "B2":
            return (zn - xn) / SQRT2
        raise ValueError(f"unknown observable {party!r}")

    def project(self, state: np.ndarray, party: str, outcome: int) -> np.ndarray:
        """(1 + outcome * O)/2 |state> for the named site observable."""
        if outcome not in OUTCOMES:
            raise ValueError(f"outcome must be +1 or -1, got {outcome}")
        return (state + outcome * self._apply_observable(state, party)) / 2.0

    def projected_state(self, setting: str, outcome: int) -> np.ndarray:
        """Alice's sub-normalized post-measurement state at t = 0.

        Squared norm equals the outcome probability (1/2 for each of the
        four cases on the Bell-pair initial state).
        """
        if setting not in ALICE_SETTINGS:
            raise ValueError(f"Alice's setting must be A1 or A2, got {setting!r}")
        return self.project(self.psi_initial, setting, outcome)

    def conditional_probability(
        self, setting_a: str, outcome_a: int, setting_b: str, outcome_b: int, t: float
    ) -> float:
        """p_{ab}(A_i, B_j(t)): joint over outcomes, conditional on settings.

        Schroedinger form || Pi_b exp(-iHt) Pi_a psi ||^2, equal to the
        Heisenberg-picture expectation of the evolved projector; Alice's
        projected state is deliberately not renormalized.
        """
        if setting_b not in BOB_SETTINGS:
            raise ValueError(f"Bob's setting must be B1 or B2, got {setting_b!r}")
        psi_a = self.projected_state(setting_a, outcome_a)
        psi_t = self.evolve(psi_a, t)
        psi_ab = self.project(psi_t, setting_b, outcome_b)
        return float(np.vdot(psi_ab, psi_ab).real)

    def i_ch(self, t: float) -> float:
        """Four-term temporal CH combination, assembled from probabilities."""
        return (
            self.conditional_probability("A1", +1, "B2", +1, t)
            + self.conditional_probability("A1", -1, "B1", -1, t)
            + self.conditional_probability("A2", +1, "B1", +1, t)
            - self.conditional_probability("A2", +1, "B2", +1, t)
        )

    def i_ch_six_term(self, t: float) -> float:
        """Original probability-form CH combination (no time at t = 0 shape):
        four joint terms minus the two single-party marginals; equals
        i_ch(t) - 1 identically."""
        p11_b1 = self.conditional_probability("A1", +1, "B1", +1, t)
        marg_alice = p11_b1 + self.conditional_probability("A1", +1, "B1", -1, t)
        marg_bob = p11_b1 + self.conditional_probability("A1", -1, "B1", +1, t)
        return (
            p11_b1
            + self.conditional_probability("A1", +1, "B2", +1, t)
            + self.conditional_probability("A2", +1, "B1", +1, t)
            - self.conditional_probability("A2", +1, "B2", +1, t)
            - marg_alice
            - marg_bob
        )

    # -- fermionic contractions -------------------------------------------

    def heisenberg_propagator(self, t: float) -> np.ndarray:
        """ED matrix <0| f_i f_j^dag(t) |0>; the free-fermion route must
        reproduce it under exactly one sign convention."""
        n = self.n
        out = np.empty((n, n), dtype=complex)
        for j in range(1, n + 1):
            # f_j^dag(t)|0> = exp(iHt) f_j^dag |0> because H|0> = 0.
            col = self.evolve(ops.apply_creation(ops.vacuum_state(n), j, n), -t)
            for i in range(1, n + 1):
                out[i - 1, j - 1] = col[1 << (i - 1)]
        return out

    def _apply_sigma_fermionic(self, state: np.ndarray) -> np.ndarray:
        v = ops.apply_creation(state, self.n, self.n) + ops.apply_annihilation(
            state, self.n, self.n
        )
        for j in range(self.n - 1, 0, -1):
            v = v - 2.0 * ops.apply_number(v, j)
        return v

    def vacuum_contractions(self, t: float) -> VacuumContractions:
        """The six vacuum contractions that reduce the probabilities of the
        measurement sequence to propagator entries."""
        n = self.n
        vac = ops.vacuum_state(n)
        f1_vac = ops.apply_creation(vac, 1, n)
        fn_vac = ops.apply_creation(vac, n, n)
        pair = ops.apply_creation(fn_vac, 1, n)

        # <a| O(t) |b> = (U(t) a)^dag O (U(t) b) with O static.
        pair_t = self.evolve(pair, t)
        f1_t = self.evolve(f1_vac, t)
        fn_t = self.evolve(fn_vac, t)
        # The vacuum itself is stationary.
        sigma_pair_t = self._apply_sigma_fermionic(pair_t)
        sigma_f1_t = self._apply_sigma_fermionic(f1_t)
        sigma_fn_t = self._apply_sigma_fermionic(fn_t)

        return VacuumContractions(
            pair_number_pair=complex(np.vdot(pair_t, ops.apply_number(pair_t, n))),
            pair_sigma_pair=complex(np.vdot(pair_t, sigma_pair_t)),
            vac_sigma_fn=complex(np.vdot(vac, sigma_fn_t)),
            vac_sigma_f1=complex(np.vdot(vac, sigma_f1_t)),
            pair_sigma_f1=complex(np.vdot(pair_t, sigma_f1_t)),
            pair_sigma_fn=complex(np.vdot(pair_t, sigma_fn_t)),
        )


@lru_cache(maxsize=8)
def _oracle(params: ChainParams, site_cap: int) -> ChainOracle:
    return ChainOracle(params, site_cap=site_cap)


def get_oracle(params: ChainParams, site_cap: int = DEFAULT_SITE_CAP) -> ChainOracle:
    """Memoized oracle per (N, J, mu); construction is the expensive part."""
    return _oracle(params, site_cap)


def conditional_probability(
    setting_a: str,
    outcome_a: int,
    setting_b: str,
    outcome_b: int,
    t: float,
    params: ChainParams,
    site_cap: int = DEFAULT_SITE_CAP,
) -> float:
    return get_oracle(params, site_cap).conditional_probability(
        setting_a, outcome_a, setting_b, outcome_b, t
    )


def i_ch_oracle(t: float, params: ChainParams, site_cap: int = DEFAULT_SITE_CAP) -> float:
    return get_oracle(params, site_cap).i_ch(t)


def i_ch_six_term_oracle(t: float, params: ChainParams, site_cap: int = DEFAULT_SITE_CAP) -> float:
    return get_oracle(params, site_cap).i_ch_six_term(t)


def vacuum_contractions(
    t: float, params: ChainParams, site_cap: int = DEFAULT_SITE_CAP
) -> VacuumContractions:
    return get_oracle(params, site_cap).vacuum_contractions(t)


def contraction_identity_deviation(
    params: ChainParams,
    t_grid,
    convention: Convention,
    site_cap: int = DEFAULT_SITE_CAP,
) -> float:
    """Max deviation of the conjectured mixed-contraction identity.

    Checks Re[<pair|sigma(t) f_1^dag|0> + <pair|sigma(t) f_N^dag|0>]
    against Re[G_NN(t) - G_1N(t)] over the grid.  Exact small-N algebra
    supports the identity; larger N extends the numerical evidence, so a
    genuine deviation must be surfaced, never silenced.
    """
    oracle = get_oracle(params, site_cap)
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float):
        c = oracle.vacuum_contractions(float(t))
        lhs = (c.pair_sigma_f1 + c.pair_sigma_fn).real
        g = propagator_matrix(float(t), params, convention).entries
        rhs = (g[params.n_sites - 1, params.n_sites - 1] - g[0, params.n_sites - 1]).real
        worst = max(worst, float(abs(lhs - rhs)))
    return worst


def resolve_convention(
    params: ChainParams | None = None,
    times=(0.3, 0.7, 1.1),
    site_cap: int = DEFAULT_SITE_CAP,
    tolerance: float = 1e-9,
) -> Convention:
    """Pick the eigenvector sign convention that matches the ED dynamics.

    Compares every entry of the closed-form propagator with the dense
    Heisenberg propagator on a small probe chain.  The conventions differ
    on entries with odd i + j, so exactly one can match; anything else is
    a verification failure.
    """
    if params is None:
        params = ChainParams(n_sites=4, coupling_j=1.0, mu=-1.0)
    oracle = get_oracle(params, site_cap)
    scale = abs(params.coupling_j) if params.coupling_j != 0.0 else 1.0
    deviations = {}
    for convention in Convention:
        worst = 0.0
        for t in times:
            ed = oracle.heisenberg_propagator(t / scale)
            closed = propagator_matrix(t / scale, params, convention).entries
            worst = max(worst, float(np.max(np.abs(ed - closed))))
        deviations[convention] = worst
    matching = [c for c, d in deviations.items() if d <= tolerance]
    if len(matching) != 1:
        raise VerificationFailure(
            f"convention probe found {len(matching)} matching conventions"
            f" (deviations: { {c.value: d for c, d in deviations.items()} })"
        )
    return matching[0]


def projected_state(setting: str, outcome: int, n_sites: int) -> np.ndarray:
    """Module-level convenience over :meth:`ChainOracle.projected_state`,
    independent of the couplings (projection happens before evolution)."""
    params = ChainParams(n_sites=n_sites)
    return get_oracle(params).projected_state(setting, outcome)


