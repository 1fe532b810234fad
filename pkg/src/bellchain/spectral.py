"""Closed-form single-particle spectral data of the open XX chain.

The chain of N spins with open boundaries maps to free fermions hopping on
N sites.  The single-particle Hamiltonian is the tridiagonal matrix

    h[i][j] = -J  for |i - j| = 1,      h[i][i] = -mu,

whose eigenpairs are known in closed form: momenta k_m = pi*m/(N+1),
energies eps_k = -2*J*cos(k) - mu, and sine-profile eigenvectors
u_jk ~ sin(j*k) = U_{j-1}(cos k) * sin(k) with U_n the Chebyshev
polynomial of the second kind.

Two eigenvector sign conventions are supported and carried through all
downstream results:

* ``plain``        u_jk ~ U_{j-1}(cos k), the actual eigenvector of h at
                   eps_k;
* ``alternating``  u_jk ~ (-1)^(j-1) U_{j-1}(cos k), the same vector with
                   a staggered sign, which pairs with eps at the relabeled
                   momentum pi - k.

Which one reproduces the many-body dynamics is decided empirically by the
exact-diagonalization oracle (see :mod:`bellchain.oracle`), not assumed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class Convention(str, enum.Enum):
    """Eigenvector sign convention for the single-particle basis."""

    PLAIN = "plain"
    ALTERNATING = "alternating"


@dataclass(frozen=True)
class ChainParams:
    """Chain length and couplings (N, J, mu) of the open XX chain."""

    n_sites: int
    coupling_j: float = 1.0
    mu: float = -1.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if not (math.isfinite(self.coupling_j) and math.isfinite(self.mu)):
            raise ValueError("coupling_j and mu must be finite")

    @property
    def mu_over_j(self) -> float:
        return self.mu / self.coupling_j


@dataclass(frozen=True)
class Mode:
    """One single-particle mode: momentum k_m, lambda_k = cos k, energy."""

    index_m: int
    momentum_k: float
    lambda_k: float
    epsilon_k: float


@dataclass(frozen=True)
class SingleParticleBasis:
    """Orthonormal eigenvector matrix u with u[j-1, m-1] = u_{j,k_m}."""

    params: ChainParams
    u: np.ndarray
    convention: Convention


def build_modes(params: ChainParams) -> list[Mode]:
    """All N modes, ordered by m = 1..N.

    k_m = pi*m/(N+1) and eps_k = -2*J*cos(k_m) - mu.
    """
    n = params.n_sites
    modes = []
    for m in range(1, n + 1):
        k = math.pi * m / (n + 1)
        lam = math.cos(k)
        eps = -2.0 * params.coupling_j * lam - params.mu
        modes.append(Mode(index_m=m, momentum_k=k, lambda_k=lam, epsilon_k=eps))
    return modes


def chebyshev_u(order: int, argument: float) -> float:
    """Chebyshev polynomial of the second kind, U_n(lambda), for |lambda| <= 1.

    Evaluated through the sine quotient U_n(cos k) = sin((n+1)k)/sin(k),
    which is stable for every interior momentum; the three-term recurrence
    is kept only as a test-side cross-check.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if abs(argument) > 1.0:
        raise ValueError(f"argument must satisfy |argument| <= 1, got {argument}")
    if abs(argument) == 1.0:
        # Limit of the quotient at the band edges.
        sign = 1.0 if argument > 0 else (-1.0) ** order
        return sign * (order + 1)
    k = math.acos(argument)
    return math.sin((order + 1) * k) / math.sin(k)


def single_particle_matrix(params: ChainParams) -> np.ndarray:
    """Tridiagonal hopping matrix h (-J off-diagonal, -mu on the diagonal)."""
    n = params.n_sites
    h = np.zeros((n, n))
    idx = np.arange(n - 1)
    h[idx, idx + 1] = -params.coupling_j
    h[idx + 1, idx] = -params.coupling_j
    h[np.arange(n), np.arange(n)] = -params.mu
    return h


def eigenbasis(params: ChainParams, convention: Convention = Convention.PLAIN) -> SingleParticleBasis:
    """Closed-form orthonormal eigenbasis of the single-particle matrix.

    Column m-1 holds u_{j,k_m}: the Chebyshev profile U_{j-1}(cos k_m),
    multiplied by (-1)^(j-1) under the ``alternating`` convention, then
    divided by its explicit column norm.
    """
    n = params.n_sites
    u = np.empty((n, n))
    for m in range(1, n + 1):
        lam = math.cos(math.pi * m / (n + 1))
        col = np.array([chebyshev_u(j - 1, lam) for j in range(1, n + 1)])
        if convention is Convention.ALTERNATING:
            col = col * (-1.0) ** np.arange(n)
        u[:, m - 1] = col / np.linalg.norm(col)
    u.flags.writeable = False
    return SingleParticleBasis(params=params, u=u, convention=convention)


@lru_cache(maxsize=128)
def mode_table(params: ChainParams, convention: Convention) -> tuple[np.ndarray, np.ndarray]:
    """Cached (epsilon, u) arrays shared by all propagator evaluations.

    Memoization only; results are immutable and identical to calling
    :func:`build_modes` / :func:`eigenbasis` directly.
    """
    eps = np.array([mode.epsilon_k for mode in build_modes(params)])
    eps.flags.writeable = False
    return eps, eigenbasis(params, convention).u


def group_velocity(params: ChainParams) -> tuple[float, float, float]:
    """Fastest excitation speed launched by the end-site quench.

    Returns (v_g, k_bar, e_initial): the dispersion slope 2*J at the
    crossing momentum k_bar = pi/2 where eps_k equals the initial energy
    e_initial = -mu of the Bell-pair product state.
    """
    if params.coupling_j == 0.0:
        raise ValueError("degenerate band: group velocity undefined for J = 0")
    return 2.0 * params.coupling_j, math.pi / 2.0, -params.mu
