"""Free-fermion propagator of the open XX chain.

G_ij(t) = sum_k u_ik u_jk exp(+i eps_k t) is the amplitude for a single
fermion to travel from site j to site i in time t; in the Heisenberg
picture f_j^dag(t) = sum_i G_ij(t) f_i^dag.  Every dynamical quantity of
the temporal CH functional is a function of two of its entries, G_NN and
G_1N.

Entries are evaluated as direct O(N) mode sums over a cached mode table;
no matrix exponential is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ChainParams, Convention, mode_table


@dataclass(frozen=True)
class PropagatorMatrix:
    """Full N x N single-particle evolution kernel at one time."""

    time_t: float
    params: ChainParams
    convention: Convention
    entries: np.ndarray

    def entry(self, i: int, j: int) -> complex:
        """G_ij(t) with 1-based site indices."""
        n = self.params.n_sites
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"site indices must lie in 1..{n}, got ({i}, {j})")
        return complex(self.entries[i - 1, j - 1])


def _check_site(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise ValueError(f"site index must lie in 1..{n}, got {i}")
    return i - 1


def propagator_entry(
    i: int,
    j: int,
    t: float,
    params: ChainParams,
    convention: Convention = Convention.PLAIN,
) -> complex:
    """Single entry G_ij(t) = sum_k u_ik u_jk exp(i eps_k t)."""
    eps, u = mode_table(params, convention)
    ii = _check_site(i, params.n_sites)
    jj = _check_site(j, params.n_sites)
    return complex(np.sum(u[ii] * u[jj] * np.exp(1j * eps * t)))


def propagator_matrix(
    t: float,
    params: ChainParams,
    convention: Convention = Convention.PLAIN,
) -> PropagatorMatrix:
    """All entries at one time, from a single mode table."""
    eps, u = mode_table(params, convention)
    entries = (u * np.exp(1j * eps * t)) @ u.T
    entries.flags.writeable = False
    return PropagatorMatrix(time_t=t, params=params, convention=convention, entries=entries)


def fermion_heisenberg_coefficients(
    j: int,
    t: float,
    params: ChainParams,
    convention: Convention = Convention.PLAIN,
) -> np.ndarray:
    """Expansion coefficients of f_j^dag(t) over the site operators f_i^dag.

    This is column j of G(t); at t = 0 it is the unit coordinate vector
    at site j, and its squared norm stays 1 at all times.
    """
    eps, u = mode_table(params, convention)
    jj = _check_site(j, params.n_sites)
    return u @ (u[jj] * np.exp(1j * eps * t))


def end_entries(
    t_grid: np.ndarray,
    params: ChainParams,
    convention: Convention = Convention.PLAIN,
    block: int = 8192,
) -> tuple[np.ndarray, np.ndarray]:
    """(G_NN, G_1N) sampled over a whole time grid in one vectorized pass.

    Work and memory are O(len(t_grid) * N), chunked so long sweeps of
    large chains stay within a fixed footprint.
    """
    eps, u = mode_table(params, convention)
    last = u[params.n_sites - 1]
    w_nn = last * last
    w_1n = u[0] * last
    t_grid = np.asarray(t_grid, dtype=float)
    g_nn = np.empty(t_grid.shape, dtype=complex)
    g_1n = np.empty(t_grid.shape, dtype=complex)
    for start in range(0, t_grid.size, block):
        stop = min(start + block, t_grid.size)
        phases = np.exp(1j * np.outer(t_grid[start:stop], eps))
        g_nn[start:stop] = phases @ w_nn
        g_1n[start:stop] = phases @ w_1n
    return g_nn, g_1n
