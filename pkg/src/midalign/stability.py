"""Linearized stability analysis: uniform-state eigenvalues, the analytic
Jacobian of the quadratic mode map Q, spectra along the nontrivial branch,
and the finite-difference slope of the leading eigenvalue at the critical
point.

The dynamics is da/dt = Q(a) - a, and an equilibrium is linearly stable when
every eigenvalue of dQ/da lies inside the unit circle (equivalently, the
generator dQ/da - I has spectrum in the left half plane).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    CollisionKernel,
    CouplingTable,
    FourierState,
    NoiseSpectrum,
    gamma_eval,
)

__all__ = [
    "uniform_eigenvalue",
    "critical_gamma1",
    "jacobian",
    "EigenReport",
    "branch_eigenvalues",
    "eigenvalue_slope",
]


def uniform_eigenvalue(k: int, spectrum: NoiseSpectrum, kernel: CollisionKernel) -> float:
    """Growth rate lambda_k = 2 gamma_k Gamma(k/2) - Gamma(0) - Gamma(k) of
    linear perturbation mode k about the uniform state."""
    if k < 1:
        raise ValueError("mode index must be >= 1")
    g = lambda tu: gamma_eval(kernel, tu)
    return 2.0 * spectrum.gamma(k) * g(k) - g(0) - g(2 * k)


def critical_gamma1(kernel: CollisionKernel) -> float:
    """Root of lambda_1(gamma_1) = 0, i.e. gamma_1 = (Gamma(0) + Gamma(1)) / (2 Gamma(1/2)).

    Maxwellian: pi/4.  Hard sphere: 2/3.
    """
    if kernel is CollisionKernel.MAXWELLIAN:
        return math.pi / 4.0
    g = lambda tu: gamma_eval(kernel, tu)
    return (g(0) + g(2)) / (2.0 * g(1))


def jacobian(state: FourierState, table: CouplingTable) -> np.ndarray:
    """Analytic K x K Jacobian dQ_k/da_j of the quadratic map Q at `state`.

    At the uniform state this is the diagonal matrix diag(lambda_k + 1).
    """
    J = table.rhs_jacobian(state)
    J[np.diag_indices_from(J)] += 1.0
    return J


@dataclass(frozen=True)
class EigenReport:
    """Spectrum of dQ/da at one state: all eigenvalues, the one of maximal
    modulus, and the resulting stability flag."""

    gamma1: float
    eigenvalues: np.ndarray
    leading: complex
    stable: bool


def branch_eigenvalues(state: FourierState, table: CouplingTable) -> EigenReport:
    """Dense eigensolve of the Jacobian at an equilibrium state."""
    eig = np.linalg.eigvals(jacobian(state, table))
    lead = eig[np.argmax(np.abs(eig))]
    return EigenReport(
        gamma1=table.spectrum.gamma(1),
        eigenvalues=eig,
        leading=complex(lead),
        stable=bool(np.all(np.abs(eig) < 1.0)),
    )


def eigenvalue_slope(
    family,
    deltas,
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN,
    K: int = 16,
    tol: float = 1e-12,
) -> float:
    """Slope of the leading eigenvalue vs gamma_1 along the nontrivial branch,
    extrapolated to the critical point.

    For each delta in the (descending, ratio-2 geometric) grid the branch
    state at gamma_1 = gamma_c + delta is solved and the secant slope
    S(delta) = (lambda_lead - 1) / delta formed.  The leading eigenvalue
    carries an O(delta^{3/2}) remainder, so S has a sqrt(delta) error term:
    the first Richardson level eliminates it, the second removes the O(delta)
    term.
    """
    from .equilibria import solve_branch_state  # local import: two-way module pairing

    deltas = np.sort(np.asarray(list(deltas), dtype=float))[::-1]
    if deltas.size == 0:
        raise ValueError("empty delta grid")
    if deltas.size < 4:
        raise ValueError("need at least 4 delta points")
    if deltas[0] > 0.05 or deltas[-1] <= 0.0:
        raise ValueError("delta grid must lie in (0, 0.05]")
    ratios = deltas[:-1] / deltas[1:]
    if not np.allclose(ratios, 2.0, rtol=1e-6):
        raise ValueError("delta grid must be geometric with ratio 2")

    gamma_c = critical_gamma1(kernel)
    slopes = []
    for d in deltas:
        state, table = solve_branch_state(family, gamma_c + d, kernel=kernel, K=K, tol=tol)
        lead = branch_eigenvalues(state, table).leading
        slopes.append((lead.real - 1.0) / d)
    s = np.asarray(slopes)

    root2 = math.sqrt(2.0)
    level1 = (root2 * s[1:] - s[:-1]) / (root2 - 1.0)   # kills the delta^(1/2) term
    level2 = 2.0 * level1[1:] - level1[:-1]             # kills the delta^1 term
    return float(level2[-1])
