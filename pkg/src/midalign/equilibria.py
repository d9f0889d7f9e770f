"""Stationary solutions, branch continuation in gamma_1, and the critical
exponent of the alignment transition.

The nontrivial branch is computed by damped Newton iteration on the full
mode vector (a_1, ..., a_K).  The reduced coordinates of the small-delta
expansion (a_2 and the ratios a_p / a_1 for odd p) appear only inside
`asymptotic_state`, which seeds the first Newton solve above the critical
point; solving in full coordinates avoids the a_1 = 0 singularity of the
ratio variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, NonConvergence
from .spectral import (
    CollisionKernel,
    CouplingTable,
    FourierState,
    build_coupling_table,
)
from .stability import branch_eigenvalues, critical_gamma1

__all__ = [
    "stationary_residual",
    "solve_stationary",
    "asymptotic_state",
    "solve_branch_state",
    "BifurcationRow",
    "BifurcationDiagram",
    "continue_branch",
    "fit_critical_exponent",
]

TRUNCATION_TAIL = 1e-10   # |a_K| above this means K is too small
K_CAP = 256


def stationary_residual(state: FourierState, table: CouplingTable) -> np.ndarray:
    """Residual r_k = da_k/dt evaluated at `state`; a fixed point has r = 0."""
    return table.rhs(state)


def _canonical_sign(state: FourierState) -> FourierState:
    """Pick the a_1 > 0 representative (a_k -> (-1)^k a_k is a rotation by pi)."""
    if state.coeffs[1] < 0.0:
        signs = np.where(np.arange(len(state.coeffs)) % 2 == 0, 1.0, -1.0)
        return FourierState(state.coeffs * signs)
    return state


def solve_stationary(
    table: CouplingTable,
    guess: FourierState,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> FourierState:
    """Damped Newton iteration on the stationary residual.

    Uses the analytic Jacobian of the mode map; the step is halved up to 8
    times whenever the residual norm fails to decrease.  Returns the
    converged state with the positive-a_1 sign convention.  Raises
    NonConvergence (carrying the last iterate) after `max_iter` iterations
    or if the step diverges.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    if guess.K != table.K:
        raise ValueError("guess and table disagree on K")
    a = guess.coeffs.copy()
    state = FourierState(a)
    res = table.rhs(state)
    rnorm = np.max(np.abs(res))
    for _ in range(max_iter):
        if rnorm <= tol:
            return _canonical_sign(state)
        J = table.rhs_jacobian(state)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(f"singular Jacobian: {exc}", last_state=state,
                                 residual_norm=float(rnorm)) from exc
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e6:
            raise NonConvergence("Newton step diverged", last_state=state,
                                 residual_norm=float(rnorm))
        alpha = 1.0
        for _halving in range(8):
            trial = a.copy()
            trial[1:] += alpha * step
            trial_state = FourierState(trial)
            trial_res = table.rhs(trial_state)
            trial_norm = np.max(np.abs(trial_res))
            if trial_norm < rnorm:
                break
            alpha *= 0.5
        a, state, res, rnorm = trial, trial_state, trial_res, trial_norm
    if rnorm <= tol:
        return _canonical_sign(state)
    raise NonConvergence(f"no convergence after {max_iter} iterations "
                         f"(residual {rnorm:.3g})", last_state=state,
                         residual_norm=float(rnorm))


def asymptotic_state(gamma1: float, family, K: int) -> FourierState:
    """Leading-order nontrivial equilibrium for gamma_1 >= pi/4 (Maxwellian).

    a_1 from the square-root law sqrt(12 delta / (pi gamma_2(pi/4))), the
    a_2 slope 12/pi, the a_3/a_1 slope 144 g3 / (4 pi g3 + 3 pi^2), even
    modes from the closure a_{2m} = gamma_{2m} a_m^2, all other modes zero.
    Used as the Newton seed next to the critical point.
    """
    gamma_c = math.pi / 4.0
    delta = gamma1 - gamma_c
    if delta < 0.0:
        raise ValueError("asymptotic state exists only for gamma1 >= pi/4")
    crit_spectrum = family.at(gamma_c, K)
    g2c = crit_spectrum.gamma(2)
    if g2c <= 0.0:
        raise ValueError("family must have gamma_2(pi/4) > 0")
    g3c = crit_spectrum.gamma(3)
    spectrum = family.at(gamma1, K)

    state = FourierState.uniform(K)
    a = state.coeffs
    a[1] = math.sqrt(12.0 * delta / (math.pi * g2c))
    if K >= 2:
        a[2] = 12.0 * delta / math.pi
    if K >= 3:
        tilde3 = 144.0 * g3c / (4.0 * math.pi * g3c + 3.0 * math.pi ** 2) * delta
        a[3] = a[1] * tilde3
    for q in range(4, K + 1, 2):
        a[q] = spectrum.gamma(q) * a[q // 2] ** 2
    return state


def _resize(state: FourierState, K: int) -> FourierState:
    out = np.zeros(K + 1)
    out[0] = 1.0
    n = min(K, state.K)
    out[1 : n + 1] = state.coeffs[1 : n + 1]
    return FourierState(out)


def solve_branch_state(
    family,
    gamma1: float,
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN,
    K: int = 16,
    tol: float = 1e-12,
    guess: FourierState | None = None,
) -> tuple[FourierState, CouplingTable]:
    """Solve the stationary problem at one gamma_1, doubling K (cap 256)
    until the reported tail mode satisfies |a_K| < 1e-10."""
    gamma_c = critical_gamma1(kernel)
    while True:
        spectrum = family.at(gamma1, K)
        table = build_coupling_table(kernel, spectrum, K)
        if guess is not None:
            seed = _resize(guess, K)
        elif gamma1 <= gamma_c:
            seed = FourierState.uniform(K)
        elif kernel is CollisionKernel.MAXWELLIAN:
            seed = asymptotic_state(gamma1, family, K)
        else:
            # no paper-backed expansion here; crude square-root seed
            seed = FourierState.uniform(K)
            seed.coeffs[1] = math.sqrt(gamma1 - gamma_c)
            if K >= 2:
                seed.coeffs[2] = spectrum.gamma(2) * seed.coeffs[1] ** 2
        state = solve_stationary(table, seed, tol=tol)
        if abs(state.coeffs[K]) < TRUNCATION_TAIL or K >= K_CAP:
            return state, table
        guess = state
        K = min(2 * K, K_CAP)


@dataclass(frozen=True)
class BifurcationRow:
    gamma1: float
    coeffs: np.ndarray          # a_0..a_K of this row
    leading_eig: complex
    stable: bool
    converged: bool

    @property
    def a1(self) -> float:
        return float(self.coeffs[1])


@dataclass
class BifurcationDiagram:
    """Per-gamma_1 equilibrium records along a continuation sweep."""

    rows: list[BifurcationRow] = field(default_factory=list)
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN
    family_label: str = ""
    critical: float = math.pi / 4.0
    aborted: bool = False
    experimental: bool = False

    @property
    def K(self) -> int:
        return max(len(r.coeffs) for r in self.rows) - 1

    def gamma1_values(self) -> np.ndarray:
        return np.asarray([r.gamma1 for r in self.rows])

    def a1_values(self) -> np.ndarray:
        return np.asarray([r.a1 for r in self.rows])

    def modes_matrix(self) -> np.ndarray:
        """Rows padded to the common K (tail entries below 1e-10 by policy)."""
        K = self.K
        out = np.zeros((len(self.rows), K + 1))
        for i, r in enumerate(self.rows):
            out[i, : len(r.coeffs)] = r.coeffs
        return out

    def converged_fraction(self) -> float:
        if not self.rows:
            return 1.0
        return sum(r.converged for r in self.rows) / len(self.rows)


def continue_branch(
    family,
    gamma_lo: float,
    gamma_hi: float,
    steps: int,
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN,
    K: int = 16,
    tol: float = 1e-12,
    grid=None,
) -> BifurcationDiagram:
    """Natural-parameter continuation of the equilibrium branch over
    [gamma_lo, gamma_hi].

    Below the critical point the uniform branch is emitted; above it the
    march goes upward, seeding the first solve from `asymptotic_state` and
    every later one from the previous converged state.  Rows that fail to
    converge are marked and skipped; three consecutive failures abort the
    sweep.  An explicit `grid` overrides the linear spacing.
    """
    if grid is None:
        if steps < 8:
            raise ValueError("need at least 8 continuation steps")
        if not gamma_lo < gamma_hi:
            raise ValueError("need gamma_lo < gamma_hi")
        grid = np.linspace(gamma_lo, gamma_hi, steps)
    else:
        grid = np.sort(np.asarray(grid, dtype=float))
    gamma_c = critical_gamma1(kernel)
    diagram = BifurcationDiagram(
        kernel=kernel,
        family_label=getattr(family, "label", "family"),
        critical=gamma_c,
        experimental=kernel is not CollisionKernel.MAXWELLIAN,
    )
    prev: FourierState | None = None
    consecutive_failures = 0
    for g1 in grid:
        if g1 <= gamma_c:
            spectrum = family.at(g1, K)
            table = build_coupling_table(kernel, spectrum, K)
            report = branch_eigenvalues(FourierState.uniform(K), table)
            diagram.rows.append(BifurcationRow(
                gamma1=float(g1),
                coeffs=FourierState.uniform(K).coeffs,
                leading_eig=report.leading,
                stable=report.stable,
                converged=True,
            ))
            continue
        try:
            state, table = solve_branch_state(family, float(g1), kernel=kernel,
                                              K=K, tol=tol, guess=prev)
            if prev is not None and state.coeffs[1] < 1e-6:
                # the warm start slid down to the uniform solution (near the
                # critical point the Jacobian is almost singular along the
                # branch direction); reseed from the asymptotic expansion
                retry, retry_table = solve_branch_state(
                    family, float(g1), kernel=kernel, K=K, tol=tol, guess=None)
                if retry.coeffs[1] > state.coeffs[1]:
                    state, table = retry, retry_table
        except NonConvergence as exc:
            last = exc.last_state if exc.last_state is not None else FourierState.uniform(K)
            diagram.rows.append(BifurcationRow(
                gamma1=float(g1),
                coeffs=last.coeffs,
                leading_eig=complex(np.nan),
                stable=False,
                converged=False,
            ))
            consecutive_failures += 1
            if consecutive_failures >= 3:
                diagram.aborted = True
                break
            continue
        consecutive_failures = 0
        K = max(K, state.K)
        prev = state
        report = branch_eigenvalues(state, table)
        diagram.rows.append(BifurcationRow(
            gamma1=float(g1),
            coeffs=state.coeffs.copy(),
            leading_eig=report.leading,
            stable=report.stable,
            converged=True,
        ))
    return diagram


def fit_critical_exponent(
    diagram: BifurcationDiagram,
    window: tuple[float, float] = (1e-4, 1e-2),
) -> tuple[float, float]:
    """Least-squares fit of log a_1 against log (gamma_1 - gamma_c).

    Returns (exponent, amplitude) from a_1 ~ amplitude * delta^exponent,
    using converged nontrivial rows with delta inside `window`.  Raises
    InsufficientData with fewer than 6 such rows.
    """
    lo, hi = window
    deltas, amps = [], []
    for row in diagram.rows:
        delta = row.gamma1 - diagram.critical
        if row.converged and row.a1 > 1e-14 and lo <= delta <= hi:
            deltas.append(delta)
            amps.append(row.a1)
    if len(deltas) < 6:
        raise InsufficientData(
            f"only {len(deltas)} converged nontrivial rows in the window")
    slope, intercept = np.polyfit(np.log(deltas), np.log(amps), 1)
    return float(slope), float(math.exp(intercept))
