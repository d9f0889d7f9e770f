"""Partition-series construction of stationary mode vectors.

Every stationary coefficient is expanded as a power series in the order
parameter R,

    a_k = sum_n p_{k,n} R^{k+2n},

whose coefficients satisfy a quadratic recursion built from normalized
couplings G_{i,j}.  The a_1 row is special: seeding the recursion requires
p_{1,n} = delta_{n,0} (a_1 = R), yet the k = 1 recursion itself forces
p_{1,0} = p_{1,1} = 0.  Both representations are kept, tagged by the table's
`seeding` attribute, and the mismatch between them supplies the scalar
consistency condition R = a_1(R) that selects the order parameter of a
nontrivial equilibrium.  The whole construction is formal: no convergence of
the series is claimed, and results are used strictly away from the critical
point gamma_1 = pi/4 where the couplings blow up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import SingularDenominator
from .spectral import CollisionKernel, NoiseSpectrum, gamma_eval

__all__ = [
    "bnk_coupling",
    "PartitionTable",
    "build_partition_table",
    "a1_series",
    "a1_feedback",
    "a1_resummed",
    "consistency_root",
    "power_series_reconstruct",
]

SEED = "seed"
SELF_CONSISTENT = "selfconsistent"

_DENOM_TOL = 1e-12


def bnk_coupling(
    i: int,
    j: int,
    spectrum: NoiseSpectrum,
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN,
) -> float:
    """Normalized coupling G_{i,j} = gamma_{i+j} Gamma((i-j)/2) / (1 - 2 gamma_{i+j} Gamma((i+j)/2)).

    Symmetric in (i, j), even under (i, j) -> (-i, -j), vanishes for even
    nonzero i - j, and G_{j,j} = gamma_{2j} for j != 0.  Raises
    SingularDenominator when 2 gamma_{i+j} Gamma((i+j)/2) = 1; for |i+j| = 1
    that happens exactly at the critical point gamma_1 = pi/4.
    """
    s = i + j
    gamma_s = spectrum.gamma(s)
    denom = 1.0 - 2.0 * gamma_s * gamma_eval(kernel, s)
    if abs(denom) < _DENOM_TOL:
        raise SingularDenominator(
            f"1 - 2 gamma_{abs(s)} Gamma({s}/2) = {denom:.3g} for (i, j) = ({i}, {j})")
    return gamma_s / denom * gamma_eval(kernel, i - j)


@dataclass(frozen=True)
class PartitionTable:
    """Series coefficients p_{k,n} for 1 <= k <= K_eff, 0 <= n <= N_max.

    The recursion for column n reaches rows up to k + n, so the table is
    extended internally to K_eff = K_max + N_max and filled on the triangle
    k + n <= K_eff; cells outside it are NaN.  `seeding` records which a_1
    row the table carries.
    """

    spectrum: NoiseSpectrum
    kernel: CollisionKernel
    K_max: int
    N_max: int
    K_eff: int
    seeding: str
    p: np.ndarray

    def coefficient(self, k: int, n: int) -> float:
        if not (1 <= k <= self.K_eff and 0 <= n <= self.N_max):
            raise IndexError(f"(k, n) = ({k}, {n}) outside the table")
        val = self.p[k, n]
        if math.isnan(val):
            raise IndexError(f"(k, n) = ({k}, {n}) outside the filled triangle")
        return float(val)

    def p1_row(self) -> np.ndarray:
        return self.p[1].copy()


def build_partition_table(
    spectrum: NoiseSpectrum,
    K_max: int,
    N_max: int,
    seeding: str = SEED,
    kernel: CollisionKernel = CollisionKernel.MAXWELLIAN,
) -> PartitionTable:
    """Fill the p_{k,n} table in dependency order.

    Column n = 0 first (seeded by p_{1,0} = 1, giving p_{2,0} = gamma_2 and
    so on), then increasing n, each column in increasing k; the second sum of
    the recursion only reaches higher rows at strictly smaller column index,
    so the triangle k + n <= K_eff closes on itself.  With
    seeding="selfconsistent" the a_1 row is afterwards recomputed from the
    k = 1 recursion, in which the j = 1 factors refer to the self-consistent
    row itself (so p_{1,0} = p_{1,1} = 0) while all k >= 2 rows keep their
    seeded values.
    """
    if K_max < 3 or N_max < 2:
        raise ValueError("need K_max >= 3 and N_max >= 2")
    if seeding not in (SEED, SELF_CONSISTENT):
        raise ValueError(f"unknown seeding {seeding!r}")
    if abs(1.0 - 2.0 * spectrum.gamma(1) * gamma_eval(kernel, 1)) < _DENOM_TOL:
        raise SingularDenominator(
            "couplings are singular at gamma_1 = pi/4; the series is defined away from it")

    K_eff = K_max + N_max
    G_cache: dict[tuple[int, int], float] = {}

    def G(i: int, j: int) -> float:
        key = (i, j)
        if key not in G_cache:
            G_cache[key] = bnk_coupling(i, j, spectrum, kernel)
        return G_cache[key]

    p = np.full((K_eff + 1, N_max + 1), np.nan)
    p[0, :] = 0.0
    p[1, :] = 0.0
    p[1, 0] = 1.0
    for n in range(N_max + 1):
        for k in range(2, K_eff - n + 1):
            total = 0.0
            for j in range(1, k):
                g_val = G(k - j, j)
                if g_val == 0.0:
                    continue
                acc = 0.0
                for ell in range(n + 1):
                    acc += p[k - j, ell] * p[j, n - ell]
                total += g_val * acc
            for j in range(1, n + 1):
                g_val = G(k + j, -j)
                if g_val == 0.0:
                    continue
                acc = 0.0
                for ell in range(n - j + 1):
                    acc += p[k + j, ell] * p[j, n - j - ell]
                total += 2.0 * g_val * acc
            p[k, n] = total

    if seeding == SELF_CONSISTENT:
        p1 = np.zeros(N_max + 1)
        for n in range(1, N_max + 1):
            total = 0.0
            for j in range(1, n + 1):
                g_val = G(1 + j, -j)
                if g_val == 0.0:
                    continue
                for ell in range(n - j + 1):
                    other = p1[n - j - ell] if j == 1 else p[j, n - j - ell]
                    total += 2.0 * g_val * p[1 + j, ell] * other
            p1[n] = total
        p[1, :] = p1

    return PartitionTable(
        spectrum=spectrum,
        kernel=kernel,
        K_max=K_max,
        N_max=N_max,
        K_eff=K_eff,
        seeding=seeding,
        p=p,
    )


def a1_series(R: float, table: PartitionTable) -> float:
    """a_1(R) = sum_n p_{1,n} R^{1+2n}, truncated at the table's N_max.

    Needs a self-consistent table; the seeded representation is a_1(R) = R
    identically and carries no information.
    """
    if table.seeding != SELF_CONSISTENT:
        raise ValueError("a1_series needs a self-consistent table")
    if not abs(R) < 1.0:
        raise ValueError("|R| < 1 required")
    powers = R ** (1 + 2 * np.arange(table.N_max + 1))
    return float(table.p[1] @ powers)


def a1_feedback(table: PartitionTable) -> tuple[float, np.ndarray]:
    """Split the a_1 row into its linear self-feedback and the driven part.

    The j = 1 term of the k = 1 recursion is exactly
    2 G_{2,-1} p_{2,0} p_{1,n-1} = rho p_{1,n-1} with rho = 2 G_{2,-1} gamma_2
    (the a_2 row is gamma_2 delta_{n,0}).  Hence p_{1,n} = rho p_{1,n-1} + q_n
    and, summing the series,

        a_1(R) (1 - rho R^2) = Q(R),   Q(R) = sum_n q_n R^{1+2n}.

    Above the critical point rho > 1 and the raw series for a_1 diverges
    before the consistency point is reached; this closed-form resummation of
    the geometric feedback is where the series actually lives.  Returns
    (rho, q).
    """
    if table.seeding != SELF_CONSISTENT:
        raise ValueError("feedback split needs a self-consistent table")
    rho = 2.0 * bnk_coupling(2, -1, table.spectrum, table.kernel) * table.spectrum.gamma(2)
    p1 = table.p[1]
    q = p1.copy()
    q[1:] -= rho * p1[:-1]
    return float(rho), q


def a1_resummed(R: float, table: PartitionTable) -> float:
    """a_1(R) with the linear self-feedback of the recursion summed exactly:
    Q(R) / (1 - rho R^2).  Agrees with a1_series inside its radius of
    convergence and continues it beyond."""
    rho, q = a1_feedback(table)
    Q = float(q @ R ** (1 + 2 * np.arange(table.N_max + 1)))
    return Q / (1.0 - rho * R * R)


def consistency_root(
    table: PartitionTable,
    r_max: float = 0.9,
    tol: float = 1e-12,
    n_scan: int = 2048,
) -> float | None:
    """Nonzero root of the consistency condition R = a_1(R) on (0, r_max].

    R = 0 always solves the condition (the uniform state) and is deliberately
    excluded.  The equation is solved in the pole-free polynomial form
    P(R) = Q(R) + rho R^3 - R = 0, equivalent to R = a_1(R) with the
    self-feedback resummed; the truncated series itself diverges below the
    supercritical root, so bisecting it directly would never find one.
    Returns None when P has no sign change on the interval.
    """
    if not 0.0 < r_max < 1.0:
        raise ValueError("need 0 < r_max < 1")
    rho, q = a1_feedback(table)
    exponents = 1 + 2 * np.arange(table.N_max + 1)

    def poly(r: float) -> float:
        return float(q @ r ** exponents) + rho * r ** 3 - r

    grid = np.linspace(r_max / n_scan, r_max, n_scan)
    vals = np.array([poly(r) for r in grid])
    idx = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if idx.size == 0:
        return None
    i = idx[0]
    if vals[i] == 0.0:
        return float(grid[i])
    return float(brentq(poly, grid[i], grid[i + 1], xtol=tol))


def power_series_reconstruct(table: PartitionTable, R: float, k: int) -> float:
    """a_k(R) = sum_n p_{k,n} R^{k+2n} truncated at N_max (k <= K_max).

    For k = 1 on a self-consistent table the resummed evaluation is used, so
    that at a consistency root the reconstruction returns R itself.
    """
    if not abs(R) < 1.0:
        raise ValueError("|R| < 1 required")
    if not 1 <= k <= table.K_max:
        raise ValueError("k must lie in [1, K_max]")
    if k == 1:
        if table.seeding == SELF_CONSISTENT:
            return a1_resummed(R, table)
        return float(R)  # seeded representation: a_1(R) = R identically
    row = table.p[k]
    powers = R ** (k + 2 * np.arange(table.N_max + 1))
    return float(row @ powers)
