"""Collision kernels, noise spectra and the truncated Fourier-mode dynamics.

The density on the circle is represented by its real cosine coefficients
a_0..a_K with the convention

    f(x) = 1 + 2 * sum_{k>=1} a_k cos(k x),      a_0 = 1,

so that f(x) dx / (2 pi) is a probability measure and f == 1 is the uniform
state.  The noise density g uses the same convention with coefficients
gamma_k.  The collision-rate transform Gamma(u) is only ever needed on
half-integer points, which are passed around as exact integer numerators
(u = twice_u / 2) so the integer / half-integer branch is never decided by a
floating-point comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

__all__ = [
    "CollisionKernel",
    "gamma_eval",
    "NoiseSpectrum",
    "explicit_spectrum",
    "fejer_spectrum",
    "periodized_spectrum",
    "FejerFamily",
    "ScaledFamily",
    "GaussianPeriodizedFamily",
    "FourierState",
    "CouplingTable",
    "build_coupling_table",
    "DensityProfile",
    "reconstruct_density",
]


class CollisionKernel(Enum):
    """Collision-rate selector: constant rate or rate ~ |sin(y/2)|."""

    MAXWELLIAN = "maxwellian"
    HARD_SPHERE = "hardsphere"

    def rate(self, y):
        """Collision rate as a function of the angle difference y."""
        if self is CollisionKernel.MAXWELLIAN:
            return np.ones_like(np.asarray(y, dtype=float))
        return np.abs(np.sin(np.asarray(y, dtype=float) / 2.0))


def gamma_eval(kernel: CollisionKernel, twice_u: int) -> float:
    """Evaluate Gamma(u) at the half-integer u = twice_u / 2.

    Maxwellian:  Gamma(u) = sin(pi u) / (pi u), i.e. 1 at u = 0, 0 at other
    integers, and 2 (-1)^l / (pi (2l+1)) at u = l + 1/2.
    Hard sphere: Gamma(u) = (2 - 4 u sin(pi u)) / (pi - 4 pi u^2), evaluated
    by its exact branch values (the closed form is 0/0 at u = +-1/2).
    """
    m = abs(int(twice_u))
    if kernel is CollisionKernel.MAXWELLIAN:
        if m == 0:
            return 1.0
        if m % 2 == 0:
            return 0.0
        ell = (m - 1) // 2
        return 2.0 * (-1.0) ** ell / (math.pi * m)
    if m % 2 == 0:
        return 2.0 / (math.pi * (1.0 - m * m))  # m = 2u, so m^2 = 4 u^2
    if m == 1:
        return 1.0 / math.pi
    ell = (m - 1) // 2
    return ((-1.0) ** ell * (2.0 * ell + 1.0) - 1.0) / (2.0 * math.pi * ell * (ell + 1.0))


# --------------------------------------------------------------------------
# noise spectra


@dataclass(frozen=True)
class NoiseSpectrum:
    """Cosine coefficients gamma_0..gamma_K of an even noise density g.

    Only cosine coefficients are stored; evenness of g is implicit.
    Coefficients beyond K are treated as zero.
    """

    coeffs: np.ndarray
    label: str = "list"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("need at least gamma_0 and gamma_1")
        if c[0] != 1.0:
            raise ValueError("gamma_0 must be 1 (unit mass)")
        if np.any(np.abs(c) > 1.0 + 1e-12):
            raise ValueError("|gamma_k| <= 1 is required for a probability density")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def gamma(self, k: int) -> float:
        k = abs(int(k))
        return float(self.coeffs[k]) if k <= self.K else 0.0

    def density(self, x):
        """g(x) = 1 + 2 sum gamma_k cos(kx)."""
        x = np.asarray(x, dtype=float)
        ks = np.arange(1, self.K + 1)
        return 1.0 + 2.0 * np.cos(np.multiply.outer(x, ks)) @ self.coeffs[1:]

    def density_min(self, n_grid: int = 4096) -> float:
        x = grid_on_circle(n_grid)
        return float(np.min(self.density(x)))


def grid_on_circle(n: int) -> np.ndarray:
    """n equispaced points on (-pi, pi], including pi and excluding -pi."""
    return -math.pi + 2.0 * math.pi * (np.arange(n) + 1.0) / n


def explicit_spectrum(gammas: Sequence[float], label: str = "list") -> NoiseSpectrum:
    """Spectrum from explicit gamma_1..gamma_K (gamma_0 = 1 is implied)."""
    return NoiseSpectrum(np.concatenate(([1.0], np.asarray(gammas, dtype=float))), label)


def fejer_spectrum(order: int, gamma1: float, K: int) -> NoiseSpectrum:
    """Convex combination of uniform noise and a Fejer kernel of the given order.

    gamma_k = lam (N - k) / N for 1 <= k < N with lam = N gamma1 / (N - 1).
    Coefficients are valid for gamma1 in [0, 1]; the density itself is
    nonnegative only for gamma1 <= (N-1)/N (lam <= 1), which is enforced
    where an actual density is sampled, not here.
    """
    if order < 2:
        raise ValueError("Fejer order must be >= 2")
    if not 0.0 <= gamma1 <= 1.0:
        raise ValueError(f"gamma1={gamma1} outside the Fejer-admissible range [0, 1]")
    if K < 1:
        raise ValueError("K must be >= 1")
    lam = order * gamma1 / (order - 1)
    ks = np.arange(K + 1)
    coeffs = np.where(ks < order, lam * (order - ks) / order, 0.0)
    coeffs[0] = 1.0
    return NoiseSpectrum(coeffs, label=f"fejer:{order}")


_RHO_HATS: dict[str, Callable[[float], float]] = {
    "gaussian": lambda s: math.exp(-s * s / 2.0),
    "rect": lambda s: math.sin(s) / s if s != 0.0 else 1.0,
}


def periodized_spectrum(base, tau: float, K: int, label: str | None = None) -> NoiseSpectrum:
    """Noise from periodizing rho(y/tau)/tau around the circle: gamma_k = rho_hat(tau k).

    `base` is "gaussian", "rect", or an even probability density on R whose
    transform is then computed by quadrature to 1e-12 absolute.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if isinstance(base, str):
        try:
            rho_hat = _RHO_HATS[base]
        except KeyError:
            raise ValueError(f"unknown base density {base!r}") from None
        name = base
    else:
        def rho_hat(s, _rho=base):
            val, _err = quad(lambda y: _rho(y) * math.cos(s * y), -np.inf, np.inf,
                             epsabs=1e-12, limit=400)
            return val
        name = "numeric"
    coeffs = np.array([rho_hat(tau * k) for k in range(K + 1)])
    return NoiseSpectrum(coeffs, label=label or f"{name}:{tau:g}")


class FejerFamily:
    """Fejer noise of fixed order, parameterized by gamma_1."""

    def __init__(self, order: int = 9):
        self.order = order
        self.label = f"fejer:{order}"

    def at(self, gamma1: float, K: int) -> NoiseSpectrum:
        return fejer_spectrum(self.order, gamma1, K)


class ScaledFamily:
    """gamma_k(gamma_1) = w_k * gamma_1 for fixed weights with w_1 = 1."""

    def __init__(self, weights: Sequence[float], label: str = "scaled"):
        w = np.asarray(weights, dtype=float)
        if len(w) < 1 or w[0] != 1.0:
            raise ValueError("weights start at k=1 and must have w_1 = 1")
        if np.any(np.abs(w) > 1.0):
            raise ValueError("|w_k| <= 1 keeps the coefficients admissible")
        self.weights = w
        self.label = label

    def at(self, gamma1: float, K: int) -> NoiseSpectrum:
        gammas = np.zeros(K)
        n = min(K, len(self.weights))
        gammas[:n] = gamma1 * self.weights[:n]
        return explicit_spectrum(gammas, label=self.label)


class GaussianPeriodizedFamily:
    """Periodized Gaussian noise reparameterized by gamma_1 = exp(-tau^2/2)."""

    label = "gaussian-family"

    def at(self, gamma1: float, K: int) -> NoiseSpectrum:
        if not 0.0 < gamma1 <= 1.0:
            raise ValueError("need 0 < gamma1 <= 1 to solve for tau")
        ks = np.arange(K + 1)
        return NoiseSpectrum(gamma1 ** (ks * ks), label=self.label)


# --------------------------------------------------------------------------
# mode vectors


@dataclass
class FourierState:
    """Even-density mode vector a_0..a_K with a_0 = 1 (mass normalization)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("need at least a_0 and a_1")
        if c[0] != 1.0:
            raise ValueError("a_0 must be 1")
        self.coeffs = c

    @classmethod
    def uniform(cls, K: int) -> "FourierState":
        c = np.zeros(K + 1)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def single_mode(cls, K: int, k: int, amplitude: float) -> "FourierState":
        if not 1 <= k <= K:
            raise ValueError("mode index out of range")
        state = cls.uniform(K)
        state.coeffs[k] = amplitude
        return state

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def a(self, k: int) -> float:
        return float(self.coeffs[abs(int(k))])

    def copy(self) -> "FourierState":
        return FourierState(self.coeffs.copy())

    def bounds_violations(self) -> list[int]:
        """Modes with |a_k| > 1 (flagged as unphysical, never clamped)."""
        return [int(k) for k in np.nonzero(np.abs(self.coeffs[1:]) > 1.0 + 1e-12)[0] + 1]


# --------------------------------------------------------------------------
# mode coupling and the truncated right-hand side


@dataclass(frozen=True)
class CouplingTable:
    """Precomputed coefficients of the truncated quadratic mode dynamics.

    For 1 <= k <= K the dynamics reads

        da_k/dt = L_k a_k + sum_{n=1}^{k-1} c1[k,n] a_n a_{k-n}
                          + sum_{n=k+1}^{K} c2[k,n] a_n a_{n-k}

    with L_k = 2 gamma_k Gamma(k/2) - Gamma(0) - Gamma(k),
    c1[k,n] = gamma_k Gamma(n - k/2) - Gamma(n) and
    c2[k,n] = 2 gamma_k Gamma(n - k/2) - Gamma(n) - Gamma(n-k).
    The quadratic terms are flattened into index lists so the right-hand
    side and its Jacobian are single vectorized passes.  Instances are
    immutable and safe to share across threads.
    """

    kernel: CollisionKernel
    spectrum: NoiseSpectrum
    K: int
    linear: np.ndarray          # L_0..L_K (L_0 unused)
    c1: np.ndarray              # (K+1, K+1), gain/loss split, lower part n < k
    c2: np.ndarray              # (K+1, K+1), upper part n > k
    term_k: np.ndarray = field(repr=False)
    term_n: np.ndarray = field(repr=False)
    term_m: np.ndarray = field(repr=False)
    term_c: np.ndarray = field(repr=False)

    def rhs(self, state: FourierState) -> np.ndarray:
        """Truncated da_k/dt for k = 1..K.  a_0 is never evolved."""
        a = state.coeffs
        if len(a) != self.K + 1:
            raise ValueError(f"state has K={len(a) - 1}, table has K={self.K}")
        return self.rhs_vec(a)

    def rhs_vec(self, a_full: np.ndarray) -> np.ndarray:
        """rhs on a raw coefficient vector a_0..a_K (hot path for integrators)."""
        quad_part = np.bincount(
            self.term_k,
            weights=self.term_c * a_full[self.term_n] * a_full[self.term_m],
            minlength=self.K + 1,
        )
        return self.linear[1:] * a_full[1:] + quad_part[1:]

    def quadratic_map(self, state: FourierState) -> np.ndarray:
        """Q_k(a) for k = 1..K, where da/dt = Q(a) - a."""
        return state.coeffs[1:] + self.rhs(state)

    def rhs_jacobian(self, state: FourierState) -> np.ndarray:
        """Analytic K x K matrix d(rhs_k)/d(a_j)."""
        a = state.coeffs
        if len(a) != self.K + 1:
            raise ValueError(f"state has K={len(a) - 1}, table has K={self.K}")
        J = np.zeros((self.K + 1, self.K + 1))
        np.add.at(J, (self.term_k, self.term_n), self.term_c * a[self.term_m])
        np.add.at(J, (self.term_k, self.term_m), self.term_c * a[self.term_n])
        J = J[1:, 1:]
        J[np.diag_indices(self.K)] += self.linear[1:]
        return J


def build_coupling_table(kernel: CollisionKernel, spectrum: NoiseSpectrum, K: int) -> CouplingTable:
    """Assemble the coupling coefficients for truncation K (sums cut at n = K)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    G = lambda twice_u: gamma_eval(kernel, twice_u)
    linear = np.zeros(K + 1)
    c1 = np.zeros((K + 1, K + 1))
    c2 = np.zeros((K + 1, K + 1))
    tk, tn, tm, tc = [], [], [], []
    for k in range(1, K + 1):
        gk = spectrum.gamma(k)
        linear[k] = 2.0 * gk * G(k) - G(0) - G(2 * k)
        for n in range(1, k):
            c1[k, n] = gk * G(2 * n - k) - G(2 * n)
            if c1[k, n] != 0.0:
                tk.append(k)
                tn.append(n)
                tm.append(k - n)
                tc.append(c1[k, n])
        for n in range(k + 1, K + 1):
            c2[k, n] = 2.0 * gk * G(2 * n - k) - G(2 * n) - G(2 * (n - k))
            if c2[k, n] != 0.0:
                tk.append(k)
                tn.append(n)
                tm.append(n - k)
                tc.append(c2[k, n])
    return CouplingTable(
        kernel=kernel,
        spectrum=spectrum,
        K=K,
        linear=linear,
        c1=c1,
        c2=c2,
        term_k=np.asarray(tk, dtype=np.intp),
        term_n=np.asarray(tn, dtype=np.intp),
        term_m=np.asarray(tm, dtype=np.intp),
        term_c=np.asarray(tc, dtype=float),
    )


# --------------------------------------------------------------------------
# density reconstruction


@dataclass(frozen=True)
class DensityProfile:
    """Density samples on an equispaced circle grid plus a positivity check."""

    x: np.ndarray
    values: np.ndarray
    min_value: float

    @property
    def nonnegative(self) -> bool:
        return self.min_value >= 0.0


def reconstruct_density(state: FourierState, n_points: int = 4096) -> DensityProfile:
    """Evaluate f(x) = 1 + 2 sum a_k cos(kx) on n_points equispaced points.

    Requires n_points >= 2K + 1 so the modes are resolved.  Negative values
    are reported through min_value, never clamped.
    """
    if n_points < 2 * state.K + 1:
        raise ValueError("grid too coarse: need n_points >= 2K + 1")
    x = grid_on_circle(n_points)
    ks = np.arange(1, state.K + 1)
    f = 1.0 + 2.0 * np.cos(np.multiply.outer(x, ks)) @ state.coeffs[1:]
    return DensityProfile(x=x, values=f, min_value=float(f.min()))
