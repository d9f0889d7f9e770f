"""Closed-form equilibrium of the model posed on the real line.

In Fourier variables the fixed point of f = (2 (f*f)(2x)) * g is the
infinite product

    f_hat(xi) = prod_{j>=0} g_hat(xi / 2^j)^(2^j),

and its lambda-mixing generalization replaces the halving cascade by a
binomial double product.  Products are accumulated in log space: exponents
reach 2^60 and beyond, while |g_hat| <= 1 keeps every log term nonpositive.
Only the j = 0 factor (and odd binomials in the mixing case) can contribute
a sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDecay, MidalignError

__all__ = [
    "LineNoise",
    "gaussian_noise",
    "rectangular_noise",
    "numeric_noise",
    "fhat_product",
    "fhat_product_lambda",
    "variance_from_chf",
    "DensityResult",
    "invert_to_density",
]

PRODUCT_TOL = 1e-12
MAX_DEPTH = 64
MAX_DEPTH_LAMBDA = 200


@dataclass(frozen=True)
class LineNoise:
    """Even, zero-mean noise density on R through its characteristic function."""

    kind: str
    chf: callable
    variance: float

    def __call__(self, xi):
        return self.chf(np.asarray(xi, dtype=float))


def gaussian_noise(sigma2: float = 1.0) -> LineNoise:
    if sigma2 <= 0:
        raise ValueError("variance must be positive")
    return LineNoise("gaussian", lambda xi: np.exp(-0.5 * sigma2 * xi * xi), sigma2)


def rectangular_noise(halfwidth: float = 1.0) -> LineNoise:
    """Uniform density on [-h, h]; g_hat(xi) = sin(h xi) / (h xi)."""
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")

    def chf(xi):
        return np.sinc(halfwidth * np.asarray(xi, dtype=float) / math.pi)

    return LineNoise("rect", chf, halfwidth ** 2 / 3.0)


def numeric_noise(x: np.ndarray, g: np.ndarray) -> LineNoise:
    """Noise given by density samples on a uniform grid (normalized here).

    Exists so arbitrary experimental noises can be fed from files; the
    characteristic function is computed by trapezoidal quadrature and the
    density is symmetrized so the zero-mean/even hypothesis holds.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    if x.ndim != 1 or x.shape != g.shape or len(x) < 8:
        raise ValueError("need matching 1-d sample arrays of length >= 8")
    g = 0.5 * (g + g[::-1])  # symmetrize about the grid center
    x = x - np.trapezoid(x * g, x) / np.trapezoid(g, x)
    g = g / np.trapezoid(g, x)
    var = float(np.trapezoid(x * x * g, x))

    def chf(xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        vals = np.trapezoid(g[None, :] * np.cos(np.outer(xi, x)), x, axis=1)
        return vals if vals.size > 1 else float(vals[0])

    return LineNoise("numeric", chf, var)


def _check_chf(vals) -> np.ndarray:
    vals = np.asarray(vals, dtype=float)
    if np.any(np.abs(vals) > 1.0 + 1e-12):
        raise MidalignError("|g_hat| > 1: not the transform of a probability density")
    return vals


def _partial_product(xi: np.ndarray, noise: LineNoise, depth: int) -> np.ndarray:
    """prod_{j=0}^{depth-1} g_hat(xi/2^j)^(2^j), log-space with sign from j=0."""
    g0 = _check_chf(noise.chf(xi))
    sign = np.sign(g0)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(g0))
    for j in range(1, depth):
        gj = _check_chf(noise.chf(xi / 2.0 ** j))
        with np.errstate(divide="ignore"):
            log_abs = log_abs + 2.0 ** j * np.log(np.abs(gj))  # even exponent: no sign
    return sign * np.exp(log_abs)


def fhat_product(xi, noise: LineNoise, depth: int | None = None):
    """Equilibrium characteristic function as the halving-cascade product.

    With explicit `depth` the partial product over j < depth is returned.
    Otherwise the depth is doubled until two successive values differ by less
    than 1e-12 everywhere (geometric tail; hard cap 64).
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if depth is not None:
        if depth < 1:
            raise ValueError("depth must be >= 1")
        out = _partial_product(xi_arr, noise, depth)
    else:
        d = 4
        out = _partial_product(xi_arr, noise, d)
        while d < MAX_DEPTH:
            nxt = _partial_product(xi_arr, noise, 2 * d)
            done = np.max(np.abs(nxt - out)) < PRODUCT_TOL
            out, d = nxt, 2 * d
            if done:
                break
    return out if np.ndim(xi) else float(out[0])


def fhat_product_lambda(xi, noise: LineNoise, lam: float, depth: int | None = None):
    """Equilibrium transform for the mixing rule (lam x_j + (1-lam) x_k + noise):

        f_hat(xi) = prod_{k>=0} prod_{j<=k} g_hat(lam^j (1-lam)^{k-j} xi)^C(k,j).

    Binomial exponents are applied in log space; signs are tracked through
    the parity of C(k,j).  The outer index is truncated at `depth`, or grown
    until the increment falls below 1e-12 (tail ratio lam^2 + (1-lam)^2 < 1).
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    log_abs = np.zeros_like(xi_arr)
    neg_parity = np.zeros_like(xi_arr, dtype=int)
    cap = depth if depth is not None else MAX_DEPTH_LAMBDA
    prev = None
    for k in range(cap):
        for j in range(k + 1):
            scale = lam ** j * (1.0 - lam) ** (k - j)
            g = _check_chf(noise.chf(scale * xi_arr))
            comb = math.comb(k, j)
            with np.errstate(divide="ignore"):
                log_abs = log_abs + comb * np.log(np.abs(g))
            if comb % 2 == 1:
                neg_parity = neg_parity + (g < 0)
        cur = np.where(neg_parity % 2 == 0, 1.0, -1.0) * np.exp(log_abs)
        if depth is None and prev is not None and np.max(np.abs(cur - prev)) < PRODUCT_TOL:
            break
        prev = cur
    return cur if np.ndim(xi) else float(cur[0])


def variance_from_chf(chf, h: float = 1e-3) -> float:
    """Variance as -d^2 f_hat / d xi^2 at 0 by central differences,
    Richardson-extrapolated once to cancel the O(h^2) term."""
    def second(step):
        return (2.0 * chf(0.0) - chf(step) - chf(-step)) / (step * step)

    return float((4.0 * second(h / 2.0) - second(h)) / 3.0)


@dataclass(frozen=True)
class DensityResult:
    """Inverse-transform samples plus integral diagnostics."""

    x: np.ndarray
    values: np.ndarray
    mass: float
    variance: float
    min_value: float


def invert_to_density(xi: np.ndarray, fhat: np.ndarray, x: np.ndarray) -> DensityResult:
    """Inverse Fourier integral f(x) = (1/pi) int_0^inf f_hat cos(xi x) d xi
    by trapezoidal quadrature on the sampled half-line grid.

    Requires the sampled transform to have decayed below 1e-10 near the end
    of the grid (last 5%), else InsufficientDecay.
    """
    xi = np.asarray(xi, dtype=float)
    fhat = np.asarray(fhat, dtype=float)
    x = np.asarray(x, dtype=float)
    if xi[0] != 0.0:
        raise ValueError("xi grid must start at 0")
    tail = fhat[xi >= xi[-1] * 0.95]
    if np.max(np.abs(tail)) > 1e-10:
        raise InsufficientDecay(
            f"|f_hat| = {np.max(np.abs(tail)):.3g} on the grid tail; extend the xi grid")
    f = np.trapezoid(fhat[None, :] * np.cos(np.outer(x, xi)), xi, axis=1) / math.pi
    mass = float(np.trapezoid(f, x))
    variance = float(np.trapezoid(x * x * f, x))
    return DensityResult(x=x, values=f, mass=mass, variance=variance,
                         min_value=float(f.min()))
