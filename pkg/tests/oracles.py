"""Independent brute-force oracles used by the test suite.

These deliberately avoid the package's coupling-table machinery: the mode
derivative is computed by direct double quadrature of the weak form of the
collision equation, with the noise integral folded in analytically through
gamma_k (g is even, so integrating g(z) cos(k(w+z)) dz/2pi gives
gamma_k cos(k w)).
"""

import numpy as np


def density_on_grid(coeffs, x):
    ks = np.arange(1, len(coeffs))
    return 1.0 + 2.0 * np.cos(np.multiply.outer(x, ks)) @ coeffs[1:]


def weakform_rhs(coeffs, gamma_of_k, rate, k, n_grid=512):
    """da_k/dt by trapezoidal quadrature of the weak form on an n x n grid.

    coeffs: a_0..a_K; gamma_of_k: callable k -> gamma_k; rate: callable y ->
    collision rate; k: observed mode.
    """
    x = -np.pi + 2.0 * np.pi * (np.arange(n_grid) + 1.0) / n_grid  # periodic, weight h
    y = np.linspace(-np.pi, np.pi, n_grid + 1)                     # interval, trapezoid
    fx = density_on_grid(coeffs, x)
    X = x[:, None]
    Y = y[None, :]
    fxy = density_on_grid(coeffs, (X + Y).ravel()).reshape(X.shape[0], Y.shape[1])
    gk = gamma_of_k(k)
    test_gain = gk * np.cos(k * (X + Y / 2.0))
    test_loss = np.cos(k * X)
    integrand = fx[:, None] * fxy * rate(Y) * (test_gain - test_loss)
    inner = np.trapezoid(integrand, y, axis=1) / (2.0 * np.pi)
    return float(np.mean(inner))  # periodic x: equal weights h / (2 pi) = 1/n
