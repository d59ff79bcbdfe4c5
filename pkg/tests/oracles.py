"""Independent reference computations used by the tests.

None of these touch the library's displacement kernel: they use the matrix
exponential, closed-form Laguerre polynomials from scipy, adaptive 2-D
quadrature, or the position-space (Hermite function) realisation.
"""

import numpy as np
from scipy import integrate, linalg, special


def expm_displacement(beta, dim, pad=60):
    """exp(beta a* - conj(beta) a) computed on a larger space and cropped to ``dim``."""
    n = dim + pad
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    gen = beta * a.conj().T - np.conj(beta) * a
    return linalg.expm(gen)[:dim, :dim]


def expm_quadrature_exp(q, p, dim, pad=60):
    """exp(i(qQ + pP)) via the matrix exponential, cropped to ``dim``."""
    n = dim + pad
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    ad = a.conj().T
    Q = (a + ad) / np.sqrt(2)
    P = 1j * (ad - a) / np.sqrt(2)
    return linalg.expm(1j * (q * Q + p * P))[:dim, :dim]


def laguerre_element(beta, m, n):
    """<e_m|D(beta)|e_n> from the associated Laguerre closed form."""
    x = abs(beta) ** 2
    if m >= n:
        k = m - n
        log_ratio = 0.5 * (special.gammaln(n + 1) - special.gammaln(m + 1))
        return np.exp(log_ratio - x / 2) * beta**k * special.eval_genlaguerre(n, k, x)
    k = n - m
    log_ratio = 0.5 * (special.gammaln(m + 1) - special.gammaln(n + 1))
    return np.exp(log_ratio - x / 2) * (-np.conj(beta)) ** k * special.eval_genlaguerre(m, k, x)


def windowed_norm_sq(m, n, L):
    """int over [-L, L]^2 of |<e_m|D(z)|e_n>|^2 dq dp / (2 pi), |z|^2 = (q^2 + p^2)/2."""
    lo, k = min(m, n), abs(m - n)
    log_ratio = special.gammaln(lo + 1) - special.gammaln(lo + k + 1)

    def f(p, q):
        x = 0.5 * (q * q + p * p)
        lag = special.eval_genlaguerre(lo, k, x)
        return np.exp(log_ratio - x) * x**k * lag**2 / (2 * np.pi)

    val, _ = integrate.dblquad(f, -L, L, -L, L, epsabs=1e-14, epsrel=1e-13)
    return val


def hermite_function(n, x):
    """Normalised Hermite function psi_n(x) (position-space number state)."""
    norm = np.exp(-0.5 * (n * np.log(2) + special.gammaln(n + 1)) - 0.25 * np.log(np.pi))
    return norm * special.eval_hermite(n, x) * np.exp(-0.5 * x * x)


def position_coefficient(m, n, q, p, half_width=14.0, nodes=4001):
    """<exp(i(qQ + pP)) psi_m, psi_n> in L^2(R) with Q = x, P = -i d/dx.

    exp(i(qQ + pP)) psi(x) = exp(i q p / 2) exp(i q x) psi(x + p).
    """
    x = np.linspace(-half_width, half_width, nodes)
    moved = np.exp(0.5j * q * p + 1j * q * x) * hermite_function(m, x + p)
    return integrate.simpson(moved.conj() * hermite_function(n, x), x=x)


def vacuum_coefficient(q, p):
    """c_{e0,e0}(q, p) = exp(-(q^2 + p^2) / 4)."""
    return np.exp(-0.25 * (np.asarray(q) ** 2 + np.asarray(p) ** 2))


def vacuum_husimi(q, p):
    """Density of Q_vacuum for the vacuum: exp(-(q^2 + p^2) / 2) under dq dp / (2 pi)."""
    return np.exp(-0.5 * (np.asarray(q) ** 2 + np.asarray(p) ** 2))


def first_excited_husimi(q, p):
    """Density of Q_vacuum for e_1: |z|^2 exp(-|z|^2) with |z|^2 = (q^2 + p^2) / 2."""
    r2 = 0.5 * (np.asarray(q) ** 2 + np.asarray(p) ** 2)
    return r2 * np.exp(-r2)
