"""Independent oracle routes used by the tests.

Everything here recomputes model quantities from their integral definitions
with scipy adaptive quadrature (weighted rules absorb the x^(a-1) endpoint
singularities), or samples the model law directly.  None of it shares code
with the closed forms under test.
"""

import math

import numpy as np
from scipy import integrate
from scipy.special import gamma as scipy_gamma

from cirdeconv.model import LOG_CHI2_MEAN, stationary_params
from cirdeconv.special import AlphaCoeffs


def _poly_parts(theta, delta):
    al = AlphaCoeffs.from_theta(theta, delta)
    g = stationary_params(theta)
    norm = g.c**g.a / scipy_gamma(g.a)

    def smooth(x):
        return (al.alpha1 * x**2 + al.alpha2 * x + al.alpha3) * norm * np.exp(-g.c * x)

    return g, smooth


def quad_l2_norm(theta, delta):
    """int l^2 dx with the x^(2a-2) singularity handled by an 'alg' weight."""
    g, smooth = _poly_parts(theta, delta)
    b = 1.0 / g.c
    i1 = integrate.quad(lambda x: smooth(x) ** 2, 0, b, weight="alg",
                        wvar=(2 * g.a - 2, 0), limit=200)[0]
    i2 = integrate.quad(lambda x: smooth(x) ** 2 * x ** (2 * g.a - 2), b, np.inf,
                        limit=400)[0]
    return i1 + i2


def quad_cf_l(t, theta, delta):
    """int e^{itx} l(x) dx via weighted quadrature, real and imaginary parts."""
    g, smooth = _poly_parts(theta, delta)
    b = 1.0 / g.c
    parts = []
    for trig in (np.cos, np.sin):
        p1 = integrate.quad(lambda x: trig(t * x) * smooth(x), 0, b, weight="alg",
                            wvar=(g.a - 1, 0), limit=200)[0]
        p2 = integrate.quad(lambda x: trig(t * x) * smooth(x) * x ** (g.a - 1), b,
                            np.inf, limit=400)[0]
        parts.append(p1 + p2)
    return parts[0] + 1j * parts[1]


def quad_cf_gamma(t, a, c):
    """int e^{itx} Gamma(a, c)-density dx."""
    norm = c**a / scipy_gamma(a)
    b = 1.0 / c
    parts = []
    for trig in (np.cos, np.sin):
        p1 = integrate.quad(lambda x: trig(t * x) * norm * np.exp(-c * x), 0, b,
                            weight="alg", wvar=(a - 1, 0), limit=200)[0]
        p2 = integrate.quad(lambda x: trig(t * x) * norm * np.exp(-c * x) * x ** (a - 1),
                            b, np.inf, limit=400)[0]
        parts.append(p1 + p2)
    return parts[0] + 1j * parts[1]


def quad_cross_l2(theta_a, theta_b, delta):
    """<l_a, l_b> in x-space."""
    ga, smooth_a = _poly_parts(theta_a, delta)
    gb, smooth_b = _poly_parts(theta_b, delta)
    p = ga.a + gb.a - 2.0
    b = 1.0 / max(ga.c, gb.c)
    f = lambda x: smooth_a(x) * smooth_b(x)
    i1 = integrate.quad(f, 0, b, weight="alg", wvar=(p, 0), limit=200)[0]
    i2 = integrate.quad(lambda x: f(x) * x**p, b, np.inf, limit=400)[0]
    return i1 + i2


def iid_model_pairs(theta, delta, noise, n, rng):
    """Exact-law observation pairs: X1 ~ Gamma(a, c), X2 one unclamped step.

    Unlike the path simulator there is no positivity clamp, so the one-step
    conditional moment identities hold exactly.
    """
    g = stationary_params(theta)
    x1 = rng.gamma(g.a, 1.0 / g.c, size=n)
    x2 = (x1 + theta.kappa * (theta.mu - x1) * delta
          + np.sqrt(theta.sigma_sq * delta * x1) * rng.standard_normal(n))
    e1 = noise.beta * (np.log(rng.standard_normal(n) ** 2) - LOG_CHI2_MEAN)
    e2 = noise.beta * (np.log(rng.standard_normal(n) ** 2) - LOG_CHI2_MEAN)
    return x1 + e1, x2 + e2


def gl_nodes_mapped(theta, n_nodes=2000, tail=1e-13):
    """Gauss-Legendre nodes on [0, x_max] under a singularity-absorbing map."""
    from numpy.polynomial.legendre import leggauss
    from scipy import stats

    g = stationary_params(theta)
    x_max = stats.gamma.ppf(1 - tail, g.a, scale=1.0 / g.c)
    q = float(np.clip(4.0 / (2 * g.a - 1), 3.0, 40.0))
    u, wu = leggauss(n_nodes)
    u = 0.5 * (u + 1)
    wu = 0.5 * wu
    return x_max * u**q, wu * x_max * q * u ** (q - 1)
