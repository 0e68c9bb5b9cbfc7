"""Closed-form frequency-domain objects of the model.

Everything here is pure arithmetic on the model parameters:

* ``cf_gamma``      characteristic function of the stationary Gamma law,
  (1 - it/c)^(-a) on the principal branch (Re(1 - it/c) = 1 > 0, so the
  branch cut is never approached).
* ``cf_log_chisq``  characteristic function of the scaled log-chi-squared
  observation noise, (1/sqrt(pi)) 2^(i beta t) Gamma(1/2 + i beta t)
  exp(-i c_tilde t); nonzero for every real t.
* ``l_of_x``        l(x) = (b^2 + s^2)(x) g(x; a, c), the quadratic-weighted
  stationary density the contrast estimates.
* ``cf_l``          its Fourier transform, a three-term closed form obtained
  by differentiating cf_gamma:
      l*(t) = a1 a(a+1)/c^2 (1-it/c)^(-a-2)
            + a2 a/c        (1-it/c)^(-a-1)
            + a3            (1-it/c)^(-a).
* ``l2_norm_sq``    int l(x)^2 dx via the Gamma-moment identity; requires
  a > 1/2 (the integral diverges otherwise).
"""

import math
from dataclasses import dataclass

import numpy as np

from .kernels import gamma_array, gamma_scalar
from .model import GammaStationary, NoiseSpec, ThetaCIR, stationary_params

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class AlphaCoeffs:
    """Coefficients of b^2 + s^2 = a1 x^2 + a2 x + a3."""

    alpha1: float
    alpha2: float
    alpha3: float

    @classmethod
    def from_theta(cls, theta: ThetaCIR, delta: float) -> "AlphaCoeffs":
        k, m, s2 = theta.kappa, theta.mu, theta.sigma_sq
        return cls(alpha1=(1.0 - k * delta) ** 2,
                   alpha2=2.0 * (1.0 - k * delta) * k * m * delta + s2 * delta,
                   alpha3=(k * m * delta) ** 2)


@dataclass(frozen=True)
class BetaCoeffs:
    """Coefficients of the quartic (b^2 + s^2)^2."""

    beta1: float
    beta2: float
    beta3: float
    beta4: float
    beta5: float

    @classmethod
    def from_alphas(cls, al: AlphaCoeffs) -> "BetaCoeffs":
        a1, a2, a3 = al.alpha1, al.alpha2, al.alpha3
        return cls(beta1=a1**2, beta2=2*a1*a2, beta3=2*a1*a3 + a2**2,
                   beta4=2*a2*a3, beta5=a3**2)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) for complex z, Lanczos approximation.

    Raises at the poles (non-positive integers).
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise ValueError(f"Gamma pole at z={z}")
    return gamma_scalar(z)


def cf_gamma(t, g: GammaStationary):
    """Characteristic function of Gamma(a, c) at frequency t."""
    w = 1.0 - 1j * np.asarray(t, dtype=float) / g.c
    return w ** (-g.a)


def cf_log_chisq(t, noise: NoiseSpec):
    """Characteristic function of the centered scaled log-chi-squared noise."""
    t = np.asarray(t, dtype=float)
    bt = noise.beta * t
    gam = gamma_array(np.ravel(0.5 + 1j * bt)).reshape(bt.shape)
    out = (1.0 / math.sqrt(math.pi)) * np.exp(1j * bt * _LOG2) * gam \
        * np.exp(-1j * noise.c_tilde * t)
    return out if out.shape else complex(out)


def l_of_x(x, theta: ThetaCIR, delta: float):
    """(a1 x^2 + a2 x + a3) g(x; a, c); zero off the support x < 0."""
    al = AlphaCoeffs.from_theta(theta, delta)
    g = stationary_params(theta)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    dens = np.exp(g.a * math.log(g.c) + (g.a - 1.0) * np.log(xp) - g.c * xp
                  - math.lgamma(g.a))
    out[pos] = (al.alpha1 * xp**2 + al.alpha2 * xp + al.alpha3) * dens
    if x.shape == ():
        return float(out)
    return out


def cf_l(t, theta: ThetaCIR, delta: float):
    """Fourier transform of l at frequency t (principal-branch powers)."""
    al = AlphaCoeffs.from_theta(theta, delta)
    g = stationary_params(theta)
    a, c = g.a, g.c
    w = 1.0 - 1j * np.asarray(t, dtype=float) / c
    return (al.alpha1 * (a * (a + 1.0) / c**2) * w ** (-a - 2.0)
            + al.alpha2 * (a / c) * w ** (-a - 1.0)
            + al.alpha3 * w ** (-a))


def l2_norm_from_coeffs(be: BetaCoeffs, g: GammaStationary) -> float:
    """int l^2 for given quartic coefficients over the squared Gamma(a, c) density.

    Folding g^2 into a Gamma(2a+k, 2c) density gives one Gamma-ratio term per
    coefficient; the ratios run through lgamma so large shapes do not
    overflow.  The weakest term carries Gamma(2a-1): the integral only exists
    for a > 1/2.
    """
    a, c = g.a, g.c
    if a <= 0.5:
        raise ValueError(f"||l||^2 diverges for a = 2 kappa mu / sigma_sq <= 1/2 (a={a:.4g})")
    lg_a2 = 2.0 * math.lgamma(a)
    total = 0.0
    for k, coef in enumerate((be.beta1, be.beta2, be.beta3, be.beta4, be.beta5)):
        power = 2*a + 3 - k          # Gamma(2a+3-k) term, c-power 3-k
        if coef == 0.0:
            continue
        mag = math.exp(math.lgamma(power) - lg_a2 - power * _LOG2
                       - (3 - k) * math.log(c))
        total += coef * mag
    return total


def l2_norm_sq(theta: ThetaCIR, delta: float) -> float:
    """int_0^inf l(x)^2 dx in closed form; requires a > 1/2."""
    g = stationary_params(theta)
    be = BetaCoeffs.from_alphas(AlphaCoeffs.from_theta(theta, delta))
    return l2_norm_from_coeffs(be, g)
