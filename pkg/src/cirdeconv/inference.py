"""Plug-in sandwich covariance and asymptotic confidence intervals.

The asymptotic variance of the estimator is V^-1 Omega V^-1 where V is the
Hessian of the population objective, V_jk = 2 <d_j l, d_k l>, and Omega the
long-run variance of the per-pair score.  V comes from quadrature over the
state space; Omega from a Bartlett (Newey-West) plug-in on the observed score
series, lag L = floor(1.2 n^(1/3)).  Gradients in theta are central finite
differences (the Gamma parameters (a, c) depend on theta nonlinearly, so
closed-form derivatives buy little and hide more).
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import stats

from .contrast import ContrastConfig, u_star
from .model import DEFAULT_DELTA, ThetaCIR, stationary_params
from .special import l2_norm_sq, l_of_x

GRAD_H_SCALE = 1e-5
COND_LIMIT = 1e12


@dataclass(frozen=True)
class CovarianceResult:
    v_hat: np.ndarray
    omega_hat: np.ndarray
    sigma_hat: np.ndarray
    hac_lag: int


@dataclass(frozen=True)
class ConfidenceIntervals:
    level: float
    lower: np.ndarray
    upper: np.ndarray

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, theta: ThetaCIR) -> np.ndarray:
        t = theta.as_array()
        return (self.lower < t) & (t < self.upper)


def _fd_steps(theta: ThetaCIR, h_scale: float):
    t = theta.as_array()
    h = h_scale * np.maximum(1.0, np.abs(t))
    if (t - h <= 0).any():
        raise ValueError(f"finite-difference stencil leaves the positive region at {theta}")
    return t, h


def grad_l(theta: ThetaCIR, x, delta: float = DEFAULT_DELTA,
           h_scale: float = GRAD_H_SCALE):
    """Central-difference gradient of l(x) in theta; zero off the support."""
    t, h = _fd_steps(theta, h_scale)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape + (3,))
    for k in range(3):
        tp, tm = t.copy(), t.copy()
        tp[k] += h[k]
        tm[k] -= h[k]
        diff = (l_of_x(x, ThetaCIR.from_array(tp), delta)
                - l_of_x(x, ThetaCIR.from_array(tm), delta)) / (2 * h[k])
        out[..., k] = diff
    return out


def _state_nodes(theta: ThetaCIR, n_nodes: int):
    """Gauss-Legendre nodes on [0, x_max] under a power map.

    x_max carries all but 1e-12 of the Gamma mass.  The integrands behave
    like x^(2a-2) (log x)^2 near zero, so plain nodes converge hopelessly for
    a < 1; mapping x = x_max u^q with (2a-1) q ~ 4 restores smoothness.
    """
    g = stationary_params(theta)
    x_max = stats.gamma.ppf(1.0 - 1e-12, g.a, scale=1.0 / g.c)
    q = float(np.clip(4.0 / (2.0 * g.a - 1.0), 3.0, 40.0))
    u, wu = leggauss(n_nodes)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    x = x_max * u**q
    w = wu * x_max * q * u ** (q - 1.0)
    return x, w


def hessian_V(theta_hat: ThetaCIR, delta: float = DEFAULT_DELTA,
              n_nodes: int = 1500) -> np.ndarray:
    """V_jk = 2 int d_j l(x) d_k l(x) dx, symmetrized.

    Raises when the Gram matrix is numerically singular (condition number
    above COND_LIMIT): the objective carries no curvature in some direction.
    """
    if stationary_params(theta_hat).a <= 0.5:
        raise ValueError("Hessian integral diverges for a <= 1/2")
    x, w = _state_nodes(theta_hat, n_nodes)
    grads = grad_l(theta_hat, x, delta)          # (n_nodes, 3)
    v = 2.0 * np.einsum("i,ij,ik->jk", w, grads, grads)
    v = 0.5 * (v + v.T)
    if np.linalg.cond(v) > COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"Hessian numerically singular (cond={np.linalg.cond(v):.2e})")
    return v


def score_series(theta_hat: ThetaCIR, y, cfg: ContrastConfig,
                 delta: float = DEFAULT_DELTA,
                 h_scale: float = GRAD_H_SCALE) -> np.ndarray:
    """Per-pair score s_i = grad ||l||^2 - 2 phi(y_{i+1}) u*_{grad l}(y_i).

    The noise cf does not depend on theta, so the inversion of the gradient
    equals the gradient of the inversion; both use the same central steps.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least 2 observations")
    t, h = _fd_steps(theta_hat, h_scale)
    y_head = y[:-1]
    grad_norm = np.empty(3)
    grad_u = np.empty((y_head.size, 3))
    for k in range(3):
        tp, tm = t.copy(), t.copy()
        tp[k] += h[k]
        tm[k] -= h[k]
        thp, thm = ThetaCIR.from_array(tp), ThetaCIR.from_array(tm)
        grad_norm[k] = (l2_norm_sq(thp, delta) - l2_norm_sq(thm, delta)) / (2 * h[k])
        grad_u[:, k] = (u_star(y_head, thp, cfg, delta)
                        - u_star(y_head, thm, cfg, delta)) / (2 * h[k])
    phi = cfg.phi(y[1:])
    return grad_norm[None, :] - 2.0 * phi[:, None] * grad_u


def long_run_omega(scores: np.ndarray, lag: int = None) -> np.ndarray:
    """Bartlett-weighted long-run variance of the (demeaned) score series."""
    scores = np.asarray(scores, dtype=float)
    n = scores.shape[0]
    if lag is None:
        lag = int(np.floor(1.2 * n ** (1.0 / 3.0)))
    if lag >= n:
        raise ValueError(f"lag {lag} must be < series length {n}")
    s = scores - scores.mean(axis=0)
    omega = s.T @ s / n
    for j in range(1, lag + 1):
        cj = s[j:].T @ s[:-j] / n
        omega += (1.0 - j / (lag + 1.0)) * (cj + cj.T)
    return omega


def confidence_intervals(theta_hat: ThetaCIR, v_hat: np.ndarray,
                         omega_hat: np.ndarray, n: int,
                         level: float = 0.95) -> ConfidenceIntervals:
    """theta_hat_k +- z sqrt(Sigma_kk / n) with Sigma = V^-1 Omega V^-T."""
    if np.linalg.cond(v_hat) > COND_LIMIT:
        raise np.linalg.LinAlgError("V is numerically singular")
    vinv_omega = np.linalg.solve(v_hat, omega_hat)
    sigma = np.linalg.solve(v_hat, vinv_omega.T).T
    diag = np.diag(sigma)
    if (diag < 0).any():
        raise ValueError(f"sandwich produced negative variances: {diag}")
    z = stats.norm.ppf(0.5 + level / 2.0)
    half = z * np.sqrt(diag / n)
    t = theta_hat.as_array()
    return ConfidenceIntervals(level=level, lower=t - half, upper=t + half)


def sandwich(theta_hat: ThetaCIR, y, cfg: ContrastConfig,
             delta: float = DEFAULT_DELTA, level: float = 0.95):
    """Full plug-in pipeline: V, HAC Omega, Sigma, and the intervals."""
    y = np.asarray(y, dtype=float)
    v = hessian_V(theta_hat, delta)
    scores = score_series(theta_hat, y, cfg, delta)
    lag = int(np.floor(1.2 * scores.shape[0] ** (1.0 / 3.0)))
    omega = long_run_omega(scores, lag)
    ci = confidence_intervals(theta_hat, v, omega, y.size, level)
    vinv_omega = np.linalg.solve(v, omega)
    sigma = np.linalg.solve(v, vinv_omega.T).T
    return CovarianceResult(v_hat=v, omega_hat=omega, sigma_hat=sigma,
                            hac_lag=lag), ci
