"""Comparison estimators: augmented-state EKF, APF/APFS, and Liu-West KSAPF.

All treat the static parameters as part of the state.  The EKF, APF and
KSAPF give them random-walk (or kernel-shrinkage) dynamics; the APFS draws
them once from the prior and afterwards only resamples.  Observation weights
use the exact scaled log-chi-squared density, not a Gaussian stand-in.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import LOG_CHI2_MEAN, X_FLOOR, NoiseSpec, ThetaCIR

PARAM_FLOOR = 1e-8

DEFAULT_PRIOR = ((3.0, 5.0), (0.02, 0.04), (0.3, 0.5))
DEFAULT_Q_DIAG = (1e-3, 1e-5, 1e-4)


@dataclass(frozen=True)
class FilterConfig:
    m_particles: int = 5000
    prior_boxes: tuple = DEFAULT_PRIOR
    q_diag: tuple = DEFAULT_Q_DIAG
    h_bandwidth: float = 0.1
    seed: int = 0
    s_eps_sq: float = 0.1
    delta: float = 1.0 / 252.0

    def __post_init__(self):
        if self.m_particles < 100:
            raise ValueError(f"m_particles must be >= 100, got {self.m_particles}")
        if any(q < 0 for q in self.q_diag):
            raise ValueError(f"q_diag entries must be >= 0, got {self.q_diag}")
        if not 0 < self.h_bandwidth < 1:
            raise ValueError(f"h_bandwidth must be in (0, 1), got {self.h_bandwidth}")

    @property
    def prior_array(self) -> np.ndarray:
        return np.asarray(self.prior_boxes, dtype=float)


@dataclass
class ParticleCloud:
    states: np.ndarray    # (M,)
    params: np.ndarray    # (M, 3)
    weights: np.ndarray   # (M,), normalized

    @property
    def ess(self) -> float:
        return 1.0 / float(np.sum(self.weights**2))


@dataclass(frozen=True)
class FilterResult:
    theta_hat: ThetaCIR
    path: np.ndarray      # (n, 3) parameter estimate per step
    ess: np.ndarray       # (n,)
    diverged: bool = False
    degenerate: bool = False


def log_obs_density(y, x, noise: NoiseSpec):
    """log f_eps(y - x) for eps = beta (log Z^2 - C): exact change of variables."""
    w = (np.asarray(y) - np.asarray(x)) / noise.beta + LOG_CHI2_MEAN
    with np.errstate(over="ignore"):
        return -0.5 * np.log(2 * np.pi) - np.log(noise.beta) + 0.5 * w - 0.5 * np.exp(w)


def systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    m = weights.shape[0]
    positions = (rng.random() + np.arange(m)) / m
    return np.searchsorted(np.cumsum(weights), positions)


def _drift(x, params, delta):
    k, mu = params[:, 0], params[:, 1]
    return (1.0 - k * delta) * x + k * mu * delta


def _propagate_states(x, params, delta, rng):
    b = _drift(x, params, delta)
    s = np.sqrt(params[:, 2] * delta * np.maximum(x, 0.0))
    return np.maximum(b + s * rng.standard_normal(x.shape[0]), X_FLOOR)


def _init_cloud(cfg: FilterConfig, rng: np.random.Generator) -> ParticleCloud:
    box = cfg.prior_array
    m = cfg.m_particles
    params = rng.uniform(box[:, 0], box[:, 1], size=(m, 3))
    a = 2.0 * params[:, 0] * params[:, 1] / params[:, 2]
    c = 2.0 * params[:, 0] / params[:, 2]
    states = rng.gamma(a, 1.0 / c)
    return ParticleCloud(states=states, params=params, weights=np.full(m, 1.0 / m))


def _weights_from_logs(logw):
    shifted = np.exp(logw - logw.max())
    return shifted / shifted.sum()


def apf(y, cfg: FilterConfig, time_varying: bool = True) -> FilterResult:
    """Auxiliary particle filter on the augmented state (X, theta).

    First-stage weights use the likelihood at the predictive state mean;
    resampling is systematic.  With ``time_varying`` the parameters take
    Gaussian random-walk steps of variance diag(q_diag); without (APFS) the
    prior draw is the only parameter randomness and resampling just
    reshuffles it.
    """
    y = np.asarray(y, dtype=float)
    noise = NoiseSpec(cfg.s_eps_sq)
    rng = np.random.default_rng(cfg.seed)
    cloud = _init_cloud(cfg, rng)
    q_sd = np.sqrt(np.asarray(cfg.q_diag))
    n = y.size
    path = np.empty((n, 3))
    ess = np.empty(n)
    degenerate = False
    for t in range(n):
        mu_pred = _drift(cloud.states, cloud.params, cfg.delta)
        log_first = np.log(cloud.weights) + log_obs_density(y[t], mu_pred, noise)
        if log_first.max() < np.log(1e-300):
            degenerate = True
            path[t:] = path[t - 1] if t else cloud.weights @ cloud.params
            ess[t:] = 0.0
            break
        idx = systematic_resample(_weights_from_logs(log_first), rng)
        parents_mu = mu_pred[idx]
        params = cloud.params[idx]
        if time_varying:
            params = params + q_sd * rng.standard_normal(params.shape)
            params = np.maximum(params, PARAM_FLOOR)
        states = _propagate_states(cloud.states[idx], params, cfg.delta, rng)
        logw = log_obs_density(y[t], states, noise) - log_obs_density(y[t], parents_mu, noise)
        cloud = ParticleCloud(states=states, params=params,
                              weights=_weights_from_logs(logw))
        path[t] = cloud.weights @ cloud.params
        ess[t] = cloud.ess
    return FilterResult(theta_hat=ThetaCIR.from_array(path[-1]), path=path,
                        ess=ess, degenerate=degenerate)


def ksapf(y, cfg: FilterConfig) -> FilterResult:
    """Liu-West kernel-smoothing APF: shrink parameters toward their weighted
    mean with a = sqrt(1 - h^2) and jitter by N(0, h^2 Var)."""
    y = np.asarray(y, dtype=float)
    noise = NoiseSpec(cfg.s_eps_sq)
    rng = np.random.default_rng(cfg.seed)
    cloud = _init_cloud(cfg, rng)
    h = cfg.h_bandwidth
    a = np.sqrt(1.0 - h**2)
    n = y.size
    path = np.empty((n, 3))
    ess = np.empty(n)
    degenerate = False
    for t in range(n):
        mean = cloud.weights @ cloud.params
        centered = cloud.params - mean
        cov = (cloud.weights[:, None] * centered).T @ centered
        shrunk = a * cloud.params + (1.0 - a) * mean
        mu_pred = _drift(cloud.states, shrunk, cfg.delta)
        log_first = np.log(cloud.weights) + log_obs_density(y[t], mu_pred, noise)
        if log_first.max() < np.log(1e-300):
            degenerate = True
            path[t:] = path[t - 1] if t else mean
            ess[t:] = 0.0
            break
        idx = systematic_resample(_weights_from_logs(log_first), rng)
        jitter = rng.multivariate_normal(np.zeros(3), h**2 * cov, size=cloud.params.shape[0],
                                         method="cholesky")
        params = np.maximum(shrunk[idx] + jitter, PARAM_FLOOR)
        states = _propagate_states(cloud.states[idx], params, cfg.delta, rng)
        logw = log_obs_density(y[t], states, noise) - log_obs_density(y[t], mu_pred[idx], noise)
        cloud = ParticleCloud(states=states, params=params,
                              weights=_weights_from_logs(logw))
        path[t] = cloud.weights @ cloud.params
        ess[t] = cloud.ess
    return FilterResult(theta_hat=ThetaCIR.from_array(path[-1]), path=path,
                        ess=ess, degenerate=degenerate)


def ekf_augmented(y, cfg: FilterConfig) -> FilterResult:
    """Extended Kalman filter on (X, kappa, mu, sigma_sq).

    Transition linearized at the current mean; the state-dependent diffusion
    enters the process noise as sigma_sq dt max(m_x, 0).  The log-chi-squared
    observation noise is treated as variance s_eps_sq.  Covariance blow-up or
    non-finite values set the divergence flag and freeze the estimate.
    """
    y = np.asarray(y, dtype=float)
    box = cfg.prior_array
    dt = cfg.delta
    m = np.empty(4)
    m[1:] = box.mean(axis=1)
    a0 = 2.0 * m[1] * m[2] / m[3]
    c0 = 2.0 * m[1] / m[3]
    m[0] = a0 / c0
    p = np.diag(np.concatenate([[a0 / c0**2], (box[:, 1] - box[:, 0]) ** 2 / 12.0]))
    q_extra = np.diag(np.concatenate([[0.0], cfg.q_diag]))
    r = cfg.s_eps_sq
    n = y.size
    path = np.empty((n, 3))
    diverged = False
    for t in range(n):
        k, mu, s2 = m[1], m[2], max(m[3], PARAM_FLOOR)
        f = np.eye(4)
        f[0, 0] = 1.0 - k * dt
        f[0, 1] = (mu - m[0]) * dt
        f[0, 2] = k * dt
        m_pred = m.copy()
        m_pred[0] = m[0] + k * (mu - m[0]) * dt
        p_pred = f @ p @ f.T + q_extra
        p_pred[0, 0] += s2 * dt * max(m[0], 0.0)
        s_innov = p_pred[0, 0] + r
        gain = p_pred[:, 0] / s_innov
        m = m_pred + gain * (y[t] - m_pred[0])
        p = p_pred - np.outer(gain, p_pred[0, :])
        if not np.all(np.isfinite(m)) or not np.all(np.isfinite(p)) or p[0, 0] > 1e12:
            diverged = True
            path[t:] = path[t - 1] if t else box.mean(axis=1)
            break
        path[t] = m[1:]
    theta = np.maximum(path[-1], PARAM_FLOOR)
    return FilterResult(theta_hat=ThetaCIR.from_array(theta), path=path,
                        ess=np.full(n, np.nan), diverged=diverged)
