import json

import numpy as np
import pytest

from cirdeconv.model import (LOG_CHI2_MEAN, ModelConfig, NoiseSpec, ThetaCIR,
                             Trajectory, drift_diffusion, sample_noise,
                             simulate, stationary_params)
from cirdeconv.special import cf_log_chisq

THETA0 = ThetaCIR(4.0, 0.03, 0.4)


class TestStationaryParams:
    def test_reference_point(self):
        g = stationary_params(THETA0)
        assert g.a == pytest.approx(0.6)
        assert g.c == pytest.approx(20.0)
        assert not g.feller_ok

    def test_feller_holds(self):
        g = stationary_params(ThetaCIR(2.0, 1.0, 1.0))
        assert (g.a, g.c, g.feller_ok) == (4.0, 4.0, True)

    def test_feller_boundary(self):
        g = stationary_params(ThetaCIR(0.5, 1.0, 1.0))
        assert g.a == pytest.approx(1.0)
        assert g.feller_ok


class TestDriftDiffusion:
    def test_unit_delta_reference(self):
        b, s = drift_diffusion(THETA0, 1.0, 0.03)
        assert b == pytest.approx(0.03 * (-3) + 0.12)
        assert s == pytest.approx(np.sqrt(0.4 * 0.03))

    def test_mean_is_fixed_point(self):
        for delta in (1.0, 0.1, 1 / 252):
            b, _ = drift_diffusion(THETA0, delta, THETA0.mu)
            assert b == pytest.approx(THETA0.mu)

    def test_diffusion_vanishes_at_origin(self):
        _, s = drift_diffusion(THETA0, 0.25, 0.0)
        assert s == 0.0

    def test_negative_state_rejected(self):
        with pytest.raises(ValueError):
            drift_diffusion(THETA0, 1.0, -0.01)


class TestNoiseSpec:
    def test_beta_and_centering(self):
        noise = NoiseSpec(0.1)
        assert noise.beta == pytest.approx(np.sqrt(0.2) / np.pi, abs=1e-6)
        assert noise.beta == pytest.approx(0.142353, abs=1e-6)
        assert noise.c_tilde == pytest.approx(noise.beta * (-1.27), rel=1e-15)
        assert noise.c_tilde == pytest.approx(-0.180788, abs=1e-6)

    def test_unit_scale_noise(self):
        assert NoiseSpec(np.pi**2 / 2).beta == pytest.approx(1.0, rel=1e-15)

    def test_sampled_moments(self):
        noise = NoiseSpec(0.1)
        rng = np.random.default_rng(42)
        eps = sample_noise(noise, rng, size=10**6)
        assert abs(eps.mean()) < 3 * eps.std() / 1000
        assert eps.var() == pytest.approx(0.1, rel=0.02)

    def test_empirical_cf_matches_closed_form(self):
        noise = NoiseSpec(0.1)
        rng = np.random.default_rng(7)
        eps = sample_noise(noise, rng, size=10**6)
        for t in (0.5, 1.0, 2.0, 5.0):
            re, im = np.cos(t * eps), np.sin(t * eps)
            emp = re.mean() + 1j * im.mean()
            se = np.hypot(re.std(), im.std()) / np.sqrt(eps.size)
            assert abs(emp - cf_log_chisq(t, noise)) < 3 * se


class TestSimulate:
    def cfg(self, **kw):
        base = dict(theta=THETA0, delta=1 / 252, noise=NoiseSpec(0.1), n=1000)
        base.update(kw)
        return ModelConfig(**base)

    def test_reproducible(self):
        a = simulate(self.cfg(), seed=123)
        b = simulate(self.cfg(), seed=123)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
        c = simulate(self.cfg(), seed=124)
        assert not np.array_equal(a.x, c.x)

    def test_observation_structure(self):
        tr = simulate(self.cfg(), seed=5)
        assert len(tr.x) == 1001 and len(tr.y) == 1000
        assert (tr.x >= 0).all()

    def test_stationary_moments_feller_theta(self):
        theta = ThetaCIR(2.0, 1.0, 1.0)  # a=4: positivity comfortable
        cfg = self.cfg(theta=theta, n=10**5)
        tr = simulate(cfg, seed=11)
        g = stationary_params(theta)
        assert tr.x.mean() == pytest.approx(g.a / g.c, rel=0.05)
        assert tr.x.var() == pytest.approx(g.a / g.c**2, rel=0.05)

    def test_near_deterministic_limit(self):
        theta = ThetaCIR(4.0, 0.03, 1e-12)
        tr = simulate(self.cfg(theta=theta, n=5000), seed=3)
        assert abs(tr.x[-1] - theta.mu) < 1e-4
        assert tr.truncation_count == 0

    def test_mean_tracks_stationary_level(self):
        tr = simulate(self.cfg(n=10**5), seed=19)
        assert tr.x.mean() == pytest.approx(0.03, rel=0.10)

    def test_clamping_rate_at_reference(self):
        # the reference theta violates the positivity condition (a = 0.6 < 1),
        # so clamps are not rare: measured ~2.2% of steps at delta = 1/252
        tr = simulate(self.cfg(n=10**5), seed=23)
        rate = tr.truncation_count / 10**5
        assert 0.005 < rate < 0.05

    def test_clamping_rare_when_feller_holds(self):
        tr = simulate(self.cfg(theta=ThetaCIR(2.0, 1.0, 1.0), n=10**5), seed=29)
        assert tr.truncation_count / 10**5 < 0.01


class TestConfigSerialization:
    def test_json_round_trip(self):
        cfg = ModelConfig(theta=THETA0, delta=0.02, noise=NoiseSpec(0.1), n=500)
        doc = cfg.to_json()
        assert set(json.loads(doc)) == {"kappa", "mu", "sigma_sq", "delta",
                                        "s_eps_sq", "n"}
        assert ModelConfig.from_json(doc) == cfg

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelConfig(theta=THETA0, delta=0.0, noise=NoiseSpec(0.1), n=10)
        with pytest.raises(ValueError):
            ModelConfig(theta=THETA0, delta=0.1, noise=NoiseSpec(0.1), n=1)
        with pytest.raises(ValueError):
            ThetaCIR(-1.0, 0.03, 0.4)
        with pytest.raises(ValueError):
            NoiseSpec(0.0)

    def test_trajectory_csv(self, tmp_path):
        tr = simulate(ModelConfig(theta=THETA0, delta=0.02, noise=NoiseSpec(0.1),
                                  n=50), seed=1)
        path = tmp_path / "traj.csv"
        tr.to_csv(path)
        rows = np.loadtxt(path, delimiter=",", skiprows=1)
        assert rows.shape == (50, 2)
        np.testing.assert_allclose(rows[:, 0], tr.x[:50])
        np.testing.assert_allclose(rows[:, 1], tr.y)
