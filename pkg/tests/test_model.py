import numpy as np
import pytest

from leakystage import (
    DerivedConstants,
    DimensionlessPoint,
    ModelParams,
    ParameterError,
    derive,
    growth_pressure,
    normalized_factor,
)
from util import random_params


class TestDerive:
    def test_figure_parameters(self, figure_params):
        d = derive(figure_params)
        assert d.alpha == pytest.approx(1.2, abs=1e-15)
        assert d.gamma == pytest.approx(0.4, abs=1e-15)
        assert d.delta_c == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_small_beta_limit(self):
        # beta -> 0 with mu=1, delta=2 drives delta_c to 1/2
        d = derive(ModelParams(beta=1e-9, mu=1.0, delta=2.0, rho=1.0))
        assert d.delta_c == pytest.approx(0.5, abs=1e-8)

    def test_hand_ratio(self):
        # 0.4 / 0.8
        d = derive(ModelParams(beta=0.5, mu=0.9, delta=1.3, rho=1.0))
        assert d.delta_c == pytest.approx(0.5, abs=1e-15)

    def test_repeated_calls_bit_identical(self):
        p = ModelParams(beta=0.37, mu=0.91, delta=1.55, rho=0.77)
        first, second = derive(p), derive(p)
        assert (first.alpha, first.gamma, first.delta_c) == (
            second.alpha,
            second.gamma,
            second.delta_c,
        )

    def test_product_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            d = derive(random_params(rng))
            assert abs(d.delta_c * d.alpha - d.gamma) <= 1e-14 * max(1.0, d.gamma)
            assert 0.0 < d.delta_c < 1.0


class TestGrowthPressure:
    def test_zero_at_threshold(self, figure_params):
        d = derive(figure_params)
        assert growth_pressure(d.delta_c, figure_params) == pytest.approx(0.0, abs=1e-15)

    def test_figure_value_at_one(self, figure_params):
        # -0.4 + 1.2 * 1
        assert growth_pressure(1.0, figure_params) == pytest.approx(0.8, abs=1e-12)

    def test_negative_at_empty_reservoir(self, figure_params):
        assert growth_pressure(0.0, figure_params) == figure_params.beta - figure_params.mu
        assert growth_pressure(0.0, figure_params) < 0.0

    def test_sign_matches_threshold_side(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            p = random_params(rng)
            d = derive(p)
            a = rng.uniform(-1.0, 3.0)
            if abs(a - d.delta_c) < 1e-9:
                continue
            assert np.sign(growth_pressure(a, p)) == np.sign(a - d.delta_c)

    def test_vectorized(self, figure_params):
        a = np.array([0.0, 1.0 / 3.0, 1.0])
        g = growth_pressure(a, figure_params)
        assert g.shape == (3,)
        assert g[0] < 0.0 < g[2]


class TestNormalizedFactor:
    def test_unit_at_threshold(self, figure_params):
        d = derive(figure_params)
        assert normalized_factor(d.delta_c, figure_params) == pytest.approx(1.0, abs=1e-15)

    def test_empty_reservoir(self, figure_params):
        assert normalized_factor(0.0, figure_params) == pytest.approx(
            figure_params.beta / figure_params.mu, abs=1e-15
        )

    def test_figure_value(self, figure_params):
        # (1/3) * 0.6 + (2/3) * 1.8
        assert normalized_factor(2.0 / 3.0, figure_params) == pytest.approx(1.4, abs=1e-12)

    def test_growth_identity_sweep(self):
        # g(A) = mu * (R(A) - 1) over random parameters and levels in [-1, 3]
        rng = np.random.default_rng(19)
        for _ in range(10_000):
            p = random_params(rng)
            a = rng.uniform(-1.0, 3.0)
            g = growth_pressure(a, p)
            identity = p.mu * (normalized_factor(a, p) - 1.0)
            assert abs(g - identity) <= 1e-12 * max(1.0, abs(g))


class TestValidation:
    @pytest.mark.parametrize("field", ["beta", "mu", "delta", "rho"])
    def test_nonpositive_rate_rejected(self, field):
        values = {"beta": 0.6, "mu": 1.0, "delta": 1.8, "rho": 0.5}
        values[field] = 0.0
        with pytest.raises(ParameterError, match=field):
            ModelParams(**values)

    def test_beta_above_mu_rejected(self):
        with pytest.raises(ParameterError, match="beta < mu"):
            ModelParams(beta=1.2, mu=1.0, delta=1.8, rho=0.5)

    def test_mu_above_delta_rejected(self):
        with pytest.raises(ParameterError, match="mu < delta"):
            ModelParams(beta=0.6, mu=1.9, delta=1.8, rho=0.5)

    def test_nan_rejected(self):
        with pytest.raises(ParameterError, match="rho"):
            ModelParams(beta=0.6, mu=1.0, delta=1.8, rho=float("nan"))

    def test_derived_constants_guarded(self):
        with pytest.raises(ParameterError):
            DerivedConstants(alpha=1.0, gamma=0.5, delta_c=1.5)


class TestDimensionlessPoint:
    def test_from_dimensional(self, figure_params):
        point = DimensionlessPoint.from_dimensional(figure_params, Q=0.7, T=4.0, K=0.8)
        assert point.r == pytest.approx(2.1, abs=1e-12)
        assert point.h == pytest.approx(2.0, abs=1e-15)
        assert point.k == pytest.approx(0.8 * 0.5 / 0.4, abs=1e-12)

    def test_negative_rejected(self):
        with pytest.raises(ParameterError, match="r"):
            DimensionlessPoint(r=-0.1, h=0.0, k=0.0)
