import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gstop import (LatticeModel, ValidationError, VolatilityBand, g_function,
                   maximal_expectation, step_inf, step_sup)
from gstop import oracle
from conftest import random_model


def make_model(lo=1.0, hi=2.0, dx=np.sqrt(2.0), dt=1.0, half_width=3, x0=0.0):
    return LatticeModel(x0=x0, dx=dx, dt=dt, n_steps=1, half_width=half_width,
                        band=VolatilityBand(lo, hi))


class TestGFunction:
    def test_positive_argument_uses_upper_rate(self):
        assert g_function(2.0, VolatilityBand(1.0, 2.0)) == 2.0

    def test_negative_argument_uses_lower_rate(self):
        assert g_function(-2.0, VolatilityBand(1.0, 2.0)) == -1.0

    def test_zero(self):
        assert g_function(0.0, VolatilityBand(0.3, 1.7)) == 0.0

    @given(a=st.floats(-50, 50), lam=st.floats(0, 20))
    def test_positive_homogeneity(self, a, lam):
        band = VolatilityBand(0.5, 2.5)
        assert g_function(lam * a, band) == pytest.approx(
            lam * g_function(a, band), abs=1e-12)

    @given(a=st.floats(-50, 50), b=st.floats(-50, 50))
    def test_monotone(self, a, b):
        band = VolatilityBand(0.5, 2.5)
        if a <= b:
            assert g_function(a, band) <= g_function(b, band) + 1e-12


class TestValidation:
    def test_band_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            VolatilityBand(0.0, 1.0)

    def test_band_rejects_inverted(self):
        with pytest.raises(ValidationError):
            VolatilityBand(2.0, 1.0)

    def test_lattice_rejects_unstable_dt(self):
        with pytest.raises(ValidationError):
            make_model(dx=1.0, dt=1.0, hi=2.0)

    def test_lattice_rejects_tiny_half_width(self):
        with pytest.raises(ValidationError):
            make_model(half_width=0)

    def test_step_rejects_nan(self):
        m = make_model()
        f = np.zeros(m.n_nodes)
        f[0] = np.nan
        with pytest.raises(ValidationError):
            step_sup(f, m)


class TestStepExamples:
    def test_linear_payoff_centers_at_zero(self):
        m = make_model()
        v, _ = step_sup(m.nodes(), m)
        assert v[m.center_index] == 0.0

    def test_convex_payoff_picks_upper_rate(self):
        m = make_model()
        v, ch = step_sup(m.nodes() ** 2, m)
        assert v[m.center_index] == pytest.approx(2.0, abs=1e-14)
        assert ch.v[m.center_index] == 2.0

    def test_concave_payoff_picks_lower_rate(self):
        m = make_model()
        v, ch = step_sup(-m.nodes() ** 2, m)
        assert v[m.center_index] == pytest.approx(-1.0, abs=1e-14)
        assert ch.v[m.center_index] == 1.0

    def test_inf_convex_payoff(self):
        m = make_model()
        v, ch = step_inf(m.nodes() ** 2, m)
        assert v[m.center_index] == pytest.approx(1.0, abs=1e-14)
        assert ch.v[m.center_index] == 1.0

    def test_inf_constant_and_linear(self):
        m = make_model()
        v, _ = step_inf(np.full(m.n_nodes, 5.5), m)
        assert np.all(v == 5.5)
        v, _ = step_inf(m.nodes(), m)
        assert v[m.center_index] == 0.0

    def test_choice_weights_are_probabilities_with_exact_moments(self):
        m = make_model(dx=2.0, dt=1.0)
        _, ch = step_sup(np.sin(m.nodes()), m)
        for p in (ch.p_up, ch.p_mid, ch.p_down):
            assert np.all(p >= 0.0) and np.all(p <= 1.0)
        np.testing.assert_allclose(ch.p_up + ch.p_mid + ch.p_down, 1.0,
                                   rtol=0, atol=1e-15)
        np.testing.assert_array_equal(ch.p_up, ch.p_down)
        # interior first moment 0, second moment exactly v*dt
        second = ch.p_up * m.dx ** 2 + ch.p_down * m.dx ** 2
        np.testing.assert_allclose(second, ch.v * m.dt, rtol=1e-15)


class TestKernelProperties:
    def test_constant_preservation_exact(self, rng):
        for _ in range(20):
            m = random_model(rng)
            c = float(rng.uniform(-5, 5))
            v, _ = step_sup(np.full(m.n_nodes, c), m)
            assert np.all(v == c)

    def test_monotone_sublinear_homogeneous(self, rng):
        for _ in range(40):
            m = random_model(rng)
            f = rng.normal(size=m.n_nodes)
            g = f + rng.uniform(0, 1, size=m.n_nodes)
            lam = float(rng.uniform(0, 3))
            sf, _ = step_sup(f, m)
            sg, _ = step_sup(g, m)
            assert np.all(sf <= sg + 1e-12)
            s_sum, _ = step_sup(f + g, m)
            assert np.all(s_sum <= sf + sg + 1e-12)
            s_lam, _ = step_sup(lam * f, m)
            np.testing.assert_allclose(s_lam, lam * sf, rtol=0, atol=1e-12)

    def test_duality(self, rng):
        for _ in range(40):
            m = random_model(rng)
            f = rng.normal(size=m.n_nodes)
            lhs, _ = step_inf(f, m)
            rhs, _ = step_sup(-f, m)
            np.testing.assert_allclose(lhs, -rhs, rtol=0, atol=1e-14)

    def test_band_monotonicity(self, rng):
        for _ in range(20):
            m = random_model(rng)
            lo, hi = m.band.sigma2_min, m.band.sigma2_max
            wide = VolatilityBand(lo * 0.5, hi)
            m_wide = LatticeModel(x0=m.x0, dx=m.dx, dt=m.dt, n_steps=m.n_steps,
                                  half_width=m.half_width, band=wide)
            f = rng.normal(size=m.n_nodes)
            narrow_vals, _ = step_sup(f, m)
            wide_vals, _ = step_sup(f, m_wide)
            assert np.all(wide_vals >= narrow_vals - 1e-12)

    def test_degenerate_band_is_linear_kernel(self, rng):
        v0 = 1.3
        m = LatticeModel(x0=0.0, dx=1.0, dt=0.5, n_steps=1, half_width=4,
                         band=VolatilityBand(v0, v0))
        f = rng.normal(size=m.n_nodes)
        up, mid = step_sup(f, m)[0], step_inf(f, m)[0]
        classical = oracle.classical_trinomial_sweep(f, m, 1)
        np.testing.assert_allclose(up, classical, rtol=0, atol=1e-14)
        np.testing.assert_allclose(mid, classical, rtol=0, atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(f=arrays(np.float64, 7, elements=st.floats(-10, 10)))
    def test_duality_hypothesis(self, f):
        m = make_model(lo=0.7, hi=1.9, dx=1.5, dt=1.0)
        lhs, _ = step_inf(f, m)
        rhs, _ = step_sup(-f, m)
        np.testing.assert_allclose(lhs, -rhs, rtol=0, atol=1e-14)


class TestOracleEquivalence:
    """Composed sup sweeps equal the exhaustive policy-enumeration optimum."""

    @pytest.mark.parametrize("half_width,k", [(1, 1), (1, 3), (1, 4), (2, 2),
                                              (2, 3), (3, 2)])
    def test_k_step_sweeps(self, half_width, k, rng):
        m = random_model(rng, n_steps=k, half_width=half_width)
        f = rng.normal(size=m.n_nodes)
        swept = f.copy()
        for _ in range(k):
            swept, _ = step_sup(swept, m)
        brute = oracle.policy_sup_expectation(f, m, k)
        np.testing.assert_allclose(swept, brute, rtol=0, atol=1e-12)


class TestMaximalExpectation:
    def test_power_family_hits_two_exactly(self):
        band = VolatilityBand(1.0, 2.0)
        for alpha in (1.0, 1.5, 2.0):
            val = maximal_expectation(
                lambda x, a=alpha: (x - 1.0) ** a + 1.0, band, 1.0)
            assert val == 2.0

    def test_shrinking_indicator_family_stays_at_one(self):
        band = VolatilityBand(0.25, 1.0)
        for n in (2, 3, 10, 100):
            val = maximal_expectation(
                lambda x, n=n: ((x > 1.0 - 1.0 / n) & (x < 1.0)).astype(float),
                band, 1.0)
            assert val == 1.0

    def test_constant(self):
        assert maximal_expectation(lambda x: np.full_like(x, -2.5),
                                   VolatilityBand(1.0, 2.0), 3.0) == -2.5

    def test_zero_time_collapses_to_point(self):
        assert maximal_expectation(lambda x: x + 1.0,
                                   VolatilityBand(1.0, 2.0), 0.0) == 1.0

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            maximal_expectation(lambda x: x, VolatilityBand(1.0, 2.0), -1.0)

    def test_scalar_callable_supported(self):
        import math
        val = maximal_expectation(lambda x: math.sin(float(x)),
                                  VolatilityBand(1.0, 2.0), 1.0)
        assert val == pytest.approx(1.0, abs=1e-7)
