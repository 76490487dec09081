import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrdlab.dfa import block_fluctuation, dfa_analysis, profile


def arfima_0d0(d: float, n: int, seed: int) -> np.ndarray:
    """Independent ARFIMA(0, d, 0) oracle: hand convolution of iid normals
    with the (1 - L)^{-d} binomial weights."""
    rng = np.random.default_rng(seed)
    burn = 2000
    eps = rng.standard_normal(n + burn)
    k = np.arange(1.0, n + burn)
    psi = np.concatenate(([1.0], np.cumprod((k - 1.0 + d) / k)))
    x = np.convolve(eps, psi)[: n + burn]
    return x[burn:]


class TestProfile:
    def test_alternating(self):
        np.testing.assert_allclose(profile([1.0, -1.0, 1.0, -1.0]), [1, 0, 1, 0], atol=1e-15)

    def test_constant_returns_zero_profile(self):
        np.testing.assert_array_equal(profile([2.0, 2.0, 2.0]), [0, 0, 0])

    def test_last_element_telescopes_to_zero(self):
        r = np.random.default_rng(0).standard_normal(500) * 3.0
        y = profile(r)
        assert abs(y[-1]) < 1e-9 * r.size * r.std()

    def test_too_short(self):
        with pytest.raises(ValueError):
            profile([1.0])


class TestBlockFluctuation:
    def test_perfectly_linear_segment(self):
        assert block_fluctuation([2.0, 4.0, 6.0, 8.0]) == pytest.approx(0.0, abs=1e-14)

    def test_hand_ols_example(self):
        # OLS line 0.2 i; residuals (-0.2, 0.6, -0.6, 0.2)
        assert block_fluctuation([0.0, 1.0, 0.0, 1.0]) == pytest.approx(np.sqrt(0.2))

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(1)
        seg = rng.normal(0, 1, 32)
        n = seg.size
        i = np.arange(1.0, n + 1)
        ibar = (n + 1) / 2
        sxx = n * (n * n - 1) / 12.0
        slope = np.dot(seg - seg.mean(), i - ibar) / sxx
        resid = seg - (slope * i + (seg.mean() - slope * ibar))
        assert abs(resid.sum()) < 1e-9
        assert abs(np.dot(resid, i)) < 1e-9

    def test_too_short(self):
        with pytest.raises(ValueError):
            block_fluctuation([1.0, 2.0, 3.0])


class TestDfaAnalysis:
    def test_too_short(self):
        with pytest.raises(ValueError, match="too short"):
            dfa_analysis(np.arange(15.0))

    def test_affine_invariance(self):
        r = np.random.default_rng(2).standard_normal(512)
        a, b = 3.7, -0.002
        e0, f0 = dfa_analysis(r)
        e1, f1 = dfa_analysis(a * r + b)
        assert e1.h == pytest.approx(e0.h, abs=1e-9)
        assert e1.p_value == pytest.approx(e0.p_value, abs=1e-9)
        np.testing.assert_allclose(f1.ln_stat - f0.ln_stat, np.log(a), atol=1e-9)

    def test_detrending_reduces_fluctuation(self):
        rng = np.random.default_rng(3)
        y = np.cumsum(rng.standard_normal(256))
        for n in (8, 16, 64):
            for v in range(y.size // n):
                seg = y[v * n : (v + 1) * n]
                rms_centered = float(np.sqrt(np.mean((seg - seg.mean()) ** 2)))
                assert block_fluctuation(seg) <= rms_centered + 1e-12

    def test_constant_returns_degenerate(self):
        with pytest.raises(ValueError):
            dfa_analysis(np.full(64, 1.0))

    def test_iid_monte_carlo_baseline(self):
        hs = [dfa_analysis(np.random.default_rng(200 + s).standard_normal(8192))[0].h
              for s in range(50)]
        assert 0.45 <= np.mean(hs) <= 0.55

    def test_long_memory_discrimination(self):
        # ARFIMA(0, 0.2, 0) vs iid: DFA separates at >= 5 sigma of seed means
        h_mem = np.array([dfa_analysis(arfima_0d0(0.2, 8192, 300 + s))[0].h
                          for s in range(50)])
        h_iid = np.array([dfa_analysis(np.random.default_rng(400 + s).standard_normal(8192))[0].h
                          for s in range(50)])
        assert 0.65 <= h_mem.mean() <= 0.75
        assert 0.45 <= h_iid.mean() <= 0.55
        se = np.sqrt(h_mem.var(ddof=1) / 50 + h_iid.var(ddof=1) / 50)
        assert (h_mem.mean() - h_iid.mean()) / se >= 5.0
