"""Transform operators: forward quadrature, filtered inverse and the DFT baseline."""

from math import pi

import mpmath as mp
import numpy as np
import pytest

from oscquad.fourier import (
    CoefficientCache,
    SampledSignal,
    SpectrumGrid,
    dft,
    filtered_inverse,
    filtered_inverse_many,
    forward_transform,
    idft,
)


def _signal(fn, a, b, n):
    x = np.linspace(a, b, n + 1)
    return SampledSignal(a=a, b=b, values=fn(x).astype(complex))


class TestTypes:
    def test_signal_geometry(self):
        s = _signal(np.cos, -1.0, 1.0, 128)
        assert s.n == 128
        assert s.h == pytest.approx(2.0 / 128)

    def test_signal_validation(self):
        with pytest.raises(ValueError):
            SampledSignal(a=0.0, b=1.0, values=np.ones(1))
        with pytest.raises(ValueError):
            SampledSignal(a=1.0, b=0.0, values=np.ones(4))

    def test_spectrum_grid(self):
        g = SpectrumGrid.band(4.0, 9)
        np.testing.assert_allclose(g.omegas, np.linspace(-4, 4, 9))
        assert g.spacing == pytest.approx(1.0)

    def test_nyquist_band(self):
        s = _signal(np.cos, -1.0, 1.0, 64)
        g = SpectrumGrid.nyquist(s)
        assert g.omega_max == pytest.approx(1.0 / (2.0 * s.h))
        assert len(g.values) == 65


class TestForward:
    def test_constant_at_zero_frequency(self):
        s = SampledSignal(a=-1.0, b=1.0, values=np.ones(65, dtype=complex))
        out = forward_transform(s, SpectrumGrid.band(2.0, 5), m=2)
        i0 = 2  # omega = 0 sample
        assert out.values[i0] == pytest.approx(2.0, abs=1e-10)

    def test_matched_oscillation_recovers_unity(self):
        x = np.linspace(0.0, 1.0, 129)
        s = SampledSignal(a=0.0, b=1.0, values=np.exp(2j * pi * 3 * x))
        out = forward_transform(s, SpectrumGrid.band(3.0, 3), m=2)
        assert out.values[-1] == pytest.approx(1.0, abs=1e-4)  # omega = +3 sample, O(h^2)

    def test_smooth_pulse_order(self):
        # against adaptive integration of the transform integral, halving h
        def pulse(x):
            return np.exp(-8.0 * x**2) * (1 + 0j)

        om = 1.7
        with mp.workdps(30):
            exact = complex(
                mp.quad(lambda x: mp.exp(-8 * x**2) * mp.exp(-2j * mp.pi * om * x), [-1, 1])
            )
        errs = []
        for n in (32, 64, 128):
            s = _signal(pulse, -1.0, 1.0, n)
            out = forward_transform(s, SpectrumGrid.band(om, 3), m=2)
            errs.append(abs(out.values[-1] - exact))  # omega_max = om sample
        order = -np.polyfit(np.log([32, 64, 128]), np.log(errs), 1)[0]
        assert order >= 2.0 - 0.3

    def test_linearity(self):
        rng = np.random.default_rng(3)
        u = rng.normal(size=33) + 1j * rng.normal(size=33)
        v = rng.normal(size=33) + 1j * rng.normal(size=33)
        grid = SpectrumGrid.band(5.0, 11)
        fu = forward_transform(SampledSignal(-1, 1, u), grid, 2).values
        fv = forward_transform(SampledSignal(-1, 1, v), grid, 2).values
        fuv = forward_transform(SampledSignal(-1, 1, u + v), grid, 2).values
        np.testing.assert_allclose(fuv, fu + fv, atol=1e-12)

    def test_cache_is_bit_identical(self):
        s = _signal(np.cos, -1.0, 1.0, 32)
        grid = SpectrumGrid.band(4.0, 17)
        fresh = forward_transform(s, grid, 2).values
        cache = CoefficientCache()
        first = forward_transform(s, grid, 2, cache=cache).values
        second = forward_transform(s, grid, 2, cache=cache).values
        np.testing.assert_array_equal(fresh, first)
        np.testing.assert_array_equal(first, second)


class TestFilteredInverse:
    def test_zero_spectrum(self):
        g = SpectrumGrid(omega_max=2.0, values=np.zeros(17, dtype=complex))
        assert filtered_inverse(g, 0.3, m=2) == 0.0

    def test_constant_spectrum_at_origin(self):
        # Q(0) = S int_{-W}^{W} |w| dw = S W^2; with m=1 the weights are exact
        # for the piecewise-linear ramp (node at 0)
        W, S = 2.0, 1.3
        g = SpectrumGrid(omega_max=W, values=S * np.ones(33, dtype=complex))
        assert filtered_inverse(g, 0.0, m=1) == pytest.approx(S * W**2, abs=1e-12)

    def test_ramp_filtered_bump_matches_adaptive(self):
        # spectrum of a smooth bump, band-integrated against |w| e^{2 pi i w t}
        # accuracy here is limited by the |w| kink at w = 0, an O(h^2) effect
        W, M, m = 4.0, 256, 2
        omegas = np.linspace(-W, W, M + 1)
        spec_fn = lambda w: np.exp(-0.5 * w**2)
        g = SpectrumGrid(omega_max=W, values=spec_fn(omegas).astype(complex))
        for t in (0.0, 0.37, -1.1):
            with mp.workdps(30):
                exact = complex(mp.quad(
                    lambda w: mp.exp(-0.5 * w**2) * abs(w) * mp.exp(2j * mp.pi * w * t),
                    [-W, 0, W],
                ))
            got = filtered_inverse(g, t, m)
            assert got == pytest.approx(exact, abs=5e-4)

    def test_many_matches_scalar(self):
        W, M = 4.0, 32
        rng = np.random.default_rng(5)
        g = SpectrumGrid(omega_max=W, values=rng.normal(size=M + 1) + 0j)
        ts = np.array([-0.9, -0.2, 0.0, 0.31, 1.4])
        many = filtered_inverse_many(g, ts, m=2)
        for t, v in zip(ts, many):
            assert v == pytest.approx(filtered_inverse(g, float(t), m=2), abs=1e-10)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=17) + 1j * rng.normal(size=17)
        b = rng.normal(size=17) + 1j * rng.normal(size=17)
        ga = SpectrumGrid(2.0, a)
        gb = SpectrumGrid(2.0, b)
        gab = SpectrumGrid(2.0, a + b)
        t = 0.41
        assert filtered_inverse(gab, t, 2) == pytest.approx(
            filtered_inverse(ga, t, 2) + filtered_inverse(gb, t, 2), abs=1e-12
        )


class TestDFTBaseline:
    def test_roundtrip_identity(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=32) + 1j * rng.normal(size=32)
        np.testing.assert_allclose(idft(dft(v)), v, atol=1e-10)

    def test_parseval(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=64) + 1j * rng.normal(size=64)
        lhs = np.sum(np.abs(dft(v)) ** 2)
        rhs = 64 * np.sum(np.abs(v) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_constant_concentrates_in_zero_bin(self):
        out = dft(np.ones(16))
        assert out[0] == pytest.approx(16.0)
        np.testing.assert_allclose(out[1:], 0.0, atol=1e-12)

    def test_matches_numpy_fft(self):
        rng = np.random.default_rng(2)
        v = rng.normal(size=48) + 1j * rng.normal(size=48)
        np.testing.assert_allclose(dft(v), np.fft.fft(v), atol=1e-9)
        np.testing.assert_allclose(idft(v), np.fft.ifft(v), atol=1e-9)
