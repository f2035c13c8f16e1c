import numpy as np
import pytest
import pywt
from scipy.special import comb

from src.core.types import DamageClass, SeriesMeta, TimeSeries
from src.dsp.spectrum import dft_magnitude, remove_offset
from src.dsp.transform import (
    WaveletSpec,
    band_edges,
    dwt_decompose,
    dwt_reconstruct,
    max_feasible_depth,
    wavelet_denoise,
)
from src.dsp.wavelets import daubechies_filters, daubechies_wavelet
from src.signalgen.augment import add_noise
from src.signalgen.excitation import ExcitationConfig, hann_toneburst
from src.signalgen.propagation import delayed_pulse
from src.utils.exceptions import ConfigurationError, WaveletError

def _series(samples, dt=1e-7) -> TimeSeries:
    return TimeSeries(samples=np.asarray(samples, dtype=float), dt=dt, meta=SeriesMeta(label=DamageClass.BASELINE))

def _response(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = np.arange(h.size)
    return np.abs(np.exp(-1j * np.outer(w, n)) @ h) ** 2

class TestFilters:
    @pytest.mark.parametrize("order", [1, 2, 8, 40])
    def test_orthonormality(self, order):
        h, g = daubechies_filters(order)
        assert h.size == g.size == 2 * order
        assert np.sum(h) == pytest.approx(np.sqrt(2), abs=1e-10)
        assert np.sum(h**2) == pytest.approx(1.0, abs=1e-10)
        for k in range(1, order):
            assert abs(np.dot(h[: -2 * k], h[2 * k :])) < 1e-10
        assert abs(np.dot(h, g)) < 1e-10

    def test_haar(self):
        h, g = daubechies_filters(1)
        np.testing.assert_allclose(h, [2**-0.5, 2**-0.5], atol=1e-15)
        np.testing.assert_allclose(g, [2**-0.5, -(2**-0.5)], atol=1e-15)

    @pytest.mark.parametrize("order", [2, 4, 8, 12, 20])
    def test_matches_pywavelets_tables(self, order):
        h, g = daubechies_filters(order)
        reference = pywt.Wavelet(f"db{order}")
        np.testing.assert_allclose(h, reference.rec_lo, atol=1e-9)
        np.testing.assert_allclose(g, reference.rec_hi, atol=1e-9)

    def test_db40_squared_response(self):
        order = 40
        h, _ = daubechies_filters(order)
        w = np.linspace(0.05, np.pi - 0.05, 64)
        y = np.sin(w / 2) ** 2
        p = sum(comb(order - 1 + k, k, exact=False) * y**k for k in range(order))
        expected = 2 * np.cos(w / 2) ** (2 * order) * p
        np.testing.assert_allclose(_response(h, w), expected, atol=1e-9)
        # power complementarity of an orthonormal lowpass
        np.testing.assert_allclose(_response(h, w) + _response(h, w + np.pi), 2.0, atol=1e-9)

    @pytest.mark.parametrize("order", [0, 46, 2.5])
    def test_unsupported_order(self, order):
        with pytest.raises(WaveletError):
            daubechies_filters(order)

    def test_wavelet_object_uses_our_bank(self):
        wavelet = daubechies_wavelet(4)
        h, g = daubechies_filters(4)
        assert wavelet.dec_len == 8
        np.testing.assert_array_equal(wavelet.rec_lo, h)
        np.testing.assert_array_equal(wavelet.dec_hi, g[::-1])

class TestTransform:
    @pytest.mark.parametrize("order", [1, 2, 8, 40])
    @pytest.mark.parametrize("length", [256, 1024, 2048])
    @pytest.mark.parametrize("mode", ["symmetric", "periodization"])
    def test_perfect_reconstruction(self, order, length, mode):
        rng = np.random.default_rng(order * length)
        s = _series(rng.standard_normal(length))
        levels = max(1, min(3, pywt.dwt_max_level(length, 2 * order)))
        spec = WaveletSpec(order=order, levels=levels, selected_level=1, mode=mode)
        c = dwt_decompose(s, spec)
        back = dwt_reconstruct(c, c.band_ids, template=s)
        error = np.linalg.norm(back.samples - s.samples) / np.linalg.norm(s.samples)
        assert error <= 1e-8

    def test_read_only_samples_decompose(self):
        s = _series(np.random.default_rng(5).standard_normal(512))
        assert not s.samples.flags.writeable
        c = dwt_decompose(s, WaveletSpec(order=4, levels=3, selected_level=2))
        np.testing.assert_allclose(dwt_reconstruct(c, c.band_ids).samples, s.samples, atol=1e-9)

    def test_toneburst_energy_partitions_across_db40_bands(self):
        # 2**13 samples keep every level longer than the 80-tap filter
        burst = hann_toneburst(ExcitationConfig(record_seconds=8.192e-4))
        s = burst.with_samples(delayed_pulse(burst, 4e-5))
        assert len(s) == 8192
        c = dwt_decompose(s, WaveletSpec(order=40, levels=7, selected_level=6, mode="periodization"))
        total = float(np.sum(s.samples**2))
        assert sum(c.energies().values()) == pytest.approx(total, rel=1e-8)
        assert c.energies()["d6"] > 0.5 * total

    def test_band_energies_partition_signal_energy(self):
        rng = np.random.default_rng(3)
        s = _series(rng.standard_normal(1024))
        c = dwt_decompose(s, WaveletSpec(order=2, levels=4, selected_level=2, mode="periodization"))
        assert sum(c.energies().values()) == pytest.approx(float(np.sum(s.samples**2)), rel=1e-10)

    def test_band_reconstructions_sum_to_signal(self):
        rng = np.random.default_rng(4)
        s = _series(rng.standard_normal(512))
        c = dwt_decompose(s, WaveletSpec(order=4, levels=4, selected_level=2))
        parts = sum(dwt_reconstruct(c, {band}).samples for band in c.band_ids)
        np.testing.assert_allclose(parts, s.samples, atol=1e-9)

    def test_band_ids(self):
        c = dwt_decompose(_series(np.ones(256)), WaveletSpec(order=2, levels=3, selected_level=1))
        assert c.band_ids == ["d1", "d2", "d3", "a3"]
        assert c.details[0].size > c.details[2].size

    def test_infeasible_depth(self):
        with pytest.raises(WaveletError, match="maximum feasible depth is 6"):
            dwt_decompose(_series(np.ones(100)), WaveletSpec(order=2, levels=7, selected_level=6))
        assert max_feasible_depth(100) == 6
        assert max_feasible_depth(2000) == 10

    def test_signal_shorter_than_filter(self):
        with pytest.raises(WaveletError, match="shorter"):
            dwt_decompose(_series(np.ones(50)), WaveletSpec())

    def test_bad_keep_sets(self):
        c = dwt_decompose(_series(np.ones(256)), WaveletSpec(order=2, levels=3, selected_level=1))
        with pytest.raises(WaveletError):
            dwt_reconstruct(c, set())
        with pytest.raises(WaveletError, match="d9"):
            dwt_reconstruct(c, {"d9"})

    @pytest.mark.parametrize(
        "spec",
        [
            WaveletSpec(order=0),
            WaveletSpec(levels=0, selected_level=0),
            WaveletSpec(levels=5, selected_level=6),
            WaveletSpec(mode="zero"),
        ],
    )
    def test_invalid_spec(self, spec):
        with pytest.raises(ConfigurationError):
            spec.validate()

    def test_selected_band_holds_the_carrier(self):
        low, high = band_edges(1e7, 6)
        assert (low, high) == (78125.0, 156250.0)
        assert low < 1e5 < high

class TestDenoise:
    @pytest.fixture
    def clean(self):
        burst = hann_toneburst(ExcitationConfig())
        return burst.with_samples(delayed_pulse(burst, 4e-5))

    def test_keeps_the_burst(self, clean):
        noisy = add_noise(clean, 0.05, rng_seed=8)
        denoised = wavelet_denoise(noisy, WaveletSpec())
        assert len(denoised) == len(clean)
        assert denoised.meta == noisy.meta
        assert np.corrcoef(denoised.samples, clean.samples)[0, 1] >= 0.9

    def test_improves_a_heavily_corrupted_record(self, clean):
        noisy = add_noise(clean, 0.2, rng_seed=9)
        denoised = wavelet_denoise(noisy, WaveletSpec())
        before = np.corrcoef(noisy.samples, clean.samples)[0, 1]
        after = np.corrcoef(denoised.samples, clean.samples)[0, 1]
        assert after > before

    def test_in_band_burst_passes_almost_unchanged(self):
        cfg = ExcitationConfig(f=1.15e5, n_cycles=10)
        burst = hann_toneburst(cfg)
        clean = burst.with_samples(delayed_pulse(burst, 4e-5))
        low, high = band_edges(cfg.fs, 6)
        assert low < cfg.f < high
        denoised = wavelet_denoise(clean, WaveletSpec())
        assert np.corrcoef(denoised.samples, clean.samples)[0, 1] >= 0.99

    def test_default_burst_keeps_most_of_its_energy(self, clean):
        # the 5-cycle burst has sidelobes below the 78 kHz band edge
        denoised = wavelet_denoise(clean, WaveletSpec())
        assert np.corrcoef(denoised.samples, clean.samples)[0, 1] >= 0.97

    def test_constant_input_gives_zeros(self):
        out = wavelet_denoise(_series(np.full(2048, 2.5)), WaveletSpec())
        np.testing.assert_allclose(out.samples, 0.0, atol=1e-12)

    def test_band_far_from_the_carrier_rejects_it(self, clean):
        denoised = wavelet_denoise(clean, WaveletSpec(selected_level=2))
        assert np.sum(denoised.samples**2) < 0.01 * np.sum(clean.samples**2)

    def test_offset_does_not_matter(self, clean):
        spec = WaveletSpec(order=8)
        shifted = clean.with_samples(clean.samples + 3.0)
        np.testing.assert_allclose(
            wavelet_denoise(shifted, spec).samples, wavelet_denoise(clean, spec).samples, atol=1e-9
        )

class TestSpectrum:
    def test_remove_offset(self):
        out = remove_offset(_series([1.0, 2.0, 3.0, 6.0]))
        assert np.mean(out.samples) == pytest.approx(0.0, abs=1e-15)

    def test_sinusoid_peaks_at_its_bin(self):
        n, dt = 1000, 1e-6
        t = np.arange(n) * dt
        spectrum = dft_magnitude(_series(np.sin(2 * np.pi * 50e3 * t), dt=dt))
        assert spectrum.n_bins == n // 2 + 1
        assert spectrum.frequencies[np.argmax(spectrum.magnitudes)] == pytest.approx(50e3)

    @pytest.mark.parametrize("n", [999, 1000])
    def test_parseval(self, n):
        rng = np.random.default_rng(n)
        s = _series(rng.standard_normal(n), dt=2e-7)
        assert dft_magnitude(s).energy(s.dt) == pytest.approx(float(np.sum(s.samples**2) * s.dt), rel=1e-9)
