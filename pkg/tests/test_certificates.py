import numpy as np
import pytest

from binrec.certificates import (
    CERT_TOL,
    Certificate,
    KernelWitness,
    NotCertifiable,
    certify_nonneg,
    certify_unique,
    decide_uniqueness,
    kernel_witness,
    lowfreq_certificate,
    robustness_margin,
    trig_interpolant,
)
from binrec.fourier import make_mask
from binrec.grids import BinarySignal, GridGeometry
from binrec.generators import gen_random_intervals


def bsig(values):
    values = np.asarray(values, float)
    return BinarySignal(GridGeometry(1, len(values)), values)


FINE = np.linspace(0.0, 1.0, 4096, endpoint=False)


class TestTrigInterpolant:
    def test_cosine_pair(self):
        # Zeros at 1/4 and 3/4: -2 cos(2 pi t).
        poly = trig_interpolant([0.25, 0.75], 1)
        assert poly.coeff(0) == pytest.approx(0, abs=1e-12)
        assert poly.coeff(1) == pytest.approx(-1)
        assert poly.coeff(-1) == pytest.approx(-1)
        vals = poly.eval_real(FINE)
        assert np.allclose(vals, -2 * np.cos(2 * np.pi * FINE), atol=1e-9)

    def test_sine_pair(self):
        # Zeros at 0 and 1/2: proportional to sin(2 pi t).
        poly = trig_interpolant([0.0, 0.5], 1)
        vals = poly.eval_real(FINE)
        ratio = vals[1024] / np.sin(2 * np.pi * FINE[1024])
        assert np.allclose(vals, ratio * np.sin(2 * np.pi * FINE), atol=1e-9)
        assert abs(abs(ratio) - 2.0) < 1e-9

    def test_sign_changes_equal_two_n(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3, 5, 8):
            pts = np.sort(rng.uniform(0, 1, 2 * n))
            while np.any(np.diff(pts) < 1e-3):
                pts = np.sort(rng.uniform(0, 1, 2 * n))
            poly = trig_interpolant(pts, n)
            vals = poly.eval_real(FINE)
            changes = int(np.count_nonzero(np.sign(vals) != np.sign(np.roll(vals, 1))))
            assert changes == 2 * n

    def test_spectrum_support_and_hermitian(self):
        rng = np.random.default_rng(1)
        pts = np.sort(rng.uniform(0, 1, 6))
        poly = trig_interpolant(pts, 3)
        assert poly.coeffs.shape == (7,)
        for k in range(-3, 4):
            assert poly.coeff(-k) == pytest.approx(np.conj(poly.coeff(k)), abs=1e-12)

    def test_vanishes_exactly_at_points(self):
        pts = [0.1, 0.3, 0.55, 0.9]
        poly = trig_interpolant(pts, 2)
        assert np.max(np.abs(poly.eval(np.array(pts)))) < 1e-10

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            trig_interpolant([0.1, 0.1], 1)
        with pytest.raises(ValueError):
            trig_interpolant([0.1, 0.2, 0.3], 1)


class TestLowfreqCertificate:
    def test_step_signal(self):
        cert = lowfreq_certificate(bsig([1, 1, 0, 0]))
        # Zeros at 0.125 and 0.625; strict signs (-,-,+,+).
        v = cert.v.values
        assert v[0] < 0 and v[1] < 0 and v[2] > 0 and v[3] > 0
        assert cert.margin > 0

    def test_constant_ones(self):
        cert = lowfreq_certificate(bsig([1, 1, 1, 1]))
        assert np.allclose(cert.v.values, -1.0)
        assert cert.margin == pytest.approx(1.0)

    def test_paper_scale(self):
        u = gen_random_intervals(400, 15, seed=2)
        cert = lowfreq_certificate(u)
        assert cert.mask.indices() == list(range(-15, 16))
        assert cert.margin > 0

    def test_adjoint_invariant(self):
        for seed in range(5):
            u = gen_random_intervals(32, 3, seed=seed)
            cert = lowfreq_certificate(u)
            assert cert.adjoint_residual() < 1e-10

    def test_margin_positive_sweep(self):
        # Strictly positive margin whenever 2d <= n/2.
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.choice([8, 16, 32, 64]))
            d = int(rng.integers(1, max(2, n // 4 // 2 + 1)))
            u = gen_random_intervals(n, d, seed=int(rng.integers(1 << 31)))
            cert = lowfreq_certificate(u)
            assert cert.margin > 0


class TestCertifyUnique:
    def test_constant_ones_dc_mask(self):
        g = GridGeometry(1, 4)
        cert = certify_unique(bsig([1, 1, 1, 1]), make_mask("explicit", [0], g))
        assert isinstance(cert, Certificate)
        assert np.all(cert.v.values < 0)

    def test_alternating_not_certifiable_lowpass_one(self):
        g = GridGeometry(1, 4)
        out = certify_unique(bsig([1, 0, 1, 0]), make_mask("low", 1, g))
        assert isinstance(out, NotCertifiable)
        wit = kernel_witness(bsig([1, 0, 1, 0]), make_mask("low", 1, g))
        assert wit is not None

    def test_full_mask_always_certifiable(self):
        rng = np.random.default_rng(4)
        g = GridGeometry(1, 8)
        full = make_mask("explicit", [int(k) for k in g.freq_axis()], g)
        for _ in range(10):
            u = BinarySignal(g, rng.integers(0, 2, 8).astype(float))
            assert isinstance(certify_unique(u, full), Certificate)

    def test_certificate_margin_and_adjoint(self):
        u = gen_random_intervals(32, 3, seed=9)
        cert = certify_unique(u, make_mask("low", 3, GridGeometry(1, 32)))
        assert isinstance(cert, Certificate)
        sigma = np.where(u.values == 1.0, -1.0, 1.0)
        assert np.min(sigma * cert.v.values) == pytest.approx(cert.margin)
        assert cert.margin > CERT_TOL
        assert cert.adjoint_residual() < 1e-10

    def test_lowpass_tightness_sweep(self):
        # Certifiable at |k| <= d, not at |k| <= d-1, across d and sizes.
        rng = np.random.default_rng(5)
        for d in range(1, 9):
            for n in (32, 64):
                u = gen_random_intervals(n, d, seed=int(rng.integers(1 << 31)))
                g = GridGeometry(1, n)
                assert isinstance(certify_unique(u, make_mask("low", d, g)), Certificate)
                smaller = (
                    make_mask("low", d - 1, g) if d > 1 else make_mask("explicit", [0], g)
                )
                assert isinstance(certify_unique(u, smaller), NotCertifiable)


class TestKernelWitness:
    def test_full_mask_no_witness(self):
        g = GridGeometry(1, 8)
        full = make_mask("explicit", [int(k) for k in g.freq_axis()], g)
        assert kernel_witness(bsig([1, 0, 1, 0, 1, 0, 0, 0]), full) is None

    def test_witness_validity(self):
        g = GridGeometry(1, 4)
        wit = kernel_witness(bsig([1, 0, 1, 0]), make_mask("low", 1, g))
        assert isinstance(wit, KernelWitness)
        assert wit.kernel_residual < 1e-9
        v = wit.v.values
        assert np.sum(np.abs(v)) == pytest.approx(1.0)
        u = np.array([1, 0, 1, 0.0])
        assert np.all(v[u == 1] <= 1e-12)
        assert np.all(v[u == 0] >= -1e-12)


class TestExclusivity:
    def test_exactly_one_of_certificate_or_witness(self):
        # Alternative-theorem dichotomy over random signal/mask pairs;
        # disagreements inside the tolerance band are logged, not failed.
        rng = np.random.default_rng(6)
        undecided = 0
        for _ in range(500):
            n = int(rng.choice([4, 8, 16, 32]))
            g = GridGeometry(1, n)
            u = BinarySignal(g, rng.integers(0, 2, n).astype(float))
            r = int(rng.integers(1, n + 1))
            mask = make_mask("random", (r, int(rng.integers(1 << 31))), g)
            label, _ = decide_uniqueness(u, mask)
            assert label in ("unique", "multiple", "undecided")
            undecided += label == "undecided"
        assert undecided <= 5  # tolerance-band cases should be rare


class TestCertifyNonneg:
    def test_empty_support_dc(self):
        g = GridGeometry(1, 4)
        cert = certify_nonneg([], make_mask("explicit", [0], g))
        assert isinstance(cert, Certificate)
        assert np.all(cert.v.values > 0)

    def test_spikes_at_matching_band(self):
        # d spikes are certifiable from |k| <= d but not |k| <= d-1.
        rng = np.random.default_rng(7)
        g = GridGeometry(1, 32)
        for d in (1, 2, 3, 4):
            support = sorted(rng.choice(np.arange(1, 33), size=d, replace=False))
            ok = certify_nonneg([int(s) for s in support], make_mask("low", d, g))
            assert isinstance(ok, Certificate)
            assert ok.margin > 0
            assert np.max(np.abs(ok.v.values[[s - 1 for s in support]])) < 1e-8
            smaller = (
                make_mask("low", d - 1, g) if d > 1 else make_mask("explicit", [0], g)
            )
            bad = certify_nonneg([int(s) for s in support], smaller)
            assert isinstance(bad, NotCertifiable)

    def test_full_support_rejected(self):
        g = GridGeometry(1, 4)
        with pytest.raises(ValueError):
            certify_nonneg([1, 2, 3, 4], make_mask("low", 1, g))


class TestRobustnessMargin:
    def test_constant_certificate_formula(self):
        cert = lowfreq_certificate(bsig([1, 1, 1, 1]))
        # v = -1 everywhere at unit dual norm: h = 1/2.
        assert robustness_margin(cert) == pytest.approx(0.5)

    def test_scaling_invariance(self):
        u = gen_random_intervals(32, 2, seed=1)
        cert = certify_unique(u, make_mask("low", 2, GridGeometry(1, 32)))
        h = robustness_margin(cert)
        doubled = Certificate(
            mask=cert.mask,
            eta=2 * cert.eta,
            v=type(cert.v)(cert.v.geometry, 2 * cert.v.values),
            margin=2 * cert.margin,
            norm=2 * cert.norm,
        )
        assert robustness_margin(doubled) == pytest.approx(h)

    def test_invalid_certificate_rejected(self):
        u = gen_random_intervals(32, 2, seed=1)
        cert = certify_unique(u, make_mask("low", 2, GridGeometry(1, 32)))
        bad = Certificate(cert.mask, cert.eta, cert.v, margin=-1.0, norm=cert.norm)
        with pytest.raises(ValueError):
            robustness_margin(bad)

    def test_noise_below_margin_preserves_threshold(self):
        # Empirical spot check of the robustness contract (the full 100-trial
        # version runs in the acceptance suite).
        from binrec.fourier import MeasurementSet, meas_norm_sq, measure
        from binrec.grids import hamming_distance, hermitianize
        from binrec.solver import SolverConfig, reconstruct

        rng = np.random.default_rng(8)
        for trial in range(10):
            u = gen_random_intervals(64, int(rng.integers(1, 6)), seed=trial)
            g = GridGeometry(1, 64)
            mask = make_mask("low", 6, g)
            cert = certify_unique(u, mask)
            assert isinstance(cert, Certificate)
            h = robustness_margin(cert)
            b = measure(u, mask)
            z = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            eps = np.where(mask.selector, hermitianize(z), 0)
            eps *= 0.9 * h / np.sqrt(meas_norm_sq(eps))
            noisy = MeasurementSet(mask, b.values + eps)
            recon, _, _ = reconstruct(noisy, SolverConfig(tol=0.0, max_iters=2000))
            assert hamming_distance(recon, u) == 0
