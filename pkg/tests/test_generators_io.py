import numpy as np
import pytest

from binrec.fourier import make_mask, measure
from binrec.generators import add_noise, gen_barcode, gen_disk, gen_random_intervals
from binrec.grids import (
    BinarySignal,
    GridGeometry,
    RealSignal,
    interval_decomposition,
)
from binrec.sigio import (
    as_binary_signal,
    read_measurements,
    read_pgm,
    read_real_grid,
    read_signal_csv,
    write_measurements,
    write_pgm,
    write_real_grid,
    write_signal_csv,
)


class TestGenRandomIntervals:
    def test_two_runs(self):
        u = gen_random_intervals(4, 1, seed=0)
        assert interval_decomposition(u).d == 1

    def test_run_count_contract_bulk(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.choice([10, 64, 100, 400]))
            d = int(rng.integers(0, n // 2 + 1))
            u = gen_random_intervals(n, d, seed=int(rng.integers(1 << 31)))
            assert interval_decomposition(u).d == d

    def test_deterministic(self):
        a = gen_random_intervals(100, 5, seed=42)
        b = gen_random_intervals(100, 5, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            gen_random_intervals(10, 6, seed=0)

    def test_paper_regime(self):
        u = gen_random_intervals(100, 5, seed=1)
        assert u.geometry.n == 100
        assert interval_decomposition(u).d == 5


class TestGenDisk:
    def test_radius_zero_on_grid_point(self):
        u = gen_disk(8, center=(0.25, 0.5), radius=0.0)  # (2/8, 4/8) is a grid point
        assert u.values.sum() == 1

    def test_radius_zero_off_grid(self):
        u = gen_disk(8, center=(0.26, 0.49), radius=0.0)
        assert u.values.sum() == 0

    def test_large_disk_complement_small(self):
        u = gen_disk(64, radius=0.49)
        frac = u.values.mean()
        assert frac == pytest.approx(np.pi * 0.49**2, abs=0.02)

    def test_wraps_periodically(self):
        u = gen_disk(32, center=(0.0, 0.0), radius=0.2)
        # Mass in all four corners of the array.
        assert u.values[0, 0] == 1 and u.values[-1, -1] == 1

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            gen_disk(16, radius=0.5)


class TestGenBarcode:
    def test_half_and_half(self):
        u = gen_barcode("10", 16)
        assert np.array_equal(u.values[:, :8], np.ones((16, 8)))
        assert np.array_equal(u.values[:, 8:], np.zeros((16, 8)))

    def test_columns_constant_vertically(self):
        u = gen_barcode("1011001", 32)
        assert np.all(u.values == u.values[0, :][None, :])

    def test_thirty_runs_give_d15(self):
        pattern = "10" * 15
        u = gen_barcode(pattern, 128)
        profile = BinarySignal(GridGeometry(1, 128), u.values[0])
        assert interval_decomposition(profile).d == 15

    def test_rectangle_rejected(self):
        with pytest.raises(ValueError):
            gen_barcode("10", 16, 32)

    def test_bad_pattern(self):
        with pytest.raises(ValueError):
            gen_barcode("10x1", 16)


class TestAddNoise:
    def test_zero_std_identity(self):
        u = gen_random_intervals(64, 3, seed=0)
        out = add_noise(u, 0.0, seed=1)
        assert np.array_equal(out.values, u.values)

    def test_empirical_std(self):
        g = GridGeometry(1, 100000 + 2)  # even length
        out = add_noise(RealSignal(g, np.zeros(g.n)), 0.05, seed=2)
        assert out.values.std() == pytest.approx(0.05, rel=0.05)

    def test_deterministic(self):
        u = gen_random_intervals(64, 3, seed=0)
        a = add_noise(u, 0.1, seed=3)
        b = add_noise(u, 0.1, seed=3)
        assert np.array_equal(a.values, b.values)

    def test_measurement_noise_stays_hermitian_and_masked(self):
        u = gen_random_intervals(64, 3, seed=4)
        mask = make_mask("low", 5, GridGeometry(1, 64))
        noisy = add_noise(measure(u, mask), 0.1, seed=5)
        assert np.all(noisy.values[~mask.selector] == 0)
        # MeasurementSet construction validates Hermitian symmetry.

    def test_negative_std_rejected(self):
        with pytest.raises(ValueError):
            add_noise(gen_random_intervals(8, 1, seed=0), -0.1, seed=0)


class TestSignalCsv:
    def test_roundtrip_binary(self, tmp_path):
        u = gen_random_intervals(64, 4, seed=6)
        path = tmp_path / "u.csv"
        write_signal_csv(path, u)
        back = as_binary_signal(read_signal_csv(path))
        assert np.array_equal(back.values, u.values)

    def test_roundtrip_real_full_precision(self, tmp_path):
        g = GridGeometry(1, 16)
        u = RealSignal(g, np.random.default_rng(7).standard_normal(16))
        path = tmp_path / "u.csv"
        write_signal_csv(path, u)
        back = read_signal_csv(path)
        assert np.array_equal(back.values, u.values)


class TestPgm:
    def test_roundtrip_binary_p5(self, tmp_path):
        u = gen_disk(32, radius=0.2)
        path = tmp_path / "u.pgm"
        write_pgm(path, u)
        back = read_pgm(path)
        assert np.array_equal(back.values, u.values)

    def test_roundtrip_ascii_p2(self, tmp_path):
        u = gen_disk(16, radius=0.3)
        path = tmp_path / "u.pgm"
        write_pgm(path, u, ascii_format=True)
        assert path.read_bytes().startswith(b"P2")
        back = read_pgm(path)
        assert np.array_equal(back.values, u.values)

    def test_grayscale_thresholded(self, tmp_path):
        path = tmp_path / "gray.pgm"
        path.write_bytes(b"P5\n# comment\n2 2\n255\n" + bytes([0, 100, 180, 255]))
        back = read_pgm(path)
        assert list(back.values.ravel()) == [0.0, 0.0, 1.0, 1.0]

    def test_rectangular_rejected(self, tmp_path):
        path = tmp_path / "rect.pgm"
        path.write_bytes(b"P5\n3 2\n255\n" + bytes(6))
        with pytest.raises(ValueError):
            read_pgm(path)


class TestRealGrid:
    def test_roundtrip(self, tmp_path):
        g = GridGeometry(2, 8)
        u = RealSignal(g, np.random.default_rng(8).standard_normal((8, 8)))
        path = tmp_path / "u.txt"
        write_real_grid(path, u)
        back = read_real_grid(path)
        assert np.allclose(back.values, u.values, atol=0, rtol=0)


class TestMeasurementsCsv:
    def test_roundtrip_1d(self, tmp_path):
        u = gen_random_intervals(32, 3, seed=9)
        meas = measure(u, make_mask("low", 4, GridGeometry(1, 32)))
        path = tmp_path / "meas.csv"
        write_measurements(path, meas)
        head = path.read_text().splitlines()[0]
        assert head == "# geometry 1 32"
        back = read_measurements(path)
        assert back.geometry == meas.geometry
        assert np.allclose(back.values, meas.values)

    def test_roundtrip_2d(self, tmp_path):
        u = gen_disk(16, radius=0.25)
        meas = measure(u, make_mask("disk", 2, GridGeometry(2, 16)))
        path = tmp_path / "meas.csv"
        write_measurements(path, meas)
        back = read_measurements(path)
        assert np.allclose(back.values, meas.values)

    def test_half_spectrum_completed_by_conjugation(self, tmp_path):
        path = tmp_path / "half.csv"
        path.write_text("# geometry 1 8\n0,4.0,0\n1,1.0,-2.0\n")
        back = read_measurements(path)
        g = back.geometry
        assert back.values[g.nat_index(-1)] == pytest.approx(1.0 + 2.0j)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1.0,0.0\n")
        with pytest.raises(ValueError):
            read_measurements(path)
