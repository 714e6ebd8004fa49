import numpy as np
import pytest

from ppgd import (
    DataSet,
    ParseError,
    SyntheticSpec,
    eval_target,
    generate_sample,
    load_csv,
    save_csv,
)
from ppgd.datasets import TARGET_SCALES, load_design_csv


class TestEvalTarget:
    def test_m1_at_origin(self):
        assert eval_target(SyntheticSpec("m1", 0.05), [0, 0, 0, 0]) == 0.0

    def test_m2_at_origin(self):
        assert eval_target(SyntheticSpec("m2", 0.05), [0, 0, 0, 0]) == 3.5

    def test_m1_full_period(self):
        # inner argument is (2 pi / 2) * 1, so the ridge value is sin(pi) = 0
        x = [-0.25, 0.25, -0.25, 0.25]
        assert eval_target(SyntheticSpec("m1", 0.05), x) == pytest.approx(0.0, abs=1e-12)

    def test_direct_formula(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, 4)
        u = -x[0] + x[1] - x[2] + x[3]
        v = (x[0] - 2 * x[1] + 3 * x[2] - 4 * x[3]) / np.sqrt(30.0)
        assert eval_target(SyntheticSpec("m1", 0.05), x) == pytest.approx(
            2 * np.sin(np.pi * u), rel=1e-14
        )
        assert eval_target(SyntheticSpec("m2", 0.05), x) == pytest.approx(
            4 * np.sin(np.pi * u) + 7 / (2 + v), rel=1e-14
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_target(SyntheticSpec("m1", 0.05), [0, 0, 0])

    def test_tau_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SyntheticSpec("m1", 0.05, tau=5.2841)


class TestGenerateSample:
    def test_zero_noise_degenerate(self):
        spec = SyntheticSpec("m1", 0.0)
        data = generate_sample(spec, 50, 123)
        assert np.array_equal(data.ys, eval_target(spec, data.xs))

    def test_design_in_unit_cube(self):
        for seed in range(5):
            data = generate_sample(SyntheticSpec("m2", 0.2), 200, seed)
            assert np.abs(data.xs).max() <= 1.0
            assert data.a_bound == 1.0

    def test_deterministic(self):
        a = generate_sample(SyntheticSpec("m1", 0.05), 100, 99)
        b = generate_sample(SyntheticSpec("m1", 0.05), 100, 99)
        assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)

    @pytest.mark.parametrize("model_id", ["m1", "m2"])
    def test_scale_constant_matches_target_iqr(self, model_id):
        # the stored noise scale reproduces the IQR of the noise-free target
        spec = SyntheticSpec(model_id, 0.0)
        data = generate_sample(spec, 100_000, 2024)
        q75, q25 = np.percentile(data.ys, [75, 25])
        assert q75 - q25 == pytest.approx(TARGET_SCALES[model_id], rel=0.02)

    def test_noise_scale(self):
        # With noise, var(y - m(x)) should be (noise * tau)^2
        spec = SyntheticSpec("m1", 0.2)
        data = generate_sample(spec, 100_000, 7)
        resid = data.ys - eval_target(spec, data.xs)
        assert resid.std() == pytest.approx(0.2 * spec.tau, rel=0.02)
        assert abs(resid.mean()) < 0.01


class TestCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "d.csv"
        data = DataSet([[0.125, -2.0], [1.0, 0.3]], [1.5, -0.25], a_bound=2.0)
        save_csv(data, path)
        back = load_csv(path)
        assert np.array_equal(back.xs, data.xs)
        assert np.array_equal(back.ys, data.ys)
        assert back.a_bound == 2.0

    def test_header_only(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x1,x2,y\n")
        with pytest.raises(ParseError, match="no data rows"):
            load_csv(path)

    def test_short_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x1,x2,x3,y\n0.1,0.2,0.3,1.0\n0.1,0.2,0.3\n")
        with pytest.raises(ParseError, match="line 3"):
            load_csv(path)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x1,y\n0.1,oops\n")
        with pytest.raises(ParseError, match="line 2"):
            load_csv(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ParseError, match="header"):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "absent.csv")

    def test_a_bound_floor_of_one(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x1,y\n0.25,1.0\n")
        assert load_csv(path).a_bound == 1.0

    def test_design_only_loader(self, tmp_path):
        path = tmp_path / "q.csv"
        path.write_text("x1,x2\n0.5,0.25\n-1.0,2.0\n")
        xs = load_design_csv(path)
        assert np.array_equal(xs, [[0.5, 0.25], [-1.0, 2.0]])


class TestDataSetInvariants:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            DataSet([[0.0], [1.0]], [1.0])

    def test_bound_violation(self):
        with pytest.raises(ValueError):
            DataSet([[2.0]], [0.0], a_bound=1.0)

    def test_a_bound_below_one(self):
        with pytest.raises(ValueError):
            DataSet([[0.5]], [0.0], a_bound=0.5)
