import json

import numpy as np
import pytest

import l1paths as lp
from l1paths import SolverConfig, collapse, gen_sine, solve_path
from l1paths import io as pio
from l1paths.cli import main
from oracles import gaussian_instance


@pytest.fixture
def sine_csv(tmp_path):
    target = tmp_path / "sine.csv"
    pio.write_dataset_csv(gen_sine(seed=0), target)
    return target


def solved_path(seed=0):
    design = gaussian_instance(20, 5, seed=seed, correlated=True)
    return design, solve_path(design.expanded(), SolverConfig(mode="lasso"))


class TestDatasetCsv:
    def test_roundtrip_with_header(self, tmp_path):
        data = gen_sine(n=50, seed=1)
        target = tmp_path / "d.csv"
        pio.write_dataset_csv(data, target)
        back = pio.read_dataset_csv(target)
        assert np.array_equal(back.X, data.X)
        assert np.array_equal(back.y, data.y)
        assert back.feature_names == data.feature_names

    def test_headerless_numeric_file(self, tmp_path):
        target = tmp_path / "raw.csv"
        target.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
        data = pio.read_dataset_csv(target)
        assert data.X.shape == (2, 2)
        np.testing.assert_array_equal(data.y, [3.0, 6.0])

    def test_response_column_by_name(self, tmp_path):
        target = tmp_path / "named.csv"
        target.write_text("a,b,c\n1,2,3\n4,5,6\n")
        data = pio.read_dataset_csv(target, response="b")
        np.testing.assert_array_equal(data.y, [2.0, 5.0])
        assert data.feature_names == ["a", "c"]

    def test_malformed_cell_reports_line(self, tmp_path):
        target = tmp_path / "bad.csv"
        target.write_text("a,b\n1,2\n3,oops\n")
        with pytest.raises(lp.DataError, match="line 3"):
            pio.read_dataset_csv(target)

    def test_ragged_row_reports_line(self, tmp_path):
        target = tmp_path / "ragged.csv"
        target.write_text("1,2\n3\n")
        with pytest.raises(lp.DataError, match="line 2"):
            pio.read_dataset_csv(target)


class TestPathSerialization:
    def test_json_roundtrip_bit_for_bit(self, tmp_path):
        _, path = solved_path()
        target = tmp_path / "p.json"
        pio.write_path_json(path, target, metadata={"method": "lasso"})
        back = pio.read_path_json(target)
        assert np.array_equal(back.vertices, path.vertices)
        assert np.array_equal(back.breakpoints, path.breakpoints)
        assert back.segment_active_sets == path.segment_active_sets
        assert [e.kind for e in back.events] == [e.kind for e in path.events]
        assert back.parametrization == path.parametrization

    def test_csv_roundtrip_within_1e15(self, tmp_path):
        _, path = solved_path()
        target = tmp_path / "p.csv"
        pio.write_path_csv(path, target)
        back = pio.read_path_csv(target, parametrization=path.parametrization)
        assert np.max(np.abs(back.vertices - path.vertices)) <= 1e-15 * max(
            1.0, float(np.max(np.abs(path.vertices)))
        )
        np.testing.assert_allclose(back.breakpoints, path.breakpoints, rtol=1e-15)

    def test_original_scale_export_predicts_raw_data(self, tmp_path):
        design, path = solved_path()
        target = tmp_path / "orig.csv"
        pio.write_path_csv_original(path, design, target)
        rows = target.read_text().strip().splitlines()
        assert rows[0] == "ell,coordinate,value"
        last = path.breakpoints[-1]
        tail = [r.split(",") for r in rows if r.startswith(pio.fmt(last))]
        by_name = {r[1]: float(r[2]) for r in tail}
        b, intercept = design.to_original_scale(collapse(path.vertices[-1]))
        assert by_name["intercept"] == pytest.approx(intercept, rel=1e-12)
        for j in range(design.p):
            assert by_name[design.name_of(j)] == pytest.approx(b[j], rel=1e-12)

    def test_schema_version_checked(self, tmp_path):
        target = tmp_path / "v.json"
        target.write_text(json.dumps({"schema_version": 99}))
        with pytest.raises(lp.DataError, match="schema"):
            pio.read_path_json(target)


class TestCli:
    def run(self, capsys, *argv):
        code = main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    def test_solve_single_predictor(self, tmp_path, capsys):
        csv = tmp_path / "one.csv"
        csv.write_text("x,y\n" + "\n".join(
            f"{v},{2 * v + 0.05 * ((i * 7) % 3 - 1)}" for i, v in enumerate(np.linspace(-1, 1, 20))
        ))
        out = tmp_path / "p.json"
        code, stdout, _ = self.run(capsys, "solve", "--input", str(csv),
                                   "--method", "lasso", "--out", str(out))
        assert code == 0
        assert "segments: 1" in stdout
        path = pio.read_path_json(out)
        assert path.n_segments == 1

    def test_solve_sine_lasso_records_drop_event(self, sine_csv, tmp_path, capsys):
        out = tmp_path / "lasso.json"
        code, stdout, _ = self.run(capsys, "solve", "--input", str(sine_csv),
                                   "--method", "lasso", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert "drop" in [e["kind"] for e in doc["events"]]
        assert doc["metadata"]["method"] == "lasso"

    def test_diagnose_compare_detects_mode_difference(self, sine_csv, tmp_path, capsys):
        a, b = tmp_path / "lar.json", tmp_path / "fs0.json"
        assert self.run(capsys, "solve", "--input", str(sine_csv), "--method", "lar",
                        "--out", str(a))[0] == 0
        assert self.run(capsys, "solve", "--input", str(sine_csv), "--method", "fs0",
                        "--out", str(b))[0] == 0
        code, stdout, _ = self.run(capsys, "diagnose", "--compare", "--path", str(a),
                                   "--path-b", str(b), "--index", "norm")
        assert code == 0
        doc = json.loads(stdout.strip().splitlines()[-1])
        assert doc["sup_difference"] > 1e-3
        assert doc["divergence_index"] is not None

    def test_stagewise_step_count_single_predictor(self, tmp_path, capsys):
        # least-squares coefficient 0.37 = 37 steps of 0.01, after which the
        # correlation is driven to rounding level and the run stops
        raw = np.linspace(-1, 1, 24)
        x = (raw - raw.mean()) / np.sqrt(((raw - raw.mean()) ** 2).mean())
        csv = tmp_path / "one.csv"
        csv.write_text("x,y\n" + "\n".join(f"{pio.fmt(v)},{pio.fmt(0.37 * v)}" for v in x))
        out = tmp_path / "st.json"
        code, stdout, _ = self.run(capsys, "stagewise", "--input", str(csv),
                                   "--algorithm", "fs", "--epsilon", "0.01",
                                   "--max-iter", "100000", "--out", str(out))
        assert code == 0
        steps = float(stdout.split("steps: ")[1].splitlines()[0])
        assert abs(steps - 37) <= 1

    def test_stagewise_logistic_monotone_path(self, tmp_path, capsys):
        rng = np.random.Generator(np.random.PCG64(2))
        X = rng.standard_normal((30, 3))
        y = (X @ np.array([2.0, -1.0, 0.5]) > 0).astype(float)
        csv = tmp_path / "log.csv"
        pio.write_dataset_csv(lp.Dataset(X=X, y=y), csv)
        out = tmp_path / "glm.json"
        code, _, _ = self.run(capsys, "stagewise", "--input", str(csv),
                              "--loss", "logistic", "--algorithm", "monotone",
                              "--epsilon", "0.02", "--max-iter", "200",
                              "--out", str(out))
        assert code == 0
        path = pio.read_path_json(out)
        assert np.all(np.diff(path.vertices, axis=0) >= 0.0)

    def test_stagewise_sweep_table(self, tmp_path, capsys):
        design = gaussian_instance(20, 4, seed=5)
        csv = tmp_path / "d.csv"
        pio.write_dataset_csv(lp.Dataset(X=design.Xs, y=design.y_centered), csv)
        code, stdout, _ = self.run(capsys, "stagewise", "--input", str(csv),
                                   "--algorithm", "monotone", "--epsilon", "0.01",
                                   "--max-iter", "4000", "--sweep", "2")
        assert code == 0
        lines = stdout.strip().splitlines()
        idx = lines.index("epsilon,sup_distance")
        d1 = float(lines[idx + 1].split(",")[1])
        d2 = float(lines[idx + 2].split(",")[1])
        assert d2 < d1

    def test_check_monotone_emits_violation_json(self, sine_csv, tmp_path, capsys):
        out = tmp_path / "viol.json"
        code, stdout, _ = self.run(capsys, "check-monotone", "--input", str(sine_csv),
                                   "--subset", "3,9,8", "--signs=-1,1,1",
                                   "--emit-violation", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["passed"] is False
        assert min(doc["vector"]) < 0

    def test_simulate_reproducible_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        code1, out1, _ = self.run(capsys, "simulate", "--kind", "block", "--seed", "4",
                                  "--p", "40", "--n", "20", "--out", str(a))
        code2, out2, _ = self.run(capsys, "simulate", "--kind", "block", "--seed", "4",
                                  "--p", "40", "--n", "20", "--out", str(b))
        assert code1 == code2 == 0
        assert out1.replace(str(a), "OUT") == out2.replace(str(b), "OUT")
        assert a.read_bytes() == b.read_bytes()

    def test_solve_rerun_byte_identical(self, sine_csv, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        _, out1, _ = self.run(capsys, "solve", "--input", str(sine_csv), "--out", str(a))
        _, out2, _ = self.run(capsys, "solve", "--input", str(sine_csv), "--out", str(b))
        assert out1.replace(str(a), "OUT") == out2.replace(str(b), "OUT")
        assert a.read_bytes() == b.read_bytes()

    def test_certify_solved_path_passes(self, sine_csv, tmp_path, capsys):
        out = tmp_path / "p.json"
        self.run(capsys, "solve", "--input", str(sine_csv), "--method", "lasso",
                 "--out", str(out))
        code, stdout, _ = self.run(capsys, "certify", "--input", str(sine_csv),
                                   "--path", str(out))
        assert code == 0
        doc = json.loads(stdout.strip().splitlines()[-1])
        assert doc["passed"] is True

    def test_diagnose_rss_writes_curve(self, sine_csv, tmp_path, capsys):
        p = tmp_path / "p.json"
        self.run(capsys, "solve", "--input", str(sine_csv), "--out", str(p))
        curve = tmp_path / "c.csv"
        code, _, _ = self.run(capsys, "diagnose", "--rss", "--input", str(sine_csv),
                              "--path", str(p), "--index", "norm", "--out", str(curve))
        assert code == 0
        lines = curve.read_text().strip().splitlines()
        assert lines[0] == "index,value,method"
        vals = [float(l.split(",")[1]) for l in lines[1:]]
        assert vals[0] > vals[-1]

    def test_config_file_merge_and_override(self, sine_csv, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"method": "lar", "input": str(sine_csv)}))
        code, stdout, _ = self.run(capsys, "solve", "--config", str(cfg),
                                   "--method", "fs0")
        assert code == 0
        line = stdout.splitlines()[0]
        assert json.loads(line.removeprefix("config: "))["method"] == "fs0"

    def test_unknown_config_key_rejected(self, sine_csv, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"nonsense": 1}))
        code, _, err = self.run(capsys, "solve", "--config", str(cfg),
                                "--input", str(sine_csv))
        assert code == 2
        assert "nonsense" in err

    def test_exit_codes(self, tmp_path, capsys):
        # data error: missing file
        assert self.run(capsys, "solve", "--input", str(tmp_path / "nope.csv"))[0] == 3
        # data error: malformed csv
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,x\n")
        assert self.run(capsys, "solve", "--input", str(bad))[0] == 3
        # solver error: starved step budget
        design = gaussian_instance(20, 5, seed=6)
        good = tmp_path / "good.csv"
        pio.write_dataset_csv(lp.Dataset(X=design.Xs, y=design.y_centered), good)
        assert self.run(capsys, "solve", "--input", str(good), "--max-steps", "1")[0] == 4
        # config error: unknown flag (argparse exits 2)
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--nonsense"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_original_scale_flag(self, sine_csv, tmp_path, capsys):
        out = tmp_path / "orig.csv"
        code, _, _ = self.run(capsys, "solve", "--input", str(sine_csv),
                              "--out", str(out), "--original-scale")
        assert code == 0
        assert "intercept" in out.read_text().splitlines()[1]

    def test_check_monotone_design_only_uses_every_column(self, tmp_path, capsys):
        rng = np.random.Generator(np.random.PCG64(11))
        X = rng.standard_normal((30, 3))
        csv = tmp_path / "pure.csv"
        csv.write_text("a,b,c\n" + "\n".join(
            ",".join(pio.fmt(v) for v in row) for row in X
        ))
        code, stdout, _ = self.run(capsys, "check-monotone", "--input", str(csv),
                                   "--design-only", "--subset", "0,1,2")
        assert code == 0
        doc = json.loads(stdout.strip().splitlines()[-1])
        assert len(doc["vector"]) == 3

    def test_diagnose_mse_with_truth(self, tmp_path, capsys):
        rng = np.random.Generator(np.random.PCG64(12))
        X = rng.standard_normal((40, 3))
        beta = np.array([1.0, -1.0, 0.0])
        data = lp.Dataset(X=X, y=X @ beta)
        train = tmp_path / "train.csv"
        pio.write_dataset_csv(data, train)
        p = tmp_path / "p.json"
        self.run(capsys, "solve", "--input", str(train), "--out", str(p))
        truth = tmp_path / "beta.csv"
        pio.write_vector_csv(beta, truth)
        hold = tmp_path / "hold.csv"
        pio.write_dataset_csv(lp.Dataset(X=rng.standard_normal((200, 3)),
                                         y=np.zeros(200)), hold)
        curve = tmp_path / "mse.csv"
        code, stdout, _ = self.run(capsys, "diagnose", "--mse", "--input", str(train),
                                   "--path", str(p), "--truth", str(truth),
                                   "--holdout", str(hold), "--out", str(curve))
        assert code == 0
        assert "min_value: 0" in stdout or float(
            stdout.split("min_value: ")[1].splitlines()[0]) <= 1e-10

    def test_stagewise_integrate_algorithm(self, tmp_path, capsys):
        rng = np.random.Generator(np.random.PCG64(13))
        X = rng.standard_normal((25, 3))
        y = X @ np.array([1.0, -0.5, 0.2]) + 0.3 * rng.standard_normal(25)
        csv = tmp_path / "d.csv"
        pio.write_dataset_csv(lp.Dataset(X=X, y=y), csv)
        out = tmp_path / "euler.json"
        code, _, _ = self.run(capsys, "stagewise", "--input", str(csv),
                              "--algorithm", "integrate", "--epsilon", "0.02",
                              "--arc-budget", "1.0", "--out", str(out))
        assert code == 0
        path = pio.read_path_json(out)
        assert np.all(np.diff(path.vertices, axis=0) >= 0.0)
        assert path.end >= 1.0 - 1e-9

    def test_certify_rejects_signed_path(self, sine_csv, tmp_path, capsys):
        out = tmp_path / "lar.json"
        self.run(capsys, "solve", "--input", str(sine_csv), "--method", "lar",
                 "--out", str(out))
        code, _, err = self.run(capsys, "certify", "--input", str(sine_csv),
                                "--path", str(out))
        assert code == 3
        assert "non-negative" in err
