import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from gdiscord import NormalFormCM, embed_normal_form
from gdiscord.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **kw):
    return runner.invoke(main, args, catch_exceptions=False, **kw)


class TestDiscordCommand:
    def test_worked_state(self, runner):
        res = invoke(runner, [
            "discord", "--normal-form", "5,2,2.449489743,-2.449489743",
        ])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert out["in_family"] is True
        assert abs(out["numeric"]["discord"] - 0.950067) < 1e-6
        assert abs(out["closed_form"]["discord"] - 0.950067) < 1e-6
        assert out["agreement_delta"] < 1e-6

    def test_out_of_family_still_reports_numeric(self, runner):
        res = invoke(runner, ["discord", "--normal-form", "2,2,1,-0.5"])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert out["in_family"] is False
        assert out["closed_form"] is None
        assert out["numeric"]["discord"] > 0

    def test_state_json_input(self, runner, tmp_path):
        payload = {"normal_form": {"a": 2, "b": 2, "c": 1, "cp": 1}}
        path = tmp_path / "state.json"
        path.write_text(json.dumps(payload))
        res = invoke(runner, ["discord", "--state", str(path)])
        assert res.exit_code == 0
        assert abs(json.loads(res.output)["numeric"]["discord"] - 0.459148) < 1e-5

    def test_not_bona_fide_exits_2(self, runner):
        res = invoke(runner, ["discord", "--normal-form", "2,2,2,-2"])
        assert res.exit_code == 2
        assert res.stderr.startswith("error: validation:")

    def test_requires_exactly_one_input(self, runner):
        res = invoke(runner, ["discord"])
        assert res.exit_code == 2

    def test_unknown_flag_is_error(self, runner):
        res = runner.invoke(main, ["discord", "--bogus", "1"])
        assert res.exit_code == 2

    def test_tolerance_env_override(self, runner):
        # nu_min = 1 - 1e-8: rejected at the default 1e-9, accepted at 1e-6
        state = json.dumps({"normal_form": {"a": 1.0 - 1e-8, "b": 1, "c": 0, "cp": 0}})
        args = ["condition", "--state", state, "--measurement", '{"u": 1}']
        strict = invoke(runner, args)
        assert strict.exit_code == 2
        loose = invoke(runner, args, env={"GDISCORD_TOLERANCE": "1e-6"})
        assert loose.exit_code == 0


class TestDecomposeCommand:
    def test_family_member(self, runner):
        res = invoke(runner, ["decompose", "--normal-form", "5,2,2.449489742783178,-2.449489742783178"])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert abs(out["tau"] - 2.0) < 1e-9
        assert abs(out["eta"] - 1.0) < 1e-9
        assert out["sign"] == 1

    def test_out_of_family_exits_3(self, runner):
        res = invoke(runner, ["decompose", "--normal-form", "2,2,1,-0.5"])
        assert res.exit_code == 3
        assert res.stderr.startswith("error: out-of-family:")


class TestClassifyCommand:
    def test_lossy(self, runner):
        res = invoke(runner, ["classify", "--tau", "0.5", "--eta", "0.6"])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert out["label"] == "C_lossy"
        assert abs(out["omega"] - 1.2) < 1e-9
        assert abs(out["n_bar"] - 0.1) < 1e-9

    def test_boundary_quantum_limited(self, runner):
        res = invoke(runner, ["classify", "--tau", "2", "--eta", "1"])
        out = json.loads(res.output)
        assert out["label"] == "C_amplifier"
        assert out["quantum_limited"] is True

    def test_invalid_params_exit_2(self, runner):
        res = invoke(runner, ["classify", "--tau", "0.5", "--eta", "0.1"])
        assert res.exit_code == 2


class TestSampleCommand:
    def test_csv_and_grid(self, runner, tmp_path):
        csv_path = tmp_path / "points.csv"
        grid_path = tmp_path / "grid.json"
        res = invoke(runner, [
            "sample", "--a", "2", "--b", "2", "--n", "2000", "--seed", "42",
            "--out", str(csv_path), "--grid-out", str(grid_path), "--bins", "50",
        ])
        assert res.exit_code == 0
        lines = csv_path.read_text().strip().split("\n")
        assert lines[0] == "a,b,c,cp,r,tau,eta,sign"
        assert len(lines) == 2001
        grid = json.loads(grid_path.read_text())
        assert len(grid["grid"]) == 50
        assert grid["redraws"] == 0
        assert 0 < grid["coverage_fraction"] < 1

    def test_byte_identical_runs(self, runner, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path, threads in zip(paths, ("1", "3")):
            res = invoke(runner, [
                "sample", "--a", "2", "--b", "4", "--n", "5000", "--seed", "7",
                "--threads", threads, "--out", str(path),
            ])
            assert res.exit_code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_stdout_output(self, runner):
        res = invoke(runner, ["sample", "--a", "1.5", "--b", "1.5", "--n", "3", "--seed", "0"])
        assert res.exit_code == 0
        assert res.output.startswith("a,b,c,cp,r,tau,eta,sign\n")
        assert len(res.output.strip().split("\n")) == 4


class TestConditionCommand:
    def test_epr_heterodyne(self, runner):
        V = embed_normal_form(NormalFormCM(2, 2, math.sqrt(3), -math.sqrt(3)))
        res = invoke(runner, [
            "condition",
            "--state", json.dumps({"cm": V.tolist()}),
            "--measurement", json.dumps({"u": 1.0, "phi": 0.0}),
            "--outcome", "1,0.5",
        ])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert np.allclose(out["cm"], np.eye(2), atol=1e-9)
        expect = (math.sqrt(3) / 3) * np.array([1.0, -0.5])
        assert np.allclose(out["mean"], expect, atol=1e-9)

    def test_homodyne_tag(self, runner):
        V = embed_normal_form(NormalFormCM(3, 3, math.sqrt(8), -math.sqrt(8)))
        res = invoke(runner, [
            "condition",
            "--state", json.dumps({"normal_form": {"a": 3, "b": 3, "c": math.sqrt(8), "cp": -math.sqrt(8)}}),
            "--measurement", json.dumps({"u": "inf"}),
        ])
        assert res.exit_code == 0
        out = json.loads(res.output)
        assert np.allclose(out["cm"], np.diag([3.0, 1 / 3.0]), atol=1e-9)

    def test_mode_a(self, runner):
        res = invoke(runner, [
            "condition",
            "--state", json.dumps({"normal_form": {"a": 5, "b": 2, "c": 2.449489742783178, "cp": -2.449489742783178}}),
            "--measurement", json.dumps({"u": 1.0}),
            "--mode", "A",
        ])
        assert res.exit_code == 0
        out = json.loads(res.output)
        # B-mode conditional CM: b - c^2/(a+1) on the diagonal
        assert np.allclose(out["cm"], np.diag([1.0, 1.0]), atol=1e-9)

    def test_malformed_json_exit_2(self, runner):
        res = invoke(runner, [
            "condition", "--state", "{not json", "--measurement", '{"u": 1}',
        ])
        assert res.exit_code == 2


class TestVerifyCommand:
    def test_quick_suite_passes(self, runner):
        res = invoke(runner, ["verify", "--quick"])
        assert res.exit_code == 0
        assert res.output.count("PASS") == 9
        assert "9/9 checks passed" in res.output
