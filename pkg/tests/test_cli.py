import io
import json

import numpy as np
import pytest

from ispukit import save_model
from ispukit.cli import main

from conftest import random_binary_model, random_float_model
from test_dense import trivial_model


@pytest.fixture
def run(monkeypatch, capsys):
    def _run(args, stdin_text=""):
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin_text))
        code = main(args)
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture
def uniform_model_path(tmp_path):
    path = tmp_path / "uniform.ispu-model"
    save_model(trivial_model(), path)
    return str(path)


@pytest.fixture
def float_2_64_path(tmp_path):
    rng = np.random.default_rng(31)
    path = tmp_path / "f264.ispu-model"
    save_model(random_float_model(rng, (64, 64)), path)
    return str(path)


@pytest.fixture
def binary_1_32_path(tmp_path):
    rng = np.random.default_rng(32)
    path = tmp_path / "b132.ispu-model"
    save_model(random_binary_model(rng, (32,))[0], path)
    return str(path)


def gen_args(script, seed=7, extra=()):
    return ["gen", "--seed", str(seed), "--script", script, *extra]


class TestGen:
    def test_deterministic(self, run):
        code1, out1, _ = run(gen_args("idle:640,move:640"))
        code2, out2, _ = run(gen_args("idle:640,move:640"))
        assert code1 == code2 == 0
        assert out1 == out2

    def test_row_count(self, run):
        code, out, err = run(gen_args("idle:640,move:640"))
        lines = out.strip().split("\n")
        assert code == 0
        assert lines[0] == "index,x,y,z,label"
        assert len(lines) == 1281
        assert "1280 acquisitions" in err

    def test_empty_script(self, run):
        code, out, _ = run(["gen", "--script", ""])
        assert code == 0
        assert out == "index,x,y,z,label\n"

    def test_invalid_script_usage_error(self, run):
        code, _, err = run(gen_args("fly:100"))
        assert code == 2
        assert "invalid script" in err

    def test_no_label_flag(self, run):
        code, out, _ = run(gen_args("idle:32", extra=("--no-label",)))
        assert code == 0
        assert out.split("\n")[0] == "index,x,y,z"

    def test_out_file(self, run, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(gen_args("idle:64", extra=("--out", str(path))))
        assert code == 0
        assert "64 acquisitions" in out   # summary moves to stdout with --out
        assert path.read_text().startswith("index,x,y,z,label\n")

    def test_json_summary_mode(self, run, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(
            gen_args("idle:96", extra=("--out", str(path), "--format", "json"))
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["acquisitions"] == 96 and doc["seed"] == 7


class TestFeatures:
    def _stream(self, run, script, seed=7, labeled=True):
        extra = () if labeled else ("--no-label",)
        _, out, _ = run(gen_args(script, seed=seed, extra=extra))
        return out

    def test_96_rows_two_windows(self, run):
        stream = self._stream(run, "idle:96")
        code, out, _ = run(["features"], stdin_text=stream)
        lines = out.strip().split("\n")
        assert code == 0
        assert len(lines) == 3   # header + 2 windows

    def test_63_rows_zero_windows_exit_zero(self, run):
        stream = self._stream(run, "idle:63")
        code, out, _ = run(["features"], stdin_text=stream)
        assert code == 0
        assert len(out.strip().split("\n")) == 1

    def test_column_count_31_unlabeled(self, run):
        stream = self._stream(run, "idle:96", labeled=False)
        code, out, _ = run(["features"], stdin_text=stream)
        header = out.split("\n")[0].split(",")
        assert code == 0
        assert len(header) == 31
        assert header[0] == "f00" and header[-1] == "window_index"

    def test_label_passthrough_when_labeled(self, run):
        stream = self._stream(run, "move:128")
        code, out, _ = run(["features"], stdin_text=stream)
        header = out.split("\n")[0].split(",")
        assert code == 0
        assert header[-1] == "label"
        assert out.strip().split("\n")[1].split(",")[-1] == "4"

    def test_malformed_row_names_line(self, run):
        bad = "index,x,y,z\n0,1,2,3\n1,zap,2,3\n"
        code, _, err = run(["features"], stdin_text=bad)
        assert code == 3
        assert "line 3" in err

    def test_missing_header_rejected(self, run):
        code, _, err = run(["features"], stdin_text="0,1,2,3\n")
        assert code == 3
        assert "header" in err


class TestInfer:
    def test_uniform_model_all_point_two(self, run, uniform_model_path):
        _, stream, _ = run(gen_args("idle:128"))
        code, out, err = run(
            ["infer", "--model", uniform_model_path], stdin_text=stream
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("window_index,label,prob0")
        for line in lines[1:]:
            probs = [float(v) for v in line.split(",")[2:7]]
            assert probs == [0.2] * 5
        assert "inferences" in err

    def test_accepts_feature_dump_input(self, run, uniform_model_path):
        _, stream, _ = run(gen_args("idle:128"))
        _, feats, _ = run(["features"], stdin_text=stream)
        code, out, _ = run(["infer", "--model", uniform_model_path], stdin_text=feats)
        assert code == 0
        assert len(out.strip().split("\n")) == len(feats.strip().split("\n"))

    def test_repeat_invocation_identical(self, run, float_2_64_path):
        _, stream, _ = run(gen_args("move:256,idle:256"))
        outs = set()
        for _ in range(2):
            code, out, _ = run(["infer", "--model", float_2_64_path], stdin_text=stream)
            assert code == 0
            outs.add(out)
        assert len(outs) == 1

    def test_float_2_64_summary_numbers(self, run, float_2_64_path):
        _, stream, _ = run(gen_args("idle:128"))
        code, _, err = run(["infer", "--model", float_2_64_path], stdin_text=stream)
        assert code == 0
        assert "reported MACs: 6732" in err
        assert "NN latency: 14.366 ms" in err
        assert "total latency: 20.936 ms" in err
        assert "energy: 90.0 uJ" in err

    def test_clock_flag_halves_latency(self, run, float_2_64_path):
        _, stream, _ = run(gen_args("idle:128"))
        code, _, err = run(
            ["infer", "--model", float_2_64_path, "--clock", "10"], stdin_text=stream
        )
        assert code == 0
        assert "NN latency: 7.183 ms" in err

    def test_non_catalog_model_warns_and_omits_latency(self, run, tmp_path):
        rng = np.random.default_rng(33)
        path = tmp_path / "odd.ispu-model"
        save_model(random_float_model(rng, (16,)), path)
        _, stream, _ = run(gen_args("idle:128"))
        code, _, err = run(["infer", "--model", str(path)], stdin_text=stream)
        assert code == 0
        assert "not in the calibration catalog" in err
        assert "NN latency" not in err

    def test_missing_model_file(self, run):
        code, _, _ = run(["infer", "--model", "/nonexistent.ispu-model"],
                         stdin_text="index,x,y,z\n")
        assert code == 3

    def test_discontinuous_stream_is_mismatch(self, run, uniform_model_path):
        stream = "index,x,y,z\n0,0,0,0\n5,0,0,0\n"
        code, _, _ = run(["infer", "--model", uniform_model_path], stdin_text=stream)
        assert code == 4

    def test_json_document_carries_cost_and_rows(self, run, binary_1_32_path):
        _, stream, _ = run(gen_args("rotate:128"))
        code, out, _ = run(
            ["infer", "--model", binary_1_32_path, "--format", "json"],
            stdin_text=stream,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["cost"]["reported_macs"] == 1328
        assert doc["inferences"] == len(doc["classifications"]) == 3
        assert all(len(c["probabilities"]) == 5 for c in doc["classifications"])


class TestCost:
    def test_all_matches_published_table(self, run):
        code, out, _ = run(["cost", "--all"])
        assert code == 0
        rows = out.strip().split("\n")[1:]
        macs = [int(r.split()[1]) for r in rows]
        assert macs == [290, 1324, 2508, 2412, 6732, 3500,
                        304, 1328, 2640, 2416, 6864, 3504, 208272]

    def test_binary_4_256_deployable(self, run):
        code, out, _ = run(["cost", "--arch", "Binary_4,256"])
        assert code == 0
        assert "reported MACs:       208272" in out
        assert "deployable:       yes" in out

    def test_float_4_256_not_deployable(self, run):
        code, out, _ = run(["cost", "--arch", "Float_4,256"])
        assert code == 0
        assert "deployable:       no" in out

    def test_unknown_arch_lists_names(self, run):
        code, _, err = run(["cost", "--arch", "Quantized_9,99"])
        assert code == 2
        assert "Binary_4,256" in err

    def test_explicit_width_list(self, run):
        code, out, _ = run(["cost", "--kind", "float", "--hidden", "64,64"])
        assert code == 0
        assert "reported MACs:       6732" in out

    def test_json_reports(self, run):
        code, out, _ = run(["cost", "--all", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["reports"]) == 13
        assert doc["reports"][4]["energy_uj"] == pytest.approx(90.0)
        assert doc["power_mw"] == pytest.approx(4.2988, abs=1e-3)

    def test_power_override_scales_energy(self, run):
        code, out, _ = run(
            ["cost", "--arch", "Float_2,64", "--power", "8.597594736896406",
             "--format", "json"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["reports"][0]["energy_uj"] == pytest.approx(180.0, rel=1e-6)


class TestBench:
    def test_digests_identical_and_count_matches(self, run, binary_1_32_path, tmp_path):
        stream_path = tmp_path / "s.csv"
        run(gen_args("move:320", extra=("--out", str(stream_path))))
        code, out, _ = run(
            ["bench", "--model", binary_1_32_path, "--in", str(stream_path),
             "--repeat", "2", "--format", "json"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["digests_identical"] is True
        assert doc["inferences"] == 320 // 32 - 1
        assert doc["inferences_per_second"] >= 1.0
        assert "host measurement" in doc["note"]


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, run, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"script": "idle:64", "seed": 5}))
        _, out_cfg, _ = run(["gen", "--config", str(config)])
        _, out_ref, _ = run(["gen", "--seed", "5", "--script", "idle:64"])
        assert out_cfg == out_ref
        # explicit flag beats the config value
        _, out_flag, _ = run(["gen", "--config", str(config), "--seed", "6"])
        _, out_ref6, _ = run(["gen", "--seed", "6", "--script", "idle:64"])
        assert out_flag == out_ref6


class TestUsage:
    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_bad_clock_rejected(self):
        with pytest.raises(SystemExit) as err:
            main(["cost", "--arch", "Float", "--clock", "7"])
        assert err.value.code == 2
