from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from parabolic_nf.cli import RunConfig, InputError, emit_json, main, profile, run
from parabolic_nf.surface import Surface


def call(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def bad_surface(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(Surface.from_terms(4, {(3, 1): 1}).to_json()))
    return str(path)


def test_validate_bad_surface(bad_surface, capsys):
    code, out, _ = call(["validate", "--input", bad_surface], capsys)
    report = json.loads(out)
    assert code == 1 and not report["valid"]
    assert report["violations"][0]["kind"] == "lagrangian" and report["violations"][0]["where"] == 4


def test_validate_good_surface(capsys):
    code, out, _ = call(["validate", "--degree", "9"], capsys)
    assert code == 0 and json.loads(out)["valid"]


def test_bad_surface_is_input_error_for_every_command(bad_surface, capsys):
    for cmd in ("involutions", "normalize", "linearize", "perturb"):
        code, _, err = call([cmd, "--input", bad_surface, "--degree", "6"], capsys)
        assert code == 1, cmd
        assert "lagrangian" in err


def test_normalize_r_star_8(capsys):
    code, out, _ = call(["normalize", "--degree", "8", "--epsilon", "1/2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["residual_degree"] == 9 and data["normalized"]
    assert [d["k"] for d in data["degrees"]] == list(range(2, 9))


def test_involutions_report(capsys):
    code, out, _ = call(["involutions", "--degree", "6"], capsys)
    assert code == 0 and json.loads(out)["certification"]["ok"]


def test_linearize_report(capsys):
    code, out, _ = call(["linearize", "--degree", "7"], capsys)
    data = json.loads(out)
    assert code == 0 and data["trunc"] == 7 and len(data["KA_y0"]) == 8


def test_certify_small_and_csv(capsys):
    code, out, _ = call(["certify-divergence", "--degree", "32"], capsys)
    data = json.loads(out)
    assert code == 0 and data["pass"] and data["N"] == 32
    assert [row["n"] for row in data["table"]] == list(range(2, 33))
    code, out, _ = call(["certify-divergence", "--degree", "32", "--format", "csv"], capsys)
    assert len(out.splitlines()) == 1 + 31


def test_certify_failing_certificate_exit_3(capsys):
    # at N = 16 the window estimate is not yet stable
    code, out, _ = call(["certify-divergence", "--degree", "16"], capsys)
    assert code == 3 and not json.loads(out)["pass"]


def test_perturb_outcomes(capsys):
    code, out, _ = call(["perturb", "--seed-degrees", "5,7", "--epsilon", "1"], capsys)
    assert code == 3 and json.loads(out)["degree"] == 7
    code, out, _ = call(["perturb", "--seed-degrees", "5", "--epsilon", "1"], capsys)
    assert code == 0 and json.loads(out)["steps"][0]["perturbed"]


@pytest.mark.parametrize("argv", [
    ["normalize", "--degree", "3"],
    ["normalize", "--epsilon", "0"],
    ["normalize", "--epsilon", "x/2"],
    ["normalize", "--input", "/nonexistent/file.json"],
    ["perturb", "--seed-degrees", "7,5"],
    ["certify-divergence", "--input", "whatever.json"],
    ["no-such-command"],
])
def test_input_errors_exit_1(argv, capsys):
    code, _, _ = call(argv, capsys)
    assert code == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "normalize", "degree": 6, "epsilon": "1/3"}))
    code, out, _ = call(["normalize", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["trunc"] == 6
    cfg.write_text(json.dumps({"command": "normalize", "degree": 6, "colour": "blue"}))
    code, _, err = call(["normalize", "--config", str(cfg)], capsys)
    assert code == 1 and "colour" in err


def test_thread_env_override(monkeypatch, capsys):
    monkeypatch.setenv("PARABOLIC_NF_THREADS", "3")
    code, out1, _ = call(["certify-divergence", "--degree", "20"], capsys)
    monkeypatch.setenv("PARABOLIC_NF_THREADS", "bad")
    code_bad, _, _ = call(["certify-divergence", "--degree", "20"], capsys)
    assert code_bad == 1
    monkeypatch.delenv("PARABOLIC_NF_THREADS")
    _, out2, _ = call(["certify-divergence", "--degree", "20", "--threads", "1"], capsys)
    assert out1 == out2


def test_internal_errors_map_to_exit_2(monkeypatch):
    import parabolic_nf.cli as cli_mod
    from parabolic_nf.errors import ConsistencyError

    def boom(cfg):
        raise ConsistencyError("routes disagree", 7)

    monkeypatch.setitem(cli_mod.HANDLERS, "normalize", boom)
    assert run(RunConfig("normalize", degree=6), io.StringIO()) == 2


def test_runconfig_validation():
    with pytest.raises(InputError):
        RunConfig("normalize", degree=2)
    with pytest.raises(InputError):
        RunConfig("normalize", epsilon="-1/2")
    cfg = RunConfig("certify-divergence")
    assert cfg.degree == 48 and cfg.epsilon == 1
    assert RunConfig("normalize").degree == 12


def test_emit_json_is_canonical():
    assert emit_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}\n'


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code = main(["validate", "--degree", "6", "--output", str(target)])
    assert code == 0 and json.loads(target.read_text())["valid"]


def test_profile_table():
    table = profile(degree=8, certify_degree=20)
    assert [p["phase"] for p in table["phases"]] == ["parse", "involutions", "normalize", "certify"]
    bits = [b["bits"] for b in table["bitsize"]]
    # growth trend, not a strict bound: the top half never falls below the bottom half
    half = len(bits) // 2
    assert min(bits[half:]) >= max(bits[:half])
    again = profile(degree=8, certify_degree=20, threads=4)
    assert again["result_hash"] == table["result_hash"]


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "parabolic_nf.cli", "validate", "--degree", "6"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]
