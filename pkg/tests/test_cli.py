import json
import subprocess
import sys

import pytest

from racg_hecke import cli


@pytest.fixture
def systems(tmp_path):
    def write(name, gens, comm):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps({"generators": list(gens), "commuting": [list(c) for c in comm]}))
        return str(p)

    return {
        "a2": write("a2", "stu", [("s", "t")]),
        "free4": write("free4", "stuv", []),
        "reducible": write("reducible", "stu", [("s", "t"), ("s", "u")]),
        "square": write("square", "stuv", [("s", "u")]),
    }


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    env = json.loads(out)
    assert env["exit_code"] == code and env["tool"] == "racg-hecke" and env["schema_version"] == 1
    return code, env


def test_factoriality_envelope(systems, capsys):
    code, env = run_json(["factoriality", "--system", systems["a2"], "--q", "[0.5, 0.5, 0.5]"], capsys)
    assert code == 0 and env["command"] == "factoriality"
    assert "result" in env and "error" not in env


def test_factoriality_rejects_reducible(systems, capsys):
    code, env = run_json(["factoriality", "--system", systems["reducible"], "--q", "0.5"], capsys)
    assert code == 2 and env["error"]["type"] == "hypothesis"


def test_growth_text_matches_closed_form(systems, capsys):
    code, out, _ = run(["growth", "--system", systems["free4"], "--q", "0.25", "--max-len", "6",
                        "--format", "text"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1].startswith("# status:")
    for line in lines[:-1]:
        n, c = line.split(";")
        n, c = int(n), float(c)
        expected = 1.0 if n == 0 else 4 * 3 ** (n - 1) / 4**n
        assert c == pytest.approx(expected, rel=1e-12)


def test_characters_text_csv(systems, capsys):
    code, out, _ = run(["characters", "--system", systems["a2"], "--a", "[0.1, 0.2, 0.3]",
                        "--max-len", "2", "--format", "text"], capsys)
    assert code == 0
    rows = dict(line.split(";") for line in out.strip().splitlines())
    assert float(rows["e"]) == 1.0
    assert float(rows["s"]) == pytest.approx(0.1)
    assert float(rows["tu"]) == pytest.approx(0.06)


def test_spherical(systems, capsys):
    code, env = run_json(["spherical", "--system", systems["free4"], "--d", "3"], capsys)
    assert code == 0 and env["result"]["C"] == []


@pytest.mark.parametrize("suite", cli.SUITES)
def test_every_suite_passes(systems, capsys, suite):
    code, env = run_json(["verify", suite, "--system", systems["a2"], "--seed", "3", "--radius", "4"], capsys)
    assert code == 0 and env["result"]["n_violations"] == 0


def test_violations_exit_one(systems, capsys, monkeypatch):
    from racg_hecke import iwahori

    original = iwahori._cell_left

    def broken(system, d, s, x, radius):
        out = original(system, d, s, x, radius)
        return out + iwahori.IwahoriElement.cell((), 1)

    monkeypatch.setattr(iwahori, "_cell_left", broken)
    code, env = run_json(["verify", "iwahori", "--system", systems["a2"], "--d", "2", "--radius", "3"], capsys)
    assert code == 1 and env["result"]["n_violations"] > 0


def test_capacity_exit_three(systems, capsys):
    code, env = run_json(["verify", "hecke-relations", "--system", systems["free4"], "--radius", "40"], capsys)
    assert code == 3 and env["error"]["type"] == "capacity"


@pytest.mark.parametrize("argv", [
    ["verify", "nonsense", "--system", "X"],
    ["growth"],
])
def test_argparse_usage_exit(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 64


@pytest.mark.parametrize("extra", [
    ["--q", "[0.5]"],
    ["--q", "{\"s\": 0.5}"],
    ["--q", "not json"],
    ["--q", "0.5", "--d", "3"],
    ["--d", "1"],
    ["--q", "[2, -1, 0.5]"],
])
def test_bad_input_exit(systems, capsys, extra):
    code, env = run_json(["factoriality", "--system", systems["a2"], *extra], capsys)
    assert code == 64 and env["error"]["message"]


def test_missing_system_file(capsys, tmp_path):
    code, env = run_json(["factoriality", "--system", str(tmp_path / "none.json"), "--q", "0.5"], capsys)
    assert code == 64


def test_seed_determinism(systems, capsys):
    argv = ["verify", "eigenvectors", "--system", systems["square"], "--seed", "11", "--radius", "4"]
    _, first = run_json(argv, capsys)
    _, second = run_json(argv, capsys)
    assert first["result"] == second["result"]


def test_module_entry_point(systems):
    proc = subprocess.run([sys.executable, "-m", "racg_hecke", "growth", "--system", systems["free4"],
                           "--q", "0.5", "--max-len", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["sphere_sums"][1] == pytest.approx(2.0)
