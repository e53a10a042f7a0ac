import json

import pytest

from packlab.cli import main
from packlab.fixtures import fixture_path
from packlab.io_render import CIRCLE_HEADER


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _json(path):
    return json.loads(path.read_text())


def test_gen_small_thresholds(work):
    assert main(["gen", "--root-default", "--max-curv", "3", "--out", "a.csv"]) == 0
    lines = (work / "a.csv").read_text().splitlines()
    assert lines[0] == CIRCLE_HEADER and len(lines) == 6
    assert main(["gen", "--root=-1,2,2,3", "--max-curv", "2", "--out", "b.csv"]) == 0
    assert len((work / "b.csv").read_text().splitlines()) == 4
    man = _json(work / "a.csv.manifest.json")
    assert man["subcommand"] == "gen" and man["flags"]["max_curv"] == 3
    assert set(man) >= {"argv", "flags", "seed", "input_hashes", "output_sha256", "tool_version", "wall_time_s"}


def test_gen_invalid_inputs(work, capsys):
    assert main(["gen", "--root", "1,1,1,1", "--max-curv", "10"]) == 2
    assert main(["gen", "--root", "a,b", "--max-curv", "10"]) == 2
    assert main(["gen", "--max-curv", "10"]) == 2
    assert main(["gen", "--root-default", "--max-curv", str(2 ** 62)]) == 3


def test_manifest_goes_to_stderr_without_out(work, capsys):
    assert main(["gen", "--root-default", "--max-curv", "3"]) == 0
    out, err = capsys.readouterr()
    assert out.startswith(CIRCLE_HEADER)
    assert json.loads(err)["subcommand"] == "gen"


def test_fit_exact_square_law(work):
    # curvature k repeated 2k-1 times gives N(t) = t^2 on integer t
    rows = [CIRCLE_HEADER]
    for k in range(1, 257):
        rows += [f"{k},0,0,{1 / k!r},0"] * (2 * k - 1)
    (work / "sq.csv").write_text("\n".join(rows) + "\n")
    assert main(["fit", "--in", "sq.csv", "--tmin", "2", "--tmax", "256", "--per-octave", "1",
                 "--min-points", "5", "--out", "fit.json"]) == 0
    rep = _json(work / "fit.json")
    assert abs(rep["exponent"] - 2) < 1e-9


def test_fit_window_outside_data(work):
    assert main(["gen", "--root-default", "--max-curv", "2000", "--out", "p.csv"]) == 0
    assert main(["fit", "--in", "p.csv", "--tmin", "64", "--tmax", "4000"]) == 2
    assert main(["fit", "--in", "p.csv", "--tmin", "64", "--tmax", "2000", "--out", "f.json"]) == 0
    assert 1.2 < _json(work / "f.json")["exponent"] < 1.45
    assert main(["fit", "--in", "missing.csv", "--tmin", "1", "--tmax", "2"]) == 2


def test_dim_cyclic_and_schottky(work):
    assert main(["dim", "--group", str(fixture_path("cyclic")), "--depth", "6", "--T", "60",
                 "--L-max", "100", "--out", "c.json"]) == 0
    rep = _json(work / "c.json")
    assert abs(rep["box_dimension"]["value"]) < 1e-9
    assert abs(rep["critical_exponent"]["value"]) < 0.05
    assert main(["dim", "--group", str(fixture_path("schottky_f1")), "--depth", "11", "--T", "34",
                 "--out", "s.json"]) == 0
    rep = _json(work / "s.json")
    assert abs(rep["gap"]) <= 0.05 and rep["orbit_complete"]


def test_dim_bad_group(work):
    (work / "g.json").write_text('{"generators": [{"name": "a", "matrix": [[2,0],[0,0],[0,0],[1,0]]}]}')
    assert main(["dim", "--group", "g.json", "--depth", "5"]) == 2


def test_sieve_reports(work):
    assert main(["gen", "--root-default", "--max-curv", "10000", "--out", "p.csv"]) == 0
    assert main(["sieve", "--in", "p.csv", "--max", "1000", "10000", "--factors", "3", "--out", "s.json"]) == 0
    reps = _json(work / "s.json")["reports"]
    assert [r["T"] for r in reps] == [1000, 10000]
    assert reps[0]["prime_count"] <= reps[1]["prime_count"]
    assert set(reps[0]["almost_prime_counts"]) == {"1", "2", "3"}


def test_crtest_requires_seed_and_discriminates(work):
    assert main(["cr-test", "--pair", str(fixture_path("pair_twisted"))]) == 2
    assert main(["cr-test", "--pair", str(fixture_path("pair_twisted")), "--seed", "1", "--out", "t.json"]) == 0
    assert main(["cr-test", "--pair", str(fixture_path("pair_conjugate")), "--seed", "1", "--out", "c.json"]) == 0
    assert _json(work / "t.json")["violating_fraction"] > 0
    assert _json(work / "c.json")["violating_fraction"] == 0
    assert _json(work / "t.json.manifest.json")["seed"] == 1


def test_joint_below_bound(work):
    assert main(["joint", "--pair", str(fixture_path("pair_same")), "--T", "34", "--out", "j.json"]) == 0
    rep = _json(work / "j.json")
    assert 0 < rep["value"] < 1.414 and rep["below_bound"]
    assert main(["joint", "--pair", str(fixture_path("pair_same")), "--o", "0,0,-1"]) == 2


def test_render(work):
    assert main(["gen", "--root-default", "--max-curv", "50", "--out", "p.csv"]) == 0
    assert main(["render", "--in", "p.csv", "--out", "p.svg"]) == 0
    assert (work / "p.svg").read_text().startswith("<?xml")
    assert main(["render", "--in", "p.csv", "--viewport", "0,1,0,1", "--out", "q.svg"]) == 0
    assert main(["render", "--in", "p.csv", "--viewport", "0,1"]) == 2


def test_replay_and_tampered_input(work):
    assert main(["gen", "--root-default", "--max-curv", "500", "--out", "p.csv", "--threads", "1"]) == 0
    assert main(["replay", "p.csv.manifest.json", "--threads", "3", "--out", "q.csv"]) == 0
    assert (work / "p.csv").read_bytes() == (work / "q.csv").read_bytes()
    assert main(["sieve", "--in", "p.csv", "--max", "500", "--out", "s.json"]) == 0
    (work / "p.csv").write_text((work / "p.csv").read_text() + "\n")
    assert main(["replay", "s.json.manifest.json"]) == 2


def test_threads_env_fallback(work, monkeypatch):
    monkeypatch.setenv("PACKLAB_THREADS", "2")
    assert main(["gen", "--root-default", "--max-curv", "100", "--out", "p.csv"]) == 0
    monkeypatch.setenv("PACKLAB_THREADS", "many")
    assert main(["gen", "--root-default", "--max-curv", "100", "--out", "p.csv"]) == 2
