import json

import numpy as np
import pytest

from biasedcube.cli import (
    RunConfig,
    config_from_args,
    build_parser,
    emit_function,
    load_input,
    main,
    run_report,
)
from biasedcube.cube_core import Bias, BiasedFunction


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


# ---------------------------------------------------------------------------
# loaders
# ---------------------------------------------------------------------------

def test_load_function_reals(tmp_path):
    path = write(tmp_path, "dict.fn", "1 0.5\n0 1\n")
    f = load_input(path, "function")
    assert f.n == 1 and f.bias.p == 0.5
    assert list(f.values) == [0.0, 1.0]


def test_load_function_hex(tmp_path):
    # hex 8 = 1000 in bits 3..0: the AND indicator on two coordinates
    path = write(tmp_path, "and.fn", "2 0.3\n8\n")
    f = load_input(path, "function")
    assert list(f.values) == [0.0, 0.0, 0.0, 1.0]


def test_load_function_errors(tmp_path):
    with pytest.raises(ValueError, match="header"):
        load_input(write(tmp_path, "a.fn", "1\n0 1\n"), "function")
    with pytest.raises(ValueError, match=":2"):
        load_input(write(tmp_path, "b.fn", "1 0.5\n0 x\n"), "function")
    with pytest.raises(ValueError, match="tokens"):
        load_input(write(tmp_path, "c.fn", "2 0.5\n0 1 0\n"), "function")
    with pytest.raises(ValueError, match="digits"):
        load_input(write(tmp_path, "d.fn", "3 0.5\nff0\n"), "function")
    with pytest.raises(ValueError, match="p must"):
        load_input(write(tmp_path, "e.fn", "1 1.5\n0 1\n"), "function")


def test_function_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    f = BiasedFunction(3, Bias(0.37), rng.normal(size=8))
    path = write(tmp_path, "rt.fn", emit_function(f))
    g = load_input(path, "function")
    assert g.n == f.n and g.bias.p == f.bias.p
    assert np.array_equal(g.values, f.values)


def test_load_family_star(tmp_path):
    path = write(tmp_path, "star.fam", "5 2\n1 2\n1 3\n1 4\n1 5\n")
    fam = load_input(path, "family")
    assert fam.n == 5 and fam.k == 2 and len(fam) == 4
    assert all(m & 1 for m in fam.edges)


def test_load_family_errors(tmp_path):
    with pytest.raises(ValueError, match="exactly 2"):
        load_input(write(tmp_path, "a.fam", "4 2\n1 2 3\n"), "family")
    with pytest.raises(ValueError, match="increasing"):
        load_input(write(tmp_path, "b.fam", "4 2\n2 1\n"), "family")
    with pytest.raises(ValueError, match="out of range"):
        load_input(write(tmp_path, "c.fam", "4 2\n3 5\n"), "family")


def test_load_hypergraph(tmp_path):
    path = write(tmp_path, "g.hg", "4\n1 2\n2 3 4\n")
    g = load_input(path, "hypergraph")
    assert g.num_edges == 2
    assert g.max_edge_size == 3


def test_load_rvset(tmp_path):
    path = write(tmp_path, "z.rv", "-1 0.5 1 0.5\n-0.5 0.8 2.0 0.2\n")
    rvs = load_input(path, "rvset")
    assert len(rvs) == 2
    assert rvs[0].mean() == pytest.approx(0.0)
    assert rvs[1].variance() == pytest.approx(1.0)
    assert rvs[1].sigma == pytest.approx(1.0)
    with pytest.raises(ValueError, match="pairs"):
        load_input(write(tmp_path, "bad.rv", "1 0.5 2\n"), "rvset")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def test_transform_dictator(tmp_path, capsys):
    path = write(tmp_path, "dict.fn", "1 0.5\n0 1\n")
    code, rep = run_json(capsys, ["transform", path])
    assert code == 0
    assert rep["command"] == "transform"
    spectrum = {tuple(row["set"]): row["coeff"] for row in rep["result"]["spectrum"]}
    assert spectrum[()] == pytest.approx(0.5)
    assert spectrum[(1,)] == pytest.approx(0.5)  # sigma at p = 1/2


def test_influence_command(tmp_path, capsys):
    path = write(tmp_path, "and.fn", "2 0.3\n8\n")
    code, rep = run_json(capsys, ["influence", path])
    assert code == 0
    assert rep["result"]["expectation"] == pytest.approx(0.09)
    assert rep["result"]["total"] > 0


def test_families_turan_json(tmp_path, capsys):
    path = write(tmp_path, "m2.hg", "4\n1 2\n3 4\n")
    code, rep = run_json(capsys, ["families", "turan", path,
                                  "--k", "2", "--n", "5"])
    assert code == 0
    assert rep["result"]["value"] == 4
    assert rep["command"] == "families turan"


def test_families_cover_and_critical(tmp_path, capsys):
    path = write(tmp_path, "p3.hg", "4\n1 2\n2 3\n3 4\n")
    code, rep = run_json(capsys, ["families", "cover", path])
    assert code == 0
    assert rep["result"]["tau"] == 2 and rep["result"]["cc"] == 2
    code, rep = run_json(capsys, ["families", "critical", path])
    assert code == 0
    assert rep["result"]["critical"]


def test_families_expand_compress_shadow_junta(tmp_path, capsys):
    hg = write(tmp_path, "e.hg", "2\n1 2\n")
    code, rep = run_json(capsys, ["families", "expand", hg, "--k", "4"])
    assert code == 0
    assert rep["result"]["edges"] == [[1, 2, 3, 4]]

    fam = write(tmp_path, "f.fam", "3 1\n2\n")
    code, rep = run_json(capsys, ["families", "compress", fam,
                                  "--i", "1", "--j", "2"])
    assert code == 0
    assert rep["result"]["edges"] == [[1]]

    fam2 = write(tmp_path, "g.fam", "4 2\n1 2\n3 4\n")
    code, rep = run_json(capsys, ["families", "shadow", fam2, "--ell", "1"])
    assert code == 0
    assert rep["result"]["edges"] == [[1], [2], [3], [4]]

    star = write(tmp_path, "s.fam", "8 3\n" + "".join(
        f"1 {a} {b}\n" for a in range(2, 9) for b in range(a + 1, 9)))
    code, rep = run_json(capsys, ["families", "junta", star, "--beta", "0.5"])
    assert code == 0
    assert rep["result"]["junta"] == [1]
    assert rep["result"]["residual"]["size"] == 0


def test_families_pseudo(tmp_path, capsys):
    fam = write(tmp_path, "c.fam", "5 2\n" + "".join(
        f"{a} {b}\n" for a in range(1, 6) for b in range(a + 1, 6)))
    code, rep = run_json(capsys, ["families", "pseudo", fam, "--a", "1",
                                  "--r", "1", "--eps", "1.0", "--delta", "1.0"])
    assert code == 0
    assert rep["result"]["global"]["holds"]
    assert rep["result"]["uncapturable"]["holds"]


def test_explore_boost(tmp_path, capsys):
    path = write(tmp_path, "dict.fn", "3 0.3\n0 1 0 1 0 1 0 1\n")
    code, rep = run_json(capsys, ["explore-boost", path, "--max-size", "2"])
    assert code == 0
    rows = rep["result"]["rows"]
    assert rows[1]["set"] == [1]
    assert rows[1]["mu_boosted"] == pytest.approx(1.0)


def test_verify_hc_small(capsys):
    code, rep = run_json(capsys, ["verify-hc", "--seed", "42",
                                  "--max-n", "6", "--per-combo", "1"])
    assert code == 0
    assert rep["violations"] == []
    assert rep["cases_run"] > 0
    assert rep["seed"] == 42


def test_verify_es_small(capsys):
    code, rep = run_json(capsys, ["verify-es", "--seed", "7", "--cases", "10"])
    assert code == 0
    assert rep["cases_run"] == 10


def test_verify_inv_small(capsys):
    code, rep = run_json(capsys, ["verify-inv", "--seed", "11",
                                  "--cases", "5", "--max-n", "4"])
    assert code == 0
    assert rep["cases_run"] == 5


def test_verify_threshold_small(capsys):
    code, rep = run_json(capsys, ["verify-threshold", "--seed", "5",
                                  "--cases", "3", "--pairs", "4",
                                  "--max-n", "6"])
    assert code == 0
    assert rep["cases_run"] == 12
    assert rep["hypothesis_satisfied"]["prop"] == 12


def test_corpus_suite_small(capsys):
    code, rep = run_json(capsys, ["corpus-suite", "--seed", "3",
                                  "--max-n", "6", "--per-combo", "1"])
    assert code == 0
    sat = rep["hypothesis_satisfied"]
    assert sat["global_hc"] == rep["cases_run"]
    assert sat["equiv/converse"] > 0
    assert sat["equiv/rem"] > 0


# ---------------------------------------------------------------------------
# exit codes, determinism, replay
# ---------------------------------------------------------------------------

def test_exit_codes():
    assert main(["no-such-command"]) == 2
    assert main(["transform", "/nonexistent/path.fn"]) == 2


def test_exit_budget(tmp_path, capsys):
    path = write(tmp_path, "m2.hg", "4\n1 2\n3 4\n")
    code = main(["families", "turan", path, "--k", "3", "--n", "10"])
    capsys.readouterr()
    assert code == 3


def test_injected_violation_exits_one(capsys):
    code, rep = run_json(capsys, ["verify-hc", "--seed", "42", "--max-n", "4",
                                  "--per-combo", "1", "--inject-violation"])
    assert code == 1
    assert any(v["check"] == "synthetic" for v in rep["violations"])


def test_seed_required_for_corpus_commands():
    assert main(["verify-hc"]) == 2


def test_determinism(capsys):
    argv = ["corpus-suite", "--seed", "9", "--max-n", "5", "--per-combo", "1"]
    code1, rep1 = run_json(capsys, argv)
    code2, rep2 = run_json(capsys, argv)
    assert code1 == code2 == 0
    rep1.pop("wall_time")
    rep2.pop("wall_time")
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_replay_single_case(capsys):
    code, rep = run_json(capsys, ["verify-es", "--seed", "7", "--cases", "10",
                                  "--replay", "4"])
    assert code == 0
    assert rep["cases_run"] == 1


def test_text_format(capsys):
    code = main(["verify-es", "--seed", "7", "--cases", "2",
                 "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0
    assert "violations: 0" in out


def test_config_validation():
    with pytest.raises(ValueError, match="seed"):
        RunConfig(command="verify-hc", seed=None)
    with pytest.raises(ValueError, match="format"):
        RunConfig(command="transform", fmt="yaml")


def test_env_threads(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("BIASEDCUBE_THREADS", "2")
    path = write(tmp_path, "dict.fn", "1 0.5\n0 1\n")
    code, rep = run_json(capsys, ["transform", path])
    assert code == 0
    assert rep["params"]["threads"] == 2
    monkeypatch.setenv("BIASEDCUBE_THREADS", "zero")
    assert main(["transform", path]) == 2
