from __future__ import annotations

import json
import subprocess
import sys

import pytest

from braided.cli import main
from braided.exact_core import parse_scalar


def run(capsys, *argv):
    code = main(["--format", "structured", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_flip(capsys):
    code, doc = run(capsys, "verify-braiding", "--preset", "flip:2")
    assert code == 0
    assert doc["passed"]
    assert doc["results"]["Tr C"] == "2"
    assert doc["results"]["bi_rank"] == [2, 0]


def test_verify_standard_reports_trace(capsys):
    code, doc = run(capsys, "verify-braiding", "--preset", "std:d=2")
    assert code == 0
    assert doc["results"]["Tr C"] == "(q^2 + 1)/q^3"
    names = [c["check"] for c in doc["checks"]]
    assert names == ["QYBE", "Hecke", "skew-inverse", "extended QYBE", "embedding-invariance",
                     "Tr C = (m-n)_q / q^(m-n)", "psi-inverse"]


def test_verify_wrong_q_fails(capsys):
    code, doc = run(capsys, "verify-braiding", "--preset", "std:2", "--q", "2")
    assert code == 1
    hecke = [c for c in doc["checks"] if c["check"] == "Hecke"][0]
    assert not hecke["passed"]


def test_corrupted_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    path.write_text('{"dim": 2,\n "entries": [{"k":1,"l":1,"i":1,"j":1,"value":"q*"}]}')
    code, doc = run(capsys, "verify-braiding", "--file", str(path))
    assert code == 2
    assert doc["error"]["line"] == 2
    assert "unexpected end of input" in doc["error"]["message"]


def test_non_braiding_file_is_reported(tmp_path, capsys):
    path = tmp_path / "r.json"
    path.write_text('{"dim": 2, "entries": [{"k":1,"l":1,"i":1,"j":1,"value":"1"}]}')
    code, doc = run(capsys, "verify-braiding", "--file", str(path))
    assert code == 1
    assert any(c["check"] == "skew-invertible" and not c["passed"] for c in doc["checks"])


def test_ph_series_golden(capsys):
    code, doc = run(capsys, "ph-series", "--preset", "flip:2", "--kmax", "4")
    assert code == 0
    assert doc["results"]["series"] == {
        "bi_rank": [2, 0],
        "dims_minus": [1, 2, 1, 0, 0],
        "dims_plus": [1, 2, 3, 4, 5],
        "p_minus": {"D": "1", "N": "1 + 2*t + t^2"},
        "series_identity": True,
    }
    assert [c["check"] for c in doc["checks"]] == ["P_+(t) P_-(-t) = 1", "reciprocal", "mountain"]


def test_ph_series_superflip(capsys):
    code, doc = run(capsys, "ph-series", "--preset", "superflip:1|1", "--kmax", "5")
    assert code == 0
    assert doc["results"]["series"]["p_minus"] == {"D": "1 - t", "N": "1 + t"}


def test_kmax_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("BRAIDED_KMAX", "3")
    _, doc = run(capsys, "ph-series", "--preset", "std:2")
    assert doc["results"]["kmax"] == 3
    monkeypatch.setenv("BRAIDED_KMAX", "many")
    code, doc = run(capsys, "ph-series", "--preset", "std:2")
    assert code == 2


@pytest.mark.parametrize("argv, key, value", [
    (["--algebra", "uu2", "--op", "Dx", "--on", "y*z"], "oracle", "1/2*h"),
    (["--algebra", "uu2", "--op", "Delta", "--on", "mu^2 : k=0"], "oracle", "-24"),
    (["--algebra", "weyl:P:m=2", "--op", "d_1^1", "--on", "n_1^2*n_2^1"], "oracle", "h"),
])
def test_act(capsys, argv, key, value):
    code, doc = run(capsys, "act", *argv)
    assert code == 0
    assert doc["results"][key] == value


def test_act_runs_both_paths(capsys):
    _, doc = run(capsys, "act", "--algebra", "uu2", "--op", "Q", "--on", "Cas : k=1")
    assert doc["results"]["paths"] == ["closed form", "oracle"]
    # Q(Cas b) = (3 Cas + h^2/4) b with Cas = (h^2 - mu^2)/4
    assert parse_scalar(doc["results"]["closed_form"]["f"]) == parse_scalar("h^2 - 3/4*mu^2")
    assert doc["checks"][0]["passed"]


def test_act_odd_mu_uses_closed_form_only(capsys):
    code, doc = run(capsys, "act", "--algebra", "uu2", "--op", "Q", "--on", "mu : k=0")
    assert code == 0
    assert doc["results"]["paths"] == ["closed form"]


def test_act_input_errors(capsys):
    assert run(capsys, "act", "--algebra", "uu2", "--op", "Foo", "--on", "x")[0] == 2
    assert run(capsys, "act", "--algebra", "uu2", "--op", "Dx", "--on", "x : j=2")[0] == 2
    assert run(capsys, "act", "--algebra", "nope", "--op", "x", "--on", "x")[0] == 2


def test_centrality(capsys):
    code, doc = run(capsys, "centrality", "--algebra", "uu2", "--kmax", "3")
    assert code == 0 and len(doc["checks"]) == 3
    code, doc = run(capsys, "centrality", "--algebra", "re", "--kmax", "2")
    assert code == 0


def test_lb_flat(capsys):
    code, doc = run(capsys, "lb", "--phi", "1", "--k", "0", "--apply", "mu^2")
    assert code == 0
    assert doc["results"]["image"] == {"g": "24", "k": 0}
    assert doc["results"]["invariant basis"] == {"Dt": "-4/h", "L0": "1", "L1": "-1", "id": "4/h^2"}


def test_lb_schwarzschild(capsys):
    code, doc = run(capsys, "lb", "--phi", "1 - rg/r", "--k", "0")
    assert code == 0
    assert doc["results"]["display (r-hat)"] == {
        "dt2": "r/(r - rg)",
        "Q2": "rg/r^3",
        "Q": "0",
        "Qdt": "-1/2*h*rg/r^3",
        "Lap": "(1/12*h^2*rg - r^3)/r^3",
    }
    assert doc["results"]["alpha(classical) = display under"] == ["paper"]


def test_lb_degenerate_metric(capsys):
    code, doc = run(capsys, "lb", "--phi", "0")
    assert code == 2
    assert "degenerate metric" in doc["error"]["message"]


def test_lb_lattice(capsys):
    _, doc = run(capsys, "lb", "--phi", "1", "--lattice", "3")
    assert doc["results"]["lattice"]
    assert all(set(row) == {"from", "to", "coeff"} for row in doc["results"]["lattice"])


def test_alpha_command(capsys):
    code, doc = run(capsys, "alpha", "--poly", "x^2", "--convention", "paper")
    assert code == 0
    assert doc["results"]["alpha"] == "x*x + 1/12*h^2"
    assert doc["results"]["alpha(Q^2) display"]["holds_under"] == ["paper"]


def test_reports_are_deterministic(capsys):
    docs = []
    for _ in range(2):
        _, doc = run(capsys, "lb", "--phi", "1 - rg/r", "--k", "1", "--apply", "t*mu^2")
        doc.pop("timing_seconds")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_text_format(capsys):
    assert main(["verify-braiding", "--preset", "flip:2"]) == 0
    out = capsys.readouterr().out
    assert "PASS QYBE" in out and "status: pass" in out


def test_usage_errors(capsys):
    assert main(["verify-braiding"]) == 2
    assert main(["no-such-command"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "braided", "act", "--algebra", "uu2", "--op", "Dx", "--on", "x"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "oracle: 1" in proc.stdout


def test_ph_series_needs_hecke(capsys):
    code, doc = run(capsys, "ph-series", "--preset", "std:2", "--q", "2")
    assert code == 1
    assert doc["checks"][0]["check"] == "Hecke"


def test_file_without_q_defaults_to_one(tmp_path, capsys):
    entries = [{"k": k, "l": l, "i": l, "j": k, "value": "1"} for k in (1, 2) for l in (1, 2)]
    path = tmp_path / "flip.json"
    path.write_text(json.dumps({"dim": 2, "entries": entries}))
    code, doc = run(capsys, "verify-braiding", "--file", str(path))
    assert code == 0
    assert doc["results"]["braiding"]["q"] == "1"
    assert doc["results"]["bi_rank"] == [2, 0]
    assert any("q = 1" in n for n in doc["notes"])
