import json

import pytest

from phigamma import catalog, io
from phigamma.cli import main, span_name
from phigamma.robba import PrecisionProfile, atom


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, D in (("flag", catalog.diagonal_flag(2)), ("bad", catalog.diagonal_bad_flag(2)),
                    ("mono", catalog.monodromy_pair(2))):
        out[name] = tmp_path / f"{name}.json"
        out[name].write_text(io.dumps(io.module_to_json(D)))
    out["t"] = tmp_path / "t.series"
    out["t"].write_text(io.dumps(io.series_to_json(atom("t", PrecisionProfile()))))
    prof = io.profile_to_json(PrecisionProfile())
    out["e"] = tmp_path / "e.json"
    out["e"].write_text(json.dumps({"profile": prof, "vector": [{"coeffs": {"0": "1"}}, {"coeffs": {}}]}))
    out["te"] = tmp_path / "te.json"
    out["te"].write_text(json.dumps({"profile": prof, "vector": [{"coeffs": {"0,1": "1"}}, {"coeffs": {}}]}))
    return {k: str(v) for k, v in out.items()}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_analyze_bad_flag(files, capsys):
    code, out = run(capsys, "analyze", files["bad"])
    assert code == 0
    assert "admissible: false; witness: span(e); slopes: [-1, 1]" in out.out


def test_analyze_json(files, capsys):
    code, out = run(capsys, "analyze", files["flag"], "--json")
    report = json.loads(out.out)
    assert report["admissible"] is True and report["slopes"] == ["0", "0"]
    assert report["t_N"] == 1


def test_ord_of_t(files, capsys):
    code, out = run(capsys, "ord", files["t"])
    assert code == 0 and out.out.strip() == "ord = 1 (window-limited)"


def test_construct_and_recover(files, capsys):
    code, out = run(capsys, "construct", files["flag"])
    assert code == 0 and "det slope: 0" in out.out
    code, out = run(capsys, "recover", files["bad"], "--json")
    report = json.loads(out.out)
    assert code == 0 and report["matches_input"] is True
    assert io.module_from_json(report["module"]).phi == catalog.diagonal_bad_flag(2).phi


def test_iota_json_is_deterministic(files, capsys):
    _, first = run(capsys, "iota", files["t"], "--level", "2", "--json")
    _, second = run(capsys, "iota", files["t"], "--level", "2", "--json")
    assert first.out == second.out
    assert json.loads(first.out)["start"] == 1


def test_membership_exit_codes(files, capsys):
    assert run(capsys, "membership", files["flag"], files["e"])[0] == 0
    code, out = run(capsys, "membership", files["flag"], files["te"])
    assert code == 1 and "cond3 index 0: fail" in out.out


def test_failures_and_usage(files, capsys):
    code, out = run(capsys, "construct", files["mono"])
    assert code == 1 and "Unsupported" in out.err
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "analyze", "/nonexistent.json")[0] == 2
    assert run(capsys, "analyze", files["flag"], "--p", "3")[0] == 2
    assert run(capsys, "construct", files["flag"], "--x-window", "oops")[0] == 2


def test_window_too_small_is_a_failure(files, capsys):
    code, out = run(capsys, "construct", files["flag"], "--x-window=-8:4", "--t-prec", "2")
    assert code == 1 and "kmax" in out.err
    code, _ = run(capsys, "construct", files["flag"], "--x-window=-8:4", "--t-prec", "2", "--auto-window")
    assert code == 0


def test_span_names():
    assert span_name([[1, 0]], 2) == "span(e)"
    assert span_name([[1, -2]], 2) == "span(e - 2f)"
    assert span_name([[0, 1, 3]], 3) == "span(f + 3g)"
