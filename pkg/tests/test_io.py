import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma import catalog, io
from phigamma.construction import same_filtered
from phigamma.errors import ParseError, ValidationError
from phigamma.filtered import invariants_tn_th
from phigamma.robba import LogRobbaElement, PrecisionProfile, atom

PROFILE = PrecisionProfile()


def test_module_file_parses_with_invariants(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(io.dumps(io.module_to_json(catalog.diagonal_flag(2))))
    D = io.parse(str(path))
    assert invariants_tn_th(D) == (1, 1)


def test_singular_phi_names_the_matrix():
    obj = {"p": 2, "dim": 2, "phi": [["1", "1"], ["1", "1"]]}
    with pytest.raises(ValidationError, match="phi"):
        io.parse(obj, kind="module")


def test_q_series_file():
    f = io.parse({"profile": {"p": 2}, "coeffs": {"0": "2", "1": "1"}})
    assert f == atom("q_level", PROFILE, 1)


def test_bad_rational_is_located():
    with pytest.raises(ParseError, match=r"phi\[0\]\[1\]"):
        io.parse({"p": 2, "dim": 2, "phi": [["1", "x"], ["0", "1"]]}, kind="module")


def test_float_is_refused():
    with pytest.raises(ParseError):
        io.parse({"p": 2, "dim": 1, "phi": [[0.5]]}, kind="module")


def test_exponent_outside_window():
    with pytest.raises(ValidationError, match="window"):
        io.parse({"profile": {"kmax": 16}, "coeffs": {"40": "1"}})


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "p": 2,\n  "dim": \n}')
    with pytest.raises(ParseError, match="line 4"):
        io.parse(str(path))


def test_log_series_and_t_denominator():
    f = io.parse({"coeffs": [{"0": "1"}, {"1": "1/2"}], "lx_degree": 1, "t_denominator": 1})
    assert isinstance(f, LogRobbaElement)
    assert f.degree == 1
    back = io.parse(io.series_to_json(f))
    assert (back - f).is_zero()


def test_candidate_file():
    x, prof = io.parse({"profile": {"p": 2, "T": 6}, "vector": [{"coeffs": {"0": "1"}}, {"coeffs": {"0,1": "3"}}]})
    assert prof.T == 6
    assert x[1] == atom("t", prof).scale(3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_module_round_trip(seed, p):
    D = catalog.random_module(random.Random(seed), p)
    text = json.dumps(io.module_to_json(D))
    E = io.parse(json.loads(text), kind="module")
    assert E.phi == D.phi and E.nmat == D.nmat and same_filtered(E, D)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_series_round_trip(seed):
    f = catalog.random_element(random.Random(seed), PROFILE, negative=True)
    assert io.parse(json.loads(io.dumps(io.series_to_json(f)))) == f


@given(st.fractions(max_denominator=10 ** 6))
def test_rational_strings_round_trip(q):
    assert io.rational(io.fmt(q), "x") == q
