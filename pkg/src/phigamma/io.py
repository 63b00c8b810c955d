"""JSON formats for modules, series and candidate vectors.

Rationals are always strings ("3/4").  Matrices are lists of rows with the
column convention phi[i][j] = coefficient of e_i in phi(e_j).  Series keys
are "k" for X^k or "k,j" for X^k t^j.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, ValidationError
from .filtered import FilteredModule, validate
from .robba import LogRobbaElement, PrecisionProfile, RobbaElement

PROFILE_KEYS = ("p", "P", "kmin", "kmax", "T", "n0", "n1")


def rational(s, where):
    if isinstance(s, bool):
        raise ParseError(f"{where}: expected a rational string, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ParseError(f"{where}: expected a rational string, got {s!r}")
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {s!r} is not a rational ({exc})") from None


def fmt(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _matrix(raw, d, name):
    if not isinstance(raw, list) or len(raw) != d or any(not isinstance(r, list) or len(r) != d for r in raw):
        raise ParseError(f"{name}: expected a {d}x{d} matrix")
    return [[rational(x, f"{name}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(raw)]


def _load(source):
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


# ---------------------------------------------------------------- modules

def module_from_json(obj):
    for key in ("p", "dim", "phi"):
        if key not in obj:
            raise ParseError(f"module: missing field {key!r}")
    p, d = obj["p"], obj["dim"]
    if not isinstance(p, int) or p < 2 or not isinstance(d, int) or d < 0:
        raise ParseError("module: p must be a prime and dim a nonnegative integer")
    phi = _matrix(obj["phi"], d, "phi")
    nmat = _matrix(obj.get("N", [["0"] * d for _ in range(d)]), d, "N")
    filt = []
    for k, step in enumerate(obj.get("filtration", [])):
        if "jump" not in step or "generators" not in step:
            raise ParseError(f"filtration[{k}]: needs 'jump' and 'generators'")
        gens = []
        for g_i, g in enumerate(step["generators"]):
            if not isinstance(g, list) or len(g) != d:
                raise ParseError(f"filtration[{k}].generators[{g_i}]: expected a vector of length {d}")
            gens.append([rational(x, f"filtration[{k}].generators[{g_i}]") for x in g])
        filt.append((int(step["jump"]), gens))
    D = FilteredModule(p, phi, nmat, filt)
    bad = validate(D)
    if bad:
        raise ValidationError("; ".join(f"{v.rule} ({v.witness})" for v in bad))
    return D


def module_to_json(D):
    return {
        "p": D.p,
        "dim": D.dim,
        "phi": [[fmt(x) for x in row] for row in D.phi],
        "N": [[fmt(x) for x in row] for row in D.nmat],
        "filtration": [{"jump": j, "generators": [[fmt(x) for x in g] for g in gens]}
                       for j, gens in D.filtration],
    }


# ---------------------------------------------------------------- series

def profile_from_json(obj, defaults=None):
    base = dict(vars(defaults)) if defaults is not None else {}
    for key in PROFILE_KEYS:
        if key in obj:
            if not isinstance(obj[key], int):
                raise ParseError(f"profile.{key}: expected an integer")
            base[key] = obj[key]
    try:
        return PrecisionProfile(**base)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"profile: {exc}") from None


def profile_to_json(profile):
    return {k: getattr(profile, k) for k in PROFILE_KEYS}


def _terms(raw, where, profile):
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected a map exponent -> rational string")
    terms = {}
    for key, val in raw.items():
        parts = key.split(",")
        try:
            k = int(parts[0])
            j = int(parts[1]) if len(parts) > 1 else 0
        except ValueError:
            raise ParseError(f"{where}: bad exponent key {key!r}") from None
        if len(parts) > 2:
            raise ParseError(f"{where}: bad exponent key {key!r}")
        if not profile.kmin <= k <= profile.kmax:
            raise ValidationError(f"{where}: exponent {k} outside the window [{profile.kmin}, {profile.kmax}]")
        terms[(k, j)] = rational(val, f"{where}[{key!r}]")
    return terms


def series_from_json(obj, defaults=None):
    """RobbaElement, or LogRobbaElement when lx_degree / t_denominator are present."""
    profile = profile_from_json(obj.get("profile", {}), defaults or PrecisionProfile())
    if "coeffs" not in obj:
        raise ParseError("series: missing field 'coeffs'")
    m = obj.get("t_denominator", 0)
    raw = obj["coeffs"]
    if "lx_degree" in obj:
        g = obj["lx_degree"]
        if not isinstance(raw, list) or len(raw) != g + 1:
            raise ParseError(f"series: lx_degree {g} needs a list of {g + 1} coefficient maps")
        parts = [RobbaElement(profile, _terms(c, f"coeffs[{i}]", profile)).shift_t(-m)
                 for i, c in enumerate(raw)]
        return LogRobbaElement(profile, parts)
    el = RobbaElement(profile, _terms(raw, "coeffs", profile)).shift_t(-m)
    return el


def series_to_json(f, with_profile=True):
    def one(x):
        return {(f"{k}" if j == 0 else f"{k},{j}"): fmt(c) for (k, j), c in sorted(x.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))}

    out = {"profile": profile_to_json(f.profile)} if with_profile else {}
    if isinstance(f, LogRobbaElement):
        out["lx_degree"] = f.degree
        out["coeffs"] = [one(c) for c in f.coeffs]
    else:
        out["coeffs"] = one(f)
    return out


def candidate_from_json(obj, defaults=None):
    profile = profile_from_json(obj.get("profile", {}), defaults or PrecisionProfile())
    if "vector" not in obj or not isinstance(obj["vector"], list):
        raise ParseError("candidate: missing list field 'vector'")
    prof_json = profile_to_json(profile)
    return [series_from_json({**s, "profile": prof_json}) for s in obj["vector"]], profile


def parse(source, kind=None, defaults=None):
    """Dispatch on content: a module file, a series file or a candidate file."""
    obj = _load(source)
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    kind = kind or ("module" if "phi" in obj else "candidate" if "vector" in obj else "series")
    if kind == "module":
        return module_from_json(obj)
    if kind == "candidate":
        return candidate_from_json(obj, defaults)
    if kind == "series":
        return series_from_json(obj, defaults)
    raise ValueError(f"unknown kind {kind!r}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)
