"""JSON encodings for symbols, boundary functions, right-hand sides and reports.

Rationals are written as ``"p/q"`` strings so symbols round-trip exactly.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .catalog import BUILTINS
from .errors import RHError
from .laurent import LaurentPoly, QI, SymbolMatrix
from .spaces import BoundaryFunction, ConstrainedFunction

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class ParseError(RHError, ValueError):
    pass


def _rational(s: Any, where: str) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str) or not _RATIONAL.match(s.strip()):
        raise ParseError(f"{where}: expected a rational string 'p/q', got {s!r}")
    f = Fraction(s.strip())
    return f


def _rational_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def poly_to_json(p: LaurentPoly) -> dict:
    return {"terms": [{"k": k, "re": _rational_str(c.re), "im": _rational_str(c.im)} for k, c in p.items()]}


def poly_from_json(d: Any, where: str = "entry") -> LaurentPoly:
    if not isinstance(d, dict) or not isinstance(d.get("terms"), list):
        raise ParseError(f"{where}: expected an object with a 'terms' list")
    coeffs: dict[int, QI] = {}
    for t, term in enumerate(d["terms"]):
        w = f"{where}.terms[{t}]"
        if not isinstance(term, dict) or not isinstance(term.get("k"), int):
            raise ParseError(f"{w}: needs an integer 'k'")
        c = QI(_rational(term.get("re", "0"), w + ".re"), _rational(term.get("im", "0"), w + ".im"))
        coeffs[term["k"]] = coeffs.get(term["k"], QI(0)) + c
    return LaurentPoly(coeffs)


def symbol_to_json(G: SymbolMatrix) -> dict:
    return {"n": G.n_rows, "entries": [[poly_to_json(e) for e in row] for row in G.rows]}


def symbol_from_json(d: Any) -> SymbolMatrix:
    if not isinstance(d, dict) or not isinstance(d.get("n"), int) or not isinstance(d.get("entries"), list):
        raise ParseError("symbol: expected {'n': int, 'entries': [[...]]}")
    n = d["n"]
    rows = d["entries"]
    if len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ParseError(f"symbol: entries must be an {n}x{n} array")
    return SymbolMatrix([[poly_from_json(e, f"entries[{i}][{j}]") for j, e in enumerate(r)]
                         for i, r in enumerate(rows)])


def function_to_json(v: BoundaryFunction) -> dict:
    meta = {"k": v.k, "alpha": v.alpha}
    if v.is_exact:
        return {"kind": "laurent", **poly_to_json(v.laurent), **meta}
    data = np.empty(2 * len(v.samples))
    data[0::2] = v.samples.real
    data[1::2] = v.samples.imag
    return {"kind": "sampled", "p": v.grid_exponent, "data": data.tolist(), **meta}


def function_from_json(d: Any, where: str = "function") -> BoundaryFunction:
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected an object")
    meta = {"k": int(d.get("k", 0)), "alpha": float(d.get("alpha", 0.5))}
    kind = d.get("kind")
    if kind == "laurent":
        return BoundaryFunction.exact(poly_from_json(d, where), **meta)
    if kind == "sampled":
        p, data = d.get("p"), d.get("data")
        if not isinstance(p, int) or not isinstance(data, list) or len(data) != 2 ** (p + 1):
            raise ParseError(f"{where}: sampled payload needs 'p' and 2**(p+1) interleaved doubles")
        arr = np.asarray(data, dtype=float)
        return BoundaryFunction.sampled(arr[0::2] + 1j * arr[1::2], **meta)
    raise ParseError(f"{where}: 'kind' must be 'laurent' or 'sampled'")


def rhs_to_json(rhs: list[ConstrainedFunction]) -> dict:
    return {"components": [{"m": c.m, "core": function_to_json(c.core)} for c in rhs]}


def rhs_from_json(d: Any) -> list[ConstrainedFunction]:
    """Either ``{"components": [{"m", "core"}]}`` or a single ``{"m", "core"}``."""
    if isinstance(d, dict) and "components" in d:
        comps = d["components"]
    elif isinstance(d, dict) and "core" in d:
        comps = [d]
    else:
        raise ParseError("right-hand side: expected {'components': [...]} or {'m': .., 'core': ..}")
    out = []
    for i, c in enumerate(comps):
        if not isinstance(c, dict) or not isinstance(c.get("m"), int):
            raise ParseError(f"components[{i}]: needs integer 'm'")
        out.append(ConstrainedFunction(c["m"], function_from_json(c.get("core"), f"components[{i}].core")))
    return out


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def load_symbol(ref: str) -> SymbolMatrix:
    """A path to a symbol file, or ``@name`` for a built-in."""
    if ref.startswith("@"):
        name = ref[1:]
        if name not in BUILTINS:
            raise ParseError(f"unknown built-in {ref!r}; choose from {', '.join('@' + k for k in sorted(BUILTINS))}")
        return BUILTINS[name]()
    return symbol_from_json(load_json(ref))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if v != v:
            return "nan"
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return float(f"{v:.12g}")
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, Fraction):
        return _rational_str(x)
    if isinstance(x, QI):
        return {"re": _rational_str(x.re), "im": _rational_str(x.im)}
    if isinstance(x, LaurentPoly):
        return poly_to_json(x)
    if isinstance(x, SymbolMatrix):
        return symbol_to_json(x)
    return x


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, floats rounded to 12 significant digits."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
