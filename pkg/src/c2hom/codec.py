"""JSON codecs for engine values.

Wire formats (matrices are row-major integer arrays):

* base ring      {"kind": "Z"} | {"kind": "Zmod", "m": 4}
* module         {"base": ..., "gens": 2, "rels": [[2, 0], [0, 3]]}
* Mackey functor {"me": module, "mfix": module,
                  "res": matrix, "tr": matrix, "w": matrix}
* complex        {"window": [lo, hi], "terms": {"0": functor, ...},
                  "diffs": {"1": {"fe": matrix, "ffix": matrix}},
                  "weight": w?}
* slice table    {"range": [a, b], "rho": {"0": functor, ...},
                  "even": bool, "very_even": bool}

Encoding is canonical: sorted keys, compact separators, no volatile
fields, so identical values serialize to identical bytes.  Decoding
validates shapes and raises SchemaError naming the offending field;
malformed JSON raises ParseError carrying the character position.
"""

from __future__ import annotations

import json
from typing import Any, Dict

from .errors import ParseError, SchemaError
from .homalg import MackeyComplex, validate_complex
from .mackey import MackeyFunctor, MackeyHom
from .slices import SliceTable
from .zlin import BaseRing, FgModule, ModuleHom, intmat, zeros


# ---------------------------------------------------------------------------
# encoding


def _matrix_out(mat) -> list:
    return [[int(v) for v in row] for row in mat]


def encode_base(b: BaseRing) -> dict:
    if b.is_modular:
        return {"kind": "Zmod", "m": b.modulus}
    return {"kind": "Z"}


def encode_module(m: FgModule) -> dict:
    return {"base": encode_base(m.base), "gens": m.gens,
            "rels": _matrix_out(m.rels)}


def encode_mackey(m: MackeyFunctor) -> dict:
    return {
        "me": encode_module(m.me),
        "mfix": encode_module(m.mfix),
        "res": _matrix_out(m.res.matrix),
        "tr": _matrix_out(m.tr.matrix),
        "w": _matrix_out(m.w.matrix),
    }


def encode_complex(c: MackeyComplex) -> dict:
    out: Dict[str, Any] = {
        "window": list(c.window),
        "terms": {str(d): encode_mackey(t) for d, t in c.terms.items()},
        "diffs": {str(d): {"fe": _matrix_out(h.fe.matrix),
                           "ffix": _matrix_out(h.ffix.matrix)}
                  for d, h in c.diffs.items()},
    }
    if c.weight is not None:
        out["weight"] = c.weight
    return out


def encode_slice_table(t: SliceTable) -> dict:
    return {
        "range": list(t.range),
        "rho": {str(n): encode_mackey(m) for n, m in t.entries.items()},
        "even": t.even,
        "very_even": t.very_even,
    }


_ENCODERS = [
    (SliceTable, encode_slice_table),
    (MackeyComplex, encode_complex),
    (MackeyFunctor, encode_mackey),
    (FgModule, encode_module),
    (BaseRing, encode_base),
]


def encode_value(v) -> dict:
    for cls, fn in _ENCODERS:
        if isinstance(v, cls):
            return fn(v)
    raise SchemaError(f"no encoder for {type(v).__name__}")


def dumps(v, pretty: bool = False) -> str:
    obj = encode_value(v) if not isinstance(v, (dict, list)) else v
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# decoding


def _expect(obj, field, types, where):
    if field not in obj:
        raise SchemaError(f"missing field '{where}{field}'", field=field)
    v = obj[field]
    if not isinstance(v, types):
        raise SchemaError(f"field '{where}{field}' has wrong type",
                          field=field)
    return v


def _matrix_in(rows, nrows, ncols, where):
    if not isinstance(rows, list):
        raise SchemaError(f"'{where}' must be an array of rows", field=where)
    if len(rows) != nrows:
        raise SchemaError(f"'{where}' needs {nrows} rows, got {len(rows)}",
                          field=where)
    for i, r in enumerate(rows):
        if not isinstance(r, list) or (ncols is not None and len(r) != ncols):
            raise SchemaError(f"row {i} of '{where}' has wrong length",
                              field=where)
        if not all(isinstance(x, int) for x in r):
            raise SchemaError(f"row {i} of '{where}' has non-integer entries",
                              field=where)
    if nrows and rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise SchemaError(f"'{where}' is ragged", field=where)
        return intmat(rows)
    return zeros(nrows, ncols or 0)


def decode_base(obj) -> BaseRing:
    kind = _expect(obj, "kind", str, "base.")
    if kind == "Z":
        return BaseRing.Z()
    if kind == "Zmod":
        m = _expect(obj, "m", int, "base.")
        if m < 2:
            raise SchemaError("field 'base.m' must be at least 2", field="m")
        return BaseRing.Zmod(m)
    raise SchemaError(f"unknown base kind '{kind}'", field="kind")


def decode_module(obj) -> FgModule:
    base = decode_base(_expect(obj, "base", dict, ""))
    gens = _expect(obj, "gens", int, "")
    if gens < 0:
        raise SchemaError("'gens' must be nonnegative", field="gens")
    raw = _expect(obj, "rels", list, "")
    if raw == []:  # no relators, any generator count
        return FgModule(base, gens, zeros(gens, 0))
    rels = _matrix_in(raw, gens, None, "rels")
    return FgModule(base, gens, rels)


def decode_mackey(obj, check: bool = True) -> MackeyFunctor:
    me = decode_module(_expect(obj, "me", dict, ""))
    mfix = decode_module(_expect(obj, "mfix", dict, ""))
    res = _matrix_in(_expect(obj, "res", list, ""), me.gens, mfix.gens, "res")
    tr = _matrix_in(_expect(obj, "tr", list, ""), mfix.gens, me.gens, "tr")
    w = _matrix_in(_expect(obj, "w", list, ""), me.gens, me.gens, "w")
    out = MackeyFunctor(me, mfix,
                        ModuleHom(mfix, me, res),
                        ModuleHom(me, mfix, tr),
                        ModuleHom(me, me, w))
    if check:
        for name, h in (("res", out.res), ("tr", out.tr), ("w", out.w)):
            if not h.well_defined():
                raise SchemaError(f"'{name}' does not respect relations",
                                  field=name)
    return out


def decode_complex(obj) -> MackeyComplex:
    terms_obj = _expect(obj, "terms", dict, "")
    diffs_obj = obj.get("diffs", {})
    terms = {}
    for key, t in terms_obj.items():
        try:
            d = int(key)
        except ValueError:
            raise SchemaError(f"term degree '{key}' is not an integer",
                              field="terms")
        terms[d] = decode_mackey(t)
    base = next(iter(terms.values())).base if terms else BaseRing.Z()
    diffs = {}
    for key, h in diffs_obj.items():
        try:
            d = int(key)
        except ValueError:
            raise SchemaError(f"diff degree '{key}' is not an integer",
                              field="diffs")
        if d not in terms or (d - 1) not in terms:
            raise SchemaError(f"diff at {d} without both endpoint terms",
                              field="diffs")
        s, t = terms[d], terms[d - 1]
        fe = _matrix_in(_expect(h, "fe", list, f"diffs.{d}."),
                        t.me.gens, s.me.gens, f"diffs.{d}.fe")
        ffix = _matrix_in(_expect(h, "ffix", list, f"diffs.{d}."),
                          t.mfix.gens, s.mfix.gens, f"diffs.{d}.ffix")
        diffs[d] = MackeyHom(s, t, ModuleHom(s.me, t.me, fe),
                             ModuleHom(s.mfix, t.mfix, ffix))
    out = MackeyComplex(base, terms, diffs, weight=obj.get("weight"))
    if not validate_complex(out):
        raise SchemaError("complex fails term or equivariance validation",
                          field="terms")
    return out


def decode_slice_table(obj) -> SliceTable:
    rng = _expect(obj, "range", list, "")
    if len(rng) != 2 or not all(isinstance(x, int) for x in rng):
        raise SchemaError("'range' must be a pair of integers", field="range")
    rho_obj = _expect(obj, "rho", dict, "")
    entries = {}
    for key, m in rho_obj.items():
        try:
            n = int(key)
        except ValueError:
            raise SchemaError(f"rho degree '{key}' is not an integer",
                              field="rho")
        entries[n] = decode_mackey(m)
    return SliceTable(range=(rng[0], rng[1]), entries=entries,
                      even=bool(_expect(obj, "even", bool, "")),
                      very_even=bool(_expect(obj, "very_even", bool, "")))


_DECODERS = {
    "base": decode_base,
    "module": decode_module,
    "mackey": decode_mackey,
    "complex": decode_complex,
    "slice_table": decode_slice_table,
}


def loads(text: str, kind: str):
    """Parse and decode a value of the named kind."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at position {e.pos}: {e.msg}",
                         position=e.pos) from e
    if kind not in _DECODERS:
        raise SchemaError(f"unknown value kind '{kind}'")
    return _DECODERS[kind](obj)


def codec(value, direction: str, kind: str = None):
    """Single entry point: direction is 'Encode' or 'Decode'.

    Encode takes an engine value and returns canonical JSON text; Decode
    takes JSON text plus the expected kind and returns the value.
    """
    if direction == "Encode":
        return dumps(value)
    if direction == "Decode":
        if kind is None:
            raise SchemaError("Decode requires the expected kind")
        return loads(value, kind)
    raise SchemaError(f"unknown codec direction '{direction}'")
