"""Named verification cases for the batch harness.

Every case computes a deterministic JSON payload, decides pass/fail from
its own closed-form expectations, and, when a golden payload is supplied,
additionally diffs against it byte-for-byte (canonical encoding).  Rings
are named on the command line as z, f2, f3, f5, z4, z9 (generally f<p>
and z<m>).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import codec
from .errors import InvalidParams, UnknownCase
from .homalg import (
    complex_from_functor, e_homology, homology, homology_table,
    mod_pk_tower, resolve_and_derived_tensor, sigma_shift,
)
from .mackey import (
    box, burnside, canonicalize, constant, constant_unit, find_isomorphism,
    fixed_point, induced, invariant_profile, isomorphic, same_invariants,
    sign_fixed_point, validate,
)
from .models import (
    cofiber_u_check, form_rank, hr_conjugation_plane, hr_polynomial,
    hr_polynomial_sigma_parts, hr_sign_laurent, thr_perfectoid_model,
)
from .slices import rho_table, sigma_filtration
from .zlin import BaseRing, CombineKind, FgModule, combine


def parse_ring(label: str) -> BaseRing:
    label = label.strip().lower()
    if label == "z":
        return BaseRing.Z()
    m = re.fullmatch(r"f(\d+)", label)
    if m:
        return BaseRing.Zmod(int(m.group(1)))
    m = re.fullmatch(r"z(\d+)", label)
    if m:
        return BaseRing.Zmod(int(m.group(1)))
    raise InvalidParams(f"unknown ring label '{label}'")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def ring_label(r: BaseRing) -> str:
    if not r.is_modular:
        return "z"
    m = r.modulus
    return f"f{m}" if _is_prime(m) else f"z{m}"


@dataclass
class CaseSpec:
    name: str
    ring: BaseRing
    params: Dict = field(default_factory=dict)
    expected: Optional[dict] = None  # golden payload


@dataclass
class CaseReport:
    name: str
    ring: str
    params: Dict
    passed: bool
    diffs: List[str]
    payload: Dict
    slice_tables: Dict = field(default_factory=dict)
    homology_tables: Dict = field(default_factory=dict)


def _mack(m) -> dict:
    return codec.encode_mackey(canonicalize(m))


def _table_payload(table) -> dict:
    return {str(n): _mack(m) for n, m in sorted(table.items())}


# ---------------------------------------------------------------------------
# individual cases; each returns (payload, diffs, slice_tables, hom_tables)


def _case_perfectoid(ring: BaseRing, params):
    nmax = params["nmax"]
    window = params["window"]
    model = thr_perfectoid_model(ring, nmax)
    table = rho_table(model.complex, window)
    diffs = []
    for n in range(window[0], window[1] + 1):
        got = table.entry(n)
        if n % 2 == 0 and 0 <= n <= 2 * nmax:
            if not isomorphic(got, constant_unit(ring)):
                diffs.append(f"rho_{n} is not the constant functor")
        elif not got.is_zero():
            diffs.append(f"rho_{n} should vanish")
    if not table.even:
        diffs.append("table is not even")
    if not table.very_even:
        diffs.append("table is not very even")
    canon = type(table)(table.range,
                        {n: canonicalize(m) for n, m in table.entries.items()},
                        table.even, table.very_even)
    payload = {"slice_table": codec.encode_slice_table(canon)}
    return payload, diffs, {"slices": canon}, {}


def _case_cofiber_u(ring: BaseRing, params):
    nmax = params["nmax"]
    rep = cofiber_u_check(ring, nmax)
    diffs = [] if rep.matches_hr else \
        ["cone homology differs from the constant functor in degree 0"]
    payload = {
        "window": list(rep.window),
        "cone_homology": _table_payload(rep.table),
        "matches": rep.matches_hr,
    }
    return payload, diffs, {}, {"cone": rep.table}


def _case_hkr_poly(ring: BaseRing, params):
    d, wmax = params["d"], params["wmax"]
    model = hr_polynomial(ring, d, wmax)
    diffs = []
    ranks = {}
    for w in range(wmax + 1):
        piece = model.piece(w)
        row = {}
        for n in range(d + 1):
            got = len(e_homology(piece, n).invariant_factors())
            want = form_rank(d, n, w)
            row[str(n)] = got
            if got != want:
                diffs.append(f"weight {w} degree {n}: rank {got} != {want}")
        ranks[str(w)] = row
        parts = hr_polynomial_sigma_parts(ring, d, w)
        if parts:
            try:
                sigma_filtration(parts)  # raises on graded-piece mismatch
            except Exception as e:  # noqa: BLE001 - report, don't crash
                diffs.append(f"weight {w}: sigma filtration failed: {e}")
    payload = {
        "d": d, "wmax": wmax,
        "e_level_ranks": ranks,
        "form_ranks": {str(w): {str(n): form_rank(d, n, w)
                                for n in range(d + 1)}
                       for w in range(wmax + 1)},
    }
    return payload, diffs, {}, {}


def _case_sign_laurent(ring: BaseRing, params):
    wmax = params["wmax"]
    wmin = params.get("wmin", -wmax)
    power = params.get("power")
    model = hr_sign_laurent(ring, wmin, wmax, power=power)
    diffs = []
    tables = {}
    for j in model.plain.weights():
        t = homology_table(model.plain.piece(j), (0, 1))
        tables[str(j)] = _table_payload(t)
        for dd in (0, 1):
            if not isomorphic(t[dd], constant_unit(ring)):
                diffs.append(f"weight {j} degree {dd} is not constant")
    payload = {"weights": tables}
    if model.sigma_form is not None:
        payload["sigma_rewrite_agrees"] = bool(model.sigma_agrees)
        if not model.sigma_agrees:
            diffs.append("sigma rewrite disagrees with the plain form")
    else:
        payload["obstruction"] = model.obstruction
    if model.power_map is not None:
        payload["power_map"] = {
            "n": model.power_map.n,
            "degree_zero": model.power_map.degree_zero,
            "degree_one": {str(j): t for j, t in
                           sorted(model.power_map.degree_one_weight_map.items())},
        }
    ht = {j: homology(model.plain.piece(j), 1) for j in model.plain.weights()}
    return payload, diffs, {}, {"degree_one": ht}


def _case_conj_plane(ring: BaseRing, params):
    wmax = params["wmax"]
    model = hr_conjugation_plane(ring, wmax)
    diffs = []
    ranks = {}
    for k in range(wmax + 1):
        piece = model.plain.piece(k)
        row = {}
        for n in (0, 1, 2):
            got = len(e_homology(piece, n).invariant_factors())
            want = form_rank(2, n, k)
            row[str(n)] = got
            if got != want:
                diffs.append(f"weight {k} degree {n}: rank {got} != {want}")
        ranks[str(k)] = row
    payload = {"e_level_ranks": ranks}
    if model.omega_form is not None:
        payload["omega_rewrite_agrees"] = bool(model.omega_agrees)
        if not model.omega_agrees:
            diffs.append("form rewrite disagrees with the plain decomposition")
    else:
        payload["obstruction"] = model.obstruction
    return payload, diffs, {}, {}


def _sigma_homology(ring: BaseRing):
    c = sigma_shift(complex_from_functor(constant_unit(ring)), 1)
    return homology(c, 0), homology(c, 1)


def _case_sigma_shift_odd(ring: BaseRing, params):
    if not ring.two_invertible():
        raise InvalidParams("case requires 2 invertible in the ring")
    h0, h1 = _sigma_homology(ring)
    expected = fixed_point(FgModule.free(ring, 1), [[-1]])
    diffs = []
    if not isomorphic(h1, expected):
        diffs.append("degree-1 homology is not the sign fixed-point functor")
    if not h0.is_zero():
        diffs.append("degree-0 homology should vanish when 2 is invertible")
    payload = {"H0": _mack(h0), "H1": _mack(h1)}
    return payload, diffs, {}, {"sigma": {0: h0, 1: h1}}


def _case_sigma_shift_two(ring: BaseRing, params):
    h0, h1 = _sigma_homology(ring)
    mod2 = FgModule(ring, 1, [[2]])  # r/2r
    diffs = []
    if not h0.me.is_zero():
        diffs.append("degree-0 homology has nonzero underlying level")
    if h0.mfix.invariant_factors() != mod2.invariant_factors():
        diffs.append("degree-0 fixed level is not r/2r")
    payload = {"H0": _mack(h0), "H1": _mack(h1)}
    return payload, diffs, {}, {"sigma": {0: h0, 1: h1}}


def _case_box_unit(ring: BaseRing, params):
    c = constant_unit(ring)
    got = box(burnside(ring), c)
    diffs = []
    if not same_invariants(got, c):
        diffs.append("Burnside box unit does not reproduce the constant")
    elif got.order() is not None and got.order() <= 256:
        if find_isomorphism(got, c) is None:
            diffs.append("no explicit isomorphism witness found")
    payload = {"box": _mack(got), "unit": _mack(c)}
    return payload, diffs, {}, {}


def _case_green_laws(ring: BaseRing, params):
    unit = FgModule.free(ring, 1)
    rows = {
        "constant": validate(constant(unit)),
        "induced": validate(induced(unit)),
        "fixed_point": validate(fixed_point(unit, [[-1]])),
        "burnside": validate(burnside(ring)),
    }
    diffs = []
    for name in ("constant", "induced", "fixed_point"):
        if not rows[name]["green_module"]:
            diffs.append(f"{name} should be a module over the base")
    if rows["burnside"]["green_module"]:
        diffs.append("Burnside should fail the module check")
    if not rows["burnside"]["mackey_axioms"]:
        diffs.append("Burnside should satisfy the diagram axioms")
    payload = {k: v for k, v in rows.items()}
    return payload, diffs, {}, {}


def _case_tower(ring: BaseRing, params):
    p, k = params["p"], params["k"]
    c = complex_from_functor(constant(FgModule.free(ring, 1)))
    tower = mod_pk_tower(c, p, k)
    degrees = range(0, 2)
    char = ring.characteristic()
    diffs = []
    payload = {"p": p, "k": k}
    if char != 0 and char % p == 0:
        stable = tower.stabilizes(degrees)
        payload["stabilizes"] = stable
        if not stable:
            diffs.append("tower entries differ on a p-power base")
    elif char != 0:
        vanish = tower.vanishes(degrees)
        payload["vanishes"] = vanish
        if not vanish:
            diffs.append("tower entries survive on a coprime base")
    else:
        payload["H0_invariants"] = {
            str(i + 1): list(homology(e, 0).mfix.invariant_factors())
            for i, e in enumerate(tower.entries)}
        want = [[p ** i] for i in range(1, k + 1)]
        got = [list(homology(e, 0).mfix.invariant_factors())
               for e in tower.entries]
        if got != want:
            diffs.append("integral tower entries disagree with p-power quotients")
    return payload, diffs, {}, {}


def _case_box_laws(ring: BaseRing, params):
    unit = FgModule.free(ring, 1)
    two = FgModule(ring, 1, [[2]])
    mods = [constant(unit), constant(two), induced(two),
            sign_fixed_point(ring, 2) if not ring.is_modular
            else fixed_point(unit, [[-1]])]
    diffs = []
    for i, a in enumerate(mods):
        for b in mods[i:]:
            if not same_invariants(box(a, b), box(b, a)):
                diffs.append(f"commutativity fails for pair {a}, {b}")
    a, b, c = mods[0], mods[1], mods[2]
    if not same_invariants(box(box(a, b), c), box(a, box(b, c))):
        diffs.append("associativity fails on the probe triple")
    for n in mods:
        lhs = box(induced(two), n)
        rhs = induced(combine(two, n.me, CombineKind.TENSOR))
        if not same_invariants(lhs, rhs):
            diffs.append(f"Frobenius identity fails against {n}")
    payload = {"checked_pairs": len(mods) * (len(mods) + 1) // 2,
               "frobenius_probes": len(mods)}
    return payload, diffs, {}, {}


def _case_derived_finite(ring: BaseRing, params):
    if ring.is_modular:
        raise InvalidParams("derived finiteness case runs over the integers")
    pairs = [
        (constant(FgModule.cyclic(ring, 2)), constant(FgModule.cyclic(ring, 2))),
        (constant(FgModule.cyclic(ring, 4)), induced(FgModule.cyclic(ring, 2))),
        (sign_fixed_point(ring, 3), constant(FgModule.cyclic(ring, 9))),
    ]
    diffs = []
    payload_rows = {}
    for idx, (a, b) in enumerate(pairs):
        out = resolve_and_derived_tensor(complex_from_functor(a),
                                         complex_from_functor(b), length=4)
        degs = range(0, 3)
        row = {}
        for dd in degs:
            h = homology(out, dd)
            row[str(dd)] = {
                "e": list(h.me.invariant_factors()),
                "fix": list(h.mfix.invariant_factors()),
            }
            if not h.is_finite():
                diffs.append(f"pair {idx}: infinite homology in degree {dd}")
        payload_rows[str(idx)] = row
    return {"pairs": payload_rows}, diffs, {}, {}


_CaseFn = Callable[[BaseRing, Dict], Tuple[dict, list, dict, dict]]

CASES: Dict[str, _CaseFn] = {
    "perfectoid": _case_perfectoid,
    "cofiber-u": _case_cofiber_u,
    "hkr-poly": _case_hkr_poly,
    "sign-laurent": _case_sign_laurent,
    "conj-plane": _case_conj_plane,
    "sigma-shift-odd-prime": _case_sigma_shift_odd,
    "sigma-shift-two-torsion": _case_sigma_shift_two,
    "box-unit": _case_box_unit,
    "box-laws": _case_box_laws,
    "green-laws": _case_green_laws,
    "tower": _case_tower,
    "derived-finite": _case_derived_finite,
}

DEFAULT_RINGS = {
    "perfectoid": "f3",
    "cofiber-u": "f3",
    "hkr-poly": "f3",
    "sign-laurent": "f3",
    "conj-plane": "f3",
    "sigma-shift-odd-prime": "f5",
    "sigma-shift-two-torsion": "f2",
    "box-unit": "z",
    "box-laws": "z",
    "green-laws": "z",
    "tower": "f3",
    "derived-finite": "z",
}


def fill_defaults(name: str, ring: BaseRing, params: Dict) -> Dict:
    out = dict(params)
    out.setdefault("nmax", 4)
    out.setdefault("d", 2)
    out.setdefault("wmax", 3)
    if out.get("window") is None:
        out["window"] = (-2, 2 * out["nmax"] + 2)
    if out.get("p") is None:
        char = ring.characteristic()
        out["p"] = char if char not in (0,) else 2
        # prime part of a prime-power characteristic
        for q in range(2, out["p"] + 1):
            if out["p"] % q == 0:
                out["p"] = q
                break
    out.setdefault("k", 3)
    for key in ("nmax", "d", "wmax", "k"):
        if not isinstance(out[key], int) or out[key] < 0:
            raise InvalidParams(f"parameter {key} must be a nonnegative integer")
    if out["k"] < 1:
        raise InvalidParams("k must be at least 1")
    return out


def run_case(spec: CaseSpec) -> CaseReport:
    """Execute one registered case and diff against its golden payload."""
    if spec.name not in CASES:
        raise UnknownCase(f"no case named '{spec.name}'")
    params = fill_defaults(spec.name, spec.ring, spec.params)
    payload, diffs, slice_tables, hom_tables = CASES[spec.name](spec.ring, params)
    if spec.expected is not None:
        got = codec.dumps(payload)
        want = codec.dumps(spec.expected)
        if got != want:
            diffs = list(diffs) + ["payload differs from golden data"]
    return CaseReport(
        name=spec.name,
        ring=ring_label(spec.ring),
        params={k: (list(v) if isinstance(v, tuple) else v)
                for k, v in params.items()},
        passed=not diffs,
        diffs=list(diffs),
        payload=payload,
        slice_tables=slice_tables,
        homology_tables=hom_tables)
