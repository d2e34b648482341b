"""Bounded chain complexes of Mackey functors.

Terms are stored per degree with differentials one degree down; d o d = 0
and the term axioms are checked on construction.  Homology is pointwise
(kernels over images at both levels with induced structure maps) and is
computed blockwise: a complex is first split into connected components of
its generator graph, which keeps every Smith reduction small even when a
model is a large direct sum.

The sigma-shift tensors with a cellular model of the representation
sphere: one induced cell per dimension glued by alternating 1 - w and
1 + w differentials over a constant bottom cell.  For a single shift this
is literally the two-term complex (summation at the underlying level,
multiplication by 2 at the fixed level); for iterated shifts it is the
small quasi-isomorphic replacement of the k-fold tensor power, and the
agreement is pinned down by homology-level tests against the dense
iterated tensor.  Every comparison the engine makes is at the level of
homology, never chain-level equality.

Derived tensor products replace the left factor by a deterministic
semifree resolution: fixed-level generators are covered by constant
summands and underlying-level generators by induced summands, in
presentation order.  Each complex carries the degree range in which its
homology is trusted; reads outside raise instead of returning partial
data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    BaseMismatch,
    LengthTooShort,
    NonNestedTower,
    NotAGreenBase,
    NotGreenModule,
    WindowTooSmall,
)
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    constant,
    direct_sum,
    induced,
    is_constant_unit_base,
    is_green_module,
    mackey_cokernel,
    mackey_kernel,
    validate,
    zero_functor,
)
from .zlin import (
    BaseRing,
    FgModule,
    ModuleHom,
    SubquotientKind,
    block_diag,
    hstack,
    identity,
    kron,
    solve_through,
    subquotient,
    vstack,
    zeros,
)

INF = math.inf


class MackeyComplex:
    """Bounded complex: ``terms[d]`` with ``diffs[d]: terms[d] -> terms[d-1]``."""

    def __init__(self, base: BaseRing, terms: Dict[int, MackeyFunctor],
                 diffs: Dict[int, MackeyHom], weight: Optional[int] = None,
                 trust: Tuple[float, float] = (-INF, INF),
                 trust_reason: str = "window", check: bool = True):
        self.base = base
        self.terms = {d: t for d, t in terms.items() if not t.is_zero()}
        self.diffs = {d: h for d, h in diffs.items()
                      if d in self.terms and (d - 1) in self.terms
                      and not h.is_zero_map()}
        self.weight = weight
        self.trust = trust
        self.trust_reason = trust_reason
        if check:
            self._validate()

    # -- structure ---------------------------------------------------------

    @property
    def window(self) -> Tuple[int, int]:
        if not self.terms:
            return (0, -1)
        return (min(self.terms), max(self.terms))

    def is_empty(self) -> bool:
        return not self.terms

    def term(self, d: int) -> MackeyFunctor:
        return self.terms.get(d) or zero_functor(self.base)

    def diff(self, d: int) -> MackeyHom:
        h = self.diffs.get(d)
        if h is not None:
            return h
        return MackeyHom.zero(self.term(d), self.term(d - 1))

    def total_gens(self) -> int:
        return sum(t.me.gens + t.mfix.gens for t in self.terms.values())

    def trusted(self, d: int) -> bool:
        return self.trust[0] <= d <= self.trust[1]

    def _require_trusted(self, d: int):
        if not self.trusted(d):
            err = LengthTooShort if self.trust_reason == "length" else WindowTooSmall
            raise err(f"degree {d} outside trusted range {self.trust}")

    def _validate(self):
        # construction check: d o d = 0 (exact fast path, lattice fallback)
        for d, t in self.terms.items():
            if t.base != self.base:
                raise BaseMismatch("term base disagrees with complex base")
        for d in list(self.diffs):
            if (d + 1) in self.diffs:
                comp = self.diffs[d].compose(self.diffs[d + 1])
                if not comp.is_zero_map():
                    raise ValueError(f"d o d != 0 between degrees {d + 1}, {d - 1}")

    def shifted(self, j: int) -> "MackeyComplex":
        """Plain integer shift: degrees move up by j."""
        if j == 0:
            return self
        lo, hi = self.trust
        return MackeyComplex(
            self.base,
            {d + j: t for d, t in self.terms.items()},
            {d + j: h for d, h in self.diffs.items()},
            weight=self.weight,
            trust=(lo + j if lo != -INF else lo, hi + j if hi != INF else hi),
            trust_reason=self.trust_reason, check=False)


def validate_complex(c: MackeyComplex) -> bool:
    """Full validation: term axioms and equivariance of every differential.

    Construction only rechecks d o d = 0; this is the deep check applied
    at trust boundaries (decoded input, tests).
    """
    for t in c.terms.values():
        if not validate(t)["mackey_axioms"]:
            return False
    return all(h.is_equivariant() for h in c.diffs.values())


def complex_from_functor(m: MackeyFunctor, degree: int = 0,
                         weight: Optional[int] = None) -> MackeyComplex:
    if not validate(m)["mackey_axioms"]:
        raise ValueError("term fails the Mackey axioms")
    return MackeyComplex(m.base, {degree: m}, {}, weight=weight)


def zero_complex(base: BaseRing) -> MackeyComplex:
    return MackeyComplex(base, {}, {})


@dataclass
class ComplexHom:
    """Chain map between complexes: one MackeyHom per shared degree."""

    source: MackeyComplex
    target: MackeyComplex
    maps: Dict[int, MackeyHom]

    def map_at(self, d: int) -> MackeyHom:
        h = self.maps.get(d)
        if h is not None:
            return h
        return MackeyHom.zero(self.source.term(d), self.target.term(d))

    def is_chain_map(self) -> bool:
        lo = min(self.source.window[0], self.target.window[0])
        hi = max(self.source.window[1], self.target.window[1])
        for d in range(lo, hi + 1):
            if not self.map_at(d).is_equivariant():
                return False
            lhs = self.target.diff(d).compose(self.map_at(d))
            rhs = self.map_at(d - 1).compose(self.source.diff(d))
            if not lhs.sub(rhs).is_zero_map():
                return False
        return True


def cone(f: ComplexHom) -> MackeyComplex:
    """Mapping cone: C_d = X_{d-1} + Y_d, d(x, y) = (-dx, fx + dy)."""
    X, Y = f.source, f.target
    lo = min(X.window[0] + 1, Y.window[0])
    hi = max(X.window[1] + 1, Y.window[1])
    terms = {}
    for d in range(lo, hi + 1):
        terms[d] = direct_sum(X.term(d - 1), Y.term(d))
    diffs = {}
    for d in range(lo + 1, hi + 1):
        xs, ys = X.term(d - 1), Y.term(d)
        xt, yt = X.term(d - 2), Y.term(d - 1)
        dx, dy, fm = X.diff(d - 1), Y.diff(d), f.map_at(d - 1)
        fe = vstack(
            hstack(-dx.fe.matrix, zeros(xt.me.gens, ys.me.gens)),
            hstack(fm.fe.matrix, dy.fe.matrix))
        ffix = vstack(
            hstack(-dx.ffix.matrix, zeros(xt.mfix.gens, ys.mfix.gens)),
            hstack(fm.ffix.matrix, dy.ffix.matrix))
        diffs[d] = MackeyHom(terms[d], terms[d - 1],
                             ModuleHom(terms[d].me, terms[d - 1].me, fe),
                             ModuleHom(terms[d].mfix, terms[d - 1].mfix, ffix))
    tmin = max(X.trust[0] + 1, Y.trust[0])
    tmax = min(X.trust[1] + 1, Y.trust[1])
    reason = "length" if "length" in (X.trust_reason, Y.trust_reason) else "window"
    return MackeyComplex(X.base, terms, diffs,
                         trust=(tmin, tmax), trust_reason=reason)


def direct_sum_complexes(parts: List[MackeyComplex]):
    """Merge complexes into one; returns (sum, inclusion chain maps)."""
    parts = [p for p in parts]
    base = parts[0].base
    lo = min(p.window[0] for p in parts if not p.is_empty())
    hi = max(p.window[1] for p in parts if not p.is_empty())
    terms, diffs = {}, {}
    offsets: List[Dict[int, Tuple[int, int]]] = [dict() for _ in parts]
    for d in range(lo, hi + 1):
        acc = None
        eo, fo = 0, 0
        for idx, p in enumerate(parts):
            t = p.term(d)
            offsets[idx][d] = (eo, fo)
            eo += t.me.gens
            fo += t.mfix.gens
            acc = t if acc is None else direct_sum(acc, t)
        terms[d] = acc
    for d in range(lo + 1, hi + 1):
        acc_fe, acc_ff = None, None
        for p in parts:
            h = p.diff(d)
            if acc_fe is None:
                acc_fe, acc_ff = h.fe.matrix, h.ffix.matrix
            else:
                acc_fe = block_diag(acc_fe, h.fe.matrix)
                acc_ff = block_diag(acc_ff, h.ffix.matrix)
        diffs[d] = MackeyHom(terms[d], terms[d - 1],
                             ModuleHom(terms[d].me, terms[d - 1].me, acc_fe),
                             ModuleHom(terms[d].mfix, terms[d - 1].mfix, acc_ff))
    tmin = max(p.trust[0] for p in parts)
    tmax = min(p.trust[1] for p in parts)
    reason = "length" if any(p.trust_reason == "length" for p in parts) else "window"
    total = MackeyComplex(base, terms, diffs, trust=(tmin, tmax),
                          trust_reason=reason, check=False)
    incls = []
    for idx, p in enumerate(parts):
        maps = {}
        degs = range(p.window[0], p.window[1] + 1) if not p.is_empty() else []
        for d in degs:
            t, tot = p.term(d), total.term(d)
            eo, fo = offsets[idx][d]
            fe = zeros(tot.me.gens, t.me.gens)
            for j in range(t.me.gens):
                fe[eo + j, j] = 1
            ff = zeros(tot.mfix.gens, t.mfix.gens)
            for j in range(t.mfix.gens):
                ff[fo + j, j] = 1
            maps[d] = MackeyHom(t, tot, ModuleHom(t.me, tot.me, fe),
                                ModuleHom(t.mfix, tot.mfix, ff))
        incls.append(ComplexHom(p, total, maps))
    return total, incls


# ---------------------------------------------------------------------------
# homology


def _components(c: MackeyComplex):
    """Split into connected components of the generator graph.

    Nodes are (degree, level, index); edges come from relation columns,
    res/tr/w and the differentials.  Matrices are block-diagonal across
    the partition, so homology computes summandwise.
    """
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for d, t in c.terms.items():
        for i in range(t.me.gens):
            parent[(d, "e", i)] = (d, "e", i)
        for i in range(t.mfix.gens):
            parent[(d, "f", i)] = (d, "f", i)

    def link_columns(mat, deg_r, lvl_r, deg_c, lvl_c):
        rows, cols = mat.shape
        for j in range(cols):
            support = [i for i in range(rows) if mat[i, j] != 0]
            for i in support:
                union((deg_r, lvl_r, i), (deg_c, lvl_c, j))

    for d, t in c.terms.items():
        for j in range(t.me.rels.shape[1]):
            sup = [i for i in range(t.me.gens) if t.me.rels[i, j] != 0]
            for i in sup[1:]:
                union((d, "e", sup[0]), (d, "e", i))
        for j in range(t.mfix.rels.shape[1]):
            sup = [i for i in range(t.mfix.gens) if t.mfix.rels[i, j] != 0]
            for i in sup[1:]:
                union((d, "f", sup[0]), (d, "f", i))
        link_columns(t.res.matrix, d, "e", d, "f")
        link_columns(t.tr.matrix, d, "f", d, "e")
        link_columns(t.w.matrix, d, "e", d, "e")
    for d, h in c.diffs.items():
        link_columns(h.fe.matrix, d - 1, "e", d, "e")
        link_columns(h.ffix.matrix, d - 1, "f", d, "f")

    groups: Dict[tuple, list] = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)

    comps = []
    for root in sorted(groups, key=lambda r: min(groups[r])):
        nodes = groups[root]
        e_idx: Dict[int, list] = {}
        f_idx: Dict[int, list] = {}
        for (d, lvl, i) in nodes:
            (e_idx if lvl == "e" else f_idx).setdefault(d, []).append(i)
        for d in e_idx:
            e_idx[d].sort()
        for d in f_idx:
            f_idx[d].sort()
        comps.append((e_idx, f_idx))
    return comps


def _restrict_module(m: FgModule, idx: List[int]) -> FgModule:
    rows = m.rels[idx, :] if idx else zeros(0, m.rels.shape[1])
    keep = [j for j in range(rows.shape[1])
            if any(rows[i, j] != 0 for i in range(rows.shape[0]))]
    return FgModule(m.base, len(idx), rows[:, keep] if keep else zeros(len(idx), 0))


def _restrict_matrix(mat, row_idx, col_idx):
    if not row_idx or not col_idx:
        return zeros(len(row_idx), len(col_idx))
    return mat[np.ix_(row_idx, col_idx)]


def _component_subcomplex(c: MackeyComplex, e_idx, f_idx) -> MackeyComplex:
    degs = sorted(set(e_idx) | set(f_idx))
    terms, diffs = {}, {}
    for d in degs:
        t = c.term(d)
        ei = e_idx.get(d, [])
        fi = f_idx.get(d, [])
        me = _restrict_module(t.me, ei)
        mfix = _restrict_module(t.mfix, fi)
        terms[d] = MackeyFunctor(
            me, mfix,
            ModuleHom(mfix, me, _restrict_matrix(t.res.matrix, ei, fi)),
            ModuleHom(me, mfix, _restrict_matrix(t.tr.matrix, fi, ei)),
            ModuleHom(me, me, _restrict_matrix(t.w.matrix, ei, ei)))
    for d in degs:
        if (d - 1) not in terms:
            continue
        h = c.diff(d)
        s, t = terms[d], terms[d - 1]
        fe = _restrict_matrix(h.fe.matrix, e_idx.get(d - 1, []), e_idx.get(d, []))
        ff = _restrict_matrix(h.ffix.matrix, f_idx.get(d - 1, []), f_idx.get(d, []))
        diffs[d] = MackeyHom(s, t, ModuleHom(s.me, t.me, fe),
                             ModuleHom(s.mfix, t.mfix, ff))
    return MackeyComplex(c.base, terms, diffs, trust=c.trust,
                         trust_reason=c.trust_reason, check=False)


def _homology_direct(c: MackeyComplex, m: int) -> MackeyFunctor:
    t = c.term(m)
    if t.is_zero():
        return zero_functor(c.base)
    d_m = c.diff(m)
    zc, incl = mackey_kernel(d_m)
    d_up = c.diff(m + 1)
    src = c.term(m + 1)
    fe = solve_through(incl.fe.matrix, d_up.fe.matrix, t.me.lifted_rels())
    ff = solve_through(incl.ffix.matrix, d_up.ffix.matrix, t.mfix.lifted_rels())
    factored = MackeyHom(src, zc,
                         ModuleHom(src.me, zc.me, fe),
                         ModuleHom(src.mfix, zc.mfix, ff))
    return mackey_cokernel(factored)[0]


def homology(c: MackeyComplex, m: int, nsigma: int = 0) -> MackeyFunctor:
    """Mackey-valued homology H_{m + nsigma*sigma}; shifts then reads H_m."""
    if nsigma != 0:
        c = sigma_shift(c, -nsigma)
    c._require_trusted(m)
    lo, hi = c.window
    if m < lo - 1 or m > hi + 1 or c.is_empty():
        return zero_functor(c.base)
    parts = []
    for e_idx, f_idx in _components(c):
        degs = set(e_idx) | set(f_idx)
        if not degs & {m - 1, m, m + 1}:
            continue
        sub = _component_subcomplex(c, e_idx, f_idx)
        h = _homology_direct(sub, m)
        if not h.is_zero():
            parts.append(h)
    if not parts:
        return zero_functor(c.base)
    out = parts[0]
    for p in parts[1:]:
        out = direct_sum(out, p)
    return out


def homology_table(c: MackeyComplex, degrees) -> Dict[int, MackeyFunctor]:
    return {d: homology(c, d) for d in degrees}


def is_acyclic_in(c: MackeyComplex, degrees) -> bool:
    return all(homology(c, d).is_zero() for d in degrees)


# -- independent level-wise oracle ------------------------------------------


def level_complex(c: MackeyComplex, level: str):
    """Forget to a plain complex of modules at 'e' or 'fix'."""
    lo, hi = c.window
    mods = {d: (c.term(d).me if level == "e" else c.term(d).mfix)
            for d in range(lo, hi + 1)}
    mats = {d: (c.diff(d).fe.matrix if level == "e" else c.diff(d).ffix.matrix)
            for d in range(lo + 1, hi + 1)}
    return mods, mats


def plain_homology(mods: Dict[int, FgModule], mats, m: int,
                   base: BaseRing) -> FgModule:
    """Ordinary homology of a complex of modules; no Mackey machinery."""
    if m not in mods:
        return FgModule.zero(base)
    tm = mods[m]
    below = mods.get(m - 1, FgModule.zero(base))
    above = mods.get(m + 1, FgModule.zero(base))
    dm = mats.get(m, zeros(below.gens, tm.gens))
    dup = mats.get(m + 1, zeros(tm.gens, above.gens))
    f = ModuleHom(tm, below, dm)
    zmod, incl = subquotient(f, SubquotientKind.KERNEL)
    lift = solve_through(incl.matrix, dup, tm.lifted_rels())
    g = ModuleHom(above, zmod, lift)
    cok, _ = subquotient(g, SubquotientKind.COKERNEL)
    return cok


def e_homology(c: MackeyComplex, m: int) -> FgModule:
    mods, mats = level_complex(c, "e")
    return plain_homology(mods, mats, m, c.base)


# ---------------------------------------------------------------------------
# sigma cells and shifts


def _eps(m: FgModule) -> MackeyHom:
    src, tgt = induced(m), constant(m)
    g = m.gens
    return MackeyHom(src, tgt,
                     ModuleHom(src.me, tgt.me, hstack(identity(g), identity(g))),
                     ModuleHom(src.mfix, tgt.mfix, 2 * identity(g)))


def _delta(m: FgModule) -> MackeyHom:
    src, tgt = constant(m), induced(m)
    g = m.gens
    return MackeyHom(src, tgt,
                     ModuleHom(src.me, tgt.me, vstack(identity(g), identity(g))),
                     ModuleHom(src.mfix, tgt.mfix, identity(g)))


def _nu(m: FgModule) -> MackeyHom:
    ind = induced(m)
    g = m.gens
    eye = identity(g)
    fe = vstack(hstack(eye, -eye), hstack(-eye, eye))
    return MackeyHom(ind, ind, ModuleHom(ind.me, ind.me, fe),
                     ModuleHom(ind.mfix, ind.mfix, zeros(g, g)))


def _eta(m: FgModule) -> MackeyHom:
    ind = induced(m)
    g = m.gens
    eye = identity(g)
    fe = vstack(hstack(eye, eye), hstack(eye, eye))
    return MackeyHom(ind, ind, ModuleHom(ind.me, ind.me, fe),
                     ModuleHom(ind.mfix, ind.mfix, 2 * identity(g)))


def sigma_cell_complex(m: FgModule, k: int, degree: int = 0) -> MackeyComplex:
    """Constant coefficients shifted by [degree + k*sigma].

    The cellular model has one induced cell in each dimension 1..k over a
    constant bottom cell (dually for k < 0), with alternating 1 - w and
    1 + w attaching maps over the summation edge.
    """
    base = m.base
    if k == 0:
        return complex_from_functor(constant(m), degree)
    terms: Dict[int, MackeyFunctor] = {}
    diffs: Dict[int, MackeyHom] = {}
    if k > 0:
        terms[0] = constant(m)
        for j in range(1, k + 1):
            terms[j] = induced(m)
        diffs[1] = _eps(m)
        for j in range(2, k + 1):
            diffs[j] = _nu(m) if j % 2 == 0 else _eta(m)
    else:
        terms[0] = constant(m)
        for j in range(1, -k + 1):
            terms[-j] = induced(m)
        diffs[0] = _delta(m)
        for j in range(1, -k):
            diffs[-j] = _nu(m) if j % 2 == 1 else _eta(m)
    return MackeyComplex(base, terms, diffs).shifted(degree)


def sigma_cell_unit(base: BaseRing, k: int) -> MackeyComplex:
    return sigma_cell_complex(FgModule.free(base, 1), k)


def _combine_trust(a: MackeyComplex, b: MackeyComplex):
    tmax = INF
    if a.trust[1] != INF and not b.is_empty():
        tmax = min(tmax, a.trust[1] + b.window[0])
    if b.trust[1] != INF and not a.is_empty():
        tmax = min(tmax, b.trust[1] + a.window[0])
    tmin = -INF
    if a.trust[0] != -INF and not b.is_empty():
        tmin = max(tmin, a.trust[0] + b.window[1])
    if b.trust[0] != -INF and not a.is_empty():
        tmin = max(tmin, b.trust[0] + a.window[1])
    reason = "length" if "length" in (a.trust_reason, b.trust_reason) else "window"
    return (tmin, tmax), reason


def _box_hom_mats(f: MackeyHom, g: MackeyHom):
    fe = kron(f.fe.matrix, g.fe.matrix)
    ffix = block_diag(kron(f.ffix.matrix, g.ffix.matrix),
                      kron(f.fe.matrix, g.fe.matrix))
    return fe, ffix


def tensor_total(a: MackeyComplex, b: MackeyComplex,
                 over: Optional[MackeyFunctor] = None) -> MackeyComplex:
    """Total complex of the degreewise box product with Koszul signs.

    ``over`` must be the constant Green functor on the base (the default);
    all terms must be modules over it.  Signs follow
    d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy.
    """
    from .mackey import box
    if a.base != b.base:
        raise BaseMismatch("tensor factors over different base rings")
    if over is None:
        from .mackey import constant_unit
        over = constant_unit(a.base)
    if not (validate(over)["green_module"] and is_constant_unit_base(over)):
        raise NotAGreenBase("tensor base must be the constant Green functor")
    for c in (a, b):
        for d, t in c.terms.items():
            if not is_green_module(t):
                raise NotGreenModule(f"term in degree {d} is not a module "
                                     "over the constant base")
    if a.is_empty() or b.is_empty():
        return zero_complex(a.base)

    alo, ahi = a.window
    blo, bhi = b.window
    # summands[n] = ordered list of (i, j, box term, e offset, fix offset)
    summands: Dict[int, list] = {}
    terms: Dict[int, MackeyFunctor] = {}
    for n in range(alo + blo, ahi + bhi + 1):
        entries = []
        eo = fo = 0
        acc = None
        for i in range(max(alo, n - bhi), min(ahi, n - blo) + 1):
            j = n - i
            bx = box(a.term(i), b.term(j))
            entries.append((i, j, bx, eo, fo))
            eo += bx.me.gens
            fo += bx.mfix.gens
            acc = bx if acc is None else direct_sum(acc, bx)
        summands[n] = entries
        terms[n] = acc if acc is not None else zero_functor(a.base)

    diffs: Dict[int, MackeyHom] = {}
    for n in range(alo + blo + 1, ahi + bhi + 1):
        src, tgt = terms[n], terms[n - 1]
        fe = zeros(tgt.me.gens, src.me.gens)
        ff = zeros(tgt.mfix.gens, src.mfix.gens)
        tgt_pos = {(i, j): (eo, fo) for i, j, _, eo, fo in summands[n - 1]}
        for i, j, bx, seo, sfo in summands[n]:
            # horizontal: d^a (x) id into (i-1, j)
            if (i - 1, j) in tgt_pos:
                mfe, mff = _box_hom_mats(a.diff(i), _identity_hom(b.term(j)))
                teo, tfo = tgt_pos[(i - 1, j)]
                fe[teo:teo + mfe.shape[0], seo:seo + mfe.shape[1]] = mfe
                ff[tfo:tfo + mff.shape[0], sfo:sfo + mff.shape[1]] = mff
            # vertical: (-1)^i id (x) d^b into (i, j-1)
            if (i, j - 1) in tgt_pos:
                sign = -1 if i % 2 else 1
                mfe, mff = _box_hom_mats(_identity_hom(a.term(i)), b.diff(j))
                teo, tfo = tgt_pos[(i, j - 1)]
                fe[teo:teo + mfe.shape[0], seo:seo + mfe.shape[1]] = sign * mfe
                ff[tfo:tfo + mff.shape[0], sfo:sfo + mff.shape[1]] = sign * mff
        diffs[n] = MackeyHom(src, tgt,
                             ModuleHom(src.me, tgt.me, fe),
                             ModuleHom(src.mfix, tgt.mfix, ff))
    trust, reason = _combine_trust(a, b)
    wt = None
    if a.weight is not None and b.weight is not None:
        wt = a.weight + b.weight
    return MackeyComplex(a.base, terms, diffs, weight=wt,
                         trust=trust, trust_reason=reason)


def _identity_hom(m: MackeyFunctor) -> MackeyHom:
    return MackeyHom.identity(m)


def sigma_shift(c: MackeyComplex, k: int, shift: int = 0) -> MackeyComplex:
    """Equivariant shift by [shift + k*sigma]."""
    out = c
    if k != 0:
        if c.is_empty():
            return zero_complex(c.base).shifted(shift)
        out = tensor_total(c, sigma_cell_unit(c.base, k))
    return out.shifted(shift)


# ---------------------------------------------------------------------------
# resolutions and derived tensors


def free_cover(m: MackeyFunctor):
    """Deterministic free cover: constants onto the fixed generators first,
    then induced summands onto the underlying generators."""
    base = m.base
    gfix, ge = m.mfix.gens, m.me.gens
    cpart = constant(FgModule.free(base, gfix))
    ipart = induced(FgModule.free(base, ge))
    f = direct_sum(cpart, ipart)
    ffix = hstack(identity(gfix), m.tr.matrix)
    fe = hstack(m.res.matrix, identity(ge), m.w.matrix)
    cover = MackeyHom(f, m,
                      ModuleHom(f.me, m.me, fe),
                      ModuleHom(f.mfix, m.mfix, ffix))
    return f, cover


def resolve_complex(a: MackeyComplex, length: int):
    """Semifree replacement Q -> a, trusted through degree lo + length - 1.

    Q is built upward: each new term is the free cover of the module of
    pairs (cycle of Q, chain of a) matched by the comparison map, which
    kills the kernel homology one degree at a time.
    """
    if length < 1:
        raise LengthTooShort("resolution length must be at least 1")
    for d, t in a.terms.items():
        if not is_green_module(t):
            raise NotGreenModule("resolution requires modules over the base")
    base = a.base
    if a.is_empty():
        q = zero_complex(base)
        return q, ComplexHom(q, a, {})
    lo, hi = a.window
    top = lo + length
    qterms: Dict[int, MackeyFunctor] = {}
    qdiffs: Dict[int, MackeyHom] = {}
    gmaps: Dict[int, MackeyHom] = {}
    f0, cover0 = free_cover(a.term(lo))
    qterms[lo] = f0
    gmaps[lo] = MackeyHom(f0, a.term(lo), cover0.fe, cover0.ffix)
    for k in range(lo, top):
        qk = qterms[k]
        ak1 = a.term(k + 1)
        below = qterms.get(k - 1, zero_functor(base))
        dq = qdiffs.get(k, MackeyHom.zero(qk, below))
        gk = gmaps[k]
        da = a.diff(k + 1)
        src = direct_sum(qk, ak1)
        tgt = direct_sum(below, a.term(k))
        fe = vstack(
            hstack(dq.fe.matrix, zeros(below.me.gens, ak1.me.gens)),
            hstack(gk.fe.matrix, -da.fe.matrix))
        ff = vstack(
            hstack(dq.ffix.matrix, zeros(below.mfix.gens, ak1.mfix.gens)),
            hstack(gk.ffix.matrix, -da.ffix.matrix))
        probe = MackeyHom(src, tgt,
                          ModuleHom(src.me, tgt.me, fe),
                          ModuleHom(src.mfix, tgt.mfix, ff))
        t, incl = mackey_kernel(probe)
        fnew, cover = free_cover(t)
        into_src = incl.compose(cover)
        qe, ae = qk.me.gens, ak1.me.gens
        qf, af = qk.mfix.gens, ak1.mfix.gens
        d_fe = into_src.fe.matrix[:qe, :]
        d_ff = into_src.ffix.matrix[:qf, :]
        g_fe = into_src.fe.matrix[qe:qe + ae, :]
        g_ff = into_src.ffix.matrix[qf:qf + af, :]
        qterms[k + 1] = fnew
        qdiffs[k + 1] = MackeyHom(fnew, qk,
                                  ModuleHom(fnew.me, qk.me, d_fe),
                                  ModuleHom(fnew.mfix, qk.mfix, d_ff))
        gmaps[k + 1] = MackeyHom(fnew, ak1,
                                 ModuleHom(fnew.me, ak1.me, g_fe),
                                 ModuleHom(fnew.mfix, ak1.mfix, g_ff))
    q = MackeyComplex(base, qterms, qdiffs,
                      trust=(-INF, top - 1), trust_reason="length")
    g = ComplexHom(q, a, {d: gmaps[d] for d in gmaps if d in q.terms})
    return q, g


def resolve_and_derived_tensor(a: MackeyComplex, b: MackeyComplex,
                               over: Optional[MackeyFunctor] = None,
                               length: int = 4) -> MackeyComplex:
    """Derived box product: resolve the left factor, then tensor."""
    q, _ = resolve_complex(a, length)
    return tensor_total(q, b, over)


# ---------------------------------------------------------------------------
# mod-p^k towers


def cone_of_multiplication(base: BaseRing, n: int) -> MackeyComplex:
    """Two-term free complex [unit --n--> unit] in degrees 1, 0."""
    unit = FgModule.free(base, 1)
    c = constant(unit)
    d = MackeyHom(c, c, ModuleHom(c.me, c.me, [[n]]),
                  ModuleHom(c.mfix, c.mfix, [[n]]))
    return MackeyComplex(base, {0: c, 1: c}, {1: d})


@dataclass
class ModPkTower:
    """Entries c (x)^L cone(p^k) for k = 1..kmax with the connecting maps."""

    prime: int
    entries: List[MackeyComplex]
    maps: List[ComplexHom]  # entry k+1 -> entry k

    def entry(self, k: int) -> MackeyComplex:
        return self.entries[k - 1]

    def stabilizes(self, degrees) -> bool:
        """All entries have identical homology profiles in the degrees."""
        from .mackey import invariant_profile
        tables = []
        for e in self.entries:
            tables.append({d: invariant_profile(homology(e, d)) for d in degrees})
        return all(t == tables[0] for t in tables[1:])

    def vanishes(self, degrees) -> bool:
        return all(is_acyclic_in(e, degrees) for e in self.entries)


def _tensor_with_chain_map(a: MackeyComplex, t: ComplexHom,
                           over: Optional[MackeyFunctor] = None) -> ComplexHom:
    """id_a (x) t as a chain map between total complexes."""
    from .mackey import box
    src = tensor_total(a, t.source, over)
    tgt = tensor_total(a, t.target, over)
    maps = {}
    alo, ahi = a.window
    for n in range(src.window[0], src.window[1] + 1):
        sterm, tterm = src.term(n), tgt.term(n)
        fe = zeros(tterm.me.gens, sterm.me.gens)
        ff = zeros(tterm.mfix.gens, sterm.mfix.gens)
        seo = sfo = 0
        for i in range(max(alo, n - t.source.window[1]),
                       min(ahi, n - t.source.window[0]) + 1):
            j = n - i
            sbox = box(a.term(i), t.source.term(j))
            teo = tfo = 0
            for i2 in range(max(alo, n - t.target.window[1]),
                            min(ahi, n - t.target.window[0]) + 1):
                j2 = n - i2
                tbox = box(a.term(i2), t.target.term(j2))
                if i2 == i and j2 == j:
                    mfe, mff = _box_hom_mats(MackeyHom.identity(a.term(i)),
                                             t.map_at(j))
                    fe[teo:teo + mfe.shape[0], seo:seo + mfe.shape[1]] = mfe
                    ff[tfo:tfo + mff.shape[0], sfo:sfo + mff.shape[1]] = mff
                teo += tbox.me.gens
                tfo += tbox.mfix.gens
            seo += sbox.me.gens
            sfo += sbox.mfix.gens
        maps[n] = MackeyHom(sterm, tterm,
                            ModuleHom(sterm.me, tterm.me, fe),
                            ModuleHom(sterm.mfix, tterm.mfix, ff))
    return ComplexHom(src, tgt, maps)


def mod_pk_tower(c: MackeyComplex, p: int, kmax: int) -> ModPkTower:
    """Derived reductions c (x)^L cone(p^k), k = 1..kmax, with tower maps.

    The cone terms are free, so the plain total tensor already computes
    the derived one.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    base = c.base
    entries = []
    maps = []
    for k in range(1, kmax + 1):
        entries.append(tensor_total(c, cone_of_multiplication(base, p ** k)))
    for k in range(1, kmax):
        cs = cone_of_multiplication(base, p ** (k + 1))
        ct = cone_of_multiplication(base, p ** k)
        unit = ct.term(0)
        step = ComplexHom(cs, ct, {
            0: MackeyHom.identity(unit),
            1: MackeyHom(cs.term(1), ct.term(1),
                         ModuleHom(cs.term(1).me, ct.term(1).me, [[p]]),
                         ModuleHom(cs.term(1).mfix, ct.term(1).mfix, [[p]])),
        })
        maps.append(_tensor_with_chain_map(c, step))
    return ModPkTower(prime=p, entries=entries, maps=maps)


# ---------------------------------------------------------------------------
# filtration towers


@dataclass
class FiltrationTower:
    """Descending stages Fil_0, Fil_1, ... with maps Fil_{n+1} -> Fil_n."""

    stages: List[MackeyComplex]
    maps: List[ComplexHom]

    def __post_init__(self):
        if len(self.maps) != max(len(self.stages) - 1, 0):
            raise NonNestedTower("need one structure map per adjacent pair")
        for n, f in enumerate(self.maps):
            if f.source is not self.stages[n + 1] or f.target is not self.stages[n]:
                raise NonNestedTower(f"map {n} does not join stages {n + 1}->{n}")
            if not f.is_chain_map():
                raise NonNestedTower(f"structure map {n} is not a chain map")


def tower_gr_and_completeness(t: FiltrationTower, window) -> dict:
    """Graded pieces as mapping cones plus a window-completeness flag.

    The tower is complete in the window when the homology of the final
    stage already vanishes there (stages must eventually leave the
    window, either by rising connectivity or by being zero).
    """
    grs = [cone(f) for f in t.maps]
    degrees = list(window)
    complete = is_acyclic_in(t.stages[-1], degrees) if t.stages else True
    return {"gr": grs, "complete_in_window": complete}


# ---------------------------------------------------------------------------
# pseudo-coherence recognizer


def _is_free_presentation(m: MackeyFunctor) -> bool:
    from .mackey import invariant_profile
    free_invs_e = FgModule.free(m.base, m.me.gens).invariant_factors()
    free_invs_f = FgModule.free(m.base, m.mfix.gens).invariant_factors()
    if m.me.invariant_factors() != free_invs_e:
        return False
    if m.mfix.invariant_factors() != free_invs_f:
        return False
    r2 = m.me.gens - m.mfix.gens
    r1 = m.mfix.gens - r2
    if r2 < 0 or r1 < 0:
        return False
    model = direct_sum(constant(FgModule.free(m.base, r1)),
                       induced(FgModule.free(m.base, r2)))
    return invariant_profile(m) == invariant_profile(model)


def pseudo_coherent_report(c: MackeyComplex) -> dict:
    """Recognize bounded-below complexes of finite free sums.

    Free means a direct sum of constant and induced copies of the base;
    everything the resolution machinery produces is of this shape.
    """
    terms_free = {d: _is_free_presentation(t) for d, t in c.terms.items()}
    return {
        "bounded_below": True,
        "terms_free": terms_free,
        "pseudo_coherent": all(terms_free.values()) if terms_free else True,
    }
