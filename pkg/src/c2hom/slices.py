"""Slice invariants of Mackey complexes.

The even invariant in filtration degree 2n is the Mackey homology in
bidegree n + n*sigma; the odd one in degree 2n+1 applies P^0 (kill the
kernel of restriction) to the homology in bidegree (n+1) + n*sigma.
These closed formulas are applied to arbitrary complexes; agreement with
a genuine localization tower is only claimed on trusted windows and on
sums of sigma-shifted constants, for which the recursive filtration is
constructed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import NotSigmaSums
from .homalg import (
    ComplexHom,
    FiltrationTower,
    MackeyComplex,
    cone,
    direct_sum_complexes,
    e_homology,
    homology,
    is_acyclic_in,
    sigma_cell_complex,
    sigma_shift,
    zero_complex,
)
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    constant,
    invariant_profile,
    p0,
    same_invariants,
    validate,
)
from .zlin import CombineKind, FgModule, ModuleHom, combine, identity, zeros


def rho(c: MackeyComplex, n: int) -> MackeyFunctor:
    """Slice invariant rho_n of a complex."""
    if n % 2 == 0:
        m = n // 2
        return homology(c, m, m)
    m = (n - 1) // 2
    return p0(homology(c, m + 1, m))


@dataclass
class SliceTable:
    """Map n -> rho_n over an integer interval, with evenness flags."""

    range: Tuple[int, int]
    entries: Dict[int, MackeyFunctor]
    even: bool
    very_even: bool

    def entry(self, n: int) -> MackeyFunctor:
        return self.entries[n]

    def nonzero_degrees(self) -> List[int]:
        return [n for n in sorted(self.entries) if not self.entries[n].is_zero()]


def _is_constant_on_fix(m: MackeyFunctor) -> bool:
    if m.is_zero():
        return True
    return same_invariants(m, constant(m.mfix))


def rho_table(c: MackeyComplex, rng: Optional[Tuple[int, int]] = None) -> SliceTable:
    """Tabulate rho_n for n in the closed interval ``rng``.

    even: all odd entries vanish.  very even: even, every even entry is
    (up to the invariant tuple) the constant functor on its fixed level,
    and that fixed level agrees with the homology of the underlying-level
    evaluation in the same total degree.
    """
    if rng is None:
        hi = max(c.window[1], 0)
        rng = (-2, 2 * hi)
    lo, hi = rng
    entries: Dict[int, MackeyFunctor] = {}
    # rho_{2n} and rho_{2n+1} read the same shifted complex; shift once per n
    diag_values = sorted({m // 2 for m in range(lo, hi + 1)}
                         | {(m - 1) // 2 for m in range(lo, hi + 1)
                            if m % 2 != 0})
    for n in diag_values:
        shifted = sigma_shift(c, -n)
        if lo <= 2 * n <= hi:
            entries[2 * n] = homology(shifted, n)
        if lo <= 2 * n + 1 <= hi:
            entries[2 * n + 1] = p0(homology(shifted, n + 1))
    even = all(entries[n].is_zero() for n in range(lo, hi + 1) if n % 2 != 0)
    very = even
    if even:
        for n in range(lo, hi + 1):
            if n % 2 != 0 or entries[n].is_zero():
                continue
            if not _is_constant_on_fix(entries[n]):
                very = False
                break
            pi = e_homology(c, n)
            if entries[n].mfix.invariant_factors() != pi.invariant_factors():
                very = False
                break
    return SliceTable(range=rng, entries=entries, even=even, very_even=very)


def vanishing_test(c: MackeyComplex, rng: Tuple[int, int]) -> bool:
    """True iff every rho_n in the range vanishes and the complex is acyclic.

    The second clause guards the finite-range approximation: slice data
    outside the tested range still shows up in ordinary homology.
    """
    lo, hi = rng
    for n in range(lo, hi + 1):
        if not rho(c, n).is_zero():
            return False
    wlo, whi = c.window
    return is_acyclic_in(c, range(wlo, whi + 1))


# ---------------------------------------------------------------------------
# the sigma-sums filtration


def sigma_filtration(parts: List[Tuple[FgModule, int]],
                     check: bool = True) -> FiltrationTower:
    """Filtration of a sum of sigma-shifted constants by shift degree.

    ``parts`` lists (module, n) summands of (+) Constant(F_n)[n*sigma];
    stage k keeps the summands with n >= k, so gr^k recovers
    Constant(F_k)[k*sigma].  When ``check`` is set, each graded piece is
    compared against the constant functor on the homology of the
    underlying-level evaluation in degree k.
    """
    if not parts:
        raise NotSigmaSums("empty summand list")
    base = parts[0][0].base
    grouped: Dict[int, FgModule] = {}
    for mod, n in parts:
        if not isinstance(n, int) or n < 0:
            raise NotSigmaSums(f"shift degree must be a nonnegative integer, got {n}")
        if mod.base != base:
            raise NotSigmaSums("summands over different base rings")
        grouped[n] = mod if n not in grouped else combine(
            grouped[n], mod, CombineKind.DIRECT_SUM)
    nmax = max(grouped)
    cells = {n: sigma_cell_complex(grouped[n], n) for n in sorted(grouped)}

    stages: List[MackeyComplex] = []
    summand_lists: List[List[int]] = []
    for k in range(nmax + 2):
        keep = [n for n in sorted(grouped) if n >= k]
        summand_lists.append(keep)
        if keep:
            stage, _ = direct_sum_complexes([cells[n] for n in keep])
        else:
            stage = zero_complex(base)
        stages.append(stage)

    maps: List[ComplexHom] = []
    for k in range(nmax + 1):
        src, tgt = stages[k + 1], stages[k]
        dropped = [n for n in summand_lists[k] if n not in summand_lists[k + 1]]
        hom_maps = {}
        if not src.is_empty():
            pad_e = {d: 0 for d in range(tgt.window[0], tgt.window[1] + 1)}
            pad_f = dict(pad_e)
            for n in dropped:
                for d in range(cells[n].window[0], cells[n].window[1] + 1):
                    pad_e[d] += cells[n].term(d).me.gens
                    pad_f[d] += cells[n].term(d).mfix.gens
            for d in range(src.window[0], src.window[1] + 1):
                s, t = src.term(d), tgt.term(d)
                fe = zeros(t.me.gens, s.me.gens)
                for j in range(s.me.gens):
                    fe[pad_e.get(d, 0) + j, j] = 1
                ff = zeros(t.mfix.gens, s.mfix.gens)
                for j in range(s.mfix.gens):
                    ff[pad_f.get(d, 0) + j, j] = 1
                hom_maps[d] = MackeyHom(s, t,
                                        ModuleHom(s.me, t.me, fe),
                                        ModuleHom(s.mfix, t.mfix, ff))
        maps.append(ComplexHom(src, tgt, hom_maps))

    tower = FiltrationTower(stages, maps)
    if check:
        _check_graded_pieces(tower, grouped, cells, nmax)
    return tower


def _check_graded_pieces(tower: FiltrationTower, grouped, cells, nmax: int):
    for k in range(nmax + 1):
        gr = cone(tower.maps[k])
        expected = cells.get(k)
        degrees = range(0, nmax + 2)
        for d in degrees:
            got = invariant_profile(homology(gr, d))
            want = invariant_profile(homology(expected, d)) if expected \
                else invariant_profile(homology(zero_complex(tower.stages[0].base), d))
            if got != want:
                raise NotSigmaSums(
                    f"graded piece {k} disagrees with its constant model "
                    f"in degree {d}")
        if k in grouped:
            pi = e_homology(tower.stages[0], k)
            if pi.invariant_factors() != grouped[k].invariant_factors():
                raise NotSigmaSums(
                    f"graded piece {k} disagrees with the underlying-level "
                    f"homology in degree {k}")
