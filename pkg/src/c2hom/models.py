"""Desk-scale models of real Hochschild-style homology computations.

Each constructor assembles a weight-graded family of Mackey complexes out
of shifted constant, induced and fixed-point pieces, exactly following
the closed-form answers for the rings they model:

* ``hr_polynomial`` -- polynomial rings in d variables, graded by total
  monomial weight; the weight-w piece is a sum of Constant(R^mu(n,w))
  pieces shifted by n*sigma, with mu the rank of the degree-n forms.
* ``hr_sign_laurent`` -- the Laurent ring with the inversion involution;
  one constant piece in degree 0 and one in degree 1 per weight, with an
  optional power endomorphism multiplying weights on the degree-1 part,
  and a sigma-rewrite of the degree-1 part when 2 is invertible.
* ``hr_conjugation_plane`` -- the plane with coordinate-swap involution:
  a fixed-point piece in degree 0, an induced piece in degree 1, and a
  fixed-point piece shifted by 1 + sigma, per total weight.
* ``thr_perfectoid_model`` -- the free associative algebra on a
  (1+sigma)-cell over F_p or Z/p^k, truncated at polynomial degree nmax,
  together with the degree-(1+sigma) multiplication map u.
* ``cofiber_u_check`` -- the mapping cone of u, which must be the
  constant functor concentrated in degree 0 inside the trusted window.

2-inversion obstructions are reported, never silently ignored: the
sigma-rewrites only exist when 2 is invertible in the base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import UnsupportedBase, ZeroPowerMap
from .homalg import (
    INF,
    ComplexHom,
    MackeyComplex,
    complex_from_functor,
    cone,
    direct_sum_complexes,
    e_homology,
    homology,
    homology_table,
    sigma_cell_complex,
    sigma_cell_unit,
    sigma_shift,
    tensor_total,
)
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    constant,
    constant_unit,
    fixed_point,
    induced,
    invariant_profile,
    isomorphic,
)
from .zlin import BaseRing, FgModule, ModuleHom, identity, zeros


@dataclass
class WeightGradedComplex:
    """Finite family of complexes indexed by weight, with a description."""

    base: BaseRing
    pieces: Dict[int, MackeyComplex]
    meta: str = ""

    def weights(self) -> List[int]:
        return sorted(self.pieces)

    def piece(self, w: int) -> MackeyComplex:
        return self.pieces[w]


# ---------------------------------------------------------------------------
# polynomial rings


def form_rank(d: int, n: int, w: int) -> int:
    """Rank mu(n, w): weight-w monomial basis n-forms in d variables.

    A basis form is a monomial times an n-fold wedge of coordinate
    differentials; each differential contributes one to the weight.
    """
    if n < 0 or n > d or w < n:
        return 0
    if d == 0:
        return 1 if (n == 0 and w == 0) else 0
    return math.comb(d, n) * math.comb(w - n + d - 1, d - 1)


def _single_variable_pieces(base: BaseRing, wmax: int) -> Dict[int, MackeyComplex]:
    unit = FgModule.free(base, 1)
    pieces = {0: complex_from_functor(constant(unit))}
    for w in range(1, wmax + 1):
        merged, _ = direct_sum_complexes([
            complex_from_functor(constant(unit)),
            sigma_cell_complex(unit, 1),
        ])
        pieces[w] = merged
    return pieces


def hr_polynomial(r: BaseRing, d: int, wmax: int) -> WeightGradedComplex:
    """Weight-graded model for a polynomial ring in d variables.

    The d-fold total tensor of the one-variable model; the weight-w piece
    has homology Constant(R^mu(n,w)) in sigma-degree n.
    """
    if d < 0 or wmax < 0:
        raise ValueError("d and wmax must be nonnegative")
    unit = FgModule.free(r, 1)
    if d == 0:
        from .homalg import zero_complex
        pieces = {0: complex_from_functor(constant(unit))}
        for w in range(1, wmax + 1):
            pieces[w] = zero_complex(r)
        return WeightGradedComplex(
            r, pieces,
            meta="zero-variable polynomial model: the unit in degree 0")
    pieces = _single_variable_pieces(r, wmax)
    for _ in range(d - 1):
        nxt: Dict[int, MackeyComplex] = {}
        single = _single_variable_pieces(r, wmax)
        for w in range(wmax + 1):
            parts = []
            for u in range(w + 1):
                v = w - u
                parts.append(tensor_total(pieces[u], single[v]))
            merged, _ = direct_sum_complexes(parts)
            nxt[w] = merged
        pieces = nxt
    for w, p in pieces.items():
        p.weight = w
    return WeightGradedComplex(
        r, pieces,
        meta=f"polynomial model in {d} variables graded by monomial weight")


def hr_polynomial_sigma_parts(r: BaseRing, d: int, w: int):
    """Summand list (module, n) predicted for the weight-w piece."""
    parts = []
    for n in range(0, d + 1):
        mu = form_rank(d, n, w)
        if mu:
            parts.append((FgModule.free(r, mu), n))
    return parts


# ---------------------------------------------------------------------------
# sign Laurent ring


@dataclass
class PowerMapReport:
    """The endomorphism induced by x -> x^n: identity on the degree-0
    summand, weight j -> n*j on the degree-1 summand."""

    n: int
    degree_zero: str
    degree_one_weight_map: Dict[int, int]


@dataclass
class SignLaurentModel:
    plain: WeightGradedComplex
    sigma_form: Optional[WeightGradedComplex]
    obstruction: Optional[str]
    power_map: Optional[PowerMapReport]
    sigma_agrees: Optional[bool]


def hr_sign_laurent(r: BaseRing, wmin: int, wmax: int,
                    power: Optional[int] = None) -> SignLaurentModel:
    """Laurent ring with inversion involution, weights in [wmin, wmax].

    Every weight carries Constant(R) in degrees 0 and 1.  When 2 is
    invertible the degree-1 summand rewrites as a sign fixed-point piece
    shifted by sigma, and the homology tables are asserted to agree;
    otherwise the obstruction is reported and no rewrite is emitted.
    """
    if power is not None and power == 0:
        raise ZeroPowerMap("power map requires a nonzero exponent")
    if wmin > wmax:
        raise ValueError("empty weight window")
    unit = FgModule.free(r, 1)
    plain_pieces: Dict[int, MackeyComplex] = {}
    for j in range(wmin, wmax + 1):
        merged, _ = direct_sum_complexes([
            complex_from_functor(constant(unit), 0),
            complex_from_functor(constant(unit), 1),
        ])
        plain_pieces[j] = merged
    plain = WeightGradedComplex(
        r, plain_pieces,
        meta="Laurent ring with inversion involution; a unit class and a "
             "degree-1 class per weight")

    sigma_form = None
    obstruction = None
    agrees = None
    if r.two_invertible():
        sigma_pieces: Dict[int, MackeyComplex] = {}
        for j in range(wmin, wmax + 1):
            sign_piece = fixed_point(unit, [[-1]])
            shifted = tensor_total(complex_from_functor(sign_piece),
                                   sigma_cell_unit(r, 1))
            merged, _ = direct_sum_complexes([
                complex_from_functor(constant(unit), 0), shifted])
            sigma_pieces[j] = merged
        sigma_form = WeightGradedComplex(
            r, sigma_pieces,
            meta="sigma-rewrite: degree-1 class as a sign fixed-point "
                 "piece shifted by sigma")
        agrees = all(
            invariant_profile(homology(plain_pieces[j], dd))
            == invariant_profile(homology(sigma_pieces[j], dd))
            for j in range(wmin, wmax + 1) for dd in (-1, 0, 1, 2))
    else:
        obstruction = ("2 is not invertible in the base, so the degree-1 "
                       "summand admits no sigma-rewrite")

    power_map = None
    if power is not None:
        power_map = PowerMapReport(
            n=power,
            degree_zero="identity on every weight",
            degree_one_weight_map={j: power * j
                                   for j in range(wmin, wmax + 1)})
    return SignLaurentModel(plain=plain, sigma_form=sigma_form,
                            obstruction=obstruction, power_map=power_map,
                            sigma_agrees=agrees)


# ---------------------------------------------------------------------------
# conjugation plane


def _swap_monomial_module(r: BaseRing, k: int):
    """Weight-k monomials in two swapped variables: R^(k+1) with the
    order-reversing permutation involution."""
    m = FgModule.free(r, k + 1)
    perm = zeros(k + 1, k + 1)
    for a in range(k + 1):
        perm[a, k - a] = 1
    return m, perm


@dataclass
class ConjugationPlaneModel:
    plain: WeightGradedComplex
    omega_form: Optional[WeightGradedComplex]
    obstruction: Optional[str]
    omega_agrees: Optional[bool]


def hr_conjugation_plane(r: BaseRing, wmax: int) -> ConjugationPlaneModel:
    """Plane with coordinate-swap involution, graded by total weight.

    Weight k carries the swap fixed-point piece on the k-th monomials in
    degree 0, an induced piece of rank k in degree 1 (the two polynomial
    copies exchanged by the involution, at internal degree k-1), and the
    (k-2)-nd fixed-point piece shifted by 1 + sigma.  When 2 is
    invertible this is compared with the form decomposition
    (+)_{i=0..2} (forms with involution)[i*sigma].
    """
    if wmax < 0:
        raise ValueError("wmax must be nonnegative")
    plain_pieces: Dict[int, MackeyComplex] = {}
    for k in range(wmax + 1):
        parts = []
        m0, p0m = _swap_monomial_module(r, k)
        parts.append(complex_from_functor(fixed_point(m0, p0m), 0))
        if k >= 1:
            parts.append(complex_from_functor(
                induced(FgModule.free(r, k)), 1))
        if k >= 2:
            m2, p2m = _swap_monomial_module(r, k - 2)
            parts.append(tensor_total(
                complex_from_functor(fixed_point(m2, p2m), 1),
                sigma_cell_unit(r, 1)))
        merged, _ = direct_sum_complexes(parts)
        plain_pieces[k] = merged
    plain = WeightGradedComplex(
        r, plain_pieces,
        meta="plane with coordinate-swap involution; monomials, the "
             "exchanged pair of polynomial copies, and a 1+sigma class")

    omega_form = None
    obstruction = None
    agrees = None
    if r.two_invertible():
        omega_pieces: Dict[int, MackeyComplex] = {}
        for k in range(wmax + 1):
            parts = []
            m0, p0m = _swap_monomial_module(r, k)
            parts.append(complex_from_functor(fixed_point(m0, p0m), 0))
            if k >= 1:
                one_forms, q = _one_form_module(r, k)
                parts.append(tensor_total(
                    complex_from_functor(fixed_point(one_forms, q), 0),
                    sigma_cell_unit(r, 1)))
            if k >= 2:
                m2, p2m = _swap_monomial_module(r, k - 2)
                parts.append(tensor_total(
                    complex_from_functor(fixed_point(m2, -p2m), 0),
                    sigma_cell_unit(r, 2)))
            merged, _ = direct_sum_complexes(parts)
            omega_pieces[k] = merged
        omega_form = WeightGradedComplex(
            r, omega_pieces,
            meta="form decomposition: i-forms with their induced "
                 "involutions shifted by i*sigma")
        agrees = all(
            invariant_profile(homology(plain_pieces[k], dd))
            == invariant_profile(homology(omega_pieces[k], dd))
            for k in range(wmax + 1) for dd in range(-1, 4))
    else:
        obstruction = ("2 is not invertible in the base, so the middle "
                       "summand admits no form rewrite")
    return ConjugationPlaneModel(plain=plain, omega_form=omega_form,
                                 obstruction=obstruction, omega_agrees=agrees)


def _one_form_module(r: BaseRing, k: int):
    """Weight-k one-forms on the swap plane: rank 2k, the involution
    exchanging the two coordinate differentials through the monomial swap."""
    m = FgModule.free(r, 2 * k)
    q = zeros(2 * k, 2 * k)
    # basis: monomial a of degree k-1 times dv (first block), times dw (second)
    for a in range(k):
        # v^a w^(k-1-a) dv  <->  v^(k-1-a) w^a dw
        q[k + (k - 1 - a), a] = 1
        q[k - 1 - a, k + a] = 1
    return m, q


# ---------------------------------------------------------------------------
# perfectoid free-algebra model


def _require_prime_power(r: BaseRing) -> Tuple[int, int]:
    if not r.is_modular:
        raise UnsupportedBase("model needs a residue ring Z/p^k")
    m = r.modulus
    p = None
    for q in range(2, m + 1):
        if m % q == 0:
            p = q
            break
    k = 0
    n = m
    while n % p == 0:
        n //= p
        k += 1
    if n != 1:
        raise UnsupportedBase(f"modulus {m} is not a prime power")
    return p, k


@dataclass
class PerfectoidModel:
    base: BaseRing
    nmax: int
    complex: MackeyComplex
    u: ComplexHom  # multiplication by the (1+sigma)-class, source -> complex
    meta: str = ("free associative algebra on a class in bidegree "
                 "1 + sigma, truncated")

    @property
    def prime(self) -> int:
        return _require_prime_power(self.base)[0]

    @property
    def slice_range_hint(self) -> int:
        """Largest filtration degree unaffected by the nmax truncation."""
        return 2 * self.nmax + 1


def thr_perfectoid_model(r: BaseRing, nmax: int) -> PerfectoidModel:
    """(+)_{n=0..nmax} Constant(R)[n + n*sigma] with the shift-by-one map.

    The structure map u sends the n-th summand of the (1+sigma)-shift
    identically onto the (n+1)-st summand; the top summand truncates to
    zero, which is what bounds the trusted window of downstream reads.
    """
    _require_prime_power(r)
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    unit = FgModule.free(r, 1)
    cells = [sigma_cell_complex(unit, n, degree=n) for n in range(nmax + 2)]
    model, incls = direct_sum_complexes(cells[: nmax + 1])
    source, src_incls = direct_sum_complexes(cells[1: nmax + 2])
    maps = {}
    for d in range(source.window[0], source.window[1] + 1):
        s, t = source.term(d), model.term(d)
        fe = zeros(t.me.gens, s.me.gens)
        ff = zeros(t.mfix.gens, s.mfix.gens)
        for j in range(1, nmax + 1):  # summand j of model = summand j-1 of source
            cell_term = cells[j].term(d)
            if cell_term.is_zero():
                continue
            # place identity blocks by offsets
            seo = _block_offset(src_incls[j - 1], d, "e")
            teo = _block_offset(incls[j], d, "e")
            for i in range(cell_term.me.gens):
                fe[teo + i, seo + i] = 1
            sfo = _block_offset(src_incls[j - 1], d, "f")
            tfo = _block_offset(incls[j], d, "f")
            for i in range(cell_term.mfix.gens):
                ff[tfo + i, sfo + i] = 1
        maps[d] = MackeyHom(s, t, ModuleHom(s.me, t.me, fe),
                            ModuleHom(s.mfix, t.mfix, ff))
    u = ComplexHom(source, model, maps)
    return PerfectoidModel(base=r, nmax=nmax, complex=model, u=u)


def _block_offset(incl: ComplexHom, d: int, level: str) -> int:
    h = incl.maps.get(d)
    if h is None:
        return 0
    mat = h.fe.matrix if level == "e" else h.ffix.matrix
    for i in range(mat.shape[0]):
        if any(mat[i, j] != 0 for j in range(mat.shape[1])):
            return i
    return 0


def perfectoid_shift_cross_check(model: PerfectoidModel,
                                 degrees=None) -> bool:
    """Homology agreement of the compressed (1+sigma)-shift with the
    honest tensor construction; pins the u-source representation."""
    dense = sigma_shift(model.complex, 1, shift=1)
    degrees = degrees if degrees is not None else range(
        0, 2 * model.nmax + 2)
    return all(
        invariant_profile(homology(model.u.source, d))
        == invariant_profile(homology(dense, d)) for d in degrees)


@dataclass
class CofiberReport:
    cone: MackeyComplex
    matches_hr: bool
    window: Tuple[int, int]
    table: Dict[int, MackeyFunctor]


def cofiber_u_check(r: BaseRing, nmax: int) -> CofiberReport:
    """Mapping cone of u; inside [0, nmax-1] it must be the constant
    functor concentrated in degree 0."""
    model = thr_perfectoid_model(r, nmax)
    c = cone(model.u)
    c.trust = (-INF, nmax - 1) if nmax >= 1 else (-INF, 0)
    window = (0, max(nmax - 1, 0))
    table = homology_table(c, range(window[0], window[1] + 1))
    ok = isomorphic(table[0], constant_unit(r))
    for d in range(1, window[1] + 1):
        ok = ok and table[d].is_zero()
    return CofiberReport(cone=c, matches_hr=ok, window=window, table=table)
