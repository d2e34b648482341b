"""Acceptance criteria, one test per criterion.

Each test prints a single PASS line when its checks go through (run with
``pytest tests/test_acceptance.py -v -s``); a failed assertion is the
FAIL line.  Budgets are asserted where stated.
"""

import random
import time

from c2hom.homalg import (
    complex_from_functor, direct_sum_complexes, e_homology, homology,
    mod_pk_tower, resolve_and_derived_tensor, sigma_cell_complex, sigma_shift,
)
from c2hom.mackey import (
    MackeyFunctor, box, box_constant_closed_form, burnside, constant,
    constant_unit, find_isomorphism, finite_mackey_skeleton, fixed_point,
    induced, invariant_profile, isomorphic, p0, same_invariants,
    sign_fixed_point, validate,
)
from c2hom.models import (
    cofiber_u_check, form_rank, hr_conjugation_plane, hr_polynomial,
    hr_polynomial_sigma_parts, hr_sign_laurent, thr_perfectoid_model,
)
from c2hom.slices import rho_table, sigma_filtration
from c2hom.zlin import (
    BaseRing, CombineKind, FgModule, ModuleHom, combine, identity, intmat,
)

Z = BaseRing.Z()
F2, F3, F5 = BaseRing.Zmod(2), BaseRing.Zmod(3), BaseRing.Zmod(5)
Z4, Z5, Z9 = BaseRing.Zmod(4), BaseRing.Zmod(5), BaseRing.Zmod(9)


def _ok(idx, text):
    print(f"ACCEPTANCE {idx}: PASS - {text}")


def cyc(base, n):
    return FgModule.cyclic(base, n)


def pair_module(base, a, b):
    return FgModule(base, 2, [[a, 0], [0, b]])


def corpus_50():
    """Deterministic corpus of 50 Mackey functors, level orders <= 64."""
    out = []
    # constants
    for base, n in [(Z, 2), (Z, 3), (Z, 4), (Z, 8), (Z, 6), (Z, 5), (Z, 9),
                    (F2, 2), (F3, 3), (F5, 5), (Z4, 4), (Z4, 2), (Z9, 9)]:
        out.append(constant(cyc(base, n)))
    out.append(constant(pair_module(Z, 2, 2)))
    out.append(constant(pair_module(Z, 2, 4)))
    out.append(constant(pair_module(F3, 3, 3)))
    # induced
    for base, n in [(Z, 2), (Z, 3), (Z, 4), (Z, 6), (Z, 8), (Z, 5),
                    (F2, 2), (F3, 3), (F5, 5), (Z4, 4), (Z9, 3)]:
        out.append(induced(cyc(base, n)))
    out.append(induced(pair_module(Z, 2, 2)))
    out.append(induced(pair_module(F2, 2, 2)))
    # sign fixed points
    for base, n in [(Z, 2), (Z, 3), (Z, 4), (Z, 8), (Z, 5), (Z, 9),
                    (F3, 3), (F5, 5), (Z4, 4), (Z9, 9)]:
        out.append(sign_fixed_point(base, n) if base == Z
                   else fixed_point(cyc(base, n), [[-1]]))
    # swap fixed points on rank-2 modules
    out.append(fixed_point(pair_module(Z, 4, 4), [[0, 1], [1, 0]]))
    out.append(fixed_point(pair_module(F3, 3, 3), [[0, 1], [1, 0]]))
    out.append(fixed_point(pair_module(Z, 2, 2), [[0, 1], [1, 0]]))
    # more finite pieces
    out.append(constant(cyc(Z9, 3)))
    out.append(induced(cyc(Z4, 2)))
    out.append(box(induced(cyc(Z, 2)), sign_fixed_point(Z, 2)))
    # box closures
    out.append(box(constant(cyc(Z, 4)), induced(cyc(Z, 2))))
    out.append(box(induced(cyc(F2, 2)), induced(cyc(F2, 2))))
    out.append(box(sign_fixed_point(Z, 4), constant(cyc(Z, 2))))
    out.append(box(constant(cyc(F3, 3)), constant(cyc(F3, 3))))
    # skeleton layer
    out.append(finite_mackey_skeleton(induced(cyc(Z, 3))).cokernel)
    assert len(out) == 50, len(out)
    for m in out:
        assert m.me.order() is not None and m.me.order() <= 64, m
        assert m.mfix.order() is not None and m.mfix.order() <= 64, m
    return out


def test_criterion_1_perfectoid_slice_table():
    t0 = time.monotonic()
    for base in (F2, F3, F5):
        model = thr_perfectoid_model(base, 6)
        table = rho_table(model.complex, (-2, 13))
        want = invariant_profile(constant_unit(base))
        for n in range(-2, 14):
            got = table.entry(n)
            if n % 2 == 0 and 0 <= n <= 12:
                assert invariant_profile(got) == want, (base, n)
            else:
                assert got.is_zero(), (base, n)
        assert table.even and table.very_even, base
    elapsed = time.monotonic() - t0
    assert elapsed < 60, f"budget exceeded: {elapsed:.1f}s"
    _ok(1, f"perfectoid slice tables over F2/F3/F5, nmax=6 "
           f"({elapsed:.1f}s < 60s)")


def test_criterion_2_cofiber_sequence():
    t0 = time.monotonic()
    for base in (F2, F3):
        rep = cofiber_u_check(base, 5)
        assert isomorphic(rep.table[0], constant_unit(base)), base
        for d in range(1, 5):
            assert rep.table[d].is_zero(), (base, d)
        assert rep.matches_hr
    elapsed = time.monotonic() - t0
    assert elapsed < 30, f"budget exceeded: {elapsed:.1f}s"
    _ok(2, f"cone of the (1+sigma)-class is constant in degree 0, "
           f"nmax=5 ({elapsed:.1f}s < 30s)")


def test_criterion_3_real_hkr_polynomials():
    t0 = time.monotonic()
    for d in (0, 1, 2, 3):
        model = hr_polynomial(F3, d, 4)
        for w in range(0, 5):
            piece = model.piece(w)
            for n in range(0, d + 1):
                got = len(e_homology(piece, n).invariant_factors())
                assert got == form_rank(d, n, w), (d, w, n)
            parts = hr_polynomial_sigma_parts(F3, d, w)
            if parts:
                tower = sigma_filtration(parts)  # validates graded pieces
                stage0 = tower.stages[0]
                for dd in range(0, d + 2):
                    assert invariant_profile(homology(stage0, dd)) == \
                        invariant_profile(homology(piece, dd)), (d, w, dd)
    elapsed = time.monotonic() - t0
    assert elapsed < 60, f"budget exceeded: {elapsed:.1f}s"
    _ok(3, f"polynomial models d<=3, wmax=4 match form ranks and the "
           f"sigma filtration ({elapsed:.1f}s < 60s)")


def test_criterion_4_sigma_shift_structure():
    for base in (F3, Z5, Z9):
        c = sigma_shift(complex_from_functor(constant_unit(base)), 1)
        h1 = homology(c, 1)
        expected = fixed_point(FgModule.free(base, 1), [[-1]])
        assert isomorphic(h1, expected), base
        assert homology(c, 0).is_zero(), base
        assert homology(c, 2).is_zero(), base
    for base in (Z, F2):
        c = sigma_shift(complex_from_functor(constant_unit(base)), 1)
        h0 = homology(c, 0)
        assert h0.me.is_zero(), base
        assert h0.mfix.invariant_factors() == (2,), base
    _ok(4, "sigma shift: sign fixed point in degree 1; 2-torsion cokernel "
           "at the fixed level for Z and F2")


def test_criterion_5_box_laws_and_oracle():
    t0 = time.monotonic()
    corpus = corpus_50()
    rng = random.Random(20250810)

    for m in corpus:
        assert same_invariants(box(burnside(m.base), m), m), m

    same_base_pairs = [(a, b) for a in corpus for b in corpus
                       if a.base == b.base]
    for a, b in rng.sample(same_base_pairs, 60):
        assert same_invariants(box(a, b), box(b, a)), (a, b)

    triples = [(a, b, c) for (a, b) in rng.sample(same_base_pairs, 12)
               for c in [rng.choice([m for m in corpus if m.base == a.base])]]
    for a, b, c in triples:
        assert same_invariants(box(box(a, b), c), box(a, box(b, c))), (a, b, c)

    induceds = [m for m in corpus if m.base == Z][:6]
    seed_mod = cyc(Z, 4)
    for n in induceds:
        lhs = box(induced(seed_mod), n)
        rhs = induced(combine(seed_mod, n.me, CombineKind.TENSOR))
        assert same_invariants(lhs, rhs), n

    for m in rng.sample(corpus, 25):
        a = cyc(m.base, 2 if m.base == Z else m.base.modulus)
        assert same_invariants(box(m, constant(a)),
                               box_constant_closed_form(m, a)), m

    witnessed = 0
    for a, b in same_base_pairs:
        if witnessed >= 8:
            break
        left, right = box(a, b), box(b, a)
        order = left.order()
        if order is None or order > 256:
            continue
        assert find_isomorphism(left, right) is not None, (a, b)
        witnessed += 1
    assert witnessed == 8
    elapsed = time.monotonic() - t0
    assert elapsed < 120, f"budget exceeded: {elapsed:.1f}s"
    _ok(5, f"box laws on the 50-functor corpus with witness search "
           f"({elapsed:.1f}s < 120s)")


def _perturbations(rng, count=20):
    """Random single-entry tampering with a structure map.

    Draws that merely rescale by a unit (still a valid diagram) are
    regenerated; the survivors must all be caught by validate.
    """
    bases = [
        constant(cyc(Z, 8)),
        induced(cyc(F3, 3)),
        fixed_point(cyc(Z5, 5), [[-1]]),
        constant(cyc(Z9, 9)),
        induced(cyc(Z, 4)),
    ]
    out = []
    guard = 0
    while len(out) < count and guard < 400:
        guard += 1
        m = rng.choice(bases)
        which = rng.choice(["res", "tr", "w"])
        h = getattr(m, which)
        mat = h.matrix.copy()
        i = rng.randrange(mat.shape[0])
        j = rng.randrange(mat.shape[1])
        mat[i, j] += rng.choice([1, 2, 3, -1])
        tampered = ModuleHom(h.source, h.target, mat)
        if tampered.equal_to(h):
            continue
        parts = {"res": m.res, "tr": m.tr, "w": m.w}
        parts[which] = tampered
        cand = MackeyFunctor(m.me, m.mfix, parts["res"], parts["tr"],
                             parts["w"])
        rep = validate(cand)
        if rep["mackey_axioms"] and rep["green_module"]:
            continue  # a unit rescaling; not an axiom perturbation
        out.append(cand)
    assert len(out) == count
    return out


def test_criterion_6_green_module_characterization():
    for base in (Z, F2, F3, F5, Z4, Z9):
        unit = FgModule.free(base, 1)
        assert validate(constant(unit))["green_module"]
        assert validate(induced(unit))["green_module"]
        assert validate(fixed_point(unit, [[-1]]))["green_module"]
        b = validate(burnside(base))
        assert b["mackey_axioms"] and not b["green_module"]
    rng = random.Random(20250811)
    tampered = _perturbations(rng, 20)
    for cand in tampered:
        rep = validate(cand)
        assert not (rep["mackey_axioms"] and rep["green_module"])
    _ok(6, "module characterization: constructors pass, Burnside fails, "
           "20 tampered diagrams rejected")


def test_criterion_7_sign_laurent_and_conjugation_plane():
    lau = hr_sign_laurent(F3, -4, 4, power=3)
    for j in lau.plain.weights():
        piece = lau.plain.piece(j)
        assert isomorphic(homology(piece, 0), constant_unit(F3)), j
        assert isomorphic(homology(piece, 1), constant_unit(F3)), j
    assert lau.sigma_agrees is True
    assert lau.power_map.degree_one_weight_map == \
        {j: 3 * j for j in range(-4, 5)}
    assert lau.power_map.degree_zero == "identity on every weight"
    lau2 = hr_sign_laurent(F2, -4, 4)
    assert lau2.sigma_form is None and lau2.obstruction is not None

    conj = hr_conjugation_plane(F3, 4)
    for k in range(0, 5):
        piece = conj.plain.piece(k)
        for n in (0, 1, 2):
            assert len(e_homology(piece, n).invariant_factors()) == \
                form_rank(2, n, k), (k, n)
        if k >= 1:
            assert invariant_profile(homology(piece, 1)) == \
                invariant_profile(induced(FgModule.free(F3, k))), k
    assert conj.omega_agrees is True
    conj2 = hr_conjugation_plane(F2, 3)
    assert conj2.omega_form is None and conj2.obstruction is not None
    _ok(7, "sign-Laurent and conjugation-plane tables for |weight| <= 4, "
           "with rewrites over F3 and the 2-inversion obstruction over F2")


def test_criterion_8_tower_stabilization_and_coprime_vanishing():
    for p, base in ((2, F2), (3, F3), (5, F5)):
        c = complex_from_functor(constant(FgModule.free(base, 1)))
        tower = mod_pk_tower(c, p, 3)
        assert tower.stabilizes(range(0, 2)), p
    model = thr_perfectoid_model(F3, 1)
    assert mod_pk_tower(model.complex, 3, 2).stabilizes(range(0, 4))
    for p, ell in ((3, 5), (2, 3), (5, 4)):
        c = complex_from_functor(constant(cyc(Z, ell)))
        tower = mod_pk_tower(c, p, 3)
        assert tower.vanishes(range(-1, 3)), (p, ell)
    _ok(8, "mod p^k towers are k-independent on F_p inputs and vanish on "
           "coprime torsion")


def test_criterion_9_finiteness_of_derived_box():
    pairs = [
        (constant(cyc(Z, 2)), constant(cyc(Z, 2))),
        (constant(cyc(Z, 2)), constant(cyc(Z, 4))),
        (constant(cyc(Z, 3)), constant(cyc(Z, 9))),
        (constant(cyc(Z, 4)), induced(cyc(Z, 2))),
        (induced(cyc(Z, 2)), induced(cyc(Z, 3))),
        (sign_fixed_point(Z, 2), constant(cyc(Z, 2))),
        (sign_fixed_point(Z, 3), constant(cyc(Z, 9))),
        (sign_fixed_point(Z, 4), induced(cyc(Z, 4))),
        (constant(pair_module(Z, 2, 2)), constant(cyc(Z, 2))),
        (finite_mackey_skeleton(induced(cyc(Z, 3))).cokernel,
         constant(cyc(Z, 3))),
    ]
    assert len(pairs) == 10
    for idx, (a, b) in enumerate(pairs):
        out = resolve_and_derived_tensor(complex_from_functor(a),
                                         complex_from_functor(b), length=4)
        top = int(out.trust[1])
        for d in range(0, top + 1):
            h = homology(out, d)
            assert h.is_finite(), (idx, d)
    _ok(9, "derived box homology of 10 finite pairs is finite in every "
           "guaranteed degree")


def test_criterion_10_evenness_equivalence():
    unit3 = FgModule.free(F3, 1)
    probes = [
        complex_from_functor(constant_unit(F3)),
        sigma_shift(complex_from_functor(constant_unit(F3)), 1),
        sigma_cell_complex(unit3, 2, degree=2),
        direct_sum_complexes([
            sigma_cell_complex(unit3, n, degree=n) for n in range(3)])[0],
        thr_perfectoid_model(F3, 2).complex,
        direct_sum_complexes([
            complex_from_functor(constant_unit(F3)),
            complex_from_functor(constant_unit(F3), 1)])[0],
        hr_polynomial(F3, 2, 2).piece(2),
        sigma_shift(complex_from_functor(constant_unit(F2)), 1),
    ]
    for c in probes:
        lo, hi = c.window
        rng = (2 * lo - 1, 2 * hi + 1)
        table = rho_table(c, rng)
        e_even = all(
            e_homology(c, d).invariant_factors() == ()
            for d in range(lo, hi + 1) if d % 2 != 0)
        assert table.even == e_even, c
    _ok(10, "evenness of the slice table agrees with underlying-level "
            "evenness on the probe corpus")
