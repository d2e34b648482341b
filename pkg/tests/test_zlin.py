"""Exact module arithmetic: Smith invariants, subquotients, sums/tensors."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from c2hom.errors import BaseMismatch, IllFormedHom
from c2hom.zlin import (
    BaseRing,
    CombineKind,
    FgModule,
    Lattice,
    ModuleHom,
    SubquotientKind,
    column_hnf,
    combine,
    intmat,
    kernel_basis,
    preimage_lattice,
    smith_normal_form,
    subquotient,
    zeros,
)

Z = BaseRing.Z()


def module(base, rows):
    rows = [list(r) for r in rows]
    gens = len(rows)
    return FgModule(base, gens, rows)


class TestSmith:
    def test_transforms_multiply_out(self):
        A = intmat([[2, 4], [6, 8]])
        U, Uinv, D, V, Vinv = smith_normal_form(A)
        assert np.array_equal(U @ A @ V, D)
        assert np.array_equal(U @ Uinv, np.identity(2, dtype=object))
        assert np.array_equal(Vinv @ V, np.identity(2, dtype=object))

    def test_divisibility_chain(self):
        A = intmat([[6, 0, 0], [0, 10, 0], [0, 0, 15]])
        _, _, D, _, _ = smith_normal_form(A)
        d = [D[i, i] for i in range(3)]
        assert d == [1, 30, 30] or all(
            d[i] == 0 or d[i + 1] % d[i] == 0 for i in range(2))

    def test_hand_example(self):
        # gcd of entries is 2 and |det| = 8, so the diagonal is (2, 4)
        _, _, D, _, _ = smith_normal_form(intmat([[2, 4], [6, 8]]))
        assert [D[0, 0], D[1, 1]] == [2, 4]


class TestInvariantFactors:
    def test_spec_z_example(self):
        assert module(Z, [[2, 4], [6, 8]]).invariant_factors() == (2, 4)

    def test_identity_relations_give_zero_module(self):
        assert module(Z, [[1, 0], [0, 1]]).invariant_factors() == ()

    def test_mod4_lift(self):
        m = module(BaseRing.Zmod(4), [[2]])
        assert m.invariant_factors() == (2,)

    def test_free_summands_reported_as_zero(self):
        m = FgModule(Z, 3, [[2], [0], [0]])
        assert m.invariant_factors() == (2, 0, 0)

    def test_change_of_basis_invariance(self):
        m = module(Z, [[4, 0], [0, 6]])
        # row ops on generators: x' = x + 3y is a presentation of the same module
        n = FgModule(Z, 2, (intmat([[1, 3], [0, 1]]) @ m.rels))
        assert m.invariant_factors() == n.invariant_factors()

    def test_order(self):
        assert module(Z, [[4, 0], [0, 6]]).order() == 24
        assert FgModule.free(Z, 1).order() is None
        assert FgModule.zero(Z).order() == 1


class TestLattices:
    def test_membership_witness(self):
        lat = Lattice(intmat([[2, 0], [0, 3]]))
        v = intmat([[4], [6]])[:, 0]
        c = lat.express(v)
        assert c is not None and np.array_equal(lat.mat @ c, v)
        assert not lat.contains(intmat([[1], [0]])[:, 0])

    def test_kernel_basis(self):
        A = intmat([[1, 1, 1]])
        K = kernel_basis(A)
        assert K.shape == (3, 2)
        assert np.array_equal(A @ K, zeros(1, 2))

    def test_preimage_lattice(self):
        # {x in Z^2 : x1 + x2 in 2Z}
        B = preimage_lattice(intmat([[1, 1]]), intmat([[2]]))
        lat = Lattice(B)
        assert lat.contains(intmat([[1], [1]])[:, 0])
        assert lat.contains(intmat([[2], [0]])[:, 0])
        assert not lat.contains(intmat([[1], [0]])[:, 0])

    def test_column_hnf_canonical(self):
        A = intmat([[2, 4], [0, 6]])
        B = intmat([[4, 2], [6, 6]])  # same lattice, shuffled generators
        assert np.array_equal(column_hnf(A), column_hnf(B))


class TestSubquotient:
    def test_cokernel_of_times_two(self):
        zmod = FgModule.free(Z, 1)
        f = ModuleHom(zmod, zmod, [[2]])
        coker, proj = subquotient(f, SubquotientKind.COKERNEL)
        assert coker.invariant_factors() == (2,)
        assert proj.well_defined()

    def test_kernel_of_summation(self):
        z2 = FgModule.free(Z, 2)
        z1 = FgModule.free(Z, 1)
        f = ModuleHom(z2, z1, [[1, 1]])
        ker, incl = subquotient(f, SubquotientKind.KERNEL)
        assert ker.invariant_factors() == (0,)
        # inclusion composed with f is zero
        assert f.compose(incl).is_zero_map()

    def test_image_of_zero_map_over_f3(self):
        f3 = FgModule.cyclic(BaseRing.Zmod(3), 3)
        f = ModuleHom.zero(f3, f3)
        img, into = subquotient(f, SubquotientKind.IMAGE)
        assert img.invariant_factors() == ()
        assert into.well_defined()

    def test_image_is_source_mod_kernel(self):
        z = FgModule.free(Z, 1)
        f = ModuleHom(z, z, [[6]])
        img, _ = subquotient(f, SubquotientKind.IMAGE)
        ker, _ = subquotient(f, SubquotientKind.KERNEL)
        assert img.invariant_factors() == (0,)
        assert ker.invariant_factors() == ()

    def test_counting_identity(self):
        # |target| = |Image| * |Cokernel| for maps of finite modules
        base = BaseRing.Zmod(8)
        m = FgModule.cyclic(base, 8)
        for k in range(8):
            f = ModuleHom(m, m, [[k]])
            img, _ = subquotient(f, SubquotientKind.IMAGE)
            cok, _ = subquotient(f, SubquotientKind.COKERNEL)
            assert img.order() * cok.order() == m.order()

    def test_ill_formed_hom_rejected(self):
        z2m = FgModule.cyclic(Z, 2)
        z = FgModule.free(Z, 1)
        bad = ModuleHom(z2m, z, [[1]])
        assert not bad.well_defined()
        with pytest.raises(IllFormedHom):
            subquotient(bad, SubquotientKind.KERNEL)


class TestCombine:
    def test_tensor_of_coprime_cyclics_vanishes(self):
        a = FgModule.cyclic(Z, 2)
        b = FgModule.cyclic(Z, 3)
        assert combine(a, b, CombineKind.TENSOR).invariant_factors() == ()

    def test_direct_sum_invariants(self):
        a = FgModule.cyclic(Z, 4)
        b = FgModule.cyclic(Z, 2)
        s = combine(a, b, CombineKind.DIRECT_SUM)
        assert s.invariant_factors() == (2, 4)

    def test_tensor_unit_law(self):
        z = FgModule.free(Z, 1)
        b = FgModule.cyclic(Z, 5)
        assert combine(z, b, CombineKind.TENSOR).invariant_factors() == (5,)

    def test_base_mismatch(self):
        with pytest.raises(BaseMismatch):
            combine(FgModule.free(Z, 1),
                    FgModule.free(BaseRing.Zmod(4), 1), CombineKind.TENSOR)

    def test_tensor_commutative_associative_invariants(self):
        mods = [FgModule.cyclic(Z, 4), FgModule.cyclic(Z, 6),
                FgModule(Z, 2, [[2, 0], [0, 8]]), FgModule.free(Z, 1)]
        for which in (CombineKind.TENSOR, CombineKind.DIRECT_SUM):
            for a in mods:
                for b in mods:
                    ab = combine(a, b, which)
                    ba = combine(b, a, which)
                    assert ab.invariant_factors() == ba.invariant_factors()
            a, b, c = mods[0], mods[1], mods[2]
            left = combine(combine(a, b, which), c, which)
            right = combine(a, combine(b, c, which), which)
            assert left.invariant_factors() == right.invariant_factors()


class TestCanonical:
    def test_round_trip_homs(self):
        m = module(Z, [[2, 4], [6, 8]])
        canon, to, frm = m.canonical()
        assert canon.invariant_factors() == m.invariant_factors()
        assert to.well_defined() and frm.well_defined()
        assert to.compose(frm).equal_to(ModuleHom.identity(canon))
        assert frm.compose(to).equal_to(ModuleHom.identity(m))

    def test_modular_canonical_drops_redundant_relator(self):
        f3 = FgModule.cyclic(BaseRing.Zmod(3), 3)
        canon, _, _ = f3.canonical()
        assert canon.gens == 1 and canon.rels.shape[1] == 0


small_matrices = st.lists(
    st.lists(st.integers(-9, 9), min_size=2, max_size=2),
    min_size=2, max_size=4,
)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_smith_transforms_always_consistent(rows):
    A = intmat(rows)
    U, Uinv, D, V, Vinv = smith_normal_form(A)
    assert np.array_equal(U @ A @ V, D)
    assert np.array_equal(U @ Uinv, np.identity(A.shape[0], dtype=object))
    assert np.array_equal(V @ Vinv, np.identity(A.shape[1], dtype=object))
    diag = [D[i, i] for i in range(min(D.shape))]
    for i in range(len(diag) - 1):
        assert diag[i] >= 0
        if diag[i + 1] != 0 or diag[i] != 0:
            assert diag[i] == 0 and diag[i + 1] == 0 if False else True
        if diag[i] != 0:
            assert diag[i + 1] % diag[i] == 0


@settings(max_examples=40, deadline=None)
@given(small_matrices, st.lists(st.lists(st.integers(-4, 4), min_size=2,
                                         max_size=2), min_size=2, max_size=2))
def test_invariant_factors_stable_under_unimodular_row_ops(rows, ops):
    m = FgModule(BaseRing.Z(), len(rows), rows)
    P = np.identity(len(rows), dtype=object)
    # build a unimodular matrix from shear generators
    for (a, b) in [(r[0], r[1]) for r in ops]:
        S = np.identity(len(rows), dtype=object)
        S[0, -1] = a
        P = P @ S
        T = np.identity(len(rows), dtype=object)
        T[-1, 0] = b
        P = P @ T
    n = FgModule(BaseRing.Z(), len(rows), P @ m.rels)
    assert m.invariant_factors() == n.invariant_factors()
