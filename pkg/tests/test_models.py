"""Model constructors: polynomial, sign Laurent, conjugation plane,
perfectoid free algebra, and the cofiber check."""

import math

import pytest

from c2hom.errors import UnsupportedBase, ZeroPowerMap
from c2hom.homalg import e_homology, homology, homology_table
from c2hom.mackey import (
    constant, constant_unit, invariant_profile, isomorphic, induced,
)
from c2hom.models import (
    cofiber_u_check, form_rank, hr_conjugation_plane, hr_polynomial,
    hr_polynomial_sigma_parts, hr_sign_laurent, perfectoid_shift_cross_check,
    thr_perfectoid_model,
)
from c2hom.slices import rho_table, sigma_filtration
from c2hom.zlin import BaseRing, FgModule

Z = BaseRing.Z()
F2, F3, F5 = BaseRing.Zmod(2), BaseRing.Zmod(3), BaseRing.Zmod(5)


class TestFormRank:
    def test_one_variable(self):
        assert form_rank(1, 0, 3) == 1
        assert form_rank(1, 1, 3) == 1
        assert form_rank(1, 2, 3) == 0

    def test_two_variables_weight_two(self):
        assert form_rank(2, 0, 2) == 3  # xx, xy, yy
        assert form_rank(2, 1, 2) == 4  # x dx, y dx, x dy, y dy
        assert form_rank(2, 2, 2) == 1  # dx ^ dy

    def test_kuenneth_binomials(self):
        for d in range(1, 4):
            for w in range(0, 5):
                for n in range(0, d + 1):
                    got = form_rank(d, n, w)
                    want = math.comb(d, n) * (
                        math.comb(w - n + d - 1, d - 1) if w >= n else 0)
                    assert got == want
        assert form_rank(0, 0, 0) == 1
        assert form_rank(0, 0, 1) == 0


class TestHrPolynomial:
    def test_single_variable_pieces(self):
        model = hr_polynomial(F3, 1, 3)
        for w in (1, 2, 3):
            piece = model.piece(w)
            assert e_homology(piece, 0).invariant_factors() == (3,)
            assert e_homology(piece, 1).invariant_factors() == (3,)

    def test_d0_is_unit(self):
        model = hr_polynomial(F3, 0, 2)
        assert model.weights() == [0, 1, 2]
        assert isomorphic(homology(model.piece(0), 0), constant_unit(F3))
        for w in (1, 2):
            assert model.piece(w).is_empty()

    def test_d2_weight2_ranks(self):
        piece = hr_polynomial(F3, 2, 2).piece(2)
        ranks = [len(e_homology(piece, n).invariant_factors())
                 for n in (0, 1, 2)]
        assert ranks == [3, 4, 1]

    def test_e_level_matches_classical_counts(self):
        for d in (1, 2, 3):
            model = hr_polynomial(F3, d, 3)
            for w in range(0, 4):
                piece = model.piece(w)
                for n in range(0, d + 1):
                    assert len(e_homology(piece, n).invariant_factors()) \
                        == form_rank(d, n, w), (d, w, n)

    def test_sigma_parts_accepted_and_match(self):
        model = hr_polynomial(F3, 2, 3)
        for w in (0, 1, 2):
            parts = hr_polynomial_sigma_parts(F3, 2, w)
            tower = sigma_filtration(parts)
            # graded pieces checked inside sigma_filtration; compare
            # the sum's homology against the tensor-built piece as well
            stage0 = tower.stages[0]
            for dd in range(0, 4):
                assert invariant_profile(homology(stage0, dd)) == \
                    invariant_profile(homology(model.piece(w), dd)), (w, dd)

    def test_weight_zero_contains_unit(self):
        model = hr_polynomial(F5, 2, 2)
        assert isomorphic(homology(model.piece(0), 0), constant_unit(F5))


class TestSignLaurent:
    def test_plain_table_odd_prime(self):
        model = hr_sign_laurent(F3, -2, 2)
        for j in model.plain.weights():
            h = homology_table(model.plain.piece(j), (0, 1))
            assert isomorphic(h[0], constant_unit(F3))
            assert isomorphic(h[1], constant_unit(F3))

    def test_sigma_rewrite_agrees_over_f3(self):
        model = hr_sign_laurent(F3, -1, 1)
        assert model.sigma_form is not None
        assert model.sigma_agrees is True
        assert model.obstruction is None

    def test_f2_obstruction_reported(self):
        model = hr_sign_laurent(F2, 0, 1)
        assert model.sigma_form is None
        assert "2 is not invertible" in model.obstruction

    def test_power_map_weights(self):
        model = hr_sign_laurent(F3, -2, 2, power=3)
        pm = model.power_map
        assert pm.degree_one_weight_map == {-2: -6, -1: -3, 0: 0, 1: 3, 2: 6}
        assert pm.degree_zero == "identity on every weight"

    def test_zero_power_rejected(self):
        with pytest.raises(ZeroPowerMap):
            hr_sign_laurent(F3, 0, 1, power=0)


class TestConjugationPlane:
    def test_weight_zero(self):
        model = hr_conjugation_plane(F3, 0)
        piece = model.plain.piece(0)
        assert isomorphic(homology(piece, 0), constant_unit(F3))
        assert homology(piece, 1).is_zero()

    def test_middle_summand_is_induced(self):
        model = hr_conjugation_plane(F3, 2)
        piece = model.plain.piece(2)
        h1 = homology(piece, 1)
        assert invariant_profile(h1) == \
            invariant_profile(induced(FgModule.free(F3, 2)))

    def test_e_level_matches_two_variable_counts(self):
        model = hr_conjugation_plane(F3, 4)
        for k in range(0, 5):
            piece = model.plain.piece(k)
            for n in (0, 1, 2):
                assert len(e_homology(piece, n).invariant_factors()) == \
                    form_rank(2, n, k), (k, n)

    def test_omega_rewrite_agrees_over_f3(self):
        model = hr_conjugation_plane(F3, 3)
        assert model.omega_form is not None
        assert model.omega_agrees is True

    def test_f2_obstruction(self):
        model = hr_conjugation_plane(F2, 2)
        assert model.omega_form is None
        assert "2 is not invertible" in model.obstruction


class TestPerfectoid:
    def test_slice_table_f3(self):
        model = thr_perfectoid_model(F3, 3)
        table = rho_table(model.complex, (-1, 7))
        for n in (0, 2, 4, 6):
            assert isomorphic(table.entry(n), constant_unit(F3)), n
        for n in (-1, 1, 3, 5, 7):
            assert table.entry(n).is_zero(), n
        assert table.even and table.very_even

    def test_odd_slices_vanish_at_two(self):
        model = thr_perfectoid_model(F2, 2)
        table = rho_table(model.complex, (-1, 5))
        for n in (-1, 1, 3, 5):
            assert table.entry(n).is_zero(), n
        assert table.even

    def test_nmax_zero(self):
        model = thr_perfectoid_model(F3, 0)
        table = rho_table(model.complex, (-2, 2))
        assert isomorphic(table.entry(0), constant_unit(F3))
        assert table.nonzero_degrees() == [0]

    def test_e_level_even_cells(self):
        model = thr_perfectoid_model(F3, 2)
        for n in (0, 2, 4):
            assert len(e_homology(model.complex, n).invariant_factors()) == 1
        for n in (1, 3):
            assert e_homology(model.complex, n).invariant_factors() == ()

    def test_u_is_chain_map(self):
        model = thr_perfectoid_model(F3, 2)
        assert model.u.is_chain_map()

    def test_u_source_matches_dense_shift(self):
        model = thr_perfectoid_model(F3, 2)
        assert perfectoid_shift_cross_check(model)

    def test_rejects_integer_base(self):
        with pytest.raises(UnsupportedBase):
            thr_perfectoid_model(Z, 2)

    def test_rejects_non_prime_power(self):
        with pytest.raises(UnsupportedBase):
            thr_perfectoid_model(BaseRing.Zmod(6), 2)

    def test_prime_power_base_allowed(self):
        model = thr_perfectoid_model(BaseRing.Zmod(9), 1)
        assert model.prime == 3

    def test_mod_p_tower_stabilizes_on_fp_model(self):
        from c2hom.homalg import mod_pk_tower
        model = thr_perfectoid_model(F3, 1)
        tower = mod_pk_tower(model.complex, 3, 2)
        assert tower.stabilizes(range(0, 3))


class TestCofiberU:
    def test_f3_nmax4(self):
        rep = cofiber_u_check(F3, 4)
        assert rep.matches_hr
        assert isomorphic(rep.table[0], constant_unit(F3))
        for d in (1, 2, 3):
            assert rep.table[d].is_zero()

    def test_f2_nmax4(self):
        rep = cofiber_u_check(F2, 4)
        assert rep.matches_hr

    def test_nmax1_window(self):
        rep = cofiber_u_check(F3, 1)
        assert rep.window == (0, 0)
        assert rep.matches_hr
