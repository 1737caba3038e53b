"""
Tests for the moduli spaces M_a^{b,c} and the Aut(F_a)-action on them.

Covers:
- Dimensions of M_a^{b,c}
- The Sym^r action: swap formula, triangular identity, group law
- Legality of generators per base surface
- Fixed points: Umemura and HatSchwarz classes are fixed, perturbed classes are not
- Independence of the action from the chosen representative
"""

import pytest

from p1bundles.bundles import BundleDesc, CanonicalP, NumericalInvariants, canonical_p_of, normalize
from p1bundles.errors import IllegalGenerator, RangeViolation, SingularMatrix
from p1bundles.exactalg import Gl2, Shear, TruncPoly, subst_y_affine
from p1bundles.moduli import (
    SWAP,
    FaGenerator,
    GeneratorKind,
    ModuliPoint,
    act_on_moduli,
    act_symr,
    dim_moduli,
    is_fixed_diag,
    legal_kinds,
    random_generator,
    random_gl2,
    random_trunc,
    structured_generators,
    triangular_identity_holds,
    window_parameters,
)
from p1bundles.selftest import random_equivalent


def umemura_triples(a_max=3, b_max=4):
    for a in range(1, a_max + 1):
        for b in range(1, b_max + 1):
            for k in range(b + 1):
                yield a, b, a * k + 2


class TestDimensions:
    """dim M_a^{b,c}."""

    @pytest.mark.parametrize("b, expected", [(1, 3), (2, 8), (3, 15), (4, 24), (5, 35), (6, 48)])
    def test_dim_over_f0(self, b, expected):
        """dim M_0^{b,b+2} = (b+1)^2 - 1."""
        assert dim_moduli(0, b, b + 2) == expected

    def test_dim_examples(self):
        assert dim_moduli(2, 3, 4) == 3
        assert dim_moduli(1, 2, 2) == 0

    def test_dim_is_window_minus_one(self):
        for a in range(4):
            for b in range(1, 5):
                for c in range(2, 12):
                    assert dim_moduli(a, b, c) == window_parameters(a, b, c) - 1, (a, b, c)

    def test_window_parameters_count_free_coefficients(self, rng):
        for _ in range(40):
            a, b, c = rng.randint(0, 4), rng.randint(1, 5), rng.randint(2, 12)
            inv = NumericalInvariants(a, b, c)
            rows = [[rng.randint(-3, 3) for _ in range(inv.row_bound(i) + 1)] for i in range(b + 1)]
            p = CanonicalP.from_coefficients(a, b, c, rows)
            assert window_parameters(a, b, c) == len(p.free_coefficients()), (a, b, c)
            assert window_parameters(a, b, c) == len(CanonicalP.zero(inv).free_coefficients())

    @pytest.mark.parametrize("abc", [(0, 0, 4), (1, 2, 1), (-1, 2, 4)])
    def test_dim_out_of_range(self, abc):
        with pytest.raises(RangeViolation):
            dim_moduli(*abc)


class TestSymAction:
    """The Sym^r action of GL2 on truncated polynomials."""

    def test_swap_reverses_coefficients(self):
        for r in range(9):
            for i in range(r + 1):
                basis = TruncPoly.of(r, [0] * i + [1])
                assert act_symr(SWAP, basis) == basis.reversed(), f"r = {r}, i = {i}"

    def test_diagonal_scales_monomials(self):
        p = TruncPoly.of(2, [1, 1, 1])
        assert act_symr(Gl2.of(2, 0, 0, 3), p) == TruncPoly.of(2, [9, 6, 4])

    def test_triangular_identity(self, rng):
        for _ in range(50):
            r = rng.randint(0, 8)
            g = random_gl2(rng)
            g = Gl2.of(g.alpha or 1, g.beta, 0, g.delta or 1)
            p = random_trunc(r, rng)
            assert triangular_identity_holds(g, p), f"g = {g.as_tuple()}, P = {p}"

    def test_triangular_identity_needs_upper_triangular(self):
        with pytest.raises(ValueError):
            triangular_identity_holds(Gl2.of(1, 0, 1, 1), TruncPoly.of(2, [1]))

    def test_group_law(self, rng):
        for _ in range(50):
            r = rng.randint(0, 8)
            g, h, p = random_gl2(rng), random_gl2(rng), random_trunc(r, rng)
            if act_symr(g, act_symr(h, p)) != act_symr(g @ h, p):
                pytest.fail(f"Group law fails for g = {g.as_tuple()}, h = {h.as_tuple()}, P = {p}")
        print("✓ group law holds on 50 random triples")

    def test_singular_matrix(self):
        with pytest.raises(SingularMatrix):
            act_symr(Gl2(1, 1, 1, 1), TruncPoly.of(1, [1]))


class TestModuliPoints:
    """Points of M_a^{b,c} and generator legality."""

    def test_decomposable_is_not_a_point(self):
        with pytest.raises(RangeViolation):
            ModuliPoint.of(canonical_p_of(BundleDesc.dec_fa(1, 2, 4)))

    def test_point_needs_c_at_least_two(self):
        with pytest.raises(RangeViolation):
            ModuliPoint.of(CanonicalP.zero(canonical_p_of(BundleDesc.dec_fa(1, 2, 1)).inv))

    def test_legal_kinds(self):
        assert legal_kinds(0) == [GeneratorKind.DIAG_GL2]
        assert legal_kinds(2) == [GeneratorKind.ZGL2, GeneratorKind.SHEAR]

    def test_illegal_generators(self):
        point = ModuliPoint.of(canonical_p_of(BundleDesc.umemura(1, 2, 3)))
        with pytest.raises(IllegalGenerator):
            act_on_moduli(1, FaGenerator.ygl2(0, 1, 1, 0), point)
        with pytest.raises(IllegalGenerator):
            act_on_moduli(1, FaGenerator.shear([1, 1, 1]), point)
        with pytest.raises(IllegalGenerator):
            act_on_moduli(2, FaGenerator.zgl2(1, 0, 0, 1), point)
        f0_point = ModuliPoint.of(canonical_p_of(BundleDesc.hat_schwarz(2)))
        with pytest.raises(IllegalGenerator):
            act_on_moduli(0, FaGenerator.shear([1]), f0_point)

    def test_structured_generators(self):
        gens = structured_generators(2, [GeneratorKind.ZGL2, GeneratorKind.SHEAR])
        assert sum(g.kind == GeneratorKind.ZGL2 for g in gens) == 6
        assert sum(g.kind == GeneratorKind.SHEAR for g in gens) == 4

    def test_identity_acts_trivially(self):
        point = ModuliPoint.of(CanonicalP.from_coefficients(1, 2, 4, [[1, 2, 3], [0, 1], [1]]))
        assert act_on_moduli(1, FaGenerator.zgl2(1, 0, 0, 1), point) == point
        assert act_on_moduli(1, FaGenerator.shear([0]), point) == point

    def test_action_composes(self, rng):
        """ZGl2 acts through a group homomorphism on M_a^{b,c}."""
        point = ModuliPoint.of(CanonicalP.from_coefficients(1, 2, 4, [[1, 2, 3], [0, 1], [1]]))
        for _ in range(5):
            g, h = random_gl2(rng), random_gl2(rng)
            lhs = act_on_moduli(1, FaGenerator(GeneratorKind.ZGL2, g=g),
                                act_on_moduli(1, FaGenerator(GeneratorKind.ZGL2, g=h), point))
            rhs = act_on_moduli(1, FaGenerator(GeneratorKind.ZGL2, g=g @ h), point)
            assert lhs == rhs


class TestFixedPoints:
    """Sampled fixed-point test."""

    def test_umemura_classes_fixed(self):
        for a, b, c in umemura_triples():
            point = ModuliPoint.of(canonical_p_of(BundleDesc.umemura(a, b, c)))
            assert is_fixed_diag(a, point, trials=3), f"Umemura({a},{b},{c}) moved"
        print("✓ every Umemura class with a <= 3, b <= 4 is fixed")

    @pytest.mark.parametrize("b", [1, 2, 3, 4])
    def test_hat_schwarz_fixed_by_diagonal(self, b):
        point = ModuliPoint.of(canonical_p_of(BundleDesc.hat_schwarz(b)))
        assert is_fixed_diag(0, point, trials=3)

    def test_perturbed_class_not_fixed(self):
        point = ModuliPoint.of(CanonicalP.from_coefficients(0, 1, 3, [[1, 0]]))
        assert not is_fixed_diag(0, point, trials=3)

    def test_hat_schwarz_moved_by_y_only(self):
        """The lift is only fixed by the diagonal PGL2, not by the y-factor alone."""
        point = ModuliPoint.of(canonical_p_of(BundleDesc.hat_schwarz(1)))
        assert not is_fixed_diag(0, point, trials=0, kinds=[GeneratorKind.YGL2])


REPRESENTED_CLASSES = {
    (1, 2, 4): [[1, 2, 3], [0, 1], [1]],
    (2, 3, 5): [[0, 1, 0, 2], [3, 1]],
    (0, 2, 4): [[1, 0, 0], [0, 1, 0], [2, 0, 1]],
}


class TestRepresentativeIndependence:
    """Acting on a class gives the same point whichever raw representative is used."""

    @pytest.mark.parametrize("abc", sorted(REPRESENTED_CLASSES))
    def test_action_agrees_on_representatives(self, abc, rng):
        a, b, c = abc
        p = CanonicalP.from_coefficients(a, b, c, REPRESENTED_CLASSES[abc])
        for trial in range(10):
            first = ModuliPoint(normalize(a, b, c, random_equivalent(p, rng)))
            second = ModuliPoint(normalize(a, b, c, random_equivalent(p, rng)))
            assert first == second
            for kind in legal_kinds(a):
                gen = random_generator(a, kind, rng)
                if act_on_moduli(a, gen, first) != act_on_moduli(a, gen, second):
                    pytest.fail(f"Trial {trial}: {gen} separates two representatives of {p}")

    @pytest.mark.parametrize("abc", [(1, 2, 4), (2, 3, 5)])
    def test_shear_of_raw_representative(self, abc, rng):
        """Shearing any raw representative and normalizing lands on the image point."""
        a, b, c = abc
        p = CanonicalP.from_coefficients(a, b, c, REPRESENTED_CLASSES[abc])
        point = ModuliPoint.of(p)
        for _ in range(10):
            gen = random_generator(a, GeneratorKind.SHEAR, rng)
            raw = random_equivalent(p, rng)
            image = normalize(a, b, c, subst_y_affine(raw, Shear(-gen.r)))
            assert image == act_on_moduli(a, gen, point).p
