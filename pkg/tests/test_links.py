"""
Tests for invariant curves and elementary links.

Covers:
- Invariant curves per family
- Flag coherence: fwd_equivariant agrees with the center being invariant in the source
- Shift round-trips and preserved quantities
- The V_1^b helpers
"""

import pytest

from p1bundles.bundles import BundleDesc, Family, canonical_p_of
from p1bundles.errors import InvalidDescriptor, InvalidUmemura, RangeViolation, UnsupportedFamily
from p1bundles.links import (
    Curve,
    LinkKind,
    forward_steps,
    invariant_curves,
    link_dec,
    link_dec_inverse,
    link_f1_to_p2,
    link_u1_to_v,
    link_ume,
    link_ume_inverse,
    link_ume_to_dec,
    link_v_to_u1,
    schwarz_involution,
    square_iso,
    v1_line_split,
    v1_restrict_line,
    v1_transition,
    v1_trivialization_check,
    xswap,
)


def dec_triples(a_max=4, b_max=5, c_abs_max=8):
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            for c in range(-c_abs_max, c_abs_max + 1):
                if b > 0 or c <= 0:
                    yield a, b, c


class TestInvariantCurves:
    """Curves fixed by the connected automorphism group."""

    def test_dec_curves(self):
        assert invariant_curves(BundleDesc.dec_fa(2, 1, 1)) == {Curve.L00, Curve.L10}
        assert invariant_curves(BundleDesc.dec_fa(2, 0, -3)) == {Curve.L00}
        assert invariant_curves(BundleDesc.dec_fa(0, 3, -2)) == set()
        assert invariant_curves(BundleDesc.dec_fa(2, 0, 0)) == set()

    def test_other_families(self):
        assert invariant_curves(BundleDesc.umemura(2, 2, 4)) == {Curve.L00, Curve.L10}
        assert invariant_curves(BundleDesc.umemura(2, 2, 2)) == {Curve.L00}
        assert invariant_curves(BundleDesc.schwarz(1)) == set()
        assert invariant_curves(BundleDesc.schwarz(3)) == {Curve.C_SCHWARZ}
        assert invariant_curves(BundleDesc.v1(2)) == {Curve.FIBER_OVER_MARKED_POINT}
        assert invariant_curves(BundleDesc.dec_p2(4)) == set()

    def test_raw_has_no_curve_data(self):
        raw = BundleDesc.from_raw(canonical_p_of(BundleDesc.umemura(1, 1, 2)))
        with pytest.raises(UnsupportedFamily):
            invariant_curves(raw)


class TestDecomposableLinks:
    """DecShift, DecShiftInverse and XSwap."""

    def test_dec_shift_target(self):
        step = link_dec(2, 1, 1)
        assert step.target == BundleDesc.dec_fa(2, 2, 3)
        assert step.kind == LinkKind.DEC_SHIFT
        assert step.center == Curve.L00
        assert step.bi_equivariant

    def test_dec_shift_from_trivial_is_not_equivariant(self):
        step = link_dec(0, 1, 0)
        assert not step.fwd_equivariant
        assert forward_steps(BundleDesc.dec_fa(0, 1, 0)) == []

    def test_dec_flags_coherent(self):
        for a, b, c in dec_triples():
            steps = [link_dec(a, b, c)] + ([link_dec_inverse(a, b, c)] if b >= 1 else [])
            for step in steps:
                assert step.is_coherent(), f"{step} at ({a},{b},{c})"

    def test_dec_shift_round_trip(self):
        """DecShiftInverse undoes DecShift on the signed invariants."""
        for a, b, c in dec_triples():
            up = link_dec(a, b, c)
            down = link_dec_inverse(a, b + 1, c + a, normalize=False)
            assert down.target == BundleDesc.dec_fa_signed(a, b, c)
            assert down.target.normalized() == BundleDesc.dec_fa_normalized(a, b, c)
            assert up.target == BundleDesc.dec_fa_normalized(a, b + 1, c + a)

    def test_dec_inverse_needs_positive_b(self):
        with pytest.raises(InvalidDescriptor):
            link_dec_inverse(2, 0, -1)

    def test_dec_inverse_signed_target(self):
        step = link_dec_inverse(2, 1, 5, normalize=False)
        assert step.target.needs_xswap
        assert step.note == ""
        normalized = link_dec_inverse(2, 1, 5)
        assert normalized.target == BundleDesc.dec_fa(2, 0, -3)
        assert "XSwap" in normalized.note

    def test_xswap(self):
        signed = BundleDesc.dec_fa_signed(2, 0, 3)
        step = xswap(signed)
        assert step.target == BundleDesc.dec_fa(2, 0, -3)
        assert step.bi_equivariant
        assert step.center is None
        with pytest.raises(UnsupportedFamily):
            xswap(BundleDesc.schwarz(2))


class TestUmemuraLinks:
    """UmeShift, UmeShiftInverse and UmeToDec."""

    def test_ume_shift_preserves_invariants(self):
        """c - ab and the residue of c mod a are preserved, k moves by one."""
        for a in range(1, 4):
            for b in range(1, 5):
                for k in range(b + 1):
                    c = a * k + 2
                    step = link_ume(a, b, c)
                    target = step.target
                    assert target.c - target.a * target.b == c - a * b
                    assert target.k == k + 1
                    assert step.bi_equivariant
                    assert step.is_coherent()

    def test_ume_shift_inverse(self):
        step = link_ume_inverse(2, 3, 6)
        assert step.target == BundleDesc.umemura(2, 2, 4)
        assert step.target.k == step.source.k - 1
        assert step.center == Curve.L10
        assert step.is_coherent()

    def test_ume_shift_inverse_range(self):
        with pytest.raises(InvalidUmemura):
            link_ume_inverse(2, 2, 2)
        with pytest.raises(InvalidUmemura):
            link_ume_inverse(2, 1, 4)

    def test_ume_to_dec(self):
        step = link_ume_to_dec(3)
        assert step.source == BundleDesc.umemura(3, 1, 5)
        assert step.target == BundleDesc.dec_fa(3, 0, -2)
        assert step.fwd_equivariant and not step.bwd_equivariant
        assert step.strict
        with pytest.raises(RangeViolation):
            link_ume_to_dec(0)


class TestContractions:
    """Links leaving the Hirzebruch surfaces."""

    @pytest.mark.parametrize("b, c, expected", [(2, 1, 1), (0, -3, 3), (1, 1, 0)])
    def test_f1_to_p2(self, b, c, expected):
        step = link_f1_to_p2(b, c)
        assert step.target == BundleDesc.dec_p2(expected)
        assert step.fwd_equivariant and step.strict

    def test_u1_to_v(self):
        first = link_u1_to_v(1)
        assert first.target == BundleDesc.schwarz(1)
        assert first.strict and not first.bwd_equivariant
        assert first.note == "V_1^1 = S_1"
        later = link_u1_to_v(3)
        assert later.target == BundleDesc.v1(3)
        assert later.bi_equivariant

    def test_v_to_u1(self):
        step = link_v_to_u1(2)
        assert step.target == BundleDesc.umemura(1, 2, 2)
        assert step.center == Curve.FIBER_OVER_MARKED_POINT
        assert step.is_coherent()

    def test_schwarz_involution(self):
        step = schwarz_involution(3)
        assert step.source == step.target == BundleDesc.schwarz(3)
        assert step.is_coherent()
        with pytest.raises(RangeViolation):
            schwarz_involution(1)

    def test_square_iso(self):
        step = square_iso(2)
        assert step.source.family == Family.HAT_SCHWARZ
        assert step.target == BundleDesc.schwarz(2)
        assert step.fwd_equivariant and not step.bwd_equivariant


class TestForwardSteps:
    """Outgoing forward-equivariant links."""

    def test_forward_steps_all_forward(self):
        descs = [BundleDesc.dec_fa(a, b, c) for a, b, c in dec_triples(3, 3, 5)]
        descs += [BundleDesc.umemura(a, b, a * k + 2) for a in (1, 2) for b in (1, 2, 3) for k in range(b + 1)]
        descs += [BundleDesc.schwarz(b) for b in (1, 2, 3)] + [BundleDesc.v1(2), BundleDesc.hat_schwarz(2)]
        for desc in descs:
            for step in forward_steps(desc):
                assert step.fwd_equivariant
                assert step.is_coherent(), str(step)
                assert step.source.normalized() == desc

    def test_forward_steps_over_p2(self):
        assert forward_steps(BundleDesc.dec_p2(3)) == []
        assert forward_steps(BundleDesc.schwarz(1)) == []
        assert [s.kind for s in forward_steps(BundleDesc.schwarz(2))] == [LinkKind.SCHWARZ_INVOLUTION]

    def test_umemura_u1_has_contraction(self):
        kinds = {s.kind for s in forward_steps(BundleDesc.umemura(1, 2, 2))}
        assert kinds == {LinkKind.UME_SHIFT, LinkKind.U1_TO_V}


class TestV1Helpers:
    """Transition data of V_1^b."""

    def test_v1_transition_shape(self):
        mat = v1_transition(3)
        assert mat.shape == (2, 2)
        assert mat[0, 1] == 0

    @pytest.mark.parametrize("b", [2, 3, 4, 5])
    def test_v1_restrict_line(self, b):
        assert v1_restrict_line(b, True) == b
        assert v1_restrict_line(b, False) == abs(b - 2)

    def test_v1_trivialization(self):
        assert v1_trivialization_check()

    @pytest.mark.parametrize("b", [1, 2, 3, 4])
    def test_v1_line_split(self, b):
        assert v1_line_split(b) == abs(b - 2)

    def test_v1_range(self):
        with pytest.raises(RangeViolation):
            v1_transition(0)
