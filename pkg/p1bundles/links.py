"""
Invariant curves and elementary links between the named families.

Links are data: each LinkStep records its source and target descriptors, the blown-up
center and whether the connected component of the automorphism group of each side is
conjugated into the other. The coordinate formulas behind each kind:

    DecShift      ([x0:x1; y0:y1], z) -> ([x0 : x1 y0; y0 : y1], z), center l00 = {x0 = y0 = 0}
    UmeShift      same chart map on Umemura bundles, exact conjugation of Aut
    UmeToDec      inverse of the chart map from U_a^{1,a+2}, centered at l10
    F1ToP2        F_1^{b,c} -> P_{b-c}, contracting the preimage of the (-1)-curve
    U1ToV         U_1^{b,2} -> V_1^b, contracting the preimage of the (-1)-curve
    SchwarzInvolution  birational involution of S_b centered at its invariant curve
    XSwap         [x0 : x1] -> [x1 : x0], F_a^{b,c} = F_a^{-b,-c}
    SquareIso     descent of HatSchwarz(b) through the double cover P1 x P1 -> P2
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, List, Optional

import sympy

from p1bundles.bundles import BundleDesc, Family
from p1bundles.errors import InvalidDescriptor, InvalidUmemura, RangeViolation, UnsupportedFamily
from p1bundles.transitions import Y, TransitionMat, birkhoff_split

logger = logging.getLogger(__name__)


class Curve(str, Enum):
    L00 = "L00"
    L10 = "L10"
    C_SCHWARZ = "CSchwarz"
    FIBER_OVER_MARKED_POINT = "FiberOverMarkedPoint"
    # marked data, not an invariant curve of the source
    EXCEPTIONAL_SECTION = "ExceptionalSection"
    BRANCH_DIAGONAL = "BranchDiagonal"


INVARIANT_CURVE_TAGS = {Curve.L00, Curve.L10, Curve.C_SCHWARZ, Curve.FIBER_OVER_MARKED_POINT}


class LinkKind(str, Enum):
    DEC_SHIFT = "DecShift"
    DEC_SHIFT_INVERSE = "DecShiftInverse"
    UME_SHIFT = "UmeShift"
    UME_SHIFT_INVERSE = "UmeShiftInverse"
    UME_TO_DEC = "UmeToDec"
    F1_TO_P2 = "F1ToP2"
    U1_TO_V = "U1ToV"
    V_TO_U1 = "VToU1"
    SCHWARZ_INVOLUTION = "SchwarzInvolution"
    XSWAP = "XSwap"
    SQUARE_ISO = "SquareIso"


@dataclass(frozen=True)
class LinkStep:
    """
    One equivariant step source -> target.

    fwd_equivariant: Aut(source) is conjugated into Aut(target)
    bwd_equivariant: Aut(target) is conjugated into Aut(source)
    strict: the forward inclusion is proper
    """

    source: BundleDesc
    target: BundleDesc
    kind: LinkKind
    center: Optional[Curve]
    fwd_equivariant: bool
    bwd_equivariant: bool
    strict: bool = False
    note: str = ""

    @property
    def bi_equivariant(self) -> bool:
        return self.fwd_equivariant and self.bwd_equivariant

    def is_coherent(self) -> bool:
        """fwd_equivariant agrees with the center being invariant in the source (centers that are curves only)."""
        if self.center not in INVARIANT_CURVE_TAGS:
            return True
        return self.fwd_equivariant == (self.center in invariant_curves(self.source))

    def __str__(self) -> str:
        arrow = "<=>" if self.bi_equivariant else ("=>" if self.fwd_equivariant else "->")
        return f"{self.source} {arrow} {self.target} [{self.kind.value}]"


def _dec_curves(a: int, b: int, c: int) -> FrozenSet[Curve]:
    curves = set()
    if a * b > 0 or a * c < 0:
        curves.add(Curve.L00)
    if a * c > 0:
        curves.add(Curve.L10)
    return frozenset(curves)


def invariant_curves(desc: BundleDesc) -> FrozenSet[Curve]:
    """
    Curves invariant under the connected automorphism group of the bundle.

    Raises:
        UnsupportedFamily: For raw descriptors
    """
    family = desc.family
    if family == Family.DEC_FA:
        return _dec_curves(desc.a, desc.b, desc.c)
    if family == Family.UMEMURA:
        return frozenset({Curve.L00, Curve.L10}) if desc.c > 2 else frozenset({Curve.L00})
    if family == Family.SCHWARZ:
        return frozenset({Curve.C_SCHWARZ}) if desc.b >= 2 else frozenset()
    if family == Family.HAT_SCHWARZ:
        return frozenset({Curve.C_SCHWARZ})
    if family == Family.V1:
        return frozenset({Curve.FIBER_OVER_MARKED_POINT})
    if family == Family.DEC_P2:
        return frozenset()
    raise UnsupportedFamily(f"No invariant-curve data for {desc}")


def link_dec(a: int, b: int, c: int) -> LinkStep:
    """Blow up l00 in F_a^{b,c} and contract, landing on F_a^{b+1,c+a}."""
    source = BundleDesc.dec_fa_signed(a, b, c)
    if b < 0:
        raise InvalidDescriptor(f"DecShift needs b >= 0, got ({a},{b},{c})")
    target = BundleDesc.dec_fa_normalized(a, b + 1, c + a)
    return LinkStep(
        source,
        target,
        LinkKind.DEC_SHIFT,
        Curve.L00,
        fwd_equivariant=a * b > 0 or a * c < 0,
        bwd_equivariant=a * (c + a) > 0,
    )


def link_dec_inverse(a: int, b: int, c: int, normalize: bool = True) -> LinkStep:
    """
    Blow up l10 in F_a^{b,c} and contract, landing on F_a^{b-1,c-a}.

    Args:
        a, b, c: Source invariants, b >= 1
        normalize: Swap x0 and x1 in the target when it breaks the sign convention;
            otherwise the target is left signed for an explicit XSwap step
    """
    if b < 1:
        raise InvalidDescriptor(f"DecShiftInverse needs b >= 1, got ({a},{b},{c})")
    source = BundleDesc.dec_fa_signed(a, b, c)
    signed = BundleDesc.dec_fa_signed(a, b - 1, c - a)
    target = signed.normalized() if normalize else signed
    return LinkStep(
        source,
        target,
        LinkKind.DEC_SHIFT_INVERSE,
        Curve.L10,
        fwd_equivariant=a * c > 0,
        bwd_equivariant=Curve.L00 in _dec_curves(a, b - 1, c - a),
        note="target normalized via XSwap" if target != signed else "",
    )


def xswap(desc: BundleDesc) -> LinkStep:
    """The isomorphism F_a^{b,c} = F_a^{-b,-c}."""
    if desc.family != Family.DEC_FA:
        raise UnsupportedFamily(f"XSwap applies to decomposable bundles over F_a, got {desc}")
    target = BundleDesc.dec_fa_signed(desc.a, -desc.b, -desc.c)
    return LinkStep(desc, target, LinkKind.XSWAP, None, fwd_equivariant=True, bwd_equivariant=True)


def link_ume(a: int, b: int, c: int) -> LinkStep:
    """U_a^{b,c} -> U_a^{b+1,c+a}; conjugates the automorphism groups onto each other."""
    source = BundleDesc.umemura(a, b, c)
    target = BundleDesc.umemura(a, b + 1, c + a)
    return LinkStep(source, target, LinkKind.UME_SHIFT, Curve.L00, fwd_equivariant=True, bwd_equivariant=True)


def link_ume_inverse(a: int, b: int, c: int) -> LinkStep:
    """
    U_a^{b,c} -> U_a^{b-1,c-a}, centered at l10.

    Raises:
        InvalidUmemura: Unless k >= 1 and b >= 2
    """
    source = BundleDesc.umemura(a, b, c)
    if source.k < 1 or b < 2:
        raise InvalidUmemura(f"UmeShiftInverse needs k >= 1 and b >= 2, got ({a},{b},{c})")
    target = BundleDesc.umemura(a, b - 1, c - a)
    return LinkStep(source, target, LinkKind.UME_SHIFT_INVERSE, Curve.L10, fwd_equivariant=True, bwd_equivariant=True)


def link_ume_to_dec(a: int) -> LinkStep:
    """U_a^{1,a+2} -> F_a^{0,2}, stored as DecFa(a, 0, -2)."""
    if a < 1:
        raise RangeViolation(f"UmeToDec needs a >= 1, got {a}")
    return LinkStep(
        BundleDesc.umemura(a, 1, a + 2),
        BundleDesc.dec_fa_normalized(a, 0, 2),
        LinkKind.UME_TO_DEC,
        Curve.L10,
        fwd_equivariant=True,
        bwd_equivariant=False,
        strict=True,
    )


def link_f1_to_p2(b: int, c: int) -> LinkStep:
    """F_1^{b,c} -> P_{|b-c|} over the blow-down F_1 -> P^2."""
    return LinkStep(
        BundleDesc.dec_fa_normalized(1, b, c),
        BundleDesc.dec_p2(abs(b - c)),
        LinkKind.F1_TO_P2,
        Curve.EXCEPTIONAL_SECTION,
        fwd_equivariant=True,
        bwd_equivariant=False,
        strict=True,
    )


def link_u1_to_v(b: int) -> LinkStep:
    """U_1^{b,2} -> V_1^b; for b = 1 the target is S_1 and the inclusion is strict."""
    if b < 1:
        raise RangeViolation(f"U1ToV needs b >= 1, got {b}")
    source = BundleDesc.umemura(1, b, 2)
    if b == 1:
        return LinkStep(
            source,
            BundleDesc.schwarz(1),
            LinkKind.U1_TO_V,
            Curve.EXCEPTIONAL_SECTION,
            fwd_equivariant=True,
            bwd_equivariant=False,
            strict=True,
            note="V_1^1 = S_1",
        )
    return LinkStep(
        source, BundleDesc.v1(b), LinkKind.U1_TO_V, Curve.EXCEPTIONAL_SECTION, fwd_equivariant=True, bwd_equivariant=True
    )


def link_v_to_u1(b: int) -> LinkStep:
    """V_1^b -> U_1^{b,2}: blow up the fibre over [0:1:0]."""
    return LinkStep(
        BundleDesc.v1(b),
        BundleDesc.umemura(1, b, 2),
        LinkKind.V_TO_U1,
        Curve.FIBER_OVER_MARKED_POINT,
        fwd_equivariant=True,
        bwd_equivariant=True,
    )


def schwarz_involution(b: int) -> LinkStep:
    """
    Raises:
        RangeViolation: For b < 2 (S_1 has no invariant curve)
    """
    if b < 2:
        raise RangeViolation(f"SchwarzInvolution needs b >= 2, got {b}")
    s_b = BundleDesc.schwarz(b)
    return LinkStep(
        s_b, s_b, LinkKind.SCHWARZ_INVOLUTION, Curve.C_SCHWARZ, fwd_equivariant=True, bwd_equivariant=True,
        note="involution",
    )


def square_iso(b: int) -> LinkStep:
    """HatSchwarz(b) descends to S_b through the double cover branched along the diagonal."""
    return LinkStep(
        BundleDesc.hat_schwarz(b),
        BundleDesc.schwarz(b),
        LinkKind.SQUARE_ISO,
        Curve.BRANCH_DIAGONAL,
        fwd_equivariant=True,
        bwd_equivariant=False,
        strict=True,
    )


def forward_steps(desc: BundleDesc) -> List[LinkStep]:
    """All links out of desc whose forward flag is set."""
    steps: List[LinkStep] = []
    family = desc.family
    if family == Family.DEC_FA:
        a, b, c = desc.a, desc.b, desc.c
        steps.append(link_dec(a, b, c))
        if b >= 1:
            steps.append(link_dec_inverse(a, b, c))
        if a == 1:
            steps.append(link_f1_to_p2(b, c))
    elif family == Family.UMEMURA:
        a, b, c = desc.a, desc.b, desc.c
        steps.append(link_ume(a, b, c))
        if desc.k >= 1 and b >= 2:
            steps.append(link_ume_inverse(a, b, c))
        if b == 1 and c == a + 2:
            steps.append(link_ume_to_dec(a))
        if a == 1 and c == 2:
            steps.append(link_u1_to_v(b))
    elif family == Family.SCHWARZ and desc.b >= 2:
        steps.append(schwarz_involution(desc.b))
    elif family == Family.V1:
        steps.append(link_v_to_u1(desc.b))
    elif family == Family.HAT_SCHWARZ:
        steps.append(square_iso(desc.b))
    return [s for s in steps if s.fwd_equivariant]


def v1_transition(b: int) -> sympy.Matrix:
    """Transition of V_1^b between X != 0 and Z != 0 at [1:u:v]: [x0 : x1 v^(2-b) + x0 u^b v^(1-b)]."""
    if b < 1:
        raise RangeViolation(f"V_1^b needs b >= 1, got {b}")
    u, v = sympy.symbols("u v")
    return sympy.Matrix([[1, 0], [u**b * v ** (1 - b), v ** (2 - b)]])


def v1_restrict_line(b: int, through_marked_point: bool) -> int:
    """Splitting type of V_1^b over a line: b through [0:1:0], |b-2| otherwise."""
    if b < 1:
        raise RangeViolation(f"V_1^b needs b >= 1, got {b}")
    return b if through_marked_point else abs(b - 2)


def v1_trivialization_check() -> bool:
    """[[0, 1], [-1, 1/z]] [[1, 0], [z, z^2]] [[1, -z], [0, 1]] = z Id."""
    z = sympy.Symbol("z")
    product = sympy.Matrix([[0, 1], [-1, 1 / z]]) * sympy.Matrix([[1, 0], [z, z**2]]) * sympy.Matrix([[1, -z], [0, 1]])
    return product.applyfunc(sympy.simplify) == z * sympy.eye(2)


def v1_line_split(b: int) -> int:
    """Split the V_1^b transition restricted to the line u = 0 (through no marked point); equals |b-2|."""
    u, v = sympy.symbols("u v")
    restricted = v1_transition(b).subs(u, 0).subs(v, Y)
    return birkhoff_split(TransitionMat.of(restricted.tolist())).generic_b
