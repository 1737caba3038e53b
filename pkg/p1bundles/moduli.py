"""
Moduli spaces M_a^{b,c} of indecomposable bundles Z_a^{b,c,P} and the Aut(F_a)-action on them.

A point is a canonical polynomial up to scaling. Three kinds of generators act:

- ZGl2: GL2 acting on the base coordinate z, row-wise through the symmetric power Sym^r
- YGl2: GL2 acting on (y0, y1); only over F_0
- Shear: y1 -> y1 + y0 R(z) with deg R <= a; only over F_a, a >= 1

DiagGl2 is the same matrix applied through ZGl2 and YGl2 together (the diagonal PGL2 of F_0).
"""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Iterable, List, Optional, Sequence

import sympy

from p1bundles.bundles import CanonicalP, embed, is_decomposable, normalize
from p1bundles.config import get_config
from p1bundles.errors import IllegalGenerator, RangeViolation, SingularMatrix
from p1bundles.exactalg import Gl2, LaurentPoly, RationalLike, Shear, TruncPoly, subst_y_affine, trunc_inverse

logger = logging.getLogger(__name__)

S = sympy.Symbol("s")
T = sympy.Symbol("t")

SWAP = Gl2.of(0, 1, 1, 0)


@dataclass(frozen=True)
class ModuliPoint:
    """A point of M_a^{b,c}: an indecomposable canonical polynomial in scaling normal form."""

    p: CanonicalP

    def __post_init__(self):
        inv = self.p.inv
        if inv.b < 1 or inv.c < 2:
            raise RangeViolation(f"M_a^(b,c) needs b >= 1 and c >= 2, got {inv}")
        if is_decomposable(self.p):
            raise RangeViolation(f"P = 0 is the decomposable bundle, not a point of M{inv}")

    @classmethod
    def of(cls, p: CanonicalP) -> "ModuliPoint":
        """Re-normalize p (including the scaling) and wrap it."""
        inv = p.inv
        return cls(normalize(inv.a, inv.b, inv.c, embed(p)))

    @property
    def a(self) -> int:
        return self.p.inv.a

    def __str__(self) -> str:
        return str(self.p)


class GeneratorKind(str, Enum):
    ZGL2 = "ZGl2"
    YGL2 = "YGl2"
    DIAG_GL2 = "DiagGl2"
    SHEAR = "Shear"


@dataclass(frozen=True)
class FaGenerator:
    kind: GeneratorKind
    g: Optional[Gl2] = None
    r: Optional[LaurentPoly] = None

    def __post_init__(self):
        if self.kind == GeneratorKind.SHEAR:
            if self.r is None or (self.r.low_degree is not None and self.r.low_degree < 0):
                raise IllegalGenerator(f"Shear needs a polynomial R(z), got {self.r}")
        elif self.g is None:
            raise IllegalGenerator(f"{self.kind.value} needs a matrix")

    @classmethod
    def zgl2(cls, alpha: RationalLike, beta: RationalLike, gamma: RationalLike, delta: RationalLike) -> "FaGenerator":
        return cls(GeneratorKind.ZGL2, g=Gl2.of(alpha, beta, gamma, delta))

    @classmethod
    def ygl2(cls, alpha: RationalLike, beta: RationalLike, gamma: RationalLike, delta: RationalLike) -> "FaGenerator":
        return cls(GeneratorKind.YGL2, g=Gl2.of(alpha, beta, gamma, delta))

    @classmethod
    def diag_gl2(cls, alpha: RationalLike, beta: RationalLike, gamma: RationalLike, delta: RationalLike) -> "FaGenerator":
        return cls(GeneratorKind.DIAG_GL2, g=Gl2.of(alpha, beta, gamma, delta))

    @classmethod
    def shear(cls, r: Iterable[RationalLike]) -> "FaGenerator":
        """Shear by R(z) = sum r[j] z^j."""
        return cls(GeneratorKind.SHEAR, r=LaurentPoly(dict(enumerate(r))))

    def __str__(self) -> str:
        if self.kind == GeneratorKind.SHEAR:
            return f"Shear({self.r})"
        return f"{self.kind.value}{tuple(str(x) for x in self.g.as_tuple())}"


def window_parameters(a: int, b: int, c: int) -> int:
    """Number of free coefficients of a canonical polynomial: sum of c-1-a*i over rows with c-2-a*i >= 0."""
    return sum(c - 1 - a * i for i in range(b + 1) if c - 2 - a * i >= 0)


def dim_moduli(a: int, b: int, c: int) -> int:
    """
    Dimension of the projective space M_a^{b,c}.

    With d the largest integer such that d <= b and a*d <= c-2 the dimension is
    (d+1)(2(c-1) - a*d)/2 - 1, one less than the number of window parameters.

    Raises:
        RangeViolation: For a < 0, b < 1 or c < 2
    """
    if a < 0 or b < 1 or c < 2:
        raise RangeViolation(f"dim_moduli needs a >= 0, b >= 1, c >= 2, got ({a},{b},{c})")
    d = b if a == 0 else min(b, (c - 2) // a)
    return (d + 1) * (2 * (c - 1) - a * d) // 2 - 1


def act_symr(g: Gl2, p: TruncPoly) -> TruncPoly:
    """
    Sym^r action of GL2 on polynomials of degree <= r.

    z^i is identified with C(r,i) s^i t^(r-i); the matrix substitutes s -> alpha s + gamma t,
    t -> beta s + delta t. This is a left action and makes (u, v) -> sum u^i v^(r-i) z^i
    equivariant.

    Raises:
        SingularMatrix: If det g = 0
    """
    if g.det() == 0:
        raise SingularMatrix(f"Matrix {g.as_tuple()} is singular")
    r = p.bound
    form = sum((c * comb(r, i) * S**i * T**(r - i) for i, c in enumerate(p.coeffs) if c != 0), sympy.Integer(0))
    if form == 0:
        return p
    image = sympy.Poly(
        form.subs({S: g.alpha * S + g.gamma * T, T: g.beta * S + g.delta * T}, simultaneous=True), S, T
    )
    out: List[sympy.Rational] = [sympy.Integer(0)] * (r + 1)
    for (i, _j), c in zip(image.monoms(), image.coeffs()):
        out[i] += c / comb(r, i)
    return TruncPoly(r, tuple(out))


def triangular_identity_holds(g: Gl2, p: TruncPoly) -> bool:
    """
    For upper-triangular g and P^ = act_symr(g, P), check
    P(z) = alpha delta^(-r) (beta z + alpha)^(-1) P^(delta z (beta z + alpha)^(-1)) modulo z^(r+1).
    """
    if g.gamma != 0:
        raise ValueError(f"Matrix {g.as_tuple()} is not upper triangular")
    r = p.bound
    hat = act_symr(g, p)
    inv = trunc_inverse(TruncPoly.of(r, [g.alpha, g.beta]))
    inner = TruncPoly.of(r, [0, g.delta]) * inv
    return inv * hat.compose(inner) * (g.alpha / g.delta**r) == p


def random_trunc(r: int, rng: random.Random) -> TruncPoly:
    return TruncPoly.of(r, [_random_rational(rng) for _ in range(r + 1)])


def _act_rows(g: Gl2, p: CanonicalP) -> CanonicalP:
    inv = p.inv
    rows = tuple(act_symr(g, row) if row is not None else None for row in p.rows)
    return normalize(inv.a, inv.b, inv.c, embed(CanonicalP(inv, rows)))


def _act_y(g: Gl2, p: CanonicalP) -> CanonicalP:
    inv = p.inv
    return normalize(inv.a, inv.b, inv.c, subst_y_affine(embed(p), g.inverse()))


def act_on_moduli(a: int, gen: FaGenerator, m: ModuliPoint) -> ModuliPoint:
    """
    Act on a point of M_a^{b,c} by one generator of Aut(F_a).

    Args:
        a: Hirzebruch index; must match the point
        gen: Generator legal for a
        m: Point to move

    Returns:
        The image point, re-normalized

    Raises:
        IllegalGenerator: YGl2 or DiagGl2 with a >= 1, Shear with a = 0 or deg R > a,
            or an `a` that does not match the point
    """
    if a != m.a:
        raise IllegalGenerator(f"Point {m} lives over F_{m.a}, not F_{a}")
    inv = m.p.inv
    if gen.kind == GeneratorKind.ZGL2:
        image = _act_rows(gen.g, m.p)
    elif gen.kind in (GeneratorKind.YGL2, GeneratorKind.DIAG_GL2):
        if a != 0:
            raise IllegalGenerator(f"{gen.kind.value} acts only over F_0, got a = {a}")
        p = _act_rows(gen.g, m.p) if gen.kind == GeneratorKind.DIAG_GL2 else m.p
        image = _act_y(gen.g, p)
    else:
        if a == 0:
            raise IllegalGenerator("Shear generators act only over F_a with a >= 1")
        if gen.r.degree is not None and gen.r.degree > a:
            raise IllegalGenerator(f"Shear polynomial {gen.r} has degree > {a}")
        image = normalize(inv.a, inv.b, inv.c, subst_y_affine(embed(m.p), Shear(-gen.r)))
    logger.debug("act %s on %s -> %s", gen, m, image)
    return ModuliPoint(image)


def legal_kinds(a: int) -> List[GeneratorKind]:
    """Generator kinds tested by default: the diagonal action over F_0, ZGl2 and Shear over F_a, a >= 1."""
    if a == 0:
        return [GeneratorKind.DIAG_GL2]
    return [GeneratorKind.ZGL2, GeneratorKind.SHEAR]


def structured_generators(a: int, kinds: Sequence[GeneratorKind]) -> List[FaGenerator]:
    """Swap, diag(t, 1) for t in {2, 3, 5} and both unipotents for each matrix kind; z^j and 1 + z^a shears."""
    mats = [SWAP] + [Gl2.of(t, 0, 0, 1) for t in (2, 3, 5)] + [Gl2.of(1, 1, 0, 1), Gl2.of(1, 0, 1, 1)]
    gens: List[FaGenerator] = []
    for kind in kinds:
        if kind == GeneratorKind.SHEAR:
            gens += [FaGenerator.shear([0] * j + [1]) for j in range(a + 1)]
            gens.append(FaGenerator.shear([1] + [0] * (a - 1) + [1]) if a >= 1 else FaGenerator.shear([1]))
        else:
            gens += [FaGenerator(kind, g=g) for g in mats]
    return gens


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def random_gl2(rng: random.Random) -> Gl2:
    while True:
        entries = [_random_rational(rng) for _ in range(4)]
        if entries[0] * entries[3] - entries[1] * entries[2] != 0:
            return Gl2.of(*entries)


def random_generator(a: int, kind: GeneratorKind, rng: random.Random) -> FaGenerator:
    if kind == GeneratorKind.SHEAR:
        return FaGenerator.shear([_random_rational(rng) for _ in range(a + 1)])
    return FaGenerator(kind, g=random_gl2(rng))


def is_fixed_diag(
    a: int,
    m: ModuliPoint,
    trials: int = 10,
    seed: Optional[int] = None,
    kinds: Optional[Sequence[GeneratorKind]] = None,
) -> bool:
    """
    Sampled fixed-point test for the Aut(F_a)-action.

    A False answer is certain (some generator moves the point). A True answer means every
    structured generator and `trials` random ones fix it, which is strong evidence only.

    Args:
        a: Hirzebruch index
        m: Point to test
        trials: Number of random generators per kind
        seed: Seed for the random generators (defaults to P1BL_SEED)
        kinds: Generator kinds to use (defaults to legal_kinds(a))

    Returns:
        True if no tested generator moves m
    """
    kinds = list(kinds) if kinds is not None else legal_kinds(a)
    rng = random.Random(get_config().seed if seed is None else seed)
    gens = structured_generators(a, kinds)
    for kind in kinds:
        gens += [random_generator(a, kind, rng) for _ in range(trials)]
    for gen in gens:
        image = act_on_moduli(a, gen, m)
        if image != m:
            logger.info("%s moves %s to %s", gen, m, image)
            return False
    return True
