"""
Descriptors and canonical forms of P1-bundles over F_a and P^2.

A P1-bundle over F_a with numerical invariants (a, b, c) is glued from two copies of
F_b x A^1 by

    ([x0:x1; y0:y1], z) -> ([x0 : x1 z^c + x0 P(y0, y1, z); y0 z^a : y1], 1/z)

and two polynomials P define isomorphic bundles iff they differ by a nonzero scalar and by
terms Q1 z^c and Q2(y0 z^a, y1, 1/z). `normalize` picks the unique representative

    P = sum_i y0^i y1^(b-i) P_i(z) z^(a i + 1),   deg P_i <= c - 2 - a i

whose lex-first nonzero coefficient is 1.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import List, Optional, Tuple

import sympy

from p1bundles.errors import (
    DegreeMismatch,
    InvalidDescriptor,
    InvalidUmemura,
    NotOverHirzebruch,
    RangeViolation,
    UnsupportedFamily,
)
from p1bundles.exactalg import BiHomogLaurent, LaurentPoly, RationalLike, TruncPoly, to_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NumericalInvariants:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise InvalidDescriptor(f"Numerical invariants need a, b >= 0: ({self.a}, {self.b}, {self.c})")
        if self.b == 0 and self.c > 0:
            raise InvalidDescriptor(f"b = 0 requires c <= 0: ({self.a}, {self.b}, {self.c})")

    def row_bound(self, i: int) -> int:
        """Degree bound of P_i; -1 marks a row forced to zero."""
        return max(self.c - 2 - self.a * i, -1)

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class CanonicalP:
    """
    Canonical polynomial of a bundle Z_a^{b,c,P}.

    rows[i] is P_i as a TruncPoly of bound c-2-a*i, or None when that bound is negative.
    """

    inv: NumericalInvariants
    rows: Tuple[Optional[TruncPoly], ...]

    def __post_init__(self):
        if len(self.rows) != self.inv.b + 1:
            raise DegreeMismatch(f"Expected {self.inv.b + 1} rows for {self.inv}, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            bound = self.inv.row_bound(i)
            if bound < 0 and row is not None:
                raise ValueError(f"Row {i} of {self.inv} must be the forced-zero row")
            if bound >= 0 and (row is None or row.bound != bound):
                raise ValueError(f"Row {i} of {self.inv} must have bound {bound}")

    @classmethod
    def zero(cls, inv: NumericalInvariants) -> "CanonicalP":
        rows = tuple(
            TruncPoly.of(inv.row_bound(i)) if inv.row_bound(i) >= 0 else None for i in range(inv.b + 1)
        )
        return cls(inv, rows)

    @classmethod
    def from_coefficients(cls, a: int, b: int, c: int, rows: List[List[RationalLike]]) -> "CanonicalP":
        """Build from P_i coefficient lists (padded), then apply the scaling normal form."""
        inv = NumericalInvariants(a, b, c)
        built = []
        for i in range(b + 1):
            bound = inv.row_bound(i)
            coeffs = rows[i] if i < len(rows) else []
            if bound < 0:
                if any(to_rational(x) != 0 for x in coeffs):
                    raise ValueError(f"Row {i} of {inv} is forced to zero, got {coeffs}")
                built.append(None)
            else:
                if len(coeffs) > bound + 1 and any(to_rational(x) != 0 for x in coeffs[bound + 1:]):
                    raise ValueError(f"Row {i} of {inv} has degree bound {bound}, got {coeffs}")
                built.append(TruncPoly.of(bound, coeffs))
        return _scale_normal_form(cls(inv, tuple(built)))

    def row_laurent(self, i: int) -> LaurentPoly:
        row = self.rows[i]
        return row.to_laurent() if row is not None else LaurentPoly()

    def free_coefficients(self) -> List[sympy.Rational]:
        """All coefficients in lex order (rows by increasing i, then by z-degree)."""
        return [c for row in self.rows if row is not None for c in row.coeffs]

    def __str__(self) -> str:
        parts = [str(row.to_expr()) if row is not None else "-" for row in self.rows]
        return f"P{self.inv}[{', '.join(parts)}]"


def _scale_normal_form(p: CanonicalP) -> CanonicalP:
    lead = next((c for c in p.free_coefficients() if c != 0), None)
    if lead is None or lead == 1:
        return p
    return CanonicalP(p.inv, tuple(row * (1 / lead) if row is not None else None for row in p.rows))


def normalize(a: int, b: int, c: int, raw: BiHomogLaurent) -> CanonicalP:
    """
    Reduce a raw gluing polynomial to the canonical representative of its class.

    Row i is reduced modulo span{z^m : m >= c} + span{z^m : m <= a*i}; the surviving
    window z^(a i + 1) .. z^(c-1) is re-indexed as P_i, then the lex-first nonzero
    coefficient is scaled to 1.

    Args:
        a: Hirzebruch index of the base
        b: y-degree of P (generic fibre F_b)
        c: twist of the gluing
        raw: Bihomogeneous Laurent polynomial of y-degree b (ignored when b = 0)

    Returns:
        CanonicalP of the isomorphism class

    Raises:
        DegreeMismatch: If raw.b != b
    """
    if b == 0:
        return CanonicalP.zero(NumericalInvariants(a, 0, -abs(c)))
    if raw.b != b:
        raise DegreeMismatch(f"Raw polynomial has y-degree {raw.b}, expected {b}")
    inv = NumericalInvariants(a, b, c)
    rows: List[Optional[TruncPoly]] = []
    for i, f in enumerate(raw.rows):
        bound = inv.row_bound(i)
        if bound < 0:
            rows.append(None)
            continue
        kept = f.window(a * i + 1, c - 1).shift(-(a * i + 1))
        rows.append(TruncPoly.from_laurent(kept, bound))
    result = _scale_normal_form(CanonicalP(inv, tuple(rows)))
    logger.debug("normalize %s: %s -> %s", inv, raw, result)
    return result


def embed(p: CanonicalP) -> BiHomogLaurent:
    """Re-expand a canonical form to P = sum_i y0^i y1^(b-i) P_i(z) z^(a i + 1)."""
    a = p.inv.a
    return BiHomogLaurent(p.inv.b, tuple(p.row_laurent(i).shift(a * i + 1) for i in range(p.inv.b + 1)))


def equivalent_representative(
    raw: BiHomogLaurent,
    a: int,
    c: int,
    lam: RationalLike,
    q1: BiHomogLaurent,
    q2: BiHomogLaurent,
) -> BiHomogLaurent:
    """
    Return lam*P + Q1*z^c + Q2(y0 z^a, y1, 1/z), a representative of the same class.

    Q1 and Q2 must be polynomial in z (no negative exponents).
    """
    if to_rational(lam) == 0:
        raise ValueError("Scaling factor must be nonzero")
    for q in (q1, q2):
        if q.b != raw.b:
            raise DegreeMismatch(f"Perturbation has y-degree {q.b}, expected {raw.b}")
        if any(r.low_degree is not None and r.low_degree < 0 for r in q.rows):
            raise ValueError(f"Perturbation {q} must be polynomial in z")
    rows = []
    for i, f in enumerate(raw.rows):
        twisted = q1.rows[i].shift(c)
        pulled = q2.rows[i].subst_inv().shift(a * i)
        rows.append(f * lam + twisted + pulled)
    return BiHomogLaurent(raw.b, tuple(rows))


def is_decomposable(p: CanonicalP) -> bool:
    """True iff P = 0."""
    return all(row is None or row.is_zero() for row in p.rows)


def binomial_identity(r: int, p: int, k: int) -> Tuple[int, int]:
    """
    Both sides of C(r+1, p-k) = sum_{i=k}^{p} C(i, i-k) C(r-i, p-i).

    Raises:
        RangeViolation: Unless 0 <= k <= p <= r
    """
    if not 0 <= k <= p <= r:
        raise RangeViolation(f"Need 0 <= k <= p <= r, got (r, p, k) = ({r}, {p}, {k})")
    lhs = comb(r + 1, p - k)
    rhs = sum(comb(i, i - k) * comb(r - i, p - i) for i in range(k, p + 1))
    return lhs, rhs


class Family(str, Enum):
    DEC_FA = "DecFa"
    DEC_P2 = "DecP2"
    UMEMURA = "Umemura"
    SCHWARZ = "Schwarz"
    HAT_SCHWARZ = "HatSchwarz"
    V1 = "V1"
    RAW = "Raw"


FAMILY_ORDER = [Family.DEC_FA, Family.DEC_P2, Family.UMEMURA, Family.SCHWARZ, Family.V1, Family.HAT_SCHWARZ, Family.RAW]
OVER_P2 = {Family.DEC_P2, Family.SCHWARZ, Family.V1}


@dataclass(frozen=True)
class BundleDesc:
    """
    Tagged descriptor of a bundle in one of the named families.

    Use the classmethod constructors; they enforce each family's constraints. `a` and `c`
    are None for the families over P^2. `alias` is display-only.
    """

    family: Family
    b: int
    a: Optional[int] = None
    c: Optional[int] = None
    raw: Optional[CanonicalP] = None
    alias: Optional[str] = field(default=None, compare=False)

    @classmethod
    def dec_fa(cls, a: int, b: int, c: int) -> "BundleDesc":
        if a < 0 or b < 0 or (b == 0 and c > 0):
            raise InvalidDescriptor(f"DecFa needs a, b >= 0 and c <= 0 when b = 0, got ({a},{b},{c})")
        return cls(Family.DEC_FA, b, a, c)

    @classmethod
    def dec_fa_signed(cls, a: int, b: int, c: int) -> "BundleDesc":
        """F_a^{b,c} for any integers b, c; only the x0 <-> x1 swap relates it to the stored convention."""
        if a < 0:
            raise InvalidDescriptor(f"DecFa needs a >= 0, got ({a},{b},{c})")
        return cls(Family.DEC_FA, b, a, c)

    @classmethod
    def dec_fa_normalized(cls, a: int, b: int, c: int) -> "BundleDesc":
        """Apply the x0 <-> x1 isomorphism F_a^{b,c} = F_a^{-b,-c} when (b, c) breaks the sign convention."""
        if b < 0 or (b == 0 and c > 0):
            b, c = -b, -c
        return cls.dec_fa(a, b, c)

    @classmethod
    def dec_p2(cls, b: int) -> "BundleDesc":
        if b < 0:
            raise InvalidDescriptor(f"DecP2 stores b >= 0 (P_b = P_-b), got {b}")
        return cls(Family.DEC_P2, b)

    @classmethod
    def umemura(cls, a: int, b: int, c: int) -> "BundleDesc":
        if a < 1 or b < 1 or c < 2 or (c - 2) % a != 0 or (c - 2) // a > b:
            raise InvalidUmemura(f"Umemura needs a, b >= 1 and c = a*k + 2 with 0 <= k <= b, got ({a},{b},{c})")
        return cls(Family.UMEMURA, b, a, c)

    @classmethod
    def schwarz(cls, b: int, alias: Optional[str] = None) -> "BundleDesc":
        if b < 1:
            raise InvalidDescriptor(f"Schwarz needs b >= 1, got {b}")
        return cls(Family.SCHWARZ, b, alias=alias)

    @classmethod
    def hat_schwarz(cls, b: int) -> "BundleDesc":
        if b < 1:
            raise InvalidDescriptor(f"HatSchwarz needs b >= 1, got {b}")
        return cls(Family.HAT_SCHWARZ, b)

    @classmethod
    def v1(cls, b: int) -> "BundleDesc":
        if b < 2:
            raise InvalidDescriptor(f"V1 needs b >= 2 (V1 with b = 1 is Schwarz(1)), got {b}")
        return cls(Family.V1, b)

    @classmethod
    def from_raw(cls, p: CanonicalP) -> "BundleDesc":
        return cls(Family.RAW, p.inv.b, p.inv.a, p.inv.c, raw=p)

    @property
    def k(self) -> int:
        """Umemura exponent (c - 2) / a."""
        if self.family != Family.UMEMURA:
            raise UnsupportedFamily(f"{self} has no Umemura exponent")
        return (self.c - 2) // self.a

    @property
    def needs_xswap(self) -> bool:
        """True for a DecFa whose (b, c) breaks the b >= 0, c <= 0-when-b = 0 convention."""
        return self.family == Family.DEC_FA and (self.b < 0 or (self.b == 0 and self.c > 0))

    def normalized(self) -> "BundleDesc":
        if self.needs_xswap:
            return BundleDesc.dec_fa_normalized(self.a, self.b, self.c)
        return self

    @property
    def over_p2(self) -> bool:
        return self.family in OVER_P2

    def sort_key(self) -> Tuple:
        return (FAMILY_ORDER.index(self.family), self.a if self.a is not None else -1, self.b,
                self.c if self.c is not None else 0)

    def __str__(self) -> str:
        if self.family in (Family.DEC_FA, Family.UMEMURA, Family.RAW):
            return f"{self.family.value}({self.a},{self.b},{self.c})"
        return f"{self.family.value}({self.b})"


TANGENT_BUNDLE_P2 = BundleDesc.schwarz(1, alias="P(T_P2)")


def invariants_of(desc: BundleDesc) -> NumericalInvariants:
    """
    Numerical invariants (a, b, c) of a bundle over a Hirzebruch surface.

    Raises:
        NotOverHirzebruch: For DecP2, Schwarz and V1
    """
    if desc.over_p2:
        raise NotOverHirzebruch(f"{desc} is a bundle over P^2")
    if desc.family == Family.HAT_SCHWARZ:
        return NumericalInvariants(0, desc.b, desc.b + 2)
    if desc.family == Family.RAW:
        return desc.raw.inv
    if desc.needs_xswap:
        desc = desc.normalized()
    return NumericalInvariants(desc.a, desc.b, desc.c)


def canonical_p_of(desc: BundleDesc) -> CanonicalP:
    """
    Canonical polynomial of a named bundle over F_a.

    Raises:
        UnsupportedFamily: For the families over P^2
    """
    if desc.over_p2:
        raise UnsupportedFamily(f"{desc} lives over P^2 and has no canonical polynomial")
    if desc.family == Family.RAW:
        return desc.raw
    inv = invariants_of(desc)
    zero = CanonicalP.zero(inv)
    if desc.family == Family.DEC_FA:
        return zero
    rows = list(zero.rows)
    if desc.family == Family.UMEMURA:
        # z^(c-1) = z^(a k + 1) * 1
        rows[desc.k] = TruncPoly.of(0, [1])
    else:
        rows = [TruncPoly.of(desc.b, [0] * i + [1]) for i in range(desc.b + 1)]
    return CanonicalP(inv, tuple(rows))
