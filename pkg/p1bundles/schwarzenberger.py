"""
Schwarzenberger bundles S_b over P^2.

Transition matrices are written in the symmetric coordinates u = s + t, v = s t of the
double cover P^1 x P^1 -> P^2 branched along the conic Y^2 = 4XZ, using
h_n(u, v) = (s^n - t^n)/(s - t).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import sympy

from p1bundles.bundles import BundleDesc, TANGENT_BUNDLE_P2, canonical_p_of, normalize
from p1bundles.errors import RangeViolation
from p1bundles.exactalg import Y0, Y1, Z, BiHomogLaurent, RationalLike, to_rational

logger = logging.getLogger(__name__)

U = sympy.Symbol("u")
V = sympy.Symbol("v")
S = sympy.Symbol("s")
T = sympy.Symbol("t")
Y = sympy.Symbol("y")

SymPoly = sympy.Expr


@lru_cache(maxsize=None)
def h_poly(n: int) -> SymPoly:
    """(s^n - t^n)/(s - t) in u = s+t, v = st, via h_{n+1} = u h_n - v h_{n-1}."""
    if n < 0:
        raise RangeViolation(f"h_poly needs n >= 0, got {n}")
    if n == 0:
        return sympy.Integer(0)
    if n == 1:
        return sympy.Integer(1)
    return sympy.expand(U * h_poly(n - 1) - V * h_poly(n - 2))


def to_st(expr: SymPoly) -> sympy.Expr:
    return sympy.expand(sympy.sympify(expr).subs({U: S + T, V: S * T}, simultaneous=True))


@dataclass(frozen=True)
class SchwarzMat:
    b: int
    entries: sympy.ImmutableMatrix

    def det(self) -> SymPoly:
        return sympy.expand(self.entries.det())

    def in_st(self) -> sympy.ImmutableMatrix:
        return sympy.ImmutableMatrix(self.entries.applyfunc(to_st))

    def __str__(self) -> str:
        rows = self.entries.tolist()
        return f"S_{self.b}: [[{rows[0][0]}, {rows[0][1]}], [{rows[1][0]}, {rows[1][1]}]]"


def schwarz_matrix(b: int) -> SchwarzMat:
    """
    Transition matrix of S_b in (u, v).

    Raises:
        RangeViolation: For b < -1
    """
    if b < -1:
        raise RangeViolation(f"Schwarzenberger matrices exist for b >= -1, got {b}")
    if b == -1:
        rows = [[1, 0], [0, -V]]
    elif b == 0:
        rows = [[0, -1], [1, 0]]
    else:
        rows = [[h_poly(b), sympy.expand(V * h_poly(b - 1))], [h_poly(b + 1), sympy.expand(V * h_poly(b))]]
    return SchwarzMat(b, sympy.ImmutableMatrix(rows))


def st_matrix(b: int) -> sympy.Matrix:
    """The un-symmetrized matrix 1/(s-t) [[s^b - t^b, st(s^(b-1) - t^(b-1))], [s^(b+1) - t^(b+1), st(s^b - t^b)]]."""
    if b == -1:
        return sympy.Matrix([[1, 0], [0, -S * T]])
    if b < 0:
        raise RangeViolation(f"Schwarzenberger matrices exist for b >= -1, got {b}")

    def q(n: int) -> sympy.Expr:
        return sympy.cancel((S**n - T**n) / (S - T)) if n > 0 else sympy.Integer(0)

    if b == 0:
        return sympy.Matrix([[0, -1], [1, 0]])
    return sympy.Matrix([[q(b), sympy.expand(S * T * q(b - 1))], [q(b + 1), sympy.expand(S * T * q(b))]])


def special_iso(b: int) -> BundleDesc:
    """S_-1 = P_1, S_0 = P_0 and S_1 = P(T_P2)."""
    if b == -1:
        return BundleDesc.dec_p2(1)
    if b == 0:
        return BundleDesc.dec_p2(0)
    if b == 1:
        return TANGENT_BUNDLE_P2
    raise RangeViolation(f"special_iso is defined for b in {{-1, 0, 1}}, got {b}")


def restrict_line(b: int, tangent: bool) -> int:
    """Splitting type of S_b over a line: b on tangents to the conic, else b mod 2."""
    if b < 1:
        raise RangeViolation(f"restrict_line needs b >= 1, got {b}")
    if tangent:
        return b
    return b % 2


def line_is_tangent(p: RationalLike, q: RationalLike, r: RationalLike) -> bool:
    """
    Whether the line pX + qY + rZ = 0 is tangent to the conic Y^2 = 4XZ.

    Raises:
        RangeViolation: For p = q = r = 0
    """
    p, q, r = to_rational(p), to_rational(q), to_rational(r)
    if p == 0 and q == 0 and r == 0:
        raise RangeViolation("(0, 0, 0) is not a line")
    return q * q == p * r


def restrict_line_for(b: int, line: Tuple[RationalLike, RationalLike, RationalLike]) -> int:
    return restrict_line(b, line_is_tangent(*line))


def lift_identity_check(b: int) -> bool:
    """
    Check that the lift of S_b to P^1 x P^1 is the bundle with P_i = z^i and c = b + 2.

    The pulled-back gluing is x1 z^(b+2) + x0 z (y^(b+1) - z^(b+1))/(y - z); after swapping
    y0 and y1 it must normalize to the canonical polynomial of HatSchwarz(b).
    """
    if b < 1:
        raise RangeViolation(f"lift_identity_check needs b >= 1, got {b}")
    quotient = sympy.cancel((Y ** (b + 1) - Z ** (b + 1)) / (Y - Z))
    series = sum(Y**i * Z ** (b - i) for i in range(b + 1))
    if sympy.expand(quotient - series) != 0:
        logger.error("Quotient identity failed for b = %d: %s", b, quotient)
        return False
    pulled = sympy.expand(Y0**b * Z * series.subs(Y, Y1 / Y0))
    lifted = normalize(0, b, b + 2, BiHomogLaurent.from_expr(pulled, b))
    expected = canonical_p_of(BundleDesc.hat_schwarz(b))
    if lifted != expected:
        logger.error("Lifted polynomial %s differs from %s", lifted, expected)
        return False
    return True


def hat_blowdown_check(b: int) -> bool:
    """
    Check that blowing up the diagonal section of F_0^{m,m} (m = b+1) and contracting yields
    the HatSchwarz(b) transition [x0 : x1 z^(b+2) + x0 sum_i y0^i y1^(b-i) z^(i+1)].
    """
    if b < 1:
        raise RangeViolation(f"hat_blowdown_check needs b >= 1, got {b}")
    m = b + 1
    theta = sympy.Matrix([[1, 0], [0, Z**m]])
    # chart maps [x0 : x1] -> [x0 (y0 z - y1) : x1 - x0 y0^m] and [x0 (y0 - y1 z) : x1 - x0 y1^m], the second at 1/z
    near = sympy.Matrix([[Y0 * Z - Y1, 0], [-Y0**m, 1]])
    far = sympy.Matrix([[Y0 - Y1 / Z, 0], [-Y1**m, 1]])
    composite = (far * theta * near.inv()).applyfunc(sympy.cancel)
    if composite[0, 1] != 0:
        return False
    scale = composite[0, 0]
    gluing = sympy.cancel(composite[1, 0] / scale)
    twist = sympy.cancel(composite[1, 1] / scale)
    if sympy.expand(twist - Z ** (b + 2)) != 0:
        logger.error("Blow-down twist for b = %d is %s", b, twist)
        return False
    target = sum(Y0**i * Y1 ** (b - i) * Z ** (i + 1) for i in range(b + 1))
    if sympy.expand(gluing - target) != 0:
        logger.error("Blow-down gluing for b = %d is %s", b, gluing)
        return False
    return normalize(0, b, b + 2, BiHomogLaurent.from_expr(gluing, b)) == canonical_p_of(BundleDesc.hat_schwarz(b))


def involution_identity_check(b: int) -> bool:
    """Check [[-s-t, 2], [-2st, s+t]] M_b = M_b [[s+t, 2st], [-2, -s-t]] = the '+' matrix."""
    if b < 2:
        raise RangeViolation(f"involution_identity_check needs b >= 2, got {b}")
    m_b = st_matrix(b)
    left = (sympy.Matrix([[-S - T, 2], [-2 * S * T, S + T]]) * m_b).applyfunc(sympy.expand)
    right = (m_b * sympy.Matrix([[S + T, 2 * S * T], [-2, -S - T]])).applyfunc(sympy.expand)
    plus = sympy.Matrix(
        [
            [S**b + T**b, S * T * (S ** (b - 1) + T ** (b - 1))],
            [S ** (b + 1) + T ** (b + 1), S * T * (S**b + T**b)],
        ]
    ).applyfunc(sympy.expand)
    return left == right and left == plus


def h_parity_value(n: int) -> SymPoly:
    """h_n(0, v): zero for even n, (-1)^((n-1)/2) v^((n-1)/2) for odd n."""
    return sympy.expand(h_poly(n).subs(U, 0))
