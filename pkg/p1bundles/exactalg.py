"""
Exact polynomial kernels over the rationals.

Three value types carry all transition data of the package:

- LaurentPoly: sparse element of Q[z, 1/z]
- TruncPoly: dense element of Q[z]/(z^(r+1)), identified with polynomials of degree <= r
- BiHomogLaurent: element of Q[y0, y1, z, 1/z] homogeneous of degree b in (y0, y1),
  stored row-wise (row i is the coefficient of y0^i y1^(b-i))

All values are immutable; every operation returns a new value.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import sympy

from p1bundles.errors import InexactCoefficient, SingularMatrix, ZeroConstantTerm

Z = sympy.Symbol("z")
Y0 = sympy.Symbol("y0")
Y1 = sympy.Symbol("y1")

RationalLike = Union[int, str, Fraction, sympy.Rational, Tuple[int, int], List[int]]


def to_rational(value: Any) -> sympy.Rational:
    """
    Convert an exact scalar to a sympy Rational.

    Args:
        value: int, "p/q" string, Fraction, sympy Rational or a [num, den] pair

    Returns:
        The value as a Rational in lowest terms

    Raises:
        InexactCoefficient: For floats or anything not exactly representable
    """
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InexactCoefficient(f"Inexact or non-numeric coefficient: {value!r}")
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return sympy.Rational(int(value[0]), int(value[1]))
    if isinstance(value, str):
        return sympy.Rational(value)
    converted = sympy.sympify(value)
    if not isinstance(converted, sympy.Rational):
        raise InexactCoefficient(f"Not a rational number: {value!r}")
    return converted


def _split_term(term: sympy.Expr, symbols: Tuple[sympy.Symbol, ...]) -> Tuple[sympy.Rational, Tuple[int, ...]]:
    coeff, rest = term.as_coeff_Mul()
    coeff = to_rational(coeff)
    exponents = dict.fromkeys(symbols, 0)
    for base, exp in rest.as_powers_dict().items():
        if base == 1:
            continue
        if base not in exponents or not exp.is_integer:
            raise ValueError(f"Unexpected factor {base}**{exp} in {term}")
        exponents[base] += int(exp)
    return coeff, tuple(exponents[s] for s in symbols)


class LaurentPoly:
    """Sparse Laurent polynomial in z with rational coefficients; zero coefficients are never stored."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, RationalLike]] = None):
        cleaned: Dict[int, sympy.Rational] = {}
        for exp, value in (coeffs or {}).items():
            q = to_rational(value)
            if q != 0:
                cleaned[int(exp)] = q
        self._coeffs = cleaned

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def constant(cls, value: RationalLike) -> "LaurentPoly":
        return cls({0: value})

    @classmethod
    def monomial(cls, exp: int, value: RationalLike = 1) -> "LaurentPoly":
        return cls({exp: value})

    @classmethod
    def from_expr(cls, expr: Any, symbol: sympy.Symbol = Z) -> "LaurentPoly":
        """Read a Laurent polynomial from a sympy expression in `symbol`."""
        coeffs: Dict[int, sympy.Rational] = {}
        for term in sympy.Add.make_args(sympy.expand(sympy.sympify(expr))):
            if term == 0:
                continue
            coeff, (exp,) = _split_term(term, (symbol,))
            coeffs[exp] = coeffs.get(exp, sympy.Integer(0)) + coeff
        return cls(coeffs)

    @property
    def coeffs(self) -> Dict[int, sympy.Rational]:
        return dict(self._coeffs)

    def items(self) -> Iterator[Tuple[int, sympy.Rational]]:
        return iter(sorted(self._coeffs.items()))

    def coeff(self, exp: int) -> sympy.Rational:
        return self._coeffs.get(exp, sympy.Integer(0))

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def degree(self) -> Optional[int]:
        return max(self._coeffs) if self._coeffs else None

    @property
    def low_degree(self) -> Optional[int]:
        return min(self._coeffs) if self._coeffs else None

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by z^k."""
        return LaurentPoly({e + k: c for e, c in self._coeffs.items()})

    def window(self, low: int, high: int) -> "LaurentPoly":
        """Keep only the monomials z^e with low <= e <= high."""
        return LaurentPoly({e: c for e, c in self._coeffs.items() if low <= e <= high})

    def subst_inv(self) -> "LaurentPoly":
        """Return f(1/z)."""
        return LaurentPoly({-e: c for e, c in self._coeffs.items()})

    def to_expr(self, symbol: sympy.Symbol = Z) -> sympy.Expr:
        return sympy.Add(*[c * symbol**e for e, c in self.items()])

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        merged = dict(self._coeffs)
        for e, c in other._coeffs.items():
            merged[e] = merged.get(e, sympy.Integer(0)) + c
        return LaurentPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __mul__(self, other: Any) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            q = to_rational(other)
            return LaurentPoly({e: c * q for e, c in self._coeffs.items()})
        product: Dict[int, sympy.Rational] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                product[e1 + e2] = product.get(e1 + e2, sympy.Integer(0)) + c1 * c2
        return LaurentPoly(product)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError(f"Negative power of a Laurent polynomial: {n}")
        result = LaurentPoly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LaurentPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction, sympy.Rational)):
            return self == LaurentPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"LaurentPoly({dict(self.items())!r})"

    def __str__(self) -> str:
        return str(self.to_expr()) if self._coeffs else "0"


def laurent_subst_inv(f: LaurentPoly) -> LaurentPoly:
    """Exponent negation: returns f(1/z)."""
    return f.subst_inv()


@dataclass(frozen=True)
class TruncPoly:
    """Element of Q[z]/(z^(bound+1)); coeffs[i] is the coefficient of z^i."""

    bound: int
    coeffs: Tuple[sympy.Rational, ...]

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError(f"Truncation bound must be nonnegative: {self.bound}")
        if len(self.coeffs) != self.bound + 1:
            raise ValueError(f"Expected {self.bound + 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def of(cls, bound: int, coeffs: Iterable[RationalLike] = ()) -> "TruncPoly":
        """Build from a coefficient list, padding with zeros and discarding exponents above bound."""
        values = [to_rational(c) for c in coeffs][: bound + 1]
        values += [sympy.Integer(0)] * (bound + 1 - len(values))
        return cls(bound, tuple(values))

    @classmethod
    def from_laurent(cls, f: LaurentPoly, bound: int) -> "TruncPoly":
        if f.low_degree is not None and f.low_degree < 0:
            raise ValueError(f"Negative exponent in {f}, cannot truncate into Q[z]/(z^{bound + 1})")
        return cls.of(bound, [f.coeff(i) for i in range(bound + 1)])

    def to_laurent(self) -> LaurentPoly:
        return LaurentPoly(dict(enumerate(self.coeffs)))

    def to_expr(self, symbol: sympy.Symbol = Z) -> sympy.Expr:
        return self.to_laurent().to_expr(symbol)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _check(self, other: "TruncPoly") -> None:
        if other.bound != self.bound:
            raise ValueError(f"Bound mismatch: {self.bound} != {other.bound}")

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        self._check(other)
        return TruncPoly(self.bound, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncPoly":
        return TruncPoly(self.bound, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        return self + (-other)

    def __mul__(self, other: Any) -> "TruncPoly":
        if not isinstance(other, TruncPoly):
            q = to_rational(other)
            return TruncPoly(self.bound, tuple(c * q for c in self.coeffs))
        self._check(other)
        r = self.bound
        out = [sympy.Integer(0)] * (r + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(r + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return TruncPoly(r, tuple(out))

    __rmul__ = __mul__

    def compose(self, inner: "TruncPoly") -> "TruncPoly":
        """Evaluate self at `inner` inside Q[z]/(z^(bound+1)) by Horner's rule."""
        self._check(inner)
        result = TruncPoly.of(self.bound)
        for c in reversed(self.coeffs):
            result = result * inner + TruncPoly.of(self.bound, [c])
        return result

    def reversed(self) -> "TruncPoly":
        return TruncPoly(self.bound, tuple(reversed(self.coeffs)))

    def __str__(self) -> str:
        return f"{self.to_expr()} mod z^{self.bound + 1}"


def trunc_inverse(f: TruncPoly) -> TruncPoly:
    """
    Inverse of f in Q[z]/(z^(r+1)).

    Args:
        f: Truncated polynomial with nonzero constant term

    Returns:
        g with f * g = 1 modulo z^(r+1)

    Raises:
        ZeroConstantTerm: If f(0) = 0
    """
    f0 = f.coeffs[0]
    if f0 == 0:
        raise ZeroConstantTerm(f"Constant term of {f} is zero, no inverse modulo z^{f.bound + 1}")
    g: List[sympy.Rational] = [1 / f0]
    for k in range(1, f.bound + 1):
        acc = sum((f.coeffs[j] * g[k - j] for j in range(1, k + 1)), sympy.Integer(0))
        g.append(-acc / f0)
    return TruncPoly(f.bound, tuple(g))


@dataclass(frozen=True)
class Gl2:
    """Invertible 2x2 rational matrix (alpha, beta; gamma, delta)."""

    alpha: sympy.Rational
    beta: sympy.Rational
    gamma: sympy.Rational
    delta: sympy.Rational

    @classmethod
    def of(cls, alpha: RationalLike, beta: RationalLike, gamma: RationalLike, delta: RationalLike) -> "Gl2":
        g = cls(to_rational(alpha), to_rational(beta), to_rational(gamma), to_rational(delta))
        if g.det() == 0:
            raise SingularMatrix(f"Matrix ({alpha}, {beta}; {gamma}, {delta}) has zero determinant")
        return g

    @classmethod
    def identity(cls) -> "Gl2":
        return cls.of(1, 0, 0, 1)

    def det(self) -> sympy.Rational:
        return self.alpha * self.delta - self.beta * self.gamma

    def __matmul__(self, other: "Gl2") -> "Gl2":
        return Gl2.of(
            self.alpha * other.alpha + self.beta * other.gamma,
            self.alpha * other.beta + self.beta * other.delta,
            self.gamma * other.alpha + self.delta * other.gamma,
            self.gamma * other.beta + self.delta * other.delta,
        )

    def inverse(self) -> "Gl2":
        d = self.det()
        return Gl2.of(self.delta / d, -self.beta / d, -self.gamma / d, self.alpha / d)

    def as_tuple(self) -> Tuple[sympy.Rational, ...]:
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class Shear:
    """The substitution y1 -> y1 + y0 * r(z)."""

    r: LaurentPoly


@dataclass(frozen=True)
class BiHomogLaurent:
    """Homogeneous of degree b in (y0, y1), Laurent in z; rows[i] multiplies y0^i y1^(b-i)."""

    b: int
    rows: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        if self.b < 0:
            raise ValueError(f"y-degree must be nonnegative: {self.b}")
        if len(self.rows) != self.b + 1:
            raise ValueError(f"Expected {self.b + 1} rows for y-degree {self.b}, got {len(self.rows)}")

    @classmethod
    def zero(cls, b: int) -> "BiHomogLaurent":
        return cls(b, tuple(LaurentPoly() for _ in range(b + 1)))

    @classmethod
    def from_rows(cls, rows: Iterable[Any]) -> "BiHomogLaurent":
        converted = tuple(r if isinstance(r, LaurentPoly) else LaurentPoly.from_expr(r) for r in rows)
        return cls(len(converted) - 1, converted)

    @classmethod
    def from_expr(cls, expr: Any, b: int) -> "BiHomogLaurent":
        """Read from a sympy expression in y0, y1, z homogeneous of degree b in y."""
        rows: List[Dict[int, sympy.Rational]] = [{} for _ in range(b + 1)]
        for term in sympy.Add.make_args(sympy.expand(sympy.sympify(expr))):
            if term == 0:
                continue
            coeff, (i, j, e) = _split_term(term, (Y0, Y1, Z))
            if i < 0 or j < 0 or i + j != b:
                raise ValueError(f"Term {term} is not of y-degree {b}")
            rows[i][e] = rows[i].get(e, sympy.Integer(0)) + coeff
        return cls(b, tuple(LaurentPoly(r) for r in rows))

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.rows)

    def to_expr(self) -> sympy.Expr:
        return sympy.Add(*[Y0**i * Y1**(self.b - i) * r.to_expr() for i, r in enumerate(self.rows)])

    def __add__(self, other: "BiHomogLaurent") -> "BiHomogLaurent":
        if other.b != self.b:
            raise ValueError(f"y-degree mismatch: {self.b} != {other.b}")
        return BiHomogLaurent(self.b, tuple(p + q for p, q in zip(self.rows, other.rows)))

    def __mul__(self, other: Any) -> "BiHomogLaurent":
        return BiHomogLaurent(self.b, tuple(r * other for r in self.rows))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return str(self.to_expr())


def subst_y_affine(p: BiHomogLaurent, kind: Union[Shear, Gl2]) -> BiHomogLaurent:
    """
    Substitute a linear change of the y-variables into P.

    Args:
        p: Bihomogeneous Laurent polynomial of y-degree b
        kind: Shear(r) for P(y0, y1 + y0 r(z), z); Gl2 for P(alpha y0 + beta y1, gamma y0 + delta y1, z)

    Returns:
        The expanded result, again of y-degree b

    Raises:
        SingularMatrix: For a Gl2 with zero determinant
    """
    b = p.b
    out = [LaurentPoly() for _ in range(b + 1)]
    if isinstance(kind, Shear):
        for i, f in enumerate(p.rows):
            if f.is_zero():
                continue
            power = LaurentPoly.constant(1)
            for j in range(b - i + 1):
                out[i + j] = out[i + j] + f * power * comb(b - i, j)
                power = power * kind.r
        return BiHomogLaurent(b, tuple(out))

    if kind.det() == 0:
        raise SingularMatrix(f"Substitution matrix {kind.as_tuple()} is singular")
    for i, f in enumerate(p.rows):
        if f.is_zero():
            continue
        image = sympy.Poly(
            (kind.alpha * Y0 + kind.beta * Y1) ** i * (kind.gamma * Y0 + kind.delta * Y1) ** (b - i), Y0, Y1
        )
        for (e0, _e1), c in zip(image.monoms(), image.coeffs()):
            out[e0] = out[e0] + f * c
    return BiHomogLaurent(b, tuple(out))
