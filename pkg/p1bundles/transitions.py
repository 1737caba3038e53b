"""
Transition-matrix calculus over A^1 x P^1.

A P1-bundle over A^1 x P^1 (coordinates x on A^1, y on the affine chart of P^1) is given
by a 2x2 matrix A over Q[x, y, 1/y] acting on the fibre coordinates [u:v], up to
A ~ M A M' with M over Q[x, 1/y] and M' over Q[x, y]. This module splits such matrices
over Q(x) and over Q (Birkhoff factorization B^-1 A C = diag(y^m, y^n)), finds the
jumping fibres x = lambda where the splitting type exceeds the generic one, and removes
them by elementary modifications A -> Delta^-1 A Delta, Delta = diag(x - lambda, 1).

Matrix entries are sympy expressions in the symbols X and Y: rational functions of x
times Laurent monomials in y.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import sympy
from sympy.polys.matrices import DomainMatrix

from p1bundles.bundles import CanonicalP, embed
from p1bundles.errors import (
    NonUnitDeterminant,
    NotInvertible,
    NotNormalizedAtLambda,
    P1BundleError,
    SpecializationPole,
    UnresolvedJump,
)
from p1bundles.exactalg import BiHomogLaurent, RationalLike, to_rational, Y0, Y1, Z

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")
Y = sympy.Symbol("y")


def y_terms(expr: Any) -> Dict[int, sympy.Expr]:
    """
    Split an expression into its y-Laurent coefficients.

    Args:
        expr: Rational function of x times Laurent polynomial in y

    Returns:
        Map exponent -> coefficient (a reduced rational function of x); zero terms omitted

    Raises:
        P1BundleError: If the denominator is not a monomial in y
    """
    expr = sympy.cancel(sympy.sympify(expr))
    if expr == 0:
        return {}
    num, den = sympy.fraction(expr)
    den_terms = sympy.Poly(den, Y).terms()
    if len(den_terms) != 1:
        raise P1BundleError(f"{expr} is not Laurent in y (denominator {den})")
    (shift,), den_coeff = den_terms[0]
    out: Dict[int, sympy.Expr] = {}
    for (exp,), coeff in sympy.Poly(num, Y).terms():
        value = sympy.cancel(coeff / den_coeff)
        if value != 0:
            out[exp - shift] = value
    return out


def _top_degree(column: Sequence[sympy.Expr]) -> int:
    degrees = [max(y_terms(e)) for e in column if e != 0]
    if not degrees:
        raise NotInvertible("Transition matrix has a zero column")
    return max(degrees)


def _simplify(mat: sympy.Matrix) -> sympy.Matrix:
    return mat.applyfunc(sympy.cancel)


@dataclass(frozen=True)
class TransitionMat:
    """2x2 transition matrix over Q(x)[y, 1/y]."""

    entries: sympy.ImmutableMatrix

    @classmethod
    def of(cls, rows: Sequence[Sequence[Any]]) -> "TransitionMat":
        """Build from nested rows of sympy expressions or strings in x and y."""
        local = {"x": X, "y": Y}
        mat = sympy.Matrix([[sympy.sympify(e, locals=local) for e in row] for row in rows])
        if mat.shape != (2, 2):
            raise P1BundleError(f"Transition matrices are 2x2, got shape {mat.shape}")
        stray = mat.free_symbols - {X, Y}
        if stray:
            raise P1BundleError(f"Unexpected symbols {sorted(map(str, stray))} in transition matrix")
        for e in mat:
            y_terms(e)
        return cls(sympy.ImmutableMatrix(_simplify(mat)))

    @property
    def matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.entries)

    def det(self) -> sympy.Expr:
        return sympy.cancel(self.entries.det())

    def depends_on_x(self) -> bool:
        return X in self.entries.free_symbols

    def specialize(self, lam: RationalLike) -> "TransitionMat":
        """
        Substitute x = lam.

        Raises:
            SpecializationPole: If some x-coefficient has a pole at lam
        """
        return TransitionMat(sympy.ImmutableMatrix(_specialize(self.matrix, to_rational(lam))))

    def __matmul__(self, other: "TransitionMat") -> "TransitionMat":
        return TransitionMat(sympy.ImmutableMatrix(_simplify(self.matrix * other.matrix)))

    def equals(self, other: "TransitionMat") -> bool:
        return all(sympy.cancel(e) == 0 for e in (self.matrix - other.matrix))

    def __str__(self) -> str:
        return str(self.entries.tolist())


def _specialize(mat: sympy.Matrix, lam: sympy.Rational) -> sympy.Matrix:
    out = sympy.zeros(*mat.shape)
    for idx, e in enumerate(mat):
        _, den = sympy.fraction(sympy.cancel(e))
        if sympy.cancel(den.subs(X, lam)) == 0:
            raise SpecializationPole(f"Entry {e} has a pole at x = {lam}")
        out[idx] = sympy.cancel(e.subs(X, lam))
    return out


@dataclass(frozen=True)
class SplitData:
    """
    Birkhoff factorization B^-1 A C = diag(y^m, y^n), m >= n.

    `a` is the unit-normalized input (det a = y^(m+n)); b_mat is over Q[x, 1/y], c_mat
    over Q[x, y] after clearing, with det b_mat = det c_mat.
    """

    a: TransitionMat
    b_mat: sympy.ImmutableMatrix
    c_mat: sympy.ImmutableMatrix
    m: int
    n: int

    @property
    def generic_b(self) -> int:
        return self.m - self.n

    def diagonal(self) -> sympy.Matrix:
        return sympy.diag(Y**self.m, Y**self.n)

    def det_b(self) -> sympy.Expr:
        return sympy.cancel(self.b_mat.det())

    def check(self) -> bool:
        """Verify B * diag(y^m, y^n) = A * C exactly."""
        lhs = sympy.Matrix(self.b_mat) * self.diagonal()
        rhs = self.a.matrix * sympy.Matrix(self.c_mat)
        return all(sympy.cancel(e) == 0 for e in (lhs - rhs))


def unit_normalize(a: TransitionMat) -> Tuple[TransitionMat, int]:
    """
    Scale the first row so that det A = y^d exactly.

    Returns:
        (normalized matrix, d)

    Raises:
        NotInvertible: If det A = 0
        NonUnitDeterminant: If det A is not lambda(x) * y^d
    """
    terms = y_terms(a.det())
    if not terms:
        raise NotInvertible(f"Transition matrix {a} is singular")
    if len(terms) != 1:
        raise NonUnitDeterminant(f"det {a} = {a.det()} is not a unit times a power of y")
    ((d, mu),) = terms.items()
    if mu == 1:
        return a, d
    scaled = sympy.diag(1 / mu, 1) * a.matrix
    return TransitionMat(sympy.ImmutableMatrix(_simplify(scaled))), d


def _column_reduce(a: sympy.Matrix) -> Tuple[sympy.Matrix, sympy.Matrix, int, int]:
    """Column operations over F[y] until the top-degree coefficient matrix is invertible."""
    m_mat = sympy.Matrix(a)
    c_mat = sympy.eye(2)
    while True:
        degs = [_top_degree(m_mat[:, j]) for j in (0, 1)]
        lead = sympy.Matrix(2, 2, lambda i, j: y_terms(m_mat[i, j]).get(degs[j], sympy.Integer(0)))
        if sympy.cancel(lead.det()) != 0:
            break
        hi, lo = (0, 1) if degs[0] >= degs[1] else (1, 0)
        row = 0 if lead[0, lo] != 0 else 1
        ratio = sympy.cancel(lead[row, hi] / lead[row, lo])
        factor = ratio * Y ** (degs[hi] - degs[lo])
        m_mat[:, hi] = (m_mat[:, hi] - factor * m_mat[:, lo]).applyfunc(sympy.cancel)
        c_mat[:, hi] = (c_mat[:, hi] - factor * c_mat[:, lo]).applyfunc(sympy.cancel)
        logger.debug("column reduction: col%d -= (%s) * col%d, degrees were %s", hi, factor, lo, degs)
    if degs[0] < degs[1]:
        m_mat = m_mat[:, [1, 0]]
        c_mat = c_mat[:, [1, 0]]
        degs = [degs[1], degs[0]]
    return m_mat, c_mat, degs[0], degs[1]


def _x_coefficients(mats: Sequence[sympy.Matrix]) -> List[sympy.Expr]:
    return [coeff for mat in mats for e in mat for coeff in y_terms(e).values()]


def _clear(b_mat: sympy.Matrix, c_mat: sympy.Matrix) -> Tuple[sympy.Matrix, sympy.Matrix]:
    coeffs = _x_coefficients([b_mat, c_mat])
    scale = sympy.lcm_list([sympy.fraction(q)[1] for q in coeffs])
    b_mat = _simplify(b_mat * scale)
    c_mat = _simplify(c_mat * scale)
    content = sympy.gcd_list(_x_coefficients([b_mat, c_mat]))
    b_mat = _simplify(b_mat / content)
    c_mat = _simplify(c_mat / content)
    for j in (0, 1):
        common = sympy.gcd_list(_x_coefficients([b_mat[:, j], c_mat[:, j]]))
        if sympy.degree(common, X) > 0:
            logger.debug("removing common factor %s from column %d", common, j)
            b_mat[:, j] = (b_mat[:, j] / common).applyfunc(sympy.cancel)
            c_mat[:, j] = (c_mat[:, j] / common).applyfunc(sympy.cancel)
    return b_mat, c_mat


def birkhoff_split(a: TransitionMat) -> SplitData:
    """
    Factor A as B diag(y^m, y^n) C^-1 over Q(x) (or over Q for x-free matrices).

    Args:
        a: Invertible transition matrix with det A = mu * y^d

    Returns:
        SplitData with m >= n, m + n = d; B and C cleared of x-denominators

    Raises:
        NotInvertible: If det A = 0
        NonUnitDeterminant: If det A is not a unit times a power of y
    """
    normalized, d = unit_normalize(a)
    m_mat, c_mat, m, n = _column_reduce(normalized.matrix)
    b_mat = _simplify(m_mat * sympy.diag(Y**-m, Y**-n))
    b_mat, c_mat = _clear(b_mat, c_mat)
    if m + n != d:
        raise P1BundleError(f"Splitting degrees ({m}, {n}) do not sum to det degree {d}")
    return SplitData(normalized, sympy.ImmutableMatrix(b_mat), sympy.ImmutableMatrix(c_mat), m, n)


def _inverse(mat: sympy.Matrix) -> sympy.Matrix:
    det = sympy.cancel(mat.det())
    adj = sympy.Matrix([[mat[1, 1], -mat[0, 1]], [-mat[1, 0], mat[0, 0]]])
    return _simplify(adj / det)


def splitting_type_by_sections(a: TransitionMat) -> Tuple[int, int]:
    """
    Splitting type (m, n) computed from dimensions of spaces of global sections.

    A section of the twist by t is v in F[y]^2 with y^t A v in F[1/y]^2; its degree is at
    most top_degree(A^-1) - t. The largest t with a nonzero section is -n, and m = d - n.
    """
    normalized, d = unit_normalize(a)
    mat = normalized.matrix
    inv_top = max(_top_degree(_inverse(mat)[:, j]) for j in (0, 1))
    terms = [[y_terms(mat[i, j]) for j in (0, 1)] for i in (0, 1)]

    def h0(t: int) -> int:
        window = inv_top - t
        if window < 0:
            return 0
        unknowns = [(comp, k) for comp in (0, 1) for k in range(window + 1)]
        equations: Dict[Tuple[int, int], Dict[int, sympy.Expr]] = {}
        for col, (comp, k) in enumerate(unknowns):
            for i in (0, 1):
                for e, coeff in terms[i][comp].items():
                    power = e + t + k
                    if power > 0:
                        row = equations.setdefault((i, power), {})
                        row[col] = row.get(col, sympy.Integer(0)) + coeff
        if not equations:
            return len(unknowns)
        system = sympy.zeros(len(equations), len(unknowns))
        for r, key in enumerate(sorted(equations)):
            for col, value in equations[key].items():
                system[r, col] = value
        rank = DomainMatrix.from_Matrix(system).to_field().rank()
        return len(unknowns) - rank

    t = -(d // 2)
    if h0(t) == 0:
        raise P1BundleError(f"No sections at twist {t} for {a}; the degree window is too small")
    while h0(t + 1) > 0:
        t += 1
    n = -t
    return d - n, n


@dataclass(frozen=True)
class JumpReport:
    generic_b: int
    jumps: Tuple[Tuple[sympy.Rational, int], ...]
    unresolved: Tuple[str, ...]


@dataclass(frozen=True)
class RemovalStep:
    lam: sympy.Rational
    before_b: int
    det_degree_before: int
    det_degree_after: int


def _root_key(lam: sympy.Rational) -> Tuple[int, int]:
    return (int(lam.p), int(lam.q))


class _JumpState:
    """Mutable triple (A, B, C) with A C = B D, transformed by the reduction cases."""

    def __init__(self, split: SplitData):
        self.a = split.a.matrix
        self.b = sympy.Matrix(split.b_mat)
        self.c = sympy.Matrix(split.c_mat)
        self.m = split.m
        self.n = split.n

    @property
    def generic_b(self) -> int:
        return self.m - self.n

    def det_b(self) -> sympy.Poly:
        det = sympy.cancel(self.b.det())
        if Y in det.free_symbols:
            raise P1BundleError(f"det B = {det} depends on y")
        return sympy.Poly(det, X)

    def det_degree(self) -> int:
        return self.det_b().degree()

    def candidates(self) -> Tuple[List[sympy.Rational], List[str]]:
        _, factors = sympy.factor_list(self.det_b().as_expr(), X)
        roots, unresolved = [], []
        for factor, _mult in factors:
            poly = sympy.Poly(factor, X)
            if poly.degree() == 1:
                c1, c0 = poly.all_coeffs()
                roots.append(to_rational(-c0 / c1))
            elif poly.degree() > 1:
                unresolved.append(str(factor))
        return sorted(roots, key=_root_key), sorted(unresolved)

    def normalize_at(self, lam: sympy.Rational) -> Tuple[int, int]:
        """Replace (A, B, C) by (Bt^-1 A Ct, Bt^-1 B, Ct^-1 C) so that A(lam) is diagonal."""
        special = _specialize(self.a, lam)
        m_mat, ct, mt, nt = _column_reduce(special)
        bt = _simplify(m_mat * sympy.diag(Y**-mt, Y**-nt))
        bt_inv = _inverse(bt)
        self.a = _simplify(bt_inv * self.a * ct)
        self.b = _simplify(bt_inv * self.b)
        self.c = _simplify(_inverse(ct) * self.c)
        return mt, nt

    def _divide_column(self, j: int, lam: sympy.Rational) -> None:
        for mat in (self.b, self.c):
            if any(sympy.cancel(e.subs(X, lam)) != 0 for e in mat[:, j]):
                raise P1BundleError(f"Column {j} does not vanish at x = {lam}")
        self.b[:, j] = (self.b[:, j] / (X - lam)).applyfunc(sympy.cancel)
        self.c[:, j] = (self.c[:, j] / (X - lam)).applyfunc(sympy.cancel)

    def reduce_at(self, lam: sympy.Rational) -> Tuple[str, int]:
        """
        Apply one reduction case at a root lam of det B.

        Returns:
            (case tag, epsilon); tag "e" marks a genuine jump, left untouched
        """
        mt, _nt = self.normalize_at(lam)
        eps = mt - self.m
        b_lam = _specialize(self.b, lam)
        for j in (0, 1):
            if all(e == 0 for e in b_lam[:, j]):
                self._divide_column(j, lam)
                logger.debug("x = %s: zero column %d, divided by (x - lambda)", lam, j)
                return "a", eps
        if eps < 0:
            raise P1BundleError(f"Negative epsilon at x = {lam} without a zero column")
        if eps > 0:
            return "e", eps
        if self.generic_b == 0:
            kernel = b_lam.nullspace()[0]
            k1, k2 = kernel[0], kernel[1]
            if k2 != 0:
                r_mat = sympy.Matrix([[k1, 1], [k2, 0]])
            else:
                r_mat = sympy.Matrix([[k1, 0], [0, 1]])
            self.b = _simplify(self.b * r_mat)
            self.c = _simplify(self.c * r_mat)
            self._divide_column(0, lam)
            logger.debug("x = %s: constant change of columns %s", lam, r_mat.tolist())
            return "c", eps
        beta21, beta22 = b_lam[1, 0], b_lam[1, 1]
        r_mat = sympy.Matrix([[beta22, 0], [-beta21, 1]])
        r_prime = sympy.Matrix([[beta22, 0], [-beta21 * Y**self.generic_b, 1]])
        self.b = _simplify(self.b * r_mat)
        self.c = _simplify(self.c * r_prime)
        self._divide_column(0, lam)
        logger.debug("x = %s: triangular change of columns with beta21 = %s", lam, beta21)
        return "d", eps

    def reduce(self) -> Tuple[List[Tuple[sympy.Rational, int]], List[str]]:
        """Remove every spurious rational root of det B; return the genuine jumps."""
        while True:
            roots, unresolved = self.candidates()
            jumps = []
            for lam in roots:
                tag, eps = self.reduce_at(lam)
                if tag != "e":
                    break
                jumps.append((lam, eps))
            else:
                return jumps, unresolved

    def modify(self, lam: sympy.Rational) -> None:
        delta_inv = sympy.diag(1 / (X - lam), 1)
        delta = sympy.diag(X - lam, 1)
        for mat in (self.b, self.c):
            if any(sympy.cancel(e.subs(X, lam)) != 0 for e in mat[0, :]):
                raise NotNormalizedAtLambda(f"First row of B or C does not vanish at x = {lam}")
        self.a = _simplify(delta_inv * self.a * delta)
        self.b = _simplify(delta_inv * self.b)
        self.c = _simplify(delta_inv * self.c)

    def transition(self) -> TransitionMat:
        return TransitionMat(sympy.ImmutableMatrix(self.a))


def detect_jumps(a: TransitionMat) -> JumpReport:
    """
    Generic fibre index and jumping fibres of a transition over A^1 x P^1.

    Every rational root of det B is either removed by the reduction cases or reported as a
    jump (lambda, epsilon) where the fibre is F_(b + 2 epsilon). Factors of det B of
    degree > 1 are reported as unresolved.
    """
    state = _JumpState(birkhoff_split(a))
    jumps, unresolved = state.reduce()
    logger.debug("jumps of %s: generic b = %d, jumps %s, unresolved %s", a, state.generic_b, jumps, unresolved)
    return JumpReport(state.generic_b, tuple(jumps), tuple(unresolved))


def elementary_modification(a: TransitionMat, lam: RationalLike) -> TransitionMat:
    """
    Blow up the exceptional section of the fibre x = lam and contract the fibre.

    A is first normalized so that A(lam) = diag(y^m, y^n) with m >= n, then replaced by
    Delta^-1 A Delta with Delta = diag(x - lam, 1).

    Raises:
        NotNormalizedAtLambda: If A(lam) cannot be brought to diagonal form
    """
    lam = to_rational(lam)
    normalized, _d = unit_normalize(a)
    mat = normalized.matrix
    m_mat, ct, mt, nt = _column_reduce(_specialize(mat, lam))
    bt = _simplify(m_mat * sympy.diag(Y**-mt, Y**-nt))
    mat = _simplify(_inverse(bt) * mat * ct)
    at_lam = _specialize(mat, lam)
    if at_lam[0, 1] != 0 or at_lam[1, 0] != 0:
        raise NotNormalizedAtLambda(f"A({lam}) = {at_lam.tolist()} is not diagonal after normalization")
    modified = _simplify(sympy.diag(1 / (X - lam), 1) * mat * sympy.diag(X - lam, 1))
    return TransitionMat(sympy.ImmutableMatrix(modified))


def remove_jumps(a: TransitionMat) -> Tuple[TransitionMat, List[RemovalStep]]:
    """
    Remove all jumping fibres by repeated elementary modifications.

    Returns:
        (jump-free transition, one RemovalStep per modification)

    Raises:
        UnresolvedJump: If det B has irreducible factors of degree > 1
    """
    state = _JumpState(birkhoff_split(a))
    steps: List[RemovalStep] = []
    while True:
        jumps, unresolved = state.reduce()
        if unresolved:
            raise UnresolvedJump(unresolved)
        if not jumps:
            return state.transition(), steps
        lam, eps = jumps[0]
        before = state.det_degree()
        state.normalize_at(lam)
        state.modify(lam)
        step = RemovalStep(lam, state.generic_b + 2 * eps, before, state.det_degree())
        logger.debug("elementary modification at x = %s: %s", lam, step)
        steps.append(step)


@dataclass(frozen=True)
class TransitionData:
    """The gluing ([x0:x1; y0:y1], z) -> ([x0 : x1 z^c + x0 P; y0 z^a : y1], 1/z)."""

    a: int
    c: int
    p: BiHomogLaurent

    def formula(self) -> str:
        return f"([x0:x1;y0:y1],z) -> ([x0 : x1*z**{self.c} + x0*({self.p.to_expr()}); y0*z**{self.a} : y1], 1/z)"


def transition_of(p: CanonicalP) -> TransitionData:
    """Gluing data (c, P) of the bundle with canonical polynomial p."""
    return TransitionData(p.inv.a, p.inv.c, embed(p))


def line_transition(p: CanonicalP, family: str = "fibres") -> TransitionMat:
    """
    Transition over A^1 x P^1 read off the gluing of p.

    Args:
        p: Canonical polynomial
        family: "fibres" for the F_b-structure over the z-line (x = z); "rulings" (a = 0
            only) for the other projection of F_0 (x = y0/y1, y = z)

    Returns:
        The 2x2 transition matrix
    """
    poly = embed(p).to_expr()
    c = p.inv.c
    if family == "fibres":
        b = p.inv.b
        near = sympy.Matrix([[1, 0], [poly.subs({Y0: Y, Y1: 1, Z: X}), X**c]])
        far = sympy.Matrix([[1, 0], [poly.subs({Y0: 1, Y1: 1 / Y, Z: X}), X**c]])
        mat = _simplify(far * sympy.diag(Y**b, 1) * _inverse(near))
        return TransitionMat(sympy.ImmutableMatrix(mat))
    if family == "rulings":
        if p.inv.a != 0:
            raise P1BundleError(f"The second ruling exists only over F_0, got a = {p.inv.a}")
        entry = poly.subs({Y0: X, Y1: 1, Z: Y}, simultaneous=True)
        return TransitionMat.of([[1, 0], [entry, Y**c]])
    raise P1BundleError(f"Unknown line family {family!r}")
