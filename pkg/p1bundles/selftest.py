"""
Identity battery run by `cli selftest`.

Each group returns a list of failure messages; an empty list means the group passed.
Degrees are capped by P1BL_MAX_DEGREE and randomness is seeded by P1BL_SEED.
"""

import logging
import random
from typing import Callable, Dict, List, Optional

import sympy

from p1bundles.bundles import CanonicalP, binomial_identity, embed, equivalent_representative, normalize
from p1bundles.config import Config, get_config
from p1bundles.exactalg import BiHomogLaurent, Gl2, LaurentPoly, TruncPoly
from p1bundles.moduli import SWAP, act_symr, random_gl2, random_trunc, triangular_identity_holds
from p1bundles.schwarzenberger import (
    S,
    T,
    U,
    V,
    h_parity_value,
    h_poly,
    hat_blowdown_check,
    involution_identity_check,
    lift_identity_check,
    schwarz_matrix,
    to_st,
)
from p1bundles.transitions import TransitionMat, detect_jumps, remove_jumps

logger = logging.getLogger(__name__)

PERTURBATIONS_PER_BASE = 100

Group = Callable[[Config, random.Random], List[str]]


def check_binomial(config: Config, rng: random.Random) -> List[str]:
    failures = []
    r_max = 2 * config.max_degree
    for r in range(r_max + 1):
        for p in range(r + 1):
            for k in range(p + 1):
                lhs, rhs = binomial_identity(r, p, k)
                if lhs != rhs:
                    failures.append(f"(r, p, k) = ({r}, {p}, {k}): {lhs} != {rhs}")
    return failures


def check_schwarzenberger(config: Config, rng: random.Random) -> List[str]:
    failures = []
    cap = config.max_degree
    for n in range(2 * cap + 1):
        if sympy.expand(to_st(h_poly(n)) * (S - T) - (S**n - T**n)) != 0:
            failures.append(f"h_{n}(s+t, st)(s-t) != s^{n} - t^{n}")
        expected = sympy.Integer(0) if n % 2 == 0 else (-1) ** ((n - 1) // 2) * V ** ((n - 1) // 2)
        if sympy.expand(h_parity_value(n) - expected) != 0:
            failures.append(f"h_{n}(0, v) = {h_parity_value(n)}, expected {expected}")
    for b in range(cap + 3):
        det = schwarz_matrix(b).det()
        if sympy.expand(det - V**b) != 0:
            failures.append(f"det S_{b} = {det}, expected v^{b}")
    literal = {
        -1: sympy.Matrix([[1, 0], [0, -V]]),
        0: sympy.Matrix([[0, -1], [1, 0]]),
        1: sympy.Matrix([[1, 0], [U, V]]),
    }
    for b, mat in literal.items():
        if sympy.Matrix(schwarz_matrix(b).entries) != mat:
            failures.append(f"S_{b} = {schwarz_matrix(b)}, expected {mat.tolist()}")
    for b in range(2, cap + 1):
        if not involution_identity_check(b):
            failures.append(f"involution identity fails for b = {b}")
    return failures


def check_lift(config: Config, rng: random.Random) -> List[str]:
    failures = []
    for b in range(1, max(config.max_degree - 2, 1) + 1):
        if not lift_identity_check(b):
            failures.append(f"lift identity fails for b = {b}")
        if not hat_blowdown_check(b):
            failures.append(f"blow-down identity fails for b = {b}")
    return failures


def check_action(config: Config, rng: random.Random) -> List[str]:
    failures = []
    r_max = config.max_degree + 2
    for r in range(r_max + 1):
        for i in range(r + 1):
            basis = TruncPoly.of(r, [0] * i + [1])
            if act_symr(SWAP, basis) != basis.reversed():
                failures.append(f"swap of z^{i} (r = {r}) is {act_symr(SWAP, basis)}")
    for _ in range(50):
        r = rng.randint(0, r_max)
        g = random_gl2(rng)
        g = Gl2.of(g.alpha if g.alpha != 0 else 1, g.beta, 0, g.delta if g.delta != 0 else 1)
        p = random_trunc(r, rng)
        if not triangular_identity_holds(g, p):
            failures.append(f"triangular identity fails for g = {g.as_tuple()}, P = {p}")
    for _ in range(50):
        r = rng.randint(0, r_max)
        g, h, p = random_gl2(rng), random_gl2(rng), random_trunc(r, rng)
        if act_symr(g, act_symr(h, p)) != act_symr(g @ h, p):
            failures.append(f"group law fails for g = {g.as_tuple()}, h = {h.as_tuple()}, P = {p}")
    return failures


def _random_rows(b: int, low: int, high: int, rng: random.Random) -> BiHomogLaurent:
    return BiHomogLaurent(
        b, tuple(LaurentPoly({e: rng.randint(-4, 4) for e in range(low, high + 1)}) for _ in range(b + 1))
    )


def random_equivalent(p: CanonicalP, rng: random.Random) -> BiHomogLaurent:
    """A random representative lam P + Q1 z^c + Q2(y0 z^a, y1, 1/z) of the class of p."""
    inv = p.inv
    lam = 0
    while lam == 0:
        lam = rng.randint(-5, 5)
    q1 = _random_rows(inv.b, 0, 3, rng)
    q2 = _random_rows(inv.b, 0, 3, rng)
    return equivalent_representative(embed(p), inv.a, inv.c, lam, q1, q2)


def check_equivalence(config: Config, rng: random.Random) -> List[str]:
    failures = []
    bases = {
        (1, 2, 4): [[1, 2, 3], [0, 1], [1]],
        (2, 3, 5): [[0, 1, 0, 2], [3, 1]],
        (0, 2, 4): [[1, 0, 0], [0, 1, 0], [2, 0, 1]],
    }
    for (a, b, c), rows in bases.items():
        p = CanonicalP.from_coefficients(a, b, c, rows)
        for _ in range(PERTURBATIONS_PER_BASE):
            image = normalize(a, b, c, random_equivalent(p, rng))
            if image != p:
                failures.append(f"perturbation of {p} normalizes to {image}")
    return failures


def check_jumps(config: Config, rng: random.Random) -> List[str]:
    failures = []
    for e in (1, 2):
        a = TransitionMat.of([["y", f"x**{e}"], [0, "1/y"]])
        report = detect_jumps(a)
        if report.generic_b != 0 or [eps for _, eps in report.jumps] != [1]:
            failures.append(f"[[y, x^{e}], [0, 1/y]]: {report}")
        modified, steps = remove_jumps(a)
        if len(steps) != e or detect_jumps(modified).jumps:
            failures.append(f"[[y, x^{e}], [0, 1/y]] needs {len(steps)} modifications, expected {e}")
        if any(s.det_degree_after >= s.det_degree_before for s in steps):
            failures.append(f"det B degree does not decrease: {steps}")
    return failures


GROUPS: Dict[str, Group] = {
    "binomial": check_binomial,
    "schwarzenberger": check_schwarzenberger,
    "lift/blow-down": check_lift,
    "action": check_action,
    "equivalence": check_equivalence,
    "jump removal": check_jumps,
}


def run_selftest(config: Optional[Config] = None, verbose: bool = True) -> Dict[str, List[str]]:
    """
    Run every group and print one line per group.

    Returns:
        Map group name -> failure messages
    """
    config = config or get_config()
    report: Dict[str, List[str]] = {}
    for name, group in GROUPS.items():
        rng = random.Random(config.seed)
        try:
            failures = group(config, rng)
        except Exception as e:
            logger.exception("group %s raised", name)
            failures = [f"{type(e).__name__}: {e}"]
        report[name] = failures
        if verbose:
            if failures:
                print(f"✗ {name}: {len(failures)} failure(s)")
                for failure in failures[:5]:
                    print(f"    {failure}")
            else:
                print(f"✓ {name}")
    return report
