"""
Maximality, stiffness and superstiffness of the connected automorphism group of a P1-bundle,
and the reduction to a maximal model along equivariant links.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import networkx as nx

from p1bundles.bundles import BundleDesc, Family, canonical_p_of, is_decomposable
from p1bundles.errors import InvalidDescriptor, NonTerminatingReduction, UnsupportedFamily
from p1bundles.links import (
    LinkStep,
    forward_steps,
    link_dec,
    link_dec_inverse,
    link_f1_to_p2,
    link_u1_to_v,
    link_ume_inverse,
    link_ume_to_dec,
    square_iso,
    xswap,
)

logger = logging.getLogger(__name__)

MAX_CHAIN_LENGTH = 10_000


class Reason(str, Enum):
    DEC_A0 = "decomposable over F_0"
    DEC_TRIVIAL = "decomposable with b = c = 0"
    DEC_WINDOW = "decomposable with -a < c < ab"
    DEC_OVER_F1 = "decomposable over F_1, descends to P^2"
    DEC_BELOW_WINDOW = "decomposable with c <= -a"
    DEC_ABOVE_WINDOW = "decomposable with c >= ab"
    DEC_P2 = "decomposable over P^2"
    UME_WINDOW = "Umemura with c - ab below the bound"
    UME_ABOVE_WINDOW = "Umemura with c - ab at or above the bound"
    SCHWARZ_TP2 = "S_1 = P(T_P2)"
    SCHWARZ = "Schwarzenberger with b >= 2"
    V1 = "V_1^b with b >= 2"
    HAT_SCHWARZ = "lift of a Schwarzenberger bundle"


@dataclass(frozen=True)
class Verdict:
    maximal: bool
    stiff: bool
    superstiff: bool
    reason: Reason

    def __post_init__(self):
        if (self.superstiff and not self.stiff) or (self.stiff and not self.maximal):
            raise ValueError(f"Inconsistent verdict {self}")

    @property
    def glyphs(self) -> str:
        marks = [name for name, flag in (("M", self.maximal), ("S", self.stiff), ("SS", self.superstiff)) if flag]
        return "{" + ",".join(marks) + "}"


@dataclass
class ReductionResult:
    target: BundleDesc
    chain: List[LinkStep] = field(default_factory=list)


def recognize(desc: BundleDesc) -> BundleDesc:
    """
    Map a raw canonical polynomial onto a named family.

    Raises:
        UnsupportedFamily: If the polynomial is not decomposable, Umemura or HatSchwarz
    """
    if desc.family != Family.RAW:
        return desc.normalized()
    p = desc.raw
    a, b, c = p.inv.a, p.inv.b, p.inv.c
    if is_decomposable(p):
        return BundleDesc.dec_fa(a, b, c)
    if a >= 1 and c >= 2 and (c - 2) % a == 0 and (c - 2) // a <= b:
        umemura = BundleDesc.umemura(a, b, c)
        if canonical_p_of(umemura) == p:
            return umemura
    if a == 0 and c == b + 2 and canonical_p_of(BundleDesc.hat_schwarz(b)) == p:
        return BundleDesc.hat_schwarz(b)
    raise UnsupportedFamily(f"{p} is not one of the named families")


def _dec_verdict(a: int, b: int, c: int) -> Verdict:
    if a == 0:
        return Verdict(True, True, True, Reason.DEC_A0)
    if a == 1:
        return Verdict(False, False, False, Reason.DEC_OVER_F1)
    if b == 0 and c == 0:
        return Verdict(True, True, True, Reason.DEC_TRIVIAL)
    if -a < c < a * b:
        return Verdict(True, False, False, Reason.DEC_WINDOW)
    if c >= a * b:
        return Verdict(False, False, False, Reason.DEC_ABOVE_WINDOW)
    return Verdict(False, False, False, Reason.DEC_BELOW_WINDOW)


def verdict(desc: BundleDesc) -> Verdict:
    """
    Classify the connected automorphism group of a bundle.

    Args:
        desc: Descriptor of a named family, or a raw polynomial of one

    Returns:
        Verdict with its reason tag

    Raises:
        InvalidDescriptor: For a descriptor outside the named families
    """
    try:
        desc = recognize(desc)
    except UnsupportedFamily as e:
        raise InvalidDescriptor(str(e))
    family = desc.family
    if family == Family.DEC_FA:
        return _dec_verdict(desc.a, desc.b, desc.c)
    if family == Family.DEC_P2:
        return Verdict(True, True, True, Reason.DEC_P2)
    if family == Family.UMEMURA:
        excess = desc.c - desc.a * desc.b
        bound = 2 if desc.a >= 2 else 1
        if excess < bound:
            return Verdict(True, False, False, Reason.UME_WINDOW)
        return Verdict(False, False, False, Reason.UME_ABOVE_WINDOW)
    if family == Family.SCHWARZ:
        if desc.b == 1:
            return Verdict(True, True, True, Reason.SCHWARZ_TP2)
        return Verdict(True, True, False, Reason.SCHWARZ)
    if family == Family.V1:
        return Verdict(True, False, False, Reason.V1)
    if family == Family.HAT_SCHWARZ:
        return Verdict(False, False, False, Reason.HAT_SCHWARZ)
    raise InvalidDescriptor(f"Cannot classify {desc}")


def _reduction_steps(desc: BundleDesc) -> List[LinkStep]:
    """The next forward-equivariant step(s) towards a maximal model of a non-maximal bundle."""
    family = desc.family
    if family == Family.DEC_FA:
        a, b, c = desc.a, desc.b, desc.c
        if a == 1:
            return [link_f1_to_p2(b, c)]
        if c >= a * b:
            step = link_dec_inverse(a, b, c, normalize=False)
            if step.target.needs_xswap:
                return [step, xswap(step.target)]
            return [step]
        return [link_dec(a, b, c)]
    if family == Family.UMEMURA:
        a, b, c = desc.a, desc.b, desc.c
        if desc.k == b:
            return [link_ume_inverse(a, b, c)] if b >= 2 else [link_ume_to_dec(a)]
        # a = 1 and k = b - 1
        return [link_ume_inverse(a, b, c)] if b >= 2 else [link_u1_to_v(1)]
    if family == Family.HAT_SCHWARZ:
        return [square_iso(desc.b)]
    raise InvalidDescriptor(f"No reduction rule for {desc}")


def maximal_model(desc: BundleDesc) -> ReductionResult:
    """
    Reduce a bundle to one whose automorphism group is maximal.

    Every emitted step is forward-equivariant, so the composite conjugates Aut(desc)
    into Aut(target). Shifts stop as soon as the maximal window is reached.

    Raises:
        InvalidDescriptor: For descriptors outside the named families
        NonTerminatingReduction: If the chain exceeds MAX_CHAIN_LENGTH links
    """
    chain: List[LinkStep] = []
    current = desc
    if desc.needs_xswap:
        chain.append(xswap(desc))
        current = chain[-1].target
    elif desc.family == Family.RAW:
        current = recognize(desc)
    while not verdict(current).maximal:
        if len(chain) > MAX_CHAIN_LENGTH:
            raise NonTerminatingReduction(f"Reduction of {desc} did not terminate within {MAX_CHAIN_LENGTH} links")
        for step in _reduction_steps(current):
            chain.append(step)
            current = step.target
    logger.info("maximal model of %s: %s after %d steps", desc, current, len(chain))
    return ReductionResult(current, chain)


def node_name(desc: BundleDesc) -> str:
    return str(desc.normalized())


def link_graph(desc: BundleDesc, radius: int, bi_only: bool = False) -> nx.DiGraph:
    """
    Graph of descriptors reachable by at most `radius` forward-equivariant links.

    Nodes are keyed by descriptor string and carry `desc` and `verdict`; edges carry `kind`,
    `fwd`, `bwd`. A bi-equivariant link also adds the reverse arc.

    Args:
        desc: Start node
        radius: Maximum number of links from desc
        bi_only: Follow bi-equivariant links only
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    graph = nx.DiGraph()
    start = recognize(desc)
    graph.add_node(node_name(start), desc=start, verdict=verdict(start))
    queue = deque([(start, 0)])
    seen = {node_name(start)}
    while queue:
        current, depth = queue.popleft()
        if depth >= radius:
            continue
        for step in forward_steps(current):
            if bi_only and not step.bi_equivariant:
                continue
            target = step.target.normalized()
            src, dst = node_name(current), node_name(target)
            if dst not in graph:
                graph.add_node(dst, desc=target, verdict=verdict(target))
            graph.add_edge(src, dst, kind=step.kind.value, fwd=True, bwd=step.bwd_equivariant)
            if step.bwd_equivariant and src != dst and not graph.has_edge(dst, src):
                graph.add_edge(dst, src, kind=step.kind.value, fwd=True, bwd=True)
            if dst not in seen:
                seen.add(dst)
                queue.append((target, depth + 1))
    logger.debug("link graph of %s radius %d: %d nodes, %d edges", desc, radius,
                 graph.number_of_nodes(), graph.number_of_edges())
    return graph


def to_dot(graph: nx.DiGraph, name: str = "links") -> str:
    """Deterministic DOT rendering: sorted nodes, then sorted edges."""
    lines = [f'strict digraph "{name}" {{']
    for node in sorted(graph.nodes):
        lines.append(f'  "{node}" [label="{node} {graph.nodes[node]["verdict"].glyphs}"];')
    for src, dst, data in sorted(graph.edges(data=True), key=lambda e: (e[0], e[1], e[2]["kind"])):
        lines.append(f'  "{src}" -> "{dst}" [label="{data["kind"]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def enumerate_bundles(a_max: int, b_max: int, c_abs_max: int) -> List[Tuple[BundleDesc, Verdict]]:
    """
    Every descriptor of DecFa, DecP2, Umemura, Schwarz and V1 within the bounds, with its verdict.

    DecFa: a <= a_max, b <= b_max, |c| <= c_abs_max (c <= 0 when b = 0).
    DecP2, Schwarz, V1: b <= b_max. Umemura: a, b >= 1 within bounds and c = ak + 2 <= c_abs_max.
    """
    if min(a_max, b_max, c_abs_max) < 0:
        raise ValueError(f"Bounds must be >= 0, got ({a_max}, {b_max}, {c_abs_max})")
    descs: List[BundleDesc] = []
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            for c in range(-c_abs_max, c_abs_max + 1):
                if b > 0 or c <= 0:
                    descs.append(BundleDesc.dec_fa(a, b, c))
    descs += [BundleDesc.dec_p2(b) for b in range(b_max + 1)]
    for a in range(1, a_max + 1):
        for b in range(1, b_max + 1):
            for k in range(b + 1):
                if a * k + 2 <= c_abs_max:
                    descs.append(BundleDesc.umemura(a, b, a * k + 2))
    descs += [BundleDesc.schwarz(b) for b in range(1, b_max + 1)]
    descs += [BundleDesc.v1(b) for b in range(2, b_max + 1)]
    descs.sort(key=lambda d: d.sort_key())
    return [(d, verdict(d)) for d in descs]


def render_table(rows: List[Tuple[BundleDesc, Verdict]]) -> str:
    """Human-readable verdict table, one descriptor per line."""
    width = max([len(str(d)) for d, _ in rows] + [len("bundle")])
    lines = [f"{'bundle':<{width}}  M  S  SS  reason"]
    for desc, v in rows:
        flags = "  ".join("y" if f else "." for f in (v.maximal, v.stiff))
        lines.append(f"{str(desc):<{width}}  {flags}  {'y' if v.superstiff else '.'}   {v.reason.value}")
    return "\n".join(lines)


def verdict_counts(rows: List[Tuple[BundleDesc, Verdict]]) -> Dict[str, int]:
    """Number of maximal, stiff and superstiff rows."""
    return {
        "total": len(rows),
        "maximal": sum(v.maximal for _, v in rows),
        "stiff": sum(v.stiff for _, v in rows),
        "superstiff": sum(v.superstiff for _, v in rows),
    }
