"""
Command-line front end.

    python -m p1bundles.cli classify --family DecFa --a 2 --b 1 --c 1 --json
    python -m p1bundles.cli moduli-dim --a 0 --b 2 --c 4
    python -m p1bundles.cli schwarz --b 1

Exit codes: 0 success, 2 invalid input, 1 internal error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import jsonschema
import networkx as nx
import sympy

from p1bundles.bundles import BundleDesc, CanonicalP, normalize
from p1bundles.classify import enumerate_bundles, link_graph, maximal_model, render_table, to_dot, verdict
from p1bundles.errors import P1BundleError
from p1bundles.exactalg import Y0, Y1, Z, BiHomogLaurent, Gl2, to_rational
from p1bundles.helpers import (
    canonical_to_json,
    desc_from_json,
    desc_to_json,
    link_to_json,
    load_json,
    rational_str,
    rational_to_json,
    save_json,
    transition_to_json,
    verdict_to_json,
)
from p1bundles.moduli import (
    FaGenerator,
    GeneratorKind,
    ModuliPoint,
    act_on_moduli,
    dim_moduli,
    is_fixed_diag,
    window_parameters,
)
from p1bundles.schwarzenberger import schwarz_matrix
from p1bundles.selftest import run_selftest
from p1bundles.transitions import TransitionMat, detect_jumps, remove_jumps
from p1bundles.validators import (
    load_schema,
    validate_bounds,
    validate_chain,
    validate_descriptor_json,
    validate_scaling_normal_form,
    validate_schema,
    validate_verdict,
    validate_window_rows,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(name)s:%(levelname)s:%(message)s"


def _add_descriptor_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", help="DecFa, DecP2, Umemura, Schwarz, HatSchwarz, V1 or Raw")
    parser.add_argument("--a", type=int)
    parser.add_argument("--b", type=int)
    parser.add_argument("--c", type=int)
    parser.add_argument("--rows", help="Raw only: JSON list of P_i coefficient lists")
    parser.add_argument("--desc", help="Descriptor as a JSON document, or @FILE (overrides the other flags)")


def _rows_arg(text: str) -> List[List[Any]]:
    rows = json.loads(text)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise P1BundleError(f"--rows must be a JSON list of lists, got {text!r}")
    return rows


def descriptor_from_args(args: argparse.Namespace) -> BundleDesc:
    """
    Build a descriptor from --desc or the --family/--a/--b/--c flags, validating the JSON form.

    Raises:
        jsonschema.ValidationError: If the descriptor document is malformed
        InvalidDescriptor: If the family constraints fail
    """
    if args.desc and args.desc.startswith("@"):
        document = load_json(Path(args.desc[1:]), schema_name="bundle_desc")
    elif args.desc:
        document = json.loads(args.desc)
    else:
        if not args.family:
            raise P1BundleError("A descriptor needs --family (or --desc)")
        document: Dict[str, Any] = {"family": args.family}
        for key in ("a", "b", "c"):
            if getattr(args, key) is not None:
                document[key] = getattr(args, key)
        if args.family == "Raw":
            if args.rows is None:
                raise P1BundleError("Raw descriptors need --rows")
            p = CanonicalP.from_coefficients(args.a, args.b, args.c, _rows_arg(args.rows))
            document["rows"] = canonical_to_json(p)["rows"]
    validate_descriptor_json(document)
    return desc_from_json(document)


def _checked(document: Any, schema_name: str) -> Any:
    validate_schema(document, load_schema(schema_name))
    return document


def _checked_canonical(p: CanonicalP) -> Dict[str, Any]:
    validate_scaling_normal_form(p)
    validate_window_rows(p)
    return _checked(canonical_to_json(p), "canonical_p")


def _emit(args: argparse.Namespace, document: Any, human: str) -> None:
    if args.out and args.json:
        save_json(document, Path(args.out))
        print(f"✓ wrote {args.out}", file=sys.stderr)
        return
    text = json.dumps(document, indent=2) if args.json else human
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + ("" if text.endswith("\n") else "\n"))
        print(f"✓ wrote {path}", file=sys.stderr)
    else:
        print(text)


def cmd_classify(args: argparse.Namespace) -> int:
    desc = descriptor_from_args(args)
    v = verdict(desc)
    validate_verdict(v)
    document = {"descriptor": _checked(desc_to_json(desc), "bundle_desc"), **verdict_to_json(v)}
    _emit(args, document, f"{desc}: {v.glyphs} ({v.reason.value})")
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    desc = descriptor_from_args(args)
    result = maximal_model(desc)
    validate_chain(result.chain)
    document = {
        "source": _checked(desc_to_json(desc), "bundle_desc"),
        "target": _checked(desc_to_json(result.target), "bundle_desc"),
        "chain": [_checked(link_to_json(step), "link_step") for step in result.chain],
    }
    lines = [f"{desc} -> {result.target} ({len(result.chain)} steps)"]
    lines += [f"  {step}" for step in result.chain]
    _emit(args, document, "\n".join(lines))
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    validate_bounds(a_max=args.a_max, b_max=args.b_max, c_max=args.c_max)
    rows = enumerate_bundles(args.a_max, args.b_max, args.c_max)
    document = [{"descriptor": desc_to_json(d), "verdict": verdict_to_json(v)} for d, v in rows]
    _emit(args, document, render_table(rows))
    return 0


def cmd_moduli_dim(args: argparse.Namespace) -> int:
    dim = dim_moduli(args.a, args.b, args.c)
    document = {"a": args.a, "b": args.b, "c": args.c, "dim": dim,
                "window_parameters": window_parameters(args.a, args.b, args.c)}
    _emit(args, document, str(dim))
    return 0


def _generator_from_args(args: argparse.Namespace) -> FaGenerator:
    kind = GeneratorKind(args.kind)
    if kind == GeneratorKind.SHEAR:
        if args.shear is None:
            raise P1BundleError("Shear generators need --shear r0,r1,...")
        return FaGenerator.shear([to_rational(x) for x in args.shear.split(",")])
    if args.matrix is None:
        raise P1BundleError(f"{kind.value} generators need --matrix alpha,beta,gamma,delta")
    entries = [to_rational(x) for x in args.matrix.split(",")]
    if len(entries) != 4:
        raise P1BundleError(f"--matrix needs four entries, got {args.matrix!r}")
    return FaGenerator(kind, g=Gl2.of(*entries))


def cmd_act(args: argparse.Namespace) -> int:
    point = ModuliPoint.of(CanonicalP.from_coefficients(args.a, args.b, args.c, _rows_arg(args.rows)))
    if args.fixed:
        fixed = is_fixed_diag(args.a, point, trials=args.trials)
        document = {"point": _checked_canonical(point.p), "fixed": fixed}
        _emit(args, document, f"{point}: {'fixed' if fixed else 'moved'}")
        return 0
    gen = _generator_from_args(args)
    image = act_on_moduli(args.a, gen, point)
    _emit(args, _checked_canonical(image.p), f"{gen}: {point} -> {image}")
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    raw = BiHomogLaurent.from_expr(sympy.sympify(args.poly, locals={"y0": Y0, "y1": Y1, "z": Z}), args.b)
    p = normalize(args.a, args.b, args.c, raw)
    _emit(args, _checked_canonical(p), str(p))
    return 0


def cmd_schwarz(args: argparse.Namespace) -> int:
    mat = schwarz_matrix(args.b)
    uv = [[str(e) for e in row] for row in mat.entries.tolist()]
    st = [[str(e) for e in row] for row in mat.in_st().tolist()]
    _emit(args, {"b": args.b, "uv": uv, "st": st}, f"(u, v): {uv}\n(s, t): {st}")
    return 0


def cmd_jumps(args: argparse.Namespace) -> int:
    a = TransitionMat.of(json.loads(args.matrix))
    report = detect_jumps(a)
    document: Dict[str, Any] = {
        "generic_b": report.generic_b,
        "jumps": [{"lambda": rational_to_json(lam), "epsilon": eps} for lam, eps in report.jumps],
        "unresolved": list(report.unresolved),
    }
    lines = [f"generic fibre F_{report.generic_b}"]
    lines += [f"  jump at x = {rational_str(lam)}: F_{report.generic_b + 2 * eps}" for lam, eps in report.jumps]
    lines += [f"  unresolved factor {f}" for f in report.unresolved]
    if args.remove:
        final, steps = remove_jumps(a)
        document["steps"] = [
            {"lambda": rational_to_json(s.lam), "before_b": s.before_b,
             "det_degree_before": s.det_degree_before, "det_degree_after": s.det_degree_after}
            for s in steps
        ]
        document["final"] = _checked(transition_to_json(final), "transition")
        lines.append(f"jump-free after {len(steps)} modification(s): {final}")
    _emit(args, document, "\n".join(lines))
    return 0


def cmd_graph(args: argparse.Namespace) -> int:
    desc = descriptor_from_args(args)
    graph = link_graph(desc, args.radius, bi_only=args.bi_only)
    document = {
        "nodes": [{"id": n, "verdict": verdict_to_json(graph.nodes[n]["verdict"])} for n in sorted(graph.nodes)],
        "edges": [{"source": u, "target": v, "kind": d["kind"], "bwd": d["bwd"]}
                  for u, v, d in sorted(graph.edges(data=True), key=lambda e: (e[0], e[1]))],
        "weakly_connected": nx.is_weakly_connected(graph),
    }
    _emit(args, document, to_dot(graph))
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    report = run_selftest(verbose=not args.json)
    if args.json:
        print(json.dumps({name: {"passed": not failures, "failures": failures} for name, failures in report.items()},
                         indent=2))
    return 0 if all(not failures for failures in report.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable JSON output")
    common.add_argument("--out", help="Write output to this file instead of stdout")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging")

    parser = argparse.ArgumentParser(prog="p1bundles", description="P1-bundles over Hirzebruch surfaces and P^2")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Maximality, stiffness and superstiffness")
    _add_descriptor_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", parents=[common], help="Equivariant link chain to a maximal model")
    _add_descriptor_args(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("enumerate", parents=[common], help="Verdict table of all descriptors within bounds")
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--b-max", type=int, required=True)
    p.add_argument("--c-max", type=int, required=True, help="Bound on |c|")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("moduli-dim", parents=[common], help="Dimension of M_a^{b,c}")
    for key in ("a", "b", "c"):
        p.add_argument(f"--{key}", type=int, required=True)
    p.set_defaults(func=cmd_moduli_dim)

    p = sub.add_parser("act", parents=[common], help="Act on a point of M_a^{b,c} or test it for fixedness")
    for key in ("a", "b", "c"):
        p.add_argument(f"--{key}", type=int, required=True)
    p.add_argument("--rows", required=True, help="JSON list of P_i coefficient lists")
    p.add_argument("--kind", choices=[k.value for k in GeneratorKind], default=GeneratorKind.ZGL2.value)
    p.add_argument("--matrix", help="alpha,beta,gamma,delta")
    p.add_argument("--shear", help="Coefficients r0,r1,... of R(z)")
    p.add_argument("--fixed", action="store_true", help="Run the sampled fixed-point test instead")
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("normalize", parents=[common], help="Canonical form of a gluing polynomial")
    for key in ("a", "b", "c"):
        p.add_argument(f"--{key}", type=int, required=True)
    p.add_argument("--poly", required=True, help="Expression in y0, y1, z, homogeneous of degree b in y")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("schwarz", parents=[common], help="Schwarzenberger transition matrix")
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_schwarz)

    p = sub.add_parser("jumps", parents=[common], help="Jumping fibres of a transition over A^1 x P^1")
    p.add_argument("--matrix", required=True, help='JSON 2x2 list of expressions in x, y, e.g. [["y","x"],[0,"1/y"]]')
    p.add_argument("--remove", action="store_true", help="Also remove the jumps")
    p.set_defaults(func=cmd_jumps)

    p = sub.add_parser("graph", parents=[common], help="Link graph in DOT")
    _add_descriptor_args(p)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--bi-only", action="store_true", help="Follow bi-equivariant links only")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("selftest", parents=[common], help="Run the identity battery")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format=LOG_FORMAT)
    try:
        return args.func(args)
    except (ValueError, jsonschema.ValidationError) as e:
        message = e.message if isinstance(e, jsonschema.ValidationError) else str(e)
        print(f"✗ invalid input: {message}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception("internal error")
        print(f"✗ internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
