import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import sympy

from p1bundles.bundles import BundleDesc, CanonicalP, Family, NumericalInvariants
from p1bundles.classify import Verdict
from p1bundles.config import Config, get_config
from p1bundles.errors import InvalidDescriptor
from p1bundles.exactalg import LaurentPoly, TruncPoly, to_rational
from p1bundles.links import LinkStep
from p1bundles.transitions import X, Y, TransitionMat, y_terms
from p1bundles.validators import SCHEMAS_DIR, load_schema, validate_schema

__all__ = [
    "Config",
    "get_config",
    "rational_to_json",
    "rational_from_json",
    "laurent_to_json",
    "laurent_from_json",
    "trunc_to_json",
    "trunc_from_json",
    "canonical_to_json",
    "canonical_from_json",
    "desc_to_json",
    "desc_from_json",
    "verdict_to_json",
    "link_to_json",
    "transition_to_json",
    "transition_from_json",
    "save_json",
    "load_json",
]


def rational_to_json(value: Any) -> List[int]:
    """Exact rational as a [numerator, denominator] pair."""
    q = to_rational(value)
    return [int(q.p), int(q.q)]


def rational_from_json(value: Any) -> sympy.Rational:
    if isinstance(value, list):
        if len(value) != 2 or value[1] == 0:
            raise ValueError(f"Rational must be [num, den] with den != 0, got {value}")
    return to_rational(value)


def rational_str(value: Any) -> str:
    """Human form a/b (or a)."""
    q = to_rational(value)
    return str(q.p) if q.q == 1 else f"{q.p}/{q.q}"


def laurent_to_json(f: LaurentPoly) -> Dict[str, List[int]]:
    return {str(e): rational_to_json(c) for e, c in f.items()}


def laurent_from_json(doc: Dict[str, Any]) -> LaurentPoly:
    return LaurentPoly({int(e): rational_from_json(c) for e, c in doc.items()})


def trunc_to_json(f: TruncPoly) -> Dict[str, Any]:
    return {"bound": f.bound, "coeffs": [rational_to_json(c) for c in f.coeffs]}


def trunc_from_json(doc: Dict[str, Any]) -> TruncPoly:
    coeffs = [rational_from_json(c) for c in doc["coeffs"]]
    if len(coeffs) != doc["bound"] + 1:
        raise ValueError(f"Expected {doc['bound'] + 1} coefficients, got {len(coeffs)}")
    return TruncPoly(doc["bound"], tuple(coeffs))


def canonical_to_json(p: CanonicalP) -> Dict[str, Any]:
    return {
        "a": p.inv.a,
        "b": p.inv.b,
        "c": p.inv.c,
        "rows": [trunc_to_json(row) if row is not None else None for row in p.rows],
    }


def canonical_from_json(doc: Dict[str, Any]) -> CanonicalP:
    """
    Parse a canonical polynomial; rows are stored exactly as given (no re-scaling).

    Raises:
        ValueError: If a row does not fit its degree bound
    """
    inv = NumericalInvariants(doc["a"], doc["b"], doc["c"])
    rows = tuple(trunc_from_json(row) if row is not None else None for row in doc["rows"])
    return CanonicalP(inv, rows)


def desc_to_json(desc: BundleDesc) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"family": desc.family.value, "b": desc.b}
    if desc.a is not None:
        doc["a"] = desc.a
    if desc.c is not None:
        doc["c"] = desc.c
    if desc.raw is not None:
        doc["rows"] = canonical_to_json(desc.raw)["rows"]
    if desc.alias:
        doc["alias"] = desc.alias
    if desc.needs_xswap:
        doc["signed"] = True
    return doc


def desc_from_json(doc: Dict[str, Any]) -> BundleDesc:
    """
    Parse a descriptor through the family constructors.

    Raises:
        InvalidDescriptor: For unknown families or missing fields
    """
    try:
        family = Family(doc["family"])
    except (KeyError, ValueError):
        raise InvalidDescriptor(f"Unknown or missing family in {doc}")
    try:
        if family == Family.DEC_FA:
            build = BundleDesc.dec_fa_signed if doc.get("signed") else BundleDesc.dec_fa
            return build(doc["a"], doc["b"], doc["c"])
        if family == Family.UMEMURA:
            return BundleDesc.umemura(doc["a"], doc["b"], doc["c"])
        if family == Family.DEC_P2:
            return BundleDesc.dec_p2(doc["b"])
        if family == Family.SCHWARZ:
            return BundleDesc.schwarz(doc["b"], alias=doc.get("alias"))
        if family == Family.HAT_SCHWARZ:
            return BundleDesc.hat_schwarz(doc["b"])
        if family == Family.V1:
            return BundleDesc.v1(doc["b"])
        return BundleDesc.from_raw(canonical_from_json(doc))
    except KeyError as e:
        raise InvalidDescriptor(f"Descriptor {doc} is missing field {e}")


def verdict_to_json(v: Verdict) -> Dict[str, Any]:
    return {"maximal": v.maximal, "stiff": v.stiff, "superstiff": v.superstiff, "reason": v.reason.name}


def link_to_json(step: LinkStep) -> Dict[str, Any]:
    return {
        "source": desc_to_json(step.source),
        "target": desc_to_json(step.target),
        "kind": step.kind.value,
        "center": step.center.value if step.center is not None else None,
        "fwd_equivariant": step.fwd_equivariant,
        "bwd_equivariant": step.bwd_equivariant,
        "strict": step.strict,
        "note": step.note,
    }


def _x_poly_to_json(expr: sympy.Expr) -> List[List[int]]:
    coeffs = sympy.Poly(expr, X).all_coeffs()
    return [rational_to_json(c) for c in reversed(coeffs)]


def _x_poly_from_json(coeffs: List[Any]) -> sympy.Expr:
    return sum((rational_from_json(c) * X**i for i, c in enumerate(coeffs)), sympy.Integer(0))


def transition_to_json(a: TransitionMat) -> Dict[str, Any]:
    """Entries as lists of terms {"xnum", "xden", "yexp"}; x-coefficients listed from degree 0 up."""
    entries = []
    for i in (0, 1):
        row = []
        for j in (0, 1):
            terms = []
            for e, coeff in sorted(y_terms(a.entries[i, j]).items()):
                num, den = sympy.fraction(sympy.cancel(coeff))
                terms.append({"xnum": _x_poly_to_json(num), "xden": _x_poly_to_json(den), "yexp": e})
            row.append(terms)
        entries.append(row)
    return {"entries": entries}


def transition_from_json(doc: Dict[str, Any]) -> TransitionMat:
    rows = []
    for row in doc["entries"]:
        rows.append([
            sum(
                (_x_poly_from_json(t["xnum"]) / _x_poly_from_json(t["xden"]) * Y ** t["yexp"] for t in terms),
                sympy.Integer(0),
            )
            for terms in row
        ])
    return TransitionMat.of(rows)


def save_json(document: Any, path: Path, schema_name: Optional[str] = None,
              schemas_dir: Path = SCHEMAS_DIR) -> None:
    """
    Write a JSON document, validating it first when a schema name is given.

    Args:
        document: JSON-compatible value
        path: Output file
        schema_name: Name of a schema in schemas_dir (without the _schema.json suffix)
        schemas_dir: Schemas directory path
    """
    if schema_name is not None:
        validate_schema(document, load_schema(schema_name, schemas_dir))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(document, f, indent=2)


def load_json(path: Path, schema_name: Optional[str] = None, schemas_dir: Path = SCHEMAS_DIR) -> Any:
    """
    Read a JSON document, validating it when a schema name is given.

    Returns:
        Loaded document
    """
    with open(Path(path), "r") as f:
        document = json.load(f)
    if schema_name is not None:
        validate_schema(document, load_schema(schema_name, schemas_dir))
    return document
