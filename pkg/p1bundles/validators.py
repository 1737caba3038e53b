import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import jsonschema

from p1bundles.bundles import CanonicalP
from p1bundles.classify import Verdict
from p1bundles.links import LinkStep

SCHEMAS_DIR = Path(__file__).parent.parent / "schemas"


def load_schema(name: str, schemas_dir: Path = SCHEMAS_DIR) -> Dict:
    """
    Load `{name}_schema.json` from the schemas directory.

    Raises:
        FileNotFoundError: If the schema does not exist
    """
    path = Path(schemas_dir) / f"{name}_schema.json"
    with open(path, "r") as f:
        return json.load(f)


def validate_schema(document: Any, schema: Dict) -> None:
    """
    Validate a document against a JSON schema.

    Args:
        document: Document to validate
        schema: JSON schema

    Raises:
        jsonschema.ValidationError: If validation fails
    """
    jsonschema.validate(instance=document, schema=schema)


def validate_descriptor_json(document: Dict, schemas_dir: Path = SCHEMAS_DIR) -> bool:
    """
    Validate a bundle descriptor document against bundle_desc_schema.json.

    Returns:
        True if valid

    Raises:
        jsonschema.ValidationError: If validation fails
    """
    validate_schema(document, load_schema("bundle_desc", schemas_dir))
    return True


def validate_bounds(**bounds: int) -> bool:
    """
    Validate that every named bound is a nonnegative integer.

    Raises:
        ValueError: Naming the first offending bound
    """
    for name, value in bounds.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ValueError(f"Bound {name} must be a nonnegative integer, got {value!r}")
    return True


def validate_scaling_normal_form(p: CanonicalP) -> bool:
    """
    Validate that the lex-first nonzero coefficient of p is 1.

    Raises:
        ValueError: If it is not
    """
    lead = next((c for c in p.free_coefficients() if c != 0), None)
    if lead is not None and lead != 1:
        raise ValueError(f"Leading coefficient of {p} is {lead}, expected 1")
    return True


def validate_verdict(v: Verdict) -> bool:
    """
    Validate superstiff => stiff => maximal.

    Raises:
        ValueError: If an implication fails
    """
    if v.superstiff and not v.stiff:
        raise ValueError(f"Superstiff but not stiff: {v}")
    if v.stiff and not v.maximal:
        raise ValueError(f"Stiff but not maximal: {v}")
    return True


def validate_chain(chain: Sequence[LinkStep]) -> bool:
    """
    Validate that a link chain is contiguous, forward-equivariant and flag-coherent.

    Raises:
        ValueError: At the first offending step
    """
    for i, step in enumerate(chain):
        if not step.fwd_equivariant:
            raise ValueError(f"Step {i} ({step}) is not forward-equivariant")
        if not step.is_coherent():
            raise ValueError(f"Step {i} ({step}) has flags inconsistent with its center {step.center}")
        if i > 0 and chain[i - 1].target != step.source:
            raise ValueError(f"Step {i} starts at {step.source}, previous step ended at {chain[i - 1].target}")
    return True


def validate_window_rows(p: CanonicalP) -> List[int]:
    """Degrees of the nonzero rows, each checked against its bound c - 2 - a i."""
    degrees = []
    for i, row in enumerate(p.rows):
        if row is None or row.is_zero():
            continue
        degree = max((k for k, c in enumerate(row.coeffs) if c != 0), default=-1)
        if degree > p.inv.row_bound(i):
            raise ValueError(f"Row {i} of {p} has degree {degree} > {p.inv.row_bound(i)}")
        degrees.append(degree)
    return degrees
