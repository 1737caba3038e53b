"""
Tests for JSON codecs, schema validation, validators and configuration.
"""

import json

import jsonschema
import pytest
import sympy

from p1bundles.bundles import BundleDesc, canonical_p_of
from p1bundles.classify import enumerate_bundles, maximal_model, verdict
from p1bundles.config import DEFAULT_MAX_DEGREE, DEFAULT_SEED, get_config
from p1bundles.errors import InvalidDescriptor, RangeViolation
from p1bundles.exactalg import LaurentPoly, TruncPoly
from p1bundles.helpers import (
    canonical_from_json,
    canonical_to_json,
    desc_from_json,
    desc_to_json,
    laurent_from_json,
    laurent_to_json,
    link_to_json,
    load_json,
    rational_from_json,
    rational_str,
    rational_to_json,
    save_json,
    transition_from_json,
    transition_to_json,
    trunc_from_json,
    trunc_to_json,
    verdict_to_json,
)
from p1bundles.links import link_dec
from p1bundles.transitions import TransitionMat
from p1bundles.validators import (
    validate_bounds,
    validate_chain,
    validate_descriptor_json,
    validate_window_rows,
)


class TestRationalCodecs:
    """Exact rationals on the wire."""

    @pytest.mark.parametrize("value, expected", [
        (3, [3, 1]),
        ("3/6", [1, 2]),
        ("-2/4", [-1, 2]),
        (sympy.Rational(7, 3), [7, 3]),
    ])
    def test_rational_to_json(self, value, expected):
        assert rational_to_json(value) == expected

    def test_rational_from_json(self):
        assert rational_from_json([2, 4]) == sympy.Rational(1, 2)
        assert rational_from_json(5) == 5
        assert rational_from_json("-1/3") == sympy.Rational(-1, 3)

    @pytest.mark.parametrize("bad", [[1, 0], [1, 2, 3]])
    def test_rational_from_json_rejects(self, bad):
        with pytest.raises(ValueError):
            rational_from_json(bad)

    def test_rational_str(self):
        assert rational_str(4) == "4"
        assert rational_str("6/4") == "3/2"

    def test_laurent_and_trunc(self):
        f = LaurentPoly({-2: "1/2", 3: -1})
        assert laurent_from_json(laurent_to_json(f)) == f
        g = TruncPoly.of(2, [1, "1/3"])
        assert trunc_to_json(g) == {"bound": 2, "coeffs": [[1, 1], [1, 3], [0, 1]]}
        assert trunc_from_json(trunc_to_json(g)) == g
        with pytest.raises(ValueError):
            trunc_from_json({"bound": 2, "coeffs": [[1, 1]]})


class TestDescriptorCodecs:
    """Descriptors, verdicts and links as JSON documents."""

    def test_round_trip_over_box(self, load_schema):
        schema = load_schema("bundle_desc")
        for desc, _ in enumerate_bundles(3, 4, 8):
            doc = desc_to_json(desc)
            jsonschema.validate(instance=doc, schema=schema)
            assert desc_from_json(doc) == desc

    def test_raw_round_trip(self, load_schema):
        raw = BundleDesc.from_raw(canonical_p_of(BundleDesc.umemura(2, 2, 4)))
        doc = desc_to_json(raw)
        assert doc["family"] == "Raw"
        assert doc["rows"][2] is None
        validate_descriptor_json(doc)
        assert desc_from_json(doc) == raw

    def test_canonical_schema(self, load_schema):
        doc = canonical_to_json(canonical_p_of(BundleDesc.hat_schwarz(2)))
        jsonschema.validate(instance=doc, schema=load_schema("canonical_p"))
        assert canonical_from_json(doc) == canonical_p_of(BundleDesc.hat_schwarz(2))

    def test_signed_descriptor(self):
        signed = BundleDesc.dec_fa_signed(2, 0, 3)
        doc = desc_to_json(signed)
        assert doc["signed"] is True
        assert desc_from_json(doc) == signed

    def test_alias_is_kept(self):
        doc = desc_to_json(BundleDesc.schwarz(1, alias="P(T_P2)"))
        assert doc["alias"] == "P(T_P2)"
        assert desc_from_json(doc).alias == "P(T_P2)"

    @pytest.mark.parametrize("doc", [
        {"family": "Nope", "b": 1},
        {"b": 1},
        {"family": "DecFa", "b": 1},
        {"family": "DecFa", "a": 1, "b": -1, "c": 0},
        {"family": "Umemura", "a": 2, "b": 1, "c": 5},
    ])
    def test_invalid_descriptors(self, doc):
        with pytest.raises(InvalidDescriptor):
            desc_from_json(doc)

    def test_schema_rejects_missing_fields(self):
        with pytest.raises(jsonschema.ValidationError):
            validate_descriptor_json({"family": "Umemura", "b": 2})
        with pytest.raises(jsonschema.ValidationError):
            validate_descriptor_json({"family": "Raw", "a": 1, "b": 1, "c": 3})

    def test_verdict_json(self):
        assert verdict_to_json(verdict(BundleDesc.schwarz(1))) == {
            "maximal": True, "stiff": True, "superstiff": True, "reason": "SCHWARZ_TP2",
        }

    def test_link_json(self, load_schema):
        schema = load_schema("link_step")
        chain = maximal_model(BundleDesc.dec_fa(2, 1, 5)).chain
        docs = [link_to_json(step) for step in chain]
        for doc in docs:
            jsonschema.validate(instance=doc, schema=schema)
        assert [d["kind"] for d in docs] == ["DecShiftInverse", "XSwap", "DecShift"]
        assert docs[1]["center"] is None
        assert docs[0]["target"] == {"family": "DecFa", "a": 2, "b": 0, "c": 3, "signed": True}


class TestTransitionCodecs:
    """Transition matrices as JSON documents."""

    @pytest.mark.parametrize("rows", [
        [["y", "x"], [0, "1/y"]],
        [["y**2", "x**2 - 1/3"], [0, "1/y**2"]],
        [["1", "0"], ["0", "1"]],
    ])
    def test_transition_round_trip(self, rows, load_schema):
        a = TransitionMat.of(rows)
        doc = transition_to_json(a)
        jsonschema.validate(instance=doc, schema=load_schema("transition"))
        assert transition_from_json(doc).equals(a)

    def test_transition_terms(self):
        doc = transition_to_json(TransitionMat.of([["y", "x"], [0, "1/y"]]))
        assert doc["entries"][0][0] == [{"xnum": [[1, 1]], "xden": [[1, 1]], "yexp": 1}]
        assert doc["entries"][0][1] == [{"xnum": [[0, 1], [1, 1]], "xden": [[1, 1]], "yexp": 0}]
        assert doc["entries"][1][0] == []


class TestFiles:
    """save_json / load_json."""

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "out" / "desc.json"
        doc = desc_to_json(BundleDesc.umemura(2, 2, 4))
        save_json(doc, path, schema_name="bundle_desc")
        assert json.loads(path.read_text()) == doc
        assert load_json(path, schema_name="bundle_desc") == doc

    def test_invalid_document_not_written(self, tmp_path):
        path = tmp_path / "bad.json"
        with pytest.raises(jsonschema.ValidationError):
            save_json({"family": "DecFa"}, path, schema_name="bundle_desc")
        assert not path.exists()

    def test_load_validates(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"family": "Schwarz"}))
        with pytest.raises(jsonschema.ValidationError):
            load_json(path, schema_name="bundle_desc")
        assert load_json(path) == {"family": "Schwarz"}


class TestValidators:
    """Standalone validators."""

    def test_validate_bounds(self):
        assert validate_bounds(a_max=0, b_max=3)
        with pytest.raises(ValueError):
            validate_bounds(a_max=-1)
        with pytest.raises(ValueError):
            validate_bounds(b_max=True)

    def test_validate_chain_rejects_gaps(self):
        with pytest.raises(ValueError):
            validate_chain([link_dec(2, 0, -4), link_dec(2, 0, -4)])

    def test_validate_chain_rejects_backward_only(self):
        step = link_dec(2, 0, 0)
        assert not step.fwd_equivariant
        with pytest.raises(ValueError):
            validate_chain([step])

    def test_validate_window_rows(self):
        assert validate_window_rows(canonical_p_of(BundleDesc.umemura(2, 2, 4))) == [0]
        assert validate_window_rows(canonical_p_of(BundleDesc.dec_fa(1, 2, 3))) == []


class TestConfig:
    """Environment configuration."""

    def test_defaults(self):
        config = get_config(env={})
        assert config.max_degree == DEFAULT_MAX_DEGREE
        assert config.seed == DEFAULT_SEED

    def test_overrides(self):
        config = get_config(env={"P1BL_MAX_DEGREE": "3", "P1BL_SEED": "7"})
        assert (config.max_degree, config.seed) == (3, 7)

    def test_blank_values_use_defaults(self):
        assert get_config(env={"P1BL_MAX_DEGREE": " "}).max_degree == DEFAULT_MAX_DEGREE

    @pytest.mark.parametrize("env", [
        {"P1BL_MAX_DEGREE": "0"},
        {"P1BL_MAX_DEGREE": "six"},
        {"P1BL_SEED": "-1"},
    ])
    def test_invalid_values(self, env):
        with pytest.raises(RangeViolation):
            get_config(env=env)

    def test_environment_is_read(self, monkeypatch):
        monkeypatch.setenv("P1BL_MAX_DEGREE", "2")
        assert get_config().max_degree == 2
