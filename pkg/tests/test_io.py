import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_table
from strata import fixtures as fx
from strata.errors import DanglingReference, ParseError
from strata.fincat import validate_category
from strata.gluing import restrict_R
from strata.io import (
    Workspace, canonical_dumps, document, fincat_payload, gluing_datum_payload,
    poset_stack_payload, presentation_payload, two_rep_payload,
)


def reparse(kind, payload):
    ws = Workspace([document(kind, "x", payload)])
    return ws.get("x", kind)


def test_canonical_form_is_sorted_and_newline_terminated():
    text = canonical_dumps({"b": 1, "a": [2, {"d": 3, "c": 4}]})
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"') and text.index('"c"') < text.index('"d"')
    assert canonical_dumps(json.loads(text)) == text


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_category_payload_is_a_fixed_point(seed):
    c = random_table(seed)
    again = reparse("fincat", fincat_payload(c))
    assert fincat_payload(again) == fincat_payload(c)
    assert validate_category(again).violations == validate_category(c).violations


def test_stacks_and_gluing_data_survive_serialization(suite):
    for name, G in suite[:8]:
        payload = poset_stack_payload(G)
        assert poset_stack_payload(reparse("poset_stack", payload)) == payload, name
        d = restrict_R(G)
        payload = gluing_datum_payload(d)
        assert gluing_datum_payload(reparse("gluing_datum", payload)) == payload, name


def test_presentations_and_representations_survive_serialization():
    iso = fx.iso2()
    alpha = fx.torus_rep(iso, fx.swap(iso), fx.swap(iso))
    P = alpha.presentation
    assert presentation_payload(reparse("presentation", presentation_payload(P))) == \
        presentation_payload(P)
    assert two_rep_payload(reparse("two_rep", two_rep_payload(alpha))) == two_rep_payload(alpha)


def test_named_and_inline_references_agree():
    iso = fincat_payload(fx.iso2())
    swap = {"on_obj": {"p": "q", "q": "p"},
            "on_mor": {"p>p": "q>q", "p>q": "q>p", "q>p": "p>q", "q>q": "p>p"}}
    named = Workspace([
        document("fincat", "iso", iso),
        document("functor", "swap", {"src": "iso", "dst": "iso", **swap}),
    ]).get("swap")
    inline = reparse("functor", {"src": iso, "dst": iso, **swap})
    assert named == inline


def test_every_committed_document_parses():
    data = os.path.join(os.path.dirname(__file__), "data")
    for name in ("workspace.json", "two_level.json", "constructible.json"):
        ws = Workspace.load(os.path.join(data, name))
        for name in ws.names():
            assert ws.get(name) is ws.get(name)


@pytest.mark.parametrize("docs, error", [
    ([{"kind": "fincat"}], ParseError),
    ([{"kind": "nothing", "name": "a"}], ParseError),
    ([document("fincat", "a", fincat_payload(fx.iso2()))] * 2, ParseError),
])
def test_bad_workspaces_are_rejected(docs, error):
    with pytest.raises(error):
        Workspace(docs)


def test_cyclic_and_dangling_references():
    ws = Workspace([document("functor", "f", {"src": "f", "dst": "f", "on_obj": {}, "on_mor": {}})])
    with pytest.raises(ParseError):
        ws.get("f")
    ws = Workspace([document("functor", "g", {"src": "nowhere", "dst": "nowhere",
                                              "on_obj": {}, "on_mor": {}})])
    with pytest.raises(DanglingReference):
        ws.get("g")


def test_malformed_payload_is_a_parse_error():
    with pytest.raises(ParseError):
        reparse("fincat", {"objects": ["a"]})
    with pytest.raises(ParseError):
        Workspace.loads("[1, 2]")
