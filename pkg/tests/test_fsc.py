"""Parsing, canonical emission and conversions for the .fsc format."""

from __future__ import annotations

import pathlib

import pytest

from frcodes.fsc import (
    FscDocument,
    FscParseError,
    document_to_states,
    emit_fsc,
    parse_fsc,
    states_to_document,
)
from frcodes.gf import GF
from frcodes.storage import exact_to_states
from frcodes.subspace import span

DATA = pathlib.Path(__file__).parent / "data"

MINIMAL = """\
FSC 1
field 2 1
ambient 4
params 4 2 3 2 1
subspace A
  row 1 0 0 0
  row 0 1 0 0
end
"""


def read_fixture(name):
    return (DATA / name).read_text()


class TestParse:
    def test_example_fixture(self):
        doc = parse_fsc(read_fixture("example1.fsc"))
        assert (doc.p, doc.e, doc.m) == (2, 1, 4)
        assert (doc.n, doc.k, doc.r, doc.alpha, doc.beta) == (4, 2, 3, 2, 1)
        assert sorted(doc.subspaces) == ["U0", "U1", "U2", "U3"]
        assert sorted(doc.collections) == ["C0", "C1", "C2", "C3"]
        assert doc.states == {"C0": "U0", "C1": "U1", "C2": "U2", "C3": "U3"}
        assert doc.subspaces["U0"] == span(GF(2), 4, [(1, 0, 0, 0), (0, 0, 1, 1)])
        assert doc.collections["C0"] == ("U1", "U2", "U3")

    def test_collections_only_document(self):
        doc = parse_fsc(MINIMAL)
        assert doc.states == {}
        assert doc.collections == {}
        assert list(doc.subspaces) == ["A"]

    def test_generator_presentation_is_irrelevant(self):
        variant = MINIMAL.replace("row 1 0 0 0", "row 1 1 0 0")
        # both presentations span the same plane
        assert parse_fsc(variant) == parse_fsc(MINIMAL)

    def test_comments_and_whitespace(self):
        text = MINIMAL.replace("field 2 1", "field 2 1   # binary")
        text = "# header comment\n\n" + text.replace("  row", "\trow")
        assert parse_fsc(text) == parse_fsc(MINIMAL)

    def test_member_order_is_normalized(self):
        base = read_fixture("example1.fsc")
        swapped = base.replace("collection C0 U1 U2 U3", "collection C0 U3 U2 U1")
        assert parse_fsc(swapped) == parse_fsc(base)

    def test_map_block(self):
        text = MINIMAL + "map M\n  row 0 1 0 0\n  row 1 0 0 0\n" \
            "  row 0 0 1 0\n  row 0 0 0 1\nend\n"
        doc = parse_fsc(text)
        assert doc.maps["M"][0] == (0, 1, 0, 0)


def error_of(text):
    with pytest.raises(FscParseError) as info:
        parse_fsc(text)
    return info.value


class TestParseErrors:
    def test_version(self):
        err = error_of(MINIMAL.replace("FSC 1", "FSC 2"))
        assert err.line == 1
        assert "version" in str(err)

    def test_unknown_field_order(self):
        err = error_of(MINIMAL.replace("field 2 1", "field 6 1"))
        assert err.line == 2
        assert "field" in str(err)

    def test_row_length(self):
        err = error_of(MINIMAL.replace("row 0 1 0 0", "row 0 1 0"))
        assert err.line == 7
        assert "expected 4" in str(err)

    def test_entry_out_of_field(self):
        err = error_of(MINIMAL.replace("row 0 1 0 0", "row 0 2 0 0"))
        assert err.line == 7
        assert err.col == 9
        assert "field of order 2" in str(err)

    def test_undefined_subspace(self):
        err = error_of(MINIMAL + "collection C A B\n")
        assert err.line == 9
        assert err.col == 16
        assert "undefined subspace 'B'" in str(err)

    def test_undefined_collection_in_state(self):
        err = error_of(MINIMAL + "state C -> A\n")
        assert "undefined collection 'C'" in str(err)

    def test_duplicate_subspace(self):
        err = error_of(MINIMAL + "subspace A\nend\n")
        assert "duplicate subspace 'A'" in str(err)

    def test_unclosed_block(self):
        err = error_of(MINIMAL.replace("end\n", ""))
        assert "not closed" in str(err)

    def test_unknown_directive(self):
        err = error_of(MINIMAL + "frobnicate\n")
        assert "unknown directive" in str(err)

    def test_non_invertible_map(self):
        text = MINIMAL + "map M\n  row 1 0 0 0\n  row 1 0 0 0\n" \
            "  row 0 0 1 0\n  row 0 0 0 1\nend\n"
        err = error_of(text)
        assert "not invertible" in str(err)

    def test_map_row_count(self):
        err = error_of(MINIMAL + "map M\n  row 1 0 0 0\nend\n")
        assert "expected 4" in str(err)

    def test_bad_params(self):
        err = error_of(MINIMAL.replace("params 4 2 3 2 1", "params 4 2 9 2 1"))
        assert err.line == 4

    def test_missing_header(self):
        err = error_of("FSC 1\nfield 2 1\n")
        assert "ambient" in str(err)


class TestEmit:
    def test_round_trip_identity(self):
        doc = parse_fsc(read_fixture("example1.fsc"))
        assert parse_fsc(emit_fsc(doc)) == doc

    def test_canonical_text_is_stable(self):
        doc = parse_fsc(read_fixture("example1.fsc"))
        text = emit_fsc(doc)
        assert emit_fsc(parse_fsc(text)) == text

    def test_equal_documents_emit_identically(self):
        base = read_fixture("example1.fsc")
        shuffled = base.replace("collection C0 U1 U2 U3", "collection C0 U3 U1 U2")
        assert emit_fsc(parse_fsc(shuffled)) == emit_fsc(parse_fsc(base))

    def test_map_round_trip(self):
        text = MINIMAL + "map M\n  row 0 1 0 0\n  row 1 0 0 0\n" \
            "  row 0 0 1 0\n  row 0 0 0 1\nend\n"
        doc = parse_fsc(text)
        assert parse_fsc(emit_fsc(doc)) == doc


class TestConversions:
    def test_document_to_states_verifies(self):
        doc = parse_fsc(read_fixture("example1.fsc"))
        states = document_to_states(doc)
        assert len(states) == 4
        assert states.verify().ok

    def test_document_with_wrong_member_count(self):
        text = MINIMAL + "subspace B\n  row 0 0 1 0\n  row 0 0 0 1\nend\n" \
            "collection C A B\n"
        doc = parse_fsc(text)
        with pytest.raises(ValueError, match="members"):
            document_to_states(doc)

    def test_states_round_trip(self, exact_code_spaces):
        params, spaces = exact_code_spaces
        states = exact_to_states(spaces, params)
        states.verify()
        doc = states_to_document(states)
        assert len(doc.collections) == 4
        assert len(doc.states) == 4
        again = document_to_states(doc)
        assert sorted(again.collections) == sorted(states.collections)
        assert parse_fsc(emit_fsc(doc)) == doc
