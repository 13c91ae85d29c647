from __future__ import annotations

import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
from conftest import code_cell, make_notebook, md_cell, nb_bytes
from nbmodelcard.errors import (
    IndexOutOfBounds,
    MalformedJson,
    MissingCellsArray,
    UnknownCellId,
    UnsupportedFormat,
)
from nbmodelcard.notebook import (
    delete_cell,
    find_cell,
    insert_cell_at,
    make_code_cell,
    make_markdown_cell,
    parse_notebook,
    replace_cell,
    serialize_notebook,
)


def test_parse_empty_notebook():
    nb = parse_notebook(nb_bytes([]))
    assert nb.cells == ()
    assert nb.format_major == 4
    assert nb.format_minor == 5


def test_parse_three_cell_fixture_field_by_field():
    raw = nb_bytes(
        [
            md_cell(["# Title\n", "text"]),
            code_cell("x = 1", metadata={"tags": ["a"]}),
            code_cell(["y = x + 1"]),
        ],
        minor=4,
        metadata={"kernelspec": {"name": "python3"}},
    )
    nb = parse_notebook(raw)
    assert [c.kind for c in nb.cells] == ["markdown", "code", "code"]
    assert nb.cells[0].source == "# Title\ntext"
    assert nb.cells[1].source == "x = 1"
    assert nb.cells[1].metadata == {"tags": ["a"]}
    assert nb.cells[1].outputs == []
    assert nb.cells[1].execution_count is None
    assert nb.cells[2].source == "y = x + 1"
    assert nb.metadata == {"kernelspec": {"name": "python3"}}


def test_format_major_3_rejected():
    raw = json.dumps({"cells": [], "metadata": {}, "nbformat": 3, "nbformat_minor": 0})
    with pytest.raises(UnsupportedFormat):
        parse_notebook(raw.encode())


def test_missing_nbformat_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_notebook(b'{"cells": [], "metadata": {}}')


def test_malformed_inputs():
    with pytest.raises(MalformedJson):
        parse_notebook(b"\xff\xfe not utf8 \xff")
    with pytest.raises(MalformedJson):
        parse_notebook(b"{not json")
    with pytest.raises(MalformedJson):
        parse_notebook(b'["top level array"]')
    with pytest.raises(MalformedJson):
        parse_notebook(nb_bytes([{"cell_type": "mystery", "source": "", "metadata": {}}]))
    with pytest.raises(MalformedJson):
        parse_notebook(nb_bytes([{"cell_type": "code", "metadata": {}}]))  # no source


def test_missing_cells_array():
    with pytest.raises(MissingCellsArray):
        parse_notebook(b'{"nbformat": 4, "nbformat_minor": 5, "metadata": {}}')


def test_duplicate_explicit_ids_rejected():
    raw = nb_bytes([md_cell("a", cell_id="x"), md_cell("b", cell_id="x")])
    with pytest.raises(MalformedJson):
        parse_notebook(raw)


@pytest.mark.parametrize("name,raw", corpus.corpus())
def test_round_trip_structural_equality(name, raw):
    first = parse_notebook(raw)
    out = serialize_notebook(first)
    second = parse_notebook(out)
    assert first == second


@pytest.mark.parametrize("name,raw", corpus.corpus())
def test_serialization_deterministic(name, raw):
    nb = parse_notebook(raw)
    assert serialize_notebook(nb) == serialize_notebook(nb)


@pytest.mark.parametrize("name,raw", corpus.corpus())
def test_identity_stable_across_reparses(name, raw):
    ids_a = [c.id for c in parse_notebook(raw).cells]
    ids_b = [c.id for c in parse_notebook(raw).cells]
    assert ids_a == ids_b
    assert len(set(ids_a)) == len(ids_a)


def _normalize_sources(doc: dict) -> dict:
    doc = copy.deepcopy(doc)
    for cell in doc.get("cells", []):
        if isinstance(cell.get("source"), list):
            cell["source"] = "".join(cell["source"])
    return doc


@pytest.mark.parametrize("name,raw", corpus.corpus())
def test_no_field_loss(name, raw):
    # Value-level diff between input and output must be empty; only
    # formatting (key order, whitespace, source line splitting) may change.
    original = _normalize_sources(json.loads(raw.decode("utf-8")))
    written = _normalize_sources(json.loads(serialize_notebook(parse_notebook(raw)).decode()))
    assert written == original


def test_serialize_empty_is_canonical():
    nb = parse_notebook(nb_bytes([], minor=2))
    out = serialize_notebook(nb).decode()
    assert out == (
        '{\n  "cells": [],\n  "metadata": {},\n  "nbformat": 4,\n  "nbformat_minor": 2\n}\n'
    )


def test_source_normalized_to_lines_on_output():
    nb = parse_notebook(nb_bytes([md_cell("a\nb\n"), md_cell("a\nb"), md_cell("")]))
    doc = json.loads(serialize_notebook(nb))
    assert doc["cells"][0]["source"] == ["a\n", "b\n"]
    assert doc["cells"][1]["source"] == ["a\n", "b"]
    assert doc["cells"][2]["source"] == []


def test_synthesized_ids_not_written_back():
    raw = nb_bytes([md_cell("hello")], minor=4)
    doc = json.loads(serialize_notebook(parse_notebook(raw)))
    assert "id" not in doc["cells"][0]


def test_explicit_ids_written_back():
    raw = nb_bytes([md_cell("hello", cell_id="keep-me")])
    doc = json.loads(serialize_notebook(parse_notebook(raw)))
    assert doc["cells"][0]["id"] == "keep-me"


def test_find_cell():
    nb = make_notebook([md_cell("a", cell_id="one"), code_cell("x", cell_id="two")])
    assert find_cell(nb, "one").source == "a"
    assert find_cell(nb, "nope") is None


def test_delete_only_cell_gives_empty_notebook():
    nb = make_notebook([md_cell("a", cell_id="one")])
    assert delete_cell(nb, "one").cells == ()


def test_delete_unknown_cell():
    nb = make_notebook([md_cell("a", cell_id="one")])
    with pytest.raises(UnknownCellId):
        delete_cell(nb, "nope")


def test_insert_at_zero_appears_first_in_file():
    nb = make_notebook([md_cell("old", cell_id="old")])
    nb2 = insert_cell_at(nb, 0, make_markdown_cell("new first"))
    doc = json.loads(serialize_notebook(nb2))
    assert "".join(doc["cells"][0]["source"]) == "new first"
    assert "".join(doc["cells"][1]["source"]) == "old"


def test_insert_out_of_bounds():
    nb = make_notebook([])
    with pytest.raises(IndexOutOfBounds):
        insert_cell_at(nb, 1, make_markdown_cell("x"))
    with pytest.raises(IndexOutOfBounds):
        insert_cell_at(nb, -1, make_markdown_cell("x"))


def test_replace_with_identical_content_leaves_bytes_unchanged():
    nb = make_notebook([code_cell("x = 1", cell_id="c")])
    before = serialize_notebook(nb)
    cell = find_cell(nb, "c")
    nb2 = replace_cell(nb, "c", cell)
    assert serialize_notebook(nb2) == before


def test_new_cells_get_persisted_ids_only_on_recent_minor():
    old = make_notebook([], minor=4)
    doc = json.loads(serialize_notebook(insert_cell_at(old, 0, make_code_cell("x = 1"))))
    assert "id" not in doc["cells"][0]

    recent = make_notebook([], minor=5)
    doc = json.loads(serialize_notebook(insert_cell_at(recent, 0, make_code_cell("x = 1"))))
    assert "id" in doc["cells"][0]


def test_edited_notebook_reparses_to_equal_model():
    # The in-memory notebook after an edit must match what re-reading its
    # serialization produces, including synthesized ids.
    nb = make_notebook([md_cell("a"), code_cell("x = 1")], minor=4)
    nb2 = insert_cell_at(nb, 1, make_markdown_cell("inserted"))
    assert parse_notebook(serialize_notebook(nb2)) == nb2
    nb3 = delete_cell(nb2, nb2.cells[0].id)
    assert parse_notebook(serialize_notebook(nb3)) == nb3


_source_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80
)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.sampled_from(["code", "markdown", "raw"]), _source_text), max_size=6
    ),
    st.integers(min_value=0, max_value=5),
)
def test_round_trip_property_generated(cells, minor):
    raw_cells = []
    for kind, source in cells:
        if kind == "code":
            raw_cells.append(code_cell(source))
        elif kind == "markdown":
            raw_cells.append(md_cell(source))
        else:
            raw_cells.append({"cell_type": "raw", "source": source, "metadata": {}})
    raw = nb_bytes(raw_cells, minor=minor)
    first = parse_notebook(raw)
    assert parse_notebook(serialize_notebook(first)) == first
