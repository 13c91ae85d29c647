"""Lossless model of nbformat-4 notebook files.

Parsing keeps every field of the input document: cell keys outside the
model (attachments, tool-specific extensions) ride along in ``extra`` maps
and are written back on serialization. Serialization is canonical (sorted
keys, two-space indent, UTF-8, trailing newline), so writing the same
Notebook twice yields identical bytes.

Notebook and Cell values are immutable; editing functions return new
values and never touch their inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

from .errors import (
    IndexOutOfBounds,
    MalformedJson,
    MissingCellsArray,
    UnknownCellId,
    UnsupportedFormat,
)

CELL_KINDS = ("code", "markdown", "raw")

_MODELED_CELL_KEYS = frozenset(
    {"cell_type", "id", "source", "metadata", "outputs", "execution_count"}
)
_MODELED_TOP_KEYS = frozenset({"cells", "metadata", "nbformat", "nbformat_minor"})


def synthesize_cell_id(kind: str, source: str, ordinal: int) -> str:
    """Deterministic id for cells that carry no explicit nbformat id.

    Depends only on cell content and position, so re-parsing unchanged
    bytes always reproduces the same id.
    """
    payload = f"{kind}\x00{ordinal}\x00{source}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:12]


@dataclass(frozen=True)
class Cell:
    """One notebook cell.

    ``id_persisted`` records whether the id came from the file (and is
    written back) or was synthesized (and is not, to keep unedited files
    byte-stable). ``execution_count_present`` keeps the distinction
    between ``"execution_count": null`` and a missing key.
    """

    id: str
    kind: str
    source: str
    metadata: dict = field(default_factory=dict)
    outputs: list | None = None
    execution_count: int | None = None
    execution_count_present: bool = False
    extra: dict = field(default_factory=dict)
    id_persisted: bool = False

    def first_line(self) -> str:
        return self.source.split("\n", 1)[0]


@dataclass(frozen=True)
class Notebook:
    """An nbformat-4 document: format version, metadata, ordered cells."""

    format_major: int
    format_minor: int
    metadata: dict = field(default_factory=dict)
    cells: tuple[Cell, ...] = ()
    extra: dict = field(default_factory=dict)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def code_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.kind == "code"]

    def markdown_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.kind == "markdown"]


def _join_source(value: Any, where: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list) and all(isinstance(part, str) for part in value):
        return "".join(value)
    raise MalformedJson(f"{where}: source must be a string or a list of strings")


def _split_source(source: str) -> list[str]:
    # Split on \n only (not universal newlines) so values survive untouched.
    if not source:
        return []
    parts = source.split("\n")
    lines = [part + "\n" for part in parts[:-1]]
    if parts[-1] != "":
        lines.append(parts[-1])
    return lines


def _parse_cell(raw: Any, ordinal: int) -> Cell:
    where = f"cell {ordinal}"
    if not isinstance(raw, dict):
        raise MalformedJson(f"{where}: cell must be a JSON object")
    kind = raw.get("cell_type")
    if kind not in CELL_KINDS:
        raise MalformedJson(f"{where}: unknown cell_type {kind!r}")
    if "source" not in raw:
        raise MalformedJson(f"{where}: missing source")
    source = _join_source(raw["source"], where)
    metadata = raw.get("metadata")
    if metadata is None:
        metadata = {}
    if not isinstance(metadata, dict):
        raise MalformedJson(f"{where}: metadata must be an object")

    outputs = None
    execution_count = None
    execution_count_present = False
    extra = {k: v for k, v in raw.items() if k not in _MODELED_CELL_KEYS}
    if kind == "code":
        if "outputs" in raw:
            if not isinstance(raw["outputs"], list):
                raise MalformedJson(f"{where}: outputs must be a list")
            outputs = raw["outputs"]
        if "execution_count" in raw:
            count = raw["execution_count"]
            if count is not None and not isinstance(count, int):
                raise MalformedJson(f"{where}: execution_count must be an integer or null")
            execution_count = count
            execution_count_present = True
    else:
        # outputs/execution_count are code-cell fields; on other kinds they
        # are off-schema and only carried through verbatim.
        for key in ("outputs", "execution_count"):
            if key in raw:
                extra[key] = raw[key]

    raw_id = raw.get("id")
    if raw_id is not None and not isinstance(raw_id, str):
        raise MalformedJson(f"{where}: id must be a string")
    if raw_id is not None:
        cell_id, persisted = raw_id, True
    else:
        cell_id, persisted = synthesize_cell_id(kind, source, ordinal), False

    return Cell(
        id=cell_id,
        kind=kind,
        source=source,
        metadata=metadata,
        outputs=outputs,
        execution_count=execution_count,
        execution_count_present=execution_count_present,
        extra=extra,
        id_persisted=persisted,
    )


def parse_notebook(data: bytes) -> Notebook:
    """Read nbformat-4 JSON bytes into a Notebook.

    Raises MalformedJson for bad UTF-8, bad JSON, or structurally invalid
    cells; UnsupportedFormat when nbformat is not 4; MissingCellsArray
    when the cells list is absent.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedJson(f"notebook is not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"notebook is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedJson("top-level JSON value must be an object")

    major = doc.get("nbformat")
    if major != 4:
        raise UnsupportedFormat(f"nbformat {major!r} is not supported (expected 4)")
    minor = doc.get("nbformat_minor", 0)
    if not isinstance(minor, int):
        raise MalformedJson("nbformat_minor must be an integer")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise MalformedJson("notebook metadata must be an object")

    cells_raw = doc.get("cells")
    if not isinstance(cells_raw, list):
        raise MissingCellsArray("notebook has no cells array")
    cells = tuple(_parse_cell(raw, i) for i, raw in enumerate(cells_raw))

    seen: set[str] = set()
    for cell in cells:
        if cell.id in seen:
            raise MalformedJson(f"duplicate cell id {cell.id!r}")
        seen.add(cell.id)

    extra = {k: v for k, v in doc.items() if k not in _MODELED_TOP_KEYS}
    return Notebook(
        format_major=major,
        format_minor=minor,
        metadata=metadata,
        cells=cells,
        extra=extra,
    )


def _cell_to_json(cell: Cell) -> dict:
    doc: dict[str, Any] = {
        "cell_type": cell.kind,
        "metadata": cell.metadata,
        "source": _split_source(cell.source),
    }
    if cell.id_persisted:
        doc["id"] = cell.id
    if cell.kind == "code":
        if cell.outputs is not None:
            doc["outputs"] = cell.outputs
        if cell.execution_count_present:
            doc["execution_count"] = cell.execution_count
    doc.update(cell.extra)
    return doc


def serialize_notebook(nb: Notebook) -> bytes:
    """Write a Notebook as canonical nbformat-4 JSON bytes.

    Output is deterministic: lexicographic key order, two-space indent,
    source normalized to a list of lines, trailing newline.
    """
    doc: dict[str, Any] = {
        "cells": [_cell_to_json(c) for c in nb.cells],
        "metadata": nb.metadata,
        "nbformat": nb.format_major,
        "nbformat_minor": nb.format_minor,
    }
    doc.update(nb.extra)
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def find_cell(nb: Notebook, cell_id: str) -> Cell | None:
    for cell in nb.cells:
        if cell.id == cell_id:
            return cell
    return None


def cell_position(nb: Notebook, cell_id: str) -> int:
    for i, cell in enumerate(nb.cells):
        if cell.id == cell_id:
            return i
    raise UnknownCellId(f"no cell with id {cell_id!r}")


def _refresh_ids(cells: list[Cell]) -> tuple[Cell, ...]:
    # After edits, cells without a persisted id get their synthesized id
    # recomputed so the in-memory notebook matches what a re-parse of its
    # serialization would produce.
    out = []
    for i, cell in enumerate(cells):
        if cell.id_persisted:
            out.append(cell)
        else:
            out.append(replace(cell, id=synthesize_cell_id(cell.kind, cell.source, i)))
    return tuple(out)


def make_markdown_cell(source: str, metadata: dict | None = None) -> Cell:
    return Cell(id="", kind="markdown", source=source, metadata=metadata or {})


def make_code_cell(source: str, metadata: dict | None = None) -> Cell:
    return Cell(
        id="",
        kind="code",
        source=source,
        metadata=metadata or {},
        outputs=[],
        execution_count=None,
        execution_count_present=True,
    )


def insert_cell_at(nb: Notebook, index: int, cell: Cell) -> Notebook:
    """Insert a cell; 0 <= index <= len(cells).

    New cells get a persisted id only on nbformat >= 4.5 files, matching
    the file's own convention for whether cells carry explicit ids.
    """
    if not 0 <= index <= len(nb.cells):
        raise IndexOutOfBounds(f"insert index {index} outside 0..{len(nb.cells)}")
    if nb.format_minor >= 5 and not cell.id_persisted:
        cell = replace(
            cell, id=synthesize_cell_id(cell.kind, cell.source, index), id_persisted=True
        )
    cells = list(nb.cells)
    cells.insert(index, cell)
    return replace(nb, cells=_refresh_ids(cells))


def replace_cell(nb: Notebook, cell_id: str, new_cell: Cell) -> Notebook:
    position = cell_position(nb, cell_id)
    cells = list(nb.cells)
    cells[position] = new_cell
    return replace(nb, cells=_refresh_ids(cells))


def delete_cell(nb: Notebook, cell_id: str) -> Notebook:
    position = cell_position(nb, cell_id)
    cells = list(nb.cells)
    del cells[position]
    return replace(nb, cells=_refresh_ids(cells))


def load_notebook(path) -> Notebook:
    with open(path, "rb") as handle:
        return parse_notebook(handle.read())


def store_notebook(nb: Notebook, path) -> None:
    with open(path, "wb") as handle:
        handle.write(serialize_notebook(nb))
