from __future__ import annotations

import json
from pathlib import Path

import pytest

from nbmodelcard.notebook import Notebook, parse_notebook

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def stage_fixture_bytes() -> bytes:
    return (FIXTURES / "notebooks" / "stage_fixture.ipynb").read_bytes()


@pytest.fixture
def stage_fixture(stage_fixture_bytes) -> Notebook:
    return parse_notebook(stage_fixture_bytes)


@pytest.fixture(scope="session")
def rubric_corpus() -> list[tuple[str, str]]:
    docs = []
    for path in sorted((FIXTURES / "rubric_corpus").glob("doc*.md")):
        docs.append((path.stem, path.read_text(encoding="utf-8")))
    return docs


@pytest.fixture(scope="session")
def rubric_labels() -> dict:
    return json.loads((FIXTURES / "rubric_corpus" / "labels.json").read_text(encoding="utf-8"))


def nb_bytes(cells, metadata=None, minor=5, **extra) -> bytes:
    doc = {
        "cells": cells,
        "metadata": metadata if metadata is not None else {},
        "nbformat": 4,
        "nbformat_minor": minor,
        **extra,
    }
    return json.dumps(doc).encode("utf-8")


def code_cell(source, cell_id=None, metadata=None):
    cell = {
        "cell_type": "code",
        "source": source,
        "metadata": metadata or {},
        "outputs": [],
        "execution_count": None,
    }
    if cell_id is not None:
        cell["id"] = cell_id
    return cell


def md_cell(source, cell_id=None, metadata=None):
    cell = {"cell_type": "markdown", "source": source, "metadata": metadata or {}}
    if cell_id is not None:
        cell["id"] = cell_id
    return cell


def make_notebook(cells, minor=5, metadata=None) -> Notebook:
    return parse_notebook(nb_bytes(cells, metadata=metadata, minor=minor))


_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE_RESULTS.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _ACCEPTANCE_RESULTS:
        label = "PASS" if outcome == "PASSED" else outcome
        terminalreporter.write_line(f"  {label}: {name}")
