"""Fixture corpus for round-trip testing: 24 notebook documents as bytes.

Each builder returns the raw bytes of one nbformat-4 file, covering the
shapes real editors produce: empty notebooks, magic-laden cells, broken
syntax, unicode, string-vs-list sources, rich outputs, unknown keys.
"""

from __future__ import annotations

import json


def _nb(cells, metadata=None, minor=5, **extra) -> bytes:
    doc = {
        "cells": cells,
        "metadata": metadata if metadata is not None else {},
        "nbformat": 4,
        "nbformat_minor": minor,
        **extra,
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def _code(source, *, outputs=None, count=None, meta=None, **extra):
    cell = {
        "cell_type": "code",
        "source": source,
        "metadata": meta or {},
        "outputs": outputs if outputs is not None else [],
        "execution_count": count,
    }
    cell.update(extra)
    return cell


def _md(source, *, meta=None, **extra):
    cell = {"cell_type": "markdown", "source": source, "metadata": meta or {}}
    cell.update(extra)
    return cell


KERNEL_META = {
    "kernelspec": {"display_name": "Python 3", "language": "python", "name": "python3"},
    "language_info": {"name": "python", "version": "3.10.12"},
}


def empty_minor2() -> bytes:
    return _nb([], minor=2)


def empty_minor5() -> bytes:
    return _nb([], metadata=KERNEL_META)


def single_markdown_string_source() -> bytes:
    return _nb([_md("# Title\n\nA paragraph.")], minor=4)


def single_markdown_list_source() -> bytes:
    return _nb([_md(["# Title\n", "\n", "A paragraph."])], minor=4)


def code_with_stream_output() -> bytes:
    return _nb(
        [
            _code(
                ["print('hi')"],
                outputs=[{"name": "stdout", "output_type": "stream", "text": ["hi\n"]}],
                count=3,
            )
        ],
        metadata=KERNEL_META,
    )


def code_unexecuted() -> bytes:
    return _nb([_code(["x = 1\n", "x"])], metadata=KERNEL_META)


def magic_laden() -> bytes:
    return _nb(
        [
            _code(["%matplotlib inline\n", "import math"]),
            _code(["!pip install requests\n", "import requests"]),
            _code(["%%time\n", "sum(range(10))"]),
            _code(["math.sqrt?\n"]),
        ],
        metadata=KERNEL_META,
    )


def broken_syntax() -> bytes:
    return _nb(
        [
            _code(["def broken(:\n", "    pass\n"]),
            _code(["x = (1 +\n"]),
            _code(["this is not python at all $$$"]),
        ],
        metadata=KERNEL_META,
    )


def unicode_content() -> bytes:
    return _nb(
        [
            _md(["# Ünïcode ✓ 模型\n", "\n", "emoji: 🚀, combining: é"]),
            _code(["s = '日本語テキスト'\n", "print(s)"]),
        ],
        metadata={"title": "ünïcode", "扩展": {"键": "值"}},
    )


def carriage_returns_in_source() -> bytes:
    return _nb([_code("x = 'line1\r\nline2'\nprint(x)")], minor=4)


def rich_cell_metadata() -> bytes:
    return _nb(
        [
            _code(
                ["pass"],
                meta={
                    "tags": ["keep", "export"],
                    "jupyter": {"outputs_hidden": True},
                    "collapsed": False,
                },
            )
        ],
        metadata=KERNEL_META,
    )


def unknown_top_level_key() -> bytes:
    return _nb([_md("hello")], my_tool={"version": 3, "flags": ["a", "b"]}, minor=4)


def markdown_attachments() -> bytes:
    return _nb(
        [
            _md(
                ["![img](attachment:pic.png)"],
                attachments={"pic.png": {"image/png": "aGVsbG8="}},
            )
        ],
        minor=4,
    )


def explicit_cell_ids() -> bytes:
    return _nb(
        [
            _md(["one"], id="cell-one"),
            _code(["1 + 1"], id="cell-two"),
            _md(["three"], id="cell-three"),
        ],
        metadata=KERNEL_META,
    )


def raw_cell() -> bytes:
    return _nb([{"cell_type": "raw", "source": ["$$e^x$$"], "metadata": {"format": "latex"}}])


def thirty_small_cells() -> bytes:
    return _nb([_code([f"v{i} = {i}"]) for i in range(30)], metadata=KERNEL_META)


def card_markers() -> bytes:
    return _nb(
        [
            _md(["<!-- model-card-section: intended-use -->\n", "## Intended Use\n", "Scoring."]),
            _md(["<!-- model-card-section: metrics -->\n", "## Metrics\n", "Accuracy 0.9."]),
            _md(["plain markdown, no marker"]),
        ],
        metadata=KERNEL_META,
    )


def stage_comments_and_metadata() -> bytes:
    return _nb(
        [
            _code(
                ["# ml-stage: model_training\n", "model.fit(X, y)"],
                meta={"model_card": {"stage": "model_training", "stage_source": "manual"}},
            )
        ],
        metadata=KERNEL_META,
    )


def display_data_output() -> bytes:
    return _nb(
        [
            _code(
                ["plot()"],
                outputs=[
                    {
                        "data": {
                            "image/png": "iVBORw0KGgo=",
                            "text/plain": ["<Figure size 640x480>"],
                        },
                        "metadata": {"needs_background": "light"},
                        "output_type": "display_data",
                    }
                ],
                count=7,
            )
        ],
        metadata=KERNEL_META,
    )


def error_output() -> bytes:
    return _nb(
        [
            _code(
                ["1/0"],
                outputs=[
                    {
                        "ename": "ZeroDivisionError",
                        "evalue": "division by zero",
                        "output_type": "error",
                        "traceback": ["[31mZeroDivisionError[0m"],
                    }
                ],
                count=1,
            )
        ],
        metadata=KERNEL_META,
    )


def execution_count_missing() -> bytes:
    # Off-schema but seen in the wild: code cell without execution_count.
    return _nb([{"cell_type": "code", "source": ["x = 1"], "metadata": {}, "outputs": []}])


def empty_source_cells() -> bytes:
    return _nb([_md(""), _code([]), _md([""])], minor=4)


def no_trailing_newline_vs_trailing() -> bytes:
    return _nb([_code(["a = 1\n", "b = 2\n"]), _code(["c = 3\n", "d = 4"])])


def deep_unicode_metadata() -> bytes:
    return _nb(
        [_md("x")],
        metadata={"nested": {"深": [1, 2, {"é": "ü"}], "empty": {}, "null": None}},
        minor=4,
    )


def duplicated_sources() -> bytes:
    # Identical cells must still get distinct synthesized ids.
    return _nb([_code(["x = 1"]), _code(["x = 1"]), _md("same"), _md("same")], minor=4)


def mixed_everything() -> bytes:
    return _nb(
        [
            _md(["# Report\n"], id="intro"),
            _code(["%load_ext autoreload\n", "import pandas as pd"], count=1),
            _code(["df = pd.read_csv('d.csv')\n", "df.head()"], count=2),
            _md(["<!-- model-card-section: training-data -->\n", "## Training Data\n", "CSV."]),
            {"cell_type": "raw", "source": "raw text", "metadata": {}},
        ],
        metadata=KERNEL_META,
    )


ALL_BUILDERS = [
    empty_minor2,
    empty_minor5,
    single_markdown_string_source,
    single_markdown_list_source,
    code_with_stream_output,
    code_unexecuted,
    magic_laden,
    broken_syntax,
    unicode_content,
    carriage_returns_in_source,
    rich_cell_metadata,
    unknown_top_level_key,
    markdown_attachments,
    explicit_cell_ids,
    raw_cell,
    thirty_small_cells,
    card_markers,
    stage_comments_and_metadata,
    display_data_output,
    error_output,
    execution_count_missing,
    empty_source_cells,
    no_trailing_newline_vs_trailing,
    deep_unicode_metadata,
    duplicated_sources,
    mixed_everything,
]


def corpus() -> list[tuple[str, bytes]]:
    return [(builder.__name__, builder()) for builder in ALL_BUILDERS]
