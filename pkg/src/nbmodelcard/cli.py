"""Command-line interface.

One binary with subcommands, meant to be scriptable in CI so cards and
notebooks cannot silently drift apart. Exit codes: 0 clean, 1 a check
command found issues, 2 usage or I/O errors. Payloads go to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import card as card_mod
from . import codeview, rubric, trace
from .errors import NbModelCardError
from .notebook import load_notebook, store_notebook

CONFIG_ENV_VAR = "MODELCARD_CONFIG"
CONFIG_FILENAME = "modelcard.config.json"


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NbModelCardError as exc:
            _fail(str(exc))
        except OSError as exc:
            _fail(str(exc))

    return wrapper


def _resolve_config_path(explicit: str | None, notebook_path: str | None) -> Path | None:
    if explicit:
        return Path(explicit)
    env = os.environ.get(CONFIG_ENV_VAR)
    if env:
        return Path(env)
    if notebook_path:
        candidate = Path(notebook_path).parent / CONFIG_FILENAME
        if candidate.exists():
            return candidate
    return None


def _load_template(explicit: str | None, notebook_path: str | None) -> card_mod.CardTemplate:
    path = _resolve_config_path(explicit, notebook_path)
    if path is None:
        return card_mod.default_template()
    return card_mod.load_template(path.read_bytes())


_config_option = click.option(
    "--config",
    "config_path",
    type=str,
    default=None,
    help=f"Template configuration file (default: ${CONFIG_ENV_VAR} or "
    f"{CONFIG_FILENAME} next to the notebook).",
)


@click.group()
@click.version_option(package_name="nbmodelcard")
def main() -> None:
    """Model-card documentation tooling for Jupyter notebooks."""


# ---------------------------------------------------------------------------
# card


@main.group()
def card() -> None:
    """Assemble, preview, and export the model card."""


@card.command("show")
@click.argument("notebook_path", type=str)
@_config_option
@_guarded
def card_show(notebook_path: str, config_path: str | None) -> None:
    """Print the assembled card as markdown."""
    template = _load_template(config_path, notebook_path)
    nb = load_notebook(notebook_path)
    document = card_mod.extract_card(nb, template)
    sys.stdout.write(card_mod.export_card(document, template).decode("utf-8"))


@card.command("export")
@click.argument("notebook_path", type=str)
@click.option("--out", "-o", "out_path", required=True, type=str, help="Output markdown file.")
@click.option("--strict", is_flag=True, help="Exit 1 when any required section is empty.")
@_config_option
@_guarded
def card_export(notebook_path: str, out_path: str, strict: bool, config_path: str | None) -> None:
    """Write the card to a markdown file, warning about empty sections."""
    template = _load_template(config_path, notebook_path)
    nb = load_notebook(notebook_path)
    document = card_mod.extract_card(nb, template)
    missing = card_mod.completion_check(document, template)
    Path(out_path).write_bytes(card_mod.export_card(document, template))
    for section_id in missing:
        click.echo(f"warning: section '{section_id}' is empty", err=True)
    click.echo(f"wrote {out_path}", err=True)
    if strict and missing:
        sys.exit(1)


# ---------------------------------------------------------------------------
# stages


@main.group()
def stages() -> None:
    """Detect and correct pipeline stages of code cells."""


def _print_assignments(assignments, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps([a.to_json_obj() for a in assignments], indent=2))
        return
    for a in assignments:
        stage = a.stage.value if a.stage else "-"
        source = a.source or "-"
        calls = ", ".join(a.matched_calls)
        click.echo(f"{a.cell_id}  {stage:<22} {source:<16} {calls}")


def _apply_assignments(nb, assignments):
    for a in assignments:
        if a.source == "manual":
            continue  # left exactly as the user set it
        if a.stage is not None:
            nb = codeview.write_stage_comment(nb, a.cell_id, a.stage, source=a.source)
        else:
            nb = codeview.clear_stage(nb, a.cell_id)
    return nb


@stages.command("detect")
@click.argument("notebook_path", type=str)
@click.option("--kb", "kb_path", type=str, default=None, help="Knowledge base JSON file.")
@click.option("--write", "write_back", is_flag=True, help="Inject comments/metadata and save.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_guarded
def stages_detect(notebook_path: str, kb_path: str | None, write_back: bool, fmt: str) -> None:
    """Classify code cells into pipeline stages via the knowledge base."""
    kb = (
        codeview.load_knowledge_base(Path(kb_path).read_bytes())
        if kb_path
        else codeview.default_knowledge_base()
    )
    nb = load_notebook(notebook_path)
    prior = [a for a in codeview.stored_assignments(nb) if a.source == "manual"]
    assignments = codeview.detect_stages(nb, kb, prior)
    _print_assignments(assignments, fmt)
    if write_back:
        store_notebook(_apply_assignments(nb, assignments), notebook_path)


@stages.command("set")
@click.argument("notebook_path", type=str)
@click.argument("cell_id", type=str)
@click.argument("stage", type=str)
@_guarded
def stages_set(notebook_path: str, cell_id: str, stage: str) -> None:
    """Manually assign a stage to one code cell."""
    nb = load_notebook(notebook_path)
    nb = codeview.write_stage_comment(nb, cell_id, stage, source="manual")
    store_notebook(nb, notebook_path)
    click.echo(f"{cell_id} -> {codeview.coerce_stage(stage).value} (manual)", err=True)


# ---------------------------------------------------------------------------
# trace


@main.group("trace")
def trace_group() -> None:
    """Check code/documentation trace links."""


@trace_group.command("check")
@click.argument("notebook_path", type=str)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="json")
@_config_option
@_guarded
def trace_check(notebook_path: str, fmt: str, config_path: str | None) -> None:
    """Report broken trace links; exit 1 when any are found."""
    template = _load_template(config_path, notebook_path)
    nb = load_notebook(notebook_path)
    issues = trace.check_trace_integrity(nb, template)
    if fmt == "json":
        click.echo(json.dumps(trace.issues_to_json_obj(issues), indent=2))
    else:
        for issue in issues:
            click.echo(f"{issue.kind}  {issue.cell_id or '-'}  {issue.detail}")
        click.echo(f"{len(issues)} issue(s)", err=True)
    if issues:
        sys.exit(1)


# ---------------------------------------------------------------------------
# rubric


@main.group("rubric")
def rubric_group() -> None:
    """Run the documentation-quality checklist."""


def _load_manual_answers(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        answers = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        _fail(f"cannot read answers file: {exc}")
    if not isinstance(answers, dict):
        _fail("answers file must be a JSON object of question id -> answer")
    return answers


@rubric_group.command("assess")
@click.argument("targets", type=str, nargs=-1, required=True)
@click.option(
    "--from-card",
    is_flag=True,
    help="Treat targets as notebooks and assess their exported cards.",
)
@click.option("--answers", "answers_path", type=str, default=None, help="Manual answers JSON.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_config_option
@_guarded
def rubric_assess(
    targets: tuple[str, ...],
    from_card: bool,
    answers_path: str | None,
    fmt: str,
    config_path: str | None,
) -> None:
    """Assess markdown documents (or notebook cards) against the checklist."""
    manual = _load_manual_answers(answers_path)
    documents: list[tuple[str, str]] = []
    for target in targets:
        if from_card:
            template = _load_template(config_path, target)
            nb = load_notebook(target)
            text = card_mod.export_card(card_mod.extract_card(nb, template), template).decode(
                "utf-8"
            )
        else:
            text = Path(target).read_text(encoding="utf-8")
        documents.append((target, text))

    try:
        if len(documents) == 1:
            name, text = documents[0]
            report = rubric.assess(text, manual, target=name)
            output = (
                rubric.report_to_json(report) if fmt == "json" else rubric.report_to_text(report)
            )
        else:
            result = rubric.assess_corpus(documents, {name: manual for name, _ in documents})
            output = (
                json.dumps(result.to_json_obj(), indent=2, sort_keys=True)
                if fmt == "json"
                else result.to_text_table()
            )
    except (KeyError, ValueError) as exc:
        _fail(f"invalid manual answers: {exc}")
    click.echo(output)


# ---------------------------------------------------------------------------
# serve


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7430, show_default=True, type=int)
@click.option(
    "--notebook-root",
    "notebook_root",
    type=str,
    default=".",
    show_default=True,
    help="Directory whose notebooks the service may read and write.",
)
@click.option("--panel-dir", "panel_dir", type=str, default=None, help="Built panel assets.")
@_config_option
@_guarded
def serve(
    host: str, port: int, notebook_root: str, panel_dir: str | None, config_path: str | None
) -> None:
    """Run the local HTTP service for the browser panel."""
    import uvicorn

    from .service import create_app

    resolved_config = config_path or os.environ.get(CONFIG_ENV_VAR)
    app = create_app(
        notebook_root=Path(notebook_root),
        config_path=Path(resolved_config) if resolved_config else None,
        panel_dir=Path(panel_dir) if panel_dir else None,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
