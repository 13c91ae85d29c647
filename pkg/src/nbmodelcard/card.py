"""Model-card sections inside a notebook.

A markdown cell belongs to a card section when its first line is exactly
``<!-- model-card-section: <slug> -->``. The comment is invisible in
rendered markdown and easy to grep. Section bodies live in the notebook
itself; this module assembles them into a card, fills them back in, runs
the completion check, and exports a standalone markdown file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace as dc_replace

from .errors import ConfigSchemaError, UnknownSection
from .notebook import Notebook, insert_cell_at, make_markdown_cell, replace_cell

MARKER_PREFIX = "<!-- model-card-section: "
_MARKER_RE = re.compile(r"^<!-- model-card-section: ([a-z0-9-]+) -->$")
_SLUG_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")

EMPTY_SECTION_PLACEHOLDER = "<!-- TODO: complete this section -->"

_EXAMPLE_PEOPLENET = "https://catalog.ngc.nvidia.com/orgs/nvidia/models/tlt_peoplenet"
_EXAMPLE_CTRL = "https://github.com/salesforce/ctrl/blob/master/ModelCard.pdf"
_EXAMPLE_FACE = "https://modelcards.withgoogle.com/face-detection"

# The standard nine model-card sections, in their canonical order.
_DEFAULT_SECTIONS: tuple[tuple[str, str, tuple[str, ...]], ...] = (
    (
        "Model Details",
        "Basic facts about the model: developers, release date and version, "
        "model type and architecture, license, and how to reach the maintainers.",
        (_EXAMPLE_CTRL,),
    ),
    (
        "Intended Use",
        "The primary use cases and users the model was built for, and nearby "
        "uses that are out of scope or easily confused with them.",
        (_EXAMPLE_PEOPLENET,),
    ),
    (
        "Factors",
        "Demographic or phenotypic groups, environmental conditions, and "
        "instrumentation choices that can change how well the model works.",
        (_EXAMPLE_FACE,),
    ),
    (
        "Metrics",
        "The performance measures reported for the model, why they were "
        "chosen, and how they are computed (including decision thresholds).",
        (_EXAMPLE_FACE,),
    ),
    (
        "Evaluation Data",
        "The datasets used to evaluate the model, why they were selected, "
        "and any preprocessing applied before evaluation.",
        (_EXAMPLE_PEOPLENET,),
    ),
    (
        "Training Data",
        "The data the model was trained on. When details cannot be shared, "
        "summarize what you can, such as distributions over relevant groups.",
        (_EXAMPLE_CTRL,),
    ),
    (
        "Quantitative Analyses",
        "Disaggregated results: how the model performs for each identified "
        "factor and for intersections of factors.",
        (_EXAMPLE_FACE,),
    ),
    (
        "Ethical Considerations",
        "Sensitive data, impact on human life, foreseeable risks and harms, "
        "mitigations taken, and known trade-offs.",
        (_EXAMPLE_CTRL,),
    ),
    (
        "Caveats and Recommendations",
        "Anything else users should know: known caveats, gaps in testing, "
        "and recommendations for further evaluation or appropriate use.",
        (_EXAMPLE_PEOPLENET,),
    ),
)


@dataclass(frozen=True)
class CardSectionSpec:
    """One configured section of the card template."""

    id: str
    title: str
    description: str = ""
    examples: tuple[str, ...] = ()
    required: bool = True
    order: int = 0


@dataclass(frozen=True)
class CardTemplate:
    sections: tuple[CardSectionSpec, ...]

    def section(self, section_id: str) -> CardSectionSpec | None:
        for spec in self.sections:
            if spec.id == section_id:
                return spec
        return None

    def ids(self) -> list[str]:
        return [spec.id for spec in self.sections]

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "id": s.id,
                "title": s.title,
                "description": s.description,
                "examples": list(s.examples),
                "required": s.required,
                "order": s.order,
            }
            for s in self.sections
        ]


@dataclass(frozen=True)
class CardEntry:
    section_id: str
    content: str
    cell_id: str | None = None


@dataclass(frozen=True)
class OrphanCell:
    """A tagged cell that could not be bound to a template section."""

    cell_id: str
    reason: str
    section_id: str | None = None


@dataclass(frozen=True)
class CardDocument:
    entries: tuple[CardEntry, ...] = ()
    orphans: tuple[OrphanCell, ...] = ()

    def entry(self, section_id: str) -> CardEntry | None:
        for entry in self.entries:
            if entry.section_id == section_id:
                return entry
        return None

    def to_json_obj(self) -> dict:
        return {
            "entries": [
                {"section_id": e.section_id, "content": e.content, "cell_id": e.cell_id}
                for e in self.entries
            ],
            "orphans": [
                {"cell_id": o.cell_id, "reason": o.reason, "section_id": o.section_id}
                for o in self.orphans
            ],
        }


def slugify(title: str) -> str:
    """Lowercase, with runs of non-alphanumerics collapsed to single hyphens."""
    slug = re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-")
    return slug


def marker_line(section_id: str) -> str:
    return f"{MARKER_PREFIX}{section_id} -->"


def parse_marker(line: str) -> str | None:
    """Slug of an exact marker line, or None."""
    match = _MARKER_RE.match(line)
    return match.group(1) if match else None


def looks_like_marker(line: str) -> bool:
    return "model-card-section" in line


def default_template() -> CardTemplate:
    sections = tuple(
        CardSectionSpec(
            id=slugify(title),
            title=title,
            description=description,
            examples=examples,
            required=True,
            order=i,
        )
        for i, (title, description, examples) in enumerate(_DEFAULT_SECTIONS)
    )
    return CardTemplate(sections=sections)


def load_template(config_bytes: bytes | None) -> CardTemplate:
    """Build the template from configuration bytes.

    The configuration is a JSON array of section objects
    ``{"id", "title", "description", "examples", "required"}``; array order
    is template order. ``id`` defaults to the slugged title. An absent or
    empty configuration yields the default nine-section template.
    """
    if config_bytes is None or not config_bytes.strip():
        return default_template()
    try:
        doc = json.loads(config_bytes.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigSchemaError(f"configuration is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ConfigSchemaError("configuration must be a JSON array of section objects")
    if not doc:
        return default_template()

    sections: list[CardSectionSpec] = []
    seen: set[str] = set()
    for i, item in enumerate(doc):
        where = f"section {i}"
        if not isinstance(item, dict):
            raise ConfigSchemaError(f"{where}: must be a JSON object")
        title = item.get("title")
        if not isinstance(title, str) or not title.strip():
            raise ConfigSchemaError(f"{where}: missing title")
        section_id = item.get("id", slugify(title))
        if not isinstance(section_id, str) or not _SLUG_RE.match(section_id):
            raise ConfigSchemaError(
                f"{where}: id {section_id!r} is not a slug (lowercase letters, digits, hyphens)"
            )
        if section_id in seen:
            raise ConfigSchemaError(f"{where}: duplicate id {section_id!r}")
        seen.add(section_id)
        description = item.get("description", "")
        if not isinstance(description, str):
            raise ConfigSchemaError(f"{where}: description must be a string")
        examples = item.get("examples", [])
        if not isinstance(examples, list) or not all(isinstance(x, str) for x in examples):
            raise ConfigSchemaError(f"{where}: examples must be a list of strings")
        required = item.get("required", True)
        if not isinstance(required, bool):
            raise ConfigSchemaError(f"{where}: required must be a boolean")
        sections.append(
            CardSectionSpec(
                id=section_id,
                title=title,
                description=description,
                examples=tuple(examples),
                required=required,
                order=i,
            )
        )
    return CardTemplate(sections=tuple(sections))


def _section_body(source: str, title: str) -> str:
    # Drop the marker line, plus the generated "## <title>" scaffold line
    # when present, so the entry holds exactly what the author wrote.
    lines = source.split("\n")[1:]
    if lines and lines[0] == f"## {title}":
        lines = lines[1:]
    return "\n".join(lines)


def extract_card(nb: Notebook, template: CardTemplate) -> CardDocument:
    """Collect tagged markdown cells into a card.

    The earliest cell in document order wins a section; later duplicates,
    markers for unknown sections, and malformed markers are reported as
    orphans. Never raises on arbitrary markdown content.
    """
    entries: dict[str, CardEntry] = {}
    orphans: list[OrphanCell] = []
    for cell in nb.cells:
        if cell.kind != "markdown":
            continue
        first = cell.first_line()
        slug = parse_marker(first)
        if slug is None:
            if looks_like_marker(first):
                orphans.append(OrphanCell(cell_id=cell.id, reason="malformed section marker"))
            continue
        spec = template.section(slug)
        if spec is None:
            orphans.append(
                OrphanCell(
                    cell_id=cell.id,
                    reason=f"marker references unknown section {slug!r}",
                    section_id=slug,
                )
            )
        elif slug in entries:
            orphans.append(
                OrphanCell(
                    cell_id=cell.id,
                    reason=f"duplicate marker for section {slug!r}",
                    section_id=slug,
                )
            )
        else:
            entries[slug] = CardEntry(
                section_id=slug,
                content=_section_body(cell.source, spec.title),
                cell_id=cell.id,
            )
    ordered = tuple(entries[s] for s in template.ids() if s in entries)
    return CardDocument(entries=ordered, orphans=tuple(orphans))


def _render_section_cell(spec: CardSectionSpec, content: str) -> str:
    source = f"{marker_line(spec.id)}\n## {spec.title}"
    if content:
        source += "\n" + content
    return source


def upsert_section(
    nb: Notebook, template: CardTemplate, section_id: str, content: str
) -> tuple[Notebook, str]:
    """Write a section body into its tagged cell, creating the cell if needed.

    New cells are appended at the end of the notebook; moving them where
    they belong is left to the author. Idempotent for identical content.
    Returns the updated notebook and the id of the section's cell.
    """
    spec = template.section(section_id)
    if spec is None:
        raise UnknownSection(f"section {section_id!r} is not in the template")
    source = _render_section_cell(spec, content)

    target: str | None = None
    for cell in nb.cells:
        if cell.kind == "markdown" and parse_marker(cell.first_line()) == section_id:
            target = cell.id
            break
    if target is not None:
        cell = next(c for c in nb.cells if c.id == target)
        updated = replace_cell(nb, target, dc_replace(cell, source=source))
    else:
        updated = insert_cell_at(nb, len(nb.cells), make_markdown_cell(source))

    for cell in updated.cells:
        if cell.kind == "markdown" and parse_marker(cell.first_line()) == section_id:
            return updated, cell.id
    raise AssertionError("upserted section cell not found")  # pragma: no cover


def completion_check(card: CardDocument, template: CardTemplate) -> list[str]:
    """Required sections whose entry is missing or whitespace-only, in template order."""
    missing = []
    for spec in template.sections:
        if not spec.required:
            continue
        entry = card.entry(spec.id)
        if entry is None or not entry.content.strip():
            missing.append(spec.id)
    return missing


def export_card(card: CardDocument, template: CardTemplate) -> bytes:
    """Render the card as standalone markdown, one heading per section.

    Empty sections render as the heading plus a placeholder comment, so the
    export is total and the gaps stay visible. Pure function of its inputs;
    repeated calls are byte-identical.
    """
    blocks = []
    for spec in template.sections:
        entry = card.entry(spec.id)
        if entry is not None and entry.content.strip():
            body = entry.content.rstrip("\n")
        else:
            body = EMPTY_SECTION_PLACEHOLDER
        blocks.append(f"## {spec.title}\n\n{body}")
    return ("\n\n".join(blocks) + "\n").encode("utf-8")
