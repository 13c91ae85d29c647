"""Integrity checks for code/documentation trace links, plus navigation.

Trace links live twice: in cell metadata (machine truth) and as visible
comments/markers (for humans reading the notebook). Metadata wins when
they disagree, but every disagreement is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .card import CardTemplate, looks_like_marker, parse_marker
from .codeview import ASSIGNMENT_SOURCES, Stage, parse_stage_comment
from .notebook import Notebook

ISSUE_KINDS = (
    "dangling_link",
    "comment_metadata_mismatch",
    "stale_marker",
    "duplicate_section_marker",
)


@dataclass(frozen=True)
class TraceIssue:
    kind: str
    cell_id: str | None
    detail: str

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, "cell_id": self.cell_id, "detail": self.detail}


@dataclass(frozen=True)
class NavigationIndex:
    """Stage -> tagged cells with their relative notebook position; section -> cell."""

    stages: dict  # stage value -> list of {"cell_id", "fraction"}
    sections: dict  # section id -> cell id

    def to_json_obj(self) -> dict:
        return {"stages": self.stages, "sections": self.sections}


def _valid_stage(value) -> str | None:
    try:
        return Stage(value).value
    except ValueError:
        return None


def build_navigation(nb: Notebook) -> NavigationIndex:
    """Index stage-tagged cells and section-marker cells by position.

    Position fractions are cell ordinal over max(1, cell count - 1), so a
    lone cell sits at 0 and the last cell of a longer notebook at 1.
    """
    denominator = max(1, len(nb.cells) - 1)
    stages: dict[str, list[dict]] = {}
    sections: dict[str, str] = {}
    for position, cell in enumerate(nb.cells):
        fraction = position / denominator
        info = cell.metadata.get("model_card")
        if isinstance(info, dict):
            stage = _valid_stage(info.get("stage")) if info.get("stage") is not None else None
            if stage is not None:
                stages.setdefault(stage, []).append({"cell_id": cell.id, "fraction": fraction})
        if cell.kind == "markdown":
            slug = parse_marker(cell.first_line())
            if slug is not None and slug not in sections:
                sections[slug] = cell.id
    return NavigationIndex(stages=stages, sections=sections)


def check_trace_integrity(nb: Notebook, template: CardTemplate) -> list[TraceIssue]:
    """Report every broken or inconsistent trace link in the notebook.

    Covers: stage comments or metadata naming unknown stages, comments
    that disagree with metadata (or exist without the other half), section
    markers outside the template, and duplicated section markers. A
    notebook written solely through this package's own operations reports
    nothing.
    """
    issues: list[TraceIssue] = []
    seen_sections: dict[str, str] = {}

    for cell in nb.cells:
        if cell.kind == "markdown":
            first = cell.first_line()
            slug = parse_marker(first)
            if slug is None:
                if looks_like_marker(first):
                    issues.append(
                        TraceIssue(
                            kind="stale_marker",
                            cell_id=cell.id,
                            detail=f"malformed section marker line {first!r}",
                        )
                    )
                continue
            if template.section(slug) is None:
                issues.append(
                    TraceIssue(
                        kind="stale_marker",
                        cell_id=cell.id,
                        detail=f"marker references section {slug!r} which is not in the template",
                    )
                )
            elif slug in seen_sections:
                issues.append(
                    TraceIssue(
                        kind="duplicate_section_marker",
                        cell_id=cell.id,
                        detail=(
                            f"section {slug!r} is already marked on cell {seen_sections[slug]!r}"
                        ),
                    )
                )
            else:
                seen_sections[slug] = cell.id
            continue

        if cell.kind != "code":
            continue
        info = cell.metadata.get("model_card")
        meta_stage_raw = info.get("stage") if isinstance(info, dict) else None
        meta_source = info.get("stage_source") if isinstance(info, dict) else None
        meta_stage = _valid_stage(meta_stage_raw) if meta_stage_raw is not None else None
        comment_raw = parse_stage_comment(cell.source)
        comment_stage = _valid_stage(comment_raw) if comment_raw is not None else None

        if meta_stage_raw is not None and meta_stage is None:
            issues.append(
                TraceIssue(
                    kind="dangling_link",
                    cell_id=cell.id,
                    detail=f"stage metadata names unknown stage {meta_stage_raw!r}",
                )
            )
        if meta_stage_raw is not None and meta_source not in ASSIGNMENT_SOURCES:
            issues.append(
                TraceIssue(
                    kind="dangling_link",
                    cell_id=cell.id,
                    detail=f"stage metadata has invalid source {meta_source!r}",
                )
            )
        if comment_raw is not None and comment_stage is None:
            issues.append(
                TraceIssue(
                    kind="dangling_link",
                    cell_id=cell.id,
                    detail=f"stage comment names unknown stage {comment_raw!r}",
                )
            )
            continue  # cannot meaningfully compare against metadata

        if meta_stage is not None and comment_stage is None:
            issues.append(
                TraceIssue(
                    kind="comment_metadata_mismatch",
                    cell_id=cell.id,
                    detail=f"metadata says {meta_stage!r} but the cell has no stage comment",
                )
            )
        elif comment_stage is not None and meta_stage is None and meta_stage_raw is None:
            issues.append(
                TraceIssue(
                    kind="comment_metadata_mismatch",
                    cell_id=cell.id,
                    detail=f"stage comment says {comment_stage!r} but metadata has no stage",
                )
            )
        elif (
            meta_stage is not None
            and comment_stage is not None
            and meta_stage != comment_stage
        ):
            issues.append(
                TraceIssue(
                    kind="comment_metadata_mismatch",
                    cell_id=cell.id,
                    detail=(
                        f"stage comment says {comment_stage!r} but metadata says {meta_stage!r}"
                    ),
                )
            )
    return issues


def issues_to_json_obj(issues: list[TraceIssue]) -> list[dict]:
    return [issue.to_json_obj() for issue in issues]
