"""Documentation-quality checklist for model cards.

Twenty-two yes/no questions in seven groups, assessed over a single
markdown document. Where a reliable surface signal exists the answer is
heuristic (a presence check with evidence spans); the rest stay
unanswered until a human supplies the answer. Assessment reads only the
given text: no file or network access, linked resources are out of
bounds.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .card import CardDocument

ANSWER_VALUES = ("yes", "no", "unanswered")

GROUPS = (
    "Model Description",
    "Intended Usages",
    "Target Distribution",
    "Evaluation Metrics",
    "Evaluation Process",
    "Training Process",
    "Ethical Considerations",
)


@dataclass(frozen=True)
class RubricQuestion:
    id: str
    group: str
    title: str
    guidance: str
    auto: bool


QUESTIONS: tuple[RubricQuestion, ...] = (
    RubricQuestion(
        "Q1",
        "Model Description",
        "Contact Information",
        "Does the documentation say how to reach the model's authors or "
        "maintainers, such as an email address or a contact page?",
        True,
    ),
    RubricQuestion(
        "Q2",
        "Model Description",
        "Model Type",
        "Does the documentation state what kind of model this is, such as "
        "its architecture or algorithm family?",
        True,
    ),
    RubricQuestion(
        "Q3",
        "Model Description",
        "Model Date/Version",
        "Does the documentation give a version number or release date for "
        "the model?",
        True,
    ),
    RubricQuestion(
        "Q4",
        "Model Description",
        "Model License",
        "Does the documentation state the license under which the model is "
        "released?",
        True,
    ),
    RubricQuestion(
        "Q5",
        "Intended Usages",
        "Intended Uses",
        "Does the documentation explain scenarios in which to use the model?",
        True,
    ),
    RubricQuestion(
        "Q6",
        "Intended Usages",
        "Out of Scope Uses",
        "Does the documentation describe situations in which the model "
        "should not be used?",
        True,
    ),
    RubricQuestion(
        "Q7",
        "Intended Usages",
        "How to Use",
        "Does the documentation show how to invoke the model, for example a "
        "code or shell snippet?",
        True,
    ),
    RubricQuestion(
        "Q8",
        "Target Distribution",
        "Target Distribution Description",
        "Does the documentation describe the inputs the model is expected "
        "to work on, beyond naming the task?",
        False,
    ),
    RubricQuestion(
        "Q9",
        "Target Distribution",
        "Target Distribution Examples",
        "Does the documentation give concrete examples of inputs the model "
        "handles well or poorly?",
        False,
    ),
    RubricQuestion(
        "Q10",
        "Evaluation Metrics",
        "Evaluation Statistics Reported",
        "Does the documentation report numeric evaluation results, such as "
        "accuracy or F1?",
        True,
    ),
    RubricQuestion(
        "Q11",
        "Evaluation Metrics",
        "Evaluation Statistics Explained",
        "Does the documentation explain why the reported statistics were "
        "chosen or how to interpret them?",
        False,
    ),
    RubricQuestion(
        "Q12",
        "Evaluation Metrics",
        "Model Performance Visuals",
        "Does the documentation include charts or images illustrating model "
        "performance?",
        True,
    ),
    RubricQuestion(
        "Q13",
        "Evaluation Process",
        "Evaluation Process Explained",
        "Does the documentation explain how the evaluation was carried out?",
        False,
    ),
    RubricQuestion(
        "Q14",
        "Evaluation Process",
        "Evaluation Data Explained",
        "Does the documentation describe the data used to evaluate the "
        "model?",
        False,
    ),
    RubricQuestion(
        "Q15",
        "Evaluation Process",
        "Evaluation Data Available",
        "Does the documentation link to or name an obtainable copy of the "
        "evaluation data?",
        True,
    ),
    RubricQuestion(
        "Q16",
        "Training Process",
        "Training Process Explained",
        "Does the documentation explain how the model was trained?",
        False,
    ),
    RubricQuestion(
        "Q17",
        "Training Process",
        "Data Properties Explained",
        "Does the documentation describe properties of the training data, "
        "such as size, composition, or distributions?",
        False,
    ),
    RubricQuestion(
        "Q18",
        "Training Process",
        "Data Collection/Creation Explained",
        "Does the documentation explain how the training data was collected "
        "or created?",
        False,
    ),
    RubricQuestion(
        "Q19",
        "Training Process",
        "Training Data Available",
        "Does the documentation link to or name an obtainable copy of the "
        "training data?",
        True,
    ),
    RubricQuestion(
        "Q20",
        "Ethical Considerations",
        "Ethical Considerations Discussed",
        "Are ethical considerations discussed?",
        True,
    ),
    RubricQuestion(
        "Q21",
        "Ethical Considerations",
        "Ethical Issue Mitigation Process",
        "Does the documentation discuss the process used for considering "
        "ethical issues with the model?",
        False,
    ),
    RubricQuestion(
        "Q22",
        "Ethical Considerations",
        "Concrete Ethical Measurements",
        "Does the documentation provide concrete measurements to support "
        "the discussed ethical considerations?",
        False,
    ),
)

QUESTION_BY_ID = {q.id: q for q in QUESTIONS}


@dataclass(frozen=True)
class RubricAnswer:
    question_id: str
    value: str  # yes | no | unanswered
    source: str  # heuristic | manual
    evidence: tuple[tuple[int, int], ...] = ()  # byte offset spans
    note: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "id": self.question_id,
            "value": self.value,
            "source": self.source,
            "evidence": [list(span) for span in self.evidence],
            "note": self.note,
        }


@dataclass(frozen=True)
class RubricReport:
    target: str
    answers: tuple[RubricAnswer, ...]

    def answer(self, question_id: str) -> RubricAnswer:
        for answer in self.answers:
            if answer.question_id == question_id:
                return answer
        raise KeyError(question_id)

    def groups(self) -> dict:
        """Per-group yes/no/unanswered counts and the yes fraction over answered."""
        out: dict[str, dict] = {}
        for group in GROUPS:
            members = [a for a in self.answers if QUESTION_BY_ID[a.question_id].group == group]
            yes = sum(1 for a in members if a.value == "yes")
            no = sum(1 for a in members if a.value == "no")
            unanswered = len(members) - yes - no
            answered = yes + no
            out[group] = {
                "yes": yes,
                "no": no,
                "unanswered": unanswered,
                "fraction": (yes / answered) if answered else None,
            }
        return out

    def to_json_obj(self) -> dict:
        return {
            "target": self.target,
            "answers": [a.to_json_obj() for a in self.answers],
            "groups": self.groups(),
        }


# ---------------------------------------------------------------------------
# Document scanning


_COMMENT_RE = re.compile(r"<!--.*?-->", re.S)
_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*)$")

Span = tuple[int, int]


@dataclass(frozen=True)
class _Line:
    start: int
    end: int
    text: str
    heading_level: int  # 0 for body lines
    heading_text: str


class _Doc:
    """Char-indexed view of a document with HTML comments masked out."""

    def __init__(self, text: str):
        self.text = text
        self.masked = _COMMENT_RE.sub(lambda m: " " * len(m.group(0)), text)
        self.lines: list[_Line] = []
        offset = 0
        for raw in self.masked.split("\n"):
            match = _HEADING_RE.match(raw)
            level = len(match.group(1)) if match else 0
            heading_text = match.group(2).strip() if match else ""
            self.lines.append(_Line(offset, offset + len(raw), raw, level, heading_text))
            offset += len(raw) + 1

    def body_lines(self) -> Iterable[_Line]:
        return (line for line in self.lines if line.heading_level == 0)

    def headings(self) -> list[tuple[_Line, str]]:
        """(heading line, body text under it, up to the next heading)."""
        found = []
        for i, line in enumerate(self.lines):
            if line.heading_level == 0:
                continue
            body_parts = []
            for follower in self.lines[i + 1 :]:
                if follower.heading_level:
                    break
                body_parts.append(follower.text)
            found.append((line, "\n".join(body_parts)))
        return found

    def find_headings(self, keyword: str) -> list[Span]:
        """Headings whose text contains the keyword and whose body is non-empty."""
        spans = []
        for line, body in self.headings():
            if keyword in line.heading_text.lower() and body.strip():
                spans.append((line.start, line.end))
        return spans

    def find_in_body(self, pattern: re.Pattern) -> list[Span]:
        spans = []
        for line in self.body_lines():
            for match in pattern.finditer(line.text):
                spans.append((line.start + match.start(), line.start + match.end()))
        return spans

    def find_anywhere(self, pattern: re.Pattern) -> list[Span]:
        return [(m.start(), m.end()) for m in pattern.finditer(self.masked)]


_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
_URL_RE = re.compile(r"https?://\S+")
_CONTACT_RE = re.compile(r"\bcontact\b", re.I)
_MODEL_TYPE_RE = re.compile(r"\bmodel\s+type\b|\barchitecture\b", re.I)
_VERSION_KEYWORD_RE = re.compile(r"\bversion\b|\brelease[sd]?\b", re.I)
_VERSION_PATTERN_RE = re.compile(
    r"\bv?\d+\.\d+(?:\.\d+)?\b"  # 1.2 / v2.0.1
    r"|\b\d{4}-\d{2}-\d{2}\b"  # 2024-11-05
    r"|\b(?:jan|feb|mar|apr|may|jun|jul|aug|sep|oct|nov|dec)[a-z]*\.?\s+\d{4}\b"
    r"|\b(?:19|20)\d{2}\b",
    re.I,
)
_SPDX_RE = re.compile(
    r"\b(?:MIT|ISC|Unlicense|Apache-2\.0|BSD-[23]-Clause|"
    r"[AL]?GPL-[23]\.\d(?:-only|-or-later)?|MPL-2\.0|CC0-1\.0|"
    r"CC-BY(?:-[A-Z]{2})*-\d\.\d|OpenRAIL[-A-Za-z]*)\b"
)
_INTENDED_USE_RE = re.compile(r"\bintended\s+us(?:e|es|age|ages)\b", re.I)
_OUT_OF_SCOPE_RE = re.compile(r"\bout[- ]of[- ]scope\b|\bshould\s+not\s+be\s+used\b", re.I)
_FENCE_RE = re.compile(r"^```.*$", re.M)
_CALL_OR_SHELL_RE = re.compile(r"\w+\s*\(|^\s*(?:\$ |pip\s+install\b|python[0-9.]*\s)", re.M)
_METRIC_KEYWORD_RE = re.compile(
    r"\baccuracy\b|\bf1\b|\bprecision\b|\brecall\b|\bauc\b|\bbleu\b|\bperplexity\b", re.I
)
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?%?")
_IMAGE_RE = re.compile(r"!\[[^\]]*\]\([^)]+\)|<img\s")
_MD_LINK_RE = re.compile(r"\[([^\]]*)\]\(([^)]+)\)")
_DATASET_TOKEN_RE = re.compile(r"data|download|zenodo|kaggle", re.I)
_ETHICS_RE = re.compile(r"\bbias(?:es|ed)?\b|\bethic\w*\b|\bfairness\b", re.I)

_METRIC_NUMBER_WINDOW = 60  # max chars between metric keyword and number


def _detect_contact(doc: _Doc) -> list[Span]:
    spans = doc.find_in_body(_EMAIL_RE)
    spans += doc.find_headings("contact")
    for line in doc.body_lines():
        if _CONTACT_RE.search(line.text) and _URL_RE.search(line.text):
            match = _URL_RE.search(line.text)
            spans.append((line.start + match.start(), line.start + match.end()))
    return spans


def _detect_model_type(doc: _Doc) -> list[Span]:
    spans = doc.find_in_body(_MODEL_TYPE_RE)
    spans += doc.find_headings("model type")
    spans += doc.find_headings("architecture")
    return spans


def _detect_version(doc: _Doc) -> list[Span]:
    spans = []
    for line in doc.lines:
        keyword = _VERSION_KEYWORD_RE.search(line.text)
        if not keyword:
            continue
        for match in _VERSION_PATTERN_RE.finditer(line.text):
            gap = min(
                abs(match.start() - keyword.end()), abs(keyword.start() - match.end())
            )
            if gap <= _METRIC_NUMBER_WINDOW:
                start = min(keyword.start(), match.start())
                end = max(keyword.end(), match.end())
                spans.append((line.start + start, line.start + end))
                break
    return spans


def _detect_license(doc: _Doc) -> list[Span]:
    return doc.find_anywhere(_SPDX_RE) + doc.find_headings("license")


def _detect_intended_use(doc: _Doc) -> list[Span]:
    return doc.find_in_body(_INTENDED_USE_RE) + doc.find_headings("intended use")


def _detect_out_of_scope(doc: _Doc) -> list[Span]:
    spans = doc.find_in_body(_OUT_OF_SCOPE_RE)
    spans += doc.find_headings("out of scope")
    spans += doc.find_headings("out-of-scope")
    return spans


def _detect_usage_snippet(doc: _Doc) -> list[Span]:
    spans = []
    fences = list(_FENCE_RE.finditer(doc.masked))
    for opener, closer in zip(fences[::2], fences[1::2]):
        body = doc.masked[opener.end() : closer.start()]
        if _CALL_OR_SHELL_RE.search(body):
            spans.append((opener.start(), closer.end()))
    return spans


def _detect_metric_numbers(doc: _Doc) -> list[Span]:
    spans = []
    for line in doc.lines:
        for keyword in _METRIC_KEYWORD_RE.finditer(line.text):
            for number in _NUMBER_RE.finditer(line.text):
                gap = min(
                    abs(number.start() - keyword.end()),
                    abs(keyword.start() - number.end()),
                )
                if gap <= _METRIC_NUMBER_WINDOW:
                    start = min(keyword.start(), number.start())
                    end = max(keyword.end(), number.end())
                    spans.append((line.start + start, line.start + end))
                    break
    return spans


def _detect_performance_visual(doc: _Doc) -> list[Span]:
    return doc.find_anywhere(_IMAGE_RE)


def _detect_dataset_link(doc: _Doc) -> list[Span]:
    spans = []
    linked_urls: set[str] = set()
    for match in _MD_LINK_RE.finditer(doc.masked):
        anchor, url = match.group(1), match.group(2)
        linked_urls.add(url)
        if _DATASET_TOKEN_RE.search(anchor) or _DATASET_TOKEN_RE.search(url):
            spans.append((match.start(), match.end()))
    for match in _URL_RE.finditer(doc.masked):
        url = match.group(0).rstrip(")].,;:!?\"'")
        if url in linked_urls:
            continue
        if _DATASET_TOKEN_RE.search(url):
            spans.append((match.start(), match.start() + len(url)))
    return spans


def _detect_ethics(doc: _Doc) -> list[Span]:
    spans = doc.find_in_body(_ETHICS_RE)
    for keyword in ("ethic", "bias", "fairness"):
        spans += doc.find_headings(keyword)
    return spans


_DETECTORS = {
    "Q1": _detect_contact,
    "Q2": _detect_model_type,
    "Q3": _detect_version,
    "Q4": _detect_license,
    "Q5": _detect_intended_use,
    "Q6": _detect_out_of_scope,
    "Q7": _detect_usage_snippet,
    "Q10": _detect_metric_numbers,
    "Q12": _detect_performance_visual,
    "Q15": _detect_dataset_link,
    "Q19": _detect_dataset_link,
    "Q20": _detect_ethics,
}

_MAX_EVIDENCE_SPANS = 10


def _char_span_to_bytes(text: str, span: Span) -> Span:
    start = len(text[: span[0]].encode("utf-8"))
    end = start + len(text[span[0] : span[1]].encode("utf-8"))
    return (start, end)


def _dedupe_spans(spans: list[Span]) -> list[Span]:
    out: list[Span] = []
    for span in sorted(spans):
        if span not in out:
            out.append(span)
    return out


def assess(
    document: str,
    manual: Mapping[str, str] | None = None,
    target: str = "document",
) -> RubricReport:
    """Answer all 22 questions against one markdown document.

    Heuristic answers are presence checks with evidence spans (byte
    offsets into the UTF-8 document). Manual overrides always win.
    Deterministic, and reads nothing but the given text.
    """
    manual = manual or {}
    for question_id, value in manual.items():
        if question_id not in QUESTION_BY_ID:
            raise KeyError(f"unknown question id {question_id!r}")
        if value not in ANSWER_VALUES:
            raise ValueError(f"invalid answer {value!r} for {question_id}")

    doc = _Doc(document)
    answers = []
    for question in QUESTIONS:
        if question.id in manual:
            answers.append(
                RubricAnswer(question_id=question.id, value=manual[question.id], source="manual")
            )
            continue
        detector = _DETECTORS.get(question.id)
        if detector is None or not question.auto:
            answers.append(
                RubricAnswer(question_id=question.id, value="unanswered", source="heuristic")
            )
            continue
        spans = _dedupe_spans(detector(doc))[:_MAX_EVIDENCE_SPANS]
        evidence = tuple(_char_span_to_bytes(document, span) for span in spans)
        answers.append(
            RubricAnswer(
                question_id=question.id,
                value="yes" if evidence else "no",
                source="heuristic",
                evidence=evidence,
            )
        )
    return RubricReport(target=target, answers=tuple(answers))


# ---------------------------------------------------------------------------
# Corpus aggregation


@dataclass(frozen=True)
class CorpusResult:
    reports: tuple[RubricReport, ...]
    per_question: dict  # question id -> {"mean": float|None, "answered": int}

    def to_json_obj(self) -> dict:
        return {
            "reports": [r.to_json_obj() for r in self.reports],
            "per_question": self.per_question,
        }

    def to_text_table(self) -> str:
        width = max(len(q.title) for q in QUESTIONS)
        rows = [f"{'question':<6} {'title':<{width}} {'mean':>6} {'answered':>9}"]
        for question in QUESTIONS:
            stats = self.per_question[question.id]
            mean = "-" if stats["mean"] is None else f"{stats['mean']:.2f}"
            rows.append(
                f"{question.id:<6} {question.title:<{width}} {mean:>6} {stats['answered']:>9}"
            )
        return "\n".join(rows)


def assess_corpus(
    documents: Iterable[tuple[str, str]],
    manual: Mapping[str, Mapping[str, str]] | None = None,
) -> CorpusResult:
    """Assess (target, text) documents and average the answers per question.

    Unanswered questions are excluded from both numerator and denominator;
    the answered count is reported alongside each mean. Reports are sorted
    by target so the merged output is deterministic.
    """
    manual = manual or {}
    reports = tuple(
        sorted(
            (assess(text, manual.get(name), target=name) for name, text in documents),
            key=lambda r: r.target,
        )
    )
    per_question = {}
    for question in QUESTIONS:
        values = [
            report.answer(question.id).value
            for report in reports
            if report.answer(question.id).value != "unanswered"
        ]
        yes = sum(1 for v in values if v == "yes")
        per_question[question.id] = {
            "mean": (yes / len(values)) if values else None,
            "answered": len(values),
        }
    return CorpusResult(reports=reports, per_question=per_question)


def report_to_text(report: RubricReport) -> str:
    width = max(len(q.title) for q in QUESTIONS)
    rows = [f"target: {report.target}"]
    for question in QUESTIONS:
        answer = report.answer(question.id)
        rows.append(
            f"{question.id:<4} {question.title:<{width}} {answer.value:<10} [{answer.source}]"
        )
    for group, stats in report.groups().items():
        fraction = "-" if stats["fraction"] is None else f"{stats['fraction']:.2f}"
        rows.append(
            f"group {group}: yes={stats['yes']} no={stats['no']} "
            f"unanswered={stats['unanswered']} fraction={fraction}"
        )
    return "\n".join(rows)


def report_to_json(report: RubricReport) -> str:
    return json.dumps(report.to_json_obj(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Bridging card completion to rubric groups


# Which template sections typically carry the information each group asks for.
GROUP_SECTIONS = {
    "Model Description": ("model-details",),
    "Intended Usages": ("intended-use",),
    "Target Distribution": ("factors",),
    "Evaluation Metrics": ("metrics", "quantitative-analyses"),
    "Evaluation Process": ("evaluation-data",),
    "Training Process": ("training-data",),
    "Ethical Considerations": ("ethical-considerations", "caveats-and-recommendations"),
}


def completion_vs_rubric(card: CardDocument) -> dict:
    """For each rubric group, which of its typical sections are filled.

    Gives a "what to write next" hint: a group is present when all of its
    sections have content, partial when some do, missing when none do.
    """
    filled = {
        entry.section_id for entry in card.entries if entry.content.strip()
    }
    out = {}
    for group in GROUPS:
        sections = GROUP_SECTIONS[group]
        present = [s for s in sections if s in filled]
        missing = [s for s in sections if s not in filled]
        status = "present" if not missing else ("partial" if present else "missing")
        out[group] = {
            "sections": list(sections),
            "present": present,
            "missing": missing,
            "status": status,
        }
    return out
