"""Static views of notebook code cells.

Everything here is lexical (token-level): imports, top-level assignment
targets, identifier references, and dotted call expressions. That keeps
the analysis robust on partial or broken cells at the cost of precision;
full grammar analysis of the user's code is deliberately out of scope.
"""

from __future__ import annotations

import io
import json
import keyword
import tokenize
from dataclasses import dataclass, replace as dc_replace
from enum import Enum
from importlib import resources

from .errors import ConfigSchemaError, NotACodeCell, UnknownCellId, UnknownStage
from .notebook import Cell, Notebook, find_cell, replace_cell


class Stage(str, Enum):
    """The six pipeline stages, in pipeline order."""

    DATA_COLLECTION = "data_collection"
    DATA_CLEANING = "data_cleaning"
    PREPROCESSING = "preprocessing"
    HYPERPARAMETER_TUNING = "hyperparameter_tuning"
    MODEL_TRAINING = "model_training"
    MODEL_EVALUATION = "model_evaluation"


_PIPELINE_ORDER = {stage: i for i, stage in enumerate(Stage)}

STAGE_COMMENT_PREFIX = "# ml-stage:"

ASSIGNMENT_SOURCES = ("auto_kb", "auto_propagated", "manual")

_PLOTTING_MODULE_PREFIXES = ("matplotlib", "plotly", "seaborn")


def coerce_stage(value) -> Stage:
    if isinstance(value, Stage):
        return value
    try:
        return Stage(value)
    except ValueError:
        raise UnknownStage(f"unknown stage {value!r}") from None


def stage_comment_line(stage: Stage) -> str:
    return f"{STAGE_COMMENT_PREFIX} {stage.value}"


def parse_stage_comment(source: str) -> str | None:
    """Raw stage text of the first ``# ml-stage:`` line, or None."""
    for line in source.split("\n"):
        if line.startswith(STAGE_COMMENT_PREFIX):
            return line[len(STAGE_COMMENT_PREFIX) :].strip()
    return None


# ---------------------------------------------------------------------------
# Token-level cell analysis


@dataclass(frozen=True)
class CellCodeView:
    """Lexical summary of one code cell."""

    imports: tuple[tuple[str, str], ...]  # (local name, fully qualified path)
    defs: tuple[str, ...]
    uses: tuple[str, ...]  # first-use order, names not defined earlier in the cell
    calls: tuple[str, ...]  # dotted call expressions as written


_AUG_OPS = frozenset(
    {"+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@="}
)
_OPEN = frozenset("([{")
_CLOSE = frozenset(")]}")


def _effective_source(source: str) -> str:
    # Blank out IPython magics, shell escapes, and help lines so the
    # tokenizer sees plain Python; a %% cell magic empties the whole cell.
    lines = source.split("\n")
    if lines and lines[0].lstrip().startswith("%%"):
        return "\n".join([""] * len(lines))
    kept = []
    for line in lines:
        if line.lstrip().startswith(("%", "!", "?")):
            kept.append("")
        else:
            kept.append(line)
    return "\n".join(kept)


def _logical_lines(text: str) -> list[list[tokenize.TokenInfo]]:
    groups: list[list[tokenize.TokenInfo]] = []
    current: list[tokenize.TokenInfo] = []
    skip = (
        tokenize.COMMENT,
        tokenize.NL,
        tokenize.INDENT,
        tokenize.DEDENT,
        tokenize.ENCODING,
        tokenize.ENDMARKER,
        tokenize.ERRORTOKEN,
    )
    try:
        for tok in tokenize.generate_tokens(io.StringIO(text).readline):
            if tok.type in skip:
                continue
            if tok.type == tokenize.NEWLINE:
                if current:
                    groups.append(current)
                    current = []
                continue
            current.append(tok)
    except (tokenize.TokenError, IndentationError, SyntaxError):
        pass  # keep the logical lines seen before the failure
    if current:
        groups.append(current)
    return groups


def _is_name(tok: tokenize.TokenInfo) -> bool:
    return tok.type == tokenize.NAME and not keyword.iskeyword(tok.string)


def _uses_in(tokens: list[tokenize.TokenInfo]) -> list[str]:
    uses = []
    depth = 0
    for i, tok in enumerate(tokens):
        if tok.type == tokenize.OP:
            if tok.string in _OPEN:
                depth += 1
            elif tok.string in _CLOSE:
                depth -= 1
            continue
        if not _is_name(tok):
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if prev is not None and prev.type == tokenize.OP and prev.string == ".":
            continue  # attribute; the chain root is the reference
        if depth > 0 and nxt is not None and nxt.type == tokenize.OP and nxt.string == "=":
            continue  # keyword argument name
        uses.append(tok.string)
    return uses


def _targets_in(tokens: list[tokenize.TokenInfo]) -> tuple[list[str], list[str]]:
    # Assignment target segment: plain depth-0 names bind; names used for
    # attribute or subscript stores (obj.a = .., d[k] = ..) are references.
    targets: list[str] = []
    uses: list[str] = []
    depth = 0
    annotated = False
    for i, tok in enumerate(tokens):
        if tok.type == tokenize.OP:
            if tok.string in _OPEN:
                depth += 1
            elif tok.string in _CLOSE:
                depth -= 1
            elif tok.string == ":" and depth == 0:
                annotated = True  # the rest is a type annotation
            continue
        if not _is_name(tok):
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if prev is not None and prev.type == tokenize.OP and prev.string == ".":
            continue
        accesses = nxt is not None and nxt.type == tokenize.OP and nxt.string in (".", "[", "(")
        if annotated or depth > 0 or accesses:
            uses.append(tok.string)
        else:
            targets.append(tok.string)
    return targets, uses


def _split_on_assignment(
    tokens: list[tokenize.TokenInfo],
) -> tuple[list[list[tokenize.TokenInfo]], list[tokenize.TokenInfo], bool]:
    """(target segments, rhs tokens, is_augmented); empty segments when no assignment."""
    depth = 0
    eq_indices: list[int] = []
    aug_index: int | None = None
    for i, tok in enumerate(tokens):
        if tok.type != tokenize.OP:
            continue
        if tok.string in _OPEN:
            depth += 1
        elif tok.string in _CLOSE:
            depth -= 1
        elif depth == 0:
            if tok.string == "=":
                eq_indices.append(i)
            elif tok.string in _AUG_OPS and aug_index is None:
                aug_index = i
    if aug_index is not None and (not eq_indices or aug_index < eq_indices[0]):
        return [tokens[:aug_index]], tokens[aug_index + 1 :], True
    if eq_indices:
        segments = []
        start = 0
        for idx in eq_indices:
            segments.append(tokens[start:idx])
            start = idx + 1
        return segments, tokens[start:], False
    return [], tokens, False


def _parse_import_bindings(tokens: list[tokenize.TokenInfo]) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    n = len(tokens)

    def dotted(start: int) -> tuple[str | None, int]:
        if start >= n or tokens[start].type != tokenize.NAME:
            return None, start
        parts = [tokens[start].string]
        i = start + 1
        while (
            i + 1 < n
            and tokens[i].type == tokenize.OP
            and tokens[i].string == "."
            and tokens[i + 1].type == tokenize.NAME
        ):
            parts.append(tokens[i + 1].string)
            i += 2
        return ".".join(parts), i

    if tokens[0].string == "import":
        i = 1
        while i < n:
            module, i = dotted(i)
            if module is None:
                break
            if i < n and tokens[i].type == tokenize.NAME and tokens[i].string == "as":
                if i + 1 < n and tokens[i + 1].type == tokenize.NAME:
                    out.append((tokens[i + 1].string, module))
                    i += 2
                else:
                    break
            else:
                root = module.split(".", 1)[0]
                out.append((root, root))
            if i < n and tokens[i].type == tokenize.OP and tokens[i].string == ",":
                i += 1
            else:
                break
        return out

    # from M import N [as A][, ...]
    if n > 1 and tokens[1].type == tokenize.OP and tokens[1].string in (".", "..."):
        return []  # relative import: nothing resolvable
    module, i = dotted(1)
    if module is None or i >= n or tokens[i].string != "import":
        return []
    i += 1
    while i < n:
        tok = tokens[i]
        if tok.type == tokenize.OP and tok.string in ("(", ")", ",", "*"):
            i += 1
            continue
        if tok.type != tokenize.NAME:
            break
        name = tok.string
        i += 1
        local = name
        if i < n and tokens[i].type == tokenize.NAME and tokens[i].string == "as":
            if i + 1 < n and tokens[i + 1].type == tokenize.NAME:
                local = tokens[i + 1].string
                i += 2
            else:
                break
        out.append((local, f"{module}.{name}"))
    return out


def _calls_in(groups: list[list[tokenize.TokenInfo]]) -> list[str]:
    calls = []
    for tokens in groups:
        n = len(tokens)
        i = 0
        while i < n:
            tok = tokens[i]
            if not _is_name(tok):
                i += 1
                continue
            prev = tokens[i - 1] if i > 0 else None
            if prev is not None and prev.type == tokenize.NAME and prev.string in ("def", "class"):
                i += 1
                continue
            if prev is not None and prev.type == tokenize.OP and prev.string == ".":
                i += 1
                continue
            parts = [tok.string]
            j = i
            while (
                j + 2 < n
                and tokens[j + 1].type == tokenize.OP
                and tokens[j + 1].string == "."
                and tokens[j + 2].type == tokenize.NAME
            ):
                parts.append(tokens[j + 2].string)
                j += 2
            nxt = tokens[j + 1] if j + 1 < n else None
            if nxt is not None and nxt.type == tokenize.OP and nxt.string == "(":
                calls.append(".".join(parts))
            i = j + 1
        # fallthrough: continue with next group
    return calls


def analyze_code(source: str) -> CellCodeView:
    """Lexical imports/defs/uses/calls of one code cell's source."""
    groups = _logical_lines(_effective_source(source))
    imports: list[tuple[str, str]] = []
    defs: list[str] = []
    uses: list[str] = []
    local: set[str] = set()

    def note_uses(names: list[str]) -> None:
        for name in names:
            if name not in local and name not in uses:
                uses.append(name)

    def note_defs(names: list[str]) -> None:
        for name in names:
            local.add(name)
            if name not in defs:
                defs.append(name)

    for tokens in groups:
        head = tokens[0]
        top_level = head.start[1] == 0
        word = head.string if head.type == tokenize.NAME else None
        if word == "async" and len(tokens) > 1 and tokens[1].string == "def":
            tokens = tokens[1:]
            head, word = tokens[0], "def"

        if word in ("import", "from"):
            if top_level:
                bindings = _parse_import_bindings(tokens)
                imports.extend(bindings)
                note_defs([local_name for local_name, _ in bindings])
            continue
        if word in ("def", "class"):
            name_tok = tokens[1] if len(tokens) > 1 and tokens[1].type == tokenize.NAME else None
            if word == "class":
                note_uses(_uses_in(tokens[2:]))
            if top_level and name_tok is not None:
                note_defs([name_tok.string])
            continue
        if word == "for":
            in_index = None
            depth = 0
            for i, tok in enumerate(tokens):
                if tok.type == tokenize.OP:
                    if tok.string in _OPEN:
                        depth += 1
                    elif tok.string in _CLOSE:
                        depth -= 1
                elif tok.type == tokenize.NAME and tok.string == "in" and depth == 0:
                    in_index = i
                    break
            if in_index is None:
                note_uses(_uses_in(tokens[1:]))
                continue
            targets, target_uses = _targets_in(tokens[1:in_index])
            note_uses(target_uses)
            note_uses(_uses_in(tokens[in_index + 1 :]))
            if top_level:
                note_defs(targets)
            continue

        segments, rhs, augmented = _split_on_assignment(tokens)
        if not segments:
            note_uses(_uses_in(tokens))
            continue
        seg_targets: list[str] = []
        for segment in segments:
            targets, target_uses = _targets_in(segment)
            seg_targets.extend(targets)
            note_uses(target_uses)
        if augmented:
            note_uses(seg_targets)  # augmented assignment reads its target
        note_uses(_uses_in(rhs))
        if top_level:
            note_defs(seg_targets)

    return CellCodeView(
        imports=tuple(imports),
        defs=tuple(defs),
        uses=tuple(uses),
        calls=tuple(_calls_in(groups)),
    )


# ---------------------------------------------------------------------------
# Import alias resolution


@dataclass(frozen=True)
class AliasTable:
    """Local name -> fully qualified path, accumulated in document order."""

    by_cell: dict  # cell id -> bindings visible at that cell (own imports included)
    final: dict

    def bindings(self, cell_id: str) -> dict:
        return self.by_cell.get(cell_id, {})

    def resolve(self, cell_id: str, dotted: str) -> str | None:
        """Alias-resolve the root of a dotted name; None when the root is unbound."""
        root, _, rest = dotted.partition(".")
        bound = self.bindings(cell_id).get(root)
        if bound is None:
            return None
        return f"{bound}.{rest}" if rest else bound


def scan_imports(nb: Notebook, views: dict | None = None) -> AliasTable:
    """Import bindings per code cell; later imports shadow earlier ones."""
    views = views or {c.id: analyze_code(c.source) for c in nb.code_cells()}
    accumulated: dict[str, str] = {}
    by_cell: dict[str, dict[str, str]] = {}
    for cell in nb.code_cells():
        for local_name, fqn in views[cell.id].imports:
            accumulated[local_name] = fqn
        by_cell[cell.id] = dict(accumulated)
    return AliasTable(by_cell=by_cell, final=dict(accumulated))


# ---------------------------------------------------------------------------
# Cross-cell dependency graph


@dataclass(frozen=True)
class DependencyEdge:
    from_cell: str
    to_cell: str
    name: str


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]  # code cell ids, document order
    edges: tuple[DependencyEdge, ...]

    def predecessors(self, cell_id: str) -> list[str]:
        seen: list[str] = []
        for edge in self.edges:
            if edge.to_cell == cell_id and edge.from_cell not in seen:
                seen.append(edge.from_cell)
        return seen

    def to_json_obj(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [
                {"from": e.from_cell, "to": e.to_cell, "name": e.name} for e in self.edges
            ],
        }


def build_dependency_graph(nb: Notebook, views: dict | None = None) -> DependencyGraph:
    """Approximate def/use edges between code cells.

    An edge (c1, c2, x) means c2 references x and c1 holds the most recent
    prior definition of x in document order. Edges always point forward.
    """
    views = views or {c.id: analyze_code(c.source) for c in nb.code_cells()}
    last_def: dict[str, str] = {}
    edges: list[DependencyEdge] = []
    nodes: list[str] = []
    for cell in nb.code_cells():
        nodes.append(cell.id)
        view = views[cell.id]
        for name in view.uses:
            origin = last_def.get(name)
            if origin is not None and origin != cell.id:
                edges.append(DependencyEdge(from_cell=origin, to_cell=cell.id, name=name))
        for name in view.defs:
            last_def[name] = cell.id
    return DependencyGraph(nodes=tuple(nodes), edges=tuple(edges))


# ---------------------------------------------------------------------------
# Knowledge base and stage detection


@dataclass(frozen=True)
class KbEntry:
    module: str  # module path prefix
    callable: str  # callable name, optionally with a trailing *
    stage: Stage


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple[KbEntry, ...]


def load_knowledge_base(data: bytes) -> KnowledgeBase:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigSchemaError(f"knowledge base is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ConfigSchemaError("knowledge base must be a JSON array")
    entries: list[KbEntry] = []
    seen = set()
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            raise ConfigSchemaError(f"knowledge base entry {i} must be an object")
        module = item.get("module")
        callable_pattern = item.get("callable")
        stage_name = item.get("stage")
        if not isinstance(module, str) or not isinstance(callable_pattern, str):
            raise ConfigSchemaError(f"knowledge base entry {i}: module and callable required")
        try:
            stage = coerce_stage(stage_name)
        except UnknownStage as exc:
            raise ConfigSchemaError(f"knowledge base entry {i}: {exc}") from None
        key = (module, callable_pattern, stage)
        if key in seen:
            continue  # identical duplicates are collapsed
        seen.add(key)
        entries.append(KbEntry(module=module, callable=callable_pattern, stage=stage))
    return KnowledgeBase(entries=tuple(entries))


def default_knowledge_base() -> KnowledgeBase:
    data = resources.files("nbmodelcard").joinpath("data/stage-kb.json").read_bytes()
    return load_knowledge_base(data)


def _pattern_matches(pattern: str, name: str) -> bool:
    if pattern.endswith("*"):
        return name.startswith(pattern[:-1])
    return name == pattern


def _is_plotting(entry: KbEntry) -> bool:
    return entry.module.startswith(_PLOTTING_MODULE_PREFIXES)


def _match_qualified(kb: KnowledgeBase, qualified: str) -> list[KbEntry]:
    if "." not in qualified:
        return []
    _, last = qualified.rsplit(".", 1)
    return [
        entry
        for entry in kb.entries
        if qualified.startswith(entry.module + ".") and _pattern_matches(entry.callable, last)
    ]


def _match_unqualified(kb: KnowledgeBase, name: str) -> list[KbEntry]:
    # A bare "*" pattern only matches through a verified module path;
    # letting it match arbitrary method names would label everything.
    return [
        entry
        for entry in kb.entries
        if entry.callable != "*" and _pattern_matches(entry.callable, name)
    ]


@dataclass(frozen=True)
class StageAssignment:
    cell_id: str
    stage: Stage | None
    source: str | None  # auto_kb | auto_propagated | manual
    matched_calls: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {
            "cell_id": self.cell_id,
            "stage": self.stage.value if self.stage else None,
            "source": self.source,
            "matched_calls": list(self.matched_calls),
        }


def detect_stages(
    nb: Notebook,
    kb: KnowledgeBase | None = None,
    prior: tuple[StageAssignment, ...] | list[StageAssignment] = (),
) -> list[StageAssignment]:
    """Assign a pipeline stage to every code cell where the evidence allows.

    Knowledge-base matches win; when matches map to several stages the
    latest pipeline stage is chosen, except that plotting calls only count
    when nothing else matched. Unmatched cells inherit a stage when all
    their stage-carrying dependency predecessors agree. Manual assignments
    in ``prior`` are preserved verbatim and never recomputed.
    """
    kb = kb if kb is not None else default_knowledge_base()
    code_cells = nb.code_cells()
    views = {c.id: analyze_code(c.source) for c in code_cells}
    aliases = scan_imports(nb, views)
    graph = build_dependency_graph(nb, views)
    manual = {a.cell_id: a for a in prior if a.source == "manual"}

    assigned: dict[str, StageAssignment] = {}
    for cell in code_cells:
        if cell.id in manual:
            assigned[cell.id] = manual[cell.id]
            continue
        main_stages: list[Stage] = []
        plot_stages: list[Stage] = []
        matched: list[str] = []
        for call in views[cell.id].calls:
            resolved = aliases.resolve(cell.id, call)
            if resolved is not None:
                hits = _match_qualified(kb, resolved)
                display = resolved
            else:
                hits = _match_unqualified(kb, call.rsplit(".", 1)[-1])
                display = call
            if not hits:
                continue
            if display not in matched:
                matched.append(display)
            for entry in hits:
                (plot_stages if _is_plotting(entry) else main_stages).append(entry.stage)

        if main_stages:
            stage = max(main_stages, key=_PIPELINE_ORDER.__getitem__)
            assigned[cell.id] = StageAssignment(cell.id, stage, "auto_kb", tuple(matched))
        elif plot_stages:
            stage = max(plot_stages, key=_PIPELINE_ORDER.__getitem__)
            assigned[cell.id] = StageAssignment(cell.id, stage, "auto_kb", tuple(matched))
        else:
            inherited = {
                assigned[p].stage
                for p in graph.predecessors(cell.id)
                if p in assigned and assigned[p].stage is not None
            }
            if len(inherited) == 1:
                assigned[cell.id] = StageAssignment(
                    cell.id, next(iter(inherited)), "auto_propagated", ()
                )
            else:
                assigned[cell.id] = StageAssignment(cell.id, None, None, ())
    return [assigned[c.id] for c in code_cells]


def stored_assignments(nb: Notebook) -> list[StageAssignment]:
    """Stage assignments currently recorded in cell metadata."""
    out = []
    for cell in nb.code_cells():
        info = cell.metadata.get("model_card")
        stage = None
        source = None
        if isinstance(info, dict):
            raw_stage = info.get("stage")
            raw_source = info.get("stage_source")
            try:
                stage = coerce_stage(raw_stage) if raw_stage is not None else None
            except UnknownStage:
                stage = None
            source = raw_source if raw_source in ASSIGNMENT_SOURCES else None
        out.append(StageAssignment(cell_id=cell.id, stage=stage, source=source))
    return out


def _strip_stage_lines(source: str) -> list[str]:
    return [ln for ln in source.split("\n") if not ln.startswith(STAGE_COMMENT_PREFIX)]


def write_stage_comment(nb: Notebook, cell_id: str, stage, source: str = "manual") -> Notebook:
    """Record a stage on a code cell: first-line comment plus metadata.

    The ``# ml-stage:`` line is replaced, never duplicated, and the
    ``model_card.stage`` / ``model_card.stage_source`` metadata keys are
    updated in the same operation. Idempotent for identical arguments.
    """
    stage = coerce_stage(stage)
    if source not in ASSIGNMENT_SOURCES:
        raise ValueError(f"invalid assignment source {source!r}")
    cell = find_cell(nb, cell_id)
    if cell is None:
        raise UnknownCellId(f"no cell with id {cell_id!r}")
    if cell.kind != "code":
        raise NotACodeCell(f"cell {cell_id!r} is {cell.kind}, not code")

    rest = _strip_stage_lines(cell.source)
    if rest == [""]:  # cell had no body beyond the old comment
        rest = []
    new_source = "\n".join([stage_comment_line(stage)] + rest)

    metadata = dict(cell.metadata)
    info = dict(metadata.get("model_card") or {})
    info["stage"] = stage.value
    info["stage_source"] = source
    metadata["model_card"] = info
    return replace_cell(nb, cell_id, dc_replace(cell, source=new_source, metadata=metadata))


def clear_stage(nb: Notebook, cell_id: str) -> Notebook:
    """Remove a cell's stage comment and stage metadata, if present."""
    cell = find_cell(nb, cell_id)
    if cell is None:
        raise UnknownCellId(f"no cell with id {cell_id!r}")
    if cell.kind != "code":
        raise NotACodeCell(f"cell {cell_id!r} is {cell.kind}, not code")
    new_source = "\n".join(_strip_stage_lines(cell.source))
    metadata = dict(cell.metadata)
    info = dict(metadata.get("model_card") or {})
    info.pop("stage", None)
    info.pop("stage_source", None)
    if info:
        metadata["model_card"] = info
    else:
        metadata.pop("model_card", None)
    if new_source == cell.source and metadata == cell.metadata:
        return nb
    return replace_cell(nb, cell_id, dc_replace(cell, source=new_source, metadata=metadata))
