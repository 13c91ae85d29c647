"""Local HTTP API for the browser panel.

The notebook file is the only store: every request re-reads it, every
mutation writes it back, and optimistic concurrency (content hashes)
keeps concurrent editors from trampling each other. Mutations of the
same notebook are serialized; nothing outside ``notebook_root`` is ever
touched.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import replace as dc_replace
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from . import card as card_mod
from . import codeview, rubric, trace
from .errors import (
    ConfigSchemaError,
    MalformedJson,
    MissingCellsArray,
    NbModelCardError,
    UnknownCellId,
    UnsupportedFormat,
)
from .notebook import Notebook, parse_notebook, serialize_notebook

CONFIG_FILENAME = "modelcard.config.json"

_FALLBACK_PANEL = """<!doctype html>
<html><head><meta charset="utf-8"><title>model card panel</title></head>
<body><h1>Panel assets not installed</h1>
<p>Start the service with <code>--panel-dir</code> pointing at the built
panel, or use the JSON API under <code>/api/</code> directly.</p>
</body></html>"""


class SectionBody(BaseModel):
    content: str
    base_hash: str | None = None


class ExportBody(BaseModel):
    path: str


class StageBody(BaseModel):
    stage: str
    base_hash: str | None = None


class DetectBody(BaseModel):
    base_hash: str | None = None


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class NotebookStore:
    """Path resolution and hash-checked file access under one root."""

    def __init__(self, root: Path):
        self.root = root.resolve()
        self._locks: dict[Path, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, path: Path) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(path, threading.Lock())

    def resolve(self, relative: str, must_exist: bool = True) -> Path:
        candidate = Path(relative)
        if candidate.is_absolute() or ".." in candidate.parts:
            raise HTTPException(status_code=403, detail="path escapes the notebook root")
        full = (self.root / candidate).resolve()
        if full != self.root and self.root not in full.parents:
            raise HTTPException(status_code=403, detail="path escapes the notebook root")
        if must_exist and not full.is_file():
            raise HTTPException(status_code=404, detail=f"no such notebook: {relative}")
        return full

    def read(self, path: Path) -> tuple[Notebook, str]:
        data = path.read_bytes()
        return parse_notebook(data), _sha(data)

    def mutate(
        self,
        path: Path,
        base_hash: str | None,
        fn: Callable[[Notebook], tuple[object, Notebook]],
    ) -> tuple[object, str]:
        """Apply ``fn`` and write back, unless the file moved under us.

        The precondition hash is the client-supplied ``base_hash`` when
        given, otherwise the hash read at the start of this call; the
        check-and-write is atomic per notebook path.
        """
        data = path.read_bytes()
        expected = base_hash or _sha(data)
        result, updated = fn(parse_notebook(data))
        output = serialize_notebook(updated)
        with self._lock_for(path):
            if _sha(path.read_bytes()) != expected:
                raise HTTPException(
                    status_code=409,
                    detail="notebook changed since it was last read; reload and retry",
                )
            path.write_bytes(output)
        return result, _sha(output)


def _rubric_answers(nb: Notebook) -> dict:
    info = nb.metadata.get("model_card")
    answers = info.get("rubric_answers") if isinstance(info, dict) else None
    return dict(answers) if isinstance(answers, dict) else {}


def create_app(
    notebook_root: Path,
    config_path: Path | None = None,
    panel_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="nbmodelcard service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = NotebookStore(notebook_root)

    def template() -> card_mod.CardTemplate:
        path = config_path
        if path is None:
            candidate = store.root / CONFIG_FILENAME
            path = candidate if candidate.exists() else None
        if path is None:
            return card_mod.default_template()
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ConfigSchemaError(f"cannot read configuration {path}: {exc}") from None
        return card_mod.load_template(data)

    @app.exception_handler(NbModelCardError)
    async def _domain_error(request, exc: NbModelCardError):  # noqa: ARG001
        from fastapi.responses import JSONResponse

        if isinstance(exc, ConfigSchemaError):
            status = 500
        elif isinstance(exc, (MalformedJson, UnsupportedFormat, MissingCellsArray)):
            status = 500  # the on-disk notebook is unreadable
        elif isinstance(exc, UnknownCellId):
            status = 404
        else:
            status = 422
        name = type(exc).__name__
        return JSONResponse(status_code=status, content={"detail": f"{name}: {exc}"})

    @app.get("/api/template")
    def get_template():
        return {"sections": template().to_json_obj()}

    @app.get("/api/card")
    def get_card(nb: str = Query(...)):
        path = store.resolve(nb)
        notebook, file_hash = store.read(path)
        tpl = template()
        document = card_mod.extract_card(notebook, tpl)
        return {
            **document.to_json_obj(),
            "missing": card_mod.completion_check(document, tpl),
            "file_hash": file_hash,
        }

    @app.put("/api/card/sections/{section_id}")
    def put_section(section_id: str, body: SectionBody, nb: str = Query(...)):
        path = store.resolve(nb)
        tpl = template()

        def apply(notebook: Notebook):
            updated, cell_id = card_mod.upsert_section(notebook, tpl, section_id, body.content)
            return cell_id, updated

        cell_id, file_hash = store.mutate(path, body.base_hash, apply)
        return {"cell_id": cell_id, "file_hash": file_hash}

    @app.post("/api/card/export")
    def post_export(body: ExportBody, nb: str = Query(...)):
        path = store.resolve(nb)
        if not body.path.strip():
            raise HTTPException(status_code=422, detail="export path must not be empty")
        out_path = store.resolve(body.path, must_exist=False)
        if out_path.is_dir() or not out_path.parent.is_dir():
            raise HTTPException(status_code=422, detail=f"cannot write to {body.path!r}")
        notebook, _ = store.read(path)
        tpl = template()
        document = card_mod.extract_card(notebook, tpl)
        missing = card_mod.completion_check(document, tpl)
        out_path.write_bytes(card_mod.export_card(document, tpl))
        return {"written": str(out_path.relative_to(store.root)), "empty_sections": missing}

    @app.get("/api/stages")
    def get_stages(nb: str = Query(...)):
        path = store.resolve(nb)
        notebook, file_hash = store.read(path)
        assignments = codeview.stored_assignments(notebook)
        return {"assignments": [a.to_json_obj() for a in assignments], "file_hash": file_hash}

    @app.post("/api/stages/detect")
    def post_detect(body: DetectBody | None = None, nb: str = Query(...)):
        path = store.resolve(nb)

        def apply(notebook: Notebook):
            prior = [a for a in codeview.stored_assignments(notebook) if a.source == "manual"]
            assignments = codeview.detect_stages(notebook, prior=prior)
            for a in assignments:
                if a.source == "manual":
                    continue
                if a.stage is not None:
                    notebook = codeview.write_stage_comment(
                        notebook, a.cell_id, a.stage, source=a.source
                    )
                else:
                    notebook = codeview.clear_stage(notebook, a.cell_id)
            return assignments, notebook

        assignments, file_hash = store.mutate(path, body.base_hash if body else None, apply)
        return {"assignments": [a.to_json_obj() for a in assignments], "file_hash": file_hash}

    @app.put("/api/stages/{cell_id}")
    def put_stage(cell_id: str, body: StageBody, nb: str = Query(...)):
        path = store.resolve(nb)
        stage = codeview.coerce_stage(body.stage)  # 422 on unknown stage

        def apply(notebook: Notebook):
            updated = codeview.write_stage_comment(notebook, cell_id, stage, source="manual")
            return None, updated

        _, file_hash = store.mutate(path, body.base_hash, apply)
        return {
            "cell_id": cell_id,
            "stage": stage.value,
            "source": "manual",
            "file_hash": file_hash,
        }

    @app.get("/api/navigation")
    def get_navigation(nb: str = Query(...)):
        path = store.resolve(nb)
        notebook, _ = store.read(path)
        return trace.build_navigation(notebook).to_json_obj()

    @app.get("/api/trace")
    def get_trace(nb: str = Query(...)):
        path = store.resolve(nb)
        notebook, _ = store.read(path)
        issues = trace.check_trace_integrity(notebook, template())
        return {"issues": trace.issues_to_json_obj(issues)}

    @app.get("/api/rubric")
    def get_rubric(nb: str = Query(...)):
        path = store.resolve(nb)
        notebook, _ = store.read(path)
        tpl = template()
        document = card_mod.extract_card(notebook, tpl)
        markdown = card_mod.export_card(document, tpl).decode("utf-8")
        report = rubric.assess(markdown, _rubric_answers(notebook), target=f"{nb}#card")
        return report.to_json_obj()

    @app.put("/api/rubric/answers")
    async def put_rubric_answers(request: Request, nb: str = Query(...)):
        path = store.resolve(nb)
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be valid JSON") from None
        answers = body.get("answers") if isinstance(body, dict) else None
        if not isinstance(answers, dict):
            raise HTTPException(status_code=400, detail="body must carry an 'answers' object")
        for question_id, value in answers.items():
            if question_id not in rubric.QUESTION_BY_ID or value not in rubric.ANSWER_VALUES:
                raise HTTPException(
                    status_code=400, detail=f"invalid answer {question_id!r}: {value!r}"
                )
        base_hash = body.get("base_hash")
        if base_hash is not None and not isinstance(base_hash, str):
            raise HTTPException(status_code=400, detail="base_hash must be a string")

        def apply(notebook: Notebook):
            metadata = dict(notebook.metadata)
            info = dict(metadata.get("model_card") or {})
            stored = dict(info.get("rubric_answers") or {})
            for question_id, value in answers.items():
                if value == "unanswered":
                    stored.pop(question_id, None)
                else:
                    stored[question_id] = value
            if stored:
                info["rubric_answers"] = stored
            else:
                info.pop("rubric_answers", None)
            if info:
                metadata["model_card"] = info
            else:
                metadata.pop("model_card", None)
            return len(stored), dc_replace(notebook, metadata=metadata)

        stored_count, file_hash = await run_in_threadpool(store.mutate, path, base_hash, apply)
        return {"stored": stored_count, "file_hash": file_hash}

    @app.get("/")
    def root_redirect():
        return RedirectResponse(url="/panel/")

    if panel_dir is not None and panel_dir.is_dir():
        app.mount("/panel", StaticFiles(directory=panel_dir, html=True), name="panel")
    else:

        @app.get("/panel/", response_class=HTMLResponse)
        def panel_placeholder():
            return _FALLBACK_PANEL

    return app
