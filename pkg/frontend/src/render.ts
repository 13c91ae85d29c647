// DOM rendering. Every render function rebuilds its subtree from the view
// model; no incremental patching, so the view can never drift from the
// server state it was fetched from.

import type { NavigationPayload, RubricPayload, SectionSpec } from "./api.js";
import {
  PanelViewModel,
  chipPositionPercent,
  isMissing,
  sectionContent,
  stageLabel,
} from "./model.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface SectionHandlers {
  onEdit(sectionId: string): void;
  onSave(sectionId: string, content: string): void;
  onCancel(): void;
}

export function renderSectionList(
  container: HTMLElement,
  model: PanelViewModel,
  handlers: SectionHandlers,
): void {
  container.textContent = "";
  if (model.sections.length === 0) {
    container.appendChild(el("p", "empty-state", "No sections configured."));
    return;
  }
  for (const spec of model.sections) {
    const row = el("section", "section-row");
    row.dataset.sectionId = spec.id;

    const header = el("div", "section-header");
    const title = el("span", "section-title", spec.title);
    // Hovering the title reveals the section description.
    title.title = spec.description;
    header.appendChild(title);
    if (isMissing(model, spec.id)) {
      header.appendChild(el("span", "badge badge-missing", "empty"));
    }
    for (const url of spec.examples) {
      const link = el("a", "example-link", "example");
      link.href = url;
      link.target = "_blank";
      link.rel = "noopener";
      header.appendChild(link);
    }
    const edit = el("button", "edit-button", "edit");
    edit.addEventListener("click", () => handlers.onEdit(spec.id));
    header.appendChild(edit);
    row.appendChild(header);

    if (model.editing === spec.id) {
      const editor = el("textarea", "section-editor");
      editor.value = sectionContent(model, spec.id);
      const save = el("button", "save-button", "save");
      save.addEventListener("click", () => handlers.onSave(spec.id, editor.value));
      const cancel = el("button", "cancel-button", "cancel");
      cancel.addEventListener("click", () => handlers.onCancel());
      row.append(editor, save, cancel);
    } else {
      const body = sectionContent(model, spec.id);
      row.appendChild(el("div", "section-preview", body || "(empty)"));
    }
    container.appendChild(row);
  }
}

export function renderExportDialog(
  container: HTMLElement,
  sections: SectionSpec[],
  emptySections: string[],
  onConfirm: () => void,
  onCancel: () => void,
): void {
  container.textContent = "";
  const dialog = el("div", "export-dialog");
  dialog.appendChild(el("p", "dialog-text", "These sections are still empty:"));
  const list = el("ul", "dialog-empty-sections");
  for (const spec of sections) {
    if (emptySections.includes(spec.id)) {
      const item = el("li", "dialog-empty-section", spec.title);
      item.dataset.sectionId = spec.id;
      list.appendChild(item);
    }
  }
  dialog.appendChild(list);
  const confirm = el("button", "dialog-confirm", "export anyway");
  confirm.addEventListener("click", onConfirm);
  const cancel = el("button", "dialog-cancel", "keep writing");
  cancel.addEventListener("click", onCancel);
  dialog.append(confirm, cancel);
  container.appendChild(dialog);
}

export function renderNavigationBar(
  container: HTMLElement,
  navigation: NavigationPayload,
  onJump: (cellId: string) => void,
): void {
  container.textContent = "";
  const stages = Object.keys(navigation.stages);
  if (stages.length === 0) {
    container.hidden = true;
    return;
  }
  container.hidden = false;
  for (const stage of stages) {
    const row = el("div", "nav-stage");
    row.dataset.stage = stage;
    row.appendChild(el("span", "nav-stage-label", stageLabel(stage)));
    const bar = el("div", "nav-bar");
    for (const entry of navigation.stages[stage] ?? []) {
      const chip = el("button", "nav-chip");
      chip.dataset.cellId = entry.cell_id;
      chip.style.left = `${chipPositionPercent(entry.fraction)}%`;
      chip.title = entry.cell_id;
      chip.addEventListener("click", () => onJump(entry.cell_id));
      bar.appendChild(chip);
    }
    row.appendChild(bar);
    container.appendChild(row);
  }
}

export function renderRubric(container: HTMLElement, rubric: RubricPayload): void {
  container.textContent = "";
  const table = el("table", "rubric-table");
  for (const answer of rubric.answers) {
    const row = el("tr", `rubric-row rubric-${answer.value}`);
    row.dataset.questionId = answer.id;
    row.appendChild(el("td", "rubric-id", answer.id));
    row.appendChild(el("td", "rubric-value", answer.value));
    row.appendChild(el("td", "rubric-source", answer.source));
    table.appendChild(row);
  }
  container.appendChild(table);
}

export function renderConflictBanner(container: HTMLElement, onReload: () => void): void {
  container.textContent = "";
  const banner = el("div", "conflict-banner");
  banner.appendChild(
    el("span", "conflict-text", "The notebook changed on disk. Reload to continue."),
  );
  const reload = el("button", "conflict-reload", "reload");
  reload.addEventListener("click", onReload);
  banner.appendChild(reload);
  container.appendChild(banner);
}
