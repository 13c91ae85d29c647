// Panel bootstrap: fetch everything, render, and refetch after every
// mutation. The server is the single source of truth.

import { ConflictError, PanelApi } from "./api.js";
import { PanelViewModel, emptyViewModel, exportDialogFor, outlineRows } from "./model.js";
import {
  renderConflictBanner,
  renderExportDialog,
  renderNavigationBar,
  renderRubric,
  renderSectionList,
} from "./render.js";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const notebook = params.get("nb") ?? "notebook.ipynb";
  const api = new PanelApi("", notebook);
  const model: PanelViewModel = emptyViewModel();

  async function refresh(): Promise<void> {
    const [template, card, stages, navigation, rubric] = await Promise.all([
      api.getTemplate(),
      api.getCard(),
      api.getStages(),
      api.getNavigation(),
      api.getRubric(),
    ]);
    model.sections = template.sections;
    model.card = card;
    model.stages = stages.assignments;
    model.navigation = navigation;
    model.rubric = rubric;
    render();
  }

  function render(): void {
    byId("notebook-name").textContent = notebook;
    renderSectionList(byId("sections"), model, {
      onEdit(sectionId) {
        model.editing = sectionId;
        render();
      },
      async onSave(sectionId, content) {
        if (!model.card) return;
        try {
          await api.saveSection(sectionId, content, model.card.file_hash);
          model.editing = null;
          await refresh();
        } catch (error) {
          if (error instanceof ConflictError) {
            renderConflictBanner(byId("banner"), () => {
              byId("banner").textContent = "";
              model.editing = null;
              void refresh();
            });
          } else {
            throw error;
          }
        }
      },
      onCancel() {
        model.editing = null;
        render();
      },
    });

    if (model.navigation) {
      renderNavigationBar(byId("navigation"), model.navigation, (cellId) => {
        const row = document.querySelector(`[data-outline-cell="${cellId}"]`);
        if (row) {
          row.scrollIntoView({ block: "center" });
        } else {
          void navigator.clipboard?.writeText(cellId);
        }
      });
    }
    if (model.rubric) {
      renderRubric(byId("rubric"), model.rubric);
    }

    const outline = byId("outline");
    outline.textContent = "";
    for (const row of outlineRows(model.stages)) {
      const div = document.createElement("div");
      div.className = "outline-row";
      div.dataset.outlineCell = row.cellId;
      div.textContent = `${row.cellId} ${row.stage ?? "-"} ${row.firstLine}`;
      outline.appendChild(div);
    }
  }

  byId("refresh").addEventListener("click", () => void refresh());
  byId("detect").addEventListener("click", async () => {
    await api.detectStages();
    await refresh();
  });
  byId("export").addEventListener("click", async () => {
    if (!model.card) return;
    const dialog = exportDialogFor(model.sections, model.card.missing);
    const doExport = async () => {
      const result = await api.exportCard(`${notebook.replace(/\.ipynb$/, "")}-card.md`);
      byId("status").textContent = `wrote ${result.written}`;
      byId("dialog").textContent = "";
    };
    if (dialog === null) {
      await doExport();
    } else {
      renderExportDialog(
        byId("dialog"),
        model.sections,
        dialog.emptySections,
        () => void doExport(),
        () => {
          byId("dialog").textContent = "";
        },
      );
    }
  });

  await refresh();
}

if (typeof document !== "undefined" && document.getElementById("sections")) {
  void boot();
}
