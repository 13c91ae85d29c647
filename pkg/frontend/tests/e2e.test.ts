// End-to-end acceptance for the panel: the real Python service serves a
// fixture notebook on loopback, and the panel's own client and render
// functions drive it.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync, existsSync } from "node:fs";
import { connect } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it, vi } from "vitest";

import { PanelApi } from "../src/api.js";
import { exportDialogFor } from "../src/model.js";
import { renderExportDialog, renderNavigationBar, renderSectionList } from "../src/render.js";
import { emptyViewModel } from "../src/model.js";

const PORT = 7462;
const BASE = `http://127.0.0.1:${PORT}`;

const FILLED_SECTIONS: [string, string][] = [
  ["model-details", "Model Details"],
  ["intended-use", "Intended Use"],
  ["metrics", "Metrics"],
  ["evaluation-data", "Evaluation Data"],
  ["quantitative-analyses", "Quantitative Analyses"],
  ["caveats-and-recommendations", "Caveats and Recommendations"],
];

function fixtureNotebook(): string {
  const cells: object[] = [
    { cell_type: "markdown", id: "title", metadata: {}, source: "# churn experiment" },
    {
      cell_type: "code",
      id: "load",
      metadata: {},
      outputs: [],
      execution_count: null,
      source: 'import pandas as pd\ndf = pd.read_csv("c.csv")',
    },
    {
      cell_type: "code",
      id: "clean",
      metadata: {},
      outputs: [],
      execution_count: null,
      source: "df = df.dropna()",
    },
    {
      cell_type: "code",
      id: "train",
      metadata: {},
      outputs: [],
      execution_count: null,
      source: "model.fit(df, y)",
    },
  ];
  for (const [id, title] of FILLED_SECTIONS) {
    cells.push({
      cell_type: "markdown",
      id: `sec-${id}`,
      metadata: {},
      source: `<!-- model-card-section: ${id} -->\n## ${title}\nWritten notes for ${title}.`,
    });
  }
  return JSON.stringify({
    cells,
    metadata: {},
    nbformat: 4,
    nbformat_minor: 5,
  });
}

let server: ChildProcess;
let root: string;
const api = new PanelApi(BASE, "panel-fixture.ipynb");

function portOpen(): Promise<boolean> {
  return new Promise((resolve) => {
    const socket = connect({ host: "127.0.0.1", port: PORT }, () => {
      socket.end();
      resolve(true);
    });
    socket.on("error", () => resolve(false));
  });
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    if (await portOpen()) {
      const response = await fetch(`${BASE}/api/template`);
      if (response.ok) return;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  root = mkdtempSync(join(tmpdir(), "panel-e2e-"));
  writeFileSync(join(root, "panel-fixture.ipynb"), fixtureNotebook());
  server = spawn("nbmodelcard", ["serve", "--notebook-root", root, "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("panel against the live service", () => {
  it("shows the nine template sections with hover descriptions", async () => {
    const template = await api.getTemplate();
    expect(template.sections.length).toBe(9);

    const model = { ...emptyViewModel(), sections: template.sections };
    document.body.innerHTML = "<div id='c'></div>";
    const container = document.getElementById("c")!;
    renderSectionList(container, model, {
      onEdit: vi.fn(),
      onSave: vi.fn(),
      onCancel: vi.fn(),
    });
    const rows = [...container.querySelectorAll(".section-row")];
    expect(rows.length).toBe(9);
    for (const row of rows) {
      const title = row.querySelector(".section-title") as HTMLElement;
      expect(title.title.length).toBeGreaterThan(0); // hover text present
    }
  });

  it("saving the ethics section shows up in the card and flips Q20", async () => {
    const before = await api.getRubric();
    expect(before.answers.find((a) => a.id === "Q20")!.value).toBe("no");

    const card = await api.getCard();
    const text = "We reviewed bias across regions with the annotation team.";
    await api.saveSection("ethical-considerations", text, card.file_hash);

    const refreshed = await api.getCard();
    const entry = refreshed.entries.find((e) => e.section_id === "ethical-considerations");
    expect(entry?.content).toBe(text);

    const after = await api.getRubric();
    expect(after.answers.find((a) => a.id === "Q20")!.value).toBe("yes");
  });

  it("export with two empty sections shows the nudge dialog naming both", async () => {
    const card = await api.getCard();
    expect(card.missing).toEqual(["factors", "training-data"]);

    const template = await api.getTemplate();
    const dialog = exportDialogFor(template.sections, card.missing);
    expect(dialog).not.toBeNull();

    document.body.innerHTML = "<div id='c'></div>";
    const container = document.getElementById("c")!;
    const onConfirm = vi.fn();
    renderExportDialog(container, template.sections, dialog!.emptySections, onConfirm, vi.fn());
    const named = [...container.querySelectorAll(".dialog-empty-section")].map(
      (n) => n.textContent,
    );
    expect(named).toEqual(["Factors", "Training Data"]);

    // confirming anyway writes the file, placeholders included
    (container.querySelector(".dialog-confirm") as HTMLButtonElement).click();
    expect(onConfirm).toHaveBeenCalled();
    const result = await api.exportCard("panel-card.md");
    expect(result.empty_sections).toEqual(["factors", "training-data"]);
    expect(existsSync(join(root, "panel-card.md"))).toBe(true);
  });

  it("navigation chips sit within 1% of their position fraction", async () => {
    await api.detectStages();
    const navigation = await api.getNavigation();
    const fractions = new Map<string, number>();
    for (const entries of Object.values(navigation.stages)) {
      for (const entry of entries) fractions.set(entry.cell_id, entry.fraction);
    }
    expect(fractions.size).toBeGreaterThan(0);

    document.body.innerHTML = "<div id='c'></div>";
    const container = document.getElementById("c")!;
    renderNavigationBar(container, navigation, vi.fn());
    const chips = [...container.querySelectorAll(".nav-chip")] as HTMLElement[];
    expect(chips.length).toBe(fractions.size);
    for (const chip of chips) {
      const expected = fractions.get(chip.dataset.cellId!)! * 100;
      const actual = parseFloat(chip.style.left);
      expect(Math.abs(actual - expected)).toBeLessThanOrEqual(1);
    }
  });
});
