// Pure view-model logic: everything here is computed from the last server
// responses, never from locally accumulated edits.

import type {
  CardPayload,
  NavigationPayload,
  RubricPayload,
  SectionSpec,
  StageAssignment,
} from "./api.js";

export interface PanelViewModel {
  sections: SectionSpec[];
  card: CardPayload | null;
  stages: StageAssignment[];
  navigation: NavigationPayload | null;
  rubric: RubricPayload | null;
  editing: string | null; // section id with an open editor
}

export function emptyViewModel(): PanelViewModel {
  return { sections: [], card: null, stages: [], navigation: null, rubric: null, editing: null };
}

export function sectionContent(model: PanelViewModel, sectionId: string): string {
  const entry = model.card?.entries.find((e) => e.section_id === sectionId);
  return entry ? entry.content : "";
}

export function isMissing(model: PanelViewModel, sectionId: string): boolean {
  return model.card ? model.card.missing.includes(sectionId) : true;
}

/** Chip offset in percent of the bar width, clamped to [0, 100]. */
export function chipPositionPercent(fraction: number): number {
  return Math.min(100, Math.max(0, fraction * 100));
}

export interface ExportDialog {
  emptySections: string[]; // section ids, template order
  message: string;
}

/**
 * The pre-export nudge: when required sections are still empty, the dialog
 * names each one and asks for confirmation before anything is written.
 * Returns null when the card is complete and the export can run directly.
 */
export function exportDialogFor(
  sections: SectionSpec[],
  missing: string[],
): ExportDialog | null {
  if (missing.length === 0) return null;
  const titles = sections.filter((s) => missing.includes(s.id)).map((s) => s.title);
  return {
    emptySections: missing,
    message:
      `These sections are still empty: ${titles.join(", ")}. ` +
      "Export anyway? Empty sections are written as placeholders.",
  };
}

export const STAGE_ORDER = [
  "data_collection",
  "data_cleaning",
  "preprocessing",
  "hyperparameter_tuning",
  "model_training",
  "model_evaluation",
] as const;

export function stageLabel(stage: string): string {
  return stage.replace(/_/g, " ");
}

export interface OutlineRow {
  cellId: string;
  kind: string;
  firstLine: string;
  stage: string | null;
}

/** Read-only outline of the notebook, one row per code cell with its stage. */
export function outlineRows(assignments: StageAssignment[]): OutlineRow[] {
  return assignments.map((a) => ({
    cellId: a.cell_id,
    kind: "code",
    firstLine: a.matched_calls[0] ?? "",
    stage: a.stage,
  }));
}

export function rubricSummary(rubric: RubricPayload): string {
  const yes = rubric.answers.filter((a) => a.value === "yes").length;
  const no = rubric.answers.filter((a) => a.value === "no").length;
  const open = rubric.answers.length - yes - no;
  return `${yes} yes / ${no} no / ${open} unanswered`;
}
