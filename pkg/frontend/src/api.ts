// Typed client for the nbmodelcard service. Every mutation returns the new
// file hash; callers refetch rather than patching local state.

export interface SectionSpec {
  id: string;
  title: string;
  description: string;
  examples: string[];
  required: boolean;
  order: number;
}

export interface CardEntry {
  section_id: string;
  content: string;
  cell_id: string | null;
}

export interface CardPayload {
  entries: CardEntry[];
  orphans: { cell_id: string; reason: string; section_id: string | null }[];
  missing: string[];
  file_hash: string;
}

export interface StageAssignment {
  cell_id: string;
  stage: string | null;
  source: string | null;
  matched_calls: string[];
}

export interface NavigationPayload {
  stages: Record<string, { cell_id: string; fraction: number }[]>;
  sections: Record<string, string>;
}

export interface RubricAnswer {
  id: string;
  value: "yes" | "no" | "unanswered";
  source: string;
  evidence: [number, number][];
  note: string | null;
}

export interface RubricPayload {
  target: string;
  answers: RubricAnswer[];
  groups: Record<
    string,
    { yes: number; no: number; unanswered: number; fraction: number | null }
  >;
}

export interface ExportResult {
  written: string;
  empty_sections: string[];
}

export class ConflictError extends Error {
  constructor() {
    super("notebook changed on disk; reload and retry");
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (response.status === 409) throw new ConflictError();
  if (!response.ok) {
    const body = await response.text();
    throw new Error(`${response.status} ${response.statusText}: ${body}`);
  }
  return (await response.json()) as T;
}

export class PanelApi {
  constructor(
    private readonly base: string,
    public readonly notebook: string,
  ) {}

  private url(path: string): string {
    return `${this.base}${path}?nb=${encodeURIComponent(this.notebook)}`;
  }

  getTemplate(): Promise<{ sections: SectionSpec[] }> {
    return request(`${this.base}/api/template`);
  }

  getCard(): Promise<CardPayload> {
    return request(this.url("/api/card"));
  }

  saveSection(id: string, content: string, baseHash: string): Promise<{ cell_id: string }> {
    return request(this.url(`/api/card/sections/${encodeURIComponent(id)}`), {
      method: "PUT",
      body: JSON.stringify({ content, base_hash: baseHash }),
    });
  }

  exportCard(path: string): Promise<ExportResult> {
    return request(this.url("/api/card/export"), {
      method: "POST",
      body: JSON.stringify({ path }),
    });
  }

  getStages(): Promise<{ assignments: StageAssignment[] }> {
    return request(this.url("/api/stages"));
  }

  detectStages(): Promise<{ assignments: StageAssignment[] }> {
    return request(this.url("/api/stages/detect"), { method: "POST", body: "{}" });
  }

  setStage(cellId: string, stage: string): Promise<{ cell_id: string }> {
    return request(this.url(`/api/stages/${encodeURIComponent(cellId)}`), {
      method: "PUT",
      body: JSON.stringify({ stage }),
    });
  }

  getNavigation(): Promise<NavigationPayload> {
    return request(this.url("/api/navigation"));
  }

  getRubric(): Promise<RubricPayload> {
    return request(this.url("/api/rubric"));
  }

  setRubricAnswers(answers: Record<string, string>): Promise<{ stored: number }> {
    return request(this.url("/api/rubric/answers"), {
      method: "PUT",
      body: JSON.stringify({ answers }),
    });
  }
}
