/** Thin client for the study service HTTP API. */

export type Choice = "A" | "B" | "Equal";

export interface BlindedQuestion {
  question_id: string;
  sample_id: string;
  caption_a: string;
  caption_b: string;
  audio_url: string;
  answered: boolean;
}

export interface SessionPayload {
  study_id: string;
  rater_id: string;
  questions: BlindedQuestion[];
}

export interface RatingBody {
  rater_id: string;
  question_id: string;
  q1_choice: Choice;
  q2_choice: Choice;
}

export type FetchFn = typeof fetch;

/** HTTP-level failure with the service's machine-readable error code. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let code = "http_error";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "object" && body.detail !== null) {
      code = body.detail.code ?? code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, code, message);
}

export class StudyApi {
  constructor(
    readonly baseUrl: string = "",
    readonly studyId: string = "study",
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  async loadSession(raterId: string, k?: number): Promise<SessionPayload> {
    const params = new URLSearchParams({ rater: raterId });
    if (k !== undefined) params.set("k", String(k));
    const resp = await this.fetchFn(
      `${this.baseUrl}/study/${encodeURIComponent(this.studyId)}/session?${params}`,
    );
    await raiseForStatus(resp);
    return (await resp.json()) as SessionPayload;
  }

  async submitResponse(body: RatingBody): Promise<void> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/study/${encodeURIComponent(this.studyId)}/responses`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    await raiseForStatus(resp);
  }

  async results(): Promise<unknown> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/study/${encodeURIComponent(this.studyId)}/results`,
    );
    await raiseForStatus(resp);
    return resp.json();
  }

  audioUrl(question: BlindedQuestion): string {
    return this.baseUrl + question.audio_url;
  }
}
