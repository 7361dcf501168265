/** Rater session state machine: load the assigned questions, resume at the
 * first unanswered one, submit answers with queued retries, reach completion.
 *
 * The server owns blinding; this layer only sees caption_a / caption_b and
 * never learns which side is ground truth.
 */

import { ApiError, BlindedQuestion, Choice, RatingBody, StudyApi } from "./api.js";

export type SessionState =
  | "idle"
  | "loading"
  | "rating"
  | "submitting"
  | "complete"
  | "error";

export interface SubmitOptions {
  /** Delay between retries of a queued submission. */
  retryDelayMs?: number;
  /** Cap on attempts; unlimited by default. */
  maxAttempts?: number;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class RaterSession {
  state: SessionState = "idle";
  questions: BlindedQuestion[] = [];
  cursor = 0;
  lastError: string | null = null;
  /** Submission waiting on a network retry, if any. */
  pending: RatingBody | null = null;

  constructor(
    private readonly api: StudyApi,
    readonly raterId: string,
    private readonly sessionSize?: number,
  ) {}

  /** Fetch the assigned session and place the cursor on the first question
   * that has no recorded answer (end of list when everything is answered). */
  async load(): Promise<void> {
    this.state = "loading";
    try {
      const payload = await this.api.loadSession(this.raterId, this.sessionSize);
      this.questions = payload.questions;
      const firstOpen = this.questions.findIndex((q) => !q.answered);
      this.cursor = firstOpen === -1 ? this.questions.length : firstOpen;
      this.state = this.cursor >= this.questions.length ? "complete" : "rating";
      this.lastError = null;
    } catch (err) {
      this.state = "error";
      this.lastError = err instanceof Error ? err.message : String(err);
      throw err;
    }
  }

  get current(): BlindedQuestion | null {
    return this.state === "rating" || this.state === "submitting"
      ? this.questions[this.cursor]
      : null;
  }

  get answeredCount(): number {
    return this.cursor;
  }

  get total(): number {
    return this.questions.length;
  }

  /** Submit both choices for the current question and advance.
   *
   * A duplicate rejection means the answer is already on disk (e.g. a
   * double-click or a retry that raced an earlier success), so it advances
   * like a success. Network failures keep the submission queued and retry
   * after a delay. Other API errors surface to the caller.
   */
  async submit(q1: Choice, q2: Choice, opts: SubmitOptions = {}): Promise<void> {
    const question = this.current;
    if (!question) throw new Error("no question to submit");
    const { retryDelayMs = 1000, maxAttempts = Infinity } = opts;
    const body: RatingBody = {
      rater_id: this.raterId,
      question_id: question.question_id,
      q1_choice: q1,
      q2_choice: q2,
    };
    this.state = "submitting";
    this.pending = body;
    let attempt = 0;
    for (;;) {
      attempt += 1;
      try {
        await this.api.submitResponse(body);
        break;
      } catch (err) {
        if (err instanceof ApiError) {
          if (err.code === "duplicate_response") break;
          this.state = "error";
          this.lastError = err.message;
          this.pending = null;
          throw err;
        }
        // Network-level failure: keep the submission queued and retry.
        this.lastError = err instanceof Error ? err.message : String(err);
        if (attempt >= maxAttempts) {
          this.state = "error";
          this.pending = null;
          throw err;
        }
        await sleep(retryDelayMs);
      }
    }
    this.pending = null;
    this.lastError = null;
    question.answered = true;
    this.cursor += 1;
    this.state = this.cursor >= this.questions.length ? "complete" : "rating";
  }
}
