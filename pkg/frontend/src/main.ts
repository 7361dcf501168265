/** DOM wiring for the rating page. All state lives in RaterSession; this
 * module only paints it and forwards form events. */

import { Choice, StudyApi } from "./api.js";
import { RaterSession } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function chosen(name: string): Choice | null {
  const input = document.querySelector<HTMLInputElement>(
    `input[name="${name}"]:checked`,
  );
  return input ? (input.value as Choice) : null;
}

function clearChoices(): void {
  document
    .querySelectorAll<HTMLInputElement>('input[name="q1"], input[name="q2"]')
    .forEach((input) => {
      input.checked = false;
    });
}

function show(screen: "start" | "rating" | "complete" | "error"): void {
  for (const id of ["start", "rating", "complete", "error"]) {
    el(`screen-${id}`).hidden = id !== screen;
  }
}

function render(session: RaterSession, api: StudyApi): void {
  switch (session.state) {
    case "rating":
    case "submitting": {
      const q = session.current!;
      show("rating");
      el("progress").textContent =
        `Question ${session.cursor + 1} of ${session.total}`;
      el<HTMLAudioElement>("player").src = api.audioUrl(q);
      el("caption-a").textContent = q.caption_a;
      el("caption-b").textContent = q.caption_b;
      el<HTMLButtonElement>("submit").disabled = session.state === "submitting";
      break;
    }
    case "complete":
      show("complete");
      el("completion-count").textContent =
        `${session.answeredCount}/${session.total}`;
      break;
    case "error":
      show("error");
      el("error-message").textContent = session.lastError ?? "unknown error";
      break;
    default:
      show("start");
  }
}

async function startSession(raterId: string): Promise<void> {
  const api = new StudyApi("", "study");
  const session = new RaterSession(api, raterId);
  try {
    await session.load();
  } catch {
    render(session, api);
    el("retry").onclick = () => void startSession(raterId);
    return;
  }
  render(session, api);

  el<HTMLFormElement>("rating-form").onsubmit = async (event) => {
    event.preventDefault();
    const q1 = chosen("q1");
    const q2 = chosen("q2");
    if (!q1 || !q2) {
      el("form-hint").textContent = "Answer both questions before submitting.";
      return;
    }
    el("form-hint").textContent = "";
    render(session, api); // disables the button while submitting
    try {
      await session.submit(q1, q2);
    } catch {
      // state machine already holds the error message
    }
    clearChoices();
    render(session, api);
  };
}

function init(): void {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get("rater");
  if (fromUrl) {
    void startSession(fromUrl);
    return;
  }
  show("start");
  el<HTMLFormElement>("start-form").onsubmit = (event) => {
    event.preventDefault();
    const raterId = el<HTMLInputElement>("rater-id").value.trim();
    if (raterId) void startSession(raterId);
  };
}

init();
