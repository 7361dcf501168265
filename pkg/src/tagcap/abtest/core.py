"""Pairwise A-vs-B study: question construction against a fixed ground
truth, blinded positioning, rater session assignment, append-only response
log, and win/tie/lose aggregation.

Raters answer two questions per pair: Q1 (which caption describes the music
with more accurate attributes) and Q2 (which caption describes it less
wrong), each with choices A / B / Equal.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import asdict, dataclass, field

from ..errors import TagcapError, ValidationError

CHOICES = ("A", "B", "Equal")


class MissingCaption(ValidationError):
    def __init__(self, sample_id: str, method: str):
        super().__init__(f"no caption for sample {sample_id!r}, method {method!r}")


class InsufficientQuestions(ValidationError):
    pass


class UnknownQuestion(ValidationError):
    pass


class NotAssigned(ValidationError):
    pass


class DuplicateResponse(ValidationError):
    pass


@dataclass(frozen=True)
class QuestionItem:
    question_id: str
    sample_id: str
    method_name: str
    position_of_ground_truth: str  # "A" or "B"
    caption_a: str
    caption_b: str


@dataclass(frozen=True)
class RatingResponse:
    rater_id: str
    question_id: str
    q1_choice: str
    q2_choice: str
    submitted_at: str = ""

    def __post_init__(self) -> None:
        if self.q1_choice not in CHOICES or self.q2_choice not in CHOICES:
            raise ValidationError(f"choices must be one of {CHOICES}")


def gt_position(study_seed: int, question_id: str) -> str:
    """Blinding position; a fair coin determined solely by (seed, id)."""
    return "A" if random.Random(f"{study_seed}|{question_id}").random() < 0.5 else "B"


def build_study(
    samples: list[str],
    methods: dict[str, dict[str, str]],
    ground_truth: dict[str, str],
    seed: int,
) -> list[QuestionItem]:
    """One question per (sample, method); |questions| = |samples| x |methods|."""
    questions: list[QuestionItem] = []
    for sample_id in samples:
        if sample_id not in ground_truth:
            raise MissingCaption(sample_id, "ground_truth")
        for method, captions in methods.items():
            if sample_id not in captions:
                raise MissingCaption(sample_id, method)
            qid = f"{sample_id}::{method}"
            pos = gt_position(seed, qid)
            gt_cap = ground_truth[sample_id]
            m_cap = captions[sample_id]
            questions.append(
                QuestionItem(
                    question_id=qid,
                    sample_id=sample_id,
                    method_name=method,
                    position_of_ground_truth=pos,
                    caption_a=gt_cap if pos == "A" else m_cap,
                    caption_b=m_cap if pos == "A" else gt_cap,
                )
            )
    return questions


@dataclass
class MethodCounts:
    win: int = 0
    tie: int = 0
    lose: int = 0

    @property
    def total(self) -> int:
        return self.win + self.tie + self.lose

    def percentages(self) -> dict[str, float]:
        t = self.total
        if t == 0:
            return {"win": 0.0, "tie": 0.0, "lose": 0.0}
        return {"win": 100.0 * self.win / t, "tie": 100.0 * self.tie / t, "lose": 100.0 * self.lose / t}


@dataclass
class AggregateResult:
    # method -> {"q1": MethodCounts, "q2": MethodCounts}
    methods: dict[str, dict[str, MethodCounts]] = field(default_factory=dict)
    n_responses: int = 0

    def to_jsonable(self) -> dict:
        out: dict = {"n_responses": self.n_responses, "methods": {}}
        for method, per_q in sorted(self.methods.items()):
            out["methods"][method] = {}
            for q, counts in per_q.items():
                out["methods"][method][q] = {**asdict(counts), "percent": counts.percentages()}
        return out


def aggregate(questions: list[QuestionItem], responses: list[RatingResponse]) -> AggregateResult:
    """Unblind each response and score it from the method's perspective:
    choice at the method's position = win, Equal = tie, GT position = lose."""
    by_id = {q.question_id: q for q in questions}
    result = AggregateResult()
    for method in sorted({q.method_name for q in questions}):
        result.methods[method] = {"q1": MethodCounts(), "q2": MethodCounts()}
    for resp in responses:
        q = by_id.get(resp.question_id)
        if q is None:
            raise UnknownQuestion(f"response references unknown question {resp.question_id!r}")
        method_pos = "B" if q.position_of_ground_truth == "A" else "A"
        for q_key, choice in (("q1", resp.q1_choice), ("q2", resp.q2_choice)):
            counts = result.methods[q.method_name][q_key]
            if choice == "Equal":
                counts.tie += 1
            elif choice == method_pos:
                counts.win += 1
            else:
                counts.lose += 1
        result.n_responses += 1
    return result


class StudyStore:
    """Directory-backed study state: questions.json (immutable), an
    append-only responses.jsonl, and assignments.jsonl for session resume.
    Appends are serialized through one lock; reads replay the logs."""

    def __init__(self, study_dir: str):
        self.dir = study_dir
        self._lock = threading.Lock()
        self.questions = self._load_questions()
        self._by_id = {q.question_id: q for q in self.questions}
        self.assignments: dict[str, list[str]] = {}
        self.responses: list[RatingResponse] = []
        self._answered: set[tuple[str, str]] = set()
        self._replay()

    @property
    def questions_path(self) -> str:
        return os.path.join(self.dir, "questions.json")

    @property
    def responses_path(self) -> str:
        return os.path.join(self.dir, "responses.jsonl")

    @property
    def assignments_path(self) -> str:
        return os.path.join(self.dir, "assignments.jsonl")

    @property
    def meta_path(self) -> str:
        return os.path.join(self.dir, "study.json")

    @classmethod
    def create(
        cls,
        study_dir: str,
        questions: list[QuestionItem],
        seed: int,
        study_id: str = "study",
    ) -> "StudyStore":
        os.makedirs(study_dir, exist_ok=True)
        with open(os.path.join(study_dir, "questions.json"), "w", encoding="utf-8") as f:
            json.dump([asdict(q) for q in questions], f, ensure_ascii=False, indent=2)
        with open(os.path.join(study_dir, "study.json"), "w", encoding="utf-8") as f:
            json.dump(
                {"study_id": study_id, "seed": seed, "n_questions": len(questions)},
                f,
                indent=2,
            )
        return cls(study_dir)

    def _load_questions(self) -> list[QuestionItem]:
        with open(self.questions_path, encoding="utf-8") as f:
            return [QuestionItem(**obj) for obj in json.load(f)]

    def _replay(self) -> None:
        if os.path.exists(self.assignments_path):
            with open(self.assignments_path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        obj = json.loads(line)
                        self.assignments[obj["rater_id"]] = obj["question_ids"]
        if os.path.exists(self.responses_path):
            with open(self.responses_path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        resp = RatingResponse(**json.loads(line))
                        self.responses.append(resp)
                        self._answered.add((resp.rater_id, resp.question_id))

    @property
    def seed(self) -> int:
        with open(self.meta_path, encoding="utf-8") as f:
            return json.load(f)["seed"]

    def assign_session(self, rater_id: str, k: int = 20) -> list[str]:
        """k questions for the rater, least-assigned-first with seeded random
        tie-breaking; a returning rater gets the same list back."""
        with self._lock:
            if rater_id in self.assignments:
                return list(self.assignments[rater_id])
            if k == 0:
                return []
            if k > len(self.questions):
                raise InsufficientQuestions(
                    f"requested {k} questions but study only has {len(self.questions)}"
                )
            counts: dict[str, int] = {q.question_id: 0 for q in self.questions}
            for qids in self.assignments.values():
                for qid in qids:
                    counts[qid] += 1
            rng = random.Random(f"{self.seed}|{rater_id}")
            order = [q.question_id for q in self.questions]
            rng.shuffle(order)
            order.sort(key=lambda qid: counts[qid])  # stable: keeps shuffled tie order
            chosen = order[:k]
            self.assignments[rater_id] = chosen
            with open(self.assignments_path, "a", encoding="utf-8") as f:
                f.write(json.dumps({"rater_id": rater_id, "question_ids": chosen}) + "\n")
            return list(chosen)

    def question(self, question_id: str) -> QuestionItem:
        if question_id not in self._by_id:
            raise UnknownQuestion(f"unknown question {question_id!r}")
        return self._by_id[question_id]

    def is_answered(self, rater_id: str, question_id: str) -> bool:
        return (rater_id, question_id) in self._answered

    def record_response(self, resp: RatingResponse) -> None:
        with self._lock:
            if resp.question_id not in self._by_id:
                raise UnknownQuestion(f"unknown question {resp.question_id!r}")
            assigned = self.assignments.get(resp.rater_id, [])
            if resp.question_id not in assigned:
                raise NotAssigned(
                    f"rater {resp.rater_id!r} is not assigned question {resp.question_id!r}"
                )
            key = (resp.rater_id, resp.question_id)
            if key in self._answered:
                raise DuplicateResponse(f"already answered: {key}")
            with open(self.responses_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(asdict(resp), ensure_ascii=False) + "\n")
            self.responses.append(resp)
            self._answered.add(key)

    def aggregate(self) -> AggregateResult:
        return aggregate(self.questions, list(self.responses))
