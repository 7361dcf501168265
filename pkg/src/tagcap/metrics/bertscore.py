"""BERT-Score matching over externally produced token embeddings.

Greedy max-cosine matching: R averages each reference token's best cosine
against the candidate, P the reverse, F is their harmonic mean. No idf
weighting, no baseline rescaling. Producing the embeddings is out of scope;
they arrive via an EmbeddingProvider (JSONL file of per-sentence records).
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError


class DimensionMismatch(ValidationError):
    pass


class EmptySentence(ValidationError):
    pass


@dataclass
class SentenceEmbeddings:
    tokens: list[str]
    vectors: np.ndarray  # shape (len(tokens), dim)

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if len(self.tokens) == 0:
            raise EmptySentence("sentence has no tokens")
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.tokens):
            raise DimensionMismatch(
                f"{len(self.tokens)} tokens but vector array of shape {self.vectors.shape}"
            )
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms == 0.0):
            raise ValidationError("zero-norm token vector")


def bert_score(cand_emb: SentenceEmbeddings, ref_emb: SentenceEmbeddings) -> tuple[float, float, float]:
    """Returns (P, R, F)."""
    if cand_emb.vectors.shape[1] != ref_emb.vectors.shape[1]:
        raise DimensionMismatch(
            f"candidate dim {cand_emb.vectors.shape[1]} vs reference dim {ref_emb.vectors.shape[1]}"
        )
    c = cand_emb.vectors / np.linalg.norm(cand_emb.vectors, axis=1, keepdims=True)
    r = ref_emb.vectors / np.linalg.norm(ref_emb.vectors, axis=1, keepdims=True)
    sim = c @ r.T  # (n_cand, n_ref)
    p = float(sim.max(axis=1).mean())
    rec = float(sim.max(axis=0).mean())
    f = 0.0 if p + rec == 0.0 else 2.0 * p * rec / (p + rec)
    return p, rec, f


def bert_score_corpus(
    cand_embs: list[SentenceEmbeddings], ref_embs: list[SentenceEmbeddings]
) -> tuple[float, float, float]:
    if len(cand_embs) != len(ref_embs):
        raise ValidationError(f"{len(cand_embs)} candidates vs {len(ref_embs)} references")
    if not cand_embs:
        raise ValidationError("empty embedding corpus")
    scores = [bert_score(c, r) for c, r in zip(cand_embs, ref_embs)]
    n = len(scores)
    return (
        sum(s[0] for s in scores) / n,
        sum(s[1] for s in scores) / n,
        sum(s[2] for s in scores) / n,
    )


class EmbeddingProvider(ABC):
    """Abstract source of per-sentence token embeddings."""

    @abstractmethod
    def get(self, sentence_id: str) -> SentenceEmbeddings:
        ...


@dataclass
class FileEmbeddingProvider(EmbeddingProvider):
    """JSONL file, one record per sentence: {id, tokens: [...], vectors: [[...], ...]}."""

    path: str
    _cache: dict[str, SentenceEmbeddings] = field(default_factory=dict, repr=False)
    _loaded: bool = field(default=False, repr=False)

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                rec = json.loads(line)
                self._cache[str(rec["id"])] = SentenceEmbeddings(
                    tokens=list(rec["tokens"]), vectors=np.asarray(rec["vectors"])
                )
        self._loaded = True

    def get(self, sentence_id: str) -> SentenceEmbeddings:
        if not self._loaded:
            self._load()
        if sentence_id not in self._cache:
            raise ValidationError(f"no embeddings for sentence id {sentence_id!r}")
        return self._cache[sentence_id]
