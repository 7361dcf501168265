"""Corpus evaluation report: BLEU1-4, METEOR, ROUGE-L, optional BERT-Score,
and diversity statistics."""

import json
from collections.abc import Sequence
from dataclasses import asdict, dataclass

from .bertscore import SentenceEmbeddings, bert_score_corpus
from .bleu import bleu_corpus
from .diversity import diversity
from .meteor import Matcher, meteor_corpus
from .rouge import DEFAULT_BETA, rouge_l_corpus
from .tokenizer import tokenize


@dataclass
class MetricReport:
    b1: float
    b2: float
    b3: float
    b4: float
    meteor: float
    rouge_l: float
    bert_s: float | None
    vocab: int
    novel_v: float
    novel_c: float | None
    avg_token_mean: float
    avg_token_std: float

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(asdict(self), indent=indent)


def evaluate_corpus(
    candidates: Sequence[str],
    references: Sequence[str],
    training: Sequence[str] | None = None,
    cand_embs: list[SentenceEmbeddings] | None = None,
    ref_embs: list[SentenceEmbeddings] | None = None,
    beta: float = DEFAULT_BETA,
    meteor_stages: Sequence[Matcher] | None = None,
) -> MetricReport:
    cand_toks = [tokenize(c) for c in candidates]
    ref_toks = [tokenize(r) for r in references]

    bert_s = None
    if cand_embs is not None and ref_embs is not None:
        _, _, bert_s = bert_score_corpus(cand_embs, ref_embs)

    vocab, novel_v, novel_c, tok_mean, tok_std = diversity(candidates, training)
    return MetricReport(
        b1=bleu_corpus(cand_toks, ref_toks, 1),
        b2=bleu_corpus(cand_toks, ref_toks, 2),
        b3=bleu_corpus(cand_toks, ref_toks, 3),
        b4=bleu_corpus(cand_toks, ref_toks, 4),
        meteor=meteor_corpus(cand_toks, ref_toks, meteor_stages),
        rouge_l=rouge_l_corpus(cand_toks, ref_toks, beta),
        bert_s=bert_s,
        vocab=vocab,
        novel_v=novel_v,
        novel_c=novel_c,
        avg_token_mean=tok_mean,
        avg_token_std=tok_std,
    )
