"""Caption quality metrics: tokenizer, BLEU, ROUGE-L, METEOR, BERT-Score
matching, and diversity statistics.

The ROUGE-L inner loop (LCS dynamic programming) runs on a compiled Cython
kernel when available; see _backend.BACKEND_NAME for what was selected.
"""

from ._backend import BACKEND_NAME, COMPILED, lcs_length
from .bertscore import (
    EmbeddingProvider,
    FileEmbeddingProvider,
    SentenceEmbeddings,
    bert_score,
    bert_score_corpus,
)
from .bleu import bleu_corpus, bleu_sentence
from .diversity import diversity, token_stats
from .meteor import (
    default_stages,
    exact_matcher,
    meteor_corpus,
    meteor_pair,
    stem_matcher,
)
from .report import MetricReport, evaluate_corpus
from .rouge import rouge_l_corpus, rouge_l_pair
from .tokenizer import tokenize

__all__ = [
    "BACKEND_NAME",
    "COMPILED",
    "EmbeddingProvider",
    "FileEmbeddingProvider",
    "MetricReport",
    "SentenceEmbeddings",
    "bert_score",
    "bert_score_corpus",
    "bleu_corpus",
    "bleu_sentence",
    "default_stages",
    "diversity",
    "evaluate_corpus",
    "exact_matcher",
    "lcs_length",
    "meteor_corpus",
    "meteor_pair",
    "rouge_l_corpus",
    "rouge_l_pair",
    "stem_matcher",
    "token_stats",
    "tokenize",
]
