"""Corpus-level BLEU with clipped n-gram counts pooled over the corpus.

A smoothed sentence-level variant (add-1 for n >= 2) is available for
debugging individual captions; the corpus score is the reported number.
"""

import math
from collections import Counter
from collections.abc import Sequence

from ..errors import ValidationError

TokenSeq = Sequence[str]


class LengthMismatch(ValidationError):
    pass


class EmptyCorpus(ValidationError):
    pass


def ngram_counts(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_corpus(cands: Sequence[TokenSeq], refs: Sequence[TokenSeq], max_n: int = 4) -> float:
    """Corpus BLEU: uniform 1/max_n weights, geometric mean of modified
    precisions, brevity penalty min(1, exp(1 - r/c)) on corpus lengths.
    Returns 0.0 if any precision is zero."""
    if len(cands) != len(refs):
        raise LengthMismatch(f"{len(cands)} candidates vs {len(refs)} references")
    if not cands:
        raise EmptyCorpus("no candidate/reference pairs")
    if not 1 <= max_n <= 4:
        raise ValidationError(f"max_n must be in 1..4, got {max_n}")

    log_p_sum = 0.0
    for n in range(1, max_n + 1):
        clipped = 0
        total = 0
        for cand, ref in zip(cands, refs):
            cand_counts = ngram_counts(cand, n)
            ref_counts = ngram_counts(ref, n)
            clipped += sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
            total += max(len(cand) - n + 1, 0)
        if clipped == 0 or total == 0:
            return 0.0
        log_p_sum += math.log(clipped / total)

    c_len = sum(len(c) for c in cands)
    r_len = sum(len(r) for r in refs)
    if c_len == 0:
        return 0.0
    bp = min(1.0, math.exp(1.0 - r_len / c_len))
    return bp * math.exp(log_p_sum / max_n)


def bleu_sentence(cand: TokenSeq, ref: TokenSeq, max_n: int = 4, smooth: bool = True) -> float:
    """Sentence BLEU with optional add-1 smoothing for n >= 2."""
    if not cand:
        return 0.0
    log_p_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = ngram_counts(cand, n)
        ref_counts = ngram_counts(ref, n)
        clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        total = max(len(cand) - n + 1, 0)
        if smooth and n >= 2:
            clipped += 1
            total += 1
        if clipped == 0 or total == 0:
            return 0.0
        log_p_sum += math.log(clipped / total)
    bp = min(1.0, math.exp(1.0 - len(ref) / len(cand)))
    return bp * math.exp(log_p_sum / max_n)
