"""ROUGE-L: LCS-based F-score, averaged over pairs at corpus level."""

from collections.abc import Sequence

from ..errors import ValidationError
from ._backend import lcs_length

TokenSeq = Sequence[str]

DEFAULT_BETA = 1.2


def rouge_l_pair(cand: TokenSeq, ref: TokenSeq, beta: float = DEFAULT_BETA) -> float:
    if beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    if not cand or not ref:
        return 0.0
    lcs = lcs_length(list(cand), list(ref))
    if lcs == 0:
        return 0.0
    p = lcs / len(cand)
    r = lcs / len(ref)
    b2 = beta * beta
    return (1.0 + b2) * p * r / (r + b2 * p)


def rouge_l_corpus(cands: Sequence[TokenSeq], refs: Sequence[TokenSeq], beta: float = DEFAULT_BETA) -> float:
    if len(cands) != len(refs):
        raise ValidationError(f"{len(cands)} candidates vs {len(refs)} references")
    if not cands:
        return 0.0
    return sum(rouge_l_pair(c, r, beta) for c, r in zip(cands, refs)) / len(cands)
