"""Diversity statistics over generated captions.

vocab   = unique token count over generated captions
novel_v = % of generated vocabulary absent from the training vocabulary
novel_c = % of generated captions whose trimmed text is absent from the
          training captions
plus the token-count mean/std (population std) over generated captions.
"""

import math
from collections.abc import Sequence

from ..errors import ValidationError
from .tokenizer import tokenize


class EmptyGeneratedSet(ValidationError):
    pass


def token_stats(texts: Sequence[str]) -> tuple[float, float]:
    counts = [len(tokenize(t)) for t in texts]
    if not counts:
        return 0.0, 0.0
    mean = sum(counts) / len(counts)
    var = sum((c - mean) ** 2 for c in counts) / len(counts)
    return mean, math.sqrt(var)


def diversity(
    generated: Sequence[str], training: Sequence[str] | None = None
) -> tuple[int, float, float | None, float, float]:
    """Returns (vocab, novel_v, novel_c, avg_token_mean, avg_token_std).
    novel_v is 0.0 and novel_c is None when no training captions are given."""
    if not generated:
        raise EmptyGeneratedSet("no generated captions")
    gen_vocab: set[str] = set()
    for text in generated:
        gen_vocab.update(tokenize(text))
    vocab = len(gen_vocab)

    novel_v = 0.0
    novel_c: float | None = None
    if training is not None:
        train_vocab: set[str] = set()
        for text in training:
            train_vocab.update(tokenize(text))
        if gen_vocab:
            novel_v = 100.0 * len(gen_vocab - train_vocab) / len(gen_vocab)
        train_texts = {t.strip() for t in training}
        novel = sum(1 for t in generated if t.strip() not in train_texts)
        novel_c = 100.0 * novel / len(generated)

    mean, std = token_stats(generated)
    return vocab, novel_v, novel_c, mean, std
