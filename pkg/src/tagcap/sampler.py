"""Balanced tag-anchored sampling: draw an anchor tag uniformly, then an
item uniformly from that tag's list. Keeps rare tags as visible as popular
ones in training batches.

RNG is numpy's PCG64 (default_rng), recorded in run manifests so sampling
runs are auditable and bit-reproducible per seed.
"""

from __future__ import annotations

import numpy as np

from .corpus import TagRecord
from .errors import ValidationError

RNG_ALGORITHM = "numpy.random.PCG64"


class EmptyInput(ValidationError):
    pass


def build_index(records: list[TagRecord]) -> dict[str, list[str]]:
    """Inverted index tag -> track ids (insertion order, unique)."""
    if not records:
        raise EmptyInput("no records to index")
    index: dict[str, list[str]] = {}
    for rec in records:
        for tag in rec.tags:
            bucket = index.setdefault(tag, [])
            if not bucket or bucket[-1] != rec.track_id:
                if rec.track_id not in bucket:
                    bucket.append(rec.track_id)
    return index


def sample_with_anchors(index: dict[str, list[str]], n: int, seed: int) -> list[tuple[str, str]]:
    """n independent (anchor_tag, track_id) draws with replacement;
    deterministic given seed."""
    if not index:
        raise EmptyInput("empty tag index")
    if n < 0:
        raise ValidationError("n must be >= 0")
    if n == 0:
        return []
    tags = sorted(index)
    buckets = [index[t] for t in tags]
    rng = np.random.default_rng(seed)
    anchor_idx = rng.integers(0, len(tags), size=n)
    us = rng.random(n)
    out: list[tuple[str, str]] = []
    for a, u in zip(anchor_idx, us):
        bucket = buckets[a]
        out.append((tags[a], bucket[int(u * len(bucket))]))
    return out


def sample(index: dict[str, list[str]], n: int, seed: int) -> list[str]:
    """n independent track_id draws with replacement; deterministic given seed."""
    return [track_id for _, track_id in sample_with_anchors(index, n, seed)]


def sample_epoch(index: dict[str, list[str]], seed: int) -> list[str]:
    """Without-replacement variant: one pass over all indexed items in a
    balanced order (anchor tags drawn uniformly until every item is used)."""
    if not index:
        raise EmptyInput("empty tag index")
    remaining = {tag: list(items) for tag, items in sorted(index.items())}
    all_ids = {i for items in index.values() for i in items}
    rng = np.random.default_rng(seed)
    out: list[str] = []
    used: set[str] = set()
    while remaining and len(used) < len(all_ids):
        tags = sorted(remaining)
        tag = tags[int(rng.integers(0, len(tags)))]
        bucket = remaining[tag]
        pick = bucket.pop(int(rng.integers(0, len(bucket))))
        if not bucket:
            del remaining[tag]
        if pick not in used:
            used.add(pick)
            out.append(pick)
    return out
