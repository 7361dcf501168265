from collections import Counter

import pytest

from tagcap.corpus import TagRecord
from tagcap.sampler import (
    EmptyInput,
    build_index,
    sample,
    sample_epoch,
    sample_with_anchors,
)


def skewed_index(n_tags=50, n_items=1000):
    """One tag on 90% of items, the rest sparse."""
    index = {}
    for i in range(n_items):
        item = f"item{i}"
        if i < int(0.9 * n_items):
            index.setdefault("tag0", []).append(item)
        index.setdefault(f"tag{1 + i % (n_tags - 1)}", []).append(item)
    assert len(index) == n_tags
    return index


class TestBuildIndex:
    def test_basic(self):
        records = [
            TagRecord("a1", ["rock"]),
            TagRecord("a2", ["rock", "jazz"]),
        ]
        assert build_index(records) == {"rock": ["a1", "a2"], "jazz": ["a2"]}

    def test_single(self):
        assert build_index([TagRecord("x", ["t"])]) == {"t": ["x"]}

    def test_empty(self):
        with pytest.raises(EmptyInput):
            build_index([])


class TestSample:
    def test_zero(self):
        assert sample({"t": ["x"]}, 0, seed=1) == []

    def test_single_bucket(self):
        assert sample({"t": ["x"]}, 5, seed=1) == ["x"] * 5

    def test_deterministic(self):
        index = skewed_index()
        assert sample(index, 1000, seed=42) == sample(index, 1000, seed=42)
        assert sample(index, 1000, seed=42) != sample(index, 1000, seed=43)

    def test_ids_exist_under_anchor(self):
        index = skewed_index()
        for tag, item in sample_with_anchors(index, 500, seed=9):
            assert item in index[tag]

    def test_anchor_uniformity_despite_skew(self):
        index = skewed_index()
        draws = sample_with_anchors(index, 100_000, seed=7)
        counts = Counter(tag for tag, _ in draws)
        for tag in index:
            assert 1750 <= counts[tag] <= 2250, (tag, counts[tag])

    def test_negative_n_rejected(self):
        with pytest.raises(Exception):
            sample({"t": ["x"]}, -1, seed=0)


class TestEpoch:
    def test_covers_every_item_once(self):
        index = {"a": ["x", "y"], "b": ["y", "z"]}
        out = sample_epoch(index, seed=3)
        assert sorted(out) == ["x", "y", "z"]

    def test_deterministic(self):
        index = skewed_index(n_tags=10, n_items=100)
        assert sample_epoch(index, seed=5) == sample_epoch(index, seed=5)
