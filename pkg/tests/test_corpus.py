import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagcap.corpus import (
    CaptionedRecord,
    DuplicateTrackId,
    EmptyDataset,
    EmptyTagList,
    MalformedAspectList,
    MalformedLine,
    OrphanCaption,
    PseudoCaption,
    TagRecord,
    assemble,
    ingest_aspect_csv,
    ingest_jsonl,
    normalize_tags,
    parse_aspect_list,
    read_dataset_jsonl,
    stats,
    write_dataset_jsonl,
    write_records_jsonl,
)
from tagcap.instruct import InstructionKind


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _caption(track_id, kind, text="some caption text", **kw):
    return PseudoCaption(
        track_id=track_id, kind=kind, text=text, model_id="mock", coverage=1.0, **kw
    )


class TestIngestJsonl:
    def test_normalization(self, tmp_path):
        path = _write(
            tmp_path, "tags.jsonl",
            json.dumps({"track_id": "a1", "tags": ["Rock", "rock ", " Guitar"]}) + "\n",
        )
        records = ingest_jsonl(path)
        assert records == [TagRecord(track_id="a1", tags=["rock", "guitar"])]

    def test_empty_file(self, tmp_path):
        assert ingest_jsonl(_write(tmp_path, "empty.jsonl", "")) == []

    def test_duplicate_id(self, tmp_path):
        line = json.dumps({"track_id": "x", "tags": ["a"]})
        path = _write(tmp_path, "dup.jsonl", line + "\n" + line + "\n")
        with pytest.raises(DuplicateTrackId):
            ingest_jsonl(path)

    def test_malformed_line(self, tmp_path):
        path = _write(tmp_path, "bad.jsonl", "{not json\n")
        with pytest.raises(MalformedLine) as exc:
            ingest_jsonl(path)
        assert exc.value.line_no == 1

    def test_empty_tags(self, tmp_path):
        path = _write(tmp_path, "no_tags.jsonl", json.dumps({"track_id": "a", "tags": ["  "]}) + "\n")
        with pytest.raises(EmptyTagList):
            ingest_jsonl(path)

    def test_round_trip(self, tmp_path):
        records = [
            TagRecord(track_id="a", tags=["rock", "slow jam"], audio_ref="a.wav", duration_sec=10.0),
            TagRecord(track_id="b", tags=["jazz"]),
        ]
        path = str(tmp_path / "rt.jsonl")
        write_records_jsonl(records, path)
        assert ingest_jsonl(path) == records

    @given(
        tag_lists=st.lists(
            st.lists(
                st.text(alphabet="abc XY", min_size=1, max_size=6).filter(lambda s: s.strip()),
                min_size=1,
                max_size=4,
            ),
            min_size=1,
            max_size=5,
        )
    )
    @settings(max_examples=40)
    def test_ingest_idempotent(self, tag_lists, tmp_path_factory):
        tmp = tmp_path_factory.mktemp("idem")
        records = []
        for i, tags in enumerate(tag_lists):
            norm = normalize_tags(tags)
            if norm:
                records.append(TagRecord(track_id=f"t{i}", tags=norm))
        if not records:
            return
        path = str(tmp / "x.jsonl")
        write_records_jsonl(records, path)
        assert ingest_jsonl(path) == records


class TestAspectCsv:
    def test_basic(self, tmp_path):
        path = _write(
            tmp_path, "caps.csv",
            'ytid,aspect_list\nyt1,"[\'video game theme\', \'no singer\']"\n',
        )
        records = ingest_aspect_csv(path)
        assert records == [TagRecord(track_id="yt1", tags=["video game theme", "no singer"])]

    def test_empty_list(self, tmp_path):
        path = _write(tmp_path, "caps.csv", "ytid,aspect_list\nyt1,[]\n")
        with pytest.raises(EmptyTagList):
            ingest_aspect_csv(path)

    def test_dedup(self):
        assert parse_aspect_list("['a', 'a']") == ["a", "a"]
        # dedup happens in normalization
        assert normalize_tags(parse_aspect_list("['a', 'a']")) == ["a"]

    def test_malformed_cell(self, tmp_path):
        path = _write(tmp_path, "caps.csv", "ytid,aspect_list\nyt1,notalist\n")
        with pytest.raises(MalformedAspectList) as exc:
            ingest_aspect_csv(path)
        assert exc.value.row == 1

    def test_custom_columns(self, tmp_path):
        path = _write(tmp_path, "caps.csv", "id,tags\nx,\"['a']\"\n")
        records = ingest_aspect_csv(path, id_column="id", aspect_column="tags")
        assert records[0].track_id == "x"


class TestAssemble:
    def test_four_kinds(self):
        rec = TagRecord(track_id="a1", tags=["rock"])
        captions = [_caption("a1", kind) for kind in InstructionKind]
        out = assemble([rec], captions)
        assert len(out) == 1
        assert len(out[0].captions) == 4
        assert stats(out).captions_per_audio == 4.0

    def test_no_captions(self):
        assert assemble([TagRecord(track_id="a", tags=["x"])], []) == []

    def test_orphan(self):
        with pytest.raises(OrphanCaption):
            assemble([TagRecord(track_id="a", tags=["x"])],
                     [_caption("zz", InstructionKind.writing)])

    def test_last_write_wins(self, caplog):
        rec = TagRecord(track_id="a", tags=["x"])
        first = _caption("a", InstructionKind.writing, text="first")
        second = _caption("a", InstructionKind.writing, text="second")
        out = assemble([rec], [first, second])
        assert out[0].captions[InstructionKind.writing].text == "second"


class TestStats:
    def test_avg_tokens(self):
        rec = CaptionedRecord(
            track_id="a",
            source_tags=["x"],
            captions={
                InstructionKind.writing: _caption("a", InstructionKind.writing, text="w " * 10),
                InstructionKind.summary: _caption("a", InstructionKind.summary, text="w " * 20),
            },
        )
        s = stats([rec])
        assert s.avg_token_mean == pytest.approx(15.0)
        assert s.avg_token_std == pytest.approx(5.0)

    def test_labels_per_clip(self):
        recs = [
            CaptionedRecord("a", ["1", "2", "3"], {InstructionKind.writing: _caption("a", InstructionKind.writing)}),
            CaptionedRecord("b", ["1", "2", "3", "4", "5"], {InstructionKind.writing: _caption("b", InstructionKind.writing)}),
        ]
        assert stats(recs).labels_per_clip == pytest.approx(4.0)

    def test_n_items_counts_distinct_tracks(self):
        recs = [
            CaptionedRecord(f"t{i}", ["x"], {InstructionKind.writing: _caption(f"t{i}", InstructionKind.writing)})
            for i in range(7)
        ]
        s = stats(recs)
        assert s.n_items == len({r.track_id for r in recs}) == 7

    def test_uniform_captions_per_audio(self):
        for k in (1, 2, 4):
            kinds = list(InstructionKind)[:k]
            recs = [
                CaptionedRecord(f"t{i}", ["x"], {kind: _caption(f"t{i}", kind) for kind in kinds})
                for i in range(5)
            ]
            assert stats(recs).captions_per_audio == float(k)

    def test_durations(self):
        recs = [CaptionedRecord("a", ["x"], {InstructionKind.writing: _caption("a", InstructionKind.writing)})]
        s = stats(recs, durations={"a": 7200.0})
        assert s.total_duration_h == pytest.approx(2.0)

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            stats([])


class TestDatasetRoundTrip:
    def test_write_read(self, tmp_path):
        rec = CaptionedRecord(
            track_id="a",
            source_tags=["rock", "guitar"],
            captions={
                InstructionKind.writing: _caption("a", InstructionKind.writing, text="cap w"),
                InstructionKind.attribute_prediction: _caption(
                    "a", InstructionKind.attribute_prediction, text="cap ap",
                    new_attributes=["retro vibe"],
                ),
            },
        )
        path = str(tmp_path / "ds.jsonl")
        write_dataset_jsonl([rec], path)
        back = read_dataset_jsonl(path)
        assert len(back) == 1
        assert back[0].track_id == "a"
        assert back[0].captions[InstructionKind.writing].text == "cap w"
        assert back[0].captions[InstructionKind.attribute_prediction].new_attributes == ["retro vibe"]
        row = json.loads(open(path).read())
        assert row["caption_summary"] is None
        assert row["new_attributes"] == ["retro vibe"]
