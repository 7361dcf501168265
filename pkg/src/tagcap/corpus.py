"""Dataset model: tag records in, multi-caption records out.

Input formats: JSONL ({track_id, tags, ...}) and MusicCaps-style CSV whose
aspect column holds a bracketed quoted list literal. Output format: one JSON
object per line with track_id, tags, caption_writing, caption_summary,
caption_paraphrase, caption_attribute, new_attributes, coverage, model,
created_at.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .instruct import AttributeParseError, InstructionKind, _Scanner
from .metrics.tokenizer import tokenize

log = logging.getLogger(__name__)

CAPTION_FIELDS: dict[InstructionKind, str] = {
    InstructionKind.writing: "caption_writing",
    InstructionKind.summary: "caption_summary",
    InstructionKind.paraphrase: "caption_paraphrase",
    InstructionKind.attribute_prediction: "caption_attribute",
}


class MalformedLine(ValidationError):
    def __init__(self, line_no: int, reason: str = ""):
        super().__init__(f"malformed line {line_no}" + (f": {reason}" if reason else ""))
        self.line_no = line_no


class DuplicateTrackId(ValidationError):
    def __init__(self, track_id: str):
        super().__init__(f"duplicate track_id {track_id!r}")
        self.track_id = track_id


class EmptyTagList(ValidationError):
    def __init__(self, track_id: str):
        super().__init__(f"record {track_id!r} has no usable tags")
        self.track_id = track_id


class MalformedAspectList(ValidationError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: aspect cell is not a bracketed list of quoted strings")
        self.row = row


class OrphanCaption(ValidationError):
    def __init__(self, track_id: str):
        super().__init__(f"caption for unknown track {track_id!r}")
        self.track_id = track_id


class EmptyDataset(ValidationError):
    pass


def normalize_tags(raw: list[str]) -> list[str]:
    """Lowercase, trim, collapse internal whitespace, dedup preserving order."""
    seen: set[str] = set()
    out: list[str] = []
    for tag in raw:
        norm = " ".join(str(tag).lower().split())
        if norm and norm not in seen:
            seen.add(norm)
            out.append(norm)
    return out


@dataclass(frozen=True)
class TagRecord:
    track_id: str
    tags: list[str]
    audio_ref: str | None = None
    duration_sec: float | None = None


@dataclass(frozen=True)
class PseudoCaption:
    track_id: str
    kind: InstructionKind
    text: str
    model_id: str
    coverage: float
    new_attributes: list[str] = field(default_factory=list)
    created_at: str = ""


@dataclass(frozen=True)
class CaptionedRecord:
    track_id: str
    source_tags: list[str]
    captions: dict[InstructionKind, PseudoCaption]


@dataclass(frozen=True)
class DatasetStats:
    n_items: int
    captions_per_audio: float
    avg_token_mean: float
    avg_token_std: float
    labels_per_clip: float
    total_duration_h: float | None = None


def ingest_jsonl(path: str) -> list[TagRecord]:
    records: list[TagRecord] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            if not isinstance(obj, dict) or "track_id" not in obj or "tags" not in obj:
                raise MalformedLine(line_no, "record needs track_id and tags")
            track_id = str(obj["track_id"])
            if track_id in seen_ids:
                raise DuplicateTrackId(track_id)
            seen_ids.add(track_id)
            tags = normalize_tags(obj["tags"])
            if not tags:
                raise EmptyTagList(track_id)
            duration = obj.get("duration_sec")
            if duration is not None:
                duration = float(duration)
                if duration < 0:
                    raise MalformedLine(line_no, "negative duration_sec")
            records.append(
                TagRecord(
                    track_id=track_id,
                    tags=tags,
                    audio_ref=obj.get("audio_ref"),
                    duration_sec=duration,
                )
            )
    return records


def parse_aspect_list(cell: str) -> list[str]:
    """Bracketed list of quoted strings, e.g. `['rock', 'no singer']`."""
    stripped = cell.strip()
    if not stripped.startswith("["):
        raise ValidationError("aspect cell does not start with '['")
    items = _Scanner(stripped, 0).parse_list()
    return items


def ingest_aspect_csv(
    path: str, id_column: str = "ytid", aspect_column: str = "aspect_list"
) -> list[TagRecord]:
    records: list[TagRecord] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or id_column not in reader.fieldnames:
            raise ValidationError(f"CSV lacks id column {id_column!r}")
        if aspect_column not in reader.fieldnames:
            raise ValidationError(f"CSV lacks aspect column {aspect_column!r}")
        for row_no, row in enumerate(reader, 1):
            track_id = str(row[id_column])
            if track_id in seen_ids:
                raise DuplicateTrackId(track_id)
            seen_ids.add(track_id)
            try:
                raw_tags = parse_aspect_list(row[aspect_column])
            except (AttributeParseError, ValidationError) as exc:
                raise MalformedAspectList(row_no) from exc
            tags = normalize_tags(raw_tags)
            if not tags:
                raise EmptyTagList(track_id)
            records.append(TagRecord(track_id=track_id, tags=tags))
    return records


def write_records_jsonl(records: list[TagRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            obj: dict = {"track_id": rec.track_id, "tags": rec.tags}
            if rec.audio_ref is not None:
                obj["audio_ref"] = rec.audio_ref
            if rec.duration_sec is not None:
                obj["duration_sec"] = rec.duration_sec
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def assemble(records: list[TagRecord], captions: list[PseudoCaption]) -> list[CaptionedRecord]:
    """One CaptionedRecord per track with at least one caption. A later
    caption of the same kind replaces the earlier one (resumed runs)."""
    by_id = {rec.track_id: rec for rec in records}
    grouped: dict[str, dict[InstructionKind, PseudoCaption]] = {}
    for cap in captions:
        if cap.track_id not in by_id:
            raise OrphanCaption(cap.track_id)
        slot = grouped.setdefault(cap.track_id, {})
        if cap.kind in slot:
            log.warning("replacing %s caption for track %s", cap.kind.value, cap.track_id)
        slot[cap.kind] = cap
    out: list[CaptionedRecord] = []
    for rec in records:
        if rec.track_id in grouped:
            out.append(
                CaptionedRecord(
                    track_id=rec.track_id,
                    source_tags=list(rec.tags),
                    captions=grouped[rec.track_id],
                )
            )
    return out


def stats(dataset: list[CaptionedRecord], durations: dict[str, float] | None = None) -> DatasetStats:
    if not dataset:
        raise EmptyDataset("cannot compute statistics of an empty dataset")
    n = len(dataset)
    n_captions = sum(len(rec.captions) for rec in dataset)
    token_counts = [
        len(tokenize(cap.text)) for rec in dataset for cap in rec.captions.values()
    ]
    if token_counts:
        mean = sum(token_counts) / len(token_counts)
        std = math.sqrt(sum((c - mean) ** 2 for c in token_counts) / len(token_counts))
    else:
        mean = std = 0.0
    labels = sum(len(rec.source_tags) for rec in dataset) / n
    total_duration_h = None
    if durations:
        known = [durations[r.track_id] for r in dataset if r.track_id in durations]
        if known:
            total_duration_h = sum(known) / 3600.0
    return DatasetStats(
        n_items=n,
        captions_per_audio=n_captions / n,
        avg_token_mean=mean,
        avg_token_std=std,
        labels_per_clip=labels,
        total_duration_h=total_duration_h,
    )


def write_dataset_jsonl(dataset: list[CaptionedRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in dataset:
            f.write(json.dumps(dataset_row(rec), ensure_ascii=False) + "\n")


def dataset_row(rec: CaptionedRecord) -> dict:
    row: dict = {"track_id": rec.track_id, "tags": rec.source_tags}
    coverage: dict[str, float] = {}
    new_attributes: list[str] = []
    model = ""
    created_at = ""
    for kind in InstructionKind:
        cap = rec.captions.get(kind)
        row[CAPTION_FIELDS[kind]] = cap.text if cap else None
        if cap:
            coverage[kind.value] = cap.coverage
            model = cap.model_id
            created_at = max(created_at, cap.created_at)
            if kind is InstructionKind.attribute_prediction:
                new_attributes = cap.new_attributes
    row["new_attributes"] = new_attributes
    row["coverage"] = coverage
    row["model"] = model
    row["created_at"] = created_at
    return row


def read_dataset_jsonl(path: str) -> list[CaptionedRecord]:
    out: list[CaptionedRecord] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            captions: dict[InstructionKind, PseudoCaption] = {}
            for kind, field_name in CAPTION_FIELDS.items():
                text = row.get(field_name)
                if text is None:
                    continue
                captions[kind] = PseudoCaption(
                    track_id=str(row["track_id"]),
                    kind=kind,
                    text=text,
                    model_id=row.get("model", ""),
                    coverage=row.get("coverage", {}).get(kind.value, 0.0),
                    new_attributes=(
                        row.get("new_attributes", [])
                        if kind is InstructionKind.attribute_prediction
                        else []
                    ),
                    created_at=row.get("created_at", ""),
                )
            out.append(
                CaptionedRecord(
                    track_id=str(row["track_id"]),
                    source_tags=list(row.get("tags", [])),
                    captions=captions,
                )
            )
    return out
