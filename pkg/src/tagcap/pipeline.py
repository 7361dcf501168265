"""Generation pipeline: records -> prompts -> completions -> parsed,
coverage-scored pseudo captions."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus import PseudoCaption, TagRecord
from .errors import TagcapError
from .instruct import (
    AttributeParseError,
    InstructionKind,
    parse_attribute_response,
    render_prompt,
    tag_coverage,
)
from .llmgate import CaptionClient

log = logging.getLogger(__name__)


@dataclass
class GenerationFailure:
    track_id: str
    kind: InstructionKind
    error: str


def generate_captions(
    records: list[TagRecord],
    kinds: list[InstructionKind],
    client: CaptionClient,
    templates: dict[InstructionKind, str] | None = None,
    loose_coverage: bool = False,
) -> tuple[list[PseudoCaption], list[GenerationFailure]]:
    """One caption per (record, kind). Attribute-prediction responses get one
    retry on a parse failure, then the item is dropped and reported."""
    captions: list[PseudoCaption] = []
    failures: list[GenerationFailure] = []
    for rec in records:
        for kind in kinds:
            prompt = render_prompt(kind, rec.tags, templates)
            try:
                result = client.generate(prompt, track_id=rec.track_id)
            except TagcapError as exc:
                failures.append(GenerationFailure(rec.track_id, kind, str(exc)))
                continue
            text = result.raw_text
            new_attributes: list[str] = []
            if kind is InstructionKind.attribute_prediction:
                try:
                    parsed = parse_attribute_response(text)
                except AttributeParseError:
                    log.warning(
                        "unparseable attribute response for %s, retrying once", rec.track_id
                    )
                    try:
                        result = client.generate(prompt, track_id=rec.track_id, bypass_cache=True)
                        parsed = parse_attribute_response(result.raw_text)
                    except (TagcapError, AttributeParseError) as exc:
                        failures.append(GenerationFailure(rec.track_id, kind, str(exc)))
                        continue
                # Only the description becomes the caption; the predicted
                # attributes are stored alongside it.
                text = parsed.description
                new_attributes = parsed.new_attributes
            captions.append(
                PseudoCaption(
                    track_id=rec.track_id,
                    kind=kind,
                    text=text,
                    model_id=result.model_id,
                    coverage=tag_coverage(rec.tags, text, loose=loose_coverage),
                    new_attributes=new_attributes,
                    created_at=result.created_at,
                )
            )
    return captions, failures
