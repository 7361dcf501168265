"""Pairwise A-vs-B human rating study: question construction, sessions,
response log, aggregation, and the HTTP rating service."""

from .core import (
    AggregateResult,
    DuplicateResponse,
    InsufficientQuestions,
    MethodCounts,
    MissingCaption,
    NotAssigned,
    QuestionItem,
    RatingResponse,
    StudyStore,
    UnknownQuestion,
    aggregate,
    build_study,
    gt_position,
)

__all__ = [
    "AggregateResult",
    "DuplicateResponse",
    "InsufficientQuestions",
    "MethodCounts",
    "MissingCaption",
    "NotAssigned",
    "QuestionItem",
    "RatingResponse",
    "StudyStore",
    "UnknownQuestion",
    "aggregate",
    "build_study",
    "gt_position",
]
