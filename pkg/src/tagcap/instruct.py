"""Task instructions, baseline caption generators, the restricted literal
parser for attribute-prediction responses, and the tag-coverage guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ValidationError
from .metrics.tokenizer import tokenize


class EmptyTagList(ValidationError):
    pass


class InstructionKind(str, Enum):
    writing = "writing"
    summary = "summary"
    paraphrase = "paraphrase"
    attribute_prediction = "attribute_prediction"


DEFAULT_TEMPLATES: dict[InstructionKind, str] = {
    InstructionKind.writing: (
        "Write a song description sentence including the following attributes."
    ),
    InstructionKind.summary: (
        "Write a single sentence that summarizes a song with the following attributes. "
        "Don't write the artist name or album name."
    ),
    InstructionKind.paraphrase: (
        "Write a song description sentence including the following attributes. "
        "Creative paraphrasing is acceptable."
    ),
    InstructionKind.attribute_prediction: (
        "Write the answer as a Python dictionary with new_attribute and description as keys. "
        "For new_attribute, write new attributes that show high co-occurrence with the "
        "following attributes. For description, write a song description sentence including "
        "the following attributes and new attributes."
    ),
}

TEMPLATE_STEM = "the music is characterized by"


@dataclass(frozen=True)
class Prompt:
    kind: InstructionKind
    text: str


def load_templates(path: str) -> dict[InstructionKind, str]:
    """Flat key=value file overriding instruction templates; unknown keys are
    rejected, missing keys keep their defaults."""
    templates = dict(DEFAULT_TEMPLATES)
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{line_no}: expected key=value")
            key, value = line.split("=", 1)
            key = key.strip()
            try:
                kind = InstructionKind(key)
            except ValueError:
                raise ValidationError(f"{path}:{line_no}: unknown instruction kind {key!r}")
            templates[kind] = value.strip()
    return templates


def render_prompt(
    kind: InstructionKind,
    tags: list[str],
    templates: dict[InstructionKind, str] | None = None,
) -> Prompt:
    """Instruction text followed by a space and the comma-joined tag list."""
    if not tags:
        raise EmptyTagList("cannot render a prompt without tags")
    templates = templates or DEFAULT_TEMPLATES
    return Prompt(kind=kind, text=templates[kind] + " " + ", ".join(tags))


def tag_concat_caption(tags: list[str]) -> str:
    """Baseline: tags joined by commas."""
    if not tags:
        raise EmptyTagList("cannot build a caption from zero tags")
    return ", ".join(tags)


def template_caption(tags: list[str]) -> str:
    """Baseline: fixed five-word stem followed by the comma-joined tags."""
    if not tags:
        raise EmptyTagList("cannot build a caption from zero tags")
    return TEMPLATE_STEM + " " + tag_concat_caption(tags)


# --- restricted literal parser -------------------------------------------

class AttributeParseError(ValidationError):
    pass


class NoObjectFound(AttributeParseError):
    pass


class UnterminatedString(AttributeParseError):
    def __init__(self, pos: int):
        super().__init__(f"unterminated string starting at position {pos}")
        self.pos = pos


class MissingKey(AttributeParseError):
    def __init__(self, name: str):
        super().__init__(f"missing key {name!r}")
        self.name = name


class TypeMismatch(AttributeParseError):
    def __init__(self, key: str):
        super().__init__(f"unexpected value type for key {key!r}")
        self.key = key


@dataclass(frozen=True)
class AttributeResponse:
    new_attributes: list[str] = field(default_factory=list)
    description: str = ""

    def serialize(self) -> str:
        import json

        return json.dumps(
            {"new_attribute": self.new_attributes, "description": self.description},
            ensure_ascii=False,
        )


_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "f": "\f", "b": "\b",
    "\\": "\\", "'": "'", '"': '"', "/": "/",
}


class _Scanner:
    """Recursive-descent parser for a restricted object literal: string keys,
    values that are strings or lists of strings, single or double quotes,
    backslash escapes, trailing commas."""

    def __init__(self, text: str, start: int):
        self.text = text
        self.pos = start

    def error(self, msg: str) -> AttributeParseError:
        return AttributeParseError(f"{msg} at position {self.pos}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        return self.text[self.pos]

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, found {self.peek()!r}")
        self.pos += 1

    def parse_string(self) -> str:
        quote = self.peek()
        if quote not in "'\"":
            raise self.error("expected a quoted string")
        start = self.pos
        self.pos += 1
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise UnterminatedString(start)
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    raise UnterminatedString(start)
                esc = self.text[self.pos + 1]
                if esc == "u":
                    hex_digits = self.text[self.pos + 2 : self.pos + 6]
                    if len(hex_digits) < 4:
                        raise UnterminatedString(start)
                    try:
                        out.append(chr(int(hex_digits, 16)))
                    except ValueError:
                        raise AttributeParseError(
                            f"bad unicode escape at position {self.pos}"
                        )
                    self.pos += 6
                else:
                    out.append(_ESCAPES.get(esc, esc))
                    self.pos += 2
            elif ch == quote:
                self.pos += 1
                return "".join(out)
            else:
                out.append(ch)
                self.pos += 1

    def parse_value(self):
        self.skip_ws()
        ch = self.peek()
        if ch in "'\"":
            return self.parse_string()
        if ch == "[":
            return self.parse_list()
        raise self.error("expected a string or a list of strings")

    def parse_list(self) -> list[str]:
        self.expect("[")
        items: list[str] = []
        while True:
            self.skip_ws()
            if self.peek() == "]":
                self.pos += 1
                return items
            items.append(self.parse_string())
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() != "]":
                raise self.error("expected ',' or ']' in list")

    def parse_object(self) -> dict:
        self.skip_ws()
        self.expect("{")
        obj: dict = {}
        while True:
            self.skip_ws()
            if self.peek() == "}":
                self.pos += 1
                return obj
            key = self.parse_string()
            self.skip_ws()
            self.expect(":")
            obj[key] = self.parse_value()
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
            elif self.peek() != "}":
                raise self.error("expected ',' or '}' in object")


def _parse_first_object(raw: str) -> dict:
    """Parse the first balanced object literal; surrounding prose and code
    fences are ignored. Stray '{' before the object is skipped over."""
    start = raw.find("{")
    if start < 0:
        raise NoObjectFound("no '{' in response")
    last_error: AttributeParseError | None = None
    pos = start
    while pos >= 0:
        try:
            return _Scanner(raw, pos).parse_object()
        except AttributeParseError as exc:
            last_error = exc
            pos = raw.find("{", pos + 1)
    assert last_error is not None
    raise last_error


def parse_attribute_response(raw: str) -> AttributeResponse:
    """Extract and parse the first object literal from a model response that
    may be wrapped in prose or code fences. Accepts both the singular
    new_attribute key and its plural form."""
    obj = _parse_first_object(raw)

    if "new_attribute" in obj:
        attrs = obj["new_attribute"]
    elif "new_attributes" in obj:
        attrs = obj["new_attributes"]
    else:
        raise MissingKey("new_attribute")
    if isinstance(attrs, str):
        attrs = [attrs]
    if not isinstance(attrs, list) or any(not isinstance(a, str) or not a for a in attrs):
        raise TypeMismatch("new_attribute")

    if "description" not in obj:
        raise MissingKey("description")
    description = obj["description"]
    if not isinstance(description, str) or not description:
        raise TypeMismatch("description")

    return AttributeResponse(new_attributes=list(attrs), description=description)


# --- hallucination guard --------------------------------------------------

def _contains_subseq(haystack: list[str], needle: list[str]) -> bool:
    if not needle:
        return True
    n = len(needle)
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def tag_coverage(tags: list[str], caption: str, loose: bool = False) -> float:
    """Fraction of tags whose tokenized form appears in the tokenized caption.

    Default mode requires the tag's tokens as a contiguous run; loose mode
    only requires every tag token to appear somewhere (bag of tokens).
    """
    if not tags:
        raise EmptyTagList("coverage needs at least one tag")
    cap_tokens = tokenize(caption)
    cap_set = set(cap_tokens)
    matched = 0
    for tag in tags:
        tag_tokens = tokenize(tag)
        if loose:
            ok = all(t in cap_set for t in tag_tokens)
        else:
            ok = _contains_subseq(cap_tokens, tag_tokens)
        if ok:
            matched += 1
    return matched / len(tags)
