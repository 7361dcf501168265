"""Chat-completion client with retries, bounded concurrency, and an on-disk
response cache, plus a deterministic mock provider for offline runs.

Wire format: POST {base}/chat/completions with {model, messages, temperature,
max_tokens}; the reply is read from choices[0].message.content. Credentials
come from LLM_API_KEY / LLM_BASE_URL.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import tempfile
import threading
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import requests

from .errors import TagcapError
from .instruct import InstructionKind, Prompt

log = logging.getLogger(__name__)

# Fixed timestamp for mock results so offline dataset builds are
# byte-reproducible.
MOCK_TIMESTAMP = "1970-01-01T00:00:00Z"


class LLMError(TagcapError):
    pass


class RateLimited(LLMError):
    pass


class RequestTimeout(LLMError):
    pass


class HttpError(LLMError):
    def __init__(self, status: int):
        super().__init__(f"HTTP {status} from completion endpoint")
        self.status = status


class EmptyCompletion(LLMError):
    pass


@dataclass(frozen=True)
class GenerationConfig:
    model_id: str = "gpt-3.5-turbo"
    temperature: float = 1.0
    max_output_tokens: int = 256
    request_timeout: float = 30.0
    max_retries: int = 3
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise TagcapError("temperature must be >= 0")
        if self.max_retries < 0:
            raise TagcapError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise TagcapError("max_in_flight must be >= 1")


@dataclass(frozen=True)
class GenerationResult:
    track_id: str
    kind: InstructionKind
    raw_text: str
    model_id: str
    created_at: str
    from_cache: bool = False


class Provider(ABC):
    """Completes a single prompt; raised LLMErrors are retried by the client
    when transient (RateLimited)."""

    @abstractmethod
    def complete(self, model_id: str, prompt_text: str, temperature: float,
                 max_tokens: int, timeout: float) -> str:
        ...


class HttpProvider(Provider):
    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 session: requests.Session | None = None):
        self.base_url = base_url or os.environ.get("LLM_BASE_URL", "")
        self.api_key = api_key or os.environ.get("LLM_API_KEY", "")
        if not self.base_url:
            raise LLMError("no endpoint configured: set LLM_BASE_URL or pass base_url")
        self.session = session or requests.Session()

    def complete(self, model_id, prompt_text, temperature, max_tokens, timeout):
        body = {
            "model": model_id,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self.session.post(
                self.base_url.rstrip("/") + "/chat/completions",
                json=body,
                headers=headers,
                timeout=timeout,
            )
        except requests.Timeout as exc:
            raise RequestTimeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise LLMError(f"request failed: {exc}") from exc
        if resp.status_code == 429:
            raise RateLimited("rate limited (429)")
        if resp.status_code >= 400:
            raise HttpError(resp.status_code)
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise LLMError(f"unexpected response shape: {exc}") from exc
        if not content:
            raise EmptyCompletion("completion had empty content")
        return content


def _join_natural(tags: list[str]) -> str:
    if len(tags) == 1:
        return tags[0]
    return ", ".join(tags[:-1]) + " and " + tags[-1]


class MockProvider(Provider):
    """Deterministic offline provider: a fixed template per instruction kind
    filled with the prompt's tag list. Counts calls so cache behaviour is
    testable."""

    TEMPLATES = {
        InstructionKind.writing: "This song featuring {tags}.",
        InstructionKind.summary: "A song with {tags}.",
        InstructionKind.paraphrase: "Imagine a track blending {tags}.",
    }

    def __init__(self, fail_prompts: set[str] | None = None):
        self.calls = 0
        self.fail_prompts = fail_prompts or set()
        self._lock = threading.Lock()

    def complete(self, model_id, prompt_text, temperature, max_tokens, timeout):
        with self._lock:
            self.calls += 1
        if prompt_text in self.fail_prompts:
            raise HttpError(500)
        kind, tags = self._parse_prompt(prompt_text)
        joined = _join_natural(tags)
        if kind is InstructionKind.attribute_prediction:
            return json.dumps(
                {
                    "new_attribute": ["steady rhythm"],
                    "description": f"This song featuring {joined} with a steady rhythm.",
                }
            )
        return self.TEMPLATES[kind].format(tags=joined)

    @staticmethod
    def _parse_prompt(prompt_text: str) -> tuple[InstructionKind, list[str]]:
        from .instruct import DEFAULT_TEMPLATES

        for kind, template in DEFAULT_TEMPLATES.items():
            if prompt_text.startswith(template + " "):
                tags = [t.strip() for t in prompt_text[len(template) + 1 :].split(",")]
                return kind, [t for t in tags if t]
        # Unknown instruction text: echo the whole prompt tail.
        return InstructionKind.writing, [prompt_text.rsplit(".", 1)[-1].strip() or "music"]


@dataclass
class BatchFailure:
    index: int
    track_id: str
    error: str


class CaptionClient:
    """Cached, retrying front end over a Provider."""

    def __init__(
        self,
        provider: Provider,
        cfg: GenerationConfig | None = None,
        cache_dir: str | None = None,
        sleep=time.sleep,
        rng: random.Random | None = None,
    ):
        self.provider = provider
        self.cfg = cfg or GenerationConfig()
        self.cache_dir = cache_dir
        self._sleep = sleep
        self._rng = rng or random.Random()
        self.request_count = 0
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    def _cache_key(self, prompt_text: str) -> str:
        payload = f"{self.cfg.model_id}\x00{prompt_text}\x00{self.cfg.temperature}"
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _cache_path(self, key: str) -> str | None:
        if not self.cache_dir:
            return None
        return os.path.join(self.cache_dir, key + ".json")

    def _cache_read(self, key: str) -> str | None:
        path = self._cache_path(key)
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as f:
                return json.load(f)["raw_text"]
        return None

    def _cache_write(self, key: str, raw_text: str) -> None:
        path = self._cache_path(key)
        if not path:
            return
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"raw_text": raw_text}, f, ensure_ascii=False)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _backoff_delay(self, attempt: int) -> float:
        # Base doubles each retry; jitter is additive so delays stay
        # nondecreasing across consecutive attempts.
        base = 0.5 * (2 ** attempt)
        return base + self._rng.uniform(0.0, 0.25 * base)

    def generate(self, prompt: Prompt, track_id: str = "", bypass_cache: bool = False) -> GenerationResult:
        key = self._cache_key(prompt.text)
        cached = None if bypass_cache else self._cache_read(key)
        if cached is not None:
            return GenerationResult(
                track_id=track_id,
                kind=prompt.kind,
                raw_text=cached,
                model_id=self.cfg.model_id,
                created_at=self._now(),
                from_cache=True,
            )
        attempt = 0
        while True:
            try:
                self.request_count += 1
                raw = self.provider.complete(
                    self.cfg.model_id,
                    prompt.text,
                    self.cfg.temperature,
                    self.cfg.max_output_tokens,
                    self.cfg.request_timeout,
                )
                break
            except RateLimited:
                if attempt >= self.cfg.max_retries:
                    raise
                delay = self._backoff_delay(attempt)
                log.warning("rate limited, retrying in %.2fs", delay)
                self._sleep(delay)
                attempt += 1
        if not raw:
            raise EmptyCompletion("provider returned empty text")
        self._cache_write(key, raw)
        return GenerationResult(
            track_id=track_id,
            kind=prompt.kind,
            raw_text=raw,
            model_id=self.cfg.model_id,
            created_at=self._now(),
            from_cache=False,
        )

    def _now(self) -> str:
        if isinstance(self.provider, MockProvider):
            return MOCK_TIMESTAMP
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    def generate_batch(
        self, prompts: list[Prompt], track_ids: list[str] | None = None
    ) -> tuple[list[GenerationResult | None], list[BatchFailure]]:
        """Results in input order (None where an item failed) plus a failure
        report. At most max_in_flight requests are outstanding at once."""
        if track_ids is None:
            track_ids = [""] * len(prompts)
        if len(track_ids) != len(prompts):
            raise TagcapError("track_ids must align with prompts")
        results: list[GenerationResult | None] = [None] * len(prompts)
        failures: list[BatchFailure] = []
        if not prompts:
            return results, failures

        def run(i: int) -> None:
            try:
                results[i] = self.generate(prompts[i], track_ids[i])
            except TagcapError as exc:
                failures.append(BatchFailure(index=i, track_id=track_ids[i], error=str(exc)))

        with ThreadPoolExecutor(max_workers=self.cfg.max_in_flight) as pool:
            list(pool.map(run, range(len(prompts))))
        failures.sort(key=lambda f: f.index)
        return results, failures
