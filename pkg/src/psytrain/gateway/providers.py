"""LLM provider implementations behind one interface.

Two providers ship: a scripted one replaying file-defined replies (exact
prompt digest first, then ordered regex patterns) for deterministic tests,
and a generic HTTP one for live deployments.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass
from typing import Protocol

from psytrain.errors import ProviderUnavailable, ScriptParseError

UNSCRIPTED_MARKER = "UNSCRIPTED:"


@dataclass(frozen=True)
class ProviderRequest:
    prompt: str
    max_reply_chars: int = 8000
    temperature_hint: float = 0.2
    deadline_ms: int = 1000

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.deadline_ms <= 0:
            raise ValueError("deadline must be positive")
        if self.max_reply_chars <= 0:
            raise ValueError("max_reply_chars must be positive")
        if not 0.0 <= self.temperature_hint <= 1.0:
            raise ValueError("temperature_hint must be in [0,1]")


@dataclass(frozen=True)
class ProviderResponse:
    text: str
    latency_ms: float
    provider_id: str


class Provider(Protocol):
    id: str

    def generate(self, request: ProviderRequest) -> ProviderResponse: ...


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class _ScriptEntry:
    digest: str | None
    pattern: re.Pattern | None
    reply: str
    delay_ms: float


class ScriptedProvider:
    """Deterministic playback provider.

    Matching order: exact prompt digest, then regex patterns in file order.
    Unmatched prompts get a deterministic fallback reply carrying the prompt
    digest, so unscripted traffic is still reproducible.
    """

    id = "scripted"

    def __init__(self, entries: list[_ScriptEntry]):
        self._by_digest = {e.digest: e for e in entries if e.digest}
        self._patterns = [e for e in entries if e.pattern is not None]

    def generate(self, request: ProviderRequest) -> ProviderResponse:
        start = time.perf_counter()
        entry = self._by_digest.get(prompt_digest(request.prompt))
        if entry is None:
            for cand in self._patterns:
                if cand.pattern.search(request.prompt):
                    entry = cand
                    break
        if entry is None:
            text = f"{UNSCRIPTED_MARKER} {prompt_digest(request.prompt)[:16]}"
            delay = 0.0
        else:
            text = entry.reply
            delay = entry.delay_ms
        if delay:
            time.sleep(delay / 1000.0)
        latency = (time.perf_counter() - start) * 1000.0
        return ProviderResponse(text=text, latency_ms=latency, provider_id=self.id)


def load_script(path: str) -> ScriptedProvider:
    """Load a scripted provider from a JSON file.

    Format: array of {"match": {"digest": ...} | {"pattern": ...},
    "reply": ..., "delay_ms"?: ...}. Duplicate digests or patterns are a
    ScriptParseError.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ScriptParseError(f"invalid JSON in {path}: {exc}", line=exc.lineno)

    if not isinstance(raw, list):
        raise ScriptParseError("script root must be an array")

    entries: list[_ScriptEntry] = []
    seen_digests: set[str] = set()
    seen_patterns: set[str] = set()
    for i, item in enumerate(raw):
        match = item.get("match") if isinstance(item, dict) else None
        if not isinstance(match, dict) or "reply" not in item:
            raise ScriptParseError("entry needs 'match' and 'reply'", line=i)
        digest = match.get("digest")
        pattern = match.get("pattern")
        if (digest is None) == (pattern is None):
            raise ScriptParseError("match needs exactly one of digest/pattern", line=i)
        if digest is not None:
            if digest in seen_digests:
                raise ScriptParseError(f"duplicate digest '{digest}'", line=i)
            seen_digests.add(digest)
        compiled = None
        if pattern is not None:
            if pattern in seen_patterns:
                raise ScriptParseError(f"duplicate pattern '{pattern}'", line=i)
            seen_patterns.add(pattern)
            try:
                compiled = re.compile(pattern, re.DOTALL)
            except re.error as exc:
                raise ScriptParseError(f"bad pattern: {exc}", line=i)
        entries.append(
            _ScriptEntry(
                digest=digest,
                pattern=compiled,
                reply=str(item["reply"]),
                delay_ms=float(item.get("delay_ms", 0)),
            )
        )
    return ScriptedProvider(entries)


class HttpProvider:
    """Generic HTTP chat-completion provider.

    POSTs {"prompt", "max_chars", "temperature"} to the configured endpoint
    with a bearer token taken from the LLM_API_TOKEN environment variable and
    expects {"text": ...} back.
    """

    id = "http"

    def __init__(self, endpoint: str, token_env: str = "LLM_API_TOKEN"):
        self.endpoint = endpoint
        self.token_env = token_env

    def generate(self, request: ProviderRequest) -> ProviderResponse:
        import httpx

        headers = {}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        start = time.perf_counter()
        try:
            resp = httpx.post(
                self.endpoint,
                json={
                    "prompt": request.prompt,
                    "max_chars": request.max_reply_chars,
                    "temperature": request.temperature_hint,
                },
                headers=headers,
                timeout=request.deadline_ms / 1000.0,
            )
            resp.raise_for_status()
            text = resp.json()["text"]
        except httpx.TimeoutException:
            from psytrain.errors import Timeout

            raise Timeout(f"provider exceeded {request.deadline_ms} ms")
        except Exception as exc:  # transport / protocol failure
            raise ProviderUnavailable(str(exc))
        latency = (time.perf_counter() - start) * 1000.0
        return ProviderResponse(text=text, latency_ms=latency, provider_id=self.id)
