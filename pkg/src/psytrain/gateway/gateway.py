"""The single choke point for LLM traffic: deadline, retry, concurrency cap."""

from __future__ import annotations

import concurrent.futures
import logging
import threading
import time
from dataclasses import dataclass

from psytrain.errors import BudgetExceeded, ProviderUnavailable, Timeout
from psytrain.gateway.providers import Provider, ProviderRequest, ProviderResponse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProviderConfig:
    max_retries: int = 2
    backoff_base_ms: float = 50.0
    max_in_flight: int = 8
    default_deadline_ms: int = 1000
    truncate_replies: bool = True

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


class Gateway:
    """Wraps a provider with deadline enforcement, bounded retry, and a
    gateway-global in-flight cap.

    Retry policy: transport failures (ProviderUnavailable) back off
    backoff_base * 2^attempt and retry up to max_retries times; a deadline
    overrun on the final attempt is a Timeout and is never retried past the
    deadline.
    """

    def __init__(self, provider: Provider, config: ProviderConfig | None = None):
        self.provider = provider
        self.config = config or ProviderConfig()
        self._slots = threading.BoundedSemaphore(self.config.max_in_flight)
        self._pool = concurrent.futures.ThreadPoolExecutor(
            max_workers=self.config.max_in_flight + 2
        )

    def complete(self, request: ProviderRequest) -> ProviderResponse:
        cfg = self.config
        with self._slots:
            last_exc: Exception | None = None
            for attempt in range(cfg.max_retries + 1):
                if attempt:
                    time.sleep(cfg.backoff_base_ms * (2 ** (attempt - 1)) / 1000.0)
                try:
                    response = self._attempt(request)
                    return self._apply_budget(request, response)
                except Timeout as exc:
                    raise exc
                except ProviderUnavailable as exc:
                    last_exc = exc
                    logger.warning("provider attempt %d failed: %s", attempt + 1, exc)
            raise ProviderUnavailable(
                f"provider failed after {cfg.max_retries + 1} attempts: {last_exc}"
            )

    def _attempt(self, request: ProviderRequest) -> ProviderResponse:
        future = self._pool.submit(self.provider.generate, request)
        try:
            return future.result(timeout=request.deadline_ms / 1000.0)
        except concurrent.futures.TimeoutError:
            future.cancel()
            raise Timeout(f"provider exceeded deadline of {request.deadline_ms} ms")

    def _apply_budget(
        self, request: ProviderRequest, response: ProviderResponse
    ) -> ProviderResponse:
        if len(response.text) <= request.max_reply_chars:
            return response
        if not self.config.truncate_replies:
            raise BudgetExceeded(
                f"reply of {len(response.text)} chars exceeds {request.max_reply_chars}"
            )
        return ProviderResponse(
            text=response.text[: request.max_reply_chars],
            latency_ms=response.latency_ms,
            provider_id=response.provider_id,
        )

    def close(self):
        self._pool.shutdown(wait=False, cancel_futures=True)
