"""RBAC matrix, append-only audit log, versioned cache, and anonymization."""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass, field

from psytrain.errors import AuditStoreUnavailable, VersionConflict

# Static role x (endpoint, method) permission matrix. Absence means deny.
# Endpoint keys use the route template, not the concrete path.
PERMISSION_MATRIX: dict[str, set[tuple[str, str]]] = {
    "administrator": {
        ("/auth/login", "POST"),
        ("/cases/generate", "POST"),
        ("/cases/{id}", "GET"),
        ("/sessions", "POST"),
        ("/sessions/{id}/turns", "POST"),
        ("/sessions/{id}/replay", "GET"),
        ("/exams/recommend", "POST"),
        ("/exams/orders", "POST"),
        ("/diagnoses", "POST"),
        ("/prescriptions", "POST"),
        ("/prescriptions/{id}/review", "POST"),
        ("/evaluations/{session}", "POST"),
        ("/users/{id}/progress", "GET"),
        ("/admin/audit", "GET"),
    },
    "supervising_physician": {
        ("/auth/login", "POST"),
        ("/cases/generate", "POST"),
        ("/cases/{id}", "GET"),
        ("/sessions", "POST"),
        ("/sessions/{id}/turns", "POST"),
        ("/sessions/{id}/replay", "GET"),
        ("/exams/recommend", "POST"),
        ("/exams/orders", "POST"),
        ("/diagnoses", "POST"),
        ("/prescriptions", "POST"),
        ("/prescriptions/{id}/review", "POST"),
        ("/evaluations/{session}", "POST"),
        ("/users/{id}/progress", "GET"),
    },
    "trainee": {
        ("/auth/login", "POST"),
        ("/cases/{id}", "GET"),
        ("/sessions", "POST"),
        ("/sessions/{id}/turns", "POST"),
        ("/sessions/{id}/replay", "GET"),
        ("/exams/recommend", "POST"),
        ("/exams/orders", "POST"),
        ("/diagnoses", "POST"),
        ("/prescriptions", "POST"),
        ("/prescriptions/{id}/review", "POST"),
        ("/evaluations/{session}", "POST"),
        ("/users/{id}/progress", "GET"),
    },
}

ALL_ENDPOINTS: tuple[tuple[str, str], ...] = tuple(sorted(
    {pair for pairs in PERMISSION_MATRIX.values() for pair in pairs}
))

CRITICAL_ACTIONS = (
    "login", "login_failed", "case_generate", "case_approved",
    "prescription_review", "evaluation_write", "exam_order", "session_open",
)


def authorize(role: str, endpoint: str, method: str) -> bool:
    """Deny-by-default decision from the static matrix."""
    return (endpoint, method) in PERMISSION_MATRIX.get(role, set())


@dataclass(frozen=True)
class AuditRecord:
    id: int
    actor: str
    action: str
    target: str
    timestamp: float
    outcome: str


class AuditLog:
    """Append-only audit trail; mutation of stored records is rejected by
    construction (records are frozen, the list only grows)."""

    def __init__(self):
        self._records: list[AuditRecord] = []
        self._lock = threading.Lock()
        self._fail = False  # test hook simulating store outage

    def write(self, actor: str, action: str, target: str, outcome: str) -> int:
        if action not in CRITICAL_ACTIONS:
            raise ValueError(f"'{action}' is not a declared critical action")
        with self._lock:
            if self._fail:
                raise AuditStoreUnavailable("audit store unavailable")
            record = AuditRecord(
                id=len(self._records) + 1,
                actor=actor,
                action=action,
                target=target,
                timestamp=time.time(),
                outcome=outcome,
            )
            self._records.append(record)
            return record.id

    def records(self) -> tuple[AuditRecord, ...]:
        with self._lock:
            return tuple(self._records)


@dataclass(frozen=True)
class CacheEntry:
    key: str
    value: object
    version: int


class VersionedCache:
    """Optimistic-concurrency cache: a put carries the version the writer
    read; the double check (compare then swap under the key lock) rejects
    stale writers so version history per key is strictly increasing."""

    def __init__(self):
        self._entries: dict[str, CacheEntry] = {}
        self._history: dict[str, list[int]] = {}
        self._lock = threading.Lock()

    def get(self, key: str) -> CacheEntry | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, value: object, expected_version: int) -> CacheEntry:
        with self._lock:
            current = self._entries.get(key)
            current_version = current.version if current else 0
            if expected_version != current_version:
                raise VersionConflict(
                    f"{key}: expected v{expected_version}, at v{current_version}"
                )
            entry = CacheEntry(key=key, value=value, version=current_version + 1)
            self._entries[key] = entry
            self._history.setdefault(key, []).append(entry.version)
            return entry

    def history(self, key: str) -> list[int]:
        with self._lock:
            return list(self._history.get(key, []))


# --- anonymization ---

_PHONE_RE = re.compile(r"\b1[3-9]\d{9}\b|\b\d{3}[- ]\d{4}[- ]\d{4}\b")
_NATIONAL_ID_RE = re.compile(r"\b\d{17}[\dXx]\b|\b\d{15}\b")
_ADDRESS_RE = re.compile(
    r"\b\d+\s+[A-Z][a-zA-Z]*\s+(?:Road|Street|Avenue|Lane|Boulevard|Drive)\b"
)


def anonymize(text: str, roster: list[str] | None = None) -> str:
    """Replace roster names and PII patterns with typed placeholders.

    Idempotent: placeholders contain no digits or roster names, so a second
    pass is a no-op.
    """
    out = _NATIONAL_ID_RE.sub("[ID]", text)
    out = _PHONE_RE.sub("[PHONE]", out)
    out = _ADDRESS_RE.sub("[ADDRESS]", out)
    for name in sorted(roster or [], key=len, reverse=True):
        if name:
            out = re.sub(re.escape(name), "[NAME]", out, flags=re.IGNORECASE)
    return out
