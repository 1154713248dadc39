"""Unified persistence facade over two store families.

Structured records (users, sessions, reports) and document records (cases,
transcripts) live in separate in-memory families behind one interface, with
optional JSON file export/import for backup and restore.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from psytrain.errors import NotFound, SchemaViolation

# Required top-level fields per record kind.
SCHEMAS: dict[str, tuple[str, ...]] = {
    "user": ("login", "role"),
    "session": ("session_id", "case_id", "turns"),
    "report": ("session_id", "dims", "composite"),
    "case": ("id", "disorder_code", "symptoms", "ground_truth_dx"),
    "transcript": ("session_id", "turns"),
}

STRUCTURED_KINDS = ("user", "session", "report")
DOCUMENT_KINDS = ("case", "transcript")


class DataStore:
    def __init__(self):
        self._structured: dict[str, dict[str, dict]] = {k: {} for k in STRUCTURED_KINDS}
        self._documents: dict[str, dict[str, dict]] = {k: {} for k in DOCUMENT_KINDS}
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    def _family(self, kind: str) -> dict[str, dict]:
        if kind in STRUCTURED_KINDS:
            return self._structured[kind]
        if kind in DOCUMENT_KINDS:
            return self._documents[kind]
        raise SchemaViolation(f"unknown record kind '{kind}'")

    def store(self, kind: str, payload: dict, record_id: str | None = None) -> str:
        family = self._family(kind)
        missing = [f for f in SCHEMAS[kind] if f not in payload]
        if missing:
            raise SchemaViolation(f"{kind} payload missing fields: {missing}")
        with self._lock:
            if record_id is None:
                self._counters[kind] = self._counters.get(kind, 0) + 1
                record_id = f"{kind}-{self._counters[kind]:06d}"
            family[record_id] = json.loads(json.dumps(payload))  # defensive copy
        return record_id

    def retrieve(self, kind: str, record_id: str) -> dict:
        family = self._family(kind)
        with self._lock:
            if record_id not in family:
                raise NotFound(f"{kind}/{record_id}")
            return json.loads(json.dumps(family[record_id]))

    def list_ids(self, kind: str) -> list[str]:
        with self._lock:
            return sorted(self._family(kind))

    def export_to(self, path: str | Path):
        with self._lock:
            snapshot = {
                "structured": self._structured,
                "documents": self._documents,
                "counters": self._counters,
            }
            Path(path).write_text(json.dumps(snapshot, indent=1), encoding="utf-8")

    def import_from(self, path: str | Path):
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        with self._lock:
            self._structured = data["structured"]
            self._documents = data["documents"]
            self._counters = data["counters"]
