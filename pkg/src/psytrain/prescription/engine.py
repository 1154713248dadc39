"""Prescription drafting and static safety gating.

Four rule checks (interactions, dosage, timing, contraindications) feed one
review verdict; the optional LLM pass is advisory narrative only and can
never change findings or the verdict.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from psytrain.errors import NoGuideline, UnknownDrug
from psytrain.gateway import Gateway, ProviderRequest
from psytrain.kb import KnowledgeBase

SEVERITY_ORDER = {"info": 0, "caution": 1, "major": 2, "contraindicated": 3}
BLOCKING_SEVERITIES = {"major", "contraindicated"}

DEFAULT_SLOTS = ("morning", "noon", "evening")


@dataclass
class PrescriptionLine:
    drug_id: str
    dose_per_day: float
    slots: tuple[str, ...] = ("morning",)


@dataclass
class PrescriptionDraft:
    id: str
    case_ref: str
    dx_code: str
    lines: list[PrescriptionLine]
    round: int = 1
    advisory: str = ""


@dataclass(frozen=True)
class SafetyFinding:
    kind: str       # interaction | dosage | timing | contraindication
    severity: str
    subjects: tuple[str, ...]
    detail: str


@dataclass
class PrescriptionReview:
    draft_id: str
    findings: list[SafetyFinding]
    verdict: str  # approved | blocked


def _require_known(draft: PrescriptionDraft, kb: KnowledgeBase):
    for line in draft.lines:
        if line.drug_id not in kb.drugs:
            raise UnknownDrug(line.drug_id)


def check_interactions(draft: PrescriptionDraft, kb: KnowledgeBase) -> list[SafetyFinding]:
    """One finding per unordered drug pair present in the interaction KB."""
    _require_known(draft, kb)
    drug_ids = sorted({line.drug_id for line in draft.lines})
    findings = []
    for a, b in itertools.combinations(drug_ids, 2):
        entry = kb.interaction_index.get(frozenset((a, b)))
        if entry:
            findings.append(
                SafetyFinding(
                    kind="interaction",
                    severity=entry.severity,
                    subjects=(a, b),
                    detail=entry.mechanism,
                )
            )
    return findings


def verify_dosage(draft: PrescriptionDraft, kb: KnowledgeBase) -> list[SafetyFinding]:
    """Major finding for any line dosed outside the KB's inclusive range."""
    _require_known(draft, kb)
    findings = []
    for line in draft.lines:
        drug = kb.drugs[line.drug_id]
        if not drug.dose_min <= line.dose_per_day <= drug.dose_max:
            findings.append(
                SafetyFinding(
                    kind="dosage",
                    severity="major",
                    subjects=(line.drug_id,),
                    detail=(
                        f"{drug.name} {line.dose_per_day}/day outside "
                        f"[{drug.dose_min}, {drug.dose_max}]"
                    ),
                )
            )
    return findings


def check_timing(draft: PrescriptionDraft, kb: KnowledgeBase) -> list[SafetyFinding]:
    """Caution when two lines share a slot and their schedule constraints are
    declared incompatible in the conflict table."""
    _require_known(draft, kb)
    findings = []
    seen: set[tuple[str, str, str]] = set()
    for la, lb in itertools.combinations(sorted(draft.lines, key=lambda l: l.drug_id), 2):
        ca = kb.drugs[la.drug_id].schedule_constraint
        cb = kb.drugs[lb.drug_id].schedule_constraint
        if not ca or not cb or frozenset((ca, cb)) not in kb.schedule_conflicts:
            continue
        shared = set(la.slots) & set(lb.slots)
        for slot in sorted(shared):
            key = (la.drug_id, lb.drug_id, slot)
            if key in seen:
                continue
            seen.add(key)
            findings.append(
                SafetyFinding(
                    kind="timing",
                    severity="caution",
                    subjects=(la.drug_id, lb.drug_id),
                    detail=f"'{ca}' conflicts with '{cb}' in the {slot} slot",
                )
            )
    return findings


def check_contraindications(draft: PrescriptionDraft, patient_flags: set[str],
                            kb: KnowledgeBase) -> list[SafetyFinding]:
    _require_known(draft, kb)
    findings = []
    for line in sorted(draft.lines, key=lambda l: l.drug_id):
        drug = kb.drugs[line.drug_id]
        for flag in sorted(drug.contraindication_flags & patient_flags):
            findings.append(
                SafetyFinding(
                    kind="contraindication",
                    severity="contraindicated",
                    subjects=(line.drug_id,),
                    detail=f"{drug.name} contraindicated with patient flag '{flag}'",
                )
            )
    return findings


def review(draft: PrescriptionDraft, patient_flags: set[str],
           kb: KnowledgeBase) -> PrescriptionReview:
    """Union of all four checks; blocked iff any finding is major or worse."""
    findings = (
        check_interactions(draft, kb)
        + verify_dosage(draft, kb)
        + check_timing(draft, kb)
        + check_contraindications(draft, patient_flags, kb)
    )
    blocked = any(f.severity in BLOCKING_SEVERITIES for f in findings)
    return PrescriptionReview(
        draft_id=draft.id,
        findings=findings,
        verdict="blocked" if blocked else "approved",
    )


class Prescriber:
    """Drafts prescriptions from first-line guidance with one automatic
    substitution round when the initial draft is blocked."""

    def __init__(self, kb: KnowledgeBase, gateway: Gateway | None = None):
        self.kb = kb
        self.gateway = gateway
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def _default_dose(self, drug_id: str) -> float:
        drug = self.kb.drugs[drug_id]
        return drug.dose_min

    def _default_slots(self, drug_id: str) -> tuple[str, ...]:
        constraint = self.kb.drugs[drug_id].schedule_constraint
        if constraint == "bedtime_only":
            return ("evening",)
        return ("morning",)

    def propose(self, dx: str, patient_flags: set[str], case_ref: str = "",
                history: str = "") -> PrescriptionDraft:
        disorder = self.kb.disorders.get(dx)
        if disorder is None or not disorder.first_line_drugs:
            raise NoGuideline(f"no drug guidance recorded for '{dx}'")
        primary = disorder.first_line_drugs[0]
        with self._lock:
            draft_id = f"rx-{next(self._counter):04d}"
        draft = PrescriptionDraft(
            id=draft_id,
            case_ref=case_ref,
            dx_code=dx,
            lines=[PrescriptionLine(
                drug_id=primary,
                dose_per_day=self._default_dose(primary),
                slots=self._default_slots(primary),
            )],
        )
        draft.advisory = self._advisory(draft)

        first_review = review(draft, patient_flags, self.kb)
        if first_review.verdict == "blocked":
            draft = self._substitute_round(draft, first_review, patient_flags)
        return draft

    def _substitute_round(self, draft: PrescriptionDraft,
                          rejected: PrescriptionReview,
                          patient_flags: set[str]) -> PrescriptionDraft:
        """Round 2: swap each offending line for its first KB alternative that
        is clean against the patient flags, then stop regardless of outcome."""
        offending = {s for f in rejected.findings
                     if f.severity in BLOCKING_SEVERITIES for s in f.subjects}
        new_lines = []
        for line in draft.lines:
            if line.drug_id not in offending:
                new_lines.append(line)
                continue
            replacement = None
            for alt in self.kb.drugs[line.drug_id].alternatives:
                alt_drug = self.kb.drugs.get(alt)
                if alt_drug and not (alt_drug.contraindication_flags & patient_flags):
                    replacement = alt
                    break
            if replacement is None:
                new_lines.append(line)  # nothing safer known; keep for reviewer
            else:
                new_lines.append(PrescriptionLine(
                    drug_id=replacement,
                    dose_per_day=self._default_dose(replacement),
                    slots=self._default_slots(replacement),
                ))
        revised = PrescriptionDraft(
            id=draft.id,
            case_ref=draft.case_ref,
            dx_code=draft.dx_code,
            lines=new_lines,
            round=2,
        )
        revised.advisory = self._advisory(revised)
        return revised

    def _advisory(self, draft: PrescriptionDraft) -> str:
        if self.gateway is None:
            return ""
        prompt = (
            "rx-advisory request\n"
            f"dx: {draft.dx_code}\n"
            f"drugs: {', '.join(l.drug_id for l in draft.lines)}"
        )
        try:
            return self.gateway.complete(ProviderRequest(prompt=prompt)).text
        except Exception:
            return ""  # advisory only; failures never affect the draft
