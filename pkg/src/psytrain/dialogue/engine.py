"""Simulated-patient dialogue engine.

Turn processing runs in three stages: understand the doctor's utterance
(lexicon intent matching), integrate context (bounded window over case
summary, patient state, and recent turns), and generate the patient reply
through the LLM gateway under a persona prompt. Per-turn skill feedback and
full-session replay are deterministic heuristics over the same lexicon.
"""

from __future__ import annotations

import logging
import random
import re
import threading
from dataclasses import dataclass, field

from psytrain.cases.models import CaseRecord
from psytrain.errors import (
    CaseNotApproved,
    EmptyUtterance,
    SessionClosed,
    TurnOrderViolation,
    UnknownCase,
    UnknownSession,
)
from psytrain.gateway import Gateway, ProviderRequest
from psytrain.kb import KnowledgeBase, Lexicon

logger = logging.getLogger(__name__)

INTENT_KINDS = (
    "greeting", "symptom_query", "history_exploration",
    "psychological_assessment", "risk_assessment", "closing", "other",
)

CONTEXT_TURN_BUDGET = 20
BASE_DISCLOSURE_THRESHOLD = 1


@dataclass(frozen=True)
class Intent:
    kind: str
    entities: tuple[str, ...]


@dataclass
class Turn:
    index: int
    speaker: str  # doctor | patient
    text: str
    intent: Intent | None = None
    feedback_flags: list[dict] = field(default_factory=list)


@dataclass
class PatientState:
    emotion: str
    disclosure_threshold: int
    active_symptoms: dict[str, int]  # tag -> severity


@dataclass
class DialogueSession:
    id: str
    case: CaseRecord
    mode: str  # standard | challenge | review
    seed: int
    patient_state: PatientState
    turns: list[Turn] = field(default_factory=list)
    asked_topics: set[str] = field(default_factory=set)
    status: str = "open"
    focus_dimension: str | None = None

    def last_turn(self) -> Turn | None:
        return self.turns[-1] if self.turns else None


@dataclass
class DialogueContext:
    text: str
    turn_count: int


def understand(utterance: str, lexicon: Lexicon) -> Intent:
    """Classify a doctor utterance against the ordered pattern lexicon.

    The first matching pattern fixes the intent kind; entities accumulate
    from every matching pattern. No match at all yields 'other'.
    """
    if not utterance or not utterance.strip():
        raise EmptyUtterance("utterance must be non-empty")
    kind = None
    entities: set[str] = set()
    for entry in lexicon.intents:
        if re.search(entry["pattern"], utterance, re.IGNORECASE):
            if kind is None:
                kind = entry["intent"]
            entities.update(entry["entities"])
    return Intent(kind=kind or "other", entities=tuple(sorted(entities)))


def _case_summary(case: CaseRecord) -> str:
    return (
        f"case summary: {case.demographics.age}-year-old "
        f"{case.demographics.sex} {case.demographics.occupation}; "
        f"chief complaint: {case.chief_complaint}"
    )


def _persona_block(session: DialogueSession, kb: KnowledgeBase) -> str:
    """Persona directive with disclosure masking: symptoms below the
    threshold never reach the prompt."""
    state = session.patient_state
    disclosed = sorted(
        (tag, sev) for tag, sev in state.active_symptoms.items()
        if sev >= state.disclosure_threshold
    )
    symptom_text = ", ".join(f"{tag}({sev})" for tag, sev in disclosed) or "none disclosed"
    return (
        f"persona directive: emotion={state.emotion}; mode={session.mode}; "
        f"disclosed symptoms: {symptom_text}"
    )


def integrate_context(session: DialogueSession, intent: Intent,
                      kb: KnowledgeBase,
                      turn_budget: int = CONTEXT_TURN_BUDGET) -> DialogueContext:
    """Assemble the bounded context window: the case summary and persona
    block always survive; truncation drops oldest turns first."""
    recent = session.turns[-turn_budget:]
    lines = [
        _case_summary(session.case),
        _persona_block(session, kb),
        f"current intent: {intent.kind}",
    ]
    for turn in recent:
        lines.append(f"{turn.speaker}: {turn.text}")
    return DialogueContext(text="\n".join(lines), turn_count=len(recent))


class DialogueManager:
    """Owns sessions; mutating operations are serialized per session id."""

    def __init__(self, gateway: Gateway, kb: KnowledgeBase):
        self.gateway = gateway
        self.kb = kb
        self.sessions: dict[str, DialogueSession] = {}
        self.cases: dict[str, CaseRecord] = {}
        self._counter = 0
        self._lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}

    def register_case(self, case: CaseRecord, approved: bool = True):
        case.expert_approved = approved
        self.cases[case.id] = case

    def open_session(self, case_id: str, mode: str, seed: int,
                     weak_dimension: str | None = None) -> DialogueSession:
        case = self.cases.get(case_id)
        if case is None:
            raise UnknownCase(case_id)
        if not case.expert_approved:
            raise CaseNotApproved(case_id)
        if mode not in ("standard", "challenge", "review"):
            raise ValueError(f"unknown mode '{mode}'")

        disorder = self.kb.disorders[case.disorder_code]
        threshold = BASE_DISCLOSURE_THRESHOLD
        active = {s.tag: s.severity for s in case.symptoms}
        focus = None

        if mode == "challenge":
            threshold += 1
            rng = random.Random(seed)
            own = set(disorder.criterion_tags) | disorder.exclusion_tags | set(active)
            foreign = sorted(
                {t for d in self.kb.disorders.values() for t in d.criterion_tags} - own
            )
            if foreign:
                active[rng.choice(foreign)] = 3  # the planted atypical symptom
        elif mode == "review":
            if weak_dimension:
                focus = weak_dimension
            else:
                logger.info("review mode without prior evaluations; "
                            "falling back to standard behavior")

        with self._lock:
            self._counter += 1
            session_id = f"sess-{self._counter:04d}"
        session = DialogueSession(
            id=session_id,
            case=case,
            mode=mode,
            seed=seed,
            patient_state=PatientState(
                emotion=disorder.emotion_profile,
                disclosure_threshold=threshold,
                active_symptoms=active,
            ),
            focus_dimension=focus,
        )
        self.sessions[session_id] = session
        self._session_locks[session_id] = threading.Lock()
        return session

    def _locked(self, session: DialogueSession) -> threading.Lock:
        return self._session_locks[session.id]

    def post_doctor_turn(self, session: DialogueSession, text: str) -> Turn:
        with self._locked(session):
            if session.status != "open":
                raise SessionClosed(session.id)
            last = session.last_turn()
            if last is not None and last.speaker == "doctor":
                raise TurnOrderViolation("doctor turns must alternate with patient turns")
            intent = understand(text, self.kb.lexicon)
            turn = Turn(index=len(session.turns), speaker="doctor",
                        text=text, intent=intent)
            session.turns.append(turn)
            session.asked_topics.update(
                t for t in intent.entities if t in self.kb.lexicon.topics
            )
            turn.feedback_flags = self.analyze_turn(session)
            return turn

    def generate_reply(self, session: DialogueSession) -> Turn:
        with self._locked(session):
            if session.status != "open":
                raise SessionClosed(session.id)
            last = session.last_turn()
            if last is None or last.speaker != "doctor":
                raise TurnOrderViolation("patient reply requires a preceding doctor turn")
            context = integrate_context(session, last.intent, self.kb)
            prompt = (
                "persona-reply request\n"
                f"{context.text}\n"
                f"doctor: {last.text}"
            )
            response = self.gateway.complete(ProviderRequest(prompt=prompt))
            turn = Turn(index=len(session.turns), speaker="patient",
                        text=response.text)
            session.turns.append(turn)
            return turn

    def analyze_turn(self, session: DialogueSession) -> list[dict]:
        """Deterministic skill heuristics for the latest doctor turn."""
        turn = session.last_turn()
        if turn is None or turn.speaker != "doctor" or turn.intent is None:
            raise TurnOrderViolation("latest turn must be a doctor turn with intent")
        flags: list[dict] = []
        phases = self.kb.lexicon.phases
        current_phase = phases.get(turn.intent.kind, 2)
        prior_doctor = [t for t in session.turns[:-1]
                        if t.speaker == "doctor" and t.intent]
        max_prior_phase = max(
            (phases.get(t.intent.kind, 2) for t in prior_doctor), default=0
        )
        if current_phase - max_prior_phase >= 2 and current_phase >= 4:
            flags.append({
                "dimension": "logic",
                "detail": f"'{turn.intent.kind}' question out of consultation order",
                "suggestion": "Explore symptoms and history before moving to "
                              "risk assessment or closing.",
            })
        if turn.intent.kind == "other" and not turn.intent.entities:
            flags.append({
                "dimension": "professionalism",
                "detail": "question used no recognized clinical terminology",
                "suggestion": "Anchor the question on a specific symptom or "
                              "history domain.",
            })
        prev = session.turns[-2] if len(session.turns) >= 2 else None
        if prev is not None and prev.speaker == "patient":
            lowered_prev = prev.text.lower()
            distressed = any(cue in lowered_prev for cue in self.kb.lexicon.distress_cues)
            lowered_now = turn.text.lower()
            empathic = any(m in lowered_now for m in self.kb.lexicon.empathy_markers)
            if distressed and not empathic:
                flags.append({
                    "dimension": "empathy",
                    "detail": "no empathic acknowledgment after a distress cue",
                    "suggestion": "Acknowledge the patient's distress before "
                                  "the next question.",
                })
        if session.focus_dimension and any(
            f["dimension"] == session.focus_dimension for f in flags
        ):
            flags.append({
                "dimension": session.focus_dimension,
                "detail": "review-mode drill on your weakest dimension",
                "suggestion": "Pause and rephrase applying the previous suggestion.",
            })
        return flags

    def close_session(self, session: DialogueSession):
        with self._locked(session):
            session.status = "closed"

    def missed_topics(self, session: DialogueSession) -> list[str]:
        return sorted(set(session.case.required_topics) - session.asked_topics)

    def replay(self, session_id: str) -> dict:
        """Read-only annotated transcript; identical across calls."""
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        entries = []
        for turn in session.turns:
            entries.append({
                "index": turn.index,
                "speaker": turn.speaker,
                "text": turn.text,
                "intent": turn.intent.kind if turn.intent else None,
                "entities": list(turn.intent.entities) if turn.intent else [],
                "flags": [dict(f) for f in turn.feedback_flags],
            })
        return {
            "session_id": session.id,
            "case_id": session.case.id,
            "mode": session.mode,
            "turns": entries,
            "missed_topics": self.missed_topics(session),
        }
