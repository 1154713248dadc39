"""Four-dimension session scoring, templated feedback, and progress tracking."""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

from psytrain.dialogue.engine import DialogueSession
from psytrain.errors import MissingDiagnosis, SessionNotClosed
from psytrain.gateway import Gateway, ProviderRequest
from psytrain.prescription.engine import PrescriptionReview

DIMENSIONS = (
    "consultation_skills",
    "clinical_thinking",
    "diagnostic_accuracy",
    "medication_rationality",
)

# Composite weights per dimension, in DIMENSIONS order; they sum to 1.
DEFAULT_WEIGHTS = (0.30, 0.25, 0.30, 0.15)

FLAG_PENALTY = 5.0
NEAR_MISS_SCORE = 60.0
DEFICIENCY_THRESHOLD = 90.0


@dataclass
class FeedbackItem:
    dimension: str
    kind: str  # deficiency | strength | drill
    template_id: str
    text: str
    evidence: dict = field(default_factory=dict)


@dataclass
class EvaluationReport:
    session_id: str
    user_id: str
    seq: int
    dims: dict[str, float]
    composite: float
    feedback: list[FeedbackItem] = field(default_factory=list)
    advisory: str = ""


@dataclass
class DimensionTrend:
    first: float
    last: float
    delta_percent: float | None


@dataclass
class ProgressProfile:
    user_id: str
    reports: list[EvaluationReport]
    trends: dict[str, DimensionTrend]


def consultation_skills_score(session: DialogueSession) -> float:
    """Topic coverage ratio, penalized per logic/empathy flag (floor 0)."""
    required = set(session.case.required_topics)
    covered = len(required & session.asked_topics)
    base = 100.0 * covered / len(required) if required else 100.0
    penalties = sum(
        1
        for turn in session.turns
        for flag in turn.feedback_flags
        if flag["dimension"] in ("logic", "empathy")
    )
    return max(0.0, base - FLAG_PENALTY * penalties)


def clinical_thinking_score(ordered_exams: list[str],
                            reference_exams: list[str]) -> float:
    """Overlap between the ordered workup and the reference workup."""
    if not reference_exams:
        return 100.0
    hit = len(set(ordered_exams) & set(reference_exams))
    return 100.0 * hit / len(reference_exams)


def diagnostic_accuracy_score(dx_entered: str, ground_truth: str,
                              top3_codes: list[str]) -> float:
    if dx_entered == ground_truth:
        return 100.0
    if dx_entered in top3_codes[:3]:
        return NEAR_MISS_SCORE
    return 0.0


def medication_rationality_score(rx_review: PrescriptionReview) -> float:
    majors = sum(1 for f in rx_review.findings if f.severity == "major")
    contra = sum(1 for f in rx_review.findings if f.severity == "contraindicated")
    return max(0.0, 100.0 - 25.0 * majors - 50.0 * contra)


def composite_score(dims: dict[str, float],
                    weights: tuple[float, ...] = DEFAULT_WEIGHTS) -> float:
    return sum(w * dims[d] for d, w in zip(DIMENSIONS, weights))


class Evaluator:
    """Scores closed sessions and maintains per-user progress profiles."""

    def __init__(self, templates: dict[str, str], gateway: Gateway | None = None,
                 weights: tuple[float, ...] = DEFAULT_WEIGHTS):
        self.templates = templates
        self.gateway = gateway
        self.weights = weights
        self.profiles: dict[str, list[EvaluationReport]] = {}
        self._lock = threading.Lock()

    def evaluate_session(self, session: DialogueSession, dx_entered: str,
                         rx_review: PrescriptionReview, top3_codes: list[str],
                         ordered_exams: list[str], user_id: str = "trainee",
                         seq: int = 0, with_advisory: bool = False) -> EvaluationReport:
        if session.status != "closed":
            raise SessionNotClosed(session.id)
        if not dx_entered:
            raise MissingDiagnosis("a diagnosis must be entered before evaluation")

        dims = {
            "consultation_skills": consultation_skills_score(session),
            "clinical_thinking": clinical_thinking_score(
                ordered_exams, session.case.reference_exams
            ),
            "diagnostic_accuracy": diagnostic_accuracy_score(
                dx_entered, session.case.ground_truth_dx, top3_codes
            ),
            "medication_rationality": medication_rationality_score(rx_review),
        }
        report = EvaluationReport(
            session_id=session.id,
            user_id=user_id,
            seq=seq,
            dims=dims,
            composite=composite_score(dims, self.weights),
        )
        report.feedback = self.generate_feedback(
            report, session=session, dx_entered=dx_entered,
            rx_review=rx_review, ordered_exams=ordered_exams,
        )
        if with_advisory and self.gateway is not None:
            report.advisory = self._advisory(report)
        return report

    def generate_feedback(self, report: EvaluationReport, *,
                          session: DialogueSession | None = None,
                          dx_entered: str = "", rx_review=None,
                          ordered_exams: list[str] | None = None) -> list[FeedbackItem]:
        """Templated items: every deficiency cites concrete evidence, and the
        lowest-scoring dimension always gets at least one item."""
        items: list[FeedbackItem] = []

        if session is not None:
            missed = sorted(set(session.case.required_topics) - session.asked_topics)
            for topic in missed:
                items.append(self._fill(
                    "missed_topic", "consultation_skills", "deficiency",
                    {"topic": topic}, evidence={"missed_topic": topic},
                ))
            for turn in session.turns:
                for flag in turn.feedback_flags:
                    items.append(self._fill(
                        "skill_flag", "consultation_skills", "deficiency",
                        {"turn_index": str(turn.index),
                         "flag_detail": flag["detail"],
                         "suggestion": flag["suggestion"]},
                        evidence={"turn_index": turn.index},
                    ))
            if dx_entered and dx_entered != session.case.ground_truth_dx:
                template = (
                    "diagnosis_near"
                    if report.dims["diagnostic_accuracy"] > 0 else "diagnosis_miss"
                )
                items.append(self._fill(
                    template, "diagnostic_accuracy", "deficiency",
                    {"entered": dx_entered, "expected": session.case.ground_truth_dx},
                    evidence={"entered_dx": dx_entered},
                ))
            if ordered_exams is not None:
                for code in session.case.reference_exams:
                    if code not in ordered_exams:
                        items.append(self._fill(
                            "exam_gap", "clinical_thinking", "deficiency",
                            {"exam_code": code}, evidence={"exam_code": code},
                        ))
        if rx_review is not None:
            for finding in rx_review.findings:
                if finding.severity in ("major", "contraindicated"):
                    items.append(self._fill(
                        "medication_finding", "medication_rationality", "deficiency",
                        {"detail": finding.detail},
                        evidence={"finding": finding.detail},
                    ))

        lowest = min(DIMENSIONS, key=lambda d: report.dims[d])
        if all(score >= DEFICIENCY_THRESHOLD for score in report.dims.values()):
            best = max(DIMENSIONS, key=lambda d: report.dims[d])
            items = [self._fill(
                "strength_summary", best, "strength",
                {"dimension": best, "score": f"{report.dims[best]:.0f}"},
            )]
        elif not any(i.dimension == lowest for i in items):
            items.append(self._fill(
                "low_dimension", lowest, "drill",
                {"dimension": lowest,
                 "score": f"{report.dims[lowest]:.0f}",
                 "advice": "Rehearse this part of the workflow on the next case."},
            ))
        return items

    def _fill(self, template_id: str, dimension: str, kind: str,
              slots: dict[str, str], evidence: dict | None = None) -> FeedbackItem:
        text = self.templates[template_id]
        for name, value in slots.items():
            text = text.replace("{" + name + "}", str(value))
        if re.search(r"\{[a-z_]+\}", text):
            raise ValueError(f"unfilled slot in template '{template_id}': {text}")
        return FeedbackItem(
            dimension=dimension,
            kind=kind,
            template_id=template_id,
            text=text,
            evidence=evidence or {},
        )

    def _advisory(self, report: EvaluationReport) -> str:
        prompt = (
            "feedback-elaboration request\n"
            + "\n".join(f"{d}: {report.dims[d]:.1f}" for d in DIMENSIONS)
        )
        try:
            return self.gateway.complete(ProviderRequest(prompt=prompt)).text
        except Exception:
            return ""

    def track_progress(self, user_id: str,
                       new_report: EvaluationReport) -> ProgressProfile:
        with self._lock:
            reports = self.profiles.setdefault(user_id, [])
            reports.append(new_report)
            reports.sort(key=lambda r: r.seq)
            ordered = list(reports)

        trends: dict[str, DimensionTrend] = {}
        keys = list(DIMENSIONS) + ["composite"]
        for key in keys:
            series = [
                r.dims[key] if key in DIMENSIONS else r.composite for r in ordered
            ]
            first, last = series[0], series[-1]
            delta = None
            if len(series) >= 2 and first > 0:
                delta = 100.0 * (last - first) / first
            trends[key] = DimensionTrend(first=first, last=last, delta_percent=delta)
        return ProgressProfile(user_id=user_id, reports=ordered, trends=trends)
