"""HTTP surface: /api/v1 REST endpoints over the engine modules.

Every route authenticates a bearer JWT, authorizes against the static RBAC
matrix (deny-by-default), and audits critical operations. Clinical logic
lives entirely in the engine modules; handlers translate wire payloads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from pydantic import BaseModel

from psytrain import errors
from psytrain.cases.models import SymptomInstance, TaskState
from psytrain.cases.pipeline import CasePipeline
from psytrain.dialogue.engine import DialogueManager
from psytrain.diagnosis import engine as diagnosis
from psytrain.evaluation.engine import Evaluator
from psytrain.exams import service as exams
from psytrain.gateway import Gateway, ProviderConfig, load_script
from psytrain.kb import KnowledgeBase, load_kb
from psytrain.platform.auth import Authenticator
from psytrain.platform.security import AuditLog, VersionedCache, anonymize, authorize
from psytrain.platform.store import DataStore
from psytrain.prescription.engine import Prescriber, PrescriptionDraft, review

API_PREFIX = "/api/v1"


@dataclass
class AppState:
    kb: KnowledgeBase
    gateway: Gateway
    pipeline: CasePipeline
    dialogue: DialogueManager
    prescriber: Prescriber
    evaluator: Evaluator
    auth: Authenticator
    audit: AuditLog
    cache: VersionedCache
    store: DataStore
    orders: exams.OrderBook
    drafts: dict[str, PrescriptionDraft] = field(default_factory=dict)
    reviews: dict[str, object] = field(default_factory=dict)
    session_dx: dict[str, dict] = field(default_factory=dict)
    session_exams: dict[str, list[str]] = field(default_factory=dict)
    idempotency: dict[str, dict] = field(default_factory=dict)
    eval_seq: dict[str, int] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


class LoginBody(BaseModel):
    login: str
    credential: str


class GenerateBody(BaseModel):
    disorder_code: str
    difficulty: int = 3


class SessionBody(BaseModel):
    case_id: str
    mode: str = "standard"
    seed: int = 0


class TurnBody(BaseModel):
    text: str
    idempotency_key: str | None = None


class RecommendBody(BaseModel):
    symptom_tags: list[str]
    provisional_dx: str | None = None


class OrderBody(BaseModel):
    item_codes: list[str]
    patient_flags: list[str] = []
    session_id: str | None = None
    acknowledge_all: bool = False


class DiagnoseBody(BaseModel):
    session_id: str | None = None
    findings: list[dict] = []
    entered_dx: str | None = None
    llm_advisory: str = ""


class PrescribeBody(BaseModel):
    dx: str
    patient_flags: list[str] = []
    session_id: str | None = None


class ReviewBody(BaseModel):
    patient_flags: list[str] = []


class EvaluateBody(BaseModel):
    dx_entered: str
    prescription_id: str
    user_id: str = "trainee"


def _http_error(exc: Exception) -> HTTPException:
    mapping = [
        ((errors.NotFound, errors.UnknownCase, errors.UnknownSession,
          errors.UnknownDisorder, errors.UnknownItem, errors.UnknownDrug,
          KeyError), 404),
        ((errors.AuthFailed, errors.TokenExpired, errors.TokenInvalid), 401),
        ((errors.AccountLocked,), 423),
        ((errors.InvalidDifficulty, errors.EmptyUtterance,
          errors.TurnOrderViolation, errors.SessionClosed,
          errors.InsufficientFindings, errors.SchemaViolation,
          errors.MissingDiagnosis, errors.SessionNotClosed,
          errors.NoGuideline, ValueError), 422),
    ]
    for types, status in mapping:
        if isinstance(exc, types):
            return HTTPException(status_code=status, detail=str(exc))
    return HTTPException(status_code=500, detail=str(exc))


def build_app(provider=None, kb_dir=None, seed: int = 0,
              config: ProviderConfig | None = None,
              script_path: str | None = None) -> FastAPI:
    kb = load_kb(kb_dir)
    if provider is None:
        if script_path is None:
            from psytrain.kb import default_data_dir
            script_path = str(default_data_dir() / "scripts" / "default.json")
        provider = load_script(script_path)
    gateway = Gateway(provider, config or ProviderConfig())

    state = AppState(
        kb=kb,
        gateway=gateway,
        pipeline=CasePipeline(gateway, kb, seed=seed),
        dialogue=DialogueManager(gateway, kb),
        prescriber=Prescriber(kb, gateway),
        evaluator=Evaluator(kb.feedback_templates, gateway),
        auth=Authenticator(),
        audit=AuditLog(),
        cache=VersionedCache(),
        store=DataStore(),
        orders=exams.OrderBook(kb),
    )
    for login, credential, role in (
        ("admin", "admin-dev-credential", "administrator"),
        ("supervisor", "supervisor-dev-credential", "supervising_physician"),
        ("trainee", "trainee-dev-credential", "trainee"),
    ):
        state.auth.add_account(login, credential, role)

    app = FastAPI(title="psytrain")
    app.state.psytrain = state

    def guard(endpoint: str, method: str):
        def dependency(authorization: str = Header(default="")):
            if not authorization.startswith("Bearer "):
                raise HTTPException(status_code=401, detail="missing bearer token")
            try:
                token = state.auth.verify_token(authorization.removeprefix("Bearer "))
            except errors.TokenExpired as exc:
                raise HTTPException(status_code=401, detail=str(exc))
            except errors.TokenInvalid as exc:
                raise HTTPException(status_code=401, detail=str(exc))
            if not authorize(token.role, endpoint, method):
                raise HTTPException(status_code=403, detail="forbidden")
            return token
        return Depends(dependency)

    # --- auth ---

    @app.post(f"{API_PREFIX}/auth/login")
    def login(body: LoginBody):
        try:
            token = state.auth.authenticate(body.login, body.credential)
        except (errors.AuthFailed, errors.AccountLocked) as exc:
            state.audit.write(body.login, "login_failed", "auth", "denied")
            raise _http_error(exc)
        state.audit.write(body.login, "login", "auth", "success")
        return {"token": token.raw, "role": token.role,
                "expires_at": token.expires_at}

    # --- cases ---

    @app.post(f"{API_PREFIX}/cases/generate")
    def generate_case(body: GenerateBody,
                      token=guard("/cases/generate", "POST")):
        try:
            task = state.pipeline.start_generation(body.disorder_code, body.difficulty)
            state.pipeline.run_to_completion(task)
        except errors.PipelineStalled:
            pass
        except Exception as exc:
            raise _http_error(exc)
        state.audit.write(token.subject, "case_generate",
                          task.id, task.state.value)
        if task.state == TaskState.DONE:
            case = task.draft
            state.dialogue.register_case(case, approved=True)
            state.store.store("case", case.to_dict(), record_id=case.id)
            state.audit.write(token.subject, "case_approved", case.id, "approved")
            quality = state.pipeline.score_quality(case, task.report)
            return {
                "task_id": task.id,
                "state": task.state.value,
                "visited": [s.value for s in task.visited],
                "case": case.to_dict(),
                "quality": {
                    "authenticity": quality.authenticity,
                    "professionalism": quality.professionalism,
                    "completeness": quality.completeness,
                    "overall": quality.overall,
                },
            }
        return {
            "task_id": task.id,
            "state": task.state.value,
            "visited": [s.value for s in task.visited],
            "failure_cause": task.failure_cause,
            "report": task.report.to_dict() if task.report else None,
        }

    @app.get(API_PREFIX + "/cases/{case_id}")
    def get_case(case_id: str, token=guard("/cases/{id}", "GET")):
        try:
            return state.store.retrieve("case", case_id)
        except errors.NotFound as exc:
            raise _http_error(exc)

    # --- sessions ---

    @app.post(f"{API_PREFIX}/sessions")
    def open_session(body: SessionBody, token=guard("/sessions", "POST")):
        weak = None
        if body.mode == "review":
            reports = state.evaluator.profiles.get(token.subject) or []
            if reports:
                last = reports[-1]
                weak = min(last.dims, key=last.dims.get)
        try:
            session = state.dialogue.open_session(
                body.case_id, body.mode, body.seed, weak_dimension=weak
            )
        except Exception as exc:
            raise _http_error(exc)
        state.audit.write(token.subject, "session_open", session.id, "open")
        return {"session_id": session.id, "mode": session.mode,
                "emotion": session.patient_state.emotion}

    @app.post(API_PREFIX + "/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody,
                  token=guard("/sessions/{id}/turns", "POST")):
        if body.idempotency_key:
            cached = state.idempotency.get(f"{session_id}:{body.idempotency_key}")
            if cached is not None:
                return cached
        session = state.dialogue.sessions.get(session_id)
        if session is None:
            raise _http_error(errors.UnknownSession(session_id))
        try:
            doctor_turn = state.dialogue.post_doctor_turn(session, body.text)
            patient_turn = state.dialogue.generate_reply(session)
        except Exception as exc:
            raise _http_error(exc)
        payload = {
            "doctor": {
                "index": doctor_turn.index,
                "text": doctor_turn.text,
                "intent": doctor_turn.intent.kind,
                "entities": list(doctor_turn.intent.entities),
                "flags": doctor_turn.feedback_flags,
            },
            "patient": {"index": patient_turn.index, "text": patient_turn.text},
        }
        if body.idempotency_key:
            state.idempotency[f"{session_id}:{body.idempotency_key}"] = payload
        return payload

    @app.get(API_PREFIX + "/sessions/{session_id}/replay")
    def replay(session_id: str, token=guard("/sessions/{id}/replay", "GET")):
        try:
            return state.dialogue.replay(session_id)
        except Exception as exc:
            raise _http_error(exc)

    # --- exams ---

    @app.post(f"{API_PREFIX}/exams/recommend")
    def recommend_exams(body: RecommendBody,
                        token=guard("/exams/recommend", "POST")):
        try:
            recs = exams.recommend(set(body.symptom_tags), body.provisional_dx, state.kb)
        except Exception as exc:
            raise _http_error(exc)
        return {"recommendations": [
            {"code": r.code, "necessity": r.necessity,
             "cost_effectiveness": r.cost_effectiveness,
             "timeliness": r.timeliness, "priority": r.priority,
             "name": state.kb.exams[r.code].name,
             "cost": state.kb.exams[r.code].cost}
            for r in recs
        ]}

    @app.post(f"{API_PREFIX}/exams/orders")
    def place_order(body: OrderBody, token=guard("/exams/orders", "POST")):
        try:
            order = state.orders.order(body.item_codes, set(body.patient_flags),
                                       case_ref=body.session_id or "")
            if body.acknowledge_all:
                for alert in order.alerts:
                    alert.acknowledged = True
            if not order.alerts or body.acknowledge_all:
                state.orders.confirm(order)
        except Exception as exc:
            raise _http_error(exc)
        if body.session_id:
            state.session_exams.setdefault(body.session_id, []).extend(body.item_codes)
        state.audit.write(token.subject, "exam_order", order.id, order.status)
        return {
            "order_id": order.id,
            "status": order.status,
            "total_cost": order.total_cost,
            "alerts": [
                {"item": a.item_code, "flag": a.flag, "acknowledged": a.acknowledged}
                for a in order.alerts
            ],
        }

    # --- diagnosis ---

    @app.post(f"{API_PREFIX}/diagnoses")
    def diagnose(body: DiagnoseBody, token=guard("/diagnoses", "POST")):
        try:
            findings = [
                SymptomInstance(
                    tag=f["tag"],
                    severity=int(f.get("severity", 1)),
                    onset_weeks=float(f.get("onset_weeks", 0)),
                )
                for f in body.findings
            ]
            ranked = diagnosis.match_criteria(findings, state.kb)
            merged = diagnosis.merge_llm_suggestion(ranked, body.llm_advisory, state.kb)
        except Exception as exc:
            raise _http_error(exc)
        top3 = [h.disorder_code for h in ranked[:3]]
        if body.session_id:
            state.session_dx[body.session_id] = {
                "entered": body.entered_dx, "top3": top3,
            }
        return {
            "hypotheses": [
                {"disorder_code": h.disorder_code, "coverage": h.coverage,
                 "eligible": h.eligible,
                 "matched_tags": list(h.matched_tags),
                 "missing_tags": list(h.missing_tags)}
                for h in ranked
            ],
            "top3": top3,
            "agreement": merged.agreement,
            "unsupported_mentions": merged.unsupported_mentions,
            "advisory": merged.llm_narrative,
        }

    # --- prescriptions ---

    @app.post(f"{API_PREFIX}/prescriptions")
    def prescribe(body: PrescribeBody, token=guard("/prescriptions", "POST")):
        try:
            draft = state.prescriber.propose(
                body.dx, set(body.patient_flags),
                case_ref=body.session_id or "",
            )
        except Exception as exc:
            raise _http_error(exc)
        state.drafts[draft.id] = draft
        return {
            "prescription_id": draft.id,
            "round": draft.round,
            "lines": [
                {"drug_id": l.drug_id, "dose_per_day": l.dose_per_day,
                 "slots": list(l.slots)}
                for l in draft.lines
            ],
            "advisory": draft.advisory,
        }

    @app.post(API_PREFIX + "/prescriptions/{draft_id}/review")
    def review_prescription(draft_id: str, body: ReviewBody,
                            token=guard("/prescriptions/{id}/review", "POST")):
        draft = state.drafts.get(draft_id)
        if draft is None:
            raise _http_error(errors.NotFound(f"prescription/{draft_id}"))
        try:
            result = review(draft, set(body.patient_flags), state.kb)
        except Exception as exc:
            raise _http_error(exc)
        state.reviews[draft_id] = result
        state.audit.write(token.subject, "prescription_review",
                          draft_id, result.verdict)
        return {
            "prescription_id": draft_id,
            "verdict": result.verdict,
            "findings": [
                {"kind": f.kind, "severity": f.severity,
                 "subjects": list(f.subjects), "detail": f.detail}
                for f in result.findings
            ],
        }

    # --- evaluation & progress ---

    @app.post(API_PREFIX + "/evaluations/{session_id}")
    def evaluate(session_id: str, body: EvaluateBody,
                 token=guard("/evaluations/{session}", "POST")):
        session = state.dialogue.sessions.get(session_id)
        if session is None:
            raise _http_error(errors.UnknownSession(session_id))
        rx_review = state.reviews.get(body.prescription_id)
        if rx_review is None:
            raise _http_error(errors.NotFound(
                f"review for prescription/{body.prescription_id}"))
        state.dialogue.close_session(session)
        dx_info = state.session_dx.get(session_id, {})
        with state.lock:
            seq = state.eval_seq.get(body.user_id, 0)
            state.eval_seq[body.user_id] = seq + 1
        try:
            report = state.evaluator.evaluate_session(
                session,
                dx_entered=body.dx_entered,
                rx_review=rx_review,
                top3_codes=dx_info.get("top3", []),
                ordered_exams=state.session_exams.get(session_id, []),
                user_id=body.user_id,
                seq=seq,
            )
        except Exception as exc:
            raise _http_error(exc)
        profile = state.evaluator.track_progress(body.user_id, report)
        state.store.store("report", {
            "session_id": session_id, "dims": report.dims,
            "composite": report.composite,
        })
        state.audit.write(token.subject, "evaluation_write", session_id, "written")
        return {
            "session_id": session_id,
            "dims": report.dims,
            "composite": report.composite,
            "feedback": [
                {"dimension": i.dimension, "kind": i.kind, "text": i.text,
                 "evidence": i.evidence}
                for i in report.feedback
            ],
            "report_count": len(profile.reports),
        }

    @app.get(API_PREFIX + "/users/{user_id}/progress")
    def progress(user_id: str, token=guard("/users/{id}/progress", "GET")):
        reports = state.evaluator.profiles.get(user_id)
        if not reports:
            return {"user_id": user_id, "reports": 0, "trends": {}}
        # Recompute trends from the stored reports without appending.
        from psytrain.evaluation.engine import DIMENSIONS
        trends = {}
        for key in list(DIMENSIONS) + ["composite"]:
            series = [r.dims[key] if key in DIMENSIONS else r.composite
                      for r in reports]
            first, last = series[0], series[-1]
            delta = (100.0 * (last - first) / first
                     if len(series) >= 2 and first > 0 else None)
            trends[key] = {"first": first, "last": last, "delta_percent": delta}
        return {"user_id": user_id, "reports": len(reports), "trends": trends}

    @app.get(f"{API_PREFIX}/admin/audit")
    def audit_trail(token=guard("/admin/audit", "GET")):
        return {"records": [
            {"id": r.id, "actor": anonymize(r.actor),
             "action": r.action, "target": r.target,
             "timestamp": r.timestamp, "outcome": r.outcome}
            for r in state.audit.records()
        ]}

    @app.get(f"{API_PREFIX}/health")
    def health():
        return {"status": "ok"}

    return app
