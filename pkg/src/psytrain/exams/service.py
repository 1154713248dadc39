"""Examination recommendation, ordering, and result parsing."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from psytrain.errors import InsufficientFindings, ParseError, UnknownItem
from psytrain.kb import KnowledgeBase

# Priority = 0.5*necessity + 0.3*cost_effectiveness + 0.2*timeliness.
# The three factors are KB-normalized to [0,1]; weights are configurable.
DEFAULT_WEIGHTS = (0.5, 0.3, 0.2)


@dataclass(frozen=True)
class ExamRecommendation:
    code: str
    necessity: float
    cost_effectiveness: float
    timeliness: float
    priority: float


@dataclass
class ExamAlert:
    item_code: str
    flag: str
    acknowledged: bool = False


@dataclass
class ExamOrder:
    id: str
    case_ref: str
    item_codes: list[str]
    total_cost: float
    alerts: list[ExamAlert]
    status: str = "draft"  # draft | confirmed


@dataclass
class ExamResultValue:
    analyte: str
    value: float
    unit: str
    ref_low: float
    ref_high: float


@dataclass
class Finding:
    analyte: str
    abnormal: bool
    direction: str | None  # high | low | None when in range


def score_item(item, symptom_tags: set[str], provisional_dx: str | None,
               kb: KnowledgeBase, weights=DEFAULT_WEIGHTS) -> ExamRecommendation:
    relevance = item.relevant_symptom_tags | item.relevant_disorders
    inputs = set(symptom_tags)
    if provisional_dx:
        inputs.add(provisional_dx)
    necessity = len(relevance & inputs) / len(relevance) if relevance else 0.0
    cost_eff = 1.0 - item.cost / kb.max_exam_cost
    timeliness = 1.0 - item.turnaround_hours / kb.max_exam_turnaround
    w_n, w_c, w_t = weights
    return ExamRecommendation(
        code=item.code,
        necessity=necessity,
        cost_effectiveness=cost_eff,
        timeliness=timeliness,
        priority=w_n * necessity + w_c * cost_eff + w_t * timeliness,
    )


def recommend(symptom_tags: set[str], provisional_dx: str | None,
              kb: KnowledgeBase, weights=DEFAULT_WEIGHTS) -> list[ExamRecommendation]:
    """Score every KB item; sort by priority desc, tie-break code asc."""
    if not symptom_tags:
        raise InsufficientFindings("symptom set is empty")
    recs = [
        score_item(item, symptom_tags, provisional_dx, kb, weights)
        for item in kb.exams.values()
    ]
    recs.sort(key=lambda r: (-r.priority, r.code))
    return recs


class OrderBook:
    """Creates and confirms exam orders; single-writer per order id."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.orders: dict[str, ExamOrder] = {}
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def order(self, item_codes: list[str], patient_flags: set[str],
              case_ref: str = "") -> ExamOrder:
        for code in item_codes:
            if code not in self.kb.exams:
                raise UnknownItem(code)
        alerts = [
            ExamAlert(item_code=code, flag=flag)
            for code in item_codes
            for flag in sorted(self.kb.exams[code].contraindication_flags & patient_flags)
        ]
        with self._lock:
            order_id = f"exo-{next(self._counter):04d}"
        placed = ExamOrder(
            id=order_id,
            case_ref=case_ref,
            item_codes=list(item_codes),
            total_cost=sum(self.kb.exams[c].cost for c in item_codes),
            alerts=alerts,
        )
        self.orders[order_id] = placed
        return placed

    def acknowledge(self, order: ExamOrder, item_code: str, flag: str):
        for alert in order.alerts:
            if alert.item_code == item_code and alert.flag == flag:
                alert.acknowledged = True

    def confirm(self, order: ExamOrder) -> ExamOrder:
        if any(not a.acknowledged for a in order.alerts):
            raise ValueError("cannot confirm: unacknowledged contraindication alerts")
        order.status = "confirmed"
        return order


def parse_result(values: list[dict]) -> list[Finding]:
    """Flag each analyte outside [ref_low, ref_high]; bounds are inclusive."""
    findings = []
    for raw in values:
        try:
            value = float(raw["value"])
            low = float(raw["ref_low"])
            high = float(raw["ref_high"])
            analyte = str(raw["analyte"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed result row {raw!r}: {exc}")
        if low > high:
            raise ParseError(f"{analyte}: ref_low exceeds ref_high")
        if value > high:
            findings.append(Finding(analyte=analyte, abnormal=True, direction="high"))
        elif value < low:
            findings.append(Finding(analyte=analyte, abnormal=True, direction="low"))
        else:
            findings.append(Finding(analyte=analyte, abnormal=False, direction=None))
    return findings
