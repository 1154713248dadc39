"""Declarative case-validation rules.

Rule predicates are named builtins parameterized from validation_rules.json;
extra code-defined predicates can be registered at runtime. Every predicate
is deterministic and total: malformed case fields fail the predicate rather
than raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from psytrain.cases.models import CaseRecord, ValidationReport, Violation
from psytrain.kb import KnowledgeBase

Predicate = Callable[[CaseRecord, KnowledgeBase], bool]

CATEGORIES = ("structure", "terminology", "logic")


@dataclass(frozen=True)
class ValidationRule:
    id: str
    category: str
    severity: str  # blocking | advisory
    description: str
    predicate: Predicate


def _field_value(case: CaseRecord, dotted: str):
    obj = case
    for part in dotted.split("."):
        obj = getattr(obj, part, None)
        if obj is None:
            return None
    return obj


def _text(case: CaseRecord, dotted: str) -> str:
    value = _field_value(case, dotted)
    return value if isinstance(value, str) else ""


# --- builtin predicate factories, keyed by check name ---

def _non_empty_field(field: str) -> Predicate:
    return lambda case, kb: bool(_text(case, field).strip())


def _field_in_values(field: str, values: list[str]) -> Predicate:
    allowed = set(values)
    return lambda case, kb: _field_value(case, field) in allowed


def _age_in_range(lo: int, hi: int) -> Predicate:
    def check(case, kb):
        age = _field_value(case, "demographics.age")
        return isinstance(age, (int, float)) and lo <= age <= hi
    return check


def _field_contains_any(field: str, terms: list[str]) -> Predicate:
    lowered = [t.lower() for t in terms]
    return lambda case, kb: any(t in _text(case, field).lower() for t in lowered)


def _field_avoids_terms(field: str, terms: list[str]) -> Predicate:
    lowered = [t.lower() for t in terms]
    return lambda case, kb: not any(t in _text(case, field).lower() for t in lowered)


def _field_max_length(field: str, max: int) -> Predicate:
    return lambda case, kb: len(_text(case, field)) <= max


def _symptoms_non_empty() -> Predicate:
    return lambda case, kb: bool(case.symptoms)


def _topics_non_empty() -> Predicate:
    return lambda case, kb: bool(case.required_topics)


def _canonical_symptom_tags() -> Predicate:
    return lambda case, kb: all(s.tag in kb.lexicon.topics for s in case.symptoms)


def _known_diagnosis() -> Predicate:
    return lambda case, kb: case.ground_truth_dx in kb.disorders


def _known_reference_exams() -> Predicate:
    return lambda case, kb: all(code in kb.exams for code in case.reference_exams)


def _known_reference_drugs() -> Predicate:
    return lambda case, kb: all(d in kb.drugs for d in case.reference_rx)


def _severity_in_range() -> Predicate:
    return lambda case, kb: all(
        isinstance(s.severity, int) and 0 <= s.severity <= 3 for s in case.symptoms
    )


def _onset_non_negative() -> Predicate:
    return lambda case, kb: all(s.onset_weeks >= 0 for s in case.symptoms)


def _symptoms_match_criteria() -> Predicate:
    def check(case, kb):
        disorder = kb.disorders.get(case.ground_truth_dx)
        if disorder is None:
            return False
        tags = {s.tag for s in case.symptoms}
        return bool(tags & set(disorder.criterion_tags))
    return check


def _duration_reaches_minimum() -> Predicate:
    def check(case, kb):
        disorder = kb.disorders.get(case.ground_truth_dx)
        if disorder is None or not case.symptoms:
            return False
        return max(s.onset_weeks for s in case.symptoms) >= disorder.min_duration_weeks
    return check


def _no_exclusion_tags() -> Predicate:
    def check(case, kb):
        disorder = kb.disorders.get(case.ground_truth_dx)
        if disorder is None:
            return False
        return not ({s.tag for s in case.symptoms} & disorder.exclusion_tags)
    return check


def _min_symptom_count_for_difficulty() -> Predicate:
    def check(case, kb):
        disorder = kb.disorders.get(case.ground_truth_dx)
        if disorder is None:
            return False
        expected = max(1, disorder.min_required - (case.difficulty - 1))
        return len([s for s in case.symptoms if not s.atypical]) >= expected
    return check


def _atypical_flags_consistent() -> Predicate:
    def check(case, kb):
        disorder = kb.disorders.get(case.ground_truth_dx)
        if disorder is None:
            return False
        criterion = set(disorder.criterion_tags)
        return all(s.tag not in criterion for s in case.symptoms if s.atypical)
    return check


def _topics_in_vocabulary() -> Predicate:
    return lambda case, kb: set(case.required_topics) <= kb.lexicon.topics


def _risk_topic_when_suicidal() -> Predicate:
    def check(case, kb):
        has_si = any(s.tag == "suicidal_ideation" and s.severity > 0 for s in case.symptoms)
        return (not has_si) or ("risk_assessment" in case.required_topics)
    return check


def _mood_symptom_present(disorders: list[str], tags: list[str]) -> Predicate:
    watched, mood_tags = set(disorders), set(tags)
    def check(case, kb):
        if case.ground_truth_dx not in watched:
            return True
        return bool({s.tag for s in case.symptoms} & mood_tags)
    return check


_BUILTINS: dict[str, Callable[..., Predicate]] = {
    "non_empty_field": _non_empty_field,
    "field_in_values": _field_in_values,
    "age_in_range": _age_in_range,
    "field_contains_any": _field_contains_any,
    "field_avoids_terms": _field_avoids_terms,
    "field_max_length": _field_max_length,
    "symptoms_non_empty": _symptoms_non_empty,
    "topics_non_empty": _topics_non_empty,
    "canonical_symptom_tags": _canonical_symptom_tags,
    "known_diagnosis": _known_diagnosis,
    "known_reference_exams": _known_reference_exams,
    "known_reference_drugs": _known_reference_drugs,
    "severity_in_range": _severity_in_range,
    "onset_non_negative": _onset_non_negative,
    "symptoms_match_criteria": _symptoms_match_criteria,
    "duration_reaches_minimum": _duration_reaches_minimum,
    "no_exclusion_tags": _no_exclusion_tags,
    "min_symptom_count_for_difficulty": _min_symptom_count_for_difficulty,
    "atypical_flags_consistent": _atypical_flags_consistent,
    "topics_in_vocabulary": _topics_in_vocabulary,
    "risk_topic_when_suicidal": _risk_topic_when_suicidal,
    "mood_symptom_present": _mood_symptom_present,
}


class RuleRegistry:
    """Immutable-after-build set of validation rules."""

    def __init__(self, rules: list[ValidationRule]):
        seen = set()
        for rule in rules:
            if rule.id in seen:
                raise ValueError(f"duplicate rule id {rule.id}")
            if rule.category not in CATEGORIES:
                raise ValueError(f"{rule.id}: unknown category '{rule.category}'")
            seen.add(rule.id)
        self.rules = tuple(rules)

    @classmethod
    def from_specs(cls, specs: list[dict],
                   extra: list[ValidationRule] | None = None) -> "RuleRegistry":
        rules = []
        for spec in specs:
            check = dict(spec["check"])
            name = check.pop("name")
            factory = _BUILTINS.get(name)
            if factory is None:
                raise ValueError(f"{spec['id']}: unknown builtin check '{name}'")
            rules.append(
                ValidationRule(
                    id=spec["id"],
                    category=spec["category"],
                    severity=spec["severity"],
                    description=spec["description"],
                    predicate=factory(**check),
                )
            )
        rules.extend(extra or [])
        return cls(rules)

    def by_category(self, category: str) -> list[ValidationRule]:
        return [r for r in self.rules if r.category == category]


def validate_case(case: CaseRecord, registry: RuleRegistry,
                  kb: KnowledgeBase) -> ValidationReport:
    """Evaluate every rule exactly once; passed iff zero blocking violations."""
    violations: list[Violation] = []
    counts = {c: 0 for c in CATEGORIES}
    for rule in registry.rules:
        try:
            ok = bool(rule.predicate(case, kb))
        except Exception:
            ok = False  # malformed fields count as violations, never crash
        if not ok:
            violations.append(Violation(rule_id=rule.id, detail=rule.description))
            counts[rule.category] += 1
    blocking = {r.id for r in registry.rules if r.severity == "blocking"}
    passed = not any(v.rule_id in blocking for v in violations)
    return ValidationReport(passed=passed, violations=violations, category_counts=counts)
