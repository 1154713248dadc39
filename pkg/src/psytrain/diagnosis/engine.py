"""Criteria-based diagnostic reasoning.

Pure functions over the immutable disorder KB: hypothesis ranking by
criteria coverage, pairwise differentials, guideline treatment lookup, and
an advisory-only merge of free-text LLM suggestions that can never reorder
the rule ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from psytrain.cases.models import SymptomInstance
from psytrain.errors import NoGuideline
from psytrain.kb import KnowledgeBase


@dataclass(frozen=True)
class DiagnosisHypothesis:
    disorder_code: str
    coverage: float
    eligible: bool
    matched_tags: tuple[str, ...]
    missing_tags: tuple[str, ...]
    prevalence_weight: float


@dataclass
class DifferentialPair:
    disorder_a: str
    disorder_b: str
    # tag -> disorder code the tag supports
    distinguishing: dict[str, str]


@dataclass
class DifferentialReport:
    codes: list[str]
    pairs: list[DifferentialPair]


@dataclass
class TreatmentRecommendation:
    disorder_code: str
    drugs: list[dict]
    non_drug_notes: str = ""


@dataclass
class MergedSuggestion:
    hypotheses: list[DiagnosisHypothesis]
    llm_narrative: str
    agreement: bool
    unsupported_mentions: list[str] = field(default_factory=list)
    notice: str | None = None


def match_criteria(findings: list[SymptomInstance],
                   kb: KnowledgeBase) -> list[DiagnosisHypothesis]:
    """Score every KB disorder against the findings and rank.

    Eligibility needs matched >= min_required, longest matched onset >=
    min_duration, and no exclusion tag among the findings. Ranking:
    eligible desc, coverage desc, prevalence desc, code asc.
    """
    present = {s.tag for s in findings}
    onset_by_tag: dict[str, float] = {}
    for s in findings:
        onset_by_tag[s.tag] = max(onset_by_tag.get(s.tag, 0.0), s.onset_weeks)

    hypotheses = []
    for disorder in kb.disorders.values():
        criterion = set(disorder.criterion_tags)
        matched = sorted(criterion & present)
        missing = sorted(criterion - present)
        coverage = len(matched) / len(disorder.criterion_tags)
        duration_ok = bool(matched) and max(
            onset_by_tag[t] for t in matched
        ) >= disorder.min_duration_weeks
        excluded = bool(present & disorder.exclusion_tags)
        eligible = (
            len(matched) >= disorder.min_required and duration_ok and not excluded
        )
        hypotheses.append(
            DiagnosisHypothesis(
                disorder_code=disorder.disorder_code,
                coverage=coverage,
                eligible=eligible,
                matched_tags=tuple(matched),
                missing_tags=tuple(missing),
                prevalence_weight=disorder.prevalence_weight,
            )
        )
    hypotheses.sort(
        key=lambda h: (not h.eligible, -h.coverage, -h.prevalence_weight, h.disorder_code)
    )
    return hypotheses


def differential(hypotheses: list[DiagnosisHypothesis],
                 kb: KnowledgeBase) -> DifferentialReport:
    """Pairwise distinguishing features: the symmetric difference of
    criterion tags, each tag annotated with the disorder it supports."""
    codes = [h.disorder_code for h in hypotheses]
    pairs = []
    for i in range(len(codes)):
        for j in range(i + 1, len(codes)):
            a, b = kb.disorders[codes[i]], kb.disorders[codes[j]]
            tags_a, tags_b = set(a.criterion_tags), set(b.criterion_tags)
            distinguishing = {t: a.disorder_code for t in sorted(tags_a - tags_b)}
            distinguishing.update({t: b.disorder_code for t in sorted(tags_b - tags_a)})
            pairs.append(
                DifferentialPair(
                    disorder_a=a.disorder_code,
                    disorder_b=b.disorder_code,
                    distinguishing=distinguishing,
                )
            )
    return DifferentialReport(codes=codes, pairs=pairs)


def recommend_treatment(dx: str, kb: KnowledgeBase,
                        include_tcm: bool = False) -> TreatmentRecommendation:
    disorder = kb.disorders[dx]
    drug_ids = list(disorder.first_line_drugs)
    if include_tcm:
        drug_ids += [d for d in disorder.tcm_options if d not in drug_ids]
    if not drug_ids:
        raise NoGuideline(f"no drug guidance recorded for '{dx}'")
    drugs = []
    for drug_id in drug_ids:
        entry = kb.drugs[drug_id]
        drugs.append({
            "drug_id": drug_id,
            "rationale": f"{entry.name} is listed for {disorder.name}.",
            "adverse_warnings": list(entry.adverse_warnings),
        })
    return TreatmentRecommendation(
        disorder_code=dx,
        drugs=drugs,
        non_drug_notes="Combine pharmacotherapy with structured psychotherapy "
                       "and follow-up review.",
    )


def merge_llm_suggestion(rule_result: list[DiagnosisHypothesis], llm_text: str,
                         kb: KnowledgeBase) -> MergedSuggestion:
    """Attach advisory text to the rule ranking without touching it.

    Any disorder the text names that is not rule-eligible is flagged
    unsupported; the ranking itself is copied verbatim.
    """
    ranking = list(rule_result)
    if not llm_text.strip():
        return MergedSuggestion(
            hypotheses=ranking,
            llm_narrative="",
            agreement=False,
            notice="no advisory text supplied; rule-only record",
        )
    lowered = llm_text.lower()
    mentioned = [
        code for code, disorder in sorted(kb.disorders.items())
        if code in lowered or disorder.name.lower() in lowered
    ]
    eligible = {h.disorder_code for h in ranking if h.eligible}
    unsupported = [c for c in mentioned if c not in eligible]
    top = ranking[0].disorder_code if ranking else None
    return MergedSuggestion(
        hypotheses=ranking,
        llm_narrative=llm_text,
        agreement=top is not None and top in mentioned,
        unsupported_mentions=[f"{c} (unsupported by criteria)" for c in unsupported],
    )
