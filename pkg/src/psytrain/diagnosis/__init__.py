from psytrain.diagnosis.engine import (
    DiagnosisHypothesis,
    DifferentialPair,
    DifferentialReport,
    MergedSuggestion,
    TreatmentRecommendation,
    differential,
    match_criteria,
    merge_llm_suggestion,
    recommend_treatment,
)

__all__ = [
    "DiagnosisHypothesis",
    "DifferentialPair",
    "DifferentialReport",
    "MergedSuggestion",
    "TreatmentRecommendation",
    "differential",
    "match_criteria",
    "merge_llm_suggestion",
    "recommend_treatment",
]
