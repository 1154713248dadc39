from psytrain.evaluation.engine import (
    DEFAULT_WEIGHTS,
    DIMENSIONS,
    DimensionTrend,
    EvaluationReport,
    Evaluator,
    FeedbackItem,
    ProgressProfile,
    clinical_thinking_score,
    composite_score,
    consultation_skills_score,
    diagnostic_accuracy_score,
    medication_rationality_score,
)

__all__ = [
    "DEFAULT_WEIGHTS",
    "DIMENSIONS",
    "DimensionTrend",
    "EvaluationReport",
    "Evaluator",
    "FeedbackItem",
    "ProgressProfile",
    "clinical_thinking_score",
    "composite_score",
    "consultation_skills_score",
    "diagnostic_accuracy_score",
    "medication_rationality_score",
]
