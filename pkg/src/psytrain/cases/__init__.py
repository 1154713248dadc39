from psytrain.cases.models import (
    CaseHistory,
    CaseRecord,
    Demographics,
    GenerationTask,
    PIPELINE_CHAIN,
    QualityScore,
    SymptomInstance,
    TaskState,
    ValidationReport,
    Violation,
)
from psytrain.cases.pipeline import CasePipeline, derive_symptoms, parse_case_block
from psytrain.cases.rules import RuleRegistry, ValidationRule, validate_case

__all__ = [
    "CaseHistory",
    "CaseRecord",
    "Demographics",
    "GenerationTask",
    "PIPELINE_CHAIN",
    "QualityScore",
    "SymptomInstance",
    "TaskState",
    "ValidationReport",
    "Violation",
    "CasePipeline",
    "derive_symptoms",
    "parse_case_block",
    "RuleRegistry",
    "ValidationRule",
    "validate_case",
]
