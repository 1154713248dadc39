from psytrain.prescription.engine import (
    Prescriber,
    PrescriptionDraft,
    PrescriptionLine,
    PrescriptionReview,
    SafetyFinding,
    check_contraindications,
    check_interactions,
    check_timing,
    review,
    verify_dosage,
)

__all__ = [
    "Prescriber",
    "PrescriptionDraft",
    "PrescriptionLine",
    "PrescriptionReview",
    "SafetyFinding",
    "check_contraindications",
    "check_interactions",
    "check_timing",
    "review",
    "verify_dosage",
]
