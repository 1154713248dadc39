from psytrain.dialogue.engine import (
    DialogueManager,
    DialogueSession,
    Intent,
    PatientState,
    Turn,
    integrate_context,
    understand,
)

__all__ = [
    "DialogueManager",
    "DialogueSession",
    "Intent",
    "PatientState",
    "Turn",
    "integrate_context",
    "understand",
]
