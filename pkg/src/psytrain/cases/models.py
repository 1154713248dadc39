"""Case records, generation tasks, and validation report types."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, asdict
from enum import Enum

CASE_SCHEMA_VERSION = 1


@dataclass
class SymptomInstance:
    tag: str
    severity: int
    onset_weeks: float
    atypical: bool = False


@dataclass
class Demographics:
    age: int
    sex: str
    occupation: str


@dataclass
class CaseHistory:
    present_illness: str = ""
    past: str = ""
    family: str = ""
    personal: str = ""


@dataclass
class CaseRecord:
    id: str
    disorder_code: str
    difficulty: int
    demographics: Demographics
    chief_complaint: str
    history: CaseHistory
    symptoms: list[SymptomInstance]
    mental_status: str
    ground_truth_dx: str
    required_topics: list[str]
    reference_exams: list[str]
    reference_rx: list[str]
    expert_approved: bool = False

    def to_dict(self) -> dict:
        data = asdict(self)
        data["schema_version"] = CASE_SCHEMA_VERSION
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CaseRecord":
        data = dict(data)
        data.pop("schema_version", None)
        data["demographics"] = Demographics(**data["demographics"])
        data["history"] = CaseHistory(**data["history"])
        data["symptoms"] = [SymptomInstance(**s) for s in data["symptoms"]]
        return cls(**data)


class TaskState(str, Enum):
    INIT = "Init"
    FRAMEWORK = "FrameworkGeneration"
    CONTENT = "ContentFilling"
    CHECKS = "LogicalChecks"
    STYLE = "StyleAdjustment"
    DONE = "Done"
    FAILED = "Failed"


# The only legal forward edges; Failed branches off LogicalChecks only.
PIPELINE_CHAIN = (
    TaskState.INIT,
    TaskState.FRAMEWORK,
    TaskState.CONTENT,
    TaskState.CHECKS,
    TaskState.STYLE,
    TaskState.DONE,
)


@dataclass
class Violation:
    rule_id: str
    detail: str


@dataclass
class ValidationReport:
    passed: bool
    violations: list[Violation]
    category_counts: dict[str, int]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class QualityScore:
    authenticity: float
    professionalism: float
    completeness: float

    @property
    def overall(self) -> float:
        return (self.authenticity + self.professionalism + self.completeness) / 3.0


@dataclass
class GenerationTask:
    id: str
    disorder_code: str
    difficulty: int
    state: TaskState = TaskState.INIT
    draft: CaseRecord | None = None
    report: ValidationReport | None = None
    failure_cause: str | None = None
    transitions: list[tuple[str, float]] = field(default_factory=list)
    visited: list[TaskState] = field(default_factory=list)

    def __post_init__(self):
        if not self.visited:
            self.visited.append(self.state)
            self.transitions.append((self.state.value, time.time()))

    def move_to(self, state: TaskState):
        self.state = state
        self.visited.append(state)
        self.transitions.append((state.value, time.time()))
