"""Knowledge-base records and loaders.

All clinical content ships as JSON seed files under ``psytrain/data``; values
there are artifact test content, not medical guidance. Loaded KBs are
immutable for the life of the process.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class DisorderCriteria:
    disorder_code: str
    name: str
    criterion_tags: tuple[str, ...]
    min_required: int
    min_duration_weeks: float
    exclusion_tags: frozenset[str]
    prevalence_weight: float
    emotion_profile: str
    first_line_drugs: tuple[str, ...]
    tcm_options: tuple[str, ...]
    required_topics: tuple[str, ...]
    reference_exams: tuple[str, ...]

    def __post_init__(self):
        if self.min_required > len(self.criterion_tags):
            raise ValueError(f"{self.disorder_code}: min_required exceeds criterion count")
        if self.min_duration_weeks < 0:
            raise ValueError(f"{self.disorder_code}: negative min_duration")


@dataclass(frozen=True)
class ExamItem:
    code: str
    name: str
    cost: float
    turnaround_hours: float
    relevant_symptom_tags: frozenset[str]
    relevant_disorders: frozenset[str]
    contraindication_flags: frozenset[str]
    preparation: str = ""
    precautions: str = ""

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"{self.code}: negative cost")
        if self.turnaround_hours <= 0:
            raise ValueError(f"{self.code}: turnaround must be positive")


@dataclass(frozen=True)
class DrugEntry:
    id: str
    name: str
    drug_class: str
    dose_min: float
    dose_max: float
    schedule_constraint: str | None
    contraindication_flags: frozenset[str]
    adverse_warnings: tuple[str, ...]
    alternatives: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 < self.dose_min <= self.dose_max:
            raise ValueError(f"{self.id}: invalid dose range")


@dataclass(frozen=True)
class InteractionEntry:
    drug_a: str
    drug_b: str
    severity: str
    mechanism: str

    SEVERITIES = ("info", "caution", "major", "contraindicated")

    def __post_init__(self):
        if self.drug_a == self.drug_b:
            raise ValueError("interaction pair must name two distinct drugs")
        if self.severity not in self.SEVERITIES:
            raise ValueError(f"unknown severity '{self.severity}'")

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.drug_a, self.drug_b))


@dataclass(frozen=True)
class Lexicon:
    """Pattern lexicon driving intent classification and topic tracking."""

    intents: tuple[dict, ...]
    topics: frozenset[str]
    empathy_markers: tuple[str, ...]
    distress_cues: tuple[str, ...]
    phases: dict[str, int]


@dataclass
class KnowledgeBase:
    disorders: dict[str, DisorderCriteria]
    exams: dict[str, ExamItem]
    drugs: dict[str, DrugEntry]
    interactions: list[InteractionEntry]
    schedule_conflicts: list[frozenset[str]]
    lexicon: Lexicon
    rule_specs: list[dict]
    feedback_templates: dict[str, str]
    interaction_index: dict[frozenset[str], InteractionEntry] = field(init=False)

    def __post_init__(self):
        self.interaction_index = {}
        for entry in self.interactions:
            if entry.pair in self.interaction_index:
                raise ValueError(f"duplicate interaction pair {sorted(entry.pair)}")
            self.interaction_index[entry.pair] = entry

    @property
    def max_exam_cost(self) -> float:
        return max(item.cost for item in self.exams.values())

    @property
    def max_exam_turnaround(self) -> float:
        return max(item.turnaround_hours for item in self.exams.values())


def default_data_dir() -> Path:
    return Path(str(resources.files("psytrain") / "data"))


def _read(path: Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_kb(data_dir: str | Path | None = None) -> KnowledgeBase:
    base = Path(data_dir) if data_dir else default_data_dir()

    disorders = {}
    for raw in _read(base / "disorders.json"):
        rec = DisorderCriteria(
            disorder_code=raw["disorder_code"],
            name=raw["name"],
            criterion_tags=tuple(raw["criterion_tags"]),
            min_required=raw["min_required"],
            min_duration_weeks=raw["min_duration_weeks"],
            exclusion_tags=frozenset(raw.get("exclusion_tags", [])),
            prevalence_weight=raw["prevalence_weight"],
            emotion_profile=raw["emotion_profile"],
            first_line_drugs=tuple(raw.get("first_line_drugs", [])),
            tcm_options=tuple(raw.get("tcm_options", [])),
            required_topics=tuple(raw.get("required_topics", [])),
            reference_exams=tuple(raw.get("reference_exams", [])),
        )
        disorders[rec.disorder_code] = rec

    exams = {}
    for raw in _read(base / "exams.json"):
        item = ExamItem(
            code=raw["code"],
            name=raw["name"],
            cost=raw["cost"],
            turnaround_hours=raw["turnaround_hours"],
            relevant_symptom_tags=frozenset(raw.get("relevant_symptom_tags", [])),
            relevant_disorders=frozenset(raw.get("relevant_disorders", [])),
            contraindication_flags=frozenset(raw.get("contraindication_flags", [])),
            preparation=raw.get("preparation", ""),
            precautions=raw.get("precautions", ""),
        )
        exams[item.code] = item

    drugs = {}
    for raw in _read(base / "drugs.json"):
        drug = DrugEntry(
            id=raw["id"],
            name=raw["name"],
            drug_class=raw["drug_class"],
            dose_min=raw["dose_min"],
            dose_max=raw["dose_max"],
            schedule_constraint=raw.get("schedule_constraint"),
            contraindication_flags=frozenset(raw.get("contraindication_flags", [])),
            adverse_warnings=tuple(raw.get("adverse_warnings", [])),
            alternatives=tuple(raw.get("alternatives", [])),
        )
        drugs[drug.id] = drug

    interactions = [
        InteractionEntry(
            drug_a=raw["drug_a"],
            drug_b=raw["drug_b"],
            severity=raw["severity"],
            mechanism=raw["mechanism"],
        )
        for raw in _read(base / "interactions.json")
    ]

    conflicts = [frozenset(pair) for pair in _read(base / "schedule_conflicts.json")]

    lex_raw = _read(base / "lexicon.json")
    lexicon = Lexicon(
        intents=tuple(lex_raw["intents"]),
        topics=frozenset(lex_raw["topics"]),
        empathy_markers=tuple(lex_raw["empathy_markers"]),
        distress_cues=tuple(lex_raw["distress_cues"]),
        phases=dict(lex_raw["phases"]),
    )

    return KnowledgeBase(
        disorders=disorders,
        exams=exams,
        drugs=drugs,
        interactions=interactions,
        schedule_conflicts=conflicts,
        lexicon=lexicon,
        rule_specs=_read(base / "validation_rules.json"),
        feedback_templates=_read(base / "feedback_templates.json"),
    )
