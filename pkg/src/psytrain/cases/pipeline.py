"""Five-state case generation pipeline.

Each advance() performs exactly one transition along
Init -> FrameworkGeneration -> ContentFilling -> LogicalChecks ->
StyleAdjustment -> Done, with Failed branching off LogicalChecks when the
rule engine rejects the draft. The LLM supplies narrative text only; symptom
structure is derived deterministically from the disorder KB and the task id.
"""

from __future__ import annotations

import json
import random
import re
import threading
from collections import defaultdict

from psytrain.cases.models import (
    CaseHistory,
    CaseRecord,
    Demographics,
    GenerationTask,
    QualityScore,
    SymptomInstance,
    TaskState,
    ValidationReport,
)
from psytrain.cases.rules import RuleRegistry, validate_case
from psytrain.errors import (
    InvalidDifficulty,
    PipelineStalled,
    ProviderUnavailable,
    Timeout,
    UnknownDisorder,
)
from psytrain.gateway import Gateway, ProviderRequest, render_prompt, single_layer
from psytrain.kb import DisorderCriteria, KnowledgeBase

_FENCED_CASE_RE = re.compile(r"```case\s*\n(.*?)```", re.DOTALL)

FRAMEWORK_TEMPLATE = single_layer(
    "case-framework",
    "case-framework request\n"
    "disorder: {disorder_name}\n"
    "code: {disorder_code}\n"
    "difficulty: {difficulty}\n"
    "Provide patient demographics and a chief complaint as a fenced ```case\n"
    "block with keys demographics {age, sex, occupation} and chief_complaint.",
    layer="framework",
)

CONTENT_TEMPLATE = single_layer(
    "case-content",
    "case-content request\n"
    "disorder: {disorder_name}\n"
    "code: {disorder_code}\n"
    "symptom tags: {symptom_tags}\n"
    "onset_weeks: {onset_weeks}\n"
    "Provide the clinical narrative as a fenced ```case block with keys\n"
    "history {present_illness, past, family, personal} and mental_status.",
    layer="content",
)

STYLE_TEMPLATE = single_layer(
    "case-style",
    "case-style request\n"
    "code: {disorder_code}\n"
    "chief_complaint: {chief_complaint}\n"
    "Polish the chief complaint into natural first-person phrasing and return\n"
    "a fenced ```case block with key chief_complaint.",
    layer="style",
)


def parse_case_block(text: str) -> dict | None:
    """Extract the fenced structured block from a provider reply, or None."""
    match = _FENCED_CASE_RE.search(text)
    if not match:
        return None
    try:
        data = json.loads(match.group(1))
    except json.JSONDecodeError:
        return None
    return data if isinstance(data, dict) else None


def derive_symptoms(disorder: DisorderCriteria, difficulty: int,
                    rng: random.Random, kb: KnowledgeBase) -> list[SymptomInstance]:
    """Deterministic symptom set: textbook presentation minus (difficulty-1)
    non-cardinal symptoms, with atypical-symptom probability 0.1*(difficulty-1).

    The first criterion tag is treated as the cardinal symptom and never
    removed, so the case stays attributable to its diagnosis.
    """
    tags = list(disorder.criterion_tags)
    cardinal, removable = tags[0], tags[1:]
    to_remove = min(difficulty - 1, len(removable))
    removed = set(rng.sample(removable, to_remove)) if to_remove else set()
    kept = [cardinal] + [t for t in removable if t not in removed]

    onset = disorder.min_duration_weeks + rng.randint(0, 8)
    symptoms = [
        SymptomInstance(
            tag=tag,
            severity=rng.randint(2, 3) if tag == cardinal else rng.randint(1, 3),
            onset_weeks=onset,
        )
        for tag in kept
    ]

    if rng.random() < 0.1 * (difficulty - 1):
        own = set(disorder.criterion_tags) | disorder.exclusion_tags
        foreign = sorted(
            {t for d in kb.disorders.values() for t in d.criterion_tags} - own
        )
        if foreign:
            symptoms.append(
                SymptomInstance(
                    tag=rng.choice(foreign),
                    severity=1,
                    onset_weeks=max(1, onset // 2),
                    atypical=True,
                )
            )
    return symptoms


class CasePipeline:
    """Coordinates generation tasks; a single task is single-writer."""

    def __init__(self, gateway: Gateway, kb: KnowledgeBase,
                 registry: RuleRegistry | None = None, seed: int = 0):
        self.gateway = gateway
        self.kb = kb
        self.registry = registry or RuleRegistry.from_specs(kb.rule_specs)
        self.seed = seed
        self.tasks: dict[str, GenerationTask] = {}
        self._counter = 0
        self._counter_lock = threading.Lock()
        self._task_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    def start_generation(self, disorder_code: str, difficulty: int) -> GenerationTask:
        if disorder_code not in self.kb.disorders:
            raise UnknownDisorder(disorder_code)
        if not isinstance(difficulty, int) or not 1 <= difficulty <= 5:
            raise InvalidDifficulty(str(difficulty))
        with self._counter_lock:
            self._counter += 1
            task_id = f"case-{disorder_code}-d{difficulty}-{self.seed}-{self._counter:04d}"
        task = GenerationTask(id=task_id, disorder_code=disorder_code,
                              difficulty=difficulty)
        self.tasks[task_id] = task
        return task

    def advance(self, task: GenerationTask) -> GenerationTask:
        with self._task_locks[task.id]:
            return self._advance_locked(task)

    def run_to_completion(self, task: GenerationTask) -> GenerationTask:
        while task.state not in (TaskState.DONE, TaskState.FAILED):
            self.advance(task)
        return task

    def _advance_locked(self, task: GenerationTask) -> GenerationTask:
        if task.state in (TaskState.DONE, TaskState.FAILED):
            raise PipelineStalled(f"task {task.id} already terminal ({task.state.value})")
        try:
            if task.state == TaskState.INIT:
                task.move_to(TaskState.FRAMEWORK)
                self._do_framework(task)
            elif task.state == TaskState.FRAMEWORK:
                task.move_to(TaskState.CONTENT)
                self._do_content(task)
            elif task.state == TaskState.CONTENT:
                task.move_to(TaskState.CHECKS)
                task.report = self.validate(task.draft)
            elif task.state == TaskState.CHECKS:
                if task.report is None or not task.report.passed:
                    task.failure_cause = "validation failed: " + ", ".join(
                        v.rule_id for v in (task.report.violations if task.report else [])
                    )
                    task.move_to(TaskState.FAILED)
                else:
                    task.move_to(TaskState.STYLE)
                    self._do_style(task)
            elif task.state == TaskState.STYLE:
                task.move_to(TaskState.DONE)
        except (ProviderUnavailable, Timeout) as exc:
            task.failure_cause = f"provider error: {exc}"
            task.move_to(TaskState.FAILED)
            raise PipelineStalled(task.failure_cause) from exc
        return task

    def validate(self, case: CaseRecord | None) -> ValidationReport:
        if case is None:
            return ValidationReport(
                passed=False,
                violations=[],
                category_counts={"structure": 0, "terminology": 0, "logic": 0},
            )
        return validate_case(case, self.registry, self.kb)

    def score_quality(self, case: CaseRecord, report: ValidationReport) -> QualityScore:
        """Axis = 5 * (passing rules in mapped category / rules in category).

        Mapping: authenticity <- logic, professionalism <- terminology,
        completeness <- structure.
        """
        failed = {v.rule_id for v in report.violations}

        def axis(category: str) -> float:
            rules = self.registry.by_category(category)
            if not rules:
                return 5.0
            passing = sum(1 for r in rules if r.id not in failed)
            return 5.0 * passing / len(rules)

        return QualityScore(
            authenticity=axis("logic"),
            professionalism=axis("terminology"),
            completeness=axis("structure"),
        )

    # --- stage work ---

    def _complete(self, prompt: str) -> str:
        request = ProviderRequest(
            prompt=prompt,
            deadline_ms=self.gateway.config.default_deadline_ms,
        )
        return self.gateway.complete(request).text

    def _do_framework(self, task: GenerationTask):
        disorder = self.kb.disorders[task.disorder_code]
        prompt = render_prompt(FRAMEWORK_TEMPLATE, {
            "disorder_name": disorder.name,
            "disorder_code": disorder.disorder_code,
            "difficulty": str(task.difficulty),
        })
        block = parse_case_block(self._complete(prompt)) or {}
        demo = block.get("demographics", {})
        task.draft = CaseRecord(
            id=task.id,
            disorder_code=task.disorder_code,
            difficulty=task.difficulty,
            demographics=Demographics(
                age=demo.get("age", 0),
                sex=demo.get("sex", ""),
                occupation=demo.get("occupation", ""),
            ),
            chief_complaint=block.get("chief_complaint", ""),
            history=CaseHistory(),
            symptoms=[],
            mental_status="",
            ground_truth_dx=task.disorder_code,
            required_topics=list(disorder.required_topics),
            reference_exams=list(disorder.reference_exams),
            reference_rx=list(disorder.first_line_drugs),
        )

    def _do_content(self, task: GenerationTask):
        disorder = self.kb.disorders[task.disorder_code]
        rng = random.Random(f"{task.id}")
        draft = task.draft
        draft.symptoms = derive_symptoms(disorder, task.difficulty, rng, self.kb)
        prompt = render_prompt(CONTENT_TEMPLATE, {
            "disorder_name": disorder.name,
            "disorder_code": disorder.disorder_code,
            "symptom_tags": ", ".join(s.tag for s in draft.symptoms),
            "onset_weeks": str(max(s.onset_weeks for s in draft.symptoms)),
        })
        block = parse_case_block(self._complete(prompt))
        if block is None:
            return  # empty narrative fields fail structure rules at LogicalChecks
        history = block.get("history", {})
        draft.history = CaseHistory(
            present_illness=history.get("present_illness", ""),
            past=history.get("past", ""),
            family=history.get("family", ""),
            personal=history.get("personal", ""),
        )
        draft.mental_status = block.get("mental_status", "")

    def _do_style(self, task: GenerationTask):
        prompt = render_prompt(STYLE_TEMPLATE, {
            "disorder_code": task.disorder_code,
            "chief_complaint": task.draft.chief_complaint,
        })
        block = parse_case_block(self._complete(prompt))
        # Style is cosmetic: keep the validated wording when the reply has no block.
        if block and block.get("chief_complaint"):
            task.draft.chief_complaint = str(block["chief_complaint"])
