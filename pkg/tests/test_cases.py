import random

import pytest
from hypothesis import given, settings, strategies as st

from psytrain import errors
from psytrain.cases import (
    CasePipeline,
    PIPELINE_CHAIN,
    TaskState,
    derive_symptoms,
    parse_case_block,
    validate_case,
)
from psytrain.cases.rules import RuleRegistry
from psytrain.gateway import Gateway, ProviderConfig, ProviderResponse


class TestParseCaseBlock:
    def test_extracts_fenced_json(self):
        text = 'before\n```case\n{"chief_complaint": "tired"}\n```\nafter'
        assert parse_case_block(text) == {"chief_complaint": "tired"}

    def test_no_block_returns_none(self):
        assert parse_case_block("no fence here") is None

    def test_bad_json_returns_none(self):
        assert parse_case_block("```case\n{oops\n```") is None


class TestDeriveSymptoms:
    def test_deterministic_for_same_seed(self, kb):
        disorder = kb.disorders["mdd"]
        a = derive_symptoms(disorder, 3, random.Random(42), kb)
        b = derive_symptoms(disorder, 3, random.Random(42), kb)
        assert a == b

    @pytest.mark.parametrize("difficulty", [1, 2, 3, 4, 5])
    def test_cardinal_symptom_always_kept(self, kb, difficulty):
        for code, disorder in kb.disorders.items():
            for seed in range(20):
                symptoms = derive_symptoms(disorder, difficulty, random.Random(seed), kb)
                tags = [s.tag for s in symptoms]
                assert disorder.criterion_tags[0] in tags, (code, difficulty, seed)

    def test_difficulty_removes_symptoms(self, kb):
        disorder = kb.disorders["mdd"]
        easy = derive_symptoms(disorder, 1, random.Random(0), kb)
        hard = derive_symptoms(disorder, 5, random.Random(0), kb)
        own_easy = [s for s in easy if not s.atypical]
        own_hard = [s for s in hard if not s.atypical]
        assert len(own_hard) < len(own_easy)
        assert len(own_easy) == len(disorder.criterion_tags)

    def test_onset_at_least_min_duration(self, kb):
        for disorder in kb.disorders.values():
            for seed in range(10):
                symptoms = derive_symptoms(disorder, 2, random.Random(seed), kb)
                for s in symptoms:
                    if not s.atypical:
                        assert s.onset_weeks >= disorder.min_duration_weeks

    def test_atypical_never_at_difficulty_one(self, kb):
        disorder = kb.disorders["gad"]
        for seed in range(50):
            symptoms = derive_symptoms(disorder, 1, random.Random(seed), kb)
            assert not any(s.atypical for s in symptoms)


class TestPipeline:
    def test_unknown_disorder(self, pipeline):
        with pytest.raises(errors.UnknownDisorder):
            pipeline.start_generation("nope", 2)

    @pytest.mark.parametrize("difficulty", [0, 6, "3"])
    def test_invalid_difficulty(self, pipeline, difficulty):
        with pytest.raises(errors.InvalidDifficulty):
            pipeline.start_generation("mdd", difficulty)

    def test_visits_exact_five_state_chain(self, pipeline):
        task = pipeline.start_generation("mdd", 2)
        pipeline.run_to_completion(task)
        assert task.state == TaskState.DONE
        assert tuple(task.visited) == PIPELINE_CHAIN

    def test_done_implies_report_passed(self, pipeline, kb):
        for code in kb.disorders:
            task = pipeline.run_to_completion(pipeline.start_generation(code, 2))
            assert task.state == TaskState.DONE
            assert task.report is not None and task.report.passed

    def test_advance_on_terminal_task_stalls(self, pipeline):
        task = pipeline.run_to_completion(pipeline.start_generation("mdd", 1))
        with pytest.raises(errors.PipelineStalled):
            pipeline.advance(task)

    def test_failed_only_reachable_from_logical_checks(self, kb, gateway):
        # A provider whose content reply carries no parsable block leaves the
        # draft structurally empty; the rule engine rejects it at LogicalChecks.
        class Mute:
            id = "mute"

            def generate(self, request):
                return ProviderResponse(text="nothing useful", latency_ms=0.0,
                                        provider_id=self.id)

        pipeline = CasePipeline(Gateway(Mute(), ProviderConfig()), kb)
        task = pipeline.start_generation("mdd", 2)
        pipeline.run_to_completion(task)
        assert task.state == TaskState.FAILED
        before = task.visited[task.visited.index(TaskState.FAILED) - 1]
        assert before == TaskState.CHECKS

    def test_parse_failure_fails_at_checks_not_crash(self, kb, gateway, provider):
        class Garbled:
            id = "garbled"

            def generate(self, request):
                return ProviderResponse(text="```case\n{broken json\n```",
                                        latency_ms=0.0, provider_id=self.id)

        pipeline = CasePipeline(Gateway(Garbled(), ProviderConfig()), kb)
        task = pipeline.start_generation("mdd", 2)
        pipeline.run_to_completion(task)
        assert task.state == TaskState.FAILED
        assert task.visited[-2] == TaskState.CHECKS
        assert task.failure_cause and "validation failed" in task.failure_cause

    def test_task_ids_unique(self, pipeline):
        ids = {pipeline.start_generation("mdd", 2).id for _ in range(20)}
        assert len(ids) == 20


class TestRules:
    def test_thirty_rules_with_unique_ids(self, kb):
        registry = RuleRegistry.from_specs(kb.rule_specs)
        assert len(registry.rules) == 30
        assert len({r.id for r in registry.rules}) == 30

    def test_categories_cover_all_three(self, kb):
        registry = RuleRegistry.from_specs(kb.rule_specs)
        assert {r.category for r in registry.rules} == {"structure", "terminology", "logic"}

    def test_passed_iff_no_blocking_violation(self, kb, mdd_case, pipeline):
        report = validate_case(mdd_case, pipeline.registry, kb)
        blocking = {r.id for r in pipeline.registry.rules if r.severity == "blocking"}
        assert report.passed == all(v.rule_id not in blocking for v in report.violations)

    def test_empty_chief_complaint_violates_s001(self, kb, mdd_case, pipeline):
        mutated = type(mdd_case).from_dict(mdd_case.to_dict())
        mutated.chief_complaint = ""
        report = validate_case(mutated, pipeline.registry, kb)
        assert not report.passed
        assert any(v.rule_id == "S-001" for v in report.violations)

    def test_mood_symptom_rule_l010(self, kb, mdd_case, pipeline):
        mutated = type(mdd_case).from_dict(mdd_case.to_dict())
        mood = {"depressed_mood", "anhedonia", "elevated_mood"}
        mutated.symptoms = [s for s in mutated.symptoms if s.tag not in mood]
        report = validate_case(mutated, pipeline.registry, kb)
        assert any(v.rule_id == "L-010" for v in report.violations)

    def test_predicate_exception_counts_as_violation(self, kb, mdd_case, pipeline):
        mutated = type(mdd_case).from_dict(mdd_case.to_dict())
        mutated.symptoms = None  # malformed on purpose
        report = validate_case(mutated, pipeline.registry, kb)
        assert not report.passed


class TestQuality:
    def test_axes_in_range_and_overall_is_mean(self, pipeline, mdd_case):
        report = pipeline.validate(mdd_case)
        score = pipeline.score_quality(mdd_case, report)
        for axis in (score.authenticity, score.professionalism, score.completeness):
            assert 0.0 <= axis <= 5.0
        expected = (score.authenticity + score.professionalism + score.completeness) / 3
        assert abs(score.overall - expected) < 1e-12

    def test_clean_case_scores_top_marks(self, pipeline, mdd_case):
        report = pipeline.validate(mdd_case)
        score = pipeline.score_quality(mdd_case, report)
        assert score.completeness == 5.0


@settings(max_examples=60, deadline=None)
@given(code=st.sampled_from(["mdd", "gad", "panic", "schizophrenia", "bipolar_1"]),
       difficulty=st.integers(min_value=1, max_value=5),
       seed=st.integers(min_value=0, max_value=10_000))
def test_property_symptoms_well_formed(code, difficulty, seed):
    from psytrain.kb import load_kb

    kb = load_kb()
    disorder = kb.disorders[code]
    symptoms = derive_symptoms(disorder, difficulty, random.Random(seed), kb)
    assert symptoms
    for s in symptoms:
        assert 0 <= s.severity <= 3
        assert s.onset_weeks >= 0
        assert s.tag in kb.lexicon.topics
    assert sum(1 for s in symptoms if s.atypical) <= 1
