import pytest

from psytrain import errors
from psytrain.dialogue import DialogueManager, integrate_context, understand


@pytest.fixture
def manager(gateway, kb, mdd_case):
    m = DialogueManager(gateway, kb)
    m.register_case(mdd_case, approved=True)
    return m


@pytest.fixture
def session(manager, mdd_case):
    return manager.open_session(mdd_case.id, "standard", seed=1)


class TestUnderstand:
    def test_empty_utterance(self, kb):
        with pytest.raises(errors.EmptyUtterance):
            understand("   ", kb.lexicon)

    def test_sleep_question_is_symptom_query(self, kb):
        intent = understand("How has your sleep been?", kb.lexicon)
        assert intent.kind == "symptom_query"
        assert "sleep_disturbance" in intent.entities

    def test_family_history(self, kb):
        intent = understand("Has anyone in your family had similar problems?",
                            kb.lexicon)
        assert intent.kind == "history_exploration"
        assert "family_history" in intent.entities

    def test_unmatched_is_other(self, kb):
        assert understand("qwertyuiop", kb.lexicon).kind == "other"

    def test_entities_accumulate_across_patterns(self, kb):
        intent = understand("Any trouble with sleep or appetite?", kb.lexicon)
        assert {"sleep_disturbance", "appetite_change"} <= set(intent.entities)


class TestContext:
    def test_summary_and_persona_always_present(self, manager, session, kb):
        intent = understand("hello", kb.lexicon)
        ctx = integrate_context(session, intent, kb)
        assert "case summary:" in ctx.text
        assert "persona directive:" in ctx.text

    def test_masking_hides_low_severity_symptoms(self, manager, session, kb):
        session.patient_state.active_symptoms["secret_tag"] = 0
        session.patient_state.disclosure_threshold = 2
        ctx = integrate_context(session, understand("hello", kb.lexicon), kb)
        assert "secret_tag" not in ctx.text

    def test_window_keeps_most_recent_turns(self, manager, session, kb):
        for i in range(30):
            manager.post_doctor_turn(session, f"question number {i}")
            manager.generate_reply(session)
        ctx = integrate_context(session, understand("hello", kb.lexicon), kb)
        assert ctx.turn_count == 20
        assert "question number 29" in ctx.text
        assert "question number 0\n" not in ctx.text


class TestSessions:
    def test_unknown_case(self, manager):
        with pytest.raises(errors.UnknownCase):
            manager.open_session("nope", "standard", 0)

    def test_unapproved_case_rejected(self, manager, pipeline):
        task = pipeline.run_to_completion(pipeline.start_generation("gad", 1))
        manager.register_case(task.draft, approved=False)
        with pytest.raises(errors.CaseNotApproved):
            manager.open_session(task.draft.id, "standard", 0)

    def test_alternation_enforced(self, manager, session):
        manager.post_doctor_turn(session, "Hello there")
        with pytest.raises(errors.TurnOrderViolation):
            manager.post_doctor_turn(session, "Second in a row")
        manager.generate_reply(session)
        with pytest.raises(errors.TurnOrderViolation):
            manager.generate_reply(session)

    def test_closed_session_rejects_turns(self, manager, session):
        manager.close_session(session)
        with pytest.raises(errors.SessionClosed):
            manager.post_doctor_turn(session, "hello?")

    def test_asked_topics_accumulate(self, manager, session):
        manager.post_doctor_turn(session, "How has your sleep been?")
        manager.generate_reply(session)
        manager.post_doctor_turn(session, "Anyone in your family with this?")
        assert {"sleep_disturbance", "family_history"} <= session.asked_topics

    def test_challenge_mode_raises_threshold_and_plants_symptom(
            self, manager, mdd_case, kb):
        std = manager.open_session(mdd_case.id, "standard", seed=5)
        hard = manager.open_session(mdd_case.id, "challenge", seed=5)
        assert hard.patient_state.disclosure_threshold == \
            std.patient_state.disclosure_threshold + 1
        own = set(kb.disorders[mdd_case.disorder_code].criterion_tags)
        planted = set(hard.patient_state.active_symptoms) - \
            set(std.patient_state.active_symptoms)
        assert len(planted) == 1
        assert planted.isdisjoint(own)

    def test_challenge_mode_deterministic_per_seed(self, manager, mdd_case):
        a = manager.open_session(mdd_case.id, "challenge", seed=9)
        b = manager.open_session(mdd_case.id, "challenge", seed=9)
        assert a.patient_state.active_symptoms == b.patient_state.active_symptoms

    def test_review_mode_without_history_falls_back(self, manager, mdd_case):
        session = manager.open_session(mdd_case.id, "review", seed=0)
        assert session.focus_dimension is None


class TestAnalyzeTurn:
    def test_phase_jump_flags_logic(self, manager, session):
        turn = manager.post_doctor_turn(
            session, "Goodbye, we are done here, take care")
        assert any(f["dimension"] == "logic" for f in turn.feedback_flags)

    def test_vague_question_flags_professionalism(self, manager, session):
        turn = manager.post_doctor_turn(session, "so, um, stuff happening?")
        assert any(f["dimension"] == "professionalism" for f in turn.feedback_flags)

    def test_missing_empathy_after_distress(self, manager, session):
        manager.post_doctor_turn(session, "How is your mood these days?")
        reply = manager.generate_reply(session)
        assert "hopeless" in reply.text.lower()
        turn = manager.post_doctor_turn(session, "What about your appetite?")
        assert any(f["dimension"] == "empathy" for f in turn.feedback_flags)

    def test_empathy_marker_clears_flag(self, manager, session):
        manager.post_doctor_turn(session, "How is your mood these days?")
        manager.generate_reply(session)
        turn = manager.post_doctor_turn(
            session, "That sounds really hard. What about your appetite?")
        assert not any(f["dimension"] == "empathy" for f in turn.feedback_flags)


class TestReplay:
    def test_unknown_session(self, manager):
        with pytest.raises(errors.UnknownSession):
            manager.replay("nope")

    def test_replay_contains_turns_and_missed_topics(self, manager, session, mdd_case):
        manager.post_doctor_turn(session, "How has your sleep been?")
        manager.generate_reply(session)
        manager.close_session(session)
        replay = manager.replay(session.id)
        assert len(replay["turns"]) == 2
        assert replay["turns"][0]["intent"] == "symptom_query"
        assert set(replay["missed_topics"]) == \
            set(mdd_case.required_topics) - session.asked_topics
        assert "sleep_disturbance" not in replay["missed_topics"]

    def test_replay_is_stable_and_read_only(self, manager, session):
        manager.post_doctor_turn(session, "Hello")
        manager.generate_reply(session)
        first = manager.replay(session.id)
        first["turns"].append({"tampered": True})
        second = manager.replay(session.id)
        assert len(second["turns"]) == 2
        assert manager.replay(session.id) == second
