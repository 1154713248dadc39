import json
import threading
import time

import pytest

from psytrain import errors
from psytrain.platform import (
    AuditLog,
    Authenticator,
    CRITICAL_ACTIONS,
    DataStore,
    PERMISSION_MATRIX,
    VersionedCache,
    anonymize,
    authorize,
)
from psytrain.platform.security import ALL_ENDPOINTS


class TestAuthenticator:
    def make(self, **kw):
        auth = Authenticator(**kw)
        auth.add_account("alice", "pw-one", "trainee")
        return auth

    def test_successful_login_issues_verifiable_token(self):
        auth = self.make()
        token = auth.authenticate("alice", "pw-one")
        verified = auth.verify_token(token.raw)
        assert verified.subject == "alice" and verified.role == "trainee"

    def test_unknown_login(self):
        with pytest.raises(errors.AuthFailed):
            self.make().authenticate("nobody", "x")

    def test_lockout_after_threshold(self):
        auth = self.make()
        for _ in range(4):
            with pytest.raises(errors.AuthFailed):
                auth.authenticate("alice", "wrong")
        with pytest.raises(errors.AccountLocked):
            auth.authenticate("alice", "wrong")
        with pytest.raises(errors.AccountLocked):
            auth.authenticate("alice", "pw-one")  # locked even with right secret

    def test_success_resets_counter(self):
        auth = self.make()
        for _ in range(3):
            with pytest.raises(errors.AuthFailed):
                auth.authenticate("alice", "wrong")
        auth.authenticate("alice", "pw-one")
        assert auth.accounts["alice"].failed_attempts == 0

    def test_second_factor_rejection(self):
        auth = self.make(second_factor=lambda login: False)
        with pytest.raises(errors.AuthFailed):
            auth.authenticate("alice", "pw-one")

    def test_expired_token(self):
        auth = self.make(token_lifetime_s=-1)
        token = auth.issue_token(auth.accounts["alice"])
        with pytest.raises(errors.TokenExpired):
            auth.verify_token(token.raw)

    def test_tampered_token_rejected(self):
        auth = self.make()
        raw = auth.authenticate("alice", "pw-one").raw
        header, payload, sig = raw.split(".")
        forged = payload[:-2] + ("AA" if payload[-2:] != "AA" else "BB")
        with pytest.raises(errors.TokenInvalid):
            auth.verify_token(f"{header}.{forged}.{sig}")
        with pytest.raises(errors.TokenInvalid):
            auth.verify_token("not-a-jwt")

    def test_token_from_other_service_key_rejected(self):
        a = self.make(service_key="k1")
        b = Authenticator(service_key="k2")
        b.add_account("alice", "pw-one", "trainee")
        token = a.authenticate("alice", "pw-one")
        with pytest.raises(errors.TokenInvalid):
            b.verify_token(token.raw)

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError):
            Authenticator().add_account("bob", "pw", "superuser")


class TestRBAC:
    def test_exhaustive_matrix_sweep_deny_by_default(self):
        for role in list(PERMISSION_MATRIX) + ["ghost_role", ""]:
            for endpoint, method in ALL_ENDPOINTS:
                allowed = authorize(role, endpoint, method)
                expected = (endpoint, method) in PERMISSION_MATRIX.get(role, set())
                assert allowed == expected, (role, endpoint, method)

    def test_unknown_endpoint_denied_for_every_role(self):
        for role in PERMISSION_MATRIX:
            assert not authorize(role, "/not/a/route", "GET")
            assert not authorize(role, "/cases/{id}", "DELETE")

    def test_trainee_restrictions(self):
        assert not authorize("trainee", "/cases/generate", "POST")
        assert not authorize("trainee", "/admin/audit", "GET")
        assert authorize("trainee", "/sessions", "POST")

    def test_supervisor_cannot_read_audit(self):
        assert not authorize("supervising_physician", "/admin/audit", "GET")
        assert authorize("administrator", "/admin/audit", "GET")


class TestAuditLog:
    def test_append_only_records(self):
        log = AuditLog()
        log.write("alice", "login", "auth", "success")
        log.write("bob", "exam_order", "exo-1", "confirmed")
        records = log.records()
        assert [r.id for r in records] == [1, 2]
        with pytest.raises(Exception):
            records[0].actor = "mallory"  # frozen dataclass

    def test_only_declared_critical_actions(self):
        log = AuditLog()
        with pytest.raises(ValueError):
            log.write("alice", "coffee_break", "x", "ok")
        for action in CRITICAL_ACTIONS:
            log.write("alice", action, "t", "ok")
        assert len(log.records()) == len(CRITICAL_ACTIONS)

    def test_store_outage_surfaces(self):
        log = AuditLog()
        log._fail = True
        with pytest.raises(errors.AuditStoreUnavailable):
            log.write("alice", "login", "auth", "success")


class TestVersionedCache:
    def test_cas_happy_path(self):
        cache = VersionedCache()
        entry = cache.put("k", "v1", expected_version=0)
        assert entry.version == 1
        entry = cache.put("k", "v2", expected_version=1)
        assert entry.version == 2

    def test_stale_writer_rejected(self):
        cache = VersionedCache()
        cache.put("k", "v1", expected_version=0)
        with pytest.raises(errors.VersionConflict):
            cache.put("k", "stale", expected_version=0)
        assert cache.get("k").value == "v1"

    def test_sixteen_concurrent_writers_no_lost_update(self):
        cache = VersionedCache()
        successes = []
        lock = threading.Lock()

        def writer(n):
            done = 0
            while done < 25:
                current = cache.get("shared")
                version = current.version if current else 0
                try:
                    cache.put("shared", f"w{n}-{done}", expected_version=version)
                except errors.VersionConflict:
                    continue
                done += 1
                with lock:
                    successes.append(1)

        threads = [threading.Thread(target=writer, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        history = cache.history("shared")
        assert history == list(range(1, len(successes) + 1))
        assert len(successes) == 16 * 25
        assert cache.get("shared").version == len(successes)


PII_CORPUS = [
    ("call me at 13812345678 please", "13812345678"),
    ("reach 555 1234 5678 after hours", "555 1234 5678"),
    ("id number 110101199003078888 on file", "110101199003078888"),
    ("old id 123456789012345 archived", "123456789012345"),
    ("lives at 42 Willow Road near the park", "42 Willow Road"),
    ("moved to 9 Harbor Street last year", "9 Harbor Street"),
]


class TestAnonymizer:
    @pytest.mark.parametrize("text,pii", PII_CORPUS)
    def test_planted_pii_removed(self, text, pii):
        assert pii not in anonymize(text)

    def test_roster_names_masked_case_insensitive(self):
        out = anonymize("Patient Zhang Wei spoke with ZHANG WEI's sister",
                        roster=["Zhang Wei"])
        assert "zhang" not in out.lower()
        assert "[NAME]" in out

    def test_idempotent(self):
        text = "13812345678, 42 Willow Road, id 110101199003078888, Li Na"
        once = anonymize(text, roster=["Li Na"])
        twice = anonymize(once, roster=["Li Na"])
        assert once == twice

    def test_clinical_text_untouched(self):
        text = "Patient reports 3 weeks of poor sleep and appetite change."
        assert anonymize(text) == text


class TestDataStore:
    def test_schema_enforced_per_kind(self):
        store = DataStore()
        with pytest.raises(errors.SchemaViolation):
            store.store("report", {"session_id": "s"})  # missing dims/composite
        with pytest.raises(errors.SchemaViolation):
            store.store("widget", {"id": 1})

    def test_round_trip_and_defensive_copies(self):
        store = DataStore()
        payload = {"session_id": "s1", "dims": {"a": 1.0}, "composite": 1.0}
        record_id = store.store("report", payload)
        payload["dims"]["a"] = 999
        fetched = store.retrieve("report", record_id)
        assert fetched["dims"]["a"] == 1.0
        fetched["dims"]["a"] = 5
        assert store.retrieve("report", record_id)["dims"]["a"] == 1.0

    def test_not_found(self):
        with pytest.raises(errors.NotFound):
            DataStore().retrieve("case", "missing")

    def test_auto_ids_monotonic(self):
        store = DataStore()
        ids = [store.store("transcript", {"session_id": f"s{i}", "turns": []})
               for i in range(3)]
        assert ids == ["transcript-000001", "transcript-000002", "transcript-000003"]

    def test_export_import_round_trip(self, tmp_path):
        store = DataStore()
        store.store("case", {"id": "c1", "disorder_code": "mdd",
                             "symptoms": [], "ground_truth_dx": "mdd"},
                    record_id="c1")
        path = tmp_path / "dump.json"
        store.export_to(path)
        fresh = DataStore()
        fresh.import_from(path)
        assert fresh.retrieve("case", "c1")["disorder_code"] == "mdd"
        assert json.loads(path.read_text())["documents"]["case"]["c1"]["id"] == "c1"
