"""Exception hierarchy shared across the platform."""


class PsytrainError(Exception):
    """Base class for all domain errors."""


# --- gateway ---

class MissingPlaceholder(PsytrainError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no parameter supplied for placeholder '{name}'")


class Timeout(PsytrainError):
    pass


class ProviderUnavailable(PsytrainError):
    pass


class BudgetExceeded(PsytrainError):
    pass


class ScriptParseError(PsytrainError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        suffix = f" (entry {line})" if line is not None else ""
        super().__init__(f"{message}{suffix}")


# --- case pipeline ---

class UnknownDisorder(PsytrainError):
    pass


class InvalidDifficulty(PsytrainError):
    pass


class PipelineStalled(PsytrainError):
    pass


# --- dialogue ---

class UnknownCase(PsytrainError):
    pass


class CaseNotApproved(PsytrainError):
    pass


class EmptyUtterance(PsytrainError):
    pass


class TurnOrderViolation(PsytrainError):
    pass


class SessionClosed(PsytrainError):
    pass


class UnknownSession(PsytrainError):
    pass


# --- exams ---

class InsufficientFindings(PsytrainError):
    pass


class UnknownItem(PsytrainError):
    def __init__(self, code: str):
        self.code = code
        super().__init__(f"unknown exam item '{code}'")


class ParseError(PsytrainError):
    pass


# --- diagnosis / prescription ---

class NoGuideline(PsytrainError):
    pass


class UnknownDrug(PsytrainError):
    def __init__(self, drug_id: str):
        self.drug_id = drug_id
        super().__init__(f"unknown drug '{drug_id}'")


# --- evaluation ---

class SessionNotClosed(PsytrainError):
    pass


class MissingDiagnosis(PsytrainError):
    pass


# --- platform ---

class AuthFailed(PsytrainError):
    pass


class AccountLocked(PsytrainError):
    pass


class TokenExpired(PsytrainError):
    pass


class TokenInvalid(PsytrainError):
    pass


class AuditStoreUnavailable(PsytrainError):
    pass


class VersionConflict(PsytrainError):
    pass


class SchemaViolation(PsytrainError):
    pass


class NotFound(PsytrainError):
    pass
