from psytrain.platform.auth import Authenticator, AuthToken, UserAccount
from psytrain.platform.security import (
    AuditLog,
    CRITICAL_ACTIONS,
    PERMISSION_MATRIX,
    VersionedCache,
    anonymize,
    authorize,
)
from psytrain.platform.store import DataStore

__all__ = [
    "Authenticator",
    "AuthToken",
    "UserAccount",
    "AuditLog",
    "CRITICAL_ACTIONS",
    "PERMISSION_MATRIX",
    "VersionedCache",
    "anonymize",
    "authorize",
    "DataStore",
]
