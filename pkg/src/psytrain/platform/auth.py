"""Accounts, credential checking with lockout, and HS256 JWT tokens.

Tokens follow the RFC 7519 compact serialization (HS256). The second
authentication factor is a pluggable verifier; the development default
always passes.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from psytrain.errors import AccountLocked, AuthFailed, TokenExpired, TokenInvalid

DEFAULT_TOKEN_LIFETIME_S = 8 * 3600
LOCKOUT_THRESHOLD = 5

ROLES = ("administrator", "supervising_physician", "trainee")


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(text: str) -> bytes:
    padding = "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(text + padding)


def hash_credential(credential: str, salt: str) -> str:
    return hashlib.pbkdf2_hmac(
        "sha256", credential.encode(), salt.encode(), 50_000
    ).hex()


@dataclass
class UserAccount:
    id: str
    login: str
    salt: str
    credential_hash: str
    role: str
    failed_attempts: int = 0
    locked: bool = False

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role '{self.role}'")


@dataclass(frozen=True)
class AuthToken:
    subject: str
    role: str
    issued_at: int
    expires_at: int
    raw: str


class Authenticator:
    def __init__(self, service_key: str | None = None,
                 token_lifetime_s: int = DEFAULT_TOKEN_LIFETIME_S,
                 lockout_threshold: int = LOCKOUT_THRESHOLD,
                 second_factor: Callable[[str], bool] | None = None):
        self.service_key = service_key or secrets.token_hex(32)
        self.token_lifetime_s = token_lifetime_s
        self.lockout_threshold = lockout_threshold
        # Development stub: integrations (SMS code, biometric) plug in here.
        self.second_factor = second_factor or (lambda login: True)
        self.accounts: dict[str, UserAccount] = {}
        self._lock = threading.Lock()

    def add_account(self, login: str, credential: str, role: str) -> UserAccount:
        salt = secrets.token_hex(8)
        account = UserAccount(
            id=f"user-{len(self.accounts) + 1:04d}",
            login=login,
            salt=salt,
            credential_hash=hash_credential(credential, salt),
            role=role,
        )
        self.accounts[login] = account
        return account

    def authenticate(self, login: str, credential: str) -> AuthToken:
        with self._lock:
            account = self.accounts.get(login)
            if account is None:
                raise AuthFailed(f"unknown login '{login}'")
            if account.locked:
                raise AccountLocked(login)
            expected = hash_credential(credential, account.salt)
            if not hmac.compare_digest(expected, account.credential_hash):
                account.failed_attempts += 1
                if account.failed_attempts >= self.lockout_threshold:
                    account.locked = True
                    raise AccountLocked(login)
                raise AuthFailed("wrong credential")
            if not self.second_factor(login):
                raise AuthFailed("second factor rejected")
            account.failed_attempts = 0
            return self.issue_token(account)

    def issue_token(self, account: UserAccount) -> AuthToken:
        now = int(time.time())
        exp = now + self.token_lifetime_s
        header = {"alg": "HS256", "typ": "JWT"}
        payload = {"sub": account.login, "role": account.role, "iat": now, "exp": exp}
        signing_input = (
            _b64url(json.dumps(header, separators=(",", ":")).encode())
            + "."
            + _b64url(json.dumps(payload, separators=(",", ":")).encode())
        )
        signature = hmac.new(
            self.service_key.encode(), signing_input.encode(), hashlib.sha256
        ).digest()
        raw = signing_input + "." + _b64url(signature)
        return AuthToken(subject=account.login, role=account.role,
                         issued_at=now, expires_at=exp, raw=raw)

    def verify_token(self, raw: str) -> AuthToken:
        parts = raw.split(".")
        if len(parts) != 3:
            raise TokenInvalid("token is not compact JWT form")
        signing_input = parts[0] + "." + parts[1]
        expected = hmac.new(
            self.service_key.encode(), signing_input.encode(), hashlib.sha256
        ).digest()
        try:
            provided = _b64url_decode(parts[2])
            payload = json.loads(_b64url_decode(parts[1]))
        except Exception:
            raise TokenInvalid("token is not decodable")
        if not hmac.compare_digest(expected, provided):
            raise TokenInvalid("bad signature")
        if payload.get("exp", 0) <= time.time():
            raise TokenExpired("token expired")
        return AuthToken(
            subject=payload["sub"],
            role=payload["role"],
            issued_at=payload["iat"],
            expires_at=payload["exp"],
            raw=raw,
        )
