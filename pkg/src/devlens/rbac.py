"""Role-based access control for the HTTP surfaces.

Principals authenticate with static bearer tokens and carry one or more
roles; a (metric, scope) read is permitted when some single role grants
both. Secrets are kept only as salted hashes.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass

from .domain import MetricId, Scope, ScopeSelector, ValidationError


def _hash_secret(salt: bytes, secret: str) -> bytes:
    return hashlib.sha256(salt + secret.encode("utf-8")).digest()


@dataclass(frozen=True, slots=True)
class Role:
    name: str
    readable_metrics: frozenset[str]  # metric-id strings, or "*"
    scope_selectors: tuple[ScopeSelector, ...]
    raw_drilldown_allowed: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("role-name must be non-empty")

    def allows_metric(self, metric_id: MetricId) -> bool:
        return "*" in self.readable_metrics or metric_id.value in self.readable_metrics

    def allows_scope(self, scope: Scope) -> bool:
        return any(selector.matches(scope) for selector in self.scope_selectors)

    def allows(self, metric_id: MetricId, scope: Scope) -> bool:
        return self.allows_metric(metric_id) and self.allows_scope(scope)


@dataclass(frozen=True, slots=True)
class Principal:
    name: str
    roles: tuple[Role, ...]

    def __post_init__(self) -> None:
        if not self.roles:
            raise ValidationError(f"principal {self.name!r} needs at least one role")

    def can_read(self, metric_id: MetricId, scope: Scope) -> bool:
        return any(role.allows(metric_id, scope) for role in self.roles)

    def can_drilldown(self) -> bool:
        return any(role.raw_drilldown_allowed for role in self.roles)

    def readable_metrics(self) -> set[MetricId]:
        if any("*" in role.readable_metrics for role in self.roles):
            return set(MetricId)
        names = set()
        for role in self.roles:
            names |= role.readable_metrics
        return {MetricId(name) for name in names}


@dataclass(frozen=True, slots=True)
class _HashedToken:
    salt: bytes
    digest: bytes
    principal_name: str

    def verify(self, secret: str) -> bool:
        return hmac.compare_digest(self.digest, _hash_secret(self.salt, secret))


class AccessControl:
    """Token table mapping presented secrets to principals."""

    def __init__(self, tokens: list[_HashedToken], principals: dict[str, Principal]):
        self._tokens = tokens
        self._principals = principals

    @classmethod
    def build(cls, token_secrets: dict[str, str], principals: dict[str, Principal]) -> "AccessControl":
        tokens = []
        for secret, principal_name in token_secrets.items():
            if principal_name not in principals:
                raise ValidationError(f"token references unknown principal {principal_name!r}")
            salt = os.urandom(16)
            tokens.append(
                _HashedToken(
                    salt=salt, digest=_hash_secret(salt, secret), principal_name=principal_name
                )
            )
        return cls(tokens, dict(principals))

    def authenticate(self, secret: str | None) -> Principal | None:
        if not secret:
            return None
        for token in self._tokens:
            if token.verify(secret):
                return self._principals[token.principal_name]
        return None

    def principals(self) -> list[Principal]:
        return list(self._principals.values())


@dataclass(frozen=True, slots=True)
class ApiToken:
    """Ingestion token scoped to a set of raw collections."""

    token_id: str
    salt: bytes
    secret_hash: bytes
    allowed_collections: frozenset[str]
    principal: str

    def __post_init__(self) -> None:
        if not self.allowed_collections:
            raise ValidationError(f"token {self.token_id!r} allows no collections")

    @classmethod
    def from_secret(
        cls, token_id: str, secret: str, allowed_collections: frozenset[str], principal: str
    ) -> "ApiToken":
        salt = os.urandom(16)
        return cls(
            token_id=token_id,
            salt=salt,
            secret_hash=_hash_secret(salt, secret),
            allowed_collections=allowed_collections,
            principal=principal,
        )

    def verify(self, secret: str) -> bool:
        return hmac.compare_digest(self.secret_hash, _hash_secret(self.salt, secret))
