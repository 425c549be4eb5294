"""Adaptive per-query privacy budgeting on the local agent.

A query's proposed budget is

    delta_eps = (epsilon_base * sensitivity * (1 - confidence)) * f_seq + eta

where ``f_seq = exp(-n / kappa)`` decays with the session length and ``eta``
is Laplace noise protecting the budgeting decision itself.  The effective
budget is the proposal clamped to ``[0, remaining]`` so a user's cumulative
spend can never exceed their configured cap.

Sensitivity and confidence are deliberately simple heuristics: sensitivity
is a per-domain base weight plus a per-entity increment, and confidence is
driven by cache hits and sensitivity.  Both are stand-ins for model-derived
scores and are configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transform import detect_entities

__all__ = [
    "HIGH", "MEDIUM", "LOCAL", "DELEGATE",
    "UserConfig", "SessionState", "BudgetProposal",
    "sensitivity_score", "local_confidence", "sequence_decay",
    "laplace_sample", "propose_budget", "route_query",
]

HIGH = "high"
MEDIUM = "medium"

LOCAL = "local"
DELEGATE = "delegate"

# Per-preference base budgets.
EPSILON_BASE = {HIGH: 0.05, MEDIUM: 0.10}

DEFAULT_DOMAIN_WEIGHTS = {
    "medical": 0.6,
    "financial": 0.6,
    "legal": 0.6,
    "creative": 0.2,
}
DEFAULT_DOMAIN_WEIGHT = 0.4
ENTITY_WEIGHT = 0.15


@dataclass(frozen=True)
class UserConfig:
    """Per-user privacy configuration.

    ``epsilon_base`` scales budget proposals, ``epsilon_max`` is the hard cap
    on cumulative spend, and ``delta_f / epsilon_eta`` is the scale of the
    Laplace noise added to each proposal.
    """

    privacy_preference: str
    epsilon_base: float
    epsilon_max: float
    confidence_threshold: float = 0.8
    kappa: float = 5.0
    delta_f: float = 0.3
    epsilon_eta: float = 0.01

    def __post_init__(self):
        if self.privacy_preference not in (HIGH, MEDIUM):
            raise ValueError(f"unknown privacy preference: {self.privacy_preference!r}")
        if self.epsilon_base <= 0:
            raise ValueError("epsilon_base must be positive")
        if self.epsilon_max <= 0:
            raise ValueError("epsilon_max must be positive")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError("confidence_threshold must be in [0, 1]")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.delta_f <= 0 or self.epsilon_eta <= 0:
            raise ValueError("delta_f and epsilon_eta must be positive")

    @property
    def laplace_scale(self) -> float:
        """Noise scale protecting the budget proposal."""
        return self.delta_f / self.epsilon_eta

    @classmethod
    def with_preference(cls, preference: str, epsilon_max: float, **kw) -> "UserConfig":
        return cls(preference, EPSILON_BASE[preference], epsilon_max, **kw)


@dataclass
class SessionState:
    """Mutable per-user session: query counter, odometer handle, fact cache."""

    odometer: object
    cache: frozenset = frozenset()
    queries_issued: int = 0

    def advance(self) -> None:
        self.queries_issued += 1


@dataclass(frozen=True)
class BudgetProposal:
    sensitivity: float
    local_confidence: float
    f_seq: float
    eta_sample: float
    delta_eps_raw: float
    effective_eps: float


def sensitivity_score(
    text: str,
    domain: str,
    domain_weights: dict[str, float] | None = None,
    default_weight: float = DEFAULT_DOMAIN_WEIGHT,
    entity_weight: float = ENTITY_WEIGHT,
    entity_count: int | None = None,
) -> float:
    """Deterministic sensitivity in [0, 1].

    Score is the domain's base weight plus ``entity_weight`` per detected
    entity, clamped to [0, 1].  ``entity_count`` may be supplied when the
    caller already ran detection.
    """
    if not text:
        raise ValueError("query text must be nonempty")
    weights = DEFAULT_DOMAIN_WEIGHTS if domain_weights is None else domain_weights
    base = weights.get(domain, default_weight)
    if entity_count is None:
        entity_count = len(detect_entities(text))
    return min(max(base + entity_weight * entity_count, 0.0), 1.0)


def local_confidence(
    cache_key: str,
    cache: frozenset,
    sensitivity: float,
    entity_count: int,
    rng: np.random.Generator,
    cache_hit_confidence: float = 0.95,
    jitter: float = 0.05,
) -> float:
    """Heuristic confidence that the query can be answered on device.

    An exact cache hit yields a fixed high confidence.  Otherwise the score
    falls with sensitivity and the presence of entities, with a small uniform
    jitter drawn from the per-trial stream.
    """
    if cache_key in cache:
        return cache_hit_confidence
    base = 0.9 - 0.5 * sensitivity - (0.1 if entity_count > 0 else 0.0)
    base = min(max(base, 0.0), 1.0)
    noisy = base + rng.uniform(-jitter, jitter)
    return min(max(noisy, 0.0), 1.0)


def sequence_decay(n: int, kappa: float) -> float:
    """exp(-n / kappa): 1 at the session start, decaying with each query."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if n < 0:
        raise ValueError("query index must be nonnegative")
    return math.exp(-n / kappa)


def laplace_sample(scale: float, rng: np.random.Generator) -> float:
    """One Laplace(0, scale) draw by inverse CDF on a single uniform.

    Exactly one uniform is consumed per sample so that draw sequences are
    reproducible across platforms.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    u = rng.random() - 0.5
    if u == -0.5:  # guard log1p(-1)
        u = -0.5 + 1e-16
    return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


def propose_budget(
    user: UserConfig,
    session: SessionState,
    sensitivity: float,
    confidence: float,
    rng: np.random.Generator,
) -> BudgetProposal:
    """Noisy budget proposal, clamped to the user's remaining allocation.

    Negative noisy proposals clamp to zero (clamping is post-processing of
    the protected release; resampling would bias it).
    """
    if not 0.0 <= sensitivity <= 1.0:
        raise ValueError("sensitivity must be in [0, 1]")
    if not 0.0 <= confidence <= 1.0:
        raise ValueError("confidence must be in [0, 1]")
    f_seq = sequence_decay(session.queries_issued, user.kappa)
    eta = laplace_sample(user.laplace_scale, rng)
    raw = (user.epsilon_base * sensitivity * (1.0 - confidence)) * f_seq + eta
    remaining = session.odometer.remaining
    effective = min(max(raw, 0.0), remaining)
    return BudgetProposal(
        sensitivity=sensitivity,
        local_confidence=confidence,
        f_seq=f_seq,
        eta_sample=eta,
        delta_eps_raw=raw,
        effective_eps=effective,
    )


def route_query(confidence: float, threshold: float) -> str:
    """``LOCAL`` iff confidence reaches the threshold, else ``DELEGATE``."""
    return LOCAL if confidence >= threshold else DELEGATE
