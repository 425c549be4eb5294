"""Simulated remote model: latency, cost, and response quality labels.

The remote stage is pure post-processing: it sees only the transformed
query's length and privatization level, never the original text or the
proof internals, and it adds no privacy cost.  Base latency and cost are
uniform draws scaled by a single quality modifier whose range depends on
how strongly the query was privatized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform import (
    LEVEL_HIGH, LEVEL_LIGHT, LEVEL_MODERATE, LEVEL_NONE, TransformedQuery,
)

__all__ = [
    "QUALITY_LOCAL", "QUALITY_BY_LEVEL",
    "ResponseRecord", "remote_respond",
]

QUALITY_LOCAL = "local_high_confidence"
QUALITY_BY_LEVEL = {
    LEVEL_HIGH: "remote_high",
    LEVEL_MODERATE: "remote_moderate",
    LEVEL_LIGHT: "remote_light",
    LEVEL_NONE: "remote_unmodified",
}

LATENCY_BASE = (300.0, 800.0)   # ms
COST_BASE = (0.007, 0.015)      # normalized units
MODIFIER_RANGES = {
    LEVEL_HIGH: (0.4, 0.6),
    LEVEL_MODERATE: (0.7, 0.9),
    LEVEL_LIGHT: (0.9, 1.1),
    LEVEL_NONE: (0.95, 1.05),
}


@dataclass(frozen=True)
class ResponseRecord:
    quality_label: str
    latency_ms: float
    cost_units: float

    def __post_init__(self):
        if self.latency_ms <= 0 or self.cost_units <= 0:
            raise ValueError("latency and cost must be positive")


def remote_respond(tq: TransformedQuery, rng: np.random.Generator) -> ResponseRecord:
    """Sample a remote response record for a transformed query.

    One modifier draw applies to both latency and cost, so the support of
    the product stays within the base range times the modifier range.
    """
    latency_base = rng.uniform(*LATENCY_BASE)
    cost_base = rng.uniform(*COST_BASE)
    modifier = rng.uniform(*MODIFIER_RANGES[tq.privatization_level])
    return ResponseRecord(
        quality_label=QUALITY_BY_LEVEL[tq.privatization_level],
        latency_ms=latency_base * modifier,
        cost_units=cost_base * modifier,
    )
