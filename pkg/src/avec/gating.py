"""Privatized delegation gating and its leakage bounds.

The bit saying whether a query leaves the device is released through binary
randomized response: it is flipped with probability ``1/(1 + e^eps)``.  Any
adversary observing the released bit has Bayes advantage at most
``tanh(eps/2)``, and the simple rule "guess the released bit" achieves that
bound, so the bound is tight and empirically checkable.

A deterministic, non-constant gate admits no such bound: on a pair of
adjacent queries where it differs, the witnessed likelihood ratio is
infinite.  ``deterministic_gate_probe`` demonstrates this on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "GateRelease", "GateProbeReport",
    "randomize_gate", "release_gate", "gate_advantage_bound",
    "estimate_gate_advantage", "deterministic_gate_probe",
]


@dataclass(frozen=True)
class GateRelease:
    true_bit: bool
    released_bit: bool
    epsilon_gate: float


@dataclass(frozen=True)
class GateProbeReport:
    lr_bounded: bool
    witnessed_epsilon: float


def randomize_gate(bit: bool, epsilon_gate: float, rng: np.random.Generator) -> bool:
    """Binary randomized response on one bit; exactly one uniform draw.

    ``epsilon_gate = 0`` releases a fair coin independent of the input;
    ``epsilon_gate = inf`` (the config sentinel for "off") releases the bit
    unchanged.
    """
    if epsilon_gate < 0:
        raise ValueError("epsilon_gate must be nonnegative")
    u = rng.random()
    if math.isinf(epsilon_gate):
        return bool(bit)
    keep = 1.0 / (1.0 + math.exp(-epsilon_gate))
    return bool(bit) if u < keep else not bit


def release_gate(bit: bool, epsilon_gate: float, rng: np.random.Generator) -> GateRelease:
    """Convenience wrapper recording both the true and the released bit."""
    return GateRelease(bool(bit), randomize_gate(bit, epsilon_gate, rng), epsilon_gate)


def gate_advantage_bound(epsilon_gate: float) -> float:
    """Maximum Bayes advantage of any adversary: tanh(eps/2)."""
    if epsilon_gate < 0:
        raise ValueError("epsilon_gate must be nonnegative")
    return math.tanh(epsilon_gate / 2.0)


def estimate_gate_advantage(
    epsilon_gate: float, n_samples: int, rng: np.random.Generator
) -> float:
    """Empirical advantage of the Bayes-optimal adversary.

    Simulates a balanced prior over the true bit, releases each bit through
    the gate, guesses the released bit, and returns twice the excess accuracy
    over 1/2.  The estimate concentrates on ``gate_advantage_bound``.
    """
    if n_samples < 10_000:
        raise ValueError("use at least 10_000 samples")
    if epsilon_gate < 0:
        raise ValueError("epsilon_gate must be nonnegative")
    truth = rng.random(n_samples) < 0.5
    u = rng.random(n_samples)
    if math.isinf(epsilon_gate):
        released = truth
    else:
        keep = 1.0 / (1.0 + math.exp(-epsilon_gate))
        released = np.where(u < keep, truth, ~truth)
    accuracy = float(np.mean(released == truth))
    return 2.0 * (accuracy - 0.5)


def deterministic_gate_probe(
    gate_fn: Callable[[str], bool], adjacent_pair: tuple[str, str]
) -> GateProbeReport:
    """Witness the privacy failure of a non-constant deterministic gate.

    If the gate differs on the adjacent pair, the output distributions put
    probability 1 and 0 on the same outcome, so the witnessed epsilon is
    infinite; a gate that agrees on the pair witnesses epsilon 0 for it.
    A gate that is not deterministic is rejected.
    """
    qa, qb = adjacent_pair
    ga, gb = bool(gate_fn(qa)), bool(gate_fn(qb))
    if bool(gate_fn(qa)) != ga or bool(gate_fn(qb)) != gb:
        raise ValueError("gate_fn is not deterministic")
    if ga != gb:
        return GateProbeReport(lr_bounded=False, witnessed_epsilon=math.inf)
    return GateProbeReport(lr_bounded=True, witnessed_epsilon=0.0)
