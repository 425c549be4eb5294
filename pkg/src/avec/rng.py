"""Deterministic, parallel-safe random streams.

Every random draw in the simulator comes from a Philox counter-based
generator whose 128-bit key is derived from ``(trial_seed, user_id, tag)``.
The trial seed is ``master_seed + trial_id``.  Because each logical stream
has its own key, results do not depend on scheduling: trials and users can
run in any order or in parallel and still reproduce byte-identical logs.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["trial_seed", "derive_key", "stream", "UserStreams"]

# One stream per kind of decision a user session makes.
STREAM_TAGS = (
    "profile",     # per-user epsilon_max draw
    "queries",     # which pool queries the user asks, and in which order
    "confidence",  # jitter in the local-confidence heuristic
    "budget",      # Laplace noise protecting the budget proposal
    "gate",        # binary randomized response on the delegation bit
    "entity",      # k-ary randomized response draws
    "translate",   # translation latency/cost bases
    "remote",      # remote latency/cost bases and quality modifier
)


def trial_seed(master_seed: int, trial_id: int) -> int:
    """Per-trial seed: the master seed plus the trial identifier."""
    return master_seed + trial_id


def derive_key(*parts: object) -> int:
    """Hash a tuple of identifiers into a 128-bit Philox key.

    SHA-256 over a ``|``-joined rendering keeps the derivation platform
    independent and collision free for all practical purposes.
    """
    raw = "|".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(raw).digest()[:16], "big")


def stream(master_seed: int, trial_id: int, user_id: int, tag: str) -> np.random.Generator:
    """Independent generator for one (trial, user, tag) stream."""
    key = derive_key(trial_seed(master_seed, trial_id), user_id, tag)
    return np.random.Generator(np.random.Philox(key=key))


class UserStreams:
    """Lazy bundle of the per-user streams used by a simulated session."""

    def __init__(self, master_seed: int, trial_id: int, user_id: int):
        self._base = (master_seed, trial_id, user_id)
        self._streams: dict[str, np.random.Generator] = {}

    def get(self, tag: str) -> np.random.Generator:
        if tag not in self._streams:
            self._streams[tag] = stream(*self._base, tag)
        return self._streams[tag]

    def __getattr__(self, tag: str) -> np.random.Generator:
        if tag.startswith("_"):
            raise AttributeError(tag)
        if tag not in STREAM_TAGS:
            raise AttributeError(f"unknown stream tag: {tag}")
        return self.get(tag)
