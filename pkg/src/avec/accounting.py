"""Renyi-DP cost curves, the privacy odometer, and (eps, delta) conversion.

Each randomized mechanism contributes a cost curve ``alpha -> rdp(alpha)``.
Curves add linearly even when parameters are chosen adaptively, so a
session's total loss is the running sum of its entries; the odometer keeps
that sum together with a hard cap on the pure-epsilon total, enforced at
commit time.  Totals convert to an (epsilon, delta) guarantee by minimizing
``rdp(alpha) + log(1/delta)/(alpha - 1)`` over a fixed grid of orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DEFAULT_ALPHA_GRID", "CapExceeded",
    "MechanismSpec", "KaryRR", "BinaryRR", "LaplaceRelease",
    "PrivacyOdometer", "DpGuarantee",
    "kary_rr_rdp", "binary_rr_rdp", "laplace_release_rdp",
    "to_dp", "session_guarantee", "subsample_amplify",
]

DEFAULT_ALPHA_GRID = (1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0)


class CapExceeded(Exception):
    """Committing the mechanism would push the pure-epsilon total past the cap."""


def _log_sum_exp(terms) -> float:
    m = max(terms)
    if math.isinf(m):
        return m
    return m + math.log(sum(math.exp(t - m) for t in terms))


def kary_rr_rdp(epsilon: float, k: int, alpha: float) -> float:
    """Renyi divergence of order alpha between k-ary RR outputs on
    neighboring inputs.

    With keep probability p and off probability q the divergence is
    ``log(p^a q^(1-a) + q^a p^(1-a) + (k-2) q) / (a-1)``, evaluated in log
    space for numerical stability.
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if k < 2:
        raise ValueError("k must be at least 2")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return 0.0
    if math.isinf(epsilon):
        return math.inf
    log_p = -math.log1p((k - 1) * math.exp(-epsilon))
    log_q = log_p - epsilon
    terms = [alpha * log_p + (1 - alpha) * log_q,
             alpha * log_q + (1 - alpha) * log_p]
    if k > 2:
        terms.append(math.log(k - 2) + log_q)
    return _log_sum_exp(terms) / (alpha - 1)


def binary_rr_rdp(epsilon: float, alpha: float) -> float:
    """k-ary RR cost curve at k=2 (the delegation-gate mechanism)."""
    return kary_rr_rdp(epsilon, 2, alpha)


def laplace_release_rdp(sensitivity: float, scale: float, alpha: float) -> float:
    """Cost curve of a Laplace release with the given sensitivity and scale.

    Closed form for lam = scale / sensitivity:
    ``log( a/(2a-1) e^((a-1)/lam) + (a-1)/(2a-1) e^(-a/lam) ) / (a-1)``.
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if sensitivity <= 0 or scale <= 0:
        raise ValueError("sensitivity and scale must be positive")
    lam = scale / sensitivity
    a = alpha
    inner = (a / (2 * a - 1)) * math.exp((a - 1) / lam) \
        + ((a - 1) / (2 * a - 1)) * math.exp(-a / lam)
    return math.log(inner) / (a - 1)


class MechanismSpec:
    """One mechanism invocation: a cost curve plus its pure-epsilon charge."""

    kind: str = "abstract"

    def rdp_at(self, alpha: float) -> float:
        raise NotImplementedError

    @property
    def pure_epsilon(self) -> float:
        raise NotImplementedError

    @property
    def description(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class KaryRR(MechanismSpec):
    epsilon: float
    k: int
    kind = "kary_rr"

    def rdp_at(self, alpha: float) -> float:
        return kary_rr_rdp(self.epsilon, self.k, alpha)

    @property
    def pure_epsilon(self) -> float:
        return self.epsilon

    @property
    def description(self) -> str:
        return f"k-ary randomized response (eps={self.epsilon!r}, k={self.k})"


@dataclass(frozen=True)
class BinaryRR(MechanismSpec):
    epsilon: float
    kind = "binary_rr"

    def rdp_at(self, alpha: float) -> float:
        return binary_rr_rdp(self.epsilon, alpha)

    @property
    def pure_epsilon(self) -> float:
        return self.epsilon

    @property
    def description(self) -> str:
        return f"binary randomized response (eps={self.epsilon!r})"


@dataclass(frozen=True)
class LaplaceRelease(MechanismSpec):
    sensitivity: float
    scale: float
    kind = "laplace"

    def rdp_at(self, alpha: float) -> float:
        return laplace_release_rdp(self.sensitivity, self.scale, alpha)

    @property
    def pure_epsilon(self) -> float:
        return self.sensitivity / self.scale

    @property
    def description(self) -> str:
        return f"laplace release (sensitivity={self.sensitivity!r}, scale={self.scale!r})"


@dataclass(frozen=True)
class DpGuarantee:
    epsilon: float
    delta: float
    alpha_star: float


class PrivacyOdometer:
    """Append-only ledger of mechanism costs with a hard pure-epsilon cap.

    Entries are never removed or mutated.  ``append`` refuses a mechanism
    whose pure-epsilon charge would push the running total past
    ``epsilon_max`` (within a 1e-9 float tolerance).
    """

    def __init__(self, epsilon_max: float = math.inf,
                 alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID):
        if epsilon_max <= 0:
            raise ValueError("epsilon_max must be positive")
        if not alpha_grid or any(a <= 1 for a in alpha_grid):
            raise ValueError("alpha grid orders must exceed 1")
        self.epsilon_max = epsilon_max
        self.alpha_grid = tuple(alpha_grid)
        self._entries: list[MechanismSpec] = []
        self._rdp_totals = [0.0] * len(self.alpha_grid)
        self._pure_total = 0.0

    @property
    def entries(self) -> tuple[MechanismSpec, ...]:
        return tuple(self._entries)

    @property
    def pure_epsilon_total(self) -> float:
        return self._pure_total

    @property
    def remaining(self) -> float:
        return max(0.0, self.epsilon_max - self._pure_total)

    def total_rdp(self, alpha: float) -> float:
        try:
            return self._rdp_totals[self.alpha_grid.index(alpha)]
        except ValueError:
            return sum(e.rdp_at(alpha) for e in self._entries)

    @property
    def rdp_totals(self) -> dict[float, float]:
        return dict(zip(self.alpha_grid, self._rdp_totals))

    def can_afford(self, epsilon: float) -> bool:
        return self._pure_total + epsilon <= self.epsilon_max + 1e-9

    def append(self, spec: MechanismSpec) -> None:
        if not self.can_afford(spec.pure_epsilon):
            raise CapExceeded(
                f"committing eps={spec.pure_epsilon!r} would exceed the cap "
                f"{self.epsilon_max!r} (spent {self._pure_total!r})"
            )
        self._entries.append(spec)
        self._pure_total += spec.pure_epsilon
        for i, alpha in enumerate(self.alpha_grid):
            self._rdp_totals[i] += spec.rdp_at(alpha)


def to_dp(odometer: PrivacyOdometer, delta_star: float) -> DpGuarantee:
    """Convert the odometer's total curve to an (epsilon, delta) guarantee.

    epsilon is minimized over the grid; ties break toward the smaller order.
    """
    if not 0.0 < delta_star < 1.0:
        raise ValueError("delta_star must be in (0, 1)")
    log_term = math.log(1.0 / delta_star)
    best_eps = math.inf
    best_alpha = odometer.alpha_grid[0]
    for alpha in odometer.alpha_grid:
        eps = odometer.total_rdp(alpha) + log_term / (alpha - 1.0)
        if eps < best_eps:
            best_eps = eps
            best_alpha = alpha
    return DpGuarantee(epsilon=best_eps, delta=delta_star, alpha_star=best_alpha)


def session_guarantee(
    odometer: PrivacyOdometer,
    k_queries: int,
    delta_ent: float,
    delta_star: float,
) -> DpGuarantee:
    """End-to-end guarantee for a k-query session.

    The delta side accumulates ``k * delta_ent + delta_star``; for pure
    randomized-response entity mechanisms ``delta_ent`` is zero.
    """
    base = to_dp(odometer, delta_star)
    return DpGuarantee(
        epsilon=base.epsilon,
        delta=k_queries * delta_ent + delta_star,
        alpha_star=base.alpha_star,
    )


def subsample_amplify(epsilon: float, q: float) -> float:
    """Amplified epsilon when a mechanism touches only a fraction q of queries.

    Informational bound ``log(1 + q (e^eps - 1))``; reported alongside the
    committed totals, never subtracted from them.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("sampling fraction must be in [0, 1]")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if math.isinf(epsilon):
        return math.inf if q > 0 else 0.0
    return math.log1p(q * math.expm1(epsilon))
