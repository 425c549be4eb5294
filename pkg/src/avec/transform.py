"""Translation agent: entity-level randomized response with proofs.

Sensitive entities (names, identifiers, dates, email-like tokens) are
detected with regular expressions and each detected entity is replaced by a
token drawn from its category vocabulary via k-ary randomized response: the
true token survives with probability ``e^eps / (e^eps + k - 1)`` and every
other token appears with probability ``1 / (e^eps + k - 1)``.

Each transformation is accompanied by a proof: the declared parameters and
the sampled replacement indices, bound by a SHA-256 digest over a canonical
length-prefixed serialization.  The proof never contains the original
surface strings; replacements are recorded as (category, vocabulary index)
pairs so the serialized bytes are not a function of the raw input text.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NAME", "IDENTIFIER", "DATE", "OTHER", "CATEGORIES",
    "LEVEL_HIGH", "LEVEL_MODERATE", "LEVEL_LIGHT", "LEVEL_NONE",
    "Entity", "Vocabularies", "TransformParams", "TransformationProof",
    "TransformedQuery",
    "detect_entities", "krr_privatize", "krr_sample_many", "utility_ceiling",
    "bayes_recover", "privatization_level", "transform_query",
    "canonical_serialize", "simulate_translation_overhead",
]

NAME = "name"
IDENTIFIER = "identifier"
DATE = "date"
OTHER = "other"
CATEGORIES = (NAME, IDENTIFIER, DATE, OTHER)

LEVEL_HIGH = "high"
LEVEL_MODERATE = "moderate"
LEVEL_LIGHT = "light"
LEVEL_NONE = "none"

DEFAULT_LEVEL_THRESHOLDS = (0.3, 1.0, 3.0)

MIN_VOCAB = 8
MAX_VOCAB = 64

# Matched in priority order; later patterns cannot claim spans that overlap
# an earlier match.
_PATTERNS = (
    (OTHER, re.compile(r"[A-Za-z0-9_.+-]+@[A-Za-z0-9-]+\.[A-Za-z0-9.]+")),
    (DATE, re.compile(r"\b\d{4}-\d{2}-\d{2}\b")),
    (DATE, re.compile(r"\b\d{1,2}/\d{1,2}/\d{4}\b")),
    (IDENTIFIER, re.compile(r"\b\d{6,}\b")),
    (NAME, re.compile(r"\b[A-Z][a-z]+ [A-Z][a-z]+\b")),
)

# Translation overhead model: uniform base plus a length-proportional term.
TRANSLATE_LATENCY_BASE = (5.0, 50.0)       # ms
TRANSLATE_COST_BASE = (2e-4, 2.5e-3)       # normalized units
TRANSLATE_LATENCY_PER_CHAR = 0.05          # ms per character
TRANSLATE_COST_PER_CHAR = 1e-6             # units per character


@dataclass(frozen=True)
class Entity:
    """One detected sensitive span.  ``vocab_id`` is -1 until resolved."""

    category: str
    start: int
    end: int
    surface: str
    vocab_id: int = -1


def detect_entities(text: str) -> list[Entity]:
    """Regex entity detection; deterministic, spans in left-to-right order."""
    if not text:
        raise ValueError("text must be nonempty")
    claimed: list[tuple[int, int]] = []
    found: list[Entity] = []
    for category, pattern in _PATTERNS:
        for m in pattern.finditer(text):
            s, e = m.span()
            if any(s < ce and cs < e for cs, ce in claimed):
                continue
            claimed.append((s, e))
            found.append(Entity(category, s, e, m.group()))
    found.sort(key=lambda ent: ent.start)
    return found


class Vocabularies:
    """Fixed per-category token vocabularies.

    Built once from a corpus (the query pool); each category's vocabulary is
    the sorted list of distinct detected surfaces, and its size must fall in
    ``[MIN_VOCAB, MAX_VOCAB]``.
    """

    def __init__(self, by_category: dict[str, tuple[str, ...]]):
        for cat, tokens in by_category.items():
            if not MIN_VOCAB <= len(tokens) <= MAX_VOCAB:
                raise ValueError(
                    f"vocabulary for {cat!r} has {len(tokens)} tokens, "
                    f"need {MIN_VOCAB}..{MAX_VOCAB}"
                )
        self._by_category = {c: tuple(t) for c, t in by_category.items()}
        self._index = {
            c: {tok: i for i, tok in enumerate(toks)}
            for c, toks in self._by_category.items()
        }

    @classmethod
    def from_texts(cls, texts: list[str]) -> "Vocabularies":
        seen: dict[str, set[str]] = {}
        for text in texts:
            for ent in detect_entities(text):
                seen.setdefault(ent.category, set()).add(ent.surface)
        by_cat = {c: tuple(sorted(s)[:MAX_VOCAB]) for c, s in seen.items()}
        return cls(by_cat)

    def categories(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_category))

    def size(self, category: str) -> int:
        return len(self._by_category[category])

    def token(self, category: str, vocab_id: int) -> str:
        return self._by_category[category][vocab_id]

    def id_of(self, category: str, surface: str) -> int:
        return self._index[category][surface]

    def resolve(self, entities: list[Entity]) -> list[Entity]:
        """Attach vocabulary ids to detected entities."""
        return [
            Entity(e.category, e.start, e.end, e.surface,
                   self.id_of(e.category, e.surface))
            for e in entities
        ]

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return dict(self._by_category)


@dataclass(frozen=True)
class TransformParams:
    """Declared transformation parameters bound by the proof digest."""

    epsilon_effective: float
    vocab_size: int
    policy_id: str
    timestamp: int


@dataclass(frozen=True)
class TransformationProof:
    declared_params: TransformParams
    replacements: tuple[tuple[str, int], ...]
    digest: str  # hex SHA-256 of canonical_serialize(params, replacements)


@dataclass(frozen=True)
class TransformedQuery:
    text: str
    proof: TransformationProof
    entity_count: int
    privatization_level: str


def _keep_probability(epsilon: float, k: int) -> float:
    # 1 / (1 + (k-1) e^-eps) is e^eps / (e^eps + k - 1) without overflow.
    return 1.0 / (1.0 + (k - 1) * math.exp(-epsilon))


def krr_privatize(vocab_id: int, k: int, epsilon: float, rng: np.random.Generator) -> int:
    """k-ary randomized response on one vocabulary index.

    Consumes exactly one uniform: the unit interval is partitioned into the
    keep region and k-1 equal regions for the other indices.
    """
    if k < 2:
        raise ValueError("vocabulary size must be at least 2")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if not 0 <= vocab_id < k:
        raise ValueError("vocab_id out of range")
    u = rng.random()
    p = _keep_probability(epsilon, k)
    if u < p:
        return vocab_id
    q = (1.0 - p) / (k - 1)
    j = int((u - p) / q)
    if j > k - 2:
        j = k - 2
    return j if j < vocab_id else j + 1


def krr_sample_many(
    true_ids: np.ndarray, k: int, epsilon: float, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized k-ary randomized response (same mapping as krr_privatize)."""
    if k < 2:
        raise ValueError("vocabulary size must be at least 2")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    true_ids = np.asarray(true_ids, dtype=np.int64)
    u = rng.random(true_ids.shape)
    p = _keep_probability(epsilon, k)
    if p == 1.0:
        return true_ids.copy()
    q = (1.0 - p) / (k - 1)
    keep = u < p
    j = np.minimum(((u - p) / q).astype(np.int64), k - 2)
    other = np.where(j < true_ids, j, j + 1)
    return np.where(keep, true_ids, other)


def utility_ceiling(epsilon: float, k: int) -> float:
    """Best achievable recovery accuracy against the k-ary channel."""
    if k < 2:
        raise ValueError("vocabulary size must be at least 2")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return _keep_probability(epsilon, k)


def bayes_recover(observed_id: int, k: int, epsilon: float, prior) -> int:
    """Maximum-posterior estimate of the true index from one observation.

    Ties break toward the lowest index.  With a uniform prior and positive
    epsilon this is simply the observed index.
    """
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (k,):
        raise ValueError("prior must have length k")
    if not math.isclose(float(prior.sum()), 1.0, rel_tol=0, abs_tol=1e-9):
        raise ValueError("prior must sum to 1")
    p = _keep_probability(epsilon, k)
    q = (1.0 - p) / (k - 1)
    likelihood = np.full(k, q)
    likelihood[observed_id] = p
    posterior = prior * likelihood
    return int(np.argmax(posterior))  # argmax returns the first maximizer


def privatization_level(
    per_entity_epsilon: float,
    thresholds: tuple[float, float, float] = DEFAULT_LEVEL_THRESHOLDS,
) -> str:
    """Coarse label for how strongly the query text was privatized."""
    high, moderate, light = thresholds
    if per_entity_epsilon < high:
        return LEVEL_HIGH
    if per_entity_epsilon < moderate:
        return LEVEL_MODERATE
    if per_entity_epsilon < light:
        return LEVEL_LIGHT
    return LEVEL_NONE


def canonical_serialize(
    params: TransformParams, replacements: tuple[tuple[str, int], ...]
) -> bytes:
    """Deterministic, injective byte encoding of the proof fields.

    Fields appear in a fixed order (policy id, budget as shortest round-trip
    decimal, vocabulary size, timestamp, replacement count, then each
    replacement's category and index in span order), each UTF-8 encoded and
    length prefixed.  No field derives from the original query text.
    """
    fields = [
        params.policy_id,
        repr(float(params.epsilon_effective)),
        str(int(params.vocab_size)),
        str(int(params.timestamp)),
        str(len(replacements)),
    ]
    for category, vocab_id in replacements:
        fields.append(category)
        fields.append(str(int(vocab_id)))
    out = bytearray()
    for f in fields:
        raw = f.encode("utf-8")
        out += str(len(raw)).encode("ascii") + b":" + raw
    return bytes(out)


def proof_digest(params: TransformParams, replacements: tuple[tuple[str, int], ...]) -> str:
    return hashlib.sha256(canonical_serialize(params, replacements)).hexdigest()


def transform_query(
    text: str,
    entities: list[Entity],
    epsilon_effective: float,
    vocabularies: Vocabularies,
    policy_id: str,
    timestamp: int,
    rng: np.random.Generator,
    odometer=None,
    level_thresholds: tuple[float, float, float] = DEFAULT_LEVEL_THRESHOLDS,
) -> TransformedQuery:
    """Privatize a query's entities and issue a proof of transformation.

    The committed budget is split equally across entities; each entity is
    privatized independently.  When an odometer is supplied, one k-ary RR
    cost entry is appended per entity.
    """
    m = len(entities)
    per_entity_eps = epsilon_effective / max(m, 1)
    replacements: list[tuple[str, int]] = []
    pieces: list[str] = []
    cursor = 0
    max_k = 0
    for ent in entities:
        if ent.vocab_id < 0:
            raise ValueError("entities must carry vocabulary ids (see Vocabularies.resolve)")
        k = vocabularies.size(ent.category)
        max_k = max(max_k, k)
        sampled = krr_privatize(ent.vocab_id, k, per_entity_eps, rng)
        replacements.append((ent.category, sampled))
        pieces.append(text[cursor:ent.start])
        pieces.append(vocabularies.token(ent.category, sampled))
        cursor = ent.end
        if odometer is not None:
            from .accounting import KaryRR  # deferred to avoid an import cycle

            odometer.append(KaryRR(per_entity_eps, k))
    pieces.append(text[cursor:])
    params = TransformParams(
        epsilon_effective=epsilon_effective,
        vocab_size=max_k,
        policy_id=policy_id,
        timestamp=timestamp,
    )
    repl = tuple(replacements)
    proof = TransformationProof(params, repl, proof_digest(params, repl))
    return TransformedQuery(
        text="".join(pieces),
        proof=proof,
        entity_count=m,
        privatization_level=privatization_level(per_entity_eps, level_thresholds),
    )


def simulate_translation_overhead(
    text_len: int, rng: np.random.Generator
) -> tuple[float, float]:
    """(latency ms, cost units) for the transformation step."""
    if text_len < 0:
        raise ValueError("text_len must be nonnegative")
    latency = rng.uniform(*TRANSLATE_LATENCY_BASE) + TRANSLATE_LATENCY_PER_CHAR * text_len
    cost = rng.uniform(*TRANSLATE_COST_BASE) + TRANSLATE_COST_PER_CHAR * text_len
    return latency, cost
