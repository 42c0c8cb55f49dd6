"""Coreference partition scorers: MUC, B-cubed, CEAF (phi3/phi4), BLANC and LEA.

Every scorer takes ``(key, response)``: the gold partition first, the system
partition second.  Mentions may appear in only one of the two partitions
("twinless"); each metric documents how it treats them.

Scores are computed from entity-overlap counts (a contingency table between
key and response entities) rather than by enumerating mention pairs, so cost
grows with the number of entities, not the square of the mention count.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

import numpy as np
from scipy.optimize import linear_sum_assignment

from legal_deid.span_eval import ScoreTriple, harmonic


class UndefinedMetricError(ValueError):
    """The metric is undefined for the given partitions (e.g. zero denominator)."""


class MetricError(ValueError):
    """A scorer failed inside :func:`score_all`; ``metric`` names which one."""

    def __init__(self, metric: str, cause: Exception):
        super().__init__(f"{metric}: {cause}")
        self.metric = metric
        self.cause = cause


class Partition:
    """A set of disjoint, nonempty entities over hashable mention keys."""

    __slots__ = ("entities", "_owner")

    def __init__(self, entities: Iterable[Iterable[Hashable]] = ()):
        ents = []
        owner: dict[Hashable, int] = {}
        for raw in entities:
            ent = frozenset(raw)
            if not ent:
                raise ValueError("partition entities must be nonempty")
            for m in ent:
                if m in owner:
                    raise ValueError(f"mention {m!r} appears in more than one entity")
                owner[m] = len(ents)
            ents.append(ent)
        self.entities: tuple[frozenset, ...] = tuple(ents)
        self._owner = owner

    @property
    def mentions(self) -> frozenset:
        return frozenset(self._owner)

    def entity_of(self, mention: Hashable) -> int | None:
        return self._owner.get(mention)

    def __len__(self) -> int:
        return len(self.entities)

    def __iter__(self):
        return iter(self.entities)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return set(self.entities) == set(other.entities)

    def __hash__(self) -> int:
        return hash(frozenset(self.entities))

    def __repr__(self) -> str:
        body = ", ".join("{" + ", ".join(sorted(map(str, e))) + "}" for e in self.entities)
        return f"Partition({body})"


class SimilarityKind(enum.Enum):
    PHI3 = "phi3"  # mention overlap |K & R|
    PHI4 = "phi4"  # 2|K & R| / (|K| + |R|)


def _overlaps(key: Partition, response: Partition) -> dict[tuple[int, int], int]:
    """Sparse contingency table: (key entity, response entity) -> shared mentions."""
    table: Counter = Counter()
    for i, ent in enumerate(key.entities):
        for m in ent:
            j = response.entity_of(m)
            if j is not None:
                table[i, j] += 1
    return table


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def _muc_recall(key: Partition, response: Partition) -> tuple[int, int]:
    num = den = 0
    for ent in key.entities:
        parts = set()
        twinless = 0
        for m in ent:
            j = response.entity_of(m)
            if j is None:
                twinless += 1
            else:
                parts.add(j)
        num += len(ent) - len(parts) - twinless
        den += len(ent) - 1
    return num, den


def muc(key: Partition, response: Partition) -> ScoreTriple:
    r_num, r_den = _muc_recall(key, response)
    if r_den == 0:
        raise UndefinedMetricError("MUC needs at least one non-singleton key entity")
    p_num, p_den = _muc_recall(response, key)
    return ScoreTriple.from_pr(_ratio(p_num, p_den), r_num / r_den)


def b_cubed(key: Partition, response: Partition) -> ScoreTriple:
    """Twinless mentions contribute 0 to the side they appear on; no padding."""
    if not key.mentions:
        raise UndefinedMetricError("B-cubed needs a nonempty key")
    table = _overlaps(key, response)
    k_sizes = [len(e) for e in key.entities]
    r_sizes = [len(e) for e in response.entities]
    # each of the n shared mentions of cell (i, j) scores n/|K_i| (recall) and n/|R_j| (precision)
    r_sum = sum(n * n / k_sizes[i] for (i, _), n in table.items())
    p_sum = sum(n * n / r_sizes[j] for (_, j), n in table.items())
    recall = r_sum / len(key.mentions)
    precision = _ratio(p_sum, len(response.mentions))
    return ScoreTriple.from_pr(precision, recall)


def similarity_matrix(key: Partition, response: Partition, kind: SimilarityKind) -> np.ndarray:
    sim = np.zeros((len(key), len(response)))
    for (i, j), n in _overlaps(key, response).items():
        if kind is SimilarityKind.PHI3:
            sim[i, j] = n
        else:
            sim[i, j] = 2 * n / (len(key.entities[i]) + len(response.entities[j]))
    return sim


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[tuple[int, int], ...]
    total: float


def optimal_alignment(sim: np.ndarray) -> Alignment:
    """Maximum-weight one-to-one matching between rows and columns of ``sim``.

    Rectangular inputs behave as if zero-padded to square.
    """
    sim = np.asarray(sim, dtype=float)
    if sim.ndim != 2:
        raise ValueError("similarity matrix must be 2-D")
    if (sim < 0).any():
        raise ValueError("similarities must be nonnegative")
    if sim.size == 0:
        return Alignment((), 0.0)
    rows, cols = linear_sum_assignment(sim, maximize=True)
    pairs = tuple((int(r), int(c)) for r, c in zip(rows, cols))
    return Alignment(pairs, float(sim[rows, cols].sum()))


def ceaf(key: Partition, response: Partition, kind: SimilarityKind = SimilarityKind.PHI4) -> ScoreTriple:
    if not len(key) or not len(response):
        raise UndefinedMetricError("CEAF needs nonempty key and response")
    total = optimal_alignment(similarity_matrix(key, response, kind)).total
    if kind is SimilarityKind.PHI3:
        recall, precision = total / len(key.mentions), total / len(response.mentions)
    else:
        recall, precision = total / len(key), total / len(response)
    return ScoreTriple.from_pr(precision, recall)


def ceaf_m(key: Partition, response: Partition) -> ScoreTriple:
    return ceaf(key, response, SimilarityKind.PHI3)


def ceaf_e(key: Partition, response: Partition) -> ScoreTriple:
    return ceaf(key, response, SimilarityKind.PHI4)


@dataclass(frozen=True)
class BlancCounts:
    key_links: int
    response_links: int
    common_links: int
    key_nonlinks: int
    response_nonlinks: int
    common_nonlinks: int


def blanc_counts(key: Partition, response: Partition) -> BlancCounts:
    table = _overlaps(key, response)
    common = key.mentions & response.mentions
    c_k = sum(_pairs(len(e)) for e in key.entities)
    c_r = sum(_pairs(len(e)) for e in response.entities)
    c_both = sum(_pairs(n) for n in table.values())
    # links each partition draws among the shared mentions only
    k_shared: Counter = Counter()
    r_shared: Counter = Counter()
    for (i, j), n in table.items():
        k_shared[i] += n
        r_shared[j] += n
    k_on_common = sum(_pairs(n) for n in k_shared.values())
    r_on_common = sum(_pairs(n) for n in r_shared.values())
    n_both = _pairs(len(common)) - k_on_common - r_on_common + c_both
    return BlancCounts(
        key_links=c_k,
        response_links=c_r,
        common_links=c_both,
        key_nonlinks=_pairs(len(key.mentions)) - c_k,
        response_nonlinks=_pairs(len(response.mentions)) - c_r,
        common_nonlinks=n_both,
    )


def blanc(key: Partition, response: Partition) -> ScoreTriple:
    """Mean of the link and non-link P/R/F, each side using its own mention set.

    When neither partition has any coreference link the score reduces to the
    non-link part (and vice versa), so identical all-singleton partitions
    still score 1.  The returned F is the mean of the two F values, not the
    harmonic mean of the averaged P and R.
    """
    if len(key.mentions) < 2 or len(response.mentions) < 2:
        raise UndefinedMetricError("BLANC needs at least two mentions on each side")
    c = blanc_counts(key, response)
    link = (_ratio(c.common_links, c.response_links), _ratio(c.common_links, c.key_links))
    nonlink = (_ratio(c.common_nonlinks, c.response_nonlinks), _ratio(c.common_nonlinks, c.key_nonlinks))
    parts = []
    if c.key_links or c.response_links:
        parts.append(link)
    if c.key_nonlinks or c.response_nonlinks:
        parts.append(nonlink)
    p = sum(pr[0] for pr in parts) / len(parts)
    r = sum(pr[1] for pr in parts) / len(parts)
    f = sum(harmonic(*pr) for pr in parts) / len(parts)
    return ScoreTriple(p, r, f)


def _lea_recall(key: Partition, response: Partition) -> float:
    table = _overlaps(key, response)
    by_key: dict[int, list[tuple[int, int]]] = {}
    for (i, j), n in table.items():
        by_key.setdefault(i, []).append((j, n))
    num = 0.0
    den = 0
    for i, ent in enumerate(key.entities):
        size = len(ent)
        den += size
        if size == 1:
            # a singleton is resolved only if it is also a singleton in the response
            resolved = any(n == 1 and len(response.entities[j]) == 1 for j, n in by_key.get(i, ()))
            num += float(resolved)
        else:
            common = sum(_pairs(n) for _, n in by_key.get(i, ()))
            num += size * common / _pairs(size)
    return num / den


def lea(key: Partition, response: Partition) -> ScoreTriple:
    if not len(key) or not len(response):
        raise UndefinedMetricError("LEA needs nonempty key and response")
    return ScoreTriple.from_pr(_lea_recall(response, key), _lea_recall(key, response))


METRICS: dict[str, Callable[[Partition, Partition], ScoreTriple]] = {
    "muc": muc,
    "b_cubed": b_cubed,
    "ceaf_m": ceaf_m,
    "ceaf_e": ceaf_e,
    "blanc": blanc,
    "lea": lea,
}

METRIC_ALIASES = {
    "bcub": "b_cubed",
    "b3": "b_cubed",
    "ceafm": "ceaf_m",
    "ceaf_phi3": "ceaf_m",
    "ceafe": "ceaf_e",
    "ceaf_phi4": "ceaf_e",
}


def resolve_metric(name: str) -> str:
    name = name.strip().lower()
    name = METRIC_ALIASES.get(name, name)
    if name not in METRICS:
        raise KeyError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}")
    return name


@dataclass(frozen=True)
class CorefReport:
    muc: ScoreTriple
    b_cubed: ScoreTriple
    ceaf_m: ScoreTriple
    ceaf_e: ScoreTriple
    blanc: ScoreTriple
    lea: ScoreTriple

    def items(self):
        return [(name, getattr(self, name)) for name in METRICS]


def score_all(key: Partition, response: Partition) -> CorefReport:
    scores = {}
    for name, fn in METRICS.items():
        try:
            scores[name] = fn(key, response)
        except UndefinedMetricError as exc:
            raise MetricError(name, exc) from exc
    return CorefReport(**scores)


def read_partition(text: str) -> Partition:
    """One entity per line, mention keys separated by whitespace, ``#`` starts a comment."""
    entities = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entities.append(line.split())
    return Partition(entities)


def write_partition(partition: Partition) -> str:
    lines = [" ".join(sorted(map(str, ent))) for ent in partition.entities]
    return "\n".join(sorted(lines)) + "\n"
