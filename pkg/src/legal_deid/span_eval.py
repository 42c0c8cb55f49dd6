"""Mention-span evaluation: perfect and covered matching, micro/macro P/R/F, corpus coverage.

A gold mention is *perfect* when a system span has exactly its limits and
*covered* when some system span contains it, possibly with extra text.
Perfect implies covered, so every covered tally includes the perfect ones.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from legal_deid.text_model import Span, Token, contains


class UndefinedRecallError(ValueError):
    """Recall was requested over a corpus without gold mentions."""


def harmonic(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> ScoreTriple:
        return cls(precision, recall, harmonic(precision, recall))

    def rounded(self, ndigits: int = 2) -> tuple[float, float, float]:
        return round(self.precision, ndigits), round(self.recall, ndigits), round(self.f1, ndigits)


class MatchMode(str, enum.Enum):
    PERFECT = "perfect"
    COVERED = "covered"


class GoldClass(str, enum.Enum):
    PERFECT = "perfect"
    COVERED = "covered"  # covered but not perfect
    MISSED = "missed"


@dataclass(frozen=True)
class MatchResult:
    """Per-document outcome of :func:`match_spans`.

    ``system_exact[k]`` says whether system span k equals some gold span,
    ``system_covering[k]`` whether it contains at least one.
    """

    gold: tuple[GoldClass, ...]
    system_exact: tuple[bool, ...]
    system_covering: tuple[bool, ...]

    @property
    def n_gold(self) -> int:
        return len(self.gold)

    @property
    def n_system(self) -> int:
        return len(self.system_exact)

    @property
    def perfect(self) -> int:
        return sum(c is GoldClass.PERFECT for c in self.gold)

    @property
    def covered(self) -> int:
        return sum(c is not GoldClass.MISSED for c in self.gold)

    def matched_gold(self, mode: MatchMode) -> int:
        return self.perfect if MatchMode(mode) is MatchMode.PERFECT else self.covered

    def used_system(self, mode: MatchMode) -> int:
        flags = self.system_exact if MatchMode(mode) is MatchMode.PERFECT else self.system_covering
        return sum(flags)

    def system_classes(self, mode: MatchMode) -> list[str]:
        flags = self.system_exact if MatchMode(mode) is MatchMode.PERFECT else self.system_covering
        return ["used" if f else "spurious" for f in flags]


def snap_to_tokens(span: Span, tokens: Sequence[Token]) -> Span:
    """Widen ``span`` so that it starts and ends on token boundaries.

    Spans falling entirely in whitespace are returned unchanged.
    """
    if not tokens:
        return span
    starts = [t.start for t in tokens]
    start, end = span.start, span.end
    i = bisect.bisect_right(starts, start) - 1
    if i >= 0 and tokens[i].start < start < tokens[i].end:
        start = tokens[i].start
    j = bisect.bisect_left(starts, end) - 1
    if j >= 0 and tokens[j].start < end < tokens[j].end:
        end = tokens[j].end
    return Span(start, end)


def match_spans(gold: Sequence[Span], system: Sequence[Span], tokens: Sequence[Token] | None = None) -> MatchResult:
    """Classify every gold mention against all system spans of one document.

    With ``tokens`` given, both sides are first widened to token boundaries.
    """
    if tokens is not None:
        gold = [snap_to_tokens(s, tokens) for s in gold]
        system = [snap_to_tokens(s, tokens) for s in system]
    system_set = set(system)
    gold_set = set(gold)
    classes = []
    for g in gold:
        if g in system_set:
            classes.append(GoldClass.PERFECT)
        elif any(contains(s, g) for s in system):
            classes.append(GoldClass.COVERED)
        else:
            classes.append(GoldClass.MISSED)
    exact = tuple(s in gold_set for s in system)
    covering = tuple(any(contains(s, g) for g in gold) for s in system)
    return MatchResult(tuple(classes), exact, covering)


def document_prf(result: MatchResult, mode: MatchMode) -> ScoreTriple:
    if result.n_gold == 0:
        raise UndefinedRecallError("document has no gold mentions")
    recall = result.matched_gold(mode) / result.n_gold
    precision = result.used_system(mode) / result.n_system if result.n_system else 0.0
    return ScoreTriple.from_pr(precision, recall)


def micro_prf(results: Iterable[MatchResult], mode: MatchMode) -> ScoreTriple:
    """Pool counts over all documents; each mention weighs the same."""
    gold = matched = system = used = 0
    for r in results:
        gold += r.n_gold
        matched += r.matched_gold(mode)
        system += r.n_system
        used += r.used_system(mode)
    if gold == 0:
        raise UndefinedRecallError("no gold mentions in corpus")
    return ScoreTriple.from_pr(used / system if system else 0.0, matched / gold)


def macro_prf(per_doc: Sequence[ScoreTriple]) -> ScoreTriple:
    """Unweighted mean of per-document P and R; F is recomputed from the means."""
    if not per_doc:
        raise ValueError("macro average over zero documents")
    n = len(per_doc)
    return ScoreTriple.from_pr(sum(t.precision for t in per_doc) / n, sum(t.recall for t in per_doc) / n)


def macro_from_results(results: Iterable[MatchResult], mode: MatchMode) -> ScoreTriple:
    # documents without gold mentions are left out, as in the corpus statistics
    return macro_prf([document_prf(r, mode) for r in results if r.n_gold])


@dataclass(frozen=True)
class CoverageReport:
    marked_entities: int = 0
    perfect_entities: int = 0
    covered_entities: int = 0
    perfect_docs: int = 0
    covered_docs: int = 0
    total_gold_entities: int = 0
    total_docs: int = 0
    exposure_rate: float = 0.0


def corpus_coverage(per_doc: Iterable[MatchResult]) -> CoverageReport:
    """Entity- and document-level coverage tallies.

    ``exposure_rate`` is the share of documents (with at least one gold
    mention) in which some gold mention is not covered by any system span.
    """
    marked = perfect = covered = perfect_docs = covered_docs = gold = docs = 0
    for r in per_doc:
        marked += r.n_system
        if not r.n_gold:
            continue
        docs += 1
        gold += r.n_gold
        perfect += r.perfect
        covered += r.covered
        perfect_docs += r.perfect == r.n_gold
        covered_docs += r.covered == r.n_gold
    exposure = 1 - covered_docs / docs if docs else 0.0
    return CoverageReport(
        marked_entities=marked,
        perfect_entities=perfect,
        covered_entities=covered,
        perfect_docs=perfect_docs,
        covered_docs=covered_docs,
        total_gold_entities=gold,
        total_docs=docs,
        exposure_rate=exposure,
    )


@dataclass(frozen=True)
class SpanScoreReport:
    coverage: CoverageReport
    micro: dict[str, ScoreTriple] = field(default_factory=dict)
    macro: dict[str, ScoreTriple] = field(default_factory=dict)


def score_corpus(results: Sequence[MatchResult]) -> SpanScoreReport:
    """Coverage plus micro/macro triples in both match modes.

    A corpus without any gold mention yields zero triples instead of raising.
    """
    micro, macro = {}, {}
    for mode in MatchMode:
        try:
            micro[mode.value] = micro_prf(results, mode)
            macro[mode.value] = macro_from_results(results, mode)
        except ValueError:
            micro[mode.value] = macro[mode.value] = ScoreTriple(0.0, 0.0, 0.0)
    return SpanScoreReport(corpus_coverage(results), micro, macro)
