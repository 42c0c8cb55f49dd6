"""Standoff (.ann) annotation I/O and report serialization.

Mention lines look like ``T3<TAB>Persona 10 20<TAB>Juan Pérez``; coreference
chains are ``*<TAB>Equiv T1 T3 ...`` lines.  Mentions outside every Equiv
line are singleton chains.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Union

from legal_deid.coref_eval import CorefReport, Partition
from legal_deid.span_eval import CoverageReport, ScoreTriple, SpanScoreReport
from legal_deid.text_model import Document, Span


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class IntegrityError(ValueError):
    """Annotations disagree with the text or with each other."""


@dataclass(frozen=True)
class GoldMention:
    mention_id: str
    span: Span
    entity_type: str
    surface: str


@dataclass(frozen=True)
class GoldChain:
    chain_id: str
    mention_ids: frozenset[str]


@dataclass(frozen=True)
class AnnotatedDocument:
    doc: Document
    mentions: tuple[GoldMention, ...]
    chains: tuple[GoldChain, ...]

    def spans(self) -> list[Span]:
        return [m.span for m in self.mentions]

    def partition(self) -> Partition:
        """Gold entities keyed by mention id; unchained mentions become singletons."""
        chained = set().union(*(c.mention_ids for c in self.chains)) if self.chains else set()
        entities = [c.mention_ids for c in self.chains]
        entities += [{m.mention_id} for m in self.mentions if m.mention_id not in chained]
        return Partition(entities)

    def span_partition(self) -> Partition:
        """Same entities keyed by ``(start, end)`` offsets."""
        by_id = {m.mention_id: (m.span.start, m.span.end) for m in self.mentions}
        return Partition([by_id[i] for i in ent] for ent in self.partition().entities)


_MENTION_RE = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_EQUIV_RE = re.compile(r"^\*\tEquiv((?: T\d+)+)$")
# other standoff record kinds (relations, attributes, notes, events) are ignored
_IGNORED_PREFIXES = ("R", "A", "M", "N", "E", "#")


def parse_standoff(ann_text: str, doc: Document) -> tuple[list[GoldMention], list[GoldChain]]:
    mentions: list[GoldMention] = []
    by_id: dict[str, GoldMention] = {}
    groups: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(ann_text.splitlines(), 1):
        if not line.strip():
            continue
        m = _MENTION_RE.match(line)
        if m:
            mid, etype, start, end, surface = m.groups()
            start, end = int(start), int(end)
            if mid in by_id:
                raise IntegrityError(f"{doc.id}: duplicate mention id {mid}")
            if not start < end:
                raise ParseError(lineno, f"empty or reversed span {start} {end}")
            if end > len(doc.text):
                raise IntegrityError(f"{doc.id}: mention {mid} ends at {end}, past the text end {len(doc.text)}")
            actual = doc.text[start:end]
            if actual != surface:
                raise IntegrityError(f"{doc.id}: mention {mid} says {surface!r} but the text has {actual!r}")
            gm = GoldMention(mid, Span(start, end), etype, surface)
            by_id[mid] = gm
            mentions.append(gm)
            continue
        m = _EQUIV_RE.match(line)
        if m:
            groups.append((lineno, m.group(1).split()))
            continue
        if line.startswith(_IGNORED_PREFIXES) and "\t" in line:
            continue
        raise ParseError(lineno, f"unrecognized annotation line {line!r}")

    chains: list[GoldChain] = []
    owner: dict[str, str] = {}
    for k, (lineno, ids) in enumerate(groups, 1):
        cid = f"C{k}"
        for mid in ids:
            if mid not in by_id:
                raise IntegrityError(f"{doc.id}: Equiv on line {lineno} names unknown mention {mid}")
            if mid in owner and owner[mid] != cid:
                raise IntegrityError(f"{doc.id}: mention {mid} belongs to chains {owner[mid]} and {cid}")
            owner[mid] = cid
        chains.append(GoldChain(cid, frozenset(ids)))
    return mentions, chains


def _id_order(mid: str) -> tuple[int, str]:
    digits = mid.lstrip("T")
    return (int(digits) if digits.isdigit() else 0, mid)


def serialize_standoff(mentions: Iterable[GoldMention], chains: Iterable[GoldChain] = ()) -> str:
    lines = [f"{m.mention_id}\t{m.entity_type} {m.span.start} {m.span.end}\t{m.surface}" for m in mentions]
    for c in chains:
        lines.append("*\tEquiv " + " ".join(sorted(c.mention_ids, key=_id_order)))
    return "".join(line + "\n" for line in lines)


def load_document_pair(txt: str, ann: str, id: str) -> AnnotatedDocument:
    if not txt:
        raise ValueError(f"{id}: empty document text")
    doc = Document(id, txt)
    mentions, chains = parse_standoff(ann, doc)
    return AnnotatedDocument(doc, tuple(mentions), tuple(chains))


# -- reports --------------------------------------------------------------

Report = Union[CoverageReport, CorefReport, SpanScoreReport]


def _triple(t: ScoreTriple) -> dict:
    return {"precision": t.precision, "recall": t.recall, "f1": t.f1}


def report_to_dict(report: Report) -> dict:
    if isinstance(report, CoverageReport):
        return {"kind": "coverage", **asdict(report)}
    if isinstance(report, CorefReport):
        return {"kind": "coref", "metrics": {name: _triple(t) for name, t in report.items()}}
    if isinstance(report, SpanScoreReport):
        return {
            "kind": "span_scores",
            "coverage": asdict(report.coverage),
            "micro": {mode: _triple(t) for mode, t in report.micro.items()},
            "macro": {mode: _triple(t) for mode, t in report.macro.items()},
        }
    raise TypeError(f"cannot serialize {type(report).__name__}")


def write_report(report: Report) -> str:
    """Indented JSON with a fixed key order, so equal reports are byte-identical."""
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def _read_triple(d: dict) -> ScoreTriple:
    return ScoreTriple(d["precision"], d["recall"], d["f1"])


def read_report(text: str) -> Report:
    data = json.loads(text)
    kind = data.pop("kind", None)
    if kind == "coverage":
        return CoverageReport(**{f.name: data[f.name] for f in fields(CoverageReport)})
    if kind == "coref":
        return CorefReport(**{name: _read_triple(t) for name, t in data["metrics"].items()})
    if kind == "span_scores":
        return SpanScoreReport(
            CoverageReport(**data["coverage"]),
            {mode: _read_triple(t) for mode, t in data["micro"].items()},
            {mode: _read_triple(t) for mode, t in data["macro"].items()},
        )
    raise ValueError(f"unknown report kind {kind!r}")
