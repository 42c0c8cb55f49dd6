"""Replacement of chained mentions by per-person labels (AA, BB, ...)."""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Mapping

from legal_deid.coref_chains import ChainSet
from legal_deid.text_model import Document, Span


class RedactionIntegrityError(ValueError):
    """Mention spans overlap or a chain has no label."""


@dataclass(frozen=True, order=True)
class Label:
    text: str

    def __post_init__(self) -> None:
        t = self.text
        if len(t) < 2 or t[0] not in string.ascii_uppercase or t != t[0] * len(t):
            raise ValueError(f"invalid label {t!r}")

    def __str__(self) -> str:
        return self.text


def label_for(index: int) -> Label:
    """0 -> AA, 25 -> ZZ, 26 -> AAA, 52 -> AAAA, ..."""
    if index < 0:
        raise ValueError("label index must be nonnegative")
    letter = string.ascii_uppercase[index % 26]
    return Label(letter * (2 + index // 26))


def assign_labels(cs: ChainSet) -> dict[int, Label]:
    """Labels in order of each chain's first mention in the text."""
    def first_start(c):
        return min(cs.mentions[i].span.start for i in c.mention_indices)

    ordered = sorted(cs.chains, key=first_start)
    return {c.chain_id: label_for(k) for k, c in enumerate(ordered)}


@dataclass(frozen=True)
class MappingEntry:
    original: Span
    chain_id: int
    label: Label
    replacement: Span
    # kept in memory only; never written to the sidecar file
    surface: str


@dataclass(frozen=True)
class RedactedDocument:
    id: str
    text: str
    mapping: tuple[MappingEntry, ...]


def redact(doc: Document, cs: ChainSet, labels: Mapping[int, Label]) -> RedactedDocument:
    """Replace every chained mention span by its chain's label.

    Text outside the mention spans, honorifics included, is copied unchanged.
    """
    jobs = []
    for c in cs.chains:
        if c.chain_id not in labels:
            raise RedactionIntegrityError(f"chain {c.chain_id} has no label")
        for i in c.mention_indices:
            jobs.append((cs.mentions[i].span, c.chain_id, labels[c.chain_id]))
    jobs.sort(key=lambda j: j[0])
    for (a, *_), (b, *_) in zip(jobs, jobs[1:]):
        if a.overlaps(b):
            raise RedactionIntegrityError(f"mention spans {a} and {b} overlap")
    if jobs and jobs[-1][0].end > len(doc.text):
        raise RedactionIntegrityError(f"mention span {jobs[-1][0]} exceeds document length")

    pieces = []
    entries = []
    cursor = shift = 0
    for span, cid, label in jobs:
        pieces.append(doc.text[cursor:span.start])
        pieces.append(label.text)
        new_start = span.start + shift
        entries.append(MappingEntry(span, cid, label, Span(new_start, new_start + len(label.text)), doc.text[span.start:span.end]))
        shift += len(label.text) - len(span)
        cursor = span.end
    pieces.append(doc.text[cursor:])
    return RedactedDocument(doc.id, "".join(pieces), tuple(entries))


def restore(redacted: RedactedDocument) -> str:
    """Undo :func:`redact` using the in-memory mapping."""
    text = redacted.text
    # right to left so earlier replacement offsets stay valid
    for e in sorted(redacted.mapping, key=lambda e: e.replacement.start, reverse=True):
        text = text[:e.replacement.start] + e.surface + text[e.replacement.end:]
    return text


def write_mapping(redacted: RedactedDocument) -> str:
    """Sidecar lines ``start<TAB>end<TAB>chain_id<TAB>label`` on original offsets."""
    return "".join(f"{e.original.start}\t{e.original.end}\t{e.chain_id}\t{e.label.text}\n" for e in redacted.mapping)


def read_mapping(text: str) -> list[tuple[Span, int, Label]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ValueError(f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
        start, end, cid, label = fields
        rows.append((Span(int(start), int(end)), int(cid), Label(label)))
    return rows
