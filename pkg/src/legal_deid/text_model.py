"""Character-offset text containers.

Offsets count Python ``str`` code points (Unicode scalar values), never bytes,
and every span is half-open: ``[start, end)``.
"""

from __future__ import annotations

from dataclasses import dataclass


class SpanRangeError(IndexError):
    """A span does not fit inside the text it is applied to."""


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: Span) -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class Token:
    span: Span
    surface: str

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end


@dataclass(frozen=True)
class Sentence:
    token_range: range

    def __post_init__(self) -> None:
        if self.token_range.step != 1 or len(self.token_range) == 0:
            raise ValueError(f"sentence needs a contiguous nonempty token range, got {self.token_range}")

    @property
    def first(self) -> int:
        return self.token_range.start

    @property
    def stop(self) -> int:
        return self.token_range.stop

    def span(self, tokens: list[Token]) -> Span:
        return Span(tokens[self.first].start, tokens[self.stop - 1].end)


@dataclass(frozen=True)
class Document:
    id: str
    text: str

    def __len__(self) -> int:
        return len(self.text)


def slice_text(doc: Document, span: Span) -> str:
    if span.end > len(doc.text):
        raise SpanRangeError(f"span [{span.start}, {span.end}) exceeds document {doc.id!r} of length {len(doc.text)}")
    return doc.text[span.start:span.end]


def contains(outer: Span, inner: Span) -> bool:
    return outer.start <= inner.start and outer.end >= inner.end
