"""Rule-based detection of person-name mentions.

Three triggers find candidates inside each sentence: an honorific followed by
capitalized words, the "Surname(s), Given(s)" party names of a case caption
("X c/ Y"), and bare capitalized runs.  The rules lean towards over-detection;
:func:`filter_stopforms` removes known non-names afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from legal_deid.person_names import Gazetteer, NotANameError, PersonName, expand_conjunction, parse_person_name
from legal_deid.resources import data_path, read_lines
from legal_deid.segtok import SegmentationResult
from legal_deid.text_model import Document, Span, Token


class Trigger(str, enum.Enum):
    HONORIFIC = "honorific"
    CAPTION = "caption"
    CAPITALIZED = "capitalized-sequence"
    CONJUNCTION = "conjunction"


@dataclass(frozen=True)
class Mention:
    span: Span
    surface: str
    parsed: PersonName
    trigger: Trigger
    # caption parties readable both as one inverted name and as two people
    ambiguous: bool = False


# capitalized only because they open a sentence
FUNCTION_WORDS = frozenset(
    """
    a al ante asimismo así atento aunque como con considerando cuando de del desde
    donde dicha dicho el en entre es esa ese esta este finalmente fue hasta la las
    le les lo los luego mientras ni no o para pero por porque pues que resultando se
    según si sin sobre su sus también tampoco un una visto vistos y ya
    """.split()
)

CAPTION_SEPARATORS = frozenset({"c/", "contra"})
_TRAILING_PARTY_WORDS = ("y otros", "y otras", "y otro", "y otra")


def _is_word(tok: Token) -> bool:
    s = tok.surface
    return s[0].isalpha() and "." not in s and "/" not in s


class _Scanner:
    def __init__(self, doc: Document, tokens: Sequence[Token], gaz: Gazetteer):
        self.doc = doc
        self.tokens = tokens
        self.gaz = gaz
        self.known_surnames: set[str] = set()
        self.mentions: list[Mention] = []

    def is_cap(self, i: int) -> bool:
        tok = self.tokens[i]
        return (
            _is_word(tok)
            and tok.surface[0].isupper()
            and tok.surface not in self.gaz.honorifics
            and tok.surface.lower() not in FUNCTION_WORDS
        )

    def run_end(self, i: int, stop: int) -> int:
        """End (exclusive) of the name run starting at token ``i``; ``i`` if none."""
        if i >= stop or not self.is_cap(i):
            return i
        end = i + 1
        while end < stop:
            if self.is_cap(end):
                end += 1
                continue
            for width in (2, 1):
                if end + width < stop:
                    phrase = " ".join(t.surface for t in self.tokens[end:end + width])
                    if phrase in self.gaz.surname_particles and self.is_cap(end + width):
                        end += width + 1
                        break
            else:
                break
        return end

    def text(self, i: int, j: int) -> str:
        return self.doc.text[self.tokens[i].start:self.tokens[j - 1].end]

    def emit(self, i: int, j: int, parsed: PersonName, trigger: Trigger, ambiguous: bool = False) -> None:
        span = Span(self.tokens[i].start, self.tokens[j - 1].end)
        self.mentions.append(Mention(span, self.doc.text[span.start:span.end], parsed, trigger, ambiguous))
        if not ambiguous:
            self.known_surnames.update(parsed.surnames)

    # -- caption --------------------------------------------------------

    def caption(self, a: int, b: int) -> set[int]:
        """Party names around "c/" in the first sentence; returns consumed token indices."""
        sep = next((k for k in range(a, b) if self.tokens[k].surface in CAPTION_SEPARATORS), None)
        if sep is None:
            return set()
        consumed: set[int] = set()
        for lo, hi in ((a, sep), (sep + 1, b)):
            hi = self._trim_party(lo, hi)
            consumed |= self._party(lo, hi)
        return consumed

    def _trim_party(self, lo: int, hi: int) -> int:
        while hi > lo and not _is_word(self.tokens[hi - 1]):
            hi -= 1
        for tail in _TRAILING_PARTY_WORDS:
            width = len(tail.split())
            if hi - width >= lo and " ".join(t.surface for t in self.tokens[hi - width:hi]) == tail:
                hi -= width
                break
        while hi > lo and not _is_word(self.tokens[hi - 1]):
            hi -= 1
        return hi

    def _party(self, lo: int, hi: int) -> set[int]:
        runs = []
        k = lo
        while k < hi:
            end = self.run_end(k, hi)
            if end == k:
                k += 1
                continue
            runs.append((k, end))
            k = end
        if len(runs) == 2 and runs[0][1] < hi and self.tokens[runs[0][1]].surface == "," and runs[1][0] == runs[0][1] + 1:
            (i, _), (_, j) = runs
            try:
                parsed = parse_person_name(self.text(i, j), self.gaz)
            except NotANameError:
                return set()
            # "Jorge Martínez, Juan Líber" also reads as two forward-order names
            ambiguous = self.tokens[i].surface in self.gaz.given_names
            self.emit(i, j, parsed, Trigger.CAPTION, ambiguous)
            return set(range(i, j))
        consumed = set()
        for i, j in runs:
            if self._bare_run(i, j):
                consumed |= set(range(i, j))
        return consumed

    # -- body -----------------------------------------------------------

    def honorific(self, i: int, stop: int) -> int:
        hon = self.tokens[i].surface
        if hon in self.gaz.plural_honorifics:
            runs = []
            k = i + 1
            while True:
                end = self.run_end(k, stop)
                if end == k:
                    break
                runs.append((k, end))
                if end + 1 < stop and self.tokens[end].surface in {",", "y"} and self.is_cap(end + 1):
                    k = end + 1
                    continue
                break
            if len(runs) >= 2:
                try:
                    names = expand_conjunction(self.text(i, runs[-1][1]), self.gaz)
                except NotANameError:
                    names = []
                if len(names) == len(runs):
                    for (a, b), name in zip(runs, names):
                        self.emit(a, b, name, Trigger.CONJUNCTION)
                    return runs[-1][1]
        end = self.run_end(i + 1, stop)
        if end == i + 1:
            return i + 1
        try:
            parsed = parse_person_name(hon + " " + self.text(i + 1, end), self.gaz)
        except NotANameError:
            return end
        self.emit(i + 1, end, parsed, Trigger.HONORIFIC)
        return end

    def _bare_run(self, i: int, j: int) -> bool:
        single = self.tokens[i].surface if j - i == 1 else None
        if single is not None and single not in self.gaz.given_names and single not in self.known_surnames:
            return False
        try:
            if single is not None and single not in self.gaz.given_names:
                parsed = PersonName(surnames=(single,))
            else:
                parsed = parse_person_name(self.text(i, j), self.gaz)
        except NotANameError:
            return False
        self.emit(i, j, parsed, Trigger.CAPITALIZED)
        return True

    def sentence(self, a: int, b: int, skip: set[int]) -> None:
        i = a
        while i < b:
            if i in skip:
                i += 1
            elif self.tokens[i].surface in self.gaz.honorifics:
                i = self.honorific(i, b)
            elif self.is_cap(i):
                end = self.run_end(i, b)
                while end > i and any(k in skip for k in range(i, end)):
                    end -= 1
                if end > i:
                    self._bare_run(i, end)
                i = max(end, i + 1)
            else:
                i += 1


def recognize(doc: Document, seg: SegmentationResult, gaz: Gazetteer) -> list[Mention]:
    """Person-name mentions of ``doc`` in text order; they never overlap or cross sentences.

    Honorifics stay outside the mention span (they survive redaction).
    Ambiguous caption parties are returned with ``ambiguous=True``.
    """
    scanner = _Scanner(doc, seg.tokens, gaz)
    for k, sent in enumerate(seg.sentences):
        skip = scanner.caption(sent.first, sent.stop) if k == 0 else set()
        scanner.sentence(sent.first, sent.stop, skip)
    return sorted(scanner.mentions, key=lambda m: m.span)


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    return frozenset(read_lines(path if path is not None else data_path("stoplist.txt")))


def filter_stopforms(mentions: Iterable[Mention], stoplist: Iterable[str]) -> list[Mention]:
    stop = {" ".join(s.split()) for s in stoplist}
    return [m for m in mentions if " ".join(m.surface.split()) not in stop]
