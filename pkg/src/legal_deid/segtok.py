"""Tokenizer and sentence splitter tuned for legal Spanish.

Periods that close an abbreviation ("Sr.", "fs.", "pág."), an ordinal
("7o.") or a name initial are kept inside their token and never end a
sentence.  The abbreviation inventory is a plain text file so it can be
extended without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from legal_deid.resources import data_path, read_lines
from legal_deid.text_model import Document, Sentence, Span, Token

ORDINAL_RE = re.compile(r"\d+(?:[oa]\.|[ºª°]\.?)")
_UPPER = "A-ZÁÉÍÓÚÑÜ"

TERMINALS = frozenset({".", "!", "?", "…"})
CLOSERS = frozenset({")", "]", "}", '"', "'", "»", "”", "’"})
_NO_BREAK_BEFORE = frozenset({",", ";", ":"})


@dataclass(frozen=True)
class AbbreviationLexicon:
    entries: frozenset[str]
    non_breaking_slashes: frozenset[str] = frozenset()
    ordinals: bool = True
    initials: bool = True
    casefold_fallback: bool = False

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for e in self.entries:
            if not e.endswith("."):
                raise ValueError(f"abbreviation {e!r} must end with '.'")
            folded = e.casefold()
            if folded in seen:
                raise ValueError(f"abbreviations {seen[folded]!r} and {e!r} collide after case-folding")
            seen[folded] = e

    @classmethod
    def from_lines(cls, lines: Iterable[str], **options) -> AbbreviationLexicon:
        entries, slashes = set(), set()
        for line in lines:
            (slashes if line.endswith("/") else entries).add(line)
        return cls(frozenset(entries), frozenset(slashes), **options)

    @classmethod
    def load(cls, path: str | Path, **options) -> AbbreviationLexicon:
        return cls.from_lines(read_lines(path), **options)

    @classmethod
    def default(cls, **options) -> AbbreviationLexicon:
        return cls.load(data_path("abbreviations.txt"), **options)

    def with_entries(self, *forms: str) -> AbbreviationLexicon:
        return replace(self, entries=self.entries | frozenset(forms))

    @cached_property
    def _folded(self) -> frozenset[str]:
        return frozenset(e.casefold() for e in self.entries)

    def is_abbreviation(self, form: str) -> bool:
        if form in self.entries:
            return True
        if self.casefold_fallback and form.casefold() in self._folded:
            return True
        if self.ordinals and ORDINAL_RE.fullmatch(form):
            return True
        return self.initials and len(form) == 2 and form[1] == "." and form[0].isupper()

    @cached_property
    def token_pattern(self) -> re.Pattern:
        forms = sorted(self.entries | self.non_breaking_slashes, key=len, reverse=True)
        alts = []
        if forms:
            body = "|".join(re.escape(f) for f in forms)
            if self.casefold_fallback:
                body = f"(?i:{body})"
            alts.append(rf"(?<![^\W_])(?:{body})")
        if self.ordinals:
            alts.append(r"(?<!\w)" + ORDINAL_RE.pattern)
        if self.initials:
            alts.append(rf"(?<![^\W_])[{_UPPER}]\.(?=\s*[{_UPPER}])")
        alts += [
            r"\d+(?:[/.,:-]\d+)*",
            r"[^\W\d_]+(?:[-'’][^\W\d_]+)*",
            r"\.{2,}|…",
            r"\S",
        ]
        return re.compile("|".join(f"(?:{a})" for a in alts))


@dataclass(frozen=True)
class SegmentationResult:
    tokens: list[Token] = field(default_factory=list)
    sentences: list[Sentence] = field(default_factory=list)

    def sentence_spans(self) -> list[Span]:
        return [s.span(self.tokens) for s in self.sentences]

    def sentence_of(self, token_index: int) -> int:
        for k, s in enumerate(self.sentences):
            if token_index in s.token_range:
                return k
        raise IndexError(token_index)


def tokenize(doc: Document, lex: AbbreviationLexicon) -> list[Token]:
    return [Token(Span(m.start(), m.end()), m.group()) for m in lex.token_pattern.finditer(doc.text)]


def _is_terminal(tokens: Sequence[Token], i: int, lex: AbbreviationLexicon | None) -> bool:
    surface = tokens[i].surface
    if not (surface in TERMINALS or (len(surface) > 1 and set(surface) == {"."})):
        return False
    if surface == "." and lex is not None and i > 0 and tokens[i - 1].end == tokens[i].start:
        # foreign tokenizations may split "fs." into "fs" + "."
        if lex.is_abbreviation(tokens[i - 1].surface + "."):
            return False
    return True


def _continues_sentence(surface: str) -> bool:
    first = surface[0]
    return first.islower() or first.isdigit() or surface in _NO_BREAK_BEFORE


def segment(tokens: Sequence[Token], doc: Document | None = None, lex: AbbreviationLexicon | None = None) -> list[Sentence]:
    """Group tokens into sentences.

    A sentence ends at ``. ! ? …`` (plus any closing brackets or quotes that
    follow) unless the next token starts lowercase, with a digit, or is a
    comma-like mark.  The last sentence always runs to the final token.
    """
    sentences: list[Sentence] = []
    n = len(tokens)
    start = i = 0
    while i < n:
        if _is_terminal(tokens, i, lex):
            j = i + 1
            while j < n and tokens[j].surface in CLOSERS:
                j += 1
            if j == n or not _continues_sentence(tokens[j].surface):
                sentences.append(Sentence(range(start, j)))
                start = j
            i = j
            continue
        i += 1
    if start < n:
        sentences.append(Sentence(range(start, n)))
    return sentences


def analyze(doc: Document, lex: AbbreviationLexicon) -> SegmentationResult:
    tokens = tokenize(doc, lex)
    return SegmentationResult(tokens, segment(tokens, doc, lex))
