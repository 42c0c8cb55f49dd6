"""Structured person names and the variant-compatibility test used for chaining."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from legal_deid.resources import data_path, read_lines


class NotANameError(ValueError):
    """The surface form holds no usable capitalized name token."""


@dataclass(frozen=True)
class Gazetteer:
    given_names: frozenset[str]
    surname_particles: frozenset[str] = frozenset({"de", "del", "de la", "los"})
    honorifics: frozenset[str] = frozenset()
    plural_honorifics: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        clash = (self.given_names | self.surname_particles) & (self.honorifics | self.plural_honorifics)
        if clash:
            raise ValueError(f"gazetteer entries double as honorifics: {sorted(clash)}")
        if not self.plural_honorifics <= self.honorifics:
            raise ValueError("plural honorifics must also be listed as honorifics")

    @classmethod
    def load(cls, directory: str | Path | None = None) -> Gazetteer:
        """Read ``given_names.txt``, ``particles.txt`` and ``honorifics.txt`` from ``directory``.

        Missing files fall back to the shipped defaults.
        """
        def pick(name: str) -> Path:
            if directory is not None and (Path(directory) / name).exists():
                return Path(directory) / name
            return data_path(name)

        honorifics, plural = set(), set()
        for line in read_lines(pick("honorifics.txt")):
            form, _, number = line.partition("\t")
            honorifics.add(form.strip())
            if number.strip() == "plural":
                plural.add(form.strip())
        return cls(
            given_names=frozenset(read_lines(pick("given_names.txt"))),
            surname_particles=frozenset(read_lines(pick("particles.txt"))),
            honorifics=frozenset(honorifics),
            plural_honorifics=frozenset(plural),
        )

    @classmethod
    def default(cls) -> Gazetteer:
        return cls.load(None)


def _is_capitalized(word: str) -> bool:
    return bool(word) and word[0].isupper()


def _is_name_part(part: str) -> bool:
    # a particle-glued surname such as "de la Fuente" is judged by its head word
    return _is_capitalized(part.split()[-1])


@dataclass(frozen=True)
class PersonName:
    given: tuple[str, ...] = ()
    surnames: tuple[str, ...] = ()
    honorific: str | None = None
    caption_form: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not self.given and not self.surnames:
            raise NotANameError("a person name needs a given name or a surname")
        for part in self.given + self.surnames:
            if not part or not _is_name_part(part):
                raise NotANameError(f"name part {part!r} is not capitalized")

    @property
    def parts(self) -> tuple[str, ...]:
        return self.given + self.surnames

    def render(self, with_honorific: bool = True) -> str:
        """Given-first rendering, e.g. ``"Sr. Pedro Pérez Rodríguez"``."""
        words = list(self.parts)
        if with_honorific and self.honorific:
            words.insert(0, self.honorific)
        return " ".join(words)

    def __str__(self) -> str:
        return self.render()


def fold(text: str) -> str:
    """Strip diacritics: ``"Pérez" -> "Perez"``."""
    decomposed = unicodedata.normalize("NFD", text)
    return unicodedata.normalize("NFC", "".join(c for c in decomposed if not unicodedata.combining(c)))


def _glue_particles(tokens: Sequence[str], gaz: Gazetteer) -> list[str]:
    parts: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if _is_capitalized(tok):
            parts.append(tok)
            i += 1
            continue
        for width in (2, 1):
            phrase = " ".join(tokens[i:i + width])
            if len(tokens[i:i + width]) == width and phrase in gaz.surname_particles:
                if i + width < len(tokens) and _is_capitalized(tokens[i + width]):
                    parts.append(f"{phrase} {tokens[i + width]}")
                    i += width + 1
                    break
        else:
            raise NotANameError(f"unexpected word {tok!r} inside a name")
    return parts


def _split_plain(parts: list[str], gaz: Gazetteer, honorific: str | None) -> tuple[tuple[str, ...], tuple[str, ...]]:
    n_given = 0
    while n_given < len(parts) and parts[n_given] in gaz.given_names:
        n_given += 1
    if n_given == 0:
        if honorific or " " in parts[0]:
            # "el Sr. Pérez": after an honorific, unknown words read as surnames
            return (), tuple(parts)
        n_given = 1
    return tuple(parts[:n_given]), tuple(parts[n_given:])


def _clean(surface: str) -> list[str]:
    return surface.strip().strip(",;:").split()


def _parse_tokens(tokens: list[str], gaz: Gazetteer, honorific: str | None) -> PersonName:
    text = " ".join(tokens)
    if "," in text:
        left, right = (side.split() for side in text.split(",", 1))
        if not left:
            raise NotANameError(f"caption form without surnames: {text!r}")
        surnames = _glue_particles(left, gaz)
        given = [t for t in right if _is_capitalized(t)]
        if len(given) != len(right):
            raise NotANameError(f"unexpected word in given names: {text!r}")
        return PersonName(tuple(given), tuple(surnames), honorific, caption_form=True)
    parts = _glue_particles(tokens, gaz)
    if not parts:
        raise NotANameError("empty name")
    given, surnames = _split_plain(parts, gaz, honorific)
    return PersonName(given, surnames, honorific)


def parse_person_name(surface: str, gaz: Gazetteer) -> PersonName:
    """Parse a mention such as ``"Sr. Pedro Pérez"`` or ``"Pérez Rodríguez, Pedro"``.

    A comma marks caption order (surnames first).  Otherwise the leading
    words found in the given-name gazetteer are given names and the rest are
    surnames; when none is known the first word is taken as a given name,
    except after an honorific, where all words are read as surnames.
    """
    tokens = _clean(surface)
    honorific = None
    if tokens and tokens[0] in gaz.honorifics:
        honorific = tokens.pop(0)
    if not tokens or not any(_is_capitalized(t) for t in tokens):
        raise NotANameError(f"no capitalized name token in {surface!r}")
    return _parse_tokens(tokens, gaz, honorific)


_CONJ_SPLIT = re.compile(r"\s*,\s*|\s+y\s+")


def split_conjuncts(body: str) -> list[str]:
    return [g for g in _CONJ_SPLIT.split(body.strip()) if g]


def expand_conjunction(surface: str, gaz: Gazetteer) -> list[PersonName]:
    """Split ``"Sres. Pedro y Juan Pérez"`` into one name per person.

    Conjuncts without a surname inherit the surnames of the last conjunct.
    Anything that is not a plural honorific followed by at least two
    conjuncts is parsed as a single name.
    """
    tokens = _clean(surface)
    if not tokens or tokens[0] not in gaz.plural_honorifics:
        return [parse_person_name(surface, gaz)]
    honorific = tokens[0]
    groups = split_conjuncts(" ".join(tokens[1:]))
    if len(groups) < 2:
        return [parse_person_name(surface, gaz)]
    names = [_parse_tokens(g.split(), gaz, honorific) for g in groups]
    shared = names[-1].surnames
    return [
        PersonName(n.given, shared, n.honorific) if shared and not n.surnames else n
        for n in names
    ]


def _keyset(parts: Iterable[str], fold_accents: bool) -> frozenset[str]:
    return frozenset(fold(p) if fold_accents else p for p in parts)


def compatible(a: PersonName, b: PersonName, fold_accents: bool = False) -> bool:
    """Whether two variants may denote the same person.

    Given names and surnames must each be nested (one a subset of the other,
    an empty side nesting in anything) and the two names must share at least
    one part, so a bare given name never matches a bare surname.
    """
    ga, gb = _keyset(a.given, fold_accents), _keyset(b.given, fold_accents)
    sa, sb = _keyset(a.surnames, fold_accents), _keyset(b.surnames, fold_accents)
    if not (ga <= gb or gb <= ga):
        return False
    if not (sa <= sb or sb <= sa):
        return False
    return bool((ga | sa) & (gb | sb))


def shared_parts(a: PersonName, b: PersonName, fold_accents: bool = False) -> int:
    return len(_keyset(a.parts, fold_accents) & _keyset(b.parts, fold_accents))


def merge(a: PersonName, b: PersonName) -> PersonName:
    """Union of two compatible variants, keeping the richer word order."""
    given = a.given if len(a.given) >= len(b.given) else b.given
    surnames = a.surnames if len(a.surnames) >= len(b.surnames) else b.surnames
    return PersonName(given, surnames, a.honorific or b.honorific)
