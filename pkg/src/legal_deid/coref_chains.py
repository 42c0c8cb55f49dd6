"""Greedy chaining of name mentions into one chain per person.

Mentions are visited in text order.  A mention joins the single chain whose
canonical name it is compatible with; when several chains qualify it joins
the one sharing strictly the most name parts, and otherwise it starts a new
chain.  An ambiguous case therefore never merges two people.  Chaining is
order-dependent by design, but deterministic for a fixed mention order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from legal_deid.coref_eval import Partition
from legal_deid.ner_rules import Mention
from legal_deid.person_names import PersonName, compatible, merge, shared_parts


@dataclass(frozen=True)
class Chain:
    chain_id: int
    mention_indices: tuple[int, ...]
    canonical: PersonName


@dataclass(frozen=True)
class ChainSet:
    chains: tuple[Chain, ...] = ()
    mentions: tuple[Mention, ...] = ()
    # ambiguous mentions, left out of every chain for manual review
    unresolved: tuple[int, ...] = field(default=())

    def chain_of(self, mention_index: int) -> int | None:
        for c in self.chains:
            if mention_index in c.mention_indices:
                return c.chain_id
        return None

    def __len__(self) -> int:
        return len(self.chains)


def _surface_key(m: Mention) -> str:
    return " ".join(m.surface.split())


def chain(mentions: Sequence[Mention], fold_accents: bool = False) -> ChainSet:
    members: list[list[int]] = []
    canon: list[PersonName] = []
    by_surface: dict[tuple[str, PersonName], int] = {}
    unresolved = []
    for idx, m in enumerate(mentions):
        if m.ambiguous:
            unresolved.append(idx)
            continue
        key = (_surface_key(m), m.parsed)
        target = by_surface.get(key)
        if target is None:
            candidates = [c for c, name in enumerate(canon) if compatible(m.parsed, name, fold_accents)]
            if len(candidates) == 1:
                target = candidates[0]
            elif candidates:
                scored = sorted(((shared_parts(m.parsed, canon[c], fold_accents), c) for c in candidates), reverse=True)
                if scored[0][0] > scored[1][0]:
                    target = scored[0][1]
        if target is None:
            target = len(canon)
            members.append([])
            canon.append(m.parsed)
        elif compatible(m.parsed, canon[target], fold_accents):
            canon[target] = merge(canon[target], m.parsed)
        members[target].append(idx)
        by_surface.setdefault(key, target)
    chains = tuple(Chain(cid, tuple(ids), canon[cid]) for cid, ids in enumerate(members))
    return ChainSet(chains, tuple(mentions), tuple(unresolved))


def to_partition(cs: ChainSet) -> Partition:
    """Mentions keyed by ``(start, end)`` offsets, one entity per chain."""
    return Partition(
        [(cs.mentions[i].span.start, cs.mentions[i].span.end) for i in c.mention_indices] for c in cs.chains
    )
