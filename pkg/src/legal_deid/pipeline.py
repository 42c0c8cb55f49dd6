"""End-to-end de-identification of one document."""

from __future__ import annotations

from dataclasses import dataclass, field

from legal_deid.coref_chains import ChainSet, chain
from legal_deid.ner_rules import Mention, filter_stopforms, load_stoplist, recognize
from legal_deid.person_names import Gazetteer
from legal_deid.redactor import RedactedDocument, assign_labels, redact
from legal_deid.segtok import AbbreviationLexicon, SegmentationResult, analyze
from legal_deid.text_model import Document


@dataclass(frozen=True)
class Resources:
    lexicon: AbbreviationLexicon = field(default_factory=AbbreviationLexicon.default)
    gazetteer: Gazetteer = field(default_factory=Gazetteer.default)
    stoplist: frozenset[str] = field(default_factory=load_stoplist)
    fold_accents: bool = False


@dataclass(frozen=True)
class PipelineResult:
    segmentation: SegmentationResult
    mentions: list[Mention]
    chains: ChainSet
    redacted: RedactedDocument

    @property
    def ambiguous(self) -> list[Mention]:
        return [self.mentions[i] for i in self.chains.unresolved]


def detect(doc: Document, res: Resources) -> tuple[SegmentationResult, list[Mention]]:
    seg = analyze(doc, res.lexicon)
    return seg, filter_stopforms(recognize(doc, seg, res.gazetteer), res.stoplist)


def deidentify(doc: Document, res: Resources | None = None) -> PipelineResult:
    res = res or Resources()
    seg, mentions = detect(doc, res)
    cs = chain(mentions, res.fold_accents)
    return PipelineResult(seg, mentions, cs, redact(doc, cs, assign_labels(cs)))
