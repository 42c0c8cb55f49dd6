"""Command-line entry point: ``legal-deid <subcommand> ...``.

Exit status is 0 on a clean run, 1 when the run completed but some
documents or metrics failed, and 2 when the configuration is unusable.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from legal_deid.coref_eval import METRICS, CorefReport, UndefinedMetricError, read_partition, resolve_metric
from legal_deid.corpus_io import load_document_pair, parse_standoff, write_report
from legal_deid.ner_rules import load_stoplist
from legal_deid.person_names import Gazetteer
from legal_deid.pipeline import Resources, deidentify
from legal_deid.redactor import read_mapping, write_mapping
from legal_deid.segtok import AbbreviationLexicon, analyze, tokenize
from legal_deid.span_eval import MatchMode, MatchResult, ScoreTriple, match_spans, score_corpus
from legal_deid.text_model import Document

log = logging.getLogger("legal_deid")

EXIT_OK, EXIT_ERRORS, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    inputs: list[Path] = field(default_factory=list)
    output: Path | None = None
    lexicon: Path | None = None
    gazetteer: Path | None = None
    stoplist: Path | None = None
    system: Path | None = None
    key: Path | None = None
    response: Path | None = None
    modes: tuple[MatchMode, ...] = tuple(MatchMode)
    metrics: tuple[str, ...] = tuple(METRICS)
    jobs: int = 1

    def validate(self) -> None:
        for p in [*self.inputs, self.lexicon, self.gazetteer, self.stoplist, self.system, self.key, self.response]:
            if p is not None and not p.exists():
                raise ConfigError(f"path does not exist: {p}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")

    def resources(self) -> Resources:
        try:
            lex = AbbreviationLexicon.load(self.lexicon) if self.lexicon else AbbreviationLexicon.default()
            gaz = Gazetteer.load(self.gazetteer) if self.gazetteer else Gazetteer.default()
            stop = load_stoplist(self.stoplist)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load lexicons: {exc}") from exc
        return Resources(lex, gaz, stop)


def _text_files(inputs: Iterable[Path]) -> list[Path]:
    files = []
    for p in inputs:
        if p.is_dir():
            files.extend(sorted(p.glob("*.txt")))
        else:
            files.append(p)
    return sorted(files, key=lambda f: f.stem)


def _run_pool(fn: Callable, items: Sequence, jobs: int) -> list:
    # map() keeps input order, so output never depends on completion order
    if jobs == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- deidentify ---------------------------------------------------------------


@dataclass(frozen=True)
class _DeidJob:
    path: Path
    output: Path
    resources: Resources


def _deidentify_one(job: _DeidJob) -> tuple[str, int, int, str | None]:
    doc_id = job.path.stem
    try:
        text = job.path.read_text(encoding="utf-8")
        result = deidentify(Document(doc_id, text), job.resources)
        (job.output / f"{doc_id}.txt").write_text(result.redacted.text, encoding="utf-8")
        (job.output / f"{doc_id}.map").write_text(write_mapping(result.redacted), encoding="utf-8")
        review = job.output / f"{doc_id}.review"
        if result.ambiguous:
            review.write_text(
                "".join(f"{m.span.start}\t{m.span.end}\t{m.surface}\n" for m in result.ambiguous), encoding="utf-8"
            )
        elif review.exists():
            review.unlink()
        return doc_id, len(result.chains), len(result.ambiguous), None
    except Exception as exc:  # one bad document must not abort the corpus
        return doc_id, 0, 0, f"{type(exc).__name__}: {exc}"


def cmd_deidentify(cfg: RunConfig) -> int:
    if cfg.output is None:
        raise ConfigError("deidentify needs --output")
    res = cfg.resources()
    files = _text_files(cfg.inputs)
    cfg.output.mkdir(parents=True, exist_ok=True)
    outcomes = _run_pool(_deidentify_one, [_DeidJob(f, cfg.output, res) for f in files], cfg.jobs)
    failed = 0
    chains = 0
    for doc_id, n_chains, n_ambiguous, error in outcomes:
        if error:
            failed += 1
            log.error("%s: %s", doc_id, error)
            continue
        chains += n_chains
        if n_ambiguous:
            log.warning("%s: %d ambiguous mention(s) left unredacted, see %s.review", doc_id, n_ambiguous, doc_id)
    print(f"deidentified {len(files) - failed} of {len(files)} documents, {chains} chains")
    return EXIT_ERRORS if failed else EXIT_OK


# -- score-spans --------------------------------------------------------------


@dataclass(frozen=True)
class _SpanJob:
    path: Path
    system_dir: Path
    lexicon: AbbreviationLexicon


def _score_one(job: _SpanJob) -> tuple[str, MatchResult | None, str | None]:
    doc_id = job.path.stem
    gold_ann = job.path.with_suffix(".ann")
    sys_ann = job.system_dir / f"{doc_id}.ann"
    sys_map = job.system_dir / f"{doc_id}.map"
    if not gold_ann.exists() or not (sys_ann.exists() or sys_map.exists()):
        return doc_id, None, None
    try:
        gold = load_document_pair(job.path.read_text(encoding="utf-8"), gold_ann.read_text(encoding="utf-8"), doc_id)
        if sys_ann.exists():
            sys_mentions, _ = parse_standoff(sys_ann.read_text(encoding="utf-8"), gold.doc)
            system = [m.span for m in sys_mentions]
        else:
            system = [span for span, _, _ in read_mapping(sys_map.read_text(encoding="utf-8"))]
        tokens = tokenize(gold.doc, job.lexicon)
        return doc_id, match_spans(gold.spans(), system, tokens), None
    except Exception as exc:
        return doc_id, None, f"{type(exc).__name__}: {exc}"


def _fmt(t: ScoreTriple) -> str:
    return f"P={t.precision:.4f} R={t.recall:.4f} F={t.f1:.4f}"


def cmd_score_spans(cfg: RunConfig) -> int:
    if cfg.system is None:
        raise ConfigError("score-spans needs --system")
    lex = cfg.resources().lexicon
    files = _text_files(cfg.inputs)
    outcomes = _run_pool(_score_one, [_SpanJob(f, cfg.system, lex) for f in files], cfg.jobs)
    results = []
    failed = 0
    for doc_id, result, error in outcomes:
        if error:
            failed += 1
            log.error("%s: %s", doc_id, error)
        elif result is None:
            log.warning("%s: no gold/system pair, skipped", doc_id)
        else:
            results.append(result)
    report = score_corpus(results)
    cov = report.coverage
    print(f"documents            {cov.total_docs}")
    print(f"gold entities        {cov.total_gold_entities}")
    print(f"marked entities      {cov.marked_entities}")
    print(f"perfect entities     {cov.perfect_entities}")
    print(f"covered entities     {cov.covered_entities}")
    print(f"perfect documents    {cov.perfect_docs}")
    print(f"covered documents    {cov.covered_docs}")
    print(f"exposure_rate        {cov.exposure_rate:.4f}")
    for mode in cfg.modes:
        print(f"micro {mode.value:<8} {_fmt(report.micro[mode.value])}")
        print(f"macro {mode.value:<8} {_fmt(report.macro[mode.value])}")
    if cfg.output is not None:
        cfg.output.write_text(write_report(report), encoding="utf-8")
    return EXIT_ERRORS if failed else EXIT_OK


# -- score-coref --------------------------------------------------------------


def cmd_score_coref(cfg: RunConfig) -> int:
    if cfg.key is None or cfg.response is None:
        raise ConfigError("score-coref needs --key and --response")
    try:
        key = read_partition(cfg.key.read_text(encoding="utf-8"))
        response = read_partition(cfg.response.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    scores = {}
    failed = False
    for name in cfg.metrics:
        try:
            scores[name] = METRICS[name](key, response)
        except UndefinedMetricError as exc:
            failed = True
            print(f"{name:<8} error: {exc}")
            continue
        print(f"{name:<8} {_fmt(scores[name])}")
    if cfg.output is not None and len(scores) == len(METRICS):
        cfg.output.write_text(write_report(CorefReport(**scores)), encoding="utf-8")
    return EXIT_ERRORS if failed else EXIT_OK


# -- debug dumps ----------------------------------------------------------------


def cmd_tokenize(cfg: RunConfig) -> int:
    lex = cfg.resources().lexicon
    for f in _text_files(cfg.inputs):
        for tok in tokenize(Document(f.stem, f.read_text(encoding="utf-8")), lex):
            print(f"{f.stem}\t{tok.start}\t{tok.end}\t{tok.surface}")
    return EXIT_OK


def cmd_segment(cfg: RunConfig) -> int:
    lex = cfg.resources().lexicon
    for f in _text_files(cfg.inputs):
        doc = Document(f.stem, f.read_text(encoding="utf-8"))
        seg = analyze(doc, lex)
        for k, span in enumerate(seg.sentence_spans()):
            print(f"{f.stem}\t{k}\t{span.start}\t{span.end}\t{' '.join(doc.text[span.start:span.end].split())}")
    return EXIT_OK


COMMANDS = {
    "deidentify": cmd_deidentify,
    "score-spans": cmd_score_spans,
    "score-coref": cmd_score_coref,
    "segment": cmd_segment,
    "tokenize": cmd_tokenize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="legal-deid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", action="append", type=Path, default=[], help="document file or directory (repeatable)")
        p.add_argument("--output", type=Path, help="output directory (deidentify) or report file")
        p.add_argument("--lexicon", type=Path, help="abbreviation list file")
        p.add_argument("--gazetteer", type=Path, help="directory with given_names.txt, particles.txt, honorifics.txt")
        p.add_argument("--stoplist", type=Path, help="non-name phrase list file")
        p.add_argument("--jobs", type=int, default=1, help="parallel document workers")
        if name == "score-spans":
            p.add_argument("--system", type=Path, help="directory of system .ann or .map files")
            p.add_argument("--mode", choices=[m.value for m in MatchMode], action="append", help="match mode(s) to print")
        if name == "score-coref":
            p.add_argument("--key", type=Path, help="gold partition file")
            p.add_argument("--response", type=Path, help="system partition file")
            p.add_argument("--metric", action="append", help="metric name(s), comma-separated; default all")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        inputs=list(args.input),
        output=args.output,
        lexicon=args.lexicon,
        gazetteer=args.gazetteer,
        stoplist=args.stoplist,
        jobs=args.jobs,
        system=getattr(args, "system", None),
        key=getattr(args, "key", None),
        response=getattr(args, "response", None),
    )
    if getattr(args, "mode", None):
        cfg.modes = tuple(MatchMode(m) for m in dict.fromkeys(args.mode))
    if getattr(args, "metric", None):
        try:
            names = [resolve_metric(n) for raw in args.metric for n in raw.split(",") if n.strip()]
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from exc
        cfg.metrics = tuple(dict.fromkeys(names))
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        cfg.validate()
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot read input: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
