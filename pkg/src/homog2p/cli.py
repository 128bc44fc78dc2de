"""Command-line entry point: ``homog2p <subcommand> ...``.

Exit codes: 0 ok, 1 usage, 2 validation, 3 I/O or corrupt file, 4 internal
invariant violation. Payload goes to stdout as JSON, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from homog2p import __version__
from homog2p.augment import augment_corpus, load_plan_file
from homog2p.context_db import DB_FORMAT_VERSION, build_db, load_db_file, save_db_file
from homog2p.corpus import balance_report, balance_to_json, corpus_stats, read_corpus_file, write_corpus
from homog2p.disambiguator import NORMALIZERS, choose
from homog2p.engine import OOV_POLICIES, EngineConfig, G2PEngine, SentenceError, load_letter_table
from homog2p.errors import InvariantViolation, StorageError, ValidationError
from homog2p.lexicon import extract_homographs, load_lexicon_file
from homog2p.metrics import bench
from homog2p.phoneme_repr import PhonemeString, Repr, load_mapping_table_file, map_repr
from homog2p.pipeline import (
    DEFAULT_HOMOGRAPH_TEMPLATE,
    PromptTemplate,
    ReplayProvider,
    Request,
    engine_phonemizer,
    ingest_responses,
    load_fewshot,
    load_template,
    run_requests,
    schedule_requests,
)
from homog2p.text_norm import content_words, load_wordlist_file, normalize, tokenize

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3, 4
CONFIG_ENV = "HOMOG2P_CONFIG"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _wordlist(path):
    return load_wordlist_file(path) if path else frozenset()


def _inventory(args):
    lex = load_lexicon_file(args.lexicon)
    return lex, extract_homographs(lex, _wordlist(getattr(args, "exclusions", None)))


def _engine(args):
    lex, inv = _inventory(args)
    stop = _wordlist(args.stopwords)
    letters = None
    if args.oov == "letter_table":
        if not args.letter_table:
            raise UsageError("--oov letter_table requires --letter-table")
        with open(args.letter_table, encoding="utf-8") as fh:
            letters = load_letter_table(fh)
    if args.no_disambig:
        db = None
    elif not args.db:
        raise UsageError("--db is required unless --no-disambig is given")
    else:
        db = load_db_file(args.db)
    cfg = EngineConfig(
        oov_policy=args.oov,
        letter_table=letters,
        use_disambiguator=not args.no_disambig,
        stopwords=stop,
        normalizer=args.normalizer,
    )
    return G2PEngine(lex, inv, db, cfg)


def cmd_stats(args, out):
    inv = _inventory(args)[1] if args.lexicon else None
    stats = corpus_stats(read_corpus_file(args.corpus, args.format), inv)
    report = balance_report(stats)
    if args.pretty:
        s = stats.to_json()
        out.write(f"sentences          {s['sentence_count']}\n")
        out.write(f"homograph samples  {s['homograph_sentence_count']}\n")
        out.write(f"unique words       {s['unique_word_count']}\n")
        for src, n in s["source_counts"].items():
            out.write(f"  {src:<16} {n}\n")
        for h, e in report.items():
            out.write(f"  {h}\t{e.ratio:.3f}\t{list(e.counts)}{'  UNBALANCED' if e.flagged else ''}\n")
        return EXIT_OK
    _emit({"stats": stats.to_json(), "balance": balance_to_json(report)}, out)
    return EXIT_OK


def cmd_extract(args, out):
    _, inv = _inventory(args)
    _emit({
        "count": len(inv),
        "variant_histogram": {str(k): v for k, v in inv.variant_histogram().items()},
        "homographs": {w: [p.serialize() for p in ps] for w, ps in sorted(inv.items.items())},
    }, out)
    return EXIT_OK


def cmd_build_db(args, out):
    _, inv = _inventory(args)
    stop = _wordlist(args.stopwords)
    records = read_corpus_file(args.corpus, args.format)
    db = build_db(records, stop, inv, dedup_per_sentence=args.dedup)
    db.check(stop)
    save_db_file(db, args.out)
    if args.export_json:
        with open(args.export_json, "w", encoding="utf-8") as fh:
            json.dump(db.to_json(), fh, ensure_ascii=False, sort_keys=True, indent=1)
    _emit({
        "format_version": DB_FORMAT_VERSION,
        "homographs": len(db),
        "annotated_records": sum(1 for r in records if r.homograph is not None),
        "stopwords_fingerprint": db.stopwords_fingerprint,
    }, out)
    return EXIT_OK


def cmd_disambiguate(args, out):
    db = load_db_file(args.db)
    stop = _wordlist(args.stopwords)
    context = content_words(tokenize(normalize(args.sentence)), stop)
    report = choose(db, normalize(args.homograph), context, normalizer=args.normalizer)
    _emit(report.to_json(), out)
    return EXIT_OK


def _read_lines(path):
    data = sys.stdin.buffer.read() if path in (None, "-") else open(path, "rb").read()
    return data.decode("utf-8", "surrogateescape").splitlines()


def cmd_phonemize(args, out):
    engine = _engine(args)
    results = engine.phonemize_batch(_read_lines(args.input))
    log = open(args.decisions, "w", encoding="utf-8") if args.decisions else None
    failed = False
    try:
        for res in results:
            if isinstance(res, SentenceError):
                failed = True
                print(f"line {res.index + 1}: {res.error}", file=sys.stderr)
                out.write("\n")
                if log:
                    _emit(res.to_json(), log)
                continue
            out.write(res.phonemes.serialize() + "\n")
            if log:
                _emit(res.to_json(), log)
    finally:
        if log:
            log.close()
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_augment(args, out):
    plan = load_plan_file(args.plan)
    table = load_mapping_table_file(args.table) if args.table else None
    records = read_corpus_file(args.corpus, args.format, table)
    new = augment_corpus(records, plan, seed=args.seed, table=table)
    result = new if args.only_new else list(records) + new
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_corpus(result, fh, args.out_format)
        _emit({"input_records": len(records), "augmented_records": len(new), "written": len(result)}, out)
    else:
        write_corpus(result, out, args.out_format)
    return EXIT_OK


def cmd_bench(args, out):
    engine = _engine(args)
    table = load_mapping_table_file(args.table) if args.table else None
    records = read_corpus_file(args.benchmark, args.format)
    report = bench(engine, records, args.runs, label=args.label, pooled=args.pooled,
                   table=table, timing=not args.no_latency)
    if args.pretty:
        out.write("Model | PER (%) | Homograph Acc. (%) | Avg. Inf. Time (s)\n")
        out.write(report.table_row() + "\n")
    else:
        _emit(report.to_json(), out)
    return EXIT_OK


def cmd_map_repr(args, out):
    table = load_mapping_table_file(args.table)
    target = Repr(args.to)
    source = Repr.R1 if target is Repr.R2 else Repr.R2
    for line in _read_lines(args.input):
        ps = PhonemeString.parse(line, source)
        out.write(map_repr(ps, table, target).serialize() + "\n")
    return EXIT_OK


def cmd_gen_prompts(args, out):
    _, inv = _inventory(args)
    with open(args.fewshot, encoding="utf-8") as fh:
        shots = load_fewshot(fh)
    tmpl = load_template(args.template, optional=("count", "dictionary_hints")) if args.template \
        else PromptTemplate(DEFAULT_HOMOGRAPH_TEMPLATE)
    for req in schedule_requests(inv, args.per_homograph, shots, tmpl, args.per_request):
        _emit(req.to_json(), out)
    return EXIT_OK


def cmd_ingest(args, out):
    with open(args.requests, encoding="utf-8") as fh:
        requests = [Request.from_json(json.loads(ln)) for ln in fh if ln.strip()]
    if args.fixture:
        pairs = run_requests(ReplayProvider.from_file(args.fixture), requests, args.concurrency)
    elif args.responses:
        with open(args.responses, encoding="utf-8") as fh:
            texts = {int(o["id"]): o["text"] for o in (json.loads(ln) for ln in fh if ln.strip())}
        pairs = [(r, texts.get(r.id, ValidationError("no response for request"))) for r in requests]
    else:
        raise UsageError("ingest needs --fixture or --responses")
    engine = G2PEngine(*_inventory(args), None, EngineConfig(use_disambiguator=False))
    table = load_mapping_table_file(args.table) if args.table else None
    records, rejects = ingest_responses(pairs, engine_phonemizer(engine), table)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_corpus(records, fh, args.out_format)
    _emit({"accepted": len(records), "rejected": len(rejects), "rejects": [r.to_json() for r in rejects]}, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="homog2p", description="Homograph-aware grapheme-to-phoneme tools.")
    p.add_argument("--version", action="version",
                   version=f"homog2p {__version__} (context-db format {DB_FORMAT_VERSION})")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def fmt(sp, name="--format"):
        sp.add_argument(name, choices=("tsv", "jsonl"), default=None)

    def lexicon(sp, required=True):
        sp.add_argument("--lexicon", required=required)
        sp.add_argument("--exclusions")

    def engine_opts(sp):
        lexicon(sp)
        sp.add_argument("--db")
        sp.add_argument("--no-disambig", action="store_true")
        sp.add_argument("--oov", choices=OOV_POLICIES, default="passthrough_marked")
        sp.add_argument("--letter-table")
        sp.add_argument("--stopwords")
        sp.add_argument("--normalizer", choices=NORMALIZERS, default="total")

    sp = sub.add_parser("stats", help="corpus statistics and balance report")
    sp.add_argument("--corpus", required=True)
    fmt(sp)
    lexicon(sp, required=False)
    sp.add_argument("--pretty", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("extract-homographs", help="list words with several pronunciations")
    lexicon(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("build-db", help="build the context database")
    sp.add_argument("--corpus", required=True)
    fmt(sp)
    lexicon(sp)
    sp.add_argument("--stopwords")
    sp.add_argument("--out", required=True)
    sp.add_argument("--export-json")
    sp.add_argument("--dedup", action="store_true", help="count each context word once per sentence")
    sp.set_defaults(func=cmd_build_db)

    sp = sub.add_parser("disambiguate", help="score one homograph in a sentence")
    sp.add_argument("--db", required=True)
    sp.add_argument("--sentence", required=True)
    sp.add_argument("--homograph", required=True)
    sp.add_argument("--stopwords")
    sp.add_argument("--normalizer", choices=NORMALIZERS, default="total")
    sp.set_defaults(func=cmd_disambiguate)

    sp = sub.add_parser("phonemize", help="phonemize sentences read one per line")
    engine_opts(sp)
    sp.add_argument("--input", default="-")
    sp.add_argument("--decisions", help="write a JSONL decision log here")
    sp.set_defaults(func=cmd_phonemize)

    sp = sub.add_parser("augment", help="apply an augmentation plan to a corpus")
    sp.add_argument("--corpus", required=True)
    fmt(sp)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--table")
    sp.add_argument("--out")
    sp.add_argument("--out-format", choices=("tsv", "jsonl"), default="jsonl")
    sp.add_argument("--only-new", action="store_true")
    sp.set_defaults(func=cmd_augment)

    sp = sub.add_parser("bench", help="PER / homograph accuracy / latency benchmark")
    engine_opts(sp)
    sp.add_argument("--benchmark", required=True)
    fmt(sp)
    sp.add_argument("--runs", type=int, default=5)
    sp.add_argument("--label", default="homog2p")
    sp.add_argument("--pooled", action="store_true", help="pool PER over all reference tokens")
    sp.add_argument("--table")
    sp.add_argument("--no-latency", action="store_true", help="omit wall-clock fields")
    sp.add_argument("--json", action="store_true", help="JSON output (the default)")
    sp.add_argument("--pretty", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("map-repr", help="convert serialized phoneme strings between representations")
    sp.add_argument("--table", required=True)
    sp.add_argument("--to", choices=("R1", "R2"), required=True)
    sp.add_argument("--input", default="-")
    sp.set_defaults(func=cmd_map_repr)

    sp = sub.add_parser("gen-prompts", help="schedule balanced sentence-generation prompts")
    lexicon(sp)
    sp.add_argument("--fewshot", required=True)
    sp.add_argument("--template")
    sp.add_argument("--per-homograph", type=int, default=1000)
    sp.add_argument("--per-request", type=int, default=5)
    sp.set_defaults(func=cmd_gen_prompts)

    sp = sub.add_parser("ingest", help="turn provider responses into corpus records")
    lexicon(sp)
    sp.add_argument("--requests", required=True)
    sp.add_argument("--responses")
    sp.add_argument("--fixture")
    sp.add_argument("--concurrency", type=int, default=4)
    sp.add_argument("--table")
    sp.add_argument("--out", required=True)
    sp.add_argument("--out-format", choices=("tsv", "jsonl"), default="jsonl")
    sp.set_defaults(func=cmd_ingest)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValidationError(f"{CONFIG_ENV} must hold a JSON object")
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest for a in sp._actions}
            defaults = {k.replace("-", "_"): v for k, v in cfg.items() if k.replace("-", "_") in dests}
            sp.set_defaults(**defaults)
            for a in sp._actions:
                if a.dest in defaults:
                    a.required = False


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_usage().strip())
        return args.func(args, out)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (StorageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
