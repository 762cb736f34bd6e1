"""facewall command line: ingest -> analyze -> chart / detect / export.

Exit codes: 0 success, 1 usage, 2 input error, 3 store error. Flags are
validated before the store is touched; diagnostics go to stderr, the
machine-readable summary lines to stdout.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from .charts import render_series_chart
from .ingest import FORMATS, load_corpus
from .lexicon import EmotionLexicon, LexiconError, default_lexicon, load_lexicon
from .pipeline import (
    AnalysisConfig,
    NGRAMS_CSV,
    SERIES_CSV,
    analyze_store,
    detect_store,
    load_occurrence_counts,
    load_series_table,
    resolve_analysis,
    scope_for,
)
from .store import Store, StoreError
from .timeline import GRANULARITIES, VOLUME, DetectorConfig, report_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_STORE = 3

CHART_CLASSES = ("happy", "sad", "love", "disappointment", VOLUME)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for
    # input errors and uses 1 for usage.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        width, height = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 960x320, got {text!r}")
    if width < 100 or height < 100:
        raise argparse.ArgumentTypeError("chart size must be at least 100x100")
    return width, height


def _add_analysis_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--bucket", choices=GRANULARITIES, default="month",
                     help="calendar bucket granularity (default month)")
    sub.add_argument("--ngrams", type=int, default=3, metavar="N",
                     help="highest n-gram order (default 3)")
    sub.add_argument("--lexicon", metavar="FILE", default=None,
                     help="emotion lexicon JSON (default: built-in)")


def build_parser() -> _Parser:
    parser = _Parser(prog="facewall", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ingest = commands.add_parser("ingest", help="load a corpus file into the store")
    ingest.add_argument("--input", required=True, metavar="PATH")
    ingest.add_argument("--format", required=True, choices=FORMATS)
    ingest.add_argument("--store", required=True, metavar="DIR")
    ingest.set_defaults(func=cmd_ingest)

    analyze = commands.add_parser("analyze", help="label posts and build derived series")
    analyze.add_argument("--store", required=True, metavar="DIR")
    _add_analysis_flags(analyze)
    analyze.set_defaults(func=cmd_analyze)

    chart = commands.add_parser("chart", help="render a series as an SVG line chart")
    chart.add_argument("--store", required=True, metavar="DIR")
    chart.add_argument("--class", dest="cls", required=True, metavar="CLASS",
                       help="happy|sad|love|disappointment|volume")
    chart.add_argument("--out", required=True, metavar="FILE.svg")
    scope = chart.add_mutually_exclusive_group(required=True)
    scope.add_argument("--user", metavar="ID")
    scope.add_argument("--all-users", action="store_true")
    chart.add_argument("--measure", default="posts", metavar="MEASURE",
                       help="posts (default) or occurrences")
    chart.add_argument("--size", type=_size, default=(960, 320), metavar="WxH")
    _add_analysis_flags(chart)
    chart.set_defaults(func=cmd_chart)

    detect = commands.add_parser("detect", help="flag anomalous emotion-profile shifts")
    detect.add_argument("--store", required=True, metavar="DIR")
    detect.add_argument("--out", required=True, metavar="FILE.json")
    detect.add_argument("--window", type=int, default=6)
    detect.add_argument("--z", type=float, default=2.0)
    detect.add_argument("--jsd", type=float, default=0.25)
    detect.add_argument("--min-hits", type=int, default=3)
    detect.add_argument("--min-total", type=int, default=5)
    _add_analysis_flags(detect)
    detect.set_defaults(func=cmd_detect)

    export = commands.add_parser("export", help="write cached series/ngram CSVs")
    export.add_argument("--store", required=True, metavar="DIR")
    export.add_argument("--what", required=True, metavar="WHAT", help="series or ngrams")
    export.add_argument("--out", required=True, metavar="FILE.csv")
    export.add_argument("--user", metavar="ID", default=None)
    _add_analysis_flags(export)
    export.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except StoreError as exc:
        print(f"facewall: store error: {exc}", file=sys.stderr)
        return EXIT_STORE


def _load_lexicon_arg(path: str | None) -> EmotionLexicon:
    return default_lexicon() if path is None else load_lexicon(path)


def _analysis_config(args: argparse.Namespace, lexicon: EmotionLexicon) -> AnalysisConfig:
    return AnalysisConfig(
        granularity=args.bucket, n_max=args.ngrams, lexicon_digest=lexicon.digest()
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        batch = load_corpus(args.input, args.format)
    except OSError as exc:
        print(f"facewall: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = Store.open(args.store, create=True)
    with store.lock():
        receipt = store.append_batch(batch)
    for line, reason in batch.rejected[:20]:
        print(f"facewall: {args.input}:{line}: rejected ({reason})", file=sys.stderr)
    if len(batch.rejected) > 20:
        print(f"facewall: ... {len(batch.rejected) - 20} more rejections", file=sys.stderr)
    duplicates = batch.duplicates_dropped + (len(batch.posts) - receipt.written)
    print(f"ingested={receipt.written} rejected={len(batch.rejected)} duplicates={duplicates}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.ngrams < 1:
        print("facewall: --ngrams must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        lexicon = _load_lexicon_arg(args.lexicon)
    except LexiconError as exc:
        print(f"facewall: bad lexicon: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = Store.open(args.store)
    config = _analysis_config(args, lexicon)
    with store.lock():
        summary = analyze_store(store, lexicon, config)
    model_state = "trained" if summary.model_trained else "untrainable"
    if summary.posts and not summary.model_trained:
        print(
            "facewall: warning: model=untrainable "
            "(fewer than two classes have enough emoticon-labeled posts)",
            file=sys.stderr,
        )
    print(
        f"users={summary.users} posts={summary.posts} "
        f"model={model_state} config={summary.config_hash}"
    )
    return EXIT_OK


def cmd_chart(args: argparse.Namespace) -> int:
    if args.cls not in CHART_CLASSES:
        print(f"facewall: unknown class: {args.cls!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.measure not in ("posts", "occurrences"):
        print(f"facewall: unknown measure: {args.measure!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.measure == "occurrences" and args.cls == VOLUME:
        print("facewall: volume has no occurrence series", file=sys.stderr)
        return EXIT_INPUT
    try:
        lexicon = _load_lexicon_arg(args.lexicon)
    except LexiconError as exc:
        print(f"facewall: bad lexicon: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = Store.open(args.store)
    config = _analysis_config(args, lexicon)
    meta = resolve_analysis(store, config)
    try:
        scope = scope_for(meta, args.user)
    except KeyError:
        print(f"facewall: unknown user: {args.user!r}", file=sys.stderr)
        return EXIT_INPUT
    scope_label = args.user if args.user is not None else "all users"
    granularity = meta["config"]["granularity"]
    table = load_series_table(store, config, scope)
    series = table.to_series(args.cls, scope_label, granularity)
    if args.measure == "occurrences":
        _, occ_counts = load_occurrence_counts(store, config, scope)
        series.counts = occ_counts[args.cls]
    width, height = args.size
    title = f"{args.cls}: {scope_label}"
    svg = render_series_chart(series, title, width=width, height=height, measure=args.measure)
    Path(args.out).write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    detector = DetectorConfig(
        window=args.window,
        z_thresh=args.z,
        jsd_thresh=args.jsd,
        min_hits=args.min_hits,
        min_total=args.min_total,
    )
    try:
        detector.validate()
    except ValueError as exc:
        print(f"facewall: bad detector parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        lexicon = _load_lexicon_arg(args.lexicon)
    except LexiconError as exc:
        print(f"facewall: bad lexicon: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = Store.open(args.store)
    config = _analysis_config(args, lexicon)
    reports, summary = detect_store(store, config, detector)
    payload = [report_to_dict(report, summary.granularity) for report in reports]
    Path(args.out).write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"users={summary.users} flagged_users={summary.flagged_users} flags={summary.flags}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    if args.what not in ("series", "ngrams"):
        print(f"facewall: unknown export kind: {args.what!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        lexicon = _load_lexicon_arg(args.lexicon)
    except LexiconError as exc:
        print(f"facewall: bad lexicon: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = Store.open(args.store)
    config = _analysis_config(args, lexicon)
    meta = resolve_analysis(store, config)
    try:
        scope = scope_for(meta, args.user)
    except KeyError:
        print(f"facewall: unknown user: {args.user!r}", file=sys.stderr)
        return EXIT_INPUT
    name = SERIES_CSV if args.what == "series" else NGRAMS_CSV
    source = store.derived_dir(scope, config.config_hash) / name
    shutil.copyfile(source, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
