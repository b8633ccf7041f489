"""
Command-line entry point. Data goes to stdout, logs and one-line error reasons go to stderr.

    wordlab catalog list
    wordlab count --group catalog:q8 --word "[x1,x2]" --format table
    wordlab reduce --word "[x1,x2]^6 [x3,x4]^4" --prime 2
    wordlab chartable --group catalog:heisenberg(3)
    wordlab verify thmC --group catalog:heisenberg(3) --k 1
    wordlab sweep --groups catalog:q8 catalog:d4 --words-file corpus.txt --claims thmA rational
"""

import argparse
import asyncio
import csv
import io
import json
import logging
import signal
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

from .catalog import CATALOG_ENTRIES, resolve_group
from .characters import character_table, frobenius_count_wk
from .config import WORDLAB_LOG_LEVEL, default_workers
from .errors import EXIT_CONJECTURE_FAILURE, EXIT_OK, EXIT_USAGE, PreconditionError, TheoremViolationError, WordLabError
from .fibers import METHODS, FiberDistribution, count_fibers
from .groups import FiniteGroup
from .runtime import signal_handler
from .signatures import class2_signature, reduce_signature, signature_text
from .sweep import SweepJob, build_jobs, parse_word_spec, read_words_file, run_count_sweep, run_sweep
from .verification import CLAIMS, Verdict, VerificationReport, verify_claim
from .words import Word, build_named_word

logger = logging.getLogger(__name__)

COUNT_METHODS = METHODS + ("frobenius",)
FORMATS = ("json", "csv", "table")
DEFAULT_SWEEP_CLAIMS = ("gamit", "thmA", "thmB", "rational", "chiral")


@dataclass(frozen=True)
class RunConfig:
    group: Optional[str] = None
    word: Optional[str] = None
    method: str = "auto"
    format: str = "json"
    workers: Optional[int] = None
    budget: Optional[int] = None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordlab", description="Exact word-map fiber counts on finite groups")
    subparsers = parser.add_subparsers(dest="command", required=True)

    catalog_parser = subparsers.add_parser("catalog", help="Inspect the group catalog.")
    catalog_parser.add_argument("action", choices=["list"])

    def add_group(p, required=True):
        p.add_argument("--group", required=required, help="catalog:NAME(args) or file:PATH")

    def add_word(p, required=True):
        source = p.add_mutually_exclusive_group(required=required)
        source.add_argument("--word", help='word text, e.g. "[x1,x2]^3 x1^2"')
        source.add_argument("--named", help="named word kind:n, e.g. wk:2, left_normed:3, vn:4")

    def add_limits(p):
        p.add_argument("--workers", type=_positive_int, default=None, help="enumeration worker partitions")
        p.add_argument("--budget", type=_positive_int, default=None, help="maximum word evaluations")

    count_parser = subparsers.add_parser("count", help="Exact fiber distribution of a word map.")
    add_group(count_parser)
    add_word(count_parser)
    count_parser.add_argument("--method", choices=COUNT_METHODS, default="auto")
    count_parser.add_argument("--format", choices=FORMATS, default="json")
    add_limits(count_parser)

    reduce_parser = subparsers.add_parser("reduce", help="Class-2 normal form of a word at a prime.")
    add_word(reduce_parser)
    reduce_parser.add_argument("--prime", type=_positive_int, required=True)
    reduce_parser.add_argument("--format", choices=("json", "table"), default="table")

    table_parser = subparsers.add_parser("chartable", help="Complex character table.")
    add_group(table_parser)
    table_parser.add_argument("--format", choices=("json", "table"), default="table")

    verify_parser = subparsers.add_parser("verify", help="Verify one claim on one group.")
    verify_parser.add_argument("claim", choices=list(CLAIMS))
    add_group(verify_parser)
    add_word(verify_parser, required=False)
    verify_parser.add_argument("--k", type=_positive_int, default=None, help="commutator count for w_k claims")
    verify_parser.add_argument("--other", default=None, help="second factor for the product claim")
    add_limits(verify_parser)

    sweep_parser = subparsers.add_parser("sweep", help="Batch verification over groups and a word file.")
    sweep_parser.add_argument("--groups", nargs="+", required=True)
    sweep_parser.add_argument("--words-file", required=True)
    sweep_parser.add_argument("--claims", nargs="+", choices=list(CLAIMS), default=list(DEFAULT_SWEEP_CLAIMS))
    sweep_parser.add_argument("--counts", action="store_true", help="export fiber distributions instead of verdicts")
    sweep_parser.add_argument("--method", choices=METHODS, default="auto")
    add_limits(sweep_parser)
    return parser


def _word_text(args) -> Optional[str]:
    return args.word if getattr(args, "word", None) is not None else getattr(args, "named", None)


def _config(args) -> RunConfig:
    return RunConfig(
        group=getattr(args, "group", None),
        word=_word_text(args),
        method=getattr(args, "method", "auto"),
        format=getattr(args, "format", "json"),
        workers=getattr(args, "workers", None),
        budget=getattr(args, "budget", None),
    )


def _distribution(G: FiniteGroup, w: Word, config: RunConfig) -> FiberDistribution:
    if config.method != "frobenius":
        return count_fibers(G, w, config.method, budget=config.budget, workers=config.workers)
    k = w.arity // 2
    if k < 1 or w != build_named_word("wk", k):
        raise PreconditionError("the frobenius method only counts w_k = [x1,x2]...[x_{2k-1},x_{2k}]")
    return frobenius_count_wk(character_table(G), k)


def render_distribution(d: FiberDistribution, fmt: str) -> str:
    """Support only, in handle order; counts are decimal strings."""
    if fmt == "json":
        return json.dumps(d.to_document(), separators=(",", ":"))
    rows = [(d.group.label(g), str(c)) for g, c in d.as_dict().items()]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["element", "count"])
        writer.writerows(rows)
        return buffer.getvalue().rstrip("\n")
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label.ljust(width)}  {count}" for label, count in rows)


def _render_table(G: FiniteGroup, fmt: str) -> str:
    table = character_table(G)
    if fmt == "json":
        return json.dumps(table.to_document(), separators=(",", ":"))
    document = table.to_document()
    cells = [["", *document["classes"]], ["size", *[str(s) for s in document["sizes"]]]]
    for i, row in enumerate(document["values"]):
        cells.append([f"chi{i}", *[_complex_text(re, im) for re, im in row]])
    widths = [max(len(r[c]) for r in cells) for c in range(len(cells[0]))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() for row in cells)


def _complex_text(re: float, im: float) -> str:
    def number(x: float) -> str:
        return str(int(x)) if float(x).is_integer() else f"{x:.6g}"

    if im == 0:
        return number(re)
    if re == 0:
        return f"{number(im)}i"
    return f"{number(re)}{'+' if im > 0 else '-'}{number(abs(im))}i"


def _render_reduction(text: str, p: int, fmt: str) -> str:
    w = parse_word_spec(text)
    sig = class2_signature(w)
    form = reduce_signature(sig, p)
    document = {
        "word": text,
        "signature": signature_text(sig),
        "kind": form.kind,
        "prime": p,
        "divisors": list(form.divisors),
        "s": list(form.exponents),
        "canonical": form.canonical_text(),
        "witness": [list(row) for row in form.witness],
    }
    if fmt == "json":
        return json.dumps(document, separators=(",", ":"))
    return "\n".join([
        f"signature: {document['signature']}",
        f"kind: {form.kind}",
        f"canonical: {document['canonical']}",
        f"divisors: {tuple(form.divisors)}",
        f"s: {tuple(form.exponents)}",
    ])


def _report_exit(reports: Sequence[VerificationReport]) -> int:
    return EXIT_CONJECTURE_FAILURE if any(r.verdict == Verdict.FAILS for r in reports) else EXIT_OK


def _dispatch(args, out: TextIO) -> int:
    config = _config(args)
    if args.command == "catalog":
        width = max(len(name) for name in CATALOG_ENTRIES)
        for name, description in CATALOG_ENTRIES.items():
            print(f"{name.ljust(width)}  {description}", file=out)
        return EXIT_OK

    if args.command == "count":
        G = resolve_group(config.group)
        w = parse_word_spec(config.word)
        logger.info(f"count on {G.name}: method={config.method} workers={config.workers or default_workers()}")
        print(render_distribution(_distribution(G, w, config), config.format), file=out)
        return EXIT_OK

    if args.command == "reduce":
        print(_render_reduction(config.word, args.prime, config.format), file=out)
        return EXIT_OK

    if args.command == "chartable":
        print(_render_table(resolve_group(config.group), config.format), file=out)
        return EXIT_OK

    if args.command == "verify":
        G = resolve_group(config.group)
        w = parse_word_spec(config.word) if config.word else None
        other = resolve_group(args.other) if args.other else None
        report = verify_claim(args.claim, G, w, k=args.k, other=other, budget=config.budget, workers=config.workers)
        print(report.to_json_line(), file=out)
        return _report_exit([report])

    if args.command == "sweep":
        words = read_words_file(args.words_file)
        logger.info(f"sweep: {len(args.groups)} groups x {len(words)} words, workers={config.workers or default_workers()}")
        if args.counts:
            documents = asyncio.run(run_count_sweep(args.groups, words, method=config.method,
                                                    budget=config.budget, workers=config.workers))
            for document in documents:
                print(json.dumps(document, separators=(",", ":")), file=out)
            return EXIT_OK
        jobs: List[SweepJob] = build_jobs(args.claims, args.groups, words)
        reports = asyncio.run(run_sweep(jobs, budget=config.budget, workers=config.workers))
        for report in reports:
            print(report.to_json_line(), file=out)
        return _report_exit(reports)
    return EXIT_USAGE


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Parses argv, runs one subcommand and returns its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    try:
        return _dispatch(args, out)
    except TheoremViolationError as e:
        logger.error(f"Theorem violated: {e}")
        if e.report is not None:
            print(e.report.to_json_line(), file=out)
        print(f"error: {type(e).__name__}: {e}", file=err)
        return e.exit_code
    except WordLabError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {type(e).__name__}: {e}", file=err)
        return e.exit_code
    except RecursionError:
        logger.error(f"{args.command} failed: input nests too deeply")
        print("error: RecursionError: input nests too deeply", file=err)
        return EXIT_USAGE


def main():
    logging.basicConfig(level=getattr(logging, WORDLAB_LOG_LEVEL.upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)
    sys.exit(run())
