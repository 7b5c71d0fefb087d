"""Command-line interface for libpin."""

import argparse
import logging
import os
import sys

from .analytics import library_overlap, overlap_matrix, overlap_report, uniqueness_groups
from .benchmark import evaluate, load_truth, open_detector, scan_apps
from .corpus import generate_corpus, load_corpus_spec, write_corpus
from .database import build_database, load_database, load_profiles_dir, save_database
from .errors import INPUT_ERROR, LibpinError
from .index import INDEX_FILENAME, build_index, load_index, save_index
from .profile import ProfileLevel
from .utils import dump_json, format_ratio, save_results, setup_logging
from .versions import DEFAULT_MAX_CANDIDATES

logger = logging.getLogger(__name__)

DB_ENV = "LIBPIN_DB"


def _db_dir(args):
    db_dir = args.db or os.environ.get(DB_ENV)
    if not db_dir:
        raise LibpinError(f"no database given: pass --db or set {DB_ENV}")
    return db_dir


def _emit(data, fmt, text):
    print(dump_json(data) if fmt == "json" else text, end="")


def cmd_db_build(args):
    """Parse every profile document, then write the database and its index."""
    items, failures = [], []
    for profiles_dir in args.profiles_dirs:
        if not os.path.isdir(profiles_dir):
            raise LibpinError(f"{profiles_dir} is not a directory")
        found, failed = load_profiles_dir(profiles_dir)
        items.extend(found)
        failures.extend(failed)
    if failures:
        for path, exc in failures:
            print(f"{path}: {type(exc).__name__}: {exc}", file=sys.stderr)
        print(f"{len(failures)} profile documents failed to load", file=sys.stderr)
        return INPUT_ERROR

    database = build_database(items)
    save_database(database, args.out_dir)
    save_index(build_index(database), os.path.join(args.out_dir, INDEX_FILENAME))
    print(f"{len(database)} entries")
    print(f"{len(database.empty_ids)} empty profiles")
    return 0


def cmd_db_index(args):
    """Rebuild the class index of an existing database directory."""
    database = load_database(args.db_dir)
    index = build_index(database)
    save_index(index, os.path.join(args.db_dir, INDEX_FILENAME))
    print(f"{len(index)} class names, {index.total_entries()} class entries")
    return 0


def _detector(args, db_dir, advisories=None):
    return open_detector(db_dir, args.code_level, args.max_candidates, advisories)


def cmd_scan(args):
    """Scan one or more app profiles and print (or save) their reports."""
    db_dir = _db_dir(args)
    detector = _detector(args, db_dir, args.advisories)
    reports = scan_apps(detector, args.apps, args.workers, db_dir, args.advisories)
    documents = [r.to_dict(detector.database, args.timings) for r in reports]

    if args.output:
        for report, document in zip(reports, documents):
            save_results(document, f"{report.app_id}.json", args.output)
        print(f"{len(reports)} reports written to {args.output}")
        return 0
    if args.format == "text":
        print("".join(r.to_text(detector.database) for r in reports), end="")
    else:
        print(dump_json(documents[0] if len(documents) == 1 else documents), end="")
    return 0


def cmd_vuln(args):
    """Triage every detected library of an app against an advisory file."""
    db_dir = _db_dir(args)
    detector = _detector(args, db_dir, args.advisories)
    rows = []
    for report in scan_apps(detector, [args.app]):
        for item in report.instances:
            for advisory, triage in item.classifications:
                rows.append({
                    "app": report.app_id,
                    "library": item.instance.library,
                    "versions": sorted(item.verdict.candidates_out),
                    "advisory": advisory.reference,
                    "vulnerable": advisory.vulnerable_versions.describe(),
                    "triage": triage.value,
                })
    text = "".join(f"{r['app']} {r['library']} [{', '.join(r['versions'])}] "
                   f"{r['advisory']} ({r['vulnerable']}): {r['triage']}\n" for r in rows)
    _emit(rows, args.format, text or "no detected library is covered by the advisories\n")
    return 0


def cmd_bench(args):
    """Scan an app directory and score the reports against a truth file."""
    db_dir = _db_dir(args)
    truth = load_truth(args.truth)
    if not os.path.isdir(args.apps_dir):
        raise LibpinError(f"{args.apps_dir} is not a directory")
    detector = _detector(args, db_dir)
    reports = scan_apps(detector, [args.apps_dir], args.workers, db_dir)
    summary = evaluate(reports, truth, detector.database, args.code_level)
    if args.csv:
        save_results(summary.to_frame(), os.path.basename(args.csv),
                     os.path.dirname(args.csv) or '.')
    _emit(summary.to_dict(), args.format, summary.to_text())
    return 0


def cmd_overlap(args):
    """Library overlap: one pair's release matrix, or every sharing pair."""
    from .visualization import plot_overlap_distribution, plot_overlap_matrix

    db_dir = _db_dir(args)
    database = load_database(db_dir)
    if args.library:
        a, b = args.library
        matrix = overlap_matrix(a, b, database)
        best = library_overlap(a, b, database)
        data = {
            "library": a,
            "other": b,
            "overlap": format_ratio(best),
            "matrix": {str(y): {str(x): format_ratio(matrix.at[y, x]) for x in matrix.columns}
                       for y in matrix.index},
        }
        text = f"overlap({a}, {b}) = {format_ratio(best)}\n" + \
            matrix.astype(float).round(6).to_string() + "\n"
        if args.plot:
            plot_overlap_matrix(matrix, args.plot)
    else:
        index = load_index(os.path.join(db_dir, INDEX_FILENAME), database)
        report = overlap_report(database, index)
        data = report.to_dict()
        text = "".join(f"{a} -> {b}: {format_ratio(r)}\n" for (a, b), r in sorted(report.pairs.items()))
        text = text or "no two libraries share a class name\n"
        if args.plot:
            plot_overlap_distribution(report, args.plot)
    _emit(data, args.format, text)
    return 0


def cmd_uniq(args):
    """Group releases by profile signature and summarize the group sizes."""
    from .visualization import plot_uniqueness

    database = load_database(_db_dir(args))
    report = uniqueness_groups(database, ProfileLevel(args.level))
    if args.plot:
        code_report = None
        if args.level == ProfileLevel.CLASS_LEVEL.value and database.code_sigs:
            code_report = uniqueness_groups(database, ProfileLevel.CODE_LEVEL)
        plot_uniqueness(report, code_report, args.plot)
    data = report.to_dict(args.limit)
    text = (f"{data['profiles']} profiles in {data['groups']} {args.level}-level groups; "
            f"{data['share_within_limit']['share']} within groups of <= {args.limit}\n" +
            "".join(f"  size {size}: {n} groups\n" for size, n in report.histogram().items()))
    _emit(data, args.format, text)
    return 0


def cmd_gen(args):
    """Generate a synthetic corpus: database, app profiles and ground truth."""
    corpus = generate_corpus(load_corpus_spec(args.spec))
    db_dir, apps_dir = write_corpus(corpus, args.out_dir)
    print(f"{len(corpus.database)} library releases written to {db_dir}")
    print(f"{len(corpus.apps)} app profiles written to {apps_dir}")
    return 0


def _add_db(parser):
    parser.add_argument("--db", help=f"Database directory (or set {DB_ENV})")


def _add_detection(parser):
    parser.add_argument("--code-level", action="store_true",
                        help="Refine version sets with code-level features")
    parser.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES,
                        help="Refine only when more candidate releases than this remain")


def _add_format(parser):
    parser.add_argument("--format", choices=["json", "text"], default="json",
                        help="Output format")


def build_parser():
    """Build the argument parser for every subcommand."""
    parser = argparse.ArgumentParser(
        prog="libpin",
        description="Detect third-party libraries and their versions in app profiles",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    noise.add_argument("-q", "--quiet", action="store_true", help="Log warnings only")

    subparsers = parser.add_subparsers(dest="command", required=True, help="Operation")

    db_parser = subparsers.add_parser("db", help="Build or re-index a library database")
    db_sub = db_parser.add_subparsers(dest="db_command", required=True)
    build = db_sub.add_parser("build", help="Build a database from profile directories")
    build.add_argument("profiles_dirs", nargs="+", metavar="PROFILES_DIR",
                       help="Directory of <library>/<version>.profile documents")
    build.add_argument("out_dir", help="Database directory to write")
    build.set_defaults(func=cmd_db_build)
    index = db_sub.add_parser("index", help="Rebuild the class index of a database")
    index.add_argument("db_dir", help="Database directory")
    index.set_defaults(func=cmd_db_index)

    scan = subparsers.add_parser("scan", help="Detect libraries and versions in app profiles")
    scan.add_argument("apps", nargs="+", metavar="APP",
                      help="App profile documents or directories of them")
    _add_db(scan)
    _add_detection(scan)
    scan.add_argument("--advisories", help="Advisory file to triage detected libraries against")
    _add_format(scan)
    scan.add_argument("--timings", action="store_true", help="Include per-phase timings")
    scan.add_argument("--workers", type=int, default=1, help="Worker processes")
    scan.add_argument("--output", help="Write one <app>.json report per app into this directory")
    scan.set_defaults(func=cmd_scan)

    bench = subparsers.add_parser("bench", help="Score detection against ground truth")
    bench.add_argument("apps_dir", help="Directory of app profile documents")
    bench.add_argument("truth", help="Truth file mapping app ids to library uses")
    _add_db(bench)
    _add_detection(bench)
    _add_format(bench)
    bench.add_argument("--workers", type=int, default=1, help="Worker processes")
    bench.add_argument("--csv", help="Also save the verdict tallies as CSV")
    bench.set_defaults(func=cmd_bench)

    overlap = subparsers.add_parser("overlap", help="Class-name overlap between libraries")
    _add_db(overlap)
    overlap.add_argument("--library", nargs=2, metavar=("A", "B"),
                         help="Release-pair matrix of overlap(A, B)")
    overlap.add_argument("--plot", help="Save a figure to this path")
    _add_format(overlap)
    overlap.set_defaults(func=cmd_overlap)

    uniq = subparsers.add_parser("uniq", help="Group releases by profile signature")
    _add_db(uniq)
    uniq.add_argument("--level", choices=[lvl.value for lvl in ProfileLevel],
                      default=ProfileLevel.CLASS_LEVEL.value, help="Signature level")
    uniq.add_argument("--limit", type=int, default=5, help="Group size counted as discernible")
    uniq.add_argument("--plot", help="Save a figure to this path")
    _add_format(uniq)
    uniq.set_defaults(func=cmd_uniq)

    vuln = subparsers.add_parser("vuln", help="Triage an app's libraries against advisories")
    vuln.add_argument("app", help="App profile document")
    vuln.add_argument("--advisories", required=True, help="Advisory file")
    _add_db(vuln)
    _add_detection(vuln)
    _add_format(vuln)
    vuln.set_defaults(func=cmd_vuln)

    gen = subparsers.add_parser("gen", help="Generate a synthetic corpus")
    gen.add_argument("spec", help="Corpus spec file")
    gen.add_argument("out_dir", help="Output directory")
    gen.set_defaults(func=cmd_gen)

    return parser


def main(argv=None):
    """Main entry point for the command-line interface."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except LibpinError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"libpin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
