"""
libpin - Main example script.

This script generates a small synthetic library ecosystem, builds its
database and class index, then scans every generated app and prints the
detected libraries with their pinpointed versions.
"""

import argparse
import os

from src.libpin.benchmark import evaluate
from src.libpin.corpus import AppPlan, CorpusSpec, DuplicationPattern, DuplicationPlan, \
    generate_corpus, write_corpus
from src.libpin.detector import LibraryDetector
from src.libpin.index import build_index
from src.libpin.utils import save_results, setup_logging


def main():
    """Run libpin over a generated corpus."""
    parser = argparse.ArgumentParser(description='Detect libraries and versions in generated apps')
    parser.add_argument('--seed', type=int, default=7, help='Generator seed')
    parser.add_argument('--apps', type=int, default=5, help='Number of apps to generate')
    parser.add_argument('--code-level', action='store_true',
                        help='Refine versions with code-level features')
    parser.add_argument('--save-dir', default='results', help='Directory to save results')
    args = parser.parse_args()

    setup_logging()

    spec = CorpusSpec(
        seed=args.seed,
        library_count=(4, 4),
        duplication=(DuplicationPlan(DuplicationPattern.COMPLETE_INCLUSION, (0, 1)),),
        apps=AppPlan(count=args.apps, libraries_per_app=(1, 2)),
    )
    corpus = generate_corpus(spec)
    write_corpus(corpus, os.path.join(args.save_dir, 'corpus'))

    detector = LibraryDetector(corpus.database, build_index(corpus.database),
                               code_level=args.code_level)
    reports = []
    for app_id, profile in sorted(corpus.apps.items()):
        report = detector.scan(app_id, profile)
        print(report.to_text(corpus.database), end='')
        save_results(report.to_dict(corpus.database), f'{app_id}.json', args.save_dir)
        reports.append(report)

    truth = {app_id: [use.id for use in uses] for app_id, uses in corpus.truth.apps.items()}
    summary = evaluate(reports, truth, corpus.database, args.code_level)
    print(summary.to_text(), end='')

    print(f"Scan complete! Results saved to {args.save_dir} directory.")


if __name__ == "__main__":
    main()
