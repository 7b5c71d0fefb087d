"""Batch scanning and the precision/recall/version-quality benchmark."""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

import pandas as pd
from tqdm import tqdm

from .database import PROFILE_SUFFIX, LibraryVersionId, load_database, parse_profile
from .detector import LibraryDetector
from .errors import IoFailure, MalformedDocument, SchemaViolation, TruthMismatch
from .index import INDEX_FILENAME, load_index
from .utils import format_ratio
from .versions import DetectionPhase, VerdictQuality, VersionVerdict, verdict_quality

logger = logging.getLogger(__name__)

_worker_detector = None


def open_detector(db_dir, code_level=False, max_candidates=1, advisories_path=None):
    """Load a database directory with its index and wrap them in a detector."""
    from .analytics import load_advisories

    database = load_database(db_dir)
    index = load_index(os.path.join(db_dir, INDEX_FILENAME), database)
    advisories = load_advisories(advisories_path, database) if advisories_path else ()
    return LibraryDetector(database, index, code_level, max_candidates, advisories)


def _init_worker(db_dir, code_level, max_candidates, advisories_path):
    global _worker_detector
    _worker_detector = open_detector(db_dir, code_level, max_candidates, advisories_path)


def _scan_in_worker(item):
    app_id, path = item
    return _worker_detector.scan(app_id, read_app(path))


def read_app(path):
    try:
        with open(path, 'rb') as fh:
            return parse_profile(fh.read())
    except OSError as exc:
        raise IoFailure(f"cannot read app profile {path}: {exc}") from exc


def app_paths(paths):
    """Map app id -> profile path for files and directories of `*.profile` files."""
    found = {}
    for path in paths:
        if os.path.isdir(path):
            for name in sorted(os.listdir(path)):
                if name.endswith(PROFILE_SUFFIX):
                    found[name[:-len(PROFILE_SUFFIX)]] = os.path.join(path, name)
        else:
            name = os.path.basename(path)
            found[name[:-len(PROFILE_SUFFIX)] if name.endswith(PROFILE_SUFFIX) else name] = path
    return dict(sorted(found.items()))


def scan_apps(detector, paths, workers=1, db_dir=None, advisories_path=None):
    """
    Scan app profiles, in worker processes when `workers` > 1.

    Each worker loads its own copy of the read-only database and index from
    `db_dir`. Reports come back ordered by app id.
    """
    items = list(app_paths(paths).items())
    if workers > 1 and db_dir is not None and len(items) > 1:
        init = (db_dir, detector.code_level, detector.max_candidates, advisories_path)
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=init) as pool:
            reports = list(tqdm(pool.map(_scan_in_worker, items), total=len(items),
                                desc="Scanning apps", disable=None))
    else:
        reports = [detector.scan(app_id, read_app(path))
                   for app_id, path in tqdm(items, desc="Scanning apps", disable=None)]
    return reports


def load_truth(path):
    """Read `{app_id: [{library, version}, ...]}`."""
    try:
        with open(path, 'rb') as fh:
            data = json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read truth file {path}: {exc}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"{path} is not a truth file: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaViolation("truth file must map app ids to library lists")
    truth = {}
    for app_id, uses in data.items():
        try:
            truth[app_id] = [LibraryVersionId(u["library"], u["version"]) for u in uses]
        except (KeyError, TypeError) as exc:
            raise SchemaViolation(f"truth entry for {app_id} is malformed: {exc}") from exc
    return truth


@dataclass
class BenchmarkSummary:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    class_level: Dict[str, int] = field(default_factory=lambda: {q.value: 0 for q in VerdictQuality})
    code_level: Dict[str, int] = field(default_factory=dict)

    @property
    def uses(self):
        return self.tp + self.fn

    @property
    def precision(self):
        found = self.tp + self.fp
        return Fraction(self.tp, found) if found else Fraction(1)

    @property
    def recall(self):
        return Fraction(self.tp, self.uses) if self.uses else Fraction(1)

    @staticmethod
    def _rates(tally):
        total = sum(tally.values())
        return {k: format_ratio(Fraction(v, total) if total else 0) for k, v in tally.items()}

    def to_dict(self):
        summary = {
            "library_uses": self.uses,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": format_ratio(self.precision),
            "recall": format_ratio(self.recall),
            "class_level": {"counts": self.class_level, "rates": self._rates(self.class_level)},
        }
        if self.code_level:
            summary["code_level"] = {"counts": self.code_level, "rates": self._rates(self.code_level)}
        return summary

    def to_frame(self):
        rows = [{"phase": phase, **tally} for phase, tally in
                [("class_level", self.class_level), ("code_level", self.code_level)] if tally]
        return pd.DataFrame(rows)

    def to_text(self):
        data = self.to_dict()
        lines = [f"Library uses: {data['library_uses']}  TP {self.tp}  FP {self.fp}  FN {self.fn}",
                 f"Precision: {data['precision']}  Recall: {data['recall']}"]
        for phase in ("class_level", "code_level"):
            if phase in data:
                rates = data[phase]["rates"]
                lines.append(f"{phase}: correct {rates['correct']}  sound {rates['sound']}  "
                             f"incorrect {rates['incorrect']}")
        return "\n".join(lines) + "\n"


def evaluate(reports, truth, database, code_level=False):
    """
    Score scan reports against ground truth at the library-use level.

    A recovered library listed in the truth is a TP, one not listed an FP, a
    listed library not recovered an FN. Every TP whose true release is in the
    database gets a class-level verdict (from V_p) and, with `code_level`, a
    verdict on the release set left after refinement.
    """
    by_app = {r.app_id: r for r in reports}
    if set(by_app) != set(truth):
        missing = sorted(set(truth) - set(by_app))
        extra = sorted(set(by_app) - set(truth))
        raise TruthMismatch(f"apps without profiles: {missing[:5]}; profiles without truth: {extra[:5]}")

    summary = BenchmarkSummary()
    if code_level:
        summary.code_level = {q.value: 0 for q in VerdictQuality}
    for app_id in sorted(truth):
        expected = {vid.library: vid.version for vid in truth[app_id]}
        found = {r.instance.library: r for r in by_app[app_id].instances}
        summary.tp += len(expected.keys() & found.keys())
        summary.fp += len(found.keys() - expected.keys())
        summary.fn += len(expected.keys() - found.keys())
        for library in sorted(expected.keys() & found.keys()):
            version = expected[library]
            if LibraryVersionId(library, version) not in database:
                continue
            item = found[library]
            summary.class_level[_class_quality(item, version).value] += 1
            if code_level:
                summary.code_level[verdict_quality(item.verdict, version).value] += 1
    logger.info(f"Benchmark: precision {format_ratio(summary.precision)}, "
                f"recall {format_ratio(summary.recall)} over {summary.uses} library uses")
    return summary


def _class_quality(item, version):
    v_p = item.instance.v_p
    return verdict_quality(VersionVerdict(item.instance, v_p, v_p, DetectionPhase.CLASS_LEVEL, {}),
                           version)
