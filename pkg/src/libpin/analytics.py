"""Database studies: library overlap, profile uniqueness and vulnerability triage."""

import enum
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

import pandas as pd

from .database import LibraryVersionId
from .errors import EmptyProfile, IoFailure, MalformedDocument, SchemaViolation
from .profile import ProfileLevel
from .utils import format_ratio

logger = logging.getLogger(__name__)

DEFAULT_GROUP_LIMIT = 5


def overlap(a, b):
    """Share of a's class names that b also defines."""
    if len(a) == 0:
        raise EmptyProfile("overlap is undefined for an empty profile")
    return Fraction(len(a.names() & b.names()), len(a))


def _non_empty_versions(db, library):
    versions = db.versions(library, include_empty=False)
    if not versions:
        raise EmptyProfile(f"{library} has no non-empty release")
    return versions


def overlap_matrix(a, b, db):
    """
    Per-release-pair overlap(a_y, b_x) for two libraries.

    Returns:
    --------
    pandas.DataFrame
        Rows are releases of `a`, columns releases of `b`, cells Fractions
    """
    rows = _non_empty_versions(db, a)
    cols = _non_empty_versions(db, b)
    data = [[overlap(db.profile(LibraryVersionId(a, y)), db.profile(LibraryVersionId(b, x)))
             for x in cols] for y in rows]
    return pd.DataFrame(data, index=pd.Index(rows, name=a), columns=pd.Index(cols, name=b))


def library_overlap(a, b, db):
    """Maximum overlap over all collected release pairs of two libraries."""
    matrix = overlap_matrix(a, b, db)
    return max(max(row) for row in matrix.itertuples(index=False))


@dataclass
class OverlapReport:
    """Ordered library pairs sharing class names, with their maximal overlap."""

    pairs: Dict[Tuple[str, str], Fraction] = field(default_factory=dict)

    def ratios(self):
        """Raw ratios for distribution plots; binning is left to the consumer."""
        return [self.pairs[k] for k in sorted(self.pairs)]

    def to_frame(self):
        rows = [{"library": a, "other": b, "overlap": float(r), "exact": str(r)}
                for (a, b), r in sorted(self.pairs.items())]
        return pd.DataFrame(rows, columns=["library", "other", "overlap", "exact"])

    def to_dict(self):
        return {"pairs": [{"library": a, "other": b, "overlap": format_ratio(r), "exact": str(r)}
                          for (a, b), r in sorted(self.pairs.items())]}


def overlap_report(db, index, libraries=None):
    """
    Overlap for every ordered pair of libraries that share at least one class name.

    Shared-name counts are gathered from the class index, so pairs without any
    common name (overlap 0) are never enumerated.
    """
    wanted = set(libraries) if libraries else None
    shared = Counter()
    for name in index.names():
        occurrences = [e.id for e in index.lookup(name)
                       if wanted is None or e.library in wanted]
        for a in occurrences:
            for b in occurrences:
                if a.library != b.library:
                    shared[(a, b)] += 1
    report = OverlapReport()
    for (a, b), count in shared.items():
        ratio = Fraction(count, index.class_count(a))
        key = (a.library, b.library)
        if ratio > report.pairs.get(key, 0):
            report.pairs[key] = ratio
    logger.info(f"{len(report.pairs)} ordered library pairs share class names")
    return report


@dataclass
class UniquenessReport:
    level: ProfileLevel
    groups: Dict[str, List[LibraryVersionId]]

    def histogram(self):
        """Group size -> number of groups of that size."""
        return dict(sorted(Counter(len(m) for m in self.groups.values()).items()))

    def profile_count(self):
        return sum(len(m) for m in self.groups.values())

    def share_within(self, limit=DEFAULT_GROUP_LIMIT):
        """Fraction of profiles whose group holds at most `limit` releases."""
        total = self.profile_count()
        if not total:
            return Fraction(0)
        return Fraction(sum(len(m) for m in self.groups.values() if len(m) <= limit), total)

    def partition(self):
        """Groups as a set of frozensets, independent of digest values."""
        return {frozenset(members) for members in self.groups.values()}

    def to_frame(self):
        hist = self.histogram()
        return pd.DataFrame({"group_size": list(hist), "groups": list(hist.values())})

    def to_dict(self, limit=DEFAULT_GROUP_LIMIT):
        return {
            "level": self.level.value,
            "profiles": self.profile_count(),
            "groups": len(self.groups),
            "histogram": {str(size): n for size, n in self.histogram().items()},
            "share_within_limit": {"limit": limit, "share": format_ratio(self.share_within(limit))},
            "shared_groups": [[str(v) for v in members]
                              for _, members in sorted(self.groups.items()) if len(members) > 1],
        }


def uniqueness_groups(db, level=ProfileLevel.CLASS_LEVEL):
    """Partition non-empty profiles by signature at the requested level."""
    level = ProfileLevel(level)
    signatures = db.class_sigs if level is ProfileLevel.CLASS_LEVEL else db.code_sigs
    groups = defaultdict(list)
    for vid, sig in signatures.items():
        if len(db.profile(vid)) == 0:
            continue
        groups[sig.hexdigest].append(vid)
    groups = {digest: sorted(members) for digest, members in groups.items()}
    return UniquenessReport(level, dict(sorted(groups.items())))


class TriageClass(enum.Enum):
    VULNERABLE = "vulnerable"
    RISKY = "risky"
    SAFE = "safe"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class VersionPredicate:
    """
    Vulnerable releases of one library: an explicit set or bounds over release order.

    Bounds are resolved against the database's release order of the library;
    releases outside that order never satisfy a bound. An empty order means the
    library is not collected, and its bounds are left unchecked.
    """

    explicit: Optional[FrozenSet[str]] = None
    order: Tuple[str, ...] = ()
    lower: Optional[str] = None
    upper: Optional[str] = None
    upper_inclusive: bool = True

    def __post_init__(self):
        for bound in (self.lower, self.upper):
            if bound is not None and self.order and bound not in self.order:
                raise SchemaViolation(f"bound {bound!r} is not a collected release")
        if self.explicit is None and self.lower is None and self.upper is None:
            raise SchemaViolation("version predicate needs a set or at least one bound")

    def __call__(self, version):
        if self.explicit is not None:
            return version in self.explicit
        if version not in self.order:
            return False
        rank = self.order.index(version)
        if self.lower is not None and rank < self.order.index(self.lower):
            return False
        if self.upper is not None:
            top = self.order.index(self.upper)
            return rank <= top if self.upper_inclusive else rank < top
        return True

    def describe(self):
        if self.explicit is not None:
            return "{" + ", ".join(sorted(self.explicit)) + "}"
        parts = []
        if self.lower is not None:
            parts.append(f">= {self.lower}")
        if self.upper is not None:
            parts.append(f"{'<=' if self.upper_inclusive else '<'} {self.upper}")
        return " and ".join(parts)


@dataclass(frozen=True)
class Advisory:
    library: str
    vulnerable_versions: VersionPredicate
    reference: str


def parse_advisory(data, db):
    """Build an Advisory from `{library, vulnerable: {...}, reference}`."""
    if not isinstance(data, dict) or not isinstance(data.get("library"), str):
        raise SchemaViolation("advisory needs a 'library' string")
    library = data["library"]
    spec = data.get("vulnerable")
    if not isinstance(spec, dict):
        raise SchemaViolation(f"advisory for {library} needs a 'vulnerable' object")
    order = tuple(db.versions(library))
    if not order:
        logger.debug(f"advisory {data.get('reference', '')!r} names {library}, which has no "
                     f"collected releases")
    if "set" in spec:
        versions = spec["set"]
        if not isinstance(versions, list) or not all(isinstance(v, str) for v in versions):
            raise SchemaViolation(f"advisory for {library}: 'set' must be a list of version strings")
        predicate = VersionPredicate(explicit=frozenset(versions), order=order)
    elif "max_exclusive" in spec:
        predicate = VersionPredicate(order=order, lower=spec.get("min_inclusive"),
                                     upper=spec["max_exclusive"], upper_inclusive=False)
    else:
        predicate = VersionPredicate(order=order, lower=spec.get("min_inclusive"),
                                     upper=spec.get("max_inclusive"))
    return Advisory(library, predicate, str(data.get("reference", "")))


def load_advisories(path, db):
    """Read an advisory file holding one advisory object or a list of them."""
    try:
        with open(path, 'rb') as fh:
            data = json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read advisory file {path}: {exc}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"{path} is not an advisory file: {exc}") from exc
    items = data if isinstance(data, list) else [data]
    return [parse_advisory(item, db) for item in items]


def classify(verdict, advisory):
    """Vulnerable, risky or safe depending on how the detected releases meet the advisory."""
    if verdict.instance.library != advisory.library:
        return TriageClass.NOT_APPLICABLE
    hits = [advisory.vulnerable_versions(v) for v in verdict.candidates_out]
    if all(hits):
        return TriageClass.VULNERABLE
    if not any(hits):
        return TriageClass.SAFE
    return TriageClass.RISKY
