"""Version pinpointing.

The class-level result is the best-matched release set V_p produced during
recovery. When it is wider than a threshold it is refined with code-level
features: only methods whose features differ between the candidate releases
can discriminate them, so those are the only ones compared.
"""

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Mapping

from .database import LibraryVersionId
from .errors import CodeLevelUnavailable, SchemaViolation
from .profile import EMPTY_VECTOR, ProfileLevel, feature_similarity

logger = logging.getLogger(__name__)

DEFAULT_MAX_CANDIDATES = 1


class DetectionPhase(enum.Enum):
    CLASS_LEVEL = "class_level"
    CODE_LEVEL = "code_level"


class VerdictQuality(enum.Enum):
    CORRECT = "correct"
    SOUND = "sound"
    INCORRECT = "incorrect"


@dataclass(frozen=True)
class VersionVerdict:
    instance: object
    candidates_in: FrozenSet[str]
    candidates_out: FrozenSet[str]
    phase: DetectionPhase
    similarity: Mapping[str, Fraction]

    def __post_init__(self):
        if not self.candidates_out or not self.candidates_out <= self.candidates_in:
            raise SchemaViolation("verdict releases must be a non-empty subset of its candidates")


def _code_profiles(candidates, library, db):
    profiles = {}
    for version in sorted(candidates):
        profile = db.profile(LibraryVersionId(library, version))
        if profile.level is not ProfileLevel.CODE_LEVEL:
            raise CodeLevelUnavailable(f"{library}@{version} has no code-level profile")
        profiles[version] = profile
    return profiles


def _feature(profile, name, method):
    node = profile.get(name)
    if node is None or method not in node.methods:
        return None
    return node.feature(method)


def inconsistent_methods(candidates, library, db):
    """
    Methods whose presence or features differ among the candidate releases.

    Returns:
    --------
    set
        (ClassName, MethodKey) pairs present in only some candidates, or
        present in all of them with at least two distinct feature vectors
    """
    profiles = _code_profiles(candidates, library, db)
    keys = set()
    for profile in profiles.values():
        for node in profile:
            keys.update((node.name, m) for m in node.methods)
    inconsistent = set()
    for name, method in keys:
        vectors = [_feature(p, name, method) for p in profiles.values()]
        if any(v is None for v in vectors) or len(set(vectors)) > 1:
            inconsistent.add((name, method))
    return inconsistent


def refine_versions(instance, app, candidates, library, db):
    """
    Narrow a release set by comparing code features of the inconsistent methods.

    Each candidate scores the sum of feature similarities between the app's
    copy of every inconsistent method it kept and the candidate's copy (an
    absent method compares as an empty vector). The argmax set is returned;
    when no inconsistent method survives in the app the input set is kept.
    """
    candidates = frozenset(candidates)
    if app.level is not ProfileLevel.CODE_LEVEL:
        raise CodeLevelUnavailable("app profile has no code-level features")
    if len(candidates) < 2:
        return VersionVerdict(instance, candidates, candidates, DetectionPhase.CODE_LEVEL, {})

    profiles = _code_profiles(candidates, library, db)
    differing = inconsistent_methods(candidates, library, db)
    present = set()
    for name in instance.classes:
        node = app.get(name)
        if node is not None:
            present.update((name, m) for m in node.methods)
    compared = sorted(differing & present)
    if not compared:
        logger.debug(f"{library}: no inconsistent method kept in the app, {len(candidates)} "
                     f"candidates stay")
        return VersionVerdict(instance, candidates, candidates, DetectionPhase.CODE_LEVEL, {})

    similarity = {}
    for version, profile in profiles.items():
        total = Fraction(0)
        for name, method in compared:
            theirs = _feature(profile, name, method) or EMPTY_VECTOR
            total += feature_similarity(app.get(name).feature(method), theirs)
        similarity[version] = total
    best = max(similarity.values())
    chosen = frozenset(v for v, s in similarity.items() if s == best)
    logger.debug(f"{library}: code-level refinement over {len(compared)} methods kept "
                 f"{sorted(chosen)} of {sorted(candidates)}")
    return VersionVerdict(instance, candidates, chosen, DetectionPhase.CODE_LEVEL, similarity)


def detect_version(instance, app, db, code_level=False, max_candidates=DEFAULT_MAX_CANDIDATES):
    """Class-level verdict from V_p, refined at code level when it is wider than the threshold."""
    if code_level and len(instance.v_p) > max_candidates:
        return refine_versions(instance, app, instance.v_p, instance.library, db)
    return VersionVerdict(instance, instance.v_p, instance.v_p, DetectionPhase.CLASS_LEVEL, {})


def verdict_quality(verdict, truth_version):
    if truth_version not in verdict.candidates_out:
        return VerdictQuality.INCORRECT
    if len(verdict.candidates_out) == 1:
        return VerdictQuality.CORRECT
    return VerdictQuality.SOUND
