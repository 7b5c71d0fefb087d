"""Library instance recovery.

App classes are matched by name against the class index, arranged into a
region graph (settled nodes with a single possible provenance, floating
nodes with several), and floating classes are then transferred to the
library candidates they most plausibly belong to.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Tuple

from .database import LibraryVersionId
from .errors import UnknownVersion
from .profile import ClassName, class_similarity

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


@dataclass(frozen=True)
class Counterparts:
    """Library classes sharing an app class's name with non-zero similarity."""

    app_class: ClassName
    matches: Tuple[tuple, ...] = ()

    def libraries(self):
        return frozenset(entry.library for entry, _ in self.matches)

    def scores(self):
        """Release -> similarity (a release defines each name at most once)."""
        return {entry.id: score for entry, score in self.matches}


def counterparts(ac, index):
    """Look up `ac` by name and keep every library class with similarity > 0."""
    matches = []
    for entry in index.lookup(ac.name):
        score = class_similarity(ac, entry.node)
        if score > 0:
            matches.append((entry, score))
    return Counterparts(ac.name, tuple(matches))


@dataclass
class RegionGraph:
    """
    App classes arranged by possible provenance.

    `settled` has a node for every library that appears among any class's
    counterparts, possibly empty; `floating` is keyed by the sorted tuple of
    libraries a class's counterparts come from. Each floating node is a
    successor of the settled node of every library in its key.
    """

    settled: Dict[str, set] = field(default_factory=dict)
    floating: Dict[Tuple[str, ...], set] = field(default_factory=dict)
    unmatched: List[ClassName] = field(default_factory=list)
    # app class -> {release: similarity}
    scores: Dict[ClassName, Dict[LibraryVersionId, Fraction]] = field(default_factory=dict)

    def successors(self, library):
        return sorted(key for key in self.floating if library in key)

    def node_of(self, name):
        for library, members in self.settled.items():
            if name in members:
                return (library,)
        for key, members in self.floating.items():
            if name in members:
                return key
        return None


def build_region_graph(app, index):
    """Place every app class in a settled node, a floating node, or `unmatched`."""
    graph = RegionGraph()
    for node in sorted(app, key=lambda n: n.name):
        found = counterparts(node, index)
        libraries = sorted(found.libraries())
        if not libraries:
            graph.unmatched.append(node.name)
            continue
        graph.scores[node.name] = found.scores()
        for library in libraries:
            graph.settled.setdefault(library, set())
        if len(libraries) == 1:
            graph.settled[libraries[0]].add(node.name)
        else:
            graph.floating.setdefault(tuple(libraries), set()).add(node.name)
    logger.debug(f"Region graph: {len(graph.settled)} settled nodes, {len(graph.floating)} "
                 f"floating nodes, {len(graph.unmatched)} unmatched classes")
    return graph


@dataclass(frozen=True)
class Indicators:
    matched: int
    sim_s: Fraction
    sim_a: Fraction
    prop: Fraction
    comp: Fraction

    @property
    def score(self):
        return self.sim_a * self.prop * self.comp


class Candidate:
    """
    A library candidate: app classes attributed to one library.

    Per-release Sim_s sums and matched-class counts are kept as running
    accumulators so V_p can be refreshed after every single transfer.
    """

    def __init__(self, library, versions, class_counts, members=None):
        self.library = library
        self.versions = list(versions)
        self.class_counts = class_counts
        self.classes: Dict[ClassName, Dict[str, Fraction]] = {}
        self._sim_s = {v: ZERO for v in self.versions}
        self._matched = {v: 0 for v in self.versions}
        for name, scores in (members or {}).items():
            self.add(name, scores)

    @classmethod
    def for_library(cls, library, index, members=None):
        versions = index.versions(library)
        counts = {v: index.class_count(LibraryVersionId(library, v)) for v in versions}
        return cls(library, versions, counts, members)

    def _own_scores(self, scores):
        return {vid.version: s for vid, s in scores.items()
                if vid.library == self.library and vid.version in self._sim_s}

    def add(self, name, scores):
        own = self._own_scores(scores)
        self.classes[name] = own
        for version, score in own.items():
            self._sim_s[version] += score
            self._matched[version] += 1

    def remove(self, name):
        for version, score in self.classes.pop(name).items():
            self._sim_s[version] -= score
            self._matched[version] -= 1

    def copy(self):
        twin = Candidate(self.library, self.versions, self.class_counts)
        twin.classes = dict(self.classes)
        twin._sim_s = dict(self._sim_s)
        twin._matched = dict(self._matched)
        return twin

    def __len__(self):
        return len(self.classes)

    def sim_s(self, version):
        return self._sim_s[version]

    def indicators(self, version):
        if version not in self._sim_s:
            raise UnknownVersion(f"{self.library}@{version} is not a collected release")
        matched = self._matched[version]
        sim_s = self._sim_s[version]
        sim_a = sim_s / matched if matched else ZERO
        prop = Fraction(matched, self.class_counts[version])
        comp = Fraction(matched, len(self.classes)) if self.classes else ZERO
        return Indicators(matched, sim_s, sim_a, prop, comp)

    def best_versions(self):
        """Releases maximizing Sim_s; every release when the candidate is empty."""
        if not self.classes:
            return frozenset(self.versions)
        best = max(self._sim_s.values())
        return frozenset(v for v in self.versions if self._sim_s[v] == best)

    def scoring_version(self):
        """The V_p release with the highest Sim_a*Prop*Comp, earliest on ties."""
        if not self.classes:
            return None
        best = self.best_versions()
        return max((v for v in self.versions if v in best),
                   key=lambda v: self.indicators(v).score)

    def score(self):
        version = self.scoring_version()
        return ZERO if version is None else self.indicators(version).score


def _class_best_versions(library, scores, versions):
    """V_p of a single-class candidate."""
    own = {vid.version: s for vid, s in scores.items() if vid.library == library}
    best = max(own.values(), default=ZERO)
    if best == 0:
        return frozenset(versions)
    return frozenset(v for v, s in own.items() if s == best)


def indicators(candidate, version):
    """(M, Sim_s, Sim_a, Prop, Comp) of a candidate against one release."""
    return candidate.indicators(version)


def best_version_set(candidate):
    return candidate.best_versions()


def candidate_score(candidate):
    return candidate.score()


def compatible(candidate, scores):
    """Whether a floating class (given by its per-release scores) can join the candidate."""
    single = _class_best_versions(candidate.library, scores, candidate.versions)
    return not candidate.best_versions().isdisjoint(single)


@dataclass(frozen=True)
class LibraryInstance:
    library: str
    classes: Mapping[ClassName, Fraction]
    v_p: FrozenSet[str]
    score: Fraction
    indicators: Indicators
    scoring_version: str


@dataclass
class RecoveryResult:
    instances: List[LibraryInstance]
    residual: List[ClassName]
    unmatched: List[ClassName]


def _instance(candidate):
    version = candidate.scoring_version()
    chosen = {name: scores.get(version, ZERO) for name, scores in candidate.classes.items()}
    return LibraryInstance(
        library=candidate.library,
        classes=dict(sorted(chosen.items())),
        v_p=candidate.best_versions(),
        score=candidate.indicators(version).score,
        indicators=candidate.indicators(version),
        scoring_version=version,
    )


def filter_candidates(graph, index):
    """
    Transfer floating classes to candidates and keep the valid instances.

    Round one hands each floating class to the largest candidate it is
    version-compatible with. Round two ranks candidates by their score when
    extended with everything still floating around them and lets the best
    one absorb those classes, repeatedly.

    Returns:
    --------
    RecoveryResult
        Accepted instances (sorted by library), residual classes left in
        discarded candidates or floating nodes, and unmatched classes
    """
    candidates = {lib: Candidate.for_library(lib, index, {n: graph.scores[n] for n in members})
                  for lib, members in graph.settled.items()}
    floating = {key: set(members) for key, members in graph.floating.items()}

    # Round one: larger candidates first, one compatibility test per class.
    order = sorted((lib for lib, c in candidates.items() if len(c)),
                   key=lambda lib: (-len(candidates[lib]), lib))
    for lib in order:
        candidate = candidates[lib]
        for key in graph.successors(lib):
            for name in sorted(floating[key]):
                if compatible(candidate, graph.scores[name]):
                    floating[key].discard(name)
                    candidate.add(name, graph.scores[name])
                    logger.debug(f"Round 1: moved {name} from {'/'.join(key)} to {lib}")

    # Round two: trial and error on extended candidates.
    def extended_score(lib):
        trial = candidates[lib].copy()
        for key in graph.successors(lib):
            for name in floating[key]:
                trial.add(name, graph.scores[name])
        return trial.score()

    pending = {lib: extended_score(lib) for lib in candidates}
    accepted, residual = [], []
    while pending:
        lib = min(pending, key=lambda name: (-pending[name], name))
        score = pending.pop(lib)
        candidate = candidates[lib]
        if score <= 0:
            logger.debug(f"Round 2: discarded {lib} (score {score})")
            residual.extend(candidate.classes)
            continue
        touched = set()
        for key in graph.successors(lib):
            for name in sorted(floating[key]):
                candidate.add(name, graph.scores[name])
            if floating[key]:
                touched.update(key)
            floating[key] = set()
        for rlib in sorted(touched):
            if rlib in pending:
                pending[rlib] = extended_score(rlib)
        accepted.append(_instance(candidate))
        logger.debug(f"Round 2: accepted {lib} with {len(candidate)} classes (score {score})")

    for members in floating.values():
        residual.extend(members)
    accepted.sort(key=lambda inst: inst.library)
    return RecoveryResult(accepted, sorted(residual), sorted(graph.unmatched))


def recover(app, index):
    """Build the region graph for an app profile and filter its candidates."""
    return filter_candidates(build_region_graph(app, index), index)
