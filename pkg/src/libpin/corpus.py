"""Synthetic library ecosystems with ground truth.

Libraries evolve across releases, duplicate each other's code by inclusion or
sharing, and are integrated into apps under the Objective-C rule that two
integrated libraries may never define the same class name.
"""

import enum
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .database import (PROFILE_SUFFIX, LibraryVersionId, build_database, save_database,
                       serialize_profile)
from .errors import InfeasibleSpec, IoFailure, MalformedDocument, SchemaViolation
from .profile import (ClassName, ClassNode, FeatureItem, FeatureKind, FeatureVector, MethodKey,
                      MethodKind, Profile, ProfileLevel)
from .utils import dump_json

logger = logging.getLogger(__name__)

GENERATED_AT = "1970-01-01T00:00:00Z"

LIBRARY_SUFFIXES = ["Kit", "Core", "Networking", "UI", "SDK", "Analytics", "Foundation",
                    "Cache", "Auth", "Media", "Storage", "Logger"]
NOUNS = ["Client", "Request", "Session", "Cache", "Manager", "Parser", "Config", "Task",
         "Response", "Store", "View", "Controller", "Loader", "Queue", "Token", "Image",
         "Router", "Model", "Handler", "Operation", "Serializer", "Policy", "Item", "Reader"]
VERBS = ["init", "load", "fetch", "set", "update", "reset", "start", "cancel", "resume",
         "encode", "decode", "handle", "build", "register", "remove", "validate"]
SYSTEM_CLASSES = ["NSString", "NSArray", "NSDictionary", "NSData", "NSURL", "NSError",
                  "NSNumber", "NSDate", "UIView", "UIImage", "NSMutableArray", "NSOperationQueue"]
SYSTEM_SYMBOLS = ["_objc_msgSend", "_objc_retain", "_objc_release", "_dispatch_once",
                  "_dispatch_async", "_NSLog", "_CFRelease", "_objc_storeStrong",
                  "_kCFBooleanTrue", "_NSFoundationVersionNumber"]

STEP_KINDS = ["structural", "code_only", "none"]
STEP_WEIGHTS = [0.5, 0.35, 0.15]


class DuplicationPattern(enum.Enum):
    COMPLETE_INCLUSION = "complete_inclusion"
    PARTIAL_INCLUSION = "partial_inclusion"
    MULTI_PARTY_SHARING = "multi_party_sharing"


@dataclass(frozen=True)
class DuplicationPlan:
    """
    One duplication relationship between generated libraries.

    Participants are library indices. For the inclusion patterns they are
    (host, dependency) and the schedule holds a single row naming, for every
    host release, the dependency release index it embeds. For multi-party
    sharing the schedule holds one row per participant giving, per release,
    how many classes of the shared pool that release carries.
    """

    pattern: DuplicationPattern
    participants: Tuple[int, ...]
    schedule: Optional[Tuple[Tuple[int, ...], ...]] = None
    shared_classes: int = 8
    fraction: Fraction = Fraction(1, 2)


@dataclass(frozen=True)
class AppPlan:
    count: int = 10
    libraries_per_app: Tuple[int, int] = (1, 3)
    customization_rate: float = 0.0
    app_classes: Tuple[int, int] = (2, 6)


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    library_count: Tuple[int, int] = (5, 5)
    versions_per_library: Tuple[int, int] = (3, 6)
    classes_per_version: Tuple[int, int] = (4, 12)
    methods_per_class: Tuple[int, int] = (2, 8)
    feature_density: Tuple[float, float] = (1.0, 4.0)
    duplication: Tuple[DuplicationPlan, ...] = ()
    apps: AppPlan = field(default_factory=AppPlan)
    library_names: Tuple[str, ...] = ()

    def validate(self):
        """Check ranges and duplication schedules, raising on the first problem."""
        for label, (lo, hi) in [("library_count", self.library_count),
                                ("versions_per_library", self.versions_per_library),
                                ("classes_per_version", self.classes_per_version),
                                ("methods_per_class", self.methods_per_class),
                                ("libraries_per_app", self.apps.libraries_per_app)]:
            if lo < 1 or lo > hi:
                raise SchemaViolation(f"{label} range ({lo}, {hi}) is degenerate")
        lo, hi = self.apps.app_classes
        if lo < 0 or lo > hi:
            raise SchemaViolation(f"app_classes range ({lo}, {hi}) is degenerate")
        lo, hi = self.feature_density
        if lo < 0 or lo > hi:
            raise SchemaViolation(f"feature_density range ({lo}, {hi}) is degenerate")
        if not 0 <= self.apps.customization_rate < 1:
            raise SchemaViolation("customization_rate must lie in [0, 1)")
        if self.library_names and len(self.library_names) != len(set(self.library_names)):
            raise SchemaViolation("library_names must be unique")

        libs = self.library_count[0]
        for plan in self.duplication:
            parts = plan.participants
            if len(set(parts)) != len(parts) or any(p < 0 or p >= libs for p in parts):
                raise InfeasibleSpec(f"{plan.pattern.value}: participants {parts} are not "
                                     f"distinct library indices below {libs}")
            if plan.pattern is DuplicationPattern.MULTI_PARTY_SHARING:
                self._validate_sharing(plan)
            else:
                if len(parts) != 2:
                    raise InfeasibleSpec(f"{plan.pattern.value} takes exactly (host, dependency)")
                if plan.schedule is not None and (len(plan.schedule) != 1 or not plan.schedule[0]
                                                  or min(plan.schedule[0]) < 0):
                    raise InfeasibleSpec(f"{plan.pattern.value}: schedule must be one row of "
                                         f"dependency release indices")
                if not 0 < plan.fraction <= 1:
                    raise InfeasibleSpec("partial inclusion fraction must lie in (0, 1]")
        _inclusion_order(self)
        _pinned_counts(self)

    def _validate_sharing(self, plan):
        if len(plan.participants) < 2:
            raise InfeasibleSpec("multi-party sharing needs at least two participants")
        if plan.shared_classes < 1:
            raise InfeasibleSpec("multi-party sharing needs a non-empty shared pool")
        rows = plan.schedule
        if rows is None:
            return
        if len(rows) != len(plan.participants) or any(not row for row in rows):
            raise InfeasibleSpec("sharing schedule needs one non-empty row per participant")
        if any(c < 0 or c > plan.shared_classes for row in rows for c in row):
            raise InfeasibleSpec("sharing schedule counts must lie within the shared pool")
        # Prefix subsets of the pool are disjoint only when one side is empty.
        if min(min(row) for row in rows) != 0:
            raise InfeasibleSpec(f"sharing group {plan.participants} admits no conflict-free "
                                 f"release pair")

    @classmethod
    def from_document(cls, data):
        """Build a spec from its JSON document form."""
        try:
            plans = tuple(
                DuplicationPlan(
                    pattern=DuplicationPattern(p["pattern"]),
                    participants=tuple(p["participants"]),
                    schedule=None if p.get("schedule") is None
                    else tuple(tuple(row) for row in p["schedule"]),
                    shared_classes=p.get("shared_classes", 8),
                    fraction=Fraction(str(p.get("fraction", "1/2"))),
                )
                for p in data.get("duplication", []))
            apps = data.get("apps", {})
            spec = cls(
                seed=int(data.get("seed", 0)),
                library_count=tuple(data.get("library_count", (5, 5))),
                versions_per_library=tuple(data.get("versions_per_library", (3, 6))),
                classes_per_version=tuple(data.get("classes_per_version", (4, 12))),
                methods_per_class=tuple(data.get("methods_per_class", (2, 8))),
                feature_density=tuple(data.get("feature_density", (1.0, 4.0))),
                duplication=plans,
                apps=AppPlan(
                    count=int(apps.get("count", 10)),
                    libraries_per_app=tuple(apps.get("libraries_per_app", (1, 3))),
                    customization_rate=float(apps.get("customization_rate", 0.0)),
                    app_classes=tuple(apps.get("app_classes", (2, 6))),
                ),
                library_names=tuple(data.get("library_names", ())),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaViolation(f"bad corpus spec: {exc}") from exc
        spec.validate()
        return spec


def load_corpus_spec(path):
    try:
        with open(path, 'rb') as fh:
            data = json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read corpus spec {path}: {exc}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"{path} is not a corpus spec: {exc}") from exc
    return CorpusSpec.from_document(data)


@dataclass(frozen=True)
class TruthUse:
    id: LibraryVersionId
    classes: frozenset


@dataclass
class GroundTruth:
    """Libraries each generated app integrates, with their class sets."""

    apps: Dict[str, Tuple[TruthUse, ...]] = field(default_factory=dict)

    def validate(self):
        for app_id, uses in self.apps.items():
            seen = set()
            for use in uses:
                if not seen.isdisjoint(use.classes):
                    raise InfeasibleSpec(f"{app_id}: integrated libraries share class names")
                seen |= use.classes

    def to_document(self):
        return {app_id: [{"library": u.id.library, "version": u.id.version} for u in uses]
                for app_id, uses in sorted(self.apps.items())}


@dataclass
class Corpus:
    database: object
    apps: Dict[str, Profile]
    truth: GroundTruth
    # per release: source tag -> class names contributed by that source
    regions: Dict[LibraryVersionId, Dict[str, frozenset]]
    library_names: List[str]

    def scheduled_overlap(self, a, b):
        """Overlap of two releases as implied by the duplication bookkeeping."""
        ra, rb = self.regions[a], self.regions[b]
        size = sum(len(names) for names in ra.values())
        if size == 0:
            raise InfeasibleSpec(f"{a} has no classes")
        shared = sum(len(names & rb[tag]) for tag, names in ra.items() if tag in rb)
        return Fraction(shared, size)


def _inclusion_order(spec):
    """Library indices ordered so every dependency precedes its hosts."""
    libs = spec.library_count[1]
    deps = {i: set() for i in range(libs)}
    for plan in spec.duplication:
        if plan.pattern is not DuplicationPattern.MULTI_PARTY_SHARING:
            host, dep = plan.participants
            deps[host].add(dep)
    order, state = [], {}

    def visit(node):
        if state.get(node) == "open":
            raise InfeasibleSpec(f"inclusion cycle through library index {node}")
        if state.get(node) == "done":
            return
        state[node] = "open"
        for dep in sorted(deps[node]):
            visit(dep)
        state[node] = "done"
        order.append(node)

    for node in range(libs):
        visit(node)
    return order


class _Namer:
    """Deterministic, collision-free names drawn from the seeded generator."""

    def __init__(self, rng):
        self.rng = rng
        self.prefixes = set()

    def prefix(self):
        while True:
            letters = "".join(self.rng.choice(list("ABCDEFGHIJKLMNOPQRSTUVWXYZ"), size=3))
            if letters not in self.prefixes:
                self.prefixes.add(letters)
                return letters


class _LibraryBuilder:
    """Generates the own-class lineage of one library across its releases."""

    def __init__(self, rng, spec, name, prefix, n_versions):
        self.rng = rng
        self.spec = spec
        self.name = name
        self.prefix = prefix
        self.n_versions = n_versions
        self.counter = 0
        self.density = float(rng.uniform(*spec.feature_density))

    def _int(self, bounds):
        lo, hi = bounds
        return int(self.rng.integers(lo, hi + 1))

    def _pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def new_class_name(self, prefix=None):
        self.counter += 1
        return ClassName(f"{prefix or self.prefix}{self._pick(NOUNS)}{self.counter}")

    def new_selector(self, taken):
        while True:
            selector = f"{self._pick(VERBS)}{self._pick(NOUNS)}"
            if self.rng.random() < 0.6:
                selector += f"With{self._pick(NOUNS)}:"
            kind = MethodKind.INSTANCE if self.rng.random() < 0.85 else MethodKind.CLASS_METHOD
            key = MethodKey(kind, selector)
            if key not in taken:
                return key

    def new_usage(self, owner):
        kind = self._pick(list(FeatureKind))
        if kind is FeatureKind.CLASS_REF:
            value = self._pick(SYSTEM_CLASSES) if self.rng.random() < 0.6 else owner.base
        elif kind is FeatureKind.SELECTOR_REF:
            value = f"{self._pick(VERBS)}{self._pick(NOUNS)}"
        elif kind is FeatureKind.CONST_STRING:
            value = f"com.{self.name.lower()}.{self._pick(NOUNS).lower()}{int(self.rng.integers(100))}"
        else:
            value = self._pick(SYSTEM_SYMBOLS)
        return FeatureItem(kind, value)

    def new_vector(self, owner):
        usages = int(self.rng.poisson(self.density)) + 1
        return FeatureVector(Counter(self.new_usage(owner) for _ in range(usages)))

    def new_class(self, prefix=None):
        name = self.new_class_name(prefix)
        methods = {}
        for _ in range(self._int(self.spec.methods_per_class)):
            key = self.new_selector(methods)
            methods[key] = None
        features = {m: self.new_vector(name) for m in sorted(methods)}
        return ClassNode(name, frozenset(methods), features)

    def _edit_vector(self, node):
        method = self._pick(sorted(node.methods))
        counts = Counter(dict(node.feature(method).counts))
        if counts and self.rng.random() < 0.4:
            item = self._pick(sorted(counts, key=lambda i: i.sort_key))
            counts[item] -= 1
        else:
            counts[self.new_usage(node.name)] += 1
        features = dict(node.features)
        features[method] = FeatureVector(+counts)
        return ClassNode(node.name, node.methods, features)

    def _add_method(self, node):
        key = self.new_selector(node.methods)
        features = dict(node.features)
        features[key] = self.new_vector(node.name)
        return ClassNode(node.name, node.methods | {key}, features)

    def _remove_method(self, node):
        method = self._pick(sorted(node.methods))
        features = {m: v for m, v in node.features.items() if m != method}
        return ClassNode(node.name, node.methods - {method}, features)

    def lineage(self):
        """Own classes per release plus the release version strings."""
        classes = {}
        for _ in range(self._int(self.spec.classes_per_version)):
            node = self.new_class()
            classes[node.name] = node
        releases = [dict(classes)]
        versions = ["1.0.0"]
        major, minor, patch = 1, 0, 0
        for _ in range(1, self.n_versions):
            step = STEP_KINDS[int(self.rng.choice(len(STEP_KINDS), p=STEP_WEIGHTS))]
            if step == "structural":
                classes = self._structural_step(classes)
                minor, patch = minor + 1, 0
            elif step == "code_only":
                for _ in range(self._int((1, 3))):
                    name = self._pick(sorted(n for n, c in classes.items() if c.methods))
                    classes[name] = self._edit_vector(classes[name])
                patch += 1
            else:
                patch += 1
            releases.append(dict(classes))
            versions.append(f"{major}.{minor}.{patch}")
        return releases, versions

    def _structural_step(self, classes):
        classes = dict(classes)
        for _ in range(self._int((1, 2))):
            roll = self.rng.random()
            names = sorted(classes)
            if roll < 0.35 or not names:
                node = self.new_class()
                classes[node.name] = node
            elif roll < 0.5 and len(names) > 1:
                del classes[self._pick(names)]
            elif roll < 0.8:
                name = self._pick(names)
                classes[name] = self._add_method(classes[name])
            else:
                name = self._pick([n for n in names if len(classes[n].methods) > 1] or names)
                node = classes[name]
                classes[name] = self._remove_method(node) if len(node.methods) > 1 \
                    else self._add_method(node)
        return classes


def _pinned_counts(spec):
    """
    Release counts fixed by explicit schedules, with the minimum count each
    inclusion dependency needs. Raises when two schedules disagree.
    """
    pinned, needed = {}, {}

    def pin(lib, count, plan):
        if pinned.setdefault(lib, count) != count:
            raise InfeasibleSpec(f"{plan.pattern.value}: schedule gives library index {lib} "
                                 f"{count} releases, another plan gives {pinned[lib]}")

    for plan in spec.duplication:
        if plan.schedule is None:
            continue
        if plan.pattern is DuplicationPattern.MULTI_PARTY_SHARING:
            for lib, row in zip(plan.participants, plan.schedule):
                pin(lib, len(row), plan)
        else:
            host, dep = plan.participants
            pin(host, len(plan.schedule[0]), plan)
            needed[dep] = max(needed.get(dep, 0), max(plan.schedule[0]) + 1)
    for dep, count in needed.items():
        if dep in pinned and pinned[dep] < count:
            raise InfeasibleSpec(f"inclusion schedule embeds release {count - 1} of library index "
                                 f"{dep}, which has only {pinned[dep]} releases")
    return pinned, needed


def _version_counts(spec, rng, n_libs):
    counts = [int(rng.integers(spec.versions_per_library[0], spec.versions_per_library[1] + 1))
              for _ in range(n_libs)]
    pinned, needed = _pinned_counts(spec)
    for lib in range(n_libs):
        counts[lib] = pinned.get(lib, max(counts[lib], needed.get(lib, 0)))
    return counts


def _default_schedule(plan, counts):
    if plan.schedule is not None:
        return plan.schedule
    if plan.pattern is DuplicationPattern.MULTI_PARTY_SHARING:
        rows = [[plan.shared_classes] * counts[p] for p in plan.participants]
        owner = next((i for i, p in enumerate(plan.participants) if counts[p] > 1), None)
        if owner is None:
            raise InfeasibleSpec(f"sharing group {plan.participants} needs a participant with two "
                                 f"releases to admit a conflict-free pair")
        rows[owner][-1] = 0
        return tuple(tuple(row) for row in rows)
    host, dep = plan.participants
    return (tuple(min(i, counts[dep] - 1) for i in range(counts[host])),)


def _generate_libraries(spec, rng):
    n_libs = int(rng.integers(spec.library_count[0], spec.library_count[1] + 1))
    namer = _Namer(rng)
    prefixes = [namer.prefix() for _ in range(n_libs)]
    if spec.library_names:
        names = [spec.library_names[i] if i < len(spec.library_names) else f"{prefixes[i]}Kit"
                 for i in range(n_libs)]
    else:
        names = [f"{prefixes[i]}{LIBRARY_SUFFIXES[int(rng.integers(len(LIBRARY_SUFFIXES)))]}"
                 for i in range(n_libs)]
    counts = _version_counts(spec, rng, n_libs)

    builders = [_LibraryBuilder(rng, spec, names[i], prefixes[i], counts[i]) for i in range(n_libs)]
    lineages = [b.lineage() for b in tqdm(builders, desc="Evolving libraries", disable=None)]

    # Shared pools: fixed class bodies under one prefix reused by every participant.
    pools = {}
    for g, plan in enumerate(spec.duplication):
        if plan.pattern is DuplicationPattern.MULTI_PARTY_SHARING:
            shared_prefix = namer.prefix()
            maker = builders[plan.participants[0]]
            pools[g] = [maker.new_class(shared_prefix) for _ in range(plan.shared_classes)]

    schedules = {g: _default_schedule(plan, counts) for g, plan in enumerate(spec.duplication)}

    composed = {}
    regions = {}
    for lib in _inclusion_order(spec):
        if lib >= n_libs:
            continue
        releases, versions = lineages[lib]
        for x, own in enumerate(releases):
            nodes = dict(own)
            tags = {f"own:{names[lib]}": frozenset(own)}
            for g, plan in enumerate(spec.duplication):
                if lib not in plan.participants:
                    continue
                if plan.pattern is DuplicationPattern.MULTI_PARTY_SHARING:
                    row = schedules[g][plan.participants.index(lib)]
                    picked = pools[g][:row[x]]
                    for node in picked:
                        nodes.setdefault(node.name, node)
                    tags[f"pool:{g}"] = frozenset(n.name for n in picked)
                elif plan.participants[0] == lib:
                    dep = plan.participants[1]
                    y = schedules[g][0][x]
                    dep_id = LibraryVersionId(names[dep], lineages[dep][1][y])
                    embedded = composed[dep_id]
                    ordered = sorted(embedded)
                    if plan.pattern is DuplicationPattern.PARTIAL_INCLUSION:
                        keep = max(1, int(plan.fraction * len(ordered)))
                        ordered = ordered[:keep]
                    for name in ordered:
                        nodes.setdefault(name, embedded[name])
                    for tag, tagged in regions[dep_id].items():
                        tags[tag] = tags.get(tag, frozenset()) | (tagged & frozenset(ordered))
            vid = LibraryVersionId(names[lib], versions[x])
            composed[vid] = nodes
            regions[vid] = tags

    items = []
    for lib in range(n_libs):
        for version in lineages[lib][1]:
            vid = LibraryVersionId(names[lib], version)
            items.append((vid, Profile(composed[vid].values(), ProfileLevel.CODE_LEVEL)))
    return names, items, regions


def _customize(rng, nodes, rate):
    """Delete random methods (and occasionally whole classes) from an app copy."""
    kept = []
    for node in nodes:
        if rate and kept and rng.random() < rate / 5:
            continue
        if rate and len(node.methods) > 1 and rng.random() < rate:
            methods = sorted(node.methods)
            victim = methods[int(rng.integers(len(methods)))]
            features = {m: v for m, v in node.features.items() if m != victim}
            node = ClassNode(node.name, node.methods - {victim}, features)
        kept.append(node)
    return kept


def _generate_apps(spec, rng, items):
    plan = spec.apps
    profiles = dict(items)
    by_library = {}
    for vid, profile in items:
        if len(profile):
            by_library.setdefault(vid.library, []).append(vid)
    libraries = sorted(by_library)

    apps, truth = {}, GroundTruth()
    for index in tqdm(range(plan.count), desc="Generating apps", disable=None):
        app_id = f"app{index:04d}"
        wanted = int(rng.integers(plan.libraries_per_app[0], plan.libraries_per_app[1] + 1))
        chosen, used = [], set()
        for lib_pos in rng.permutation(len(libraries)):
            if len(chosen) == wanted:
                break
            candidates = by_library[libraries[int(lib_pos)]]
            for ver_pos in rng.permutation(len(candidates)):
                vid = candidates[int(ver_pos)]
                names = profiles[vid].names()
                if used.isdisjoint(names):
                    chosen.append(vid)
                    used |= names
                    break
        if len(chosen) < min(plan.libraries_per_app[0], len(libraries)):
            raise InfeasibleSpec(f"{app_id}: only {len(chosen)} conflict-free libraries available, "
                                 f"{plan.libraries_per_app[0]} required")

        nodes, uses = [], []
        for vid in sorted(chosen):
            library_nodes = sorted(profiles[vid], key=lambda n: n.name)
            copy = _customize(rng, library_nodes, plan.customization_rate)
            nodes.extend(copy)
            uses.append(TruthUse(vid, frozenset(n.name for n in copy)))

        author = _LibraryBuilder(rng, spec, app_id, f"App{index:04d}", 1)
        for _ in range(int(rng.integers(plan.app_classes[0], plan.app_classes[1] + 1))):
            nodes.append(author.new_class())

        apps[app_id] = Profile(nodes, ProfileLevel.CODE_LEVEL)
        truth.apps[app_id] = tuple(uses)
    truth.validate()
    return apps, truth


def generate_corpus(spec):
    """
    Generate a library database, app profiles and their ground truth.

    Parameters:
    -----------
    spec : CorpusSpec
        Generation parameters; the same spec always yields the same corpus

    Returns:
    --------
    Corpus
        database, apps (app id -> code-level Profile), truth and the
        per-release duplication bookkeeping
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    names, items, regions = _generate_libraries(spec, rng)
    database = build_database(items, created=GENERATED_AT)
    apps, truth = _generate_apps(spec, rng, items)
    logger.info(f"Generated {len(database)} releases of {len(names)} libraries and {len(apps)} apps")
    return Corpus(database, apps, truth, regions, names)


def write_corpus(corpus, out_dir):
    """Write `db/` (database + index), `apps/<id>.profile` and `truth.json`."""
    from .index import INDEX_FILENAME, build_index, save_index

    db_dir = os.path.join(out_dir, "db")
    save_database(corpus.database, db_dir)
    save_index(build_index(corpus.database), os.path.join(db_dir, INDEX_FILENAME))
    apps_dir = os.path.join(out_dir, "apps")
    os.makedirs(apps_dir, exist_ok=True)
    for app_id, profile in corpus.apps.items():
        with open(os.path.join(apps_dir, f"{app_id}{PROFILE_SUFFIX}"), 'wb') as fh:
            fh.write(serialize_profile(profile))
    with open(os.path.join(out_dir, "truth.json"), 'w', encoding='utf-8') as fh:
        fh.write(dump_json(corpus.truth.to_document()))
    return db_dir, apps_dir
