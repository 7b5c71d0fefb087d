"""Profile model: classes, methods, code features, signatures and similarity."""

import enum
import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Tuple

from .errors import DuplicateName, LevelUnavailable, SchemaViolation

FORMAT_VERSION = 1
DIGEST_ALGORITHM = "sha256"


class MethodKind(enum.Enum):
    """Instance methods render as '-', class methods as '+'."""

    INSTANCE = "-"
    CLASS_METHOD = "+"


class FeatureKind(enum.Enum):
    CLASS_REF = "class_ref"
    SELECTOR_REF = "selector_ref"
    CONST_STRING = "const_string"
    EXTERNAL_SYMBOL = "external_symbol"


class ProfileLevel(enum.Enum):
    CLASS_LEVEL = "class"
    CODE_LEVEL = "code"


@dataclass(frozen=True, order=True)
class MethodKey:
    """A method identified by its kind and full selector."""

    kind: MethodKind = field(compare=False)
    selector: str = field(compare=False)
    sort_key: Tuple[str, str] = field(init=False, repr=False, compare=True)

    def __post_init__(self):
        if not isinstance(self.selector, str) or not self.selector:
            raise SchemaViolation("method selector must be a non-empty string")
        object.__setattr__(self, "sort_key", (self.kind.value, self.selector))

    @classmethod
    def parse(cls, text):
        """Parse '-selector' / '+selector' (the feature-map key uses '- selector')."""
        text = text.strip()
        if len(text) < 2 or text[0] not in "-+":
            raise SchemaViolation(f"bad method key {text!r}")
        return cls(MethodKind(text[0]), text[1:].strip())

    def __str__(self):
        return f"{self.kind.value}{self.selector}"


@dataclass(frozen=True, order=True)
class ClassName:
    """A class name, or a category node rendered as 'Base(Category)'."""

    base: str = field(compare=False)
    category: Optional[str] = field(default=None, compare=False)
    canonical: str = field(init=False, repr=False, compare=True)

    def __post_init__(self):
        if not isinstance(self.base, str) or not self.base:
            raise SchemaViolation("class base name must be a non-empty string")
        if self.category is not None and (not isinstance(self.category, str) or not self.category):
            raise SchemaViolation(f"category of {self.base} must be non-empty when present")
        rendered = self.base if self.category is None else f"{self.base}({self.category})"
        object.__setattr__(self, "canonical", rendered)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text.endswith(")") and "(" in text:
            base, _, rest = text.partition("(")
            return cls(base, rest[:-1])
        return cls(text)

    def __str__(self):
        return self.canonical

    def __hash__(self):
        return hash(self.canonical)


class FeatureItem(NamedTuple):
    kind: FeatureKind
    value: str

    @property
    def sort_key(self):
        return (self.kind.value, self.value)


class FeatureVector:
    """Multiset of constant-data usages recorded in one method body.

    Items are namespaced by kind, so a const string "init" and a selector
    reference "init" are different items. Zero counts are never stored.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts=None):
        stored = Counter()
        for item, count in dict(counts or {}).items():
            if not isinstance(item, FeatureItem):
                item = FeatureItem(FeatureKind(item[0]), item[1])
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise SchemaViolation(f"feature count for {item.value!r} must be a non-negative integer")
            if count:
                stored[item] = count
        self._counts = MappingProxyType(dict(sorted(stored.items(), key=lambda kv: kv[0].sort_key)))
        self._hash = None

    @classmethod
    def of(cls, *usages):
        """Build a vector from (kind, value) usages, one count per occurrence."""
        counts = Counter(FeatureItem(FeatureKind(kind), value) for kind, value in usages)
        return cls(counts)

    @property
    def counts(self):
        return self._counts

    @property
    def total(self):
        return sum(self._counts.values())

    def get(self, item):
        return self._counts.get(item, 0)

    def items(self):
        return self._counts.items()

    def __len__(self):
        return len(self._counts)

    def __bool__(self):
        return bool(self._counts)

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return dict(self._counts) == dict(other._counts)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{i.kind.value}:{i.value}={c}" for i, c in self._counts.items())
        return f"FeatureVector({inner})"


EMPTY_VECTOR = FeatureVector()


@dataclass(frozen=True, eq=False)
class ClassNode:
    """One class (or category) with its methods and optional code features."""

    name: ClassName
    methods: frozenset = frozenset()
    features: Optional[Mapping[MethodKey, FeatureVector]] = None

    def __post_init__(self):
        object.__setattr__(self, "methods", frozenset(self.methods))
        if self.features is not None:
            stray = [str(m) for m in self.features if m not in self.methods]
            if stray:
                raise SchemaViolation(f"{self.name}: features for undeclared methods {sorted(stray)}")
            filled = {m: self.features.get(m, EMPTY_VECTOR) for m in sorted(self.methods)}
            object.__setattr__(self, "features", MappingProxyType(filled))

    def __eq__(self, other):
        if not isinstance(other, ClassNode):
            return NotImplemented
        mine = None if self.features is None else dict(self.features)
        theirs = None if other.features is None else dict(other.features)
        return self.name == other.name and self.methods == other.methods and mine == theirs

    __hash__ = None

    def feature(self, method):
        """Features of `method`, or the empty vector when absent."""
        if self.features is None:
            return EMPTY_VECTOR
        return self.features.get(method, EMPTY_VECTOR)

    def without_features(self):
        return ClassNode(self.name, self.methods)


class Profile:
    """A binary's identity card: class nodes keyed by canonical class name."""

    __slots__ = ("_classes", "level")

    def __init__(self, classes=(), level=ProfileLevel.CLASS_LEVEL):
        self.level = ProfileLevel(level)
        table = {}
        for node in classes:
            if node.name in table:
                raise DuplicateName(f"class {node.name} defined twice")
            table[node.name] = node
        if self.level is ProfileLevel.CODE_LEVEL:
            bare = [str(n.name) for n in table.values() if n.methods and n.features is None]
            if bare:
                raise SchemaViolation(f"code-level profile lacks features for {sorted(bare)[:5]}")
        else:
            dressed = [str(n.name) for n in table.values() if n.features is not None]
            if dressed:
                raise SchemaViolation(f"class-level profile carries features for {sorted(dressed)[:5]}")
        self._classes = MappingProxyType(table)

    @property
    def classes(self):
        return self._classes

    def names(self):
        return frozenset(self._classes)

    def get(self, name):
        return self._classes.get(name)

    def __len__(self):
        return len(self._classes)

    def __iter__(self):
        return iter(self._classes.values())

    def __contains__(self, name):
        return name in self._classes

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self.level is other.level and dict(self._classes) == dict(other._classes)

    __hash__ = None

    def __repr__(self):
        return f"Profile({len(self)} classes, level={self.level.value})"

    def at_class_level(self):
        """This profile with every feature map dropped."""
        if self.level is ProfileLevel.CLASS_LEVEL:
            return self
        return Profile((n.without_features() for n in self), ProfileLevel.CLASS_LEVEL)

    def restricted(self, names):
        """Sub-profile holding only the given class names."""
        keep = set(names)
        return Profile((n for n in self if n.name in keep), self.level)


@dataclass(frozen=True)
class Signature:
    digest: bytes
    level: ProfileLevel

    @property
    def hexdigest(self):
        return self.digest.hex()

    def __str__(self):
        return self.hexdigest


def class_similarity(ac, lc):
    """Share of methods defined in both classes among methods defined in either."""
    union = ac.methods | lc.methods
    if not union:
        return Fraction(1) if ac.name == lc.name else Fraction(0)
    return Fraction(len(ac.methods & lc.methods), len(union))


def feature_similarity(a, b):
    """One minus the normalized Manhattan distance between two feature multisets."""
    total = a.total + b.total
    if total == 0:
        return Fraction(1)
    keys = set(a.counts) | set(b.counts)
    distance = sum(abs(a.get(k) - b.get(k)) for k in keys)
    return 1 - Fraction(distance, total)


def _feature_document(vector):
    return [{"kind": item.kind.value, "value": item.value, "count": count}
            for item, count in sorted(vector.items(), key=lambda kv: kv[0].sort_key)]


def canonical_document(profile, level=None):
    """Plain-data form of a profile with every collection in canonical order."""
    level = profile.level if level is None else ProfileLevel(level)
    classes = []
    for node in sorted(profile, key=lambda n: n.name):
        entry = {"name": node.name.base}
        if node.name.category is not None:
            entry["category"] = node.name.category
        methods = sorted(node.methods)
        entry["methods"] = [{"kind": m.kind.value, "selector": m.selector} for m in methods]
        if level is ProfileLevel.CODE_LEVEL and node.features is not None:
            entry["features"] = {f"{m.kind.value} {m.selector}": _feature_document(node.feature(m))
                                 for m in methods}
        classes.append(entry)
    return {"format_version": FORMAT_VERSION, "level": level.value, "classes": classes}


def canonical_bytes(profile, level=None):
    document = canonical_document(profile, level)
    return json.dumps(document, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def signature(profile, level=ProfileLevel.CLASS_LEVEL):
    """Digest of the canonical serialization at the requested level."""
    level = ProfileLevel(level)
    if level is ProfileLevel.CODE_LEVEL and profile.level is not ProfileLevel.CODE_LEVEL:
        raise LevelUnavailable("code-level signature requested for a class-level profile")
    digest = hashlib.new(DIGEST_ALGORITHM, canonical_bytes(profile, level)).digest()
    return Signature(digest, level)

