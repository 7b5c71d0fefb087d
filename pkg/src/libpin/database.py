"""Profile documents and the versioned library database.

A database directory holds a ``manifest.json`` (metadata, digest algorithm,
entry list in release order) and one canonical profile document per entry at
``profiles/<library>/<version>.profile``.
"""

import hashlib
import json
import logging
import os
from datetime import datetime, timezone
from typing import NamedTuple

from tqdm import tqdm

from .errors import (DuplicateId, DuplicateName, IoFailure, MalformedDocument,
                     SchemaViolation, UnknownVersion)
from .profile import (DIGEST_ALGORITHM, FORMAT_VERSION, ClassName, ClassNode, FeatureItem,
                      FeatureKind, FeatureVector, MethodKey, MethodKind, Profile,
                      ProfileLevel, canonical_bytes, signature)
from .utils import dump_json, natural_key

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
PROFILES_DIRNAME = "profiles"
PROFILE_SUFFIX = ".profile"


class LibraryVersionId(NamedTuple):
    library: str
    version: str

    def __str__(self):
        return f"{self.library}@{self.version}"


def make_id(library, version):
    if not library or not version:
        raise SchemaViolation("library name and version must be non-empty")
    return LibraryVersionId(library, version)


def _require(condition, message):
    if not condition:
        raise SchemaViolation(message)


def _parse_features(raw, methods, where):
    _require(isinstance(raw, dict), f"{where}: 'features' must be an object")
    features = {}
    for key, items in raw.items():
        method = MethodKey.parse(key)
        _require(method in methods, f"{where}: features for undeclared method {key!r}")
        if method in features:
            raise DuplicateName(f"{where}: features for {method} listed twice")
        _require(isinstance(items, list), f"{where}: features of {key!r} must be a list")
        counts = {}
        for item in items:
            _require(isinstance(item, dict), f"{where}: feature entries must be objects")
            try:
                feature = FeatureItem(FeatureKind(item.get("kind")), item.get("value"))
            except ValueError:
                raise SchemaViolation(f"{where}: unknown feature kind {item.get('kind')!r}")
            count = item.get("count")
            _require(isinstance(feature.value, str), f"{where}: feature value must be a string")
            _require(isinstance(count, int) and not isinstance(count, bool) and count >= 0,
                     f"{where}: feature count must be a non-negative integer, got {count!r}")
            if feature in counts:
                raise DuplicateName(f"{where}: feature {feature.value!r} listed twice for {key!r}")
            counts[feature] = count
        features[method] = FeatureVector(counts)
    return features


def _parse_class(raw):
    _require(isinstance(raw, dict), "class entries must be objects")
    base, category = raw.get("name"), raw.get("category")
    _require(isinstance(base, str) and base, "class 'name' must be a non-empty string")
    name = ClassName(base, category)
    raw_methods = raw.get("methods", [])
    _require(isinstance(raw_methods, list), f"{name}: 'methods' must be a list")
    methods = set()
    for entry in raw_methods:
        _require(isinstance(entry, dict), f"{name}: method entries must be objects")
        kind, selector = entry.get("kind"), entry.get("selector")
        _require(kind in ("-", "+"), f"{name}: method kind must be '-' or '+', got {kind!r}")
        method = MethodKey(MethodKind(kind), selector)
        if method in methods:
            raise DuplicateName(f"{name}: method {method} declared twice")
        methods.add(method)
    features = None
    if "features" in raw:
        features = _parse_features(raw["features"], methods, str(name))
    return ClassNode(name, frozenset(methods), features)


def parse_profile(document):
    """Parse and validate a profile interchange document (UTF-8 JSON bytes)."""
    try:
        text = document.decode("utf-8") if isinstance(document, (bytes, bytearray)) else document
        data = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"not a profile document: {exc}") from exc

    _require(isinstance(data, dict), "profile document must be an object")
    _require(data.get("format_version") == FORMAT_VERSION,
             f"unsupported format_version {data.get('format_version')!r}")
    try:
        level = ProfileLevel(data.get("level"))
    except ValueError:
        raise SchemaViolation(f"unknown profile level {data.get('level')!r}")
    raw_classes = data.get("classes")
    _require(isinstance(raw_classes, list), "'classes' must be a list")

    return Profile([_parse_class(raw) for raw in raw_classes], level)


def serialize_profile(profile):
    """Canonical interchange bytes for a profile."""
    return canonical_bytes(profile)


class LibraryDatabase:
    """All collected library versions with their signatures and metadata."""

    def __init__(self, entries, class_sigs, code_sigs, metadata):
        self.entries = entries
        self.class_sigs = class_sigs
        self.code_sigs = code_sigs
        self.metadata = metadata
        self._versions = {}
        for vid in entries:
            self._versions.setdefault(vid.library, []).append(vid.version)
        self._manifest_digest = None

    def __len__(self):
        return len(self.entries)

    def __contains__(self, vid):
        return vid in self.entries

    def libraries(self):
        return sorted(self._versions)

    def versions(self, library, include_empty=True):
        """Versions of a library in release order."""
        versions = self._versions.get(library, [])
        if include_empty:
            return list(versions)
        return [v for v in versions if len(self.entries[LibraryVersionId(library, v)])]

    def profile(self, vid):
        try:
            return self.entries[vid]
        except KeyError:
            raise UnknownVersion(f"{vid} is not in the database") from None

    def is_empty(self, vid):
        return len(self.profile(vid)) == 0

    @property
    def empty_ids(self):
        return [vid for vid, p in self.entries.items() if len(p) == 0]

    def release_rank(self, library):
        return {v: i for i, v in enumerate(self._versions.get(library, []))}

    def manifest_entries(self):
        rows = []
        for vid, profile in self.entries.items():
            code_sig = self.code_sigs.get(vid)
            rows.append({
                "library": vid.library,
                "version": vid.version,
                "classes": len(profile),
                "level": profile.level.value,
                "empty": len(profile) == 0,
                "class_signature": self.class_sigs[vid].hexdigest,
                "code_signature": code_sig.hexdigest if code_sig else None,
            })
        return rows

    def manifest_digest(self):
        """Digest over the entry list and signatures (creation time excluded)."""
        if self._manifest_digest is None:
            payload = json.dumps({"digest_algorithm": self.metadata["digest_algorithm"],
                                  "format_version": self.metadata["format_version"],
                                  "entries": self.manifest_entries()},
                                 sort_keys=True, separators=(",", ":"))
            self._manifest_digest = hashlib.new(DIGEST_ALGORITHM, payload.encode("utf-8")).digest()
        return self._manifest_digest


def build_database(items, created=None):
    """
    Assemble a database from (LibraryVersionId, Profile) pairs.

    Parameters:
    -----------
    items : iterable
        Pairs in release order within each library
    created : str, optional
        ISO timestamp recorded in the metadata, defaults to now (UTC)

    Returns:
    --------
    LibraryDatabase
        Database with class-level signatures for every entry and code-level
        signatures for code-level entries
    """
    entries, class_sigs, code_sigs = {}, {}, {}
    for vid, profile in tqdm(items, desc="Building database", disable=None):
        vid = make_id(*vid)
        if vid in entries:
            raise DuplicateId(f"{vid} supplied twice")
        entries[vid] = profile
        class_sigs[vid] = signature(profile, ProfileLevel.CLASS_LEVEL)
        if profile.level is ProfileLevel.CODE_LEVEL:
            code_sigs[vid] = signature(profile, ProfileLevel.CODE_LEVEL)
        if len(profile) == 0:
            logger.warning(f"{vid} has an empty profile; it is kept but never matched")

    metadata = {
        "created": created or datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ'),
        "digest_algorithm": DIGEST_ALGORITHM,
        "format_version": FORMAT_VERSION,
    }
    db = LibraryDatabase(entries, class_sigs, code_sigs, metadata)
    logger.info(f"Database holds {len(db)} entries of {len(db.libraries())} libraries "
                f"({len(db.empty_ids)} empty)")
    return db


def profile_path(root, vid):
    return os.path.join(root, PROFILES_DIRNAME, vid.library, f"{vid.version}{PROFILE_SUFFIX}")


def save_database(db, out_dir):
    """Write the manifest and one profile document per entry."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        for vid, profile in db.entries.items():
            path = profile_path(out_dir, vid)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, 'wb') as fh:
                fh.write(serialize_profile(profile))
        manifest = dict(db.metadata)
        manifest["entries"] = db.manifest_entries()
        manifest["manifest_digest"] = db.manifest_digest().hex()
        with open(os.path.join(out_dir, MANIFEST_FILENAME), 'w', encoding='utf-8') as fh:
            fh.write(dump_json(manifest))
    except OSError as exc:
        raise IoFailure(f"cannot write database to {out_dir}: {exc}") from exc
    logger.info(f"Saved database with {len(db)} entries to {out_dir}")


def load_database(db_dir):
    """Read a database directory written by save_database."""
    manifest_path = os.path.join(db_dir, MANIFEST_FILENAME)
    try:
        with open(manifest_path, 'rb') as fh:
            manifest = json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {manifest_path}: {exc}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"{manifest_path} is not a manifest: {exc}") from exc
    _require(isinstance(manifest, dict), f"{manifest_path}: manifest must be an object")
    if manifest.get("digest_algorithm") != DIGEST_ALGORITHM:
        raise SchemaViolation(f"unsupported digest algorithm {manifest.get('digest_algorithm')!r}")
    rows = manifest.get("entries", [])
    _require(isinstance(rows, list), f"{manifest_path}: 'entries' must be a list")

    items = []
    for row in tqdm(rows, desc="Loading database", disable=None):
        _require(isinstance(row, dict) and isinstance(row.get("library"), str)
                 and isinstance(row.get("version"), str),
                 f"{manifest_path}: every entry needs 'library' and 'version' strings")
        vid = make_id(row["library"], row["version"])
        path = profile_path(db_dir, vid)
        try:
            with open(path, 'rb') as fh:
                items.append((vid, parse_profile(fh.read())))
        except OSError as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc
    db = build_database(items, created=manifest.get("created"))
    recorded = manifest.get("manifest_digest")
    if recorded and recorded != db.manifest_digest().hex():
        raise SchemaViolation(f"{manifest_path}: profiles do not match the recorded signatures")
    return db


def load_profiles_dir(profiles_dir):
    """
    Collect `<library>/<version>.profile` documents from a directory tree.

    Returns:
    --------
    tuple
        (items, failures) where items are (LibraryVersionId, Profile) pairs in
        natural version order and failures are (path, error) pairs
    """
    items, failures = [], []
    for library in sorted(os.listdir(profiles_dir)):
        lib_dir = os.path.join(profiles_dir, library)
        if not os.path.isdir(lib_dir):
            continue
        names = [n for n in os.listdir(lib_dir) if n.endswith(PROFILE_SUFFIX)]
        for name in sorted(names, key=lambda n: natural_key(n[:-len(PROFILE_SUFFIX)])):
            path = os.path.join(lib_dir, name)
            try:
                with open(path, 'rb') as fh:
                    profile = parse_profile(fh.read())
                items.append((make_id(library, name[:-len(PROFILE_SUFFIX)]), profile))
            except (OSError, MalformedDocument, SchemaViolation) as exc:
                logger.warning(f"Skipping {path}: {exc}")
                failures.append((path, exc))
    return items, failures
