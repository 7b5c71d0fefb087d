"""Inverted class-name index over a library database.

The index unfolds every class node of every non-empty library release and
keys it by canonical class name, so a scan can fetch all same-named library
classes, together with their method sets, in one lookup.

Index file layout (all integers little-endian):

    header   b"LPIX" | u16 format version | u16 reserved (0) | 32-byte manifest digest
    strings  u32 count | count x (u32 byte length | UTF-8 bytes), sorted ascending
    releases u32 count | count x (u32 library string | u32 version string | u32 class count)
             in database release order
    names    u32 count | count x (u32 name string | u32 entry count | entries), sorted by name
    entry    u32 release ordinal | u32 method count | method count x (u8 kind | u32 selector string)
    footer   b"XIPL"

Kind bytes are 0 for instance methods and 1 for class methods. Class names
are stored in their canonical 'Base' / 'Base(Category)' rendering.
"""

import logging
import struct
from dataclasses import dataclass
from typing import Dict, List

from .database import LibraryVersionId
from .errors import IoFailure, StaleIndex
from .profile import ClassName, ClassNode, MethodKey, MethodKind

logger = logging.getLogger(__name__)

INDEX_FILENAME = "index.lpix"
MAGIC = b"LPIX"
FOOTER = b"XIPL"
INDEX_FORMAT_VERSION = 1
DIGEST_SIZE = 32

_KIND_CODES = {MethodKind.INSTANCE: 0, MethodKind.CLASS_METHOD: 1}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


@dataclass(frozen=True)
class ClassEntry:
    """One occurrence of a class name: the release and its class node."""

    id: LibraryVersionId
    node: ClassNode

    @property
    def library(self):
        return self.id.library

    @property
    def version(self):
        return self.id.version


class ClassIndex:
    """Class name -> occurrences, plus release -> class count back-map."""

    def __init__(self, entries, class_counts, manifest_digest):
        self._entries = entries
        self.class_counts = class_counts
        self.manifest_digest = manifest_digest
        self._versions = {}
        for vid in class_counts:
            self._versions.setdefault(vid.library, []).append(vid.version)

    def lookup(self, name):
        """All library classes named `name`; empty when the name is unknown."""
        if isinstance(name, str):
            name = ClassName.parse(name)
        return list(self._entries.get(name, ()))

    def names(self):
        return sorted(self._entries)

    def libraries(self):
        return sorted(self._versions)

    def versions(self, library):
        """Non-empty releases of `library` in release order."""
        return list(self._versions.get(library, ()))

    def class_count(self, vid):
        return self.class_counts[vid]

    def __contains__(self, name):
        if isinstance(name, str):
            name = ClassName.parse(name)
        return name in self._entries

    def __len__(self):
        return len(self._entries)

    def total_entries(self):
        return sum(len(v) for v in self._entries.values())


def build_index(db):
    """Unfold every class node of every non-empty release, keyed by name."""
    entries: Dict[ClassName, List[ClassEntry]] = {}
    class_counts = {}
    for vid, profile in db.entries.items():
        if len(profile) == 0:
            continue
        class_counts[vid] = len(profile)
        for node in profile:
            entries.setdefault(node.name, []).append(ClassEntry(vid, node))
    for occurrences in entries.values():
        occurrences.sort(key=lambda e: e.id)
    logger.info(f"Indexed {len(entries)} class names over {len(class_counts)} releases")
    return ClassIndex(entries, class_counts, db.manifest_digest())


class _StringTable:
    def __init__(self, strings):
        self.strings = sorted(set(strings))
        self.ordinal = {s: i for i, s in enumerate(self.strings)}

    def __getitem__(self, text):
        return self.ordinal[text]


def _pack_string(buf, text):
    raw = text.encode("utf-8")
    buf += struct.pack("<I", len(raw))
    buf += raw


def encode_index(index):
    """Serialize an index to bytes."""
    releases = list(index.class_counts)
    release_ordinal = {vid: i for i, vid in enumerate(releases)}
    strings = [s for vid in releases for s in vid]
    for name in index.names():
        strings.append(name.canonical)
        for entry in index.lookup(name):
            strings.extend(m.selector for m in entry.node.methods)
    table = _StringTable(strings)

    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<HH", INDEX_FORMAT_VERSION, 0)
    buf += index.manifest_digest
    buf += struct.pack("<I", len(table.strings))
    for text in table.strings:
        _pack_string(buf, text)
    buf += struct.pack("<I", len(releases))
    for vid in releases:
        buf += struct.pack("<III", table[vid.library], table[vid.version], index.class_counts[vid])
    names = index.names()
    buf += struct.pack("<I", len(names))
    for name in names:
        occurrences = index.lookup(name)
        buf += struct.pack("<II", table[name.canonical], len(occurrences))
        for entry in occurrences:
            methods = sorted(entry.node.methods)
            buf += struct.pack("<II", release_ordinal[entry.id], len(methods))
            for method in methods:
                buf += struct.pack("<BI", _KIND_CODES[method.kind], table[method.selector])
    buf += FOOTER
    return bytes(buf)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, fmt):
        values = struct.unpack_from(fmt, self.data, self.offset)
        self.offset += struct.calcsize(fmt)
        return values

    def raw(self, size):
        if self.offset + size > len(self.data):
            raise IoFailure("index file is truncated")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk


def decode_index(data):
    """Parse bytes produced by encode_index."""
    reader = _Reader(data)
    try:
        if reader.raw(4) != MAGIC:
            raise IoFailure("not an index file (bad magic)")
        version, _ = reader.take("<HH")
        if version != INDEX_FORMAT_VERSION:
            raise IoFailure(f"unsupported index format version {version}")
        digest = bytes(reader.raw(DIGEST_SIZE))
        (n_strings,) = reader.take("<I")
        strings = []
        for _ in range(n_strings):
            (size,) = reader.take("<I")
            strings.append(reader.raw(size).decode("utf-8"))
        (n_releases,) = reader.take("<I")
        releases, class_counts = [], {}
        for _ in range(n_releases):
            lib, ver, count = reader.take("<III")
            vid = LibraryVersionId(strings[lib], strings[ver])
            releases.append(vid)
            class_counts[vid] = count
        (n_names,) = reader.take("<I")
        entries = {}
        for _ in range(n_names):
            name_ref, n_entries = reader.take("<II")
            name = ClassName.parse(strings[name_ref])
            occurrences = []
            for _ in range(n_entries):
                ordinal, n_methods = reader.take("<II")
                methods = []
                for _ in range(n_methods):
                    kind, selector = reader.take("<BI")
                    methods.append(MethodKey(_CODE_KINDS[kind], strings[selector]))
                occurrences.append(ClassEntry(releases[ordinal], ClassNode(name, frozenset(methods))))
            entries[name] = occurrences
        if reader.raw(len(FOOTER)) != FOOTER or reader.offset != len(data):
            raise IoFailure("index file is corrupt (bad footer)")
    except (struct.error, UnicodeDecodeError, IndexError, KeyError) as exc:
        raise IoFailure(f"index file is truncated or corrupt: {exc}") from exc
    return ClassIndex(entries, class_counts, digest)


def save_index(index, path):
    try:
        with open(path, 'wb') as fh:
            fh.write(encode_index(index))
    except OSError as exc:
        raise IoFailure(f"cannot write index {path}: {exc}") from exc
    logger.info(f"Saved index of {len(index)} class names to {path}")


def load_index(path, database=None):
    """
    Load an index file, optionally checking it against a database.

    Raises:
    -------
    IoFailure
        When the file cannot be read or is truncated/corrupt
    StaleIndex
        When `database` is given and its manifest digest differs from the
        one the index was built from
    """
    try:
        with open(path, 'rb') as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read index {path}: {exc}") from exc
    index = decode_index(data)
    if database is not None and database.manifest_digest() != index.manifest_digest:
        raise StaleIndex(f"{path} was built from a different database; rebuild it with "
                         f"'libpin db index'")
    return index
