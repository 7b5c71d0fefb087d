"""Tests for the class index and its on-disk format."""

import pytest
from src.libpin.database import LibraryVersionId, build_database
from src.libpin.errors import IoFailure, StaleIndex
from src.libpin.index import (MAGIC, build_index, decode_index, encode_index, load_index,
                              save_index)
from src.libpin.profile import ClassName


def ids(entries):
    return [str(e.id) for e in entries]


def test_build_index_unfolds_every_class(three_release_db):
    """Test the A@1{X,Y}, A@2{X,Z}, B@1{X} example."""
    index = build_index(three_release_db)

    assert ids(index.lookup("X")) == ["A@1", "A@2", "B@1"]
    assert ids(index.lookup("Y")) == ["A@1"]
    assert ids(index.lookup("Z")) == ["A@2"]
    assert index.lookup("Nope") == []
    assert "X" in index
    assert index.names() == [ClassName("X"), ClassName("Y"), ClassName("Z")]
    assert index.class_count(LibraryVersionId("A", "2")) == 2
    assert index.versions("A") == ["1", "2"]


def test_entry_node_name_matches_key(three_release_db):
    index = build_index(three_release_db)
    for name in index.names():
        assert all(entry.node.name == name for entry in index.lookup(name))


def test_category_lookup_is_exact(make_profile):
    db = build_database([(LibraryVersionId("GMS", "1"),
                          make_profile(("NSData(GMSCrypto)", ["-sha"]), ("GMSMap", ["-init"])))])
    index = build_index(db)

    assert ids(index.lookup("NSData(GMSCrypto)")) == ["GMS@1"]
    assert index.lookup("NSData") == []


def test_empty_database_and_empty_profiles(make_profile):
    assert len(build_index(build_database([]))) == 0

    db = build_database([(LibraryVersionId("A", "1"), make_profile()),
                         (LibraryVersionId("A", "2"), make_profile(("X", [])))])
    index = build_index(db)
    assert index.versions("A") == ["2"]
    assert index.total_entries() == 1


def test_entry_total_equals_class_total(shared_pool_db):
    """Sum of entry-list lengths equals the sum of class counts."""
    index = build_index(shared_pool_db)
    assert index.total_entries() == sum(len(p) for p in shared_pool_db.entries.values())


def test_round_trip(tmp_path, three_release_db):
    """Test that a saved index answers every lookup like the original."""
    index = build_index(three_release_db)
    path = str(tmp_path / "index.lpix")
    save_index(index, path)
    loaded = load_index(path, three_release_db)

    assert loaded.names() == index.names()
    for name in index.names():
        original = [(e.id, e.node) for e in index.lookup(name)]
        assert [(e.id, e.node) for e in loaded.lookup(name)] == original
    assert loaded.class_counts == index.class_counts
    assert loaded.manifest_digest == three_release_db.manifest_digest()
    assert encode_index(loaded) == encode_index(index)


def test_encoding_header(three_release_db):
    data = encode_index(build_index(three_release_db))
    assert data[:4] == MAGIC
    assert three_release_db.manifest_digest() in data[:64]


def test_stale_index(tmp_path, three_release_db, shared_pool_db):
    path = str(tmp_path / "index.lpix")
    save_index(build_index(three_release_db), path)

    with pytest.raises(StaleIndex):
        load_index(path, shared_pool_db)


@pytest.mark.parametrize("cut", [3, 40, -5, -1])
def test_truncated_index(tmp_path, three_release_db, cut):
    data = encode_index(build_index(three_release_db))
    path = tmp_path / "index.lpix"
    path.write_bytes(data[:cut])

    with pytest.raises(IoFailure):
        load_index(str(path))


def test_bad_magic():
    data = bytearray(encode_index(build_index(build_database([]))))
    data[0:4] = b"XXXX"
    with pytest.raises(IoFailure):
        decode_index(bytes(data))


def test_missing_index_file(tmp_path):
    with pytest.raises(IoFailure):
        load_index(str(tmp_path / "absent.lpix"))
