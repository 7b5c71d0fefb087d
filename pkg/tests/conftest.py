"""Common fixtures for testing libpin."""

import os

import pytest
from src.libpin.database import LibraryVersionId, build_database, save_database
from src.libpin.index import INDEX_FILENAME, build_index, save_index
from src.libpin.profile import (ClassName, ClassNode, FeatureVector, MethodKey, Profile,
                                ProfileLevel)


def _node(name, methods=(), features=None):
    keys = frozenset(MethodKey.parse(m) for m in methods)
    if features is not None:
        features = {MethodKey.parse(m): FeatureVector.of(*usages) for m, usages in features.items()}
    return ClassNode(ClassName.parse(name), keys, features)


@pytest.fixture
def make_node():
    """Return a factory: make_node('K', ['-foo', '+bar'], {'-foo': [('const_string', 'x')]})."""
    return _node


@pytest.fixture
def make_profile():
    """Return a factory building a profile from (name, methods[, features]) tuples."""
    def build(*classes, level=ProfileLevel.CLASS_LEVEL):
        return Profile([_node(*spec) for spec in classes], level)
    return build


@pytest.fixture
def three_release_db(make_profile):
    """A@1{X,Y}, A@2{X,Z} and B@1{X}."""
    return build_database([
        (LibraryVersionId("A", "1"), make_profile(("X", ["-init"]), ("Y", ["-y"]))),
        (LibraryVersionId("A", "2"), make_profile(("X", ["-init"]), ("Z", ["-z"]))),
        (LibraryVersionId("B", "1"), make_profile(("X", ["-init", "-b"]))),
    ], created="2024-01-01T00:00:00Z")


@pytest.fixture
def shared_pool_db(make_profile):
    """
    FA and FC share eleven classes: FA@y1 overlaps FC@x1 by 11/16 and FC@x2 not at all.
    """
    shared = [(f"S{i}", ["-init", f"-s{i}"]) for i in range(1, 12)]
    fa_own = [(f"FA{i}", ["-init", f"-a{i}"]) for i in range(1, 6)]
    fc_own = [(f"FC{i}", ["-init", f"-c{i}"]) for i in range(1, 4)]
    return build_database([
        (LibraryVersionId("FA", "y1"), make_profile(*fa_own, *shared)),
        (LibraryVersionId("FA", "y2"), make_profile(*fa_own, ("FA6", ["-init"]))),
        (LibraryVersionId("FC", "x1"), make_profile(*fc_own, *shared)),
        (LibraryVersionId("FC", "x2"), make_profile(*fc_own, ("FC4", ["-init"]))),
    ], created="2024-01-01T00:00:00Z")


@pytest.fixture
def shared_pool_app(shared_pool_db):
    """An app integrating FA@y1 and FC@x2, plus two classes of its own."""
    nodes = list(shared_pool_db.profile(LibraryVersionId("FA", "y1")))
    nodes += list(shared_pool_db.profile(LibraryVersionId("FC", "x2")))
    nodes += [_node("AppDelegate", ["-application:didFinishLaunching:"]),
              _node("MainViewController", ["-viewDidLoad"])]
    return Profile(nodes)


@pytest.fixture
def code_db(make_profile):
    """
    Three code-level releases of L: 2 and 3 differ only in the features of
    K -foo, 1 lacks K -bar altogether.
    """
    code = ProfileLevel.CODE_LEVEL
    base = {"-foo": [("const_string", "x")], "-bar": [("selector_ref", "run")]}
    v3 = dict(base, **{"-foo": [("const_string", "x"), ("const_string", "x")]})
    return build_database([
        (LibraryVersionId("L", "1"), make_profile(
            ("K", ["-foo"], {"-foo": base["-foo"]}), ("J", ["-go"], {}), level=code)),
        (LibraryVersionId("L", "2"), make_profile(
            ("K", ["-foo", "-bar"], base), ("J", ["-go"], {}), level=code)),
        (LibraryVersionId("L", "3"), make_profile(
            ("K", ["-foo", "-bar"], v3), ("J", ["-go"], {}), level=code)),
    ], created="2024-01-01T00:00:00Z")


@pytest.fixture
def db_dir(tmp_path, shared_pool_db):
    """shared_pool_db saved to disk together with its index."""
    path = tmp_path / "db"
    save_database(shared_pool_db, str(path))
    save_index(build_index(shared_pool_db), os.path.join(str(path), INDEX_FILENAME))
    return str(path)
