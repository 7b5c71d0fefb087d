"""Tests for overlap, uniqueness grouping and advisory triage."""

import itertools
import json
from fractions import Fraction

import pytest
from src.libpin.analytics import (TriageClass, VersionPredicate, classify, library_overlap,
                                  load_advisories, overlap, overlap_matrix, overlap_report,
                                  parse_advisory, uniqueness_groups)
from src.libpin.database import LibraryVersionId, build_database
from src.libpin.errors import EmptyProfile, SchemaViolation
from src.libpin.index import build_index
from src.libpin.profile import ClassName, ClassNode, Profile, ProfileLevel
from src.libpin.recovery import LibraryInstance
from src.libpin.versions import DetectionPhase, VersionVerdict

AF_VERSIONS = ["2.4.1", "2.5.0", "2.5.1", "2.5.2", "2.5.3", "3.0.0"]


def names_profile(*names):
    return Profile([ClassNode(ClassName(n)) for n in names])


def verdict_for(library, versions):
    instance = LibraryInstance(library, {}, frozenset(versions), Fraction(1), None, None)
    return VersionVerdict(instance, frozenset(versions), frozenset(versions),
                          DetectionPhase.CLASS_LEVEL, {})


@pytest.fixture
def af_db(make_profile):
    return build_database([(LibraryVersionId("AFNetworking", v), make_profile(("AFHTTPClient", ["-init"])))
                           for v in AF_VERSIONS])


def test_overlap_examples():
    """Test overlap on identity, disjoint and asymmetric pairs."""
    a = names_profile("X", "Y", "Z", "W")
    assert overlap(a, a) == 1
    assert overlap(a, names_profile("P", "Q")) == 0
    assert overlap(a, names_profile("X", "Y")) == Fraction(1, 2)
    assert overlap(names_profile("X", "Y"), a) == 1

    with pytest.raises(EmptyProfile):
        overlap(Profile(), a)


def test_overlap_asymmetric_text_kit_pair():
    """overlap(text, kit) = 0.87 while overlap(kit, text) = 0.34."""
    shared = [f"YYShared{i}" for i in range(1479)]
    text = names_profile(*shared, *(f"YYText{i}" for i in range(1700 - 1479)))
    kit = names_profile(*shared, *(f"YYKit{i}" for i in range(4350 - 1479)))
    assert overlap(text, kit) == Fraction(87, 100)
    assert overlap(kit, text) == Fraction(34, 100)


def test_overlap_matrix_and_library_overlap(shared_pool_db):
    """Test the FA/FC matrix: 11/16 at (y1, x1), 0 at (y1, x2)."""
    matrix = overlap_matrix("FA", "FC", shared_pool_db)
    assert list(matrix.index) == ["y1", "y2"]
    assert list(matrix.columns) == ["x1", "x2"]
    assert matrix.at["y1", "x1"] == Fraction(11, 16)
    assert matrix.at["y1", "x2"] == 0
    assert matrix.at["y2", "x1"] == 0
    assert library_overlap("FA", "FC", shared_pool_db) == Fraction(11, 16)
    assert float(library_overlap("FA", "FC", shared_pool_db)) == 0.6875
    assert library_overlap("FC", "FA", shared_pool_db) == Fraction(11, 14)


def test_library_overlap_inclusion_and_disjoint(make_profile):
    db = build_database([
        (LibraryVersionId("B", "1"), make_profile(("B1", []), ("B2", []))),
        (LibraryVersionId("A", "1"), make_profile(("A1", []), ("B1", []), ("B2", []))),
        (LibraryVersionId("C", "1"), make_profile(("C1", []))),
        (LibraryVersionId("E", "1"), make_profile()),
    ])
    assert library_overlap("B", "A", db) == 1
    assert library_overlap("A", "B", db) == Fraction(2, 3)
    assert library_overlap("A", "C", db) == 0
    with pytest.raises(EmptyProfile):
        library_overlap("E", "A", db)


def test_overlap_report(shared_pool_db, three_release_db):
    """Test that the report keeps both directions and omits non-sharing pairs."""
    report = overlap_report(shared_pool_db, build_index(shared_pool_db))
    assert report.pairs == {("FA", "FC"): Fraction(11, 16), ("FC", "FA"): Fraction(11, 14)}
    assert report.to_dict()["pairs"][0]["overlap"] == "0.687500"
    assert list(report.to_frame().columns) == ["library", "other", "overlap", "exact"]

    single = build_database([(LibraryVersionId("A", "1"), names_profile("X"))])
    assert overlap_report(single, build_index(single)).pairs == {}

    # B@1 defines X with other methods; names alone decide overlap.
    sharing = overlap_report(three_release_db, build_index(three_release_db))
    assert sharing.pairs == {("A", "B"): Fraction(1, 2), ("B", "A"): Fraction(1)}


def test_uniqueness_groups(make_profile):
    """Class-level twins that differ in features split at code level."""
    code = ProfileLevel.CODE_LEVEL
    p1 = make_profile(("K", ["-foo"], {"-foo": [("const_string", "a")]}), level=code)
    p2 = make_profile(("K", ["-foo"], {"-foo": [("const_string", "b")]}), level=code)
    p3 = make_profile(("J", ["-bar"], {}), level=code)
    db = build_database([(LibraryVersionId("L", "1"), p1), (LibraryVersionId("L", "2"), p2),
                         (LibraryVersionId("L", "3"), p3), (LibraryVersionId("L", "4"), Profile())])

    by_class = uniqueness_groups(db, ProfileLevel.CLASS_LEVEL)
    assert by_class.histogram() == {1: 1, 2: 1}
    assert by_class.profile_count() == 3
    assert by_class.partition() == {frozenset({LibraryVersionId("L", "1"), LibraryVersionId("L", "2")}),
                                    frozenset({LibraryVersionId("L", "3")})}
    assert by_class.share_within(1) == Fraction(1, 3)
    assert by_class.share_within() == 1

    by_code = uniqueness_groups(db, ProfileLevel.CODE_LEVEL)
    assert by_code.histogram() == {1: 3}
    assert by_code.to_dict()["shared_groups"] == []
    assert by_class.to_dict()["shared_groups"] == [["L@1", "L@2"]]


def test_uniqueness_ignores_storage_order(make_profile):
    a = make_profile(("X", ["-a"]), ("Y", ["-b"]))
    b = make_profile(("Y", ["-b"]), ("X", ["-a"]))
    db = build_database([(LibraryVersionId("A", "1"), a), (LibraryVersionId("A", "2"), b)])
    assert uniqueness_groups(db).histogram() == {2: 1}


def test_classify_examples(af_db):
    """Test vulnerable, risky, safe and not-applicable triage."""
    advisory = parse_advisory({"library": "AFNetworking", "reference": "CVE-2016-4682",
                               "vulnerable": {"set": ["2.5.1", "2.5.2"]}}, af_db)
    assert classify(verdict_for("AFNetworking", {"2.5.1", "2.5.2"}), advisory) is TriageClass.VULNERABLE
    assert classify(verdict_for("AFNetworking", {"2.5.2", "2.5.3"}), advisory) is TriageClass.RISKY
    assert classify(verdict_for("AFNetworking", {"3.0.0"}), advisory) is TriageClass.SAFE
    assert classify(verdict_for("SDWebImage", {"2.5.1"}), advisory) is TriageClass.NOT_APPLICABLE


@pytest.mark.parametrize("vulnerable, expected", [
    ({"max_inclusive": "2.5.2"}, AF_VERSIONS[:4]),
    ({"max_exclusive": "2.5.2"}, AF_VERSIONS[:3]),
    ({"min_inclusive": "2.5.0", "max_inclusive": "2.5.3"}, AF_VERSIONS[1:5]),
    ({"min_inclusive": "2.5.3"}, AF_VERSIONS[4:]),
    ({"set": ["2.5.1", "9.9.9"]}, ["2.5.1"]),
])
def test_predicates_over_release_order(af_db, vulnerable, expected):
    advisory = parse_advisory({"library": "AFNetworking", "vulnerable": vulnerable}, af_db)
    assert [v for v in AF_VERSIONS if advisory.vulnerable_versions(v)] == expected
    assert not advisory.vulnerable_versions("10.0.0")


def test_classify_is_exhaustive_over_version_sets(af_db):
    """Every non-empty output set falls in exactly the class a brute-force count predicts."""
    advisory = parse_advisory({"library": "AFNetworking", "reference": "GHSA",
                               "vulnerable": {"max_exclusive": "2.5.3"}}, af_db)
    bad = set(AF_VERSIONS[:4])
    for size in range(1, len(AF_VERSIONS) + 1):
        for out in itertools.combinations(AF_VERSIONS, size):
            hits = len(bad & set(out))
            expected = (TriageClass.VULNERABLE if hits == len(out) else
                        TriageClass.SAFE if hits == 0 else TriageClass.RISKY)
            assert classify(verdict_for("AFNetworking", out), advisory) is expected


@pytest.mark.parametrize("data", [
    {"vulnerable": {"set": []}},
    {"library": "AFNetworking"},
    {"library": "AFNetworking", "vulnerable": {}},
    {"library": "AFNetworking", "vulnerable": {"max_inclusive": "7.7.7"}},
    {"library": "AFNetworking", "vulnerable": {"set": "2.5.1"}},
    {"library": "AFNetworking", "vulnerable": {"set": ["2.5.1", 3]}},
])
def test_parse_advisory_rejects_bad_input(af_db, data):
    with pytest.raises(SchemaViolation):
        parse_advisory(data, af_db)


def test_advisory_for_uncollected_library(af_db):
    """Advisories naming a library outside the database parse and never apply."""
    advisory = parse_advisory({"library": "SDWebImage", "reference": "CVE-2018-0001",
                               "vulnerable": {"min_inclusive": "4.0.0", "max_exclusive": "4.2.1"}},
                              af_db)
    assert advisory.library == "SDWebImage"
    assert classify(verdict_for("AFNetworking", {"2.5.1"}), advisory) is TriageClass.NOT_APPLICABLE


def test_predicate_describe():
    order = tuple(AF_VERSIONS)
    assert VersionPredicate(order=order, upper="2.5.2").describe() == "<= 2.5.2"
    assert VersionPredicate(order=order, lower="2.5.0", upper="3.0.0",
                            upper_inclusive=False).describe() == ">= 2.5.0 and < 3.0.0"


def test_load_advisories(tmp_path, af_db):
    path = tmp_path / "advisories.json"
    path.write_text(json.dumps([
        {"library": "AFNetworking", "vulnerable": {"set": ["2.5.1"]}, "reference": "A"},
        {"library": "AFNetworking", "vulnerable": {"max_inclusive": "2.4.1"}, "reference": "B"},
    ]))
    advisories = load_advisories(str(path), af_db)
    assert [a.reference for a in advisories] == ["A", "B"]
