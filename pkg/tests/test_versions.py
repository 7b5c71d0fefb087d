"""Tests for class-level and code-level version pinpointing."""

from fractions import Fraction

import pytest
from src.libpin.corpus import AppPlan, CorpusSpec, generate_corpus
from src.libpin.database import LibraryVersionId, build_database
from src.libpin.errors import CodeLevelUnavailable, SchemaViolation
from src.libpin.index import build_index
from src.libpin.profile import ClassName, MethodKey, Profile, ProfileLevel
from src.libpin.recovery import recover
from src.libpin.versions import (DetectionPhase, VerdictQuality, VersionVerdict, detect_version,
                                 inconsistent_methods, refine_versions, verdict_quality)


def method(name, key):
    return (ClassName(name), MethodKey.parse(key))


def instance_for(db, app):
    return instance_for_index(build_index(db), app)


def instance_for_index(index, app):
    result = recover(app, index)
    assert len(result.instances) == 1
    return result.instances[0]


def test_inconsistent_methods(code_db):
    """Test the subset-existence and differing-vector rules."""
    assert inconsistent_methods({"2", "3"}, "L", code_db) == {method("K", "-foo")}
    assert inconsistent_methods({"1", "2"}, "L", code_db) == {method("K", "-bar")}
    assert inconsistent_methods({"1", "2", "3"}, "L", code_db) == \
        {method("K", "-foo"), method("K", "-bar")}


def test_identical_releases_have_no_inconsistent_methods(make_profile):
    code = ProfileLevel.CODE_LEVEL
    same = make_profile(("K", ["-foo"], {"-foo": [("class_ref", "NSString")]}), level=code)
    db = build_database([(LibraryVersionId("L", "1"), same), (LibraryVersionId("L", "2"), same)])
    assert inconsistent_methods({"1", "2"}, "L", db) == set()


def test_class_level_candidates_raise(three_release_db):
    with pytest.raises(CodeLevelUnavailable):
        inconsistent_methods({"1", "2"}, "A", three_release_db)


def test_refinement_picks_the_verbatim_release(code_db):
    """An app copy of L@3 narrows {2, 3} to {3}."""
    app = code_db.profile(LibraryVersionId("L", "3"))
    instance = instance_for(code_db, app)
    assert instance.v_p == {"2", "3"}

    verdict = detect_version(instance, app, code_db, code_level=True)
    assert verdict.phase is DetectionPhase.CODE_LEVEL
    assert verdict.candidates_in == {"2", "3"}
    assert verdict.candidates_out == {"3"}
    assert verdict.similarity == {"2": Fraction(2, 3), "3": Fraction(1)}


def test_class_level_verdict_without_refinement(code_db):
    app = code_db.profile(LibraryVersionId("L", "3"))
    instance = instance_for(code_db, app)

    verdict = detect_version(instance, app, code_db)
    assert verdict.phase is DetectionPhase.CLASS_LEVEL
    assert verdict.candidates_out == instance.v_p

    wide = detect_version(instance, app, code_db, code_level=True, max_candidates=2)
    assert wide.phase is DetectionPhase.CLASS_LEVEL
    assert wide.candidates_out == {"2", "3"}


def test_refinement_without_evidence_keeps_candidates(code_db, make_node):
    """When the differing method was customized away, nothing is narrowed."""
    app = Profile([make_node("K", ["-bar"], {"-bar": [("selector_ref", "run")]}),
                   make_node("J", ["-go"], {})], ProfileLevel.CODE_LEVEL)
    instance = instance_for(code_db, app)
    assert instance.v_p == {"2", "3"}

    verdict = refine_versions(instance, app, instance.v_p, "L", code_db)
    assert verdict.candidates_out == verdict.candidates_in == {"2", "3"}


def test_refinement_of_identical_candidates_is_identity(make_profile):
    code = ProfileLevel.CODE_LEVEL
    same = make_profile(("K", ["-foo"], {"-foo": [("const_string", "a")]}), level=code)
    db = build_database([(LibraryVersionId("L", "1"), same), (LibraryVersionId("L", "2"), same)])
    instance = instance_for(db, same)

    verdict = refine_versions(instance, same, {"1", "2"}, "L", db)
    assert verdict.candidates_out == {"1", "2"}


def test_refinement_needs_code_level_app(code_db):
    app = code_db.profile(LibraryVersionId("L", "3"))
    instance = instance_for(code_db, app)
    with pytest.raises(CodeLevelUnavailable):
        refine_versions(instance, app.at_class_level(), {"2", "3"}, "L", code_db)


def test_absent_method_compares_as_empty_vector(code_db):
    """Candidate L@1 lacks -bar; the app's -bar scores 0 against it."""
    app = code_db.profile(LibraryVersionId("L", "2"))
    instance = instance_for(code_db, app)

    verdict = refine_versions(instance, app, {"1", "2"}, "L", code_db)
    # N = {K -bar}: 1 against L@2, 0 against the absent method in L@1.
    assert verdict.similarity == {"1": Fraction(0), "2": Fraction(1)}
    assert verdict.candidates_out == {"2"}


@pytest.mark.parametrize("out, quality", [
    ({"2.5.1"}, VerdictQuality.CORRECT),
    ({"2.5.1", "2.5.2"}, VerdictQuality.SOUND),
    ({"2.6.0"}, VerdictQuality.INCORRECT),
])
def test_verdict_quality(out, quality):
    verdict = VersionVerdict(None, frozenset(out) | {"2.6.0"}, frozenset(out),
                             DetectionPhase.CLASS_LEVEL, {})
    assert verdict_quality(verdict, "2.5.1") is quality


@pytest.mark.parametrize("candidates_in, candidates_out", [
    ({"1", "2"}, set()),
    ({"1"}, {"1", "2"}),
])
def test_verdict_rejects_bad_release_sets(candidates_in, candidates_out):
    with pytest.raises(SchemaViolation):
        VersionVerdict(None, frozenset(candidates_in), frozenset(candidates_out),
                       DetectionPhase.CLASS_LEVEL, {})


@pytest.mark.slow
def test_refinement_on_unmodified_release_copies():
    """For 1,000 whole-release apps, refinement only narrows and never drops the true release."""
    spec = CorpusSpec(seed=4, library_count=(100, 100), versions_per_library=(10, 10),
                      classes_per_version=(2, 5), methods_per_class=(2, 5),
                      apps=AppPlan(count=1, libraries_per_app=(1, 1)))
    db = generate_corpus(spec).database
    index = build_index(db)
    assert len(db) == 1000

    narrowed = 0
    for release, app in db.entries.items():
        instance = instance_for_index(index, app)
        assert instance.library == release.library
        verdict = detect_version(instance, app, db, code_level=True, max_candidates=1)

        assert verdict.candidates_in == instance.v_p
        assert verdict.candidates_out
        assert verdict.candidates_out <= verdict.candidates_in
        assert verdict_quality(verdict, release.version) is not VerdictQuality.INCORRECT
        if len(instance.v_p) == 1:
            assert verdict.phase is DetectionPhase.CLASS_LEVEL
        else:
            assert verdict.phase is DetectionPhase.CODE_LEVEL
            narrowed += len(verdict.candidates_out) < len(verdict.candidates_in)
    assert narrowed > 0
