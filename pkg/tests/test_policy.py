"""Policy DSL parsing and action resolution."""

from __future__ import annotations

import random

import pytest

from graphlens.policy import (
    DEFAULT,
    FORCE,
    SKIP,
    EMPTY_POLICY,
    ExtractionPolicy,
    PathModel,
    PolicyParseError,
    PolicyRule,
    parse_policy_text,
)

H = PathModel.HIERARCHICAL


def test_parse_all_three_forms():
    policy = parse_policy_text(
        """
        # extraction tuning
        PubMedArticle.Authors.Author.Name force Person
        PubMedArticle.Title skip   # titles are noise
        PubMedArticle.References skipAll
        """
    )
    assert [(r.context, r.action, r.entity_type) for r in policy.rules] == [
        ("PubMedArticle.Authors.Author.Name", "force", "Person"),
        ("PubMedArticle.Title", "skip", None),
        ("PubMedArticle.References", "skipAll", None),
    ]
    assert policy.rules[0].line == 3


def test_parse_errors_carry_line_numbers():
    with pytest.raises(PolicyParseError, match="line 1"):
        parse_policy_text("justonepath")
    with pytest.raises(PolicyParseError, match="line 2"):
        parse_policy_text("a.b skip\na.c explode")
    with pytest.raises(PolicyParseError, match="entity type"):
        parse_policy_text("a.b force")
    with pytest.raises(PolicyParseError, match="Robot"):
        parse_policy_text("a.b force Robot")
    with pytest.raises(PolicyParseError, match="no arguments"):
        parse_policy_text("a.b skip extra")


def test_resolve_default_without_rules():
    assert EMPTY_POLICY.resolve("any.path", H).action == DEFAULT


def test_force_applies_on_exact_context():
    policy = parse_policy_text("A.B.Name force Person")
    resolved = policy.resolve("A.B.Name", H)
    assert (resolved.action, resolved.entity_type) == (FORCE, "Person")
    assert policy.resolve("A.B.Name.Deeper", H).action == DEFAULT
    assert policy.resolve("A.B", H).action == DEFAULT


def test_skip_applies_on_exact_context_only():
    policy = parse_policy_text("A.B.Title skip")
    assert policy.resolve("A.B.Title", H).action == SKIP
    assert policy.resolve("A.B.Title.Sub", H).action == DEFAULT
    assert policy.resolve("A.B", H).action == DEFAULT


def test_skip_all_covers_node_siblings_and_parent_descendants():
    policy = parse_policy_text("A.B.C skipAll")
    covered = ["A.B.C", "A.B.D", "A.B.C.E", "A.B.D.E.F"]
    uncovered = ["A.B", "A", "A.X", "A.X.C", "Other.B.C"]
    for path in covered:
        assert policy.resolve(path, H).action == SKIP, path
    for path in uncovered:
        assert policy.resolve(path, H).action == DEFAULT, path


def test_skip_all_on_root_level_context_covers_model():
    policy = parse_policy_text("Root skipAll")
    assert policy.resolve("Root", H).action == SKIP
    assert policy.resolve("Anything.Else", H).action == SKIP


def test_skip_all_degrades_to_skip_outside_hierarchical_models():
    policy = parse_policy_text("people.name skipAll")
    assert policy.resolve("people.name", PathModel.RELATIONAL).action == SKIP
    assert policy.resolve("people.other", PathModel.RELATIONAL).action == DEFAULT
    rdf = parse_policy_text("http://xmlns.com/foaf/0.1/name skipAll")
    assert rdf.resolve("http://xmlns.com/foaf/0.1/name", PathModel.RDF).action == SKIP


def test_precedence_force_over_skip_all_over_skip():
    policy = parse_policy_text(
        """
        A.B.Name force Person
        A.B.C skipAll
        A.B.Name skip
        """
    )
    # force wins even though the skipAll context covers the same node
    assert policy.resolve("A.B.Name", H).action == FORCE
    assert policy.resolve("A.B.Other", H).action == SKIP


def test_first_force_rule_wins_for_duplicate_contexts():
    policy = parse_policy_text("a.b force Person\na.b force Location")
    assert policy.resolve("a.b", H).entity_type == "Person"


def test_relational_and_rdf_contexts_match_exactly():
    policy = parse_policy_text("people.name skip\nhttp://ex.org/label skip")
    assert policy.resolve("people.name", PathModel.RELATIONAL).action == SKIP
    assert policy.resolve("people.age", PathModel.RELATIONAL).action == DEFAULT
    assert policy.resolve("http://ex.org/label", PathModel.RDF).action == SKIP


def test_adding_skip_rules_never_unskips():
    # Property: for random rule sets, appending one more skip/skipAll rule
    # never turns a skipped path back into default or force into skip.
    rng = random.Random(5)
    segments = ["a", "b", "c", "d"]

    def random_path():
        return ".".join(rng.choice(segments) for _ in range(rng.randint(1, 3)))

    for _ in range(200):
        base_rules = [
            PolicyRule(random_path(), rng.choice([SKIP, "skipAll"]), None, i)
            for i in range(rng.randint(0, 3))
        ]
        policy = ExtractionPolicy(tuple(base_rules))
        extended = ExtractionPolicy(
            tuple(base_rules) + (PolicyRule(random_path(), SKIP, None, 99),)
        )
        for _ in range(10):
            path = random_path()
            before = policy.resolve(path, H).action
            after = extended.resolve(path, H).action
            if before == SKIP:
                assert after == SKIP
