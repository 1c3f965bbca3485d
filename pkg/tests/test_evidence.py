"""Conditional expected costs: worked values, greedy bounds, and the oracle."""

import random

import pytest

from cider import diagram as dg
from cider.contextual import KnowledgeBase
from cider.el import ConceptName as N
from cider.evidence import (
    EvidenceQuery,
    UndefinedConditionalError,
    brute_force_conditional_bounds,
    classify_worlds,
    conditional_expectation,
    optimistic_expected_cost,
    pessimistic_expected_cost,
)

from conftest import random_concept

SUB_INF = EvidenceQuery(N("Subject"), N("Infectious"))
TAUTOLOGY = EvidenceQuery(N("Anything"), N("Anything"))


def test_conditional_expectation_worked_values():
    assert conditional_expectation(
        [(0.012, 90), (0.054, 90), (0.028, 20)]
    ) == pytest.approx(69.149, abs=1e-3)
    assert conditional_expectation([(0.054, 5), (0.126, 0)]) == pytest.approx(
        1.5, abs=1e-9
    )
    assert conditional_expectation([(0.37, 42.0)]) == pytest.approx(42.0)


def test_conditional_expectation_overlays(idelium_model):
    overlays = idelium_model.cost_overlays
    assert conditional_expectation(overlays["subject_benefits"]) == pytest.approx(
        69.149, abs=1e-3
    )
    assert conditional_expectation(overlays["subject_safe"]) == pytest.approx(
        1.5, abs=1e-9
    )


def test_conditional_expectation_zero_mass():
    with pytest.raises(UndefinedConditionalError):
        conditional_expectation([])
    with pytest.raises(UndefinedConditionalError):
        conditional_expectation([(0.0, 5.0)])


def test_classify_worlds_fixture(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    classification = classify_worlds(kb, s, SUB_INF)
    assert len(classification.worlds) == 16
    assert sum(w.probability for w in classification.worlds) == pytest.approx(1.0)
    for w in classification.worlds:
        assert w.forced == w.bits.startswith("1")  # exactly the D-worlds
    positive_forced = [w for w in classification.forced if w.probability > 0]
    assert len(positive_forced) == 4
    assert sum(w.probability for w in positive_forced) == pytest.approx(0.3)


def test_classify_worlds_degenerate(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    assert all(w.forced for w in classify_worlds(kb, s, TAUTOLOGY).worlds)
    bare = KnowledgeBase(diagram=kb.diagram, vtbox=())
    fresh = EvidenceQuery(N("Nowhere"), N("Mentioned"))
    assert not any(w.forced for w in classify_worlds(bare, s, fresh).worlds)


def test_optimistic_fixture_trace(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    result = optimistic_expected_cost(kb, s, SUB_INF)
    assert result.value == pytest.approx(3.445, abs=1e-3)
    # forced D-worlds plus the cost-0 and cost-2 optional worlds
    assert result.evidence_probability == pytest.approx(0.3 + 0.378 + 0.252, abs=1e-9)
    assert "0011" in result.included_worlds  # cost-2 world
    assert "0010" in result.included_worlds  # cost-0 world
    assert "0101" not in result.included_worlds  # cost-20 world stays out


def test_pessimistic_fixture_trace(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    result = pessimistic_expected_cost(kb, s, SUB_INF)
    assert result.value == pytest.approx(11.081, abs=1e-3)
    assert result.evidence_probability == pytest.approx(0.3 + 0.07, abs=1e-9)


def test_tautology_conditioning_is_identity(idelium):
    kb = idelium.kb
    for name in ("test_a_if_clear", "uniform", "never_test_a"):
        s = idelium.strategy(name)
        expected = dg.expected_cost(kb.diagram, s)
        assert optimistic_expected_cost(kb, s, TAUTOLOGY).value == pytest.approx(
            expected, abs=1e-9
        )
        assert pessimistic_expected_cost(kb, s, TAUTOLOGY).value == pytest.approx(
            expected, abs=1e-9
        )


def test_no_forced_mass_concentrates_on_extremes(idelium):
    bare = KnowledgeBase(diagram=idelium.kb.diagram, vtbox=())
    s = idelium.strategy("test_a_if_clear")
    query = EvidenceQuery(N("Fresh"), N("Pair"))
    low = optimistic_expected_cost(bare, s, query)
    high = pessimistic_expected_cost(bare, s, query)
    assert low.value == 0.0
    assert high.value == 90.0
    assert all(b.startswith("1") for b in high.included_worlds)  # the cost-90 world


def test_oracle_fixture(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    low, high = brute_force_conditional_bounds(kb, s, SUB_INF)
    assert low == pytest.approx(3.445, abs=1e-3)
    assert high == pytest.approx(11.081, abs=1e-3)
    both = brute_force_conditional_bounds(kb, s, TAUTOLOGY)
    assert both[0] == both[1] == pytest.approx(4.604, abs=1e-9)


def test_oracle_refuses_large_instances(idelium):
    bare = KnowledgeBase(diagram=idelium.kb.diagram, vtbox=())
    s = idelium.strategy("uniform")
    with pytest.raises(ValueError, match="exceed"):
        brute_force_conditional_bounds(bare, s, EvidenceQuery(N("A"), N("B")), limit=3)


def test_single_forced_world():
    d = dg.InfluenceDiagram(
        variables=("A",),
        kinds={"A": dg.CHANCE},
        parents={"A": ()},
        cpt={"A": {"": 1.0}},
        cost_parents=("A",),
        cost_table={"0": 3.0, "1": 8.0},
    )
    kb = KnowledgeBase(diagram=d, vtbox=())
    s = dg.GlobalStrategy(locals={})
    low = optimistic_expected_cost(kb, s, TAUTOLOGY)
    high = pessimistic_expected_cost(kb, s, TAUTOLOGY)
    assert low.value == high.value == 8.0
    assert brute_force_conditional_bounds(kb, s, TAUTOLOGY) == (8.0, 8.0)


def test_intermediate_cost_inclusion_helps():
    """Including a middle-cost world can lower the average further than
    only the cheapest one: forced (0.1 mass, cost 10); optional
    (0.05, 0) and (0.8, 4)."""
    outcomes_cheap_only = conditional_expectation([(0.1, 10), (0.05, 0)])
    outcomes_both = conditional_expectation([(0.1, 10), (0.05, 0), (0.8, 4)])
    assert outcomes_both < outcomes_cheap_only


def test_greedy_matches_oracle_randomized(random_kb_corpus):
    rng = random.Random(77)
    for kb, s in random_kb_corpus[:60]:
        query = EvidenceQuery(random_concept(rng), random_concept(rng))
        low = optimistic_expected_cost(kb, s, query)
        high = pessimistic_expected_cost(kb, s, query)
        oracle_low, oracle_high = brute_force_conditional_bounds(kb, s, query)
        assert low.value == pytest.approx(oracle_low, abs=1e-9)
        assert high.value == pytest.approx(oracle_high, abs=1e-9)


def test_greedy_included_worlds_cover_forced(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    classification = classify_worlds(kb, s, SUB_INF)
    forced_bits = {w.bits for w in classification.forced if w.probability > 0}
    for bound in (optimistic_expected_cost, pessimistic_expected_cost):
        result = bound(kb, s, SUB_INF)
        assert forced_bits <= result.included_worlds


def test_result_serialization(idelium):
    kb = idelium.kb
    s = idelium.strategy("test_a_if_clear")
    payload = optimistic_expected_cost(kb, s, SUB_INF).to_json_dict()
    assert set(payload) == {"value", "evidence_probability", "included_worlds"}
    assert payload["included_worlds"] == sorted(payload["included_worlds"])
