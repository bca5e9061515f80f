"""Closed-loop series of interconnected nodes and the forward-path subgraph."""

from __future__ import annotations

import warnings
from fractions import Fraction

import pytest

from fliessnet import (
    DomainError,
    MaximalSeriesSpec,
    NetworkSpec,
    NodeIndexError,
    Series,
    SubgraphBudgetError,
    abel_taylor,
    closed_loop_series,
    io_map,
    natural_response,
    network_from_json,
    network_to_json,
    restrict_to_subgraph,
    subgraph_extract,
)
from conftest import all_ones_maximal, double_diamond_net, four_node_net


def integrator_chain(weights):
    """Chain 1 -> 2 -> ... -> n of pure integrators with the given edge weights."""
    n = len(weights) + 1
    x1 = Series(1, 1, {(1,): 1})
    W = [[0] * n for _ in range(n)]
    for idx, w in enumerate(weights):
        W[idx + 1][idx] = w
    return NetworkSpec(n, W, [x1] * n)


class TestSpecValidation:
    def test_rejects_negative_weight(self):
        x1 = Series(1, 1, {(1,): 1})
        with pytest.raises(DomainError):
            NetworkSpec(2, [[0, 0], [-1, 0]], [x1, x1])

    def test_warns_on_weight_above_one(self):
        x1 = Series(1, 1, {(1,): 1})
        with pytest.warns(UserWarning):
            NetworkSpec(2, [[0, 0], [2, 0]], [x1, x1])

    def test_rejects_shape_mismatch(self):
        x1 = Series(1, 1, {(1,): 1})
        with pytest.raises(DomainError):
            NetworkSpec(2, [[0, 0]], [x1, x1])

    def test_rejects_multi_letter_node(self):
        bad = Series(2, 1, {(2,): 1})
        x1 = Series(1, 1, {(1,): 1})
        with pytest.raises(DomainError):
            NetworkSpec(2, [[0, 0], [1, 0]], [x1, bad])

    def test_node_index_bounds(self):
        net = integrator_chain([1])
        with pytest.raises(NodeIndexError):
            net.weight(0, 1)
        with pytest.raises(NodeIndexError):
            io_map(net, 1, 3, 2)


class TestClosedLoop:
    def test_two_node_chain(self):
        net = integrator_chain([Fraction(1, 3)])
        d = closed_loop_series(net, 1, 4)
        assert dict(d[1].terms) == {(1,): 1}
        assert dict(d[2].terms) == {(0, 1): Fraction(1, 3)}
        assert d[2].exact_to == 4

    def test_chain_composes_weights(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            net = integrator_chain([2, Fraction(1, 2), 3])
            d = io_map(net, 1, 4, 6)
        assert dict(d.terms) == {(0, 0, 0, 1): 3}

    def test_self_loop_integrator(self):
        # y' = v + k y gives coefficients k^n on x0^n x1
        k = Fraction(2, 5)
        x1 = Series(1, 1, {(1,): 1})
        net = NetworkSpec(1, [[k]], [x1])
        d = io_map(net, 1, 1, 6)
        assert dict(d.terms) == {(0,) * n + (1,): k**n for n in range(6)}

    def test_stabilization_check_passes(self):
        net = four_node_net(1, Fraction(1, 2), Fraction(1, 3), 1)
        d = closed_loop_series(net, 1, 5, check_stabilization=True)
        assert d[4].exact_to == 5

    def test_four_node_difference_of_products(self):
        w21, w31, w42, w43 = (
            Fraction(1, 2),
            Fraction(2, 3),
            Fraction(3, 4),
            Fraction(1, 5),
        )
        net = four_node_net(w21, w31, w42, w43)
        d41 = io_map(net, 1, 4, 3)
        assert dict(d41.terms) == {(0, 0, 1): w42 * w21 - w43 * w31}

    def test_degenerate_four_node_vanishes(self):
        net = four_node_net(1, 1, Fraction(1, 2), Fraction(1, 2))
        d41 = io_map(net, 1, 4, 6)
        assert d41.is_zero()
        assert d41.exact_to == 6

    def test_maximal_net_node_symmetry(self):
        net = all_ones_maximal(3)
        d = closed_loop_series(net, 1, 4)
        assert d[2] == d[3]

    def test_natural_response_matches_envelope_recursion(self):
        for m in (1, 2, 3):
            net = all_ones_maximal(m)
            assert natural_response(net, 1, 6) == list(abel_taylor(m, 1, 1, 6).a)

    def test_natural_response_input_independent(self):
        net = double_diamond_net()
        d1 = closed_loop_series(net, 1, 4)[5]
        d3 = closed_loop_series(net, 3, 4)[5]
        drift = [(0,) * k for k in range(5)]
        assert [d1.coeff(w) for w in drift] == [d3.coeff(w) for w in drift]


class TestSubgraph:
    def test_single_node_pair(self):
        net = integrator_chain([1])
        sub = subgraph_extract(net, 2, 2)
        assert sub.nodes == frozenset({2})
        assert sub.edges == frozenset()

    def test_no_path_is_empty(self):
        net = integrator_chain([1, 1])
        sub = subgraph_extract(net, 3, 1)
        assert sub.is_empty()

    def test_chain_subgraph(self):
        net = integrator_chain([1, 1, 1])
        sub = subgraph_extract(net, 1, 3)
        assert sub.nodes == frozenset({1, 2, 3})
        assert sub.edges == frozenset({(1, 2), (2, 3)})

    def test_return_edge_excluded(self):
        net = double_diamond_net()
        sub = subgraph_extract(net, 1, 7)
        assert (7, 4) not in sub.edges
        assert sub.nodes == frozenset(range(1, 8))
        assert sub.edges == frozenset(
            {(1, 2), (1, 3), (2, 4), (3, 4), (2, 5), (4, 5), (4, 6), (5, 7), (6, 7)}
        )

    def test_budget_enforced(self):
        net = double_diamond_net()
        with pytest.raises(SubgraphBudgetError):
            subgraph_extract(net, 1, 7, node_budget=3)

    def test_restriction_zeroes_off_path_weights(self):
        net = double_diamond_net()
        sub = subgraph_extract(net, 1, 7)
        cut = restrict_to_subgraph(net, sub)
        assert cut.weight(4, 7) == 0
        assert cut.weight(4, 2) == 1
        assert cut.nodes == net.nodes


class TestJson:
    def test_roundtrip_polynomial(self):
        net = four_node_net(Fraction(1, 2), 1, Fraction(2, 7), Fraction(3, 5))
        doc = network_to_json(net)
        back = network_from_json(doc)
        assert back.W == net.W
        # reserialization is the identity; container degrees may differ
        assert network_to_json(back) == doc
        for mine, theirs in zip(net.nodes, back.nodes):
            assert dict(mine.terms) == dict(theirs.terms)

    def test_roundtrip_maximal(self):
        net = all_ones_maximal(2, K=Fraction(3, 2), M=2)
        doc = network_to_json(net)
        assert doc["nodes"][0] == {"kind": "maximal", "K": "3/2", "M": "2"}
        back = network_from_json(doc)
        assert back.nodes[0] == MaximalSeriesSpec(Fraction(3, 2), 2)
