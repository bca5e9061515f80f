"""Additive networks of single-input systems and their closed-loop series.

A network couples m nodes, each a generating series over {x0, x1}, through
u_k = v_k + sum_l W[k][l] y_l: entry W[k][l] weights the edge from node l
into node k. The closed-loop series d_ki generates the map v_i -> y_k with
all other external inputs held at zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

from .compose import compose_at, compose_maximal
from .errors import (
    DomainError,
    FliessnetError,
    NodeIndexError,
    ParseError,
    SubgraphBudgetError,
)
from .series import (
    Coeff,
    MaximalSeriesSpec,
    Series,
    as_coeff,
    coeff_str,
    linear_combine,
    series_from_json,
    series_to_json,
)

NodeSource = Union[Series, MaximalSeriesSpec]


@dataclass
class NetworkSpec:
    """m nodes, an m-by-m weight matrix, and one series source per node.

    Weights are exact rationals; negative weights are rejected and weights
    above 1 draw a warning (the convergence bounds assume [0, 1]).
    """

    m: int
    W: list[list[Coeff]]
    nodes: list[NodeSource] = field(default_factory=list)

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("a network needs at least one node")
        if len(self.W) != self.m or any(len(row) != self.m for row in self.W):
            raise DomainError(f"weight matrix must be {self.m}x{self.m}")
        if len(self.nodes) != self.m:
            raise DomainError(f"expected {self.m} node series, got {len(self.nodes)}")
        self.W = [[as_coeff(w) for w in row] for row in self.W]
        for row in self.W:
            for w in row:
                if w < 0:
                    raise DomainError("negative interconnection weights are not supported")
                if w > 1:
                    warnings.warn(
                        "interconnection weight above 1; growth bounds assume [0, 1]",
                        stacklevel=2,
                    )
        for node in self.nodes:
            if isinstance(node, Series):
                if node.m != 1:
                    raise DomainError("node series must use the alphabet {x0, x1}")
            elif not isinstance(node, MaximalSeriesSpec):
                raise DomainError(f"unsupported node source {type(node).__name__}")

    # Node indices are 1-based throughout the public surface.

    def check_node(self, k: int) -> None:
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= self.m:
            raise NodeIndexError(f"node index {k} outside 1..{self.m}")

    def weight(self, k: int, l: int) -> Coeff:
        """Weight on the edge from node l into node k."""
        self.check_node(k)
        self.check_node(l)
        return self.W[k - 1][l - 1]

    def node(self, k: int) -> NodeSource:
        self.check_node(k)
        return self.nodes[k - 1]

    def node_series(self, k: int, degree: int) -> Series:
        """Node k expanded to the requested truncation degree.

        Explicit node series are polynomials, hence exact at every degree.
        """
        src = self.node(k)
        if isinstance(src, MaximalSeriesSpec):
            return src.expand(1, degree)
        if src.max_degree > degree:
            return src.truncate(degree)
        return src.extended(degree, exact_to=degree)

    def edges(self, include_self: bool = True):
        """Yield (l, k) for every nonzero weight W[k][l], i.e. edge l -> k."""
        for k in range(1, self.m + 1):
            for l in range(1, self.m + 1):
                if (include_self or k != l) and self.W[k - 1][l - 1] != 0:
                    yield (l, k)

    def all_maximal(self) -> bool:
        return all(isinstance(n, MaximalSeriesSpec) for n in self.nodes)

    def all_polynomial(self) -> bool:
        return all(isinstance(n, Series) for n in self.nodes)


def _sweep(net: NetworkSpec, i: int, prev: dict[int, Series], target: int) -> dict[int, Series]:
    out: dict[int, Series] = {}
    for k in range(1, net.m + 1):
        pairs = []
        row = net.W[k - 1]
        for l in range(1, net.m + 1):
            w = row[l - 1]
            if w != 0:
                pairs.append((w, prev[l]))
        # A node with no incoming edges has feedback that is structurally
        # zero, hence exact to any degree the sweep asks for.
        feedback = linear_combine(pairs) if pairs else Series.zero(1, target)
        mixed = k == i
        src = net.nodes[k - 1]
        if isinstance(src, MaximalSeriesSpec):
            out[k] = compose_maximal(src, feedback, target, mixed)
        else:
            out[k] = compose_at(net.node_series(k, target), feedback, target, mixed)
    return out


def closed_loop_series(
    net: NetworkSpec, i: int, degree: int, check_stabilization: bool = False
) -> dict[int, Series]:
    """All closed-loop series d_ki for the single external input v_i.

    The map is the fixed point of d_k = c_k o (sum_l W[k][l] d_l), with the
    mixed product at k = i carrying the direct channel. Substitution prepends
    at least one letter, so sweep t is exact through degree t - 1; sweeping
    to degree + 1 freezes everything up to the requested truncation. Each
    sweep runs truncated to the degrees it can actually settle.
    """
    net.check_node(i)
    if degree < 0:
        raise DomainError("truncation degree must be >= 0")
    d = {k: Series.zero(1, 0) for k in range(1, net.m + 1)}
    for t in range(1, degree + 2):
        d = _sweep(net, i, d, t - 1)
    if check_stabilization:
        again = _sweep(net, i, d, degree)
        if any(again[k] != d[k] for k in d):
            raise FliessnetError("closed-loop fixed point failed to stabilize")
    return d


def io_map(net: NetworkSpec, i: int, j: int, degree: int) -> Series:
    """Generating series of v_i -> y_j, exact through the truncation degree."""
    net.check_node(j)
    return closed_loop_series(net, i, degree)[j]


def natural_response(net: NetworkSpec, j: int, degree: int) -> list[Coeff]:
    """Zero-input output derivatives a_k = <d_j, x0^k> at node j.

    The drift-only coefficients are shared by every d_ji, so any input
    channel gives the same answer.
    """
    d = closed_loop_series(net, j, degree)[j]
    return [d.coeff((0,) * k) for k in range(degree + 1)]


@dataclass(frozen=True)
class Subgraph:
    """Nodes and edges lying on at least one simple forward path source -> sink."""

    source: int
    sink: int
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]

    def is_empty(self) -> bool:
        return not self.nodes

    def predecessors(self, v: int) -> list[int]:
        return sorted(u for (u, w) in self.edges if w == v)


def subgraph_extract(net: NetworkSpec, i: int, j: int, node_budget: int = 24) -> Subgraph:
    """Forward-path subgraph G_ji by exhaustive simple-path enumeration.

    Self-loops never lie on a simple path and are dropped up front. The
    candidate set (reachable from i, co-reachable to j) is capped by
    node_budget before enumeration since path counts grow combinatorially.
    """
    net.check_node(i)
    net.check_node(j)
    if i == j:
        return Subgraph(i, j, frozenset({i}), frozenset())
    succ: dict[int, list[int]] = {k: [] for k in range(1, net.m + 1)}
    pred: dict[int, list[int]] = {k: [] for k in range(1, net.m + 1)}
    for l, k in net.edges(include_self=False):
        succ[l].append(k)
        pred[k].append(l)

    def closure(start: int, neighbors: dict[int, list[int]]) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            for nxt in neighbors[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    candidates = closure(i, succ) & closure(j, pred)
    if i not in candidates or j not in candidates:
        return Subgraph(i, j, frozenset(), frozenset())
    if len(candidates) > node_budget:
        raise SubgraphBudgetError(
            f"{len(candidates)} candidate nodes exceed the budget of {node_budget}"
        )

    on_nodes: set[int] = set()
    on_edges: set[tuple[int, int]] = set()
    path: list[int] = [i]
    visited = {i}

    def dfs(u: int) -> None:
        if u == j:
            on_nodes.update(path)
            on_edges.update(zip(path, path[1:]))
            return
        for nxt in succ[u]:
            if nxt in candidates and nxt not in visited:
                visited.add(nxt)
                path.append(nxt)
                dfs(nxt)
                path.pop()
                visited.remove(nxt)

    dfs(i)
    return Subgraph(i, j, frozenset(on_nodes), frozenset(on_edges))


def restrict_to_subgraph(net: NetworkSpec, sub: Subgraph) -> NetworkSpec:
    """Copy of the network with every weight off the subgraph edges zeroed."""
    W = [
        [
            net.W[k][l] if (l + 1, k + 1) in sub.edges else 0
            for l in range(net.m)
        ]
        for k in range(net.m)
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NetworkSpec(net.m, W, list(net.nodes))


# -- JSON ------------------------------------------------------------------------


def _node_to_json(node: NodeSource) -> dict:
    if isinstance(node, MaximalSeriesSpec):
        return {"kind": "maximal", "K": coeff_str(node.K), "M": coeff_str(node.M)}
    return {"kind": "poly", "terms": series_to_json(node)["terms"]}


def _node_from_json(doc: dict) -> NodeSource:
    try:
        kind = doc["kind"]
    except (KeyError, TypeError) as exc:
        raise ParseError("node entry missing 'kind'") from exc
    if kind == "maximal":
        try:
            return MaximalSeriesSpec(as_coeff(doc["K"]), as_coeff(doc["M"]))
        except KeyError as exc:
            raise ParseError("maximal node needs K and M") from exc
    if kind == "poly":
        entries = doc.get("terms", [])
        degree = 0
        for entry in entries:
            try:
                degree = max(degree, len(entry["word"]))
            except (KeyError, TypeError) as exc:
                raise ParseError(f"malformed node term {entry!r}") from exc
        return series_from_json({"m": 1, "degree": degree, "terms": entries})
    raise ParseError(f"unknown node kind {kind!r}")


def network_to_json(net: NetworkSpec) -> dict:
    return {
        "m": net.m,
        "W": [[coeff_str(w) for w in row] for row in net.W],
        "nodes": [_node_to_json(node) for node in net.nodes],
    }


def network_from_json(doc: dict) -> NetworkSpec:
    try:
        m = int(doc["m"])
        W = doc["W"]
        nodes = doc["nodes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed network document: {exc}") from exc
    if not isinstance(W, list) or not isinstance(nodes, list):
        raise ParseError("network W and nodes must be arrays")
    return NetworkSpec(m, W, [_node_from_json(n) for n in nodes])
