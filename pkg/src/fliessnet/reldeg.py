"""Relative degree: measurement, structural prediction, and genericity sampling.

A SISO series with a well-defined relative degree r has the shape
c = (natural part) + K x0^(r-1) x1 + (terms with more leading drift letters
or deeper non-drift structure). Measurement reads r off a truncated series;
prediction composes per-node degrees along the forward-path subgraph and
certifies the result with one of three structural conditions.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import AlphabetError, ConditionError, DomainError
from .network import (
    NetworkSpec,
    Subgraph,
    closed_loop_series,
    restrict_to_subgraph,
    subgraph_extract,
)
from .series import Coeff, MaximalSeriesSpec, Series, as_coeff
from .words import Word, leading_zeros

STATUS_DEFINED = "defined"
STATUS_UNDEFINED = "undefined"
STATUS_UNDETERMINED = "undetermined_at_truncation"

CONDITION_FULLY_CONNECTED = "fully_connected"
CONDITION_DISTINCT = "distinct"
CONDITION_REPEATED_SUM = "repeated_sum_nonzero"
CONDITION_UNKNOWN = "violated_unknown"


@dataclass(frozen=True)
class RelDegReport:
    """Outcome of measuring the relative degree of one truncated series."""

    status: str
    r: Optional[int]
    leading: Optional[Coeff]
    truncation: int

    def require_defined(self) -> tuple[int, Coeff]:
        if self.status != STATUS_DEFINED:
            raise ConditionError(f"relative degree is {self.status}")
        assert self.r is not None and self.leading is not None
        return self.r, self.leading


def relative_degree(c: Series) -> RelDegReport:
    """Measure the relative degree of a SISO series from its exact part.

    Words consisting only of the drift letter (the natural response) carry no
    information about the input path, so they are ignored. The minimum count
    rho of leading drift letters over the remaining support fixes the
    candidate r = rho + 1; it is certified iff the coefficient of
    x0^rho x1 is nonzero, and refuted (undefined) otherwise. A series whose
    exact part shows no non-natural word at all is undetermined unless it is
    identically zero, which has no relative degree.
    """
    if c.m != 1:
        raise AlphabetError("relative degree is defined for single-input series")
    n = c.exact_to
    visible = {w: v for w, v in c.terms.items() if len(w) <= n}
    forced = [w for w in visible if any(letter != 0 for letter in w)]
    if not forced:
        if c.is_zero():
            return RelDegReport(STATUS_UNDEFINED, None, None, n)
        return RelDegReport(STATUS_UNDETERMINED, None, None, n)
    rho = min(leading_zeros(w) for w in forced)
    lead = visible.get((0,) * rho + (1,), 0)
    if lead != 0:
        return RelDegReport(STATUS_DEFINED, rho + 1, lead, n)
    return RelDegReport(STATUS_UNDEFINED, None, None, n)


def sum_reldeg_predict(reports: Sequence[RelDegReport]) -> RelDegReport:
    """Relative degree of a sum of series, from their individual reports.

    The minimal degree controls the sum: a unique minimum passes through
    unchanged, and a tied minimum survives exactly when the tied leading
    coefficients do not cancel.
    """
    if not reports:
        raise ConditionError("sum over an empty family")
    truncation = min(rep.truncation for rep in reports)
    if any(rep.status == STATUS_UNDETERMINED for rep in reports):
        return RelDegReport(STATUS_UNDETERMINED, None, None, truncation)
    if any(rep.status == STATUS_UNDEFINED for rep in reports):
        return RelDegReport(STATUS_UNDEFINED, None, None, truncation)
    r_min = min(rep.r for rep in reports)  # type: ignore[type-var]
    lead = sum(rep.leading for rep in reports if rep.r == r_min)  # type: ignore[misc]
    if lead != 0:
        return RelDegReport(STATUS_DEFINED, r_min, as_coeff(lead), truncation)
    return RelDegReport(STATUS_UNDEFINED, None, None, truncation)


@dataclass(frozen=True)
class AccumulatedDegrees:
    """Shortest node-weighted path lengths r_plus from the source, plus the
    per-node list of (predecessor, predecessor r_plus) pairs that feed it."""

    source: int
    r_plus: dict[int, int]
    incoming: dict[int, tuple[tuple[int, int], ...]]


def accumulated_degrees(sub: Subgraph, node_degrees: dict[int, int]) -> AccumulatedDegrees:
    """Dijkstra with node weights: r_plus[v] = r_v + min over predecessors."""
    if sub.is_empty():
        raise ConditionError("accumulated degrees need a nonempty forward-path subgraph")
    for v in sub.nodes:
        r = node_degrees.get(v)
        if r is None or r < 1:
            raise ConditionError(f"node {v} lacks a positive relative degree")
    succ: dict[int, list[int]] = defaultdict(list)
    for u, v in sub.edges:
        succ[u].append(v)
    dist: dict[int, int] = {}
    heap: list[tuple[int, int]] = [(node_degrees[sub.source], sub.source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for v in succ[u]:
            if v not in dist:
                heapq.heappush(heap, (d + node_degrees[v], v))
    incoming = {
        v: tuple(
            sorted((u, dist[u]) for u in sub.predecessors(v))
        )
        for v in sub.nodes
        if sub.predecessors(v)
    }
    return AccumulatedDegrees(sub.source, dist, incoming)


@dataclass(frozen=True)
class PredictionReport:
    """Structural prediction for one source/sink pair."""

    source: int
    sink: int
    r_pred: Optional[int]
    condition: str
    node_degrees: dict[int, int]
    details: dict = field(default_factory=dict)


def node_degree_report(net: NetworkSpec, k: int) -> RelDegReport:
    """Relative degree of node k's own series."""
    src = net.node(k)
    if isinstance(src, MaximalSeriesSpec):
        return RelDegReport(STATUS_DEFINED, 1, as_coeff(Fraction(src.K) * Fraction(src.M)), 1)
    return relative_degree(src)


def _repeated_groups(acc: AccumulatedDegrees) -> dict[int, dict[int, list[int]]]:
    repeated: dict[int, dict[int, list[int]]] = {}
    for v, pairs in acc.incoming.items():
        by_value: dict[int, list[int]] = defaultdict(list)
        for u, value in pairs:
            by_value[value].append(u)
        ties = {value: preds for value, preds in by_value.items() if len(preds) > 1}
        if ties:
            repeated[v] = ties
    return repeated


def predict_io_reldeg(
    net: NetworkSpec,
    i: int,
    j: int,
    n_for_conditions: Optional[int] = None,
    node_budget: int = 24,
) -> PredictionReport:
    """Predict the relative degree of the map from an input at node i to the
    output of node j, with a certificate naming the condition that holds.

    Certificates, in order of strength:
      fully_connected     sink j receives an edge from every other node, so
                          every input path is dominated by r_j + r_i;
      distinct            along the forward-path subgraph every node sees
                          pairwise distinct accumulated degrees, so the
                          shortest one survives with a nonzero coefficient;
      repeated_sum_nonzero ties exist but each tied group's weighted leading
                          coefficients sum to a nonzero value (checked on the
                          restriction of the network to the subgraph);
      violated_unknown    a tie cancels, or no forward path exists; r_pred is
                          the shortest-path value when a path exists, else None.
    """
    net.check_node(i)
    net.check_node(j)
    if i == j:
        r, lead = node_degree_report(net, i).require_defined()
        return PredictionReport(
            i, j, r, CONDITION_DISTINCT, {i: r}, {"self_pair": True, "leading": lead}
        )
    sub = subgraph_extract(net, i, j, node_budget=node_budget)
    if sub.is_empty():
        return PredictionReport(i, j, None, CONDITION_UNKNOWN, {}, {"no_forward_path": True})
    degrees: dict[int, int] = {}
    for v in sorted(sub.nodes):
        r, _ = node_degree_report(net, v).require_defined()
        degrees[v] = r
    if all(net.weight(j, k) != 0 for k in range(1, net.m + 1) if k != j):
        return PredictionReport(
            i,
            j,
            degrees[j] + degrees[i],
            CONDITION_FULLY_CONNECTED,
            degrees,
            {},
        )
    acc = accumulated_degrees(sub, degrees)
    details = {"accumulated": dict(acc.r_plus), "incoming": dict(acc.incoming)}
    r_pred = acc.r_plus[j]
    repeated = _repeated_groups(acc)
    if not repeated:
        return PredictionReport(i, j, r_pred, CONDITION_DISTINCT, degrees, details)
    needed = max(value for ties in repeated.values() for value in ties)
    n_cond = needed if n_for_conditions is None else n_for_conditions
    if n_cond < needed:
        raise ConditionError(
            f"checking repeated sums at degree {n_cond} needs at least {needed}"
        )
    restricted = restrict_to_subgraph(net, sub)
    d_sub = closed_loop_series(restricted, i, n_cond)
    sums: dict[str, Coeff] = {}
    all_nonzero = True
    for v, ties in sorted(repeated.items()):
        for value, preds in sorted(ties.items()):
            word = (0,) * (value - 1) + (1,)
            total = sum(
                Fraction(net.weight(v, u)) * Fraction(d_sub[u].coeff(word)) for u in preds
            )
            sums[f"node {v} at degree {value}"] = as_coeff(total)
            if total == 0:
                all_nonzero = False
    details["repeated_sums"] = sums
    condition = CONDITION_REPEATED_SUM if all_nonzero else CONDITION_UNKNOWN
    return PredictionReport(i, j, r_pred, condition, degrees, details)


@dataclass(frozen=True)
class PairReport:
    source: int
    sink: int
    measured: RelDegReport
    predicted: Optional[PredictionReport]
    prediction_error: Optional[str]
    consistent: Optional[bool]


def _consistency(measured: RelDegReport, predicted: Optional[PredictionReport]) -> Optional[bool]:
    if predicted is None or predicted.r_pred is None:
        return None
    if predicted.condition == CONDITION_UNKNOWN:
        return None
    if measured.status == STATUS_DEFINED:
        return measured.r == predicted.r_pred
    if measured.status == STATUS_UNDETERMINED:
        # The prediction lies beyond the horizon, so nothing contradicts it.
        return None if predicted.r_pred > measured.truncation else False
    return False


def complete_reldeg(
    net: NetworkSpec,
    degree: int,
    include_predictions: bool = True,
    node_budget: int = 24,
) -> dict[tuple[int, int], PairReport]:
    """Measure (and optionally predict) the relative degree of every pair."""
    out: dict[tuple[int, int], PairReport] = {}
    for i in range(1, net.m + 1):
        closed = closed_loop_series(net, i, degree)
        for j in range(1, net.m + 1):
            measured = relative_degree(closed[j])
            predicted = None
            error = None
            if include_predictions:
                try:
                    predicted = predict_io_reldeg(net, i, j, node_budget=node_budget)
                except (ConditionError, DomainError) as exc:
                    error = str(exc)
            out[(i, j)] = PairReport(
                i, j, measured, predicted, error, _consistency(measured, predicted)
            )
    return out


@dataclass(frozen=True)
class GenericityStats:
    """Aggregate of a seeded Monte Carlo sweep over random edge weights."""

    seed: int
    samples: int
    degree: int
    pair_status: dict[tuple[int, int], dict[str, int]]
    pair_r: dict[tuple[int, int], dict[int, int]]
    designated: Optional[tuple[int, int, Word]]
    values: tuple[float, ...]
    histogram: tuple[tuple[float, float, int], ...]


def sample_network(
    pattern: Sequence[Sequence[int]],
    nodes: Sequence[Union[Series, MaximalSeriesSpec]],
    seed: int,
    index: int,
) -> NetworkSpec:
    """Network with the given sparsity pattern and weights drawn uniformly
    from (0, 1], one independent stream per (seed, index) pair."""
    m = len(nodes)
    if len(pattern) != m or any(len(row) != m for row in pattern):
        raise DomainError("pattern must be an m-by-m 0/1 matrix")
    rng = np.random.default_rng([seed, index])
    W: list[list[Coeff]] = [[0] * m for _ in range(m)]
    for r in range(m):
        for c in range(m):
            if pattern[r][c]:
                W[r][c] = as_coeff(1.0 - rng.random())
    return NetworkSpec(m, W, list(nodes))


def _genericity_chunk(args) -> tuple[dict, dict, list[float]]:
    pattern, nodes, seed, indices, degree, designated = args
    m = len(nodes)
    status: dict[tuple[int, int], Counter] = defaultdict(Counter)
    r_counts: dict[tuple[int, int], Counter] = defaultdict(Counter)
    values: list[float] = []
    for idx in indices:
        net = sample_network(pattern, nodes, seed, idx)
        for i in range(1, m + 1):
            closed = closed_loop_series(net, i, degree)
            for j in range(1, m + 1):
                rep = relative_degree(closed[j])
                status[(i, j)][rep.status] += 1
                if rep.status == STATUS_DEFINED:
                    r_counts[(i, j)][rep.r] += 1
            if designated is not None and i == designated[0]:
                coeff = closed[designated[1]].coeff(tuple(designated[2]))
                values.append(abs(float(Fraction(coeff))))
    return dict(status), dict(r_counts), values


def genericity_sample(
    pattern: Sequence[Sequence[int]],
    nodes: Sequence[Union[Series, MaximalSeriesSpec]],
    samples: int,
    seed: int,
    degree: int,
    designated: Optional[tuple[int, int, Sequence[int]]] = None,
    bins: int = 40,
    jobs: int = 1,
) -> GenericityStats:
    """Measure relative degrees across seeded random weight draws.

    The result is a deterministic function of (pattern, nodes, samples, seed,
    degree): each sample index owns an independent RNG stream, so the job
    count changes only the wall time.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    designated_key: Optional[tuple[int, int, Word]] = None
    if designated is not None:
        designated_key = (designated[0], designated[1], tuple(designated[2]))
    chunks: list[Sequence[int]]
    if jobs > 1:
        bounds = np.array_split(np.arange(samples), jobs)
        chunks = [chunk.tolist() for chunk in bounds if len(chunk)]
    else:
        chunks = [list(range(samples))]
    payloads = [
        (pattern, list(nodes), seed, chunk, degree, designated_key) for chunk in chunks
    ]
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_genericity_chunk, payloads))
    else:
        parts = [_genericity_chunk(p) for p in payloads]
    status: dict[tuple[int, int], Counter] = defaultdict(Counter)
    r_counts: dict[tuple[int, int], Counter] = defaultdict(Counter)
    values: list[float] = []
    for part_status, part_r, part_values in parts:
        for key, counter in part_status.items():
            status[key].update(counter)
        for key, counter in part_r.items():
            r_counts[key].update(counter)
        values.extend(part_values)
    histogram: tuple[tuple[float, float, int], ...] = ()
    if values:
        counts, edges = np.histogram(np.asarray(values), bins=bins)
        histogram = tuple(
            (float(edges[b]), float(edges[b + 1]), int(counts[b])) for b in range(len(counts))
        )
    return GenericityStats(
        seed=seed,
        samples=samples,
        degree=degree,
        pair_status={k: dict(v) for k, v in sorted(status.items())},
        pair_r={k: dict(sorted(v.items())) for k, v in sorted(r_counts.items())},
        designated=designated_key,
        values=tuple(values),
        histogram=histogram,
    )
