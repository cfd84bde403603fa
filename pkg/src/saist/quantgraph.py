"""Weighted-digraph algorithms: minimum/maximum mean cycle, SCCs, attractor bound.

Cycle means are exact rationals throughout; weights are scaled to integers
internally so Karp's recurrence runs on int64 arrays.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import networkx as nx
import numpy as np

from .errors import ConfigError

_INF = np.int64(2**62)


@dataclass(frozen=True)
class WeightedGraph:
    """Vertices 0..n-1 with hashable labels and weighted directed edges.

    For simple weighted transition systems the weight of every outgoing edge
    of u equals the output of u; that convention is produced by callers, not
    enforced here.
    """

    labels: tuple
    edges: tuple  # (src, dst, Fraction)

    def __post_init__(self):
        n = len(self.labels)
        out = [0] * n
        for u, v, _ in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ConfigError("edge endpoint out of range")
            out[u] += 1
        if any(o == 0 for o in out):
            raise ConfigError("graph must be non-blocking (every vertex needs a successor)")
        object.__setattr__(
            self,
            "edges",
            tuple((u, v, Fraction(w)) for u, v, w in self.edges),
        )

    @property
    def n(self):
        return len(self.labels)

    def successors(self):
        adj = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            adj[u].append(v)
        return adj

    def negated(self):
        return WeightedGraph(self.labels, tuple((u, v, -w) for u, v, w in self.edges))


@dataclass(frozen=True)
class CycleResult:
    value: Fraction
    cycle: tuple  # vertex indices, canonical rotation

    def word(self, graph: WeightedGraph):
        return tuple(graph.labels[v] for v in self.cycle)


def _label_key(label):
    # labels may mix types (e.g. after simplify_wts); compare via str
    return str(label)


def canonical_rotation(cycle, keys):
    """Rotation of `cycle` minimizing the key sequence (ties by vertex ids)."""
    m = len(cycle)
    best = None
    for r in range(m):
        rot = cycle[r:] + cycle[:r]
        cand = (tuple(_label_key(keys[v]) for v in rot), tuple(rot))
        if best is None or cand < best:
            best = cand
    return tuple(best[1])


def tarjan_scc(n, adj):
    """Iterative Tarjan; returns components in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def _int_weights(graph):
    den = lcm(*[w.denominator for _, _, w in graph.edges]) if graph.edges else 1
    ints = [int(w * den) for _, _, w in graph.edges]
    return ints, den


def _karp_component(comp, edges, weights):
    """Exact min cycle mean (as Fraction over the int weights) within one SCC."""
    comp_set = set(comp)
    idx = {v: i for i, v in enumerate(comp)}
    es = [
        (idx[u], idx[v], w)
        for (u, v, _), w in zip(edges, weights)
        if u in comp_set and v in comp_set
    ]
    if not es:
        return None
    nv = len(comp)
    src = np.array([e[0] for e in es], dtype=np.int64)
    dst = np.array([e[1] for e in es], dtype=np.int64)
    w = np.array([e[2] for e in es], dtype=np.int64)
    d = np.full((nv + 1, nv), _INF, dtype=np.int64)
    d[0, 0] = 0
    for k in range(1, nv + 1):
        prev = d[k - 1][src]
        cand = np.where(prev >= _INF, _INF, prev + w)
        row = np.full(nv, _INF, dtype=np.int64)
        np.minimum.at(row, dst, cand)
        d[k] = row
    best = None
    for v in range(nv):
        dn = int(d[nv, v])
        if dn >= _INF:
            continue
        worst = None
        for k in range(nv):
            dk = int(d[k, v])
            if dk >= _INF:
                continue
            cand = Fraction(dn - dk, nv - k)
            if worst is None or cand > worst:
                worst = cand
        if worst is not None and (best is None or worst < best):
            best = worst
    return best


def _tight_subgraph(graph, weights_int, mu_int):
    """Edges on shortest-path-tight positions under weights reduced by mu.

    Every cycle of the returned subgraph has mean exactly mu.
    """
    p, q = mu_int.numerator, mu_int.denominator
    n = graph.n
    src = np.array([u for u, _, _ in graph.edges], dtype=np.int64)
    dst = np.array([v for _, v, _ in graph.edges], dtype=np.int64)
    w = np.array([q * wi - p for wi in weights_int], dtype=np.int64)
    d = np.zeros(n, dtype=np.int64)  # super-source potentials
    for _ in range(n):
        cand = d[src] + w
        nd = d.copy()
        np.minimum.at(nd, dst, cand)
        if np.array_equal(nd, d):
            break
        d = nd
    tight = d[src] + w == d[dst]
    return [(int(u), int(v)) for u, v, t in zip(src, dst, tight) if t]


def _find_cycle(n, edges, labels):
    """Deterministic DFS cycle search; neighbor order by (label, vertex)."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
    for u in range(n):
        adj[u].sort(key=lambda v: (_label_key(labels[v]), v))
    color = [0] * n
    for root in sorted(range(n), key=lambda v: (_label_key(labels[v]), v)):
        if color[root]:
            continue
        stack = [(root, iter(adj[root]))]
        path = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            found = False
            for nxt in it:
                if color[nxt] == 1:
                    i = path.index(nxt)
                    return path[i:]
                if color[nxt] == 0:
                    color[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(adj[nxt])))
                    found = True
                    break
            if not found:
                color[v] = 2
                path.pop()
                stack.pop()
    return None


def min_mean_cycle(graph: WeightedGraph) -> CycleResult:
    """Karp's recurrence per SCC; exact rational value; canonical cycle."""
    results = min_mean_cycles(graph, max_cycles=1)
    return results[0]


def min_mean_cycles(graph: WeightedGraph, max_cycles=32):
    """All (up to max_cycles) canonical-rotation-distinct minimum mean cycles."""
    weights_int, den = _int_weights(graph)
    adj = graph.successors()
    comps = tarjan_scc(graph.n, adj)
    mu = None
    for comp in comps:
        cand = _karp_component(comp, graph.edges, weights_int)
        if cand is not None and (mu is None or cand < mu):
            mu = cand
    if mu is None:
        raise ConfigError("graph has no cycle; non-blocking graphs always do")
    tight = _tight_subgraph(graph, weights_int, mu)
    value = mu / den
    found = {}
    if max_cycles <= 1:
        cyc = _find_cycle(graph.n, tight, graph.labels)
        canon = canonical_rotation(cyc, graph.labels)
        return [CycleResult(value=value, cycle=canon)]
    g = nx.DiGraph(tight)
    for cyc in nx.simple_cycles(g):
        canon = canonical_rotation(tuple(cyc), graph.labels)
        found[canon] = CycleResult(value=value, cycle=canon)
        if len(found) >= max_cycles:
            break
    ordered = sorted(
        found.values(),
        key=lambda r: (tuple(_label_key(graph.labels[v]) for v in r.cycle), r.cycle),
    )
    return ordered


def max_mean_cycle(graph: WeightedGraph) -> CycleResult:
    res = min_mean_cycle(graph.negated())
    return CycleResult(value=-res.value, cycle=res.cycle)


def attracting_scc_bound(graph: WeightedGraph) -> Fraction:
    """Smallest maximum cycle mean over attracting SCCs: an upper bound on the
    concrete system's smallest limit average."""
    adj = graph.successors()
    comps = tarjan_scc(graph.n, adj)
    best = None
    for comp in comps:
        comp_set = set(comp)
        if any(v not in comp_set for u in comp for v in adj[u]):
            continue  # edges escape: not attracting
        sub_idx = {v: i for i, v in enumerate(comp)}
        sub = WeightedGraph(
            labels=tuple(graph.labels[v] for v in comp),
            edges=tuple(
                (sub_idx[u], sub_idx[v], w)
                for u, v, w in graph.edges
                if u in comp_set and v in comp_set
            ),
        )
        val = max_mean_cycle(sub).value
        if best is None or val < best:
            best = val
    return best


def simplify_wts(graph: WeightedGraph) -> WeightedGraph:
    """Convert an arbitrary WTS into a simple one via artificial states.

    Each weight-distinct outgoing edge group of a vertex gains an artificial
    relay with a zero-weight first hop, so every limit average halves.
    Already-simple graphs are returned unchanged.
    """
    by_src = {}
    for u, v, w in graph.edges:
        by_src.setdefault(u, {}).setdefault(w, []).append(v)
    if all(len(groups) == 1 for groups in by_src.values()):
        return graph
    labels = list(graph.labels)
    edges = []
    for u in range(graph.n):
        for w, targets in sorted(by_src[u].items()):
            relay = len(labels)
            labels.append((graph.labels[u], w))
            edges.append((u, relay, Fraction(0)))
            for v in targets:
                edges.append((relay, v, w))
    return WeightedGraph(labels=tuple(labels), edges=tuple(edges))
