"""Traffic abstractions of PETC sampling behavior.

States are feasible IST words; transitions follow the domino rule (uniform
length) or its prefix-compatible generalization (mixed lengths after targeted
refinement).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyRefinement
from .quantgraph import WeightedGraph


@dataclass(frozen=True)
class TrafficAbstraction:
    """States: lexicographically ordered tuple of IST words (tuples of ints)."""

    states: tuple
    transitions: tuple  # (src word, dst word) pairs
    depth: int

    def output(self, word):
        return word[0]

    @property
    def n_states(self):
        return len(self.states)

    def successors(self, word):
        return tuple(w for v, w in self.transitions if v == word)

    def as_weighted_graph(self) -> WeightedGraph:
        """Simple-WTS form: every edge out of u weighs output(u)."""
        idx = {w: i for i, w in enumerate(self.states)}
        edges = tuple(
            (idx[u], idx[v], Fraction(self.output(u))) for u, v in self.transitions
        )
        return WeightedGraph(labels=self.states, edges=edges)

    def to_dot(self) -> str:
        lines = ["digraph abstraction {"]
        idx = {w: i for i, w in enumerate(self.states)}
        for i, w in enumerate(self.states):
            label = ",".join(str(k) for k in w)
            lines.append(f'  s{i} [label="({label})" weight={w[0]}];')
        for u, v in self.transitions:
            lines.append(f"  s{idx[u]} -> s{idx[v]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _query_words(oracle, words, workers):
    """Feasibility for many words; results in input order regardless of schedule."""
    words = list(words)
    if workers <= 1 or len(words) <= 1:
        return [oracle.feasible_word(w) for w in words]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(oracle.feasible_word, words))


def build_l_complete(disc, oracle, l: int, workers: int = 1) -> TrafficAbstraction:
    """Abstraction whose states are all feasible IST words of length l.

    Level j+1 candidates are w + (k,) where both w and w[1:] + (k,) passed
    level j; prefix monotonicity makes this exhaustive and it keeps the
    query count near the final edge count.
    """
    if l < 1:
        raise ValueError("depth must be >= 1")
    alphabet = list(oracle.alphabet)
    level = []
    verdicts = _query_words(oracle, [(k,) for k in alphabet], workers)
    level = [(k,) for k, v in zip(alphabet, verdicts) if v.maybe_feasible]
    for _ in range(1, l):
        prev = set(level)
        cands = [w + (k,) for w in level for k in alphabet if w[1:] + (k,) in prev]
        verdicts = _query_words(oracle, cands, workers)
        level = [w for w, v in zip(cands, verdicts) if v.maybe_feasible]
    states = tuple(sorted(level))
    return TrafficAbstraction(
        states=states, transitions=domino_transitions(states), depth=l
    )


def domino_transitions(states) -> tuple:
    """Edges (k·s, s·k') for uniform-length words; complete digraph at l=1."""
    states = tuple(states)
    if states and any(len(w) != len(states[0]) for w in states):
        raise ValueError("domino rule needs uniform word length")
    by_prefix = {}
    for w in states:
        by_prefix.setdefault(w[:-1], []).append(w)
    out = []
    for v in states:
        for w in by_prefix.get(v[1:], ()):
            out.append((v, w))
    return tuple(sorted(out))


def _prefix_compatible(v, w):
    s = v[1:]
    m = min(len(s), len(w))
    return s[:m] == w[:m]


def mixed_transitions(states) -> tuple:
    """Prefix-compatible domino for mixed-length states: edge (v, w) iff the
    1-step suffix of v and the word w agree on their common prefix."""
    states = tuple(states)
    return tuple(
        sorted((v, w) for v in states for w in states if _prefix_compatible(v, w))
    )


def refine_sac(abstraction: TrafficAbstraction, sac, oracle, workers: int = 1) -> TrafficAbstraction:
    """Split each state along the candidate cycle into its feasible one-letter
    extensions; everything else is kept as is."""
    sac = {tuple(w) for w in sac}
    unknown = sac - set(abstraction.states)
    if unknown:
        raise ValueError(f"cycle states not in abstraction: {sorted(unknown)}")
    alphabet = list(oracle.alphabet)
    new_states = []
    for w in abstraction.states:
        if w not in sac:
            new_states.append(w)
            continue
        cands = [w + (k,) for k in alphabet]
        verdicts = _query_words(oracle, cands, workers)
        kept = [c for c, v in zip(cands, verdicts) if v.maybe_feasible]
        if not kept:
            raise EmptyRefinement(
                f"word {w} has no feasible extension; oracle verdicts are inconsistent"
            )
        new_states.extend(kept)
    states = tuple(sorted(new_states))
    return TrafficAbstraction(
        states=states,
        transitions=mixed_transitions(states),
        depth=max(len(w) for w in states),
    )
