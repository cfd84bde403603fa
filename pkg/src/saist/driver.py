"""Orchestration: abstraction refinement loops, reports, and cross checks."""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .abstraction import build_l_complete, domino_transitions, refine_sac, TrafficAbstraction
from .cycle_verify import verify_cycle
from .errors import ConfigError, CrosscheckFailed
from .oracle import ConeOracle, Policy
from .petc import (
    PetcSystem,
    discretize,
    relative_error_trigger,
    simulate,
)
from .quantgraph import (
    WeightedGraph,
    attracting_scc_bound,
    canonical_rotation,
    min_mean_cycles,
)
from .smtlib import SolverClient


@dataclass
class SaistConfig:
    system: PetcSystem
    l_max: int = 50
    mode: str = "full"  # or "targeted"
    oracle: str = "hybrid"  # sampling | exact | hybrid
    solver_path: Optional[str] = None
    seed: int = 0
    budget: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("full", "targeted"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.oracle not in ("sampling", "exact", "hybrid"):
            raise ConfigError(f"unknown oracle policy {self.oracle!r}")
        if self.l_max < 1:
            raise ConfigError("l_max must be >= 1")


def _matrix(obj, name):
    try:
        m = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} is not a numeric matrix") from e
    if m.ndim != 2:
        raise ConfigError(f"{name} must be a matrix (array of arrays)")
    return m


def parse_config(data: dict, **overrides) -> SaistConfig:
    """Build a config from the JSON schema; keyword overrides win."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("A", "B", "K", "trigger", "h", "kbar"):
        if key not in data:
            raise ConfigError(f"config is missing {key!r}")
    A = _matrix(data["A"], "A")
    B = _matrix(data["B"], "B")
    K = _matrix(data["K"], "K")
    n = A.shape[0]
    if B.shape[0] != n or K.shape[1] != n or B.shape[1] != K.shape[0]:
        raise ConfigError("A, B, K dimensions are inconsistent")
    trig = data["trigger"]
    if trig.get("type") == "relative_error":
        Q = relative_error_trigger(float(trig["sigma"]), n)
    elif trig.get("type") == "quadratic":
        Q = _matrix(trig["Q"], "trigger Q")
    else:
        raise ConfigError("trigger type must be 'relative_error' or 'quadratic'")
    sys = PetcSystem(A=A, BK=B @ K, Qtrig=Q, h=float(data["h"]), kbar=int(data["kbar"]))
    kwargs = {}
    for key in ("l_max", "mode", "oracle", "solver_path", "seed", "budget", "workers"):
        if key in data:
            kwargs[key] = data[key]
    kwargs.update(overrides)
    return SaistConfig(system=sys, **kwargs)


@dataclass
class SaistReport:
    status: str  # "Verified" | "BoundsOnly"
    saist_lower: Fraction
    saist_upper: Optional[Fraction]
    sac_word: tuple
    l_reached: int
    witness: Optional[np.ndarray]
    h: float
    power: int = 1
    iterations: list = field(default_factory=list)
    dot: Optional[str] = None

    @property
    def verified(self):
        return self.status == "Verified"

    @property
    def saist(self):
        return self.saist_lower

    def to_json_dict(self, include_timing=True):
        def rat(x):
            if x is None:
                return None
            f = Fraction(x)
            return {"num": f.numerator, "den": f.denominator}

        iters = []
        for it in self.iterations:
            it = dict(it)
            it["value"] = rat(it["value"])
            if not include_timing:
                it.pop("wall_time", None)
            iters.append(it)
        return {
            "status": self.status,
            "saist_lower": rat(self.saist_lower),
            "saist_upper": rat(self.saist_upper),
            "sac": list(self.sac_word),
            "l": self.l_reached,
            "witness_basis": None if self.witness is None else self.witness.tolist(),
            "iterations": iters,
            "units": {
                "steps": {
                    "saist_lower": rat(self.saist_lower),
                    "saist_upper": rat(self.saist_upper),
                },
                "time": {
                    "saist_lower": float(self.saist_lower) * self.h,
                    "saist_upper": None
                    if self.saist_upper is None
                    else float(self.saist_upper) * self.h,
                },
            },
        }

    def to_json(self, include_timing=True):
        return json.dumps(self.to_json_dict(include_timing), indent=2, sort_keys=True)


def make_oracle(config: SaistConfig, disc=None) -> ConeOracle:
    disc = discretize(config.system) if disc is None else disc
    if config.oracle == "sampling":
        engine = None
        policy = Policy.CONSERVATIVE
    else:
        engine = (
            SolverClient(config.solver_path)
            if config.solver_path
            else "builtin"
        )
        policy = Policy.EXACT_REQUIRED
    return ConeOracle(
        disc,
        engine=engine,
        budget=config.budget,
        seed=config.seed,
        policy=policy,
    )


def _cycle_candidates(graph: WeightedGraph, max_cycles=32):
    """Minimum mean cycles grouped by distinct output word (canonical rotation)."""
    sacs = min_mean_cycles(graph, max_cycles=max_cycles)
    seen = {}
    for res in sacs:
        outputs = tuple(graph.labels[v][0] for v in res.cycle)
        m = len(outputs)
        canon = min(outputs[r:] + outputs[:r] for r in range(m))
        if canon not in seen:
            seen[canon] = (res, canon)
    return [seen[k] for k in sorted(seen)]


def compute_saist(config: SaistConfig) -> SaistReport:
    """Refine the traffic abstraction until its smallest-in-average cycle is a
    proven behavior of the closed loop, or until the depth budget runs out."""
    disc = discretize(config.system)
    oracle = make_oracle(config, disc)
    lower = None
    upper = None
    iterations = []
    abstraction = None
    last_sac_states = None
    best_sac = ()
    l = 0
    while True:
        t0 = time.monotonic()
        if config.mode == "full" or abstraction is None:
            l += 1
            if l > config.l_max:
                break
            abstraction = build_l_complete(disc, oracle, l, workers=config.workers)
        else:
            abstraction = refine_sac(
                abstraction, last_sac_states, oracle, workers=config.workers
            )
            l = abstraction.depth
            if l > config.l_max:
                break
        graph = abstraction.as_weighted_graph()
        cands = _cycle_candidates(graph)
        value = cands[0][0].value
        if lower is None or value > lower:
            lower = value
        bound = attracting_scc_bound(graph)
        if bound is not None and (upper is None or bound < upper):
            upper = bound
        verified = None
        for res, word in cands:
            out = verify_cycle(disc, word, seed=config.seed)
            if out.verified:
                verified = (res, word, out)
                break
        entry = {
            "l": l,
            "value": value,
            "n_states": abstraction.n_states,
            "sac": list(cands[0][1]),
            "verified": verified is not None,
            "oracle": dict(oracle.stats),
            "wall_time": time.monotonic() - t0,
        }
        iterations.append(entry)
        if verified is not None:
            res, word, out = verified
            return SaistReport(
                status="Verified",
                saist_lower=value,
                saist_upper=value if upper is None else min(upper, value),
                sac_word=word,
                l_reached=l,
                witness=out.witness.basis,
                h=config.system.h,
                power=out.power,
                iterations=iterations,
                dot=abstraction.to_dot(),
            )
        best_sac = cands[0][1]
        # states along the winning cycle, for targeted refinement
        last_sac_states = tuple(graph.labels[v] for v in cands[0][0].cycle)
    return SaistReport(
        status="BoundsOnly",
        saist_lower=lower if lower is not None else Fraction(0),
        saist_upper=upper,
        sac_word=best_sac,
        l_reached=min(l, config.l_max) if iterations else 0,
        witness=None,
        h=config.system.h,
        iterations=iterations,
        dot=abstraction.to_dot() if abstraction is not None else None,
    )


def generic_limavg(provider, l_max: int) -> SaistReport:
    """Depth loop of the limit-average engine over an arbitrary word provider.

    The provider supplies length-l word sets and a periodic-word verifier.
    """
    lower = None
    upper = None
    iterations = []
    best_sac = ()
    for l in range(1, l_max + 1):
        t0 = time.monotonic()
        states = tuple(sorted(provider.words(l)))
        abstraction = TrafficAbstraction(
            states=states, transitions=domino_transitions(states), depth=l
        )
        graph = abstraction.as_weighted_graph()
        cands = _cycle_candidates(graph)
        value = cands[0][0].value
        if lower is None or value > lower:
            lower = value
        bound = attracting_scc_bound(graph)
        if bound is not None and (upper is None or bound < upper):
            upper = bound
        hit = None
        for res, word in cands:
            if provider.verify(word):
                hit = word
                break
        iterations.append(
            {
                "l": l,
                "value": value,
                "n_states": len(states),
                "sac": list(cands[0][1]),
                "verified": hit is not None,
                "oracle": {},
                "wall_time": time.monotonic() - t0,
            }
        )
        best_sac = cands[0][1]
        if hit is not None:
            return SaistReport(
                status="Verified",
                saist_lower=value,
                saist_upper=value if upper is None else min(upper, value),
                sac_word=hit,
                l_reached=l,
                witness=None,
                h=1.0,
                iterations=iterations,
            )
    return SaistReport(
        status="BoundsOnly",
        saist_lower=lower,
        saist_upper=upper,
        sac_word=best_sac,
        l_reached=l_max,
        witness=None,
        h=1.0,
        iterations=iterations,
    )


def crosscheck_simulation(
    config: SaistConfig,
    report: SaistReport,
    trials: int,
    steps: int,
    tol: float = 0.05,
) -> dict:
    """Empirical validation: tail averages of simulated IST traces must respect
    the reported lower bound, and a witness-seeded trial must land on the
    SAIST when the report is Verified."""
    disc = discretize(config.system)
    rng = np.random.default_rng(config.seed)
    lower = float(report.saist_lower)
    tails = []
    for t in range(trials):
        x0 = rng.standard_normal(disc.n)
        x0 /= np.linalg.norm(x0)
        traj = simulate(disc, x0, steps, renormalize=True)
        tail = float(np.mean(traj.ists[steps // 2 :]))
        if tail < lower - 1e-9:
            raise CrosscheckFailed(
                f"trial {t}: tail average {tail} below lower bound {lower}",
                trajectory=traj,
            )
        tails.append(tail)
    witness_tail = None
    if report.verified:
        c = rng.standard_normal(report.witness.shape[1])
        x0 = report.witness @ c
        x0 /= np.linalg.norm(x0)
        traj = simulate(disc, x0, steps, renormalize=True)
        witness_tail = float(np.mean(traj.ists[steps // 2 :]))
        if abs(witness_tail - lower) > tol:
            raise CrosscheckFailed(
                f"witness trial tail {witness_tail} not within {tol} of {lower}",
                trajectory=traj,
            )
    return {"tails": tails, "witness_tail": witness_tail, "lower": lower}
