"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single `criterion N: PASS/FAIL` line before asserting, so
a plain run shows the full scoreboard.  Known-red criteria are asserted at
their stated tolerances anyway; see the repository notes for the analysis of
why the pinned values are not attainable.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from saist import (
    PetcSystem,
    SaistConfig,
    compute_saist,
    crosscheck_simulation,
    discretize,
    generic_limavg,
    perturb,
    relative_error_trigger,
    trace,
    build_l_complete,
    ConeOracle,
    Policy,
    WeightedGraph,
    min_mean_cycle,
    max_mean_cycle,
)
from saist.fixtures import DoublingMap, EqualRunsWord, IrrationalRotation


def sys_2d(sigma):
    A = np.array([[0.0, 1.0], [-2.0, 3.0]])
    BK = np.array([[0.0], [1.0]]) @ np.array([[0.0, -5.0]])
    return PetcSystem(A=A, BK=BK, Qtrig=relative_error_trigger(sigma, 2), h=0.05, kbar=20)


def sys_3d(sigma):
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, -1.0, -1.0]])
    BK = np.array([[0.0], [0.0], [1.0]]) @ np.array([[-2.0, -1.0, -1.0]])
    return PetcSystem(A=A, BK=BK, Qtrig=relative_error_trigger(sigma, 3), h=0.1, kbar=20)


def sys_jet():
    A = np.array([[0.0, -1.0], [0.0, 0.0]])
    BK = np.array([[0.0], [1.0]]) @ np.array([[1.0, -0.5]])
    return PetcSystem(A=A, BK=BK, Qtrig=relative_error_trigger(0.452, 2), h=0.05, kbar=20)


REPORTS = {}


def scoreboard(num, ok, detail):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_table_reproduction():
    expected = {
        0.2: ("exact", Fraction(74, 27)),
        0.3: ("approx", 3.42, 0.005),
        0.4: ("exact", Fraction(5)),
        0.5: ("exact", Fraction(6)),
    }
    failures = []
    details = []
    for sigma, want in expected.items():
        rep = compute_saist(SaistConfig(system=sys_2d(sigma), l_max=30, seed=0))
        REPORTS[("2d", sigma)] = rep
        got = rep.saist_lower
        details.append(f"sigma={sigma}: {got}")
        if not rep.verified:
            failures.append(f"sigma={sigma} not Verified")
        elif want[0] == "exact" and got != want[1]:
            failures.append(f"sigma={sigma}: got {got}, want {want[1]}")
        elif want[0] == "approx" and abs(float(got) - want[1]) > want[2]:
            failures.append(
                f"sigma={sigma}: got {got} = {float(got):.5f}, want {want[1]}+-{want[2]}"
            )
    scoreboard(1, not failures, "; ".join(failures or details))


@pytest.mark.slow
def test_criterion_02_bounds_case():
    t0 = time.monotonic()
    rep = compute_saist(SaistConfig(system=sys_2d(0.1), l_max=50, seed=0))
    lower, upper = float(rep.saist_lower), float(rep.saist_upper)
    ok = (
        not rep.verified
        and lower >= 1.57
        and upper <= 1.60
        and upper - lower <= 0.03
        and time.monotonic() - t0 <= 1800
    )
    scoreboard(2, ok, f"lower={lower:.4f} upper={upper:.4f} gap={upper - lower:.4f}")


@pytest.mark.slow
def test_criterion_03_3d_targeted():
    expected = {0.4: 3, 0.5: 3, 0.8: 4}
    failures = []
    details = []
    for sigma, want in expected.items():
        rep = compute_saist(
            SaistConfig(system=sys_3d(sigma), l_max=10, mode="targeted", seed=0)
        )
        REPORTS[("3d", sigma)] = rep
        details.append(f"sigma={sigma}: {rep.saist_lower}")
        if not (rep.verified and rep.saist_lower == want):
            failures.append(f"sigma={sigma}: {rep.status} {rep.saist_lower}, want {want}")
    scoreboard(3, not failures, "; ".join(failures or details))


def test_criterion_04_jet_engine():
    rep = compute_saist(SaistConfig(system=sys_jet(), l_max=20, seed=0))
    vals = [float(it["value"]) for it in rep.iterations]
    monotone = all(b >= a for a, b in zip(vals, vals[1:]))
    bounded = all(v <= 8.882 + 1e-6 for v in vals)
    cfg = SaistConfig(system=sys_jet(), l_max=20, seed=0)
    diag = crosscheck_simulation(cfg, rep, trials=5, steps=10_000)
    tails_ok = all(abs(t - 8.882) <= 0.05 for t in diag["tails"])
    scoreboard(
        4,
        monotone and bounded and tails_ok,
        f"final lower={vals[-1]:.4f}, tails={[round(t, 4) for t in diag['tails']]}",
    )


def test_criterion_05_karp_exactness():
    def brute(graph):
        adj = [[] for _ in range(graph.n)]
        for u, v, w in graph.edges:
            adj[u].append((v, w))
        means = []

        def extend(path, weight):
            for v, w in adj[path[-1]]:
                if v == path[0]:
                    means.append(Fraction(weight + w, len(path)))
                elif v not in path and v > path[0]:
                    extend(path + [v], weight + w)

        for s in range(graph.n):
            extend([s], Fraction(0))
        return means

    t0 = time.monotonic()
    rng = np.random.default_rng(123)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        edges = [(u, int(rng.integers(0, n)), Fraction(int(rng.integers(1, 21)))) for u in range(n)]
        extra = [
            (int(rng.integers(0, n)), int(rng.integers(0, n)), Fraction(int(rng.integers(1, 21))))
            for _ in range(2 * n)
        ]
        g = WeightedGraph(labels=tuple(range(n)), edges=tuple(set(edges + extra)))
        means = brute(g)
        if min_mean_cycle(g).value != min(means) or max_mean_cycle(g).value != max(means):
            mismatches += 1
    elapsed = time.monotonic() - t0
    scoreboard(5, mismatches == 0 and elapsed < 10, f"mismatches={mismatches}, {elapsed:.1f}s")


def test_criterion_06_constructive_soundness():
    checked = 0
    failures = []
    for key, rep in sorted(REPORTS.items(), key=str):
        if not rep.verified:
            continue
        kind, sigma = key
        sys = sys_2d(sigma) if kind == "2d" else sys_3d(sigma)
        disc = discretize(sys)
        rng = np.random.default_rng(0)
        c = rng.standard_normal(rep.witness.shape[1])
        x0 = rep.witness @ c
        x0 /= np.linalg.norm(x0)
        got = trace(disc, x0, 20 * len(rep.sac_word))
        if got != tuple(rep.sac_word) * 20:
            failures.append(f"{key}: trace diverged from the cycle")
        checked += 1
    scoreboard(6, checked > 0 and not failures, f"checked={checked}; " + "; ".join(failures or ["no deviations"]))


def test_criterion_07_abstraction_soundness():
    disc = discretize(sys_2d(0.3))
    oracle = ConeOracle(disc, policy=Policy.EXACT_REQUIRED, seed=0)
    rng = np.random.default_rng(0)
    traces = []
    for _ in range(100):
        x0 = rng.standard_normal(2)
        traces.append(trace(disc, x0 / np.linalg.norm(x0), 200))
    violations = 0
    for l in (1, 2, 3, 4):
        states = set(build_l_complete(disc, oracle, l).states)
        for tr in traces:
            for i in range(len(tr) - l + 1):
                if tr[i : i + l] not in states:
                    violations += 1
    scoreboard(7, violations == 0, f"violations={violations}")


def test_criterion_08_monotonicity():
    failures = []
    for sigma in (0.2, 0.5):
        disc = discretize(sys_2d(sigma))
        oracle = ConeOracle(disc, policy=Policy.EXACT_REQUIRED, seed=0)
        prev = None
        for l in range(1, 7):
            g = build_l_complete(disc, oracle, l).as_weighted_graph()
            v = min_mean_cycle(g).value
            if prev is not None and v < prev:
                failures.append(f"sigma={sigma}: VS dropped {prev} -> {v} at l={l}")
            prev = v
    scoreboard(8, not failures, "; ".join(failures or ["VS nondecreasing to l=6"]))


@pytest.mark.slow
def test_criterion_09_robustness():
    failures = []
    for sigma, want in ((0.4, (5,)), (0.5, (6,))):
        for seed in range(10):
            p = perturb(sys_2d(sigma), 1e-9, seed=seed)
            rep = compute_saist(SaistConfig(system=p, l_max=30, seed=0))
            if not (rep.verified and tuple(rep.sac_word) == want):
                failures.append(f"sigma={sigma} seed={seed}: {rep.status} {rep.sac_word}")
    scoreboard(9, not failures, "; ".join(failures or ["20/20 perturbed runs agree"]))


def test_criterion_10_fixture_suite():
    t0 = time.monotonic()
    failures = []
    rep = generic_limavg(DoublingMap(), l_max=4)
    if not (rep.verified and rep.l_reached == 1 and rep.saist_lower == 0):
        failures.append(f"doubling map: {rep.status} {rep.saist_lower} at l={rep.l_reached}")
    rep = generic_limavg(EqualRunsWord(), l_max=8)
    if rep.verified or any(it["value"] != 1 for it in rep.iterations):
        failures.append("equal-runs fixture: expected permanent lower bound 1")
    a = 1.0 / math.sqrt(2.0)
    rep = generic_limavg(IrrationalRotation(a), l_max=12)
    for it in rep.iterations:
        l = it["l"]
        want = Fraction(math.floor(l * a), l)
        if it["value"] != want:
            failures.append(f"rotation l={l}: got {it['value']}, formula gives {want}")
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 5
    scoreboard(10, ok, "; ".join(failures or [f"all fixtures exact, {elapsed:.2f}s"]))
