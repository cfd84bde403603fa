"""Certified feasibility decisions for conjunctions of homogeneous quadratics.

Used as the built-in exact engine when no external SMT solver is configured.
Dimension 1 is direct evaluation, dimension 2 is exact critical-angle
enumeration on the projective circle, dimension >= 3 is a Lipschitz
branch-and-bound over the unit sphere that answers Unknown at budget
exhaustion instead of guessing.
"""

import math
from collections import deque

import numpy as np

from .cones import ConeSystem, Sense


def _verdict_point(cone, x):
    return cone.contains(x, tol=0.0)


def decide_dim1(cone: ConeSystem):
    x = np.array([1.0])
    if _verdict_point(cone, x):
        return "sat", x
    return "unsat", None


def decide_planar(cone: ConeSystem):
    """Exact decision for n = 2 via the critical angles of every constraint.

    On the unit circle each quadratic form is a + R cos(2t - p); the feasible
    set is a finite union of arcs whose endpoints lie among the constraint
    roots, so evaluating at all roots and arc midpoints decides feasibility.
    """
    roots = []
    for c in cone.constraints:
        P = c.P
        a = 0.5 * (P[0, 0] + P[1, 1])
        b = 0.5 * (P[0, 0] - P[1, 1])
        g = P[0, 1]
        R = math.hypot(b, g)
        if R <= 1e-300:
            continue  # constant margin; handled by evaluation
        u = -a / R
        if -1.0 <= u <= 1.0:
            phi = math.atan2(g, b)
            psi = math.acos(max(-1.0, min(1.0, u)))
            for s in (phi + psi, phi - psi):
                roots.append((s / 2.0) % math.pi)
    roots = sorted(set(roots))
    candidates = list(roots)
    if roots:
        ext = roots + [roots[0] + math.pi]
        candidates.extend(0.5 * (ext[i] + ext[i + 1]) for i in range(len(roots)))
    else:
        candidates.append(0.0)
    for t in candidates:
        x = np.array([math.cos(t), math.sin(t)])
        if _verdict_point(cone, x):
            return "sat", x
    return "unsat", None


def _initial_simplices(n):
    """2^n spherical simplices covering the sphere (axis-sign orthants)."""
    out = []
    for signs in range(2**n):
        verts = []
        for i in range(n):
            v = np.zeros(n)
            v[i] = 1.0 if (signs >> i) & 1 == 0 else -1.0
            verts.append(v)
        out.append(tuple(verts))
    return out


def decide_sphere_bnb(cone: ConeSystem, max_regions=400_000, witness_tol=1e-9):
    """Sound branch-and-bound on the unit sphere for n >= 3.

    A region is discarded once some constraint is violated across it via the
    Lipschitz bound |x'Px - c'Pc| <= 2||P|| |x - c|; sat is reported from a
    region center satisfying everything with margin; budget -> unknown.
    """
    mats, signs = cone.arrays()
    lip = 2.0 * np.array([np.linalg.norm(P, 2) for P in mats])
    queue = deque(_initial_simplices(cone.n))
    examined = 0
    unresolved = False
    while queue:
        examined += 1
        if examined > max_regions:
            unresolved = True
            break
        verts = queue.popleft()
        c = np.sum(verts, axis=0)
        c /= np.linalg.norm(c)
        # chord radius of the enclosing spherical cap
        r = max(np.linalg.norm(v - c) for v in verts)
        m = signs * np.einsum("i,cij,j->c", c, mats, c)
        if np.all(m > witness_tol):
            return "sat", c
        # whole region violates some constraint
        if np.any(m + lip * r <= 0.0):
            continue
        for v in verts:
            mv = signs * np.einsum("i,cij,j->c", v, mats, v)
            if np.all(mv > witness_tol):
                return "sat", v.copy()
        # subdivide along the longest edge
        best = (0, 1)
        bl = -1.0
        k = len(verts)
        for i in range(k):
            for j in range(i + 1, k):
                d = np.linalg.norm(verts[i] - verts[j])
                if d > bl:
                    bl = d
                    best = (i, j)
        i, j = best
        mid = verts[i] + verts[j]
        mid /= np.linalg.norm(mid)
        child_a = tuple(mid if t == i else v for t, v in enumerate(verts))
        child_b = tuple(mid if t == j else v for t, v in enumerate(verts))
        queue.append(child_a)
        queue.append(child_b)
    if unresolved:
        return "unknown", None
    return "unsat", None


class BuiltinDecider:
    """Decision engine with the same reply contract as the external solver."""

    def __init__(self, max_regions=400_000):
        self.max_regions = max_regions

    def check(self, cone: ConeSystem):
        if cone.n == 1:
            return decide_dim1(cone)
        if cone.n == 2:
            return decide_planar(cone)
        return decide_sphere_bnb(cone, max_regions=self.max_regions)
