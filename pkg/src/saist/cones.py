"""Homogeneous quadratic cones for IST words and subspace containment checks."""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RankDeficientBasis
from .petc import DiscretizedSystem, SYM_TOL


class Sense(enum.Enum):
    STRICT_POSITIVE = "strict_positive"  # x'Px > 0
    NON_POSITIVE = "non_positive"  # x'Px <= 0

    @property
    def sign(self):
        return 1.0 if self is Sense.STRICT_POSITIVE else -1.0


@dataclass(frozen=True)
class QuadConstraint:
    P: np.ndarray
    sense: Sense

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        if np.max(np.abs(P - P.T)) > SYM_TOL * max(1.0, np.max(np.abs(P))):
            raise ConfigError("constraint matrix must be symmetric")
        P = 0.5 * (P + P.T)
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    def satisfied(self, x, tol=0.0):
        v = float(x @ self.P @ x)
        return v > tol if self.sense is Sense.STRICT_POSITIVE else v <= tol

    def margin(self, x):
        """Signed margin; positive means strictly satisfied."""
        return self.sense.sign * float(x @ self.P @ x)


@dataclass(frozen=True)
class ConeSystem:
    """Conjunction of quadratic constraints pinning the next |word| ISTs.

    All constraints are pulled back to the initial state by congruence with
    the cumulative products of the M(k) matrices, so membership of x is a
    direct evaluation.
    """

    word: tuple
    constraints: tuple
    variant: str = ""  # cache discriminator for derived cones (e.g. inflation)

    @property
    def n(self):
        return self.constraints[0].P.shape[0] if self.constraints else 0

    def contains(self, x, tol=0.0):
        return all(c.satisfied(x, tol) for c in self.constraints)

    def min_margin(self, x):
        return min((c.margin(x) for c in self.constraints), default=np.inf)

    def arrays(self):
        """(mats, signs) stacks for the batch kernels."""
        mats = np.array([c.P for c in self.constraints])
        signs = np.array([c.sense.sign for c in self.constraints])
        return mats, signs

    def inflate(self, epsilon):
        """Add epsilon*I to every constraint matrix (cone inflation)."""
        eye = np.eye(self.n)
        cs = tuple(QuadConstraint(c.P + epsilon * eye, c.sense) for c in self.constraints)
        return ConeSystem(
            word=self.word, constraints=cs, variant=f"{self.variant}+eps{epsilon!r}"
        )


def sigma_cone(disc: DiscretizedSystem, word) -> ConeSystem:
    """Constraints of the set of states whose next |word| ISTs are exactly `word`.

    A letter k contributes one strict-positive constraint on N(k) (absent for
    k = kbar) preceded in sense-order by non-positive constraints on N(m),
    m < k; step j's forms are pulled back by Phi_j = M(k_{j-1})...M(k_1).
    """
    word = tuple(int(k) for k in word)
    if not word:
        raise ConfigError("word must be nonempty")
    if any(k < 1 or k > disc.kbar for k in word):
        raise ConfigError(f"letters must lie in 1..{disc.kbar}")
    n = disc.n
    phi = np.eye(n)
    constraints = []
    for k in word:
        for m in range(1, k):
            P = phi.T @ disc.N[m - 1] @ phi
            constraints.append(QuadConstraint(0.5 * (P + P.T), Sense.NON_POSITIVE))
        if k < disc.kbar:
            P = phi.T @ disc.N[k - 1] @ phi
            constraints.append(QuadConstraint(0.5 * (P + P.T), Sense.STRICT_POSITIVE))
        phi = disc.M[k - 1] @ phi
    return ConeSystem(word=word, constraints=tuple(constraints))


def subspace_contained(V, c: QuadConstraint, tol: float) -> bool:
    """Whether span(V) \\ {0} lies in the constraint's solution set.

    Strict-positive: lambda_min(V'PV) > tol; non-positive: lambda_max <= tol.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    sv = np.linalg.svd(V, compute_uv=False)
    if sv.size == 0 or sv[-1] <= 1e-10:
        raise RankDeficientBasis("basis matrix is rank deficient")
    G = V.T @ c.P @ V
    G = 0.5 * (G + G.T)
    eig = np.linalg.eigvalsh(G)
    if c.sense is Sense.STRICT_POSITIVE:
        return bool(eig[0] > tol)
    return bool(eig[-1] <= tol)
