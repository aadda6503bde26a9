"""Private opinions, relation types, information flow and restriction scalars."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientVerticesError, SingularOpinionError
from .graph import Graph

# Opinions closer to zero than this are never sampled; restriction scalars divide by x_i.
EPS_OPINION = 1e-3

N_DECILES = 10


class RelationType(enum.IntEnum):
    HONEST = 0
    PROSOCIAL = 1
    ANTISOCIAL = 2

    @classmethod
    def parse(cls, token: str) -> RelationType:
        key = token.strip().lower()
        try:
            return _RELATION_ALIASES[key]
        except KeyError:
            raise ValueError(f"unknown relation type {token!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()


_RELATION_ALIASES = {
    "honest": RelationType.HONEST, "h": RelationType.HONEST, "0": RelationType.HONEST,
    "prosocial": RelationType.PROSOCIAL, "p": RelationType.PROSOCIAL, "1": RelationType.PROSOCIAL,
    "antisocial": RelationType.ANTISOCIAL, "a": RelationType.ANTISOCIAL, "2": RelationType.ANTISOCIAL,
}


@dataclass(frozen=True)
class DeceptionAssignment:
    opinions: np.ndarray
    relations: np.ndarray
    tau: float

    def __post_init__(self):
        x = np.asarray(self.opinions, dtype=np.float64)
        r = np.asarray(self.relations, dtype=np.int8)
        if x.ndim != 1 or r.shape != x.shape:
            raise ValueError("opinions and relations must be vectors of equal length")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        if np.any(np.abs(x) > 1.0):
            raise ValueError("opinions must lie in [-1, 1]")
        if np.any(np.abs(x) < EPS_OPINION):
            i = int(np.flatnonzero(np.abs(x) < EPS_OPINION)[0])
            raise SingularOpinionError(f"|x_{i}| = {abs(x[i])} is below {EPS_OPINION}")
        if r.size and (r.min() < 0 or r.max() > 2):
            raise ValueError("relations must be RelationType values")
        x.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "opinions", x)
        object.__setattr__(self, "relations", r)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def n(self) -> int:
        return self.opinions.size

    def with_tau(self, tau: float) -> DeceptionAssignment:
        return DeceptionAssignment(self.opinions, self.relations, tau)

    def check(self, g: Graph) -> None:
        if self.n != g.n:
            raise ValueError(f"assignment covers {self.n} vertices, graph has {g.n}")


def sample_opinions(n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Uniform opinions on ``[-1, -EPS_OPINION] U [EPS_OPINION, 1]`` by rejection."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=n)
    bad = np.abs(x) < EPS_OPINION
    while bad.any():
        x[bad] = rng.uniform(-1.0, 1.0, size=int(bad.sum()))
        bad = np.abs(x) < EPS_OPINION
    return x


def info_flow(x_i: float, x_j: float, r_i: RelationType, tau: float) -> float:
    """Amount of information user ``i`` discloses to neighbour ``j``."""
    if r_i == RelationType.HONEST:
        return x_i
    if r_i == RelationType.PROSOCIAL:
        return tau * x_i + (1.0 - tau) * x_j
    return tau * x_i - (1.0 - tau) * x_j


def public_opinions(g: Graph, a: DeceptionAssignment) -> np.ndarray:
    """Mean disclosed information per vertex; isolated vertices keep their private opinion.

    The neighbour average only enters through liars, so this is
    ``tau*x_i +/- (1-tau)*mean(x_j)`` for liars and ``x_i`` for honest users.
    """
    a.check(g)
    x = a.opinions
    deg = g.degrees()
    # adjacency product keeps the summation order independent of edge orientation
    nbr_sum = g.adjacency_matrix().astype(np.float64) @ x
    nbr_mean = np.divide(nbr_sum, deg, out=np.zeros(g.n), where=deg > 0)

    y = x.copy()
    pro = (a.relations == RelationType.PROSOCIAL) & (deg > 0)
    anti = (a.relations == RelationType.ANTISOCIAL) & (deg > 0)
    y[pro] = a.tau * x[pro] + (1.0 - a.tau) * nbr_mean[pro]
    y[anti] = a.tau * x[anti] - (1.0 - a.tau) * nbr_mean[anti]
    return y


def restriction_scalar(x_i: float, y_j: float, r_i: RelationType, tau: float) -> float:
    """The 1x1 restriction map of vertex ``i`` onto its edge with ``j``."""
    if abs(x_i) < EPS_OPINION:
        raise SingularOpinionError(f"|x_i| = {abs(x_i)} is below {EPS_OPINION}")
    if r_i == RelationType.HONEST:
        return 1.0
    if r_i == RelationType.PROSOCIAL:
        return tau + (1.0 - tau) * (y_j / x_i)
    return tau - (1.0 - tau) * (y_j / x_i)


def restriction_scalars(x: np.ndarray, y: np.ndarray, r: np.ndarray, tau: float) -> np.ndarray:
    """Vectorised :func:`restriction_scalar` over aligned arrays."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) < EPS_OPINION):
        raise SingularOpinionError(f"an opinion magnitude is below {EPS_OPINION}")
    ratio = (1.0 - tau) * (np.asarray(y, dtype=np.float64) / x)
    d = np.ones_like(x)
    pro = r == RelationType.PROSOCIAL
    anti = r == RelationType.ANTISOCIAL
    d[pro] = tau + ratio[pro]
    d[anti] = tau - ratio[anti]
    return d


def decile_sizes(n: int, parts: int = N_DECILES) -> list[int]:
    q, rem = divmod(n, parts)
    return [q + 1 if k < rem else q for k in range(parts)]


def assign_relations_stratified(
    baseline_scores: np.ndarray,
    seed: int | np.random.Generator | None = None,
    higher_is_more_influential: bool = True,
) -> np.ndarray:
    """Split vertices into honest / prosocial / antisocial within influence deciles.

    Vertices are ranked from most to least influential (ties by index), cut into
    ten contiguous deciles and each decile is shuffled into the three types as
    evenly as possible. Leftover slots rotate through a random type order
    across deciles so the global counts also stay within one of each other.
    """
    scores = np.asarray(baseline_scores, dtype=np.float64)
    n = scores.size
    if n < 3:
        raise InsufficientVerticesError(f"need at least 3 vertices, got {n}")
    rng = np.random.default_rng(seed)
    key = -scores if higher_is_more_influential else scores
    order = np.lexsort((np.arange(n), key))

    cycle = rng.permutation(3)
    pos = 0
    relations = np.empty(n, dtype=np.int8)
    start = 0
    for size in decile_sizes(n):
        members = order[start:start + size]
        start += size
        q, rem = divmod(size, 3)
        labels = [0, 1, 2] * q
        for _ in range(rem):
            labels.append(int(cycle[pos % 3]))
            pos += 1
        relations[members] = rng.permutation(np.array(labels, dtype=np.int8))
    return relations


def random_assignment(g: Graph, tau: float, seed: int | np.random.Generator | None = None) -> DeceptionAssignment:
    """Sampled opinions and uniformly random relation types, mostly for tests and exploration."""
    rng = np.random.default_rng(seed)
    x = sample_opinions(g.n, rng)
    r = rng.integers(0, 3, size=g.n).astype(np.int8)
    return DeceptionAssignment(x, r, tau)
