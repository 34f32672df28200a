"""Order-aware distances between samples and clusters, and the fit objective.

A rank assignment over an attribute's values induces a normalized distance
between any two values: the absolute rank difference divided by the largest
possible difference. A sample's distance to a cluster on one attribute is the
probability-weighted mean of its value's distances to every value observed in
that cluster; the overall distance averages the per-attribute terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class ClusterProfile:
    """Within-cluster value frequencies, one (k, cardinality) table per attribute."""

    probs: tuple  # per attribute: (k, l_r) float64
    sizes: np.ndarray  # (k,) int64 cluster sample counts

    @property
    def k(self) -> int:
        return int(self.sizes.shape[0])

    @property
    def empty(self) -> np.ndarray:
        """Boolean mask of clusters that currently hold no samples."""
        return self.sizes == 0


@dataclass(frozen=True)
class DistanceTable:
    """Per-attribute value-to-value distances plus the encoded sample table.

    ``matrices[r][a, g]`` is the distance between values ``a`` and ``g`` of
    attribute ``r``. Row lookups give the per-sample difference vectors
    without materializing an (n, s, l) tensor.
    """

    matrices: tuple  # per attribute: (l_r, l_r) float64
    cat: np.ndarray  # (n, s_cat) int32

    def vector(self, i: int, r: int) -> np.ndarray:
        """Distance from sample i's value on attribute r to every value of r."""
        return self.matrices[r][self.cat[i, r]]


@dataclass(frozen=True)
class ObjectiveReport:
    """Objective total plus its per-cluster / per-value decompositions."""

    total: float
    per_cluster_attribute: np.ndarray  # (k, s_cat)
    per_value: tuple  # per attribute: (k, l_r)


def rank_difference_matrix(ranks: np.ndarray) -> np.ndarray:
    """Normalized pairwise rank differences for one attribute's values."""
    l = ranks.shape[0]
    if l < 2:
        raise ValueError("attributes with a single value have no distance structure")
    r = np.asarray(ranks, dtype=np.float64)
    return np.abs(r[:, None] - r[None, :]) / (l - 1)


def hamming_matrix(l: int) -> np.ndarray:
    """Match/mismatch distances: 0 on the diagonal, 1 elsewhere."""
    return 1.0 - np.eye(l)


def value_distance_matrices(d: Dataset, orders) -> tuple:
    """Distance matrices for every categorical attribute under ``orders``.

    An attribute whose rank array is None falls back to match/mismatch
    distances (no usable order).
    """
    out = []
    for r, card in enumerate(d.cardinalities):
        ranks = orders.ranks[r]
        out.append(hamming_matrix(card) if ranks is None else rank_difference_matrix(ranks))
    return tuple(out)


def build_distance_table(d: Dataset, orders) -> DistanceTable:
    return DistanceTable(matrices=value_distance_matrices(d, orders), cat=d.cat)


def order_distance_vector(value_index: int, ranks: np.ndarray) -> np.ndarray:
    """Distances from one value to every value of its attribute, given ranks."""
    l = ranks.shape[0]
    if l < 2:
        raise ValueError("attributes with a single value have no distance structure")
    if sorted(ranks.tolist()) != list(range(1, l + 1)):
        raise ValueError("ranks must be a bijection onto 1..l")
    return np.abs(ranks[value_index] - np.asarray(ranks, dtype=np.float64)) / (l - 1)


def compute_profile(d: Dataset, q) -> ClusterProfile:
    """Within-cluster relative value frequencies for a partition.

    Empty clusters get an all-zero row; callers treat them via
    ``ClusterProfile.empty``.
    """
    assign = np.asarray(q.assign)
    return profile_from_assignment(d.cat, d.cardinalities, assign, q.k)


def profile_from_assignment(cat: np.ndarray, cards, assign: np.ndarray, k: int) -> ClusterProfile:
    sizes = np.bincount(assign, minlength=k).astype(np.int64)
    nonzero = np.where(sizes > 0, sizes, 1).astype(np.float64)
    probs = []
    for r, l in enumerate(cards):
        counts = np.bincount(assign * l + cat[:, r], minlength=k * l).astype(np.float64)
        probs.append(counts.reshape(k, l) / nonzero[:, None])
    return ClusterProfile(probs=tuple(probs), sizes=sizes)


def sample_cluster_distance(i: int, m: int, dist: DistanceTable, prof: ClusterProfile) -> float:
    """Mean over attributes of the profile-weighted value distance; in [0, 1]."""
    if prof.sizes[m] == 0:
        raise ValueError(f"cluster {m} is empty; it has no distance to any sample")
    s = len(dist.matrices)
    total = 0.0
    for r in range(s):
        total += float(dist.vector(i, r) @ prof.probs[r][m])
    return total / s


def cluster_distances(cat: np.ndarray, matrices, prof: ClusterProfile) -> np.ndarray:
    """(n, k) profile-weighted distances; empty clusters are +inf columns."""
    n = cat.shape[0]
    k = prof.k
    dist = np.zeros((n, k))
    for r, mat in enumerate(matrices):
        dist += (mat @ prof.probs[r].T)[cat[:, r]]
    dist /= max(len(matrices), 1)
    dist[:, prof.empty] = np.inf
    return dist


def mode_distances(cat: np.ndarray, matrices, prof: ClusterProfile) -> np.ndarray:
    """(n, k) distances to each cluster's most frequent value; empty -> +inf."""
    n = cat.shape[0]
    k = prof.k
    dist = np.zeros((n, k))
    for r, mat in enumerate(matrices):
        modes = prof.probs[r].argmax(axis=1)
        dist += mat[np.ix_(cat[:, r], modes)]
    dist /= max(len(matrices), 1)
    dist[:, prof.empty] = np.inf
    return dist


def objective(d: Dataset, q, orders, form: str = "profile") -> ObjectiveReport:
    """Evaluate the clustering objective of a partition under given orders.

    ``form`` selects the per-attribute sample-cluster distance: the
    profile-weighted form (default) or the distance to the cluster's modal
    value, used by the no-probability-weight ablation.
    """
    matrices = value_distance_matrices(d, orders)
    prof = compute_profile(d, q)
    assign = np.asarray(q.assign)
    return objective_report(d.cat, matrices, prof, assign, form)


def objective_report(cat, matrices, prof: ClusterProfile, assign, form: str = "profile") -> ObjectiveReport:
    if form not in ("profile", "mode"):
        raise ValueError(f"unknown form form {form!r}")
    k = prof.k
    s = len(matrices)
    per_value = []
    per_ca = np.zeros((k, s))
    for r, mat in enumerate(matrices):
        if form == "profile":
            per_cluster_value = mat @ prof.probs[r].T  # (l, k)
            per_sample_cost = per_cluster_value[cat[:, r], assign]
        else:
            modes = prof.probs[r].argmax(axis=1)
            per_sample_cost = mat[cat[:, r], modes[assign]]
        l = mat.shape[0]
        cell = np.bincount(assign * l + cat[:, r], weights=per_sample_cost, minlength=k * l)
        cell = cell.reshape(k, l)
        per_value.append(cell)
        per_ca[:, r] = cell.sum(axis=1)
    total = float(per_ca.sum()) / max(s, 1)
    return ObjectiveReport(total=total, per_cluster_attribute=per_ca, per_value=tuple(per_value))


def objective_total(cat, matrices, prof: ClusterProfile, assign, form: str = "profile") -> float:
    """Objective value only; the fast path for iteration loops."""
    total = 0.0
    for r, mat in enumerate(matrices):
        if form == "profile":
            per_cluster_value = mat @ prof.probs[r].T
            total += float(per_cluster_value[cat[:, r], assign].sum())
        else:
            modes = prof.probs[r].argmax(axis=1)
            total += float(mat[cat[:, r], modes[assign]].sum())
    return total / max(len(matrices), 1)


def pairwise_distance_matrix(d: Dataset, orders) -> np.ndarray:
    """(n, n) sample-to-sample distances: mean normalized rank difference.

    Feeds external embedding tools; quadratic in n by nature.
    """
    matrices = value_distance_matrices(d, orders)
    n = d.n
    out = np.zeros((n, n))
    for r, mat in enumerate(matrices):
        col = d.cat[:, r]
        out += mat[np.ix_(col, col)]
    out /= max(len(matrices), 1)
    return out
