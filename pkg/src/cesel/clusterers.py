"""Base clustering algorithms producing candidate partitions.

All clusterers are pure functions of (dataset, config): the same seed
gives a bit-identical partition. Each run also returns the randomized
starting parameters that drive run-level independency scoring; for the
deterministic linkage family those are a constant encoding, so repeated
runs are flagged fully dependent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._agglo import cut_merges, linkage_merge
from .errors import AllMissingColumn, DegenerateSpectrum
from .independency import BasicParams

KMEANS_ID = "K"
FCM_ID = "F"
SPECTRAL_SPARSE_ID = "SPS"
LINKAGE_IDS = tuple(
    f"{link}L{dist}" for link in "SACW" for dist in "EHC"
)  # SLE, SLH, SLC, ALE, ...
ALGORITHM_IDS = (KMEANS_ID, FCM_ID) + LINKAGE_IDS + (SPECTRAL_SPARSE_ID,)

_LINKAGE_NAMES = {"S": "single", "A": "average", "C": "complete", "W": "ward"}
_HAMMING_TOL = 1e-9


@dataclass(frozen=True)
class Dataset:
    """Samples in z-scored feature space, plus the raw matrix behind them."""

    samples: np.ndarray                    # (n, d) float, finite
    raw: np.ndarray                        # (n, d) float, NaN = missing
    labels: np.ndarray | None = None       # (n,) int class labels, evaluation only
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.samples.ndim != 2 or self.samples.shape[0] < 2 or self.samples.shape[1] < 1:
            raise ValueError("dataset needs at least 2 samples and 1 feature")
        if not np.isfinite(self.samples).all():
            raise ValueError("processed samples must be finite")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Partition:
    """Hard assignment of n samples to clusters 0..k-1."""

    assignments: np.ndarray
    k: int

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=int)
        object.__setattr__(self, "assignments", a)
        if self.k < 1:
            raise ValueError("cluster count must be >= 1")
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignments must be a non-empty 1-d array")
        if a.min() < 0 or a.max() >= self.k:
            raise ValueError(f"assignment outside [0, {self.k})")

    def __len__(self) -> int:
        return self.assignments.size

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


@dataclass(frozen=True)
class ClustererConfig:
    """One run's identity: algorithm, target k, seed, and hyperparameters."""

    algorithm_id: str
    k: int
    seed: int
    fuzzifier: float = 2.0            # membership sharpness for the fuzzy clusterer
    sigma: float | None = None        # similarity bandwidth; default: median distance
    t_neighbors: int | None = None    # sparse-graph degree; default: min(10, n-1)
    max_iter: int = 300
    tol: float = 1e-6

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def preprocess(
    raw,
    labels=None,
    feature_names: tuple[str, ...] = (),
) -> Dataset:
    """Impute missing cells with the column mean, then z-score each column.

    Standardization uses the population standard deviation (divide by n),
    so a two-value column [1, 3] maps to [-1, 1]. Zero-variance columns
    map to all zeros. A column with no observed value at all raises
    :class:`AllMissingColumn`.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise ValueError("raw samples must be a 2-d matrix")
    filled = raw.copy()
    for col in range(filled.shape[1]):
        column = filled[:, col]
        missing = np.isnan(column)
        if missing.all():
            name = feature_names[col] if col < len(feature_names) else str(col)
            raise AllMissingColumn(f"column {name!r} has no observed values")
        if missing.any():
            column[missing] = column[~missing].mean()
    mean = filled.mean(axis=0)
    std = filled.std(axis=0)  # population std
    scaled = np.where(std > 0, (filled - mean) / np.where(std > 0, std, 1.0), 0.0)
    lab = None if labels is None else np.asarray(labels, dtype=int)
    return Dataset(samples=scaled, raw=raw, labels=lab, feature_names=tuple(feature_names))


# --- shared pieces ----------------------------------------------------------

def _sq_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _repair_empty(labels: np.ndarray, x: np.ndarray, centroids: np.ndarray, k: int) -> None:
    """Reseed each empty cluster from the farthest point of a non-singleton cluster."""
    for c in range(k):
        if np.any(labels == c):
            continue
        d2 = _sq_distances(x, centroids)
        own = d2[np.arange(len(labels)), labels]
        sizes = np.bincount(labels, minlength=k)
        movable = sizes[labels] >= 2
        own = np.where(movable, own, -np.inf)
        far = int(np.argmax(own))
        labels[far] = c
        centroids[c] = x[far]


def _lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Standard alternating assignment/centroid iteration.

    Returns (labels, initial_centroids). Initial centroids are k distinct
    samples drawn from ``rng``; empty clusters are repaired inside the
    loop, so the result always has k non-empty clusters.
    """
    n = x.shape[0]
    init_idx = rng.choice(n, size=k, replace=False)
    centroids = x[init_idx].copy()
    initial = centroids.copy()
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        labels = np.argmin(_sq_distances(x, centroids), axis=1)
        _repair_empty(labels, x, centroids, k)
        new_centroids = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.abs(new_centroids - centroids).max())
        centroids = new_centroids
        if shift < tol:
            break
    return labels, initial


def run_kmeans(data: Dataset, cfg: ClustererConfig) -> tuple[Partition, BasicParams]:
    """Alternating-assignment clustering from k seeded random centroids."""
    if cfg.k > data.n:
        raise ValueError(f"k={cfg.k} exceeds sample count {data.n}")
    rng = np.random.default_rng(cfg.seed)
    labels, initial = _lloyd(data.samples, cfg.k, rng, cfg.max_iter, cfg.tol)
    return Partition(labels, cfg.k), BasicParams(cfg.algorithm_id, initial)


def run_fcm(data: Dataset, cfg: ClustererConfig) -> tuple[Partition, BasicParams]:
    """Fuzzy-membership clustering, hardened by argmax at the end.

    Alternates the weighted-centroid and membership updates with the
    configured fuzzifier until memberships move less than ``tol``. The
    starting parameters reported for independency are the k x d centroids
    implied by the random initial membership matrix.
    """
    if cfg.k > data.n:
        raise ValueError(f"k={cfg.k} exceeds sample count {data.n}")
    x = data.samples
    n, k, m = data.n, cfg.k, cfg.fuzzifier
    rng = np.random.default_rng(cfg.seed)
    u = rng.random((n, k)) + 1e-9
    u /= u.sum(axis=1, keepdims=True)

    def centroids_of(memberships: np.ndarray) -> np.ndarray:
        w = memberships**m
        return (w.T @ x) / w.sum(axis=0)[:, None]

    initial = centroids_of(u)
    centroids = initial.copy()
    for _ in range(cfg.max_iter):
        d2 = np.maximum(_sq_distances(x, centroids), 0.0)
        zero_rows = np.isclose(d2, 0.0).any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = d2 ** (-1.0 / (m - 1.0))
            new_u = inv / inv.sum(axis=1, keepdims=True)
        if zero_rows.any():
            hits = np.isclose(d2[zero_rows], 0.0)
            new_u[zero_rows] = hits / hits.sum(axis=1, keepdims=True)
        change = float(np.abs(new_u - u).max())
        u = new_u
        centroids = centroids_of(u)
        if change < cfg.tol:
            break
    labels = np.argmax(u, axis=1)
    _repair_empty(labels, x, centroids.copy(), k)
    return Partition(labels, k), BasicParams(cfg.algorithm_id, initial)


# --- linkage family ----------------------------------------------------------

def euclidean_matrix(x: np.ndarray) -> np.ndarray:
    d2 = _sq_distances(x, x)
    return np.sqrt(np.maximum(d2, 0.0))


def hamming_matrix(x: np.ndarray) -> np.ndarray:
    """Fraction of coordinates differing by more than a small tolerance."""
    differs = np.abs(x[:, None, :] - x[None, :, :]) > _HAMMING_TOL
    return differs.mean(axis=2)


def cosine_matrix(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = x / safe[:, None]
    dist = 1.0 - unit @ unit.T
    zero = norms == 0
    if zero.any():
        dist[zero, :] = 1.0
        dist[:, zero] = 1.0
        dist[np.ix_(zero, zero)] = 0.0
    np.fill_diagonal(dist, 0.0)
    return np.maximum(dist, 0.0)

_DISTANCE_FNS = {"E": euclidean_matrix, "H": hamming_matrix, "C": cosine_matrix}


def run_linkage(data: Dataset, cfg: ClustererConfig) -> tuple[Partition, BasicParams]:
    """Agglomerative clustering; the algorithm ID picks linkage and distance.

    IDs look like ``ALE``: linkage letter in {S, A, C, W} (single, average,
    complete, ward), then ``L``, then distance letter in {E, H, C}
    (Euclidean, Hamming, cosine). Deterministic, so the starting
    parameters are a constant one-row code and reruns score fully
    dependent at run level.
    """
    alg = cfg.algorithm_id
    if len(alg) != 3 or alg[1] != "L" or alg[0] not in "SACW" or alg[2] not in "EHC":
        raise ValueError(f"not a linkage algorithm ID: {alg!r}")
    if cfg.k > data.n:
        raise ValueError(f"k={cfg.k} exceeds sample count {data.n}")
    dist = _DISTANCE_FNS[alg[2]](data.samples)
    merges = linkage_merge(dist, _LINKAGE_NAMES[alg[0]])
    labels = cut_merges(merges, data.n, cfg.k)
    code = np.array([["SACW".index(alg[0]), "EHC".index(alg[2])]], dtype=float)
    return Partition(labels, cfg.k), BasicParams(alg, code)


# --- sparse spectral ----------------------------------------------------------

def run_spectral_sparse(data: Dataset, cfg: ClustererConfig) -> tuple[Partition, BasicParams]:
    """Spectral clustering on a t-nearest-neighbour similarity graph.

    Builds the symmetrized sparse graph, applies a Gaussian kernel
    (bandwidth = median pairwise distance unless configured), forms the
    degree-normalized similarity matrix, embeds samples into its top-k
    eigenvectors by magnitude, row-normalizes, and clusters the embedding
    with the seeded assignment loop. Starting parameters are the initial
    centroids in the embedded space.
    """
    n, k = data.n, cfg.k
    if k > n:
        raise ValueError(f"k={cfg.k} exceeds sample count {n}")
    t = cfg.t_neighbors if cfg.t_neighbors is not None else min(10, n - 1)
    if not 1 <= t < n:
        raise ValueError(f"neighbour count t={t} outside [1, {n - 1}]")

    dist = euclidean_matrix(data.samples)
    off_diag = dist[~np.eye(n, dtype=bool)]
    sigma = cfg.sigma if cfg.sigma is not None else float(np.median(off_diag))
    if sigma <= 0:
        sigma = 1.0

    order = np.argsort(dist, axis=1, kind="stable")
    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        neighbours = order[i][order[i] != i][:t]
        keep[i, neighbours] = True
    keep |= keep.T  # symmetric union graph

    similarity = np.where(keep, np.exp(-(dist**2) / (2.0 * sigma**2)), 0.0)
    np.fill_diagonal(similarity, 0.0)
    degree = similarity.sum(axis=1)
    if np.any(degree <= 0):
        raise DegenerateSpectrum("graph has an isolated vertex")
    inv_sqrt = 1.0 / np.sqrt(degree)
    laplacian_like = similarity * inv_sqrt[:, None] * inv_sqrt[None, :]

    eigvals, eigvecs = np.linalg.eigh(laplacian_like)
    top = np.argsort(-np.abs(eigvals), kind="stable")[:k]
    embedding = eigvecs[:, top]
    if not np.isfinite(embedding).all() or embedding.shape[1] < k:
        raise DegenerateSpectrum(f"fewer than {k} usable eigenvectors")
    row_norm = np.linalg.norm(embedding, axis=1, keepdims=True)
    embedding = embedding / np.where(row_norm > 0, row_norm, 1.0)

    rng = np.random.default_rng(cfg.seed)
    labels, initial = _lloyd(embedding, k, rng, cfg.max_iter, cfg.tol)
    return Partition(labels, k), BasicParams(cfg.algorithm_id, initial)


_RUNNERS = {KMEANS_ID: run_kmeans, FCM_ID: run_fcm, SPECTRAL_SPARSE_ID: run_spectral_sparse}
_RUNNERS.update({alg: run_linkage for alg in LINKAGE_IDS})


def run_algorithm(data: Dataset, cfg: ClustererConfig) -> tuple[Partition, BasicParams]:
    """Dispatch one run by ``cfg.algorithm_id``."""
    try:
        runner = _RUNNERS[cfg.algorithm_id]
    except KeyError:
        raise ValueError(f"unknown algorithm ID {cfg.algorithm_id!r}") from None
    return runner(data, cfg)
