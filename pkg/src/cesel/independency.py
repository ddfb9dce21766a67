"""Independency scoring between algorithms.

Two layers live here. Graph-level: cells from two :class:`GraphArray`
objects are scored pairwise into a dependence matrix, and a greedy
max-extraction over that matrix yields the pairwise independency degree
(0 = identical procedure, 1 = nothing in common). Run-level: two runs of
the *same* algorithm are compared through their randomized starting
parameters (greedy minimum matching of parameter rows). The two layers
combine into one scalar weight per committee entry.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .cail import GraphArray
from .errors import (
    CommitteeTooSmall,
    DimensionMismatch,
    DuplicateAlgorithmId,
    EmptyCell,
    EmptyGraph,
    UnknownAlgorithm,
)


def compare_cells(cell1, cell2) -> float:
    """Dependence of two cells: shared symbols over the larger cell size.

    Shared symbols are counted with multiset semantics (a symbol matched
    in one cell is consumed), which keeps the score symmetric when
    duplicates appear. Result is in [0, 1].
    """
    if not cell1 or not cell2:
        raise EmptyCell("cannot compare an empty cell")
    shared = sum((Counter(cell1) & Counter(cell2)).values())
    return shared / max(len(cell1), len(cell2))


@dataclass(frozen=True)
class Cddm:
    """Cell-by-cell dependence matrix for one pair of algorithms."""

    row_name: str
    col_name: str
    values: np.ndarray  # shape (len(a.cells), len(b.cells)), entries in [0, 1]


def build_cddm(a: GraphArray, b: GraphArray) -> Cddm:
    """Score every cell of ``a`` against every cell of ``b``."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyGraph("cannot build a dependence matrix from an empty array")
    values = np.array(
        [[compare_cells(ca, cb) for cb in b.cells] for ca in a.cells],
        dtype=float,
    )
    return Cddm(a.name, b.name, values)


def max_cells(cddm: Cddm) -> list[float]:
    """Greedy extraction of matrix maxima.

    Repeatedly takes the global maximum of what is left, then deletes its
    row and column; ties go to the smallest row index, then the smallest
    column index. Stops after min(rows, cols) extractions.
    """
    m = cddm.values.copy()
    rows = list(range(m.shape[0]))
    cols = list(range(m.shape[1]))
    picked: list[float] = []
    for _ in range(min(m.shape)):
        sub = m[np.ix_(rows, cols)]
        r, c = np.unravel_index(int(np.argmax(sub)), sub.shape)
        picked.append(float(sub[r, c]))
        del rows[r]
        del cols[c]
    return picked


def aid(a: GraphArray, b: GraphArray) -> float:
    """Independency degree of two algorithms' arrays, in [0, 1].

    One minus the mean extracted dependence, where the mean is taken over
    the larger of the two cell counts so that unmatched cells count as
    fully independent.
    """
    picked = max_cells(build_cddm(a, b))
    m = max(len(a), len(b))
    return 1.0 - sum(picked) / m


@dataclass(frozen=True)
class Aidm:
    """Symmetric matrix of pairwise independency degrees, diagonal -1."""

    algorithm_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        n = len(self.algorithm_ids)
        if self.values.shape != (n, n):
            raise ValueError("matrix shape does not match the ID list")

    def index(self, algorithm_id: str) -> int:
        try:
            return self.algorithm_ids.index(algorithm_id)
        except ValueError:
            raise UnknownAlgorithm(f"algorithm {algorithm_id!r} not in matrix") from None

    def lookup(self, alg_a: str, alg_b: str) -> float:
        return float(self.values[self.index(alg_a), self.index(alg_b)])


def build_aidm(arrays: list[GraphArray]) -> Aidm:
    """Pairwise independency over a roster of graph arrays.

    Off-diagonal entries are mirrored from the upper triangle so the
    result is exactly symmetric; the diagonal is -1 by convention (an
    algorithm against itself is resolved at run level, not graph level).
    """
    ids = [a.name for a in arrays]
    if len(set(ids)) != len(ids):
        raise DuplicateAlgorithmId(f"duplicate algorithm IDs in {ids}")
    n = len(arrays)
    values = np.full((n, n), -1.0)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = aid(arrays[i], arrays[j])
    return Aidm(tuple(ids), values)


def save_aidm_csv(aidm: Aidm, path: str | Path) -> None:
    """Write ``aidm`` as CSV: header row/column of IDs, -1 diagonal."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(aidm.algorithm_ids))
        for alg_id, row in zip(aidm.algorithm_ids, aidm.values):
            writer.writerow([alg_id] + [_fmt(v) for v in row])


def _fmt(v: float) -> str:
    return str(int(v)) if v == int(v) else repr(float(v))


def load_aidm_csv(path: str | Path) -> Aidm:
    """Read an independency matrix CSV written by :func:`save_aidm_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    ids = tuple(h.strip() for h in rows[0][1:])
    values = np.empty((len(ids), len(ids)))
    for i, row in enumerate(rows[1:]):
        if row[0].strip() != ids[i]:
            raise ValueError(f"{path}: row label {row[0]!r} does not match header")
        values[i] = [float(v) for v in row[1:]]
    return Aidm(ids, values)


def reference_aidm() -> Aidm:
    """The bundled 20-algorithm reference independency matrix."""
    return load_aidm_csv(Path(str(resources.files("cesel.data").joinpath("aidm_reference.csv"))))


# --- run-level independency ---------------------------------------------------

@dataclass(frozen=True)
class BasicParams:
    """The randomized starting parameters of one clusterer run."""

    algorithm_id: str
    rows: np.ndarray  # (r, d), finite

    def __post_init__(self):
        object.__setattr__(self, "rows", np.atleast_2d(np.asarray(self.rows, dtype=float)))
        if self.rows.size == 0:
            raise ValueError("basic parameters need at least one row")
        if not np.isfinite(self.rows).all():
            raise ValueError("basic parameters must be finite")

    def to_dict(self) -> dict:
        return {"algorithm_id": self.algorithm_id, "rows": self.rows.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "BasicParams":
        return cls(d["algorithm_id"], np.asarray(d["rows"], dtype=float))


def bpi(p1: BasicParams, p2: BasicParams) -> float:
    """Run-level independency of two same-algorithm runs, in [0, 1).

    Greedy minimum matching of parameter rows: extract the global minimum
    of the pairwise Euclidean distance matrix, drop its row and column,
    repeat until one side is exhausted. The mean matched distance ``t``
    is squashed to ``t / (1 + t)`` so identical runs score 0 and the
    score stays bounded.
    """
    if p1.algorithm_id != p2.algorithm_id:
        raise DimensionMismatch(
            f"run-level comparison needs one algorithm, got "
            f"{p1.algorithm_id!r} vs {p2.algorithm_id!r}"
        )
    if p1.rows.shape[1] != p2.rows.shape[1]:
        raise DimensionMismatch(
            f"parameter dimensionality differs: {p1.rows.shape[1]} vs {p2.rows.shape[1]}"
        )
    diff = p1.rows[:, None, :] - p2.rows[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    rows = list(range(dist.shape[0]))
    cols = list(range(dist.shape[1]))
    matched: list[float] = []
    for _ in range(min(dist.shape)):
        sub = dist[np.ix_(rows, cols)]
        r, c = np.unravel_index(int(np.argmin(sub)), sub.shape)
        matched.append(float(sub[r, c]))
        del rows[r]
        del cols[c]
    t = float(np.mean(matched))
    return t / (1.0 + t)


def ai_weights(committee, aidm: Aidm) -> np.ndarray:
    """Per-entry independency weight: mean pair score against the rest.

    For entries from different algorithms the pair score is the matrix
    lookup; for entries from the same algorithm it is the run-level
    :func:`bpi`. Each weight lands in [0, 1].

    ``committee`` is a sequence of objects with ``algorithm_id`` and
    ``basic_params`` attributes (see :class:`cesel.consensus.CommitteeEntry`).
    """
    if len(committee) < 2:
        raise CommitteeTooSmall("independency weights need at least two entries")
    for entry in committee:
        aidm.index(entry.algorithm_id)  # raises UnknownAlgorithm
    n = len(committee)
    weights = np.empty(n)
    for i, p in enumerate(committee):
        scores = []
        for j, q in enumerate(committee):
            if i == j:
                continue
            if p.algorithm_id == q.algorithm_id:
                scores.append(bpi(*_pad_to_common(p.basic_params, q.basic_params)))
            else:
                scores.append(aidm.lookup(p.algorithm_id, q.algorithm_id))
        weights[i] = float(np.mean(scores))
    return weights


def _pad_to_common(p1: BasicParams, p2: BasicParams) -> tuple[BasicParams, BasicParams]:
    """Zero-pad the narrower parameter rows so same-algorithm runs compare.

    Runs of one algorithm under different cluster counts can carry
    parameters of different dimensionality (e.g. embedded-space centroids
    are k x k); eigen-embeddings nest, so padding the missing trailing
    coordinates with zeros keeps distances meaningful.
    """
    d1, d2 = p1.rows.shape[1], p2.rows.shape[1]
    if d1 == d2:
        return p1, p2
    width = max(d1, d2)

    def pad(p: BasicParams) -> BasicParams:
        if p.rows.shape[1] == width:
            return p
        rows = np.zeros((p.rows.shape[0], width))
        rows[:, : p.rows.shape[1]] = p.rows
        return BasicParams(p.algorithm_id, rows)

    return pad(p1), pad(p2)
