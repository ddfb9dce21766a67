"""Committee management, co-association evidence, and the full pipeline.

Candidates come from the base clusterers, pass the diversity gate, and
accumulate into a committee. Each admitted entry gets an independency
weight; the weighted co-association matrix is merged by average linkage
and cut at the requested cluster count. The whole pipeline is a pure
function of (dataset, config): a fixed master seed reproduces every
candidate, every admission decision, and the final partition.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import assets
from ._agglo import cut_merges, linkage_merge
from .clusterers import ALGORITHM_IDS, ClustererConfig, Dataset, Partition, run_algorithm
from .diversity import admit
from .errors import (
    CommitteeTooSmall,
    EmptyCommittee,
    InvalidK,
    WeightMismatch,
)
from .independency import Aidm, BasicParams, ai_weights, load_aidm_csv, reference_aidm


@dataclass(frozen=True)
class CommitteeEntry:
    """One admitted base clustering and everything needed to weight it."""

    partition: Partition
    algorithm_id: str
    basic_params: BasicParams
    diversity_at_admission: float
    run_index: int


def eac(partitions: list[Partition]) -> np.ndarray:
    """Evidence accumulation: fraction of partitions co-clustering each pair.

    Returns the n x n co-association matrix; the diagonal is exactly 1
    because every sample co-clusters with itself in every partition.
    """
    if not partitions:
        raise EmptyCommittee("evidence accumulation needs at least one partition")
    n = len(partitions[0])
    acc = np.zeros((n, n))
    for p in partitions:
        if len(p) != n:
            raise ValueError("partitions cover different sample counts")
        a = p.assignments
        acc += a[:, None] == a[None, :]
    return acc / len(partitions)


def weac(committee: list[CommitteeEntry], weights: np.ndarray) -> np.ndarray:
    """Weighted evidence accumulation over committee entries.

    Each co-clustering vote counts its entry's weight; the denominator
    stays the committee size, so unit weights reduce exactly to
    :func:`eac`. The diagonal is pinned to 1.
    """
    if not committee:
        raise EmptyCommittee("weighted accumulation needs at least one entry")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(committee),):
        raise WeightMismatch(
            f"{len(weights)} weights for {len(committee)} committee entries"
        )
    n = len(committee[0].partition)
    acc = np.zeros((n, n))
    for entry, w in zip(committee, weights):
        a = entry.partition.assignments
        acc += w * (a[:, None] == a[None, :])
    c = acc / len(committee)
    np.fill_diagonal(c, 1.0)
    return c


@dataclass(frozen=True)
class Dendrogram:
    """Full merge tree over n samples: (left, right, height, size) per merge."""

    n: int
    merges: tuple[tuple[int, int, float, int], ...]

    def __post_init__(self):
        if len(self.merges) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} merges, got {len(self.merges)}")


def average_linkage(co_association: np.ndarray) -> Dendrogram:
    """Merge tree of the co-association evidence under average linkage.

    Dissimilarity is 1 - association, so pairs that always co-cluster
    merge at height 0 and pairs that never do merge at height 1.
    """
    c = np.asarray(co_association, dtype=float)
    dissimilarity = 1.0 - c
    np.fill_diagonal(dissimilarity, 0.0)
    return Dendrogram(c.shape[0], tuple(linkage_merge(dissimilarity, "average")))


def cut(dendrogram: Dendrogram, k: int) -> Partition:
    """Undo the last k-1 merges, leaving exactly k non-empty clusters."""
    if not 1 <= k <= dendrogram.n:
        raise InvalidK(f"cannot cut {dendrogram.n} samples into {k} clusters")
    labels = cut_merges(list(dendrogram.merges), dendrogram.n, k)
    return Partition(labels, k)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that determines a pipeline run besides the data."""

    k_final: int                      # clusters in the final result
    d_threshold: float = 0.1          # diversity gate
    committee_target: int = 10        # stop admitting once reached
    max_attempts: int = 50            # hard bound on candidate generation
    seed: int = 0                     # master seed; runs derive their own
    aidm_source: str = "reference"    # "reference" | "computed" | CSV path
    consensus: str = "weac"           # "weac" | "eac"
    roster: tuple[str, ...] = ALGORITHM_IDS
    vary_k: bool = False              # sample candidate k from [2, 2*k_final]

    def __post_init__(self):
        if self.k_final < 2:
            raise ValueError("final cluster count must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if not 0.0 <= self.d_threshold <= 1.0:
            raise ValueError("diversity threshold must be in [0, 1]")
        if self.committee_target < 2:
            raise ValueError("committee target must be >= 2")
        if self.max_attempts < self.committee_target:
            raise ValueError("max_attempts must be >= committee target")
        if self.consensus not in ("weac", "eac"):
            raise ValueError(f"unknown consensus mode {self.consensus!r}")
        if not self.roster:
            raise ValueError("roster must not be empty")

    def to_dict(self) -> dict:
        return {
            "k_final": self.k_final,
            "d_threshold": self.d_threshold,
            "committee_target": self.committee_target,
            "max_attempts": self.max_attempts,
            "seed": self.seed,
            "aidm_source": self.aidm_source,
            "consensus": self.consensus,
            "roster": list(self.roster),
            "vary_k": self.vary_k,
        }


@dataclass(frozen=True)
class RunReport:
    """Machine-readable account of one pipeline run."""

    final_assignments: tuple[int, ...]
    n_ce: int
    attempts: int
    per_entry: tuple[dict, ...]    # {algorithm, weight, diversity, run_index}
    trace: tuple[dict, ...]        # every attempt: {run_index, algorithm, diversity, admitted}
    config: dict
    wall_time_ms: float

    def to_dict(self) -> dict:
        return {
            "final_assignments": list(self.final_assignments),
            "nCE": self.n_ce,
            "attempts": self.attempts,
            "per_entry": [dict(e) for e in self.per_entry],
            "trace": [dict(t) for t in self.trace],
            "config": dict(self.config),
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def resolve_aidm(cfg: PipelineConfig) -> Aidm:
    """Locate the independency matrix named by ``cfg.aidm_source``."""
    if cfg.aidm_source == "reference":
        return reference_aidm()
    if cfg.aidm_source == "computed":
        return assets.computed_aidm()
    return load_aidm_csv(cfg.aidm_source)


def _candidate_config(cfg: PipelineConfig, data_n: int, run_index: int) -> ClustererConfig:
    """Derive one candidate's algorithm, k, and seed from the master seed."""
    rng = np.random.default_rng([cfg.seed, run_index])
    algorithm = cfg.roster[int(rng.integers(len(cfg.roster)))]
    if cfg.vary_k:
        k = int(rng.integers(2, 2 * cfg.k_final + 1))
        k = min(k, data_n)
    else:
        k = cfg.k_final
    seed = int(rng.integers(2**63 - 1))
    return ClustererConfig(algorithm_id=algorithm, k=k, seed=seed)


def run_ces(data: Dataset, cfg: PipelineConfig) -> tuple[Partition, RunReport]:
    """Generate, gate, weight, and fuse base clusterings into one result.

    Candidates are drawn uniformly from the roster with seeds derived
    from (master seed, run index), admitted strictly in run-index order
    by the diversity gate, and capped by ``max_attempts`` so the loop
    always terminates. Raises :class:`CommitteeTooSmall` when fewer than
    two candidates get admitted.
    """
    t0 = time.perf_counter()
    committee: list[CommitteeEntry] = []
    trace: list[dict] = []
    attempts = 0
    for run_index in range(cfg.max_attempts):
        if len(committee) >= cfg.committee_target:
            break
        attempts += 1
        run_cfg = _candidate_config(cfg, data.n, run_index)
        partition, params = run_algorithm(data, run_cfg)
        report = admit(partition, [e.partition for e in committee], cfg.d_threshold)
        trace.append(
            {
                "run_index": run_index,
                "algorithm": run_cfg.algorithm_id,
                "diversity": report.div,
                "admitted": report.admitted,
            }
        )
        if report.admitted:
            committee.append(
                CommitteeEntry(
                    partition=partition,
                    algorithm_id=run_cfg.algorithm_id,
                    basic_params=params,
                    diversity_at_admission=report.div,
                    run_index=run_index,
                )
            )

    if len(committee) < 2:
        raise CommitteeTooSmall(
            f"only {len(committee)} admission(s) after {attempts} attempts"
        )

    if cfg.consensus == "weac":
        weights = ai_weights(committee, resolve_aidm(cfg))
        co_assoc = weac(committee, weights)
    else:
        weights = np.ones(len(committee))
        co_assoc = eac([e.partition for e in committee])

    final = cut(average_linkage(co_assoc), cfg.k_final)

    per_entry = tuple(
        {
            "algorithm": e.algorithm_id,
            "weight": float(w),
            "diversity": e.diversity_at_admission,
            "run_index": e.run_index,
        }
        for e, w in zip(committee, weights)
    )
    report = RunReport(
        final_assignments=tuple(int(v) for v in final.assignments),
        n_ce=len(committee),
        attempts=attempts,
        per_entry=per_entry,
        trace=tuple(trace),
        config=cfg.to_dict(),
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return final, report
