"""Domain distance, task-domain clustering, and generalization difficulty.

The domain distance of a task is the divergence between its reference program
and the nearest reference program in a pool of training tasks: 0 means the
task was seen verbatim, 1 means nothing in the pool shares a node with it.
Generalization difficulty amplifies that distance exponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .divergence import delta, pairwise_matrix
from .errors import EmptyPoolError, InvalidConfigError
from .flow import ProgramDag


@dataclass(frozen=True)
class FormulaConstants:
    """Fixed exponents of the benchmark formulas.

    Defaults are the standard values; reports computed with anything else are
    not comparable, so overriding requires ``nonstandard=True``.
    """

    theta_exponent: float = 12.0
    omega_exponent: float = 10.0
    nonstandard: bool = False

    def __post_init__(self) -> None:
        if (self.theta_exponent, self.omega_exponent) != (12.0, 10.0) and not self.nonstandard:
            raise InvalidConfigError(
                "changing formula exponents requires nonstandard=True"
            )


STANDARD_CONSTANTS = FormulaConstants()


@dataclass(frozen=True)
class TaskInstance:
    """A task prompt with its reference program and, for test tasks, the
    program some system generated for it."""

    spec_text: str
    reference_dag: ProgramDag
    generated_dag: ProgramDag | None = None
    domain_id: str | None = None
    task_id: str | None = None
    syntax_errors: int = 0


@dataclass(frozen=True)
class CurriculumDomain:
    """One training domain: representative tasks plus the resources spent on it."""

    id: str
    tasks: tuple[TaskInstance, ...]
    sample_count: int
    compute_teraflops: float
    training_time_seconds: float


@dataclass(frozen=True)
class Curriculum:
    """The training set, partitioned into domains with unique ids."""

    domains: tuple[CurriculumDomain, ...]

    def __post_init__(self) -> None:
        ids = [d.id for d in self.domains]
        if not ids:
            raise ValueError("curriculum must contain at least one domain")
        if len(set(ids)) != len(ids):
            raise ValueError("curriculum domain ids must be unique")

    def all_tasks(self) -> list[TaskInstance]:
        return [t for d in self.domains for t in d.tasks]


Pool = Union[Curriculum, CurriculumDomain, Sequence[TaskInstance]]


def _pool_tasks(pool: Pool) -> list[TaskInstance]:
    if isinstance(pool, Curriculum):
        return pool.all_tasks()
    if isinstance(pool, CurriculumDomain):
        return list(pool.tasks)
    return list(pool)


def omega(task: TaskInstance, pool: Pool, budget: int | None = None) -> float:
    """Domain distance: minimum divergence from the task's reference program
    to any reference program in the pool."""
    tasks = _pool_tasks(pool)
    if not tasks:
        raise EmptyPoolError("domain distance needs at least one pool task")
    return min(delta(task.reference_dag, t.reference_dag, budget).delta for t in tasks)


def gd(omega_value: float, constants: FormulaConstants = STANDARD_CONSTANTS) -> float:
    """Generalization difficulty exp(10 * omega); 1 for a seen task."""
    if not 0.0 <= omega_value <= 1.0:
        raise ValueError(f"domain distance must lie in [0, 1], got {omega_value}")
    return math.exp(constants.omega_exponent * omega_value)


#: Band edges of the generalization levels (open gaps emit transitional tags).
LEVEL_BANDS = {
    "L1": (0.0, 0.15),
    "L2": (0.4, 0.7),
    "L3": (0.85, 1.0),
}


def classify_level(mean_omega: float) -> str:
    """Map a mean domain distance to a generalization-level tag.

    L0 is reserved for systems evaluated with zero uncertainty and is never
    produced from distances alone. Distances falling in the gaps between the
    documented bands return explicit transitional tags instead of rounding.
    """
    if not 0.0 <= mean_omega <= 1.0:
        raise ValueError(f"mean domain distance must lie in [0, 1], got {mean_omega}")
    if mean_omega <= 0.15:
        return "L1"
    if mean_omega < 0.4:
        return "transitional(L1-L2)"
    if mean_omega <= 0.7:
        return "L2"
    if mean_omega < 0.85:
        return "transitional(L2-L3)"
    return "L3"


@dataclass(frozen=True)
class DomainPartition:
    """Clusters of program indices; every input index appears exactly once."""

    clusters: tuple[tuple[str, tuple[int, ...]], ...]
    threshold: float

    def cluster_of(self, index: int) -> str:
        for cid, members in self.clusters:
            if index in members:
                return cid
        raise KeyError(index)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "clusters": [
                {"id": cid, "members": list(members)} for cid, members in self.clusters
            ],
        }


def cluster_domains(
    programs: Sequence[ProgramDag],
    threshold: float = 0.15,
    budget: int | None = None,
    jobs: int = 1,
) -> DomainPartition:
    """Complete-linkage agglomerative clustering on the pairwise divergence matrix.

    Clusters merge while the complete linkage (largest pairwise divergence
    across the pair of clusters) stays within the threshold, so every final
    cluster has all intra-cluster divergences <= threshold. Ties merge the
    lowest-indexed pair first, making the partition deterministic for a given
    input order.
    """
    if not programs:
        raise ValueError("cluster_domains requires at least one program")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    matrix = pairwise_matrix(programs, programs, budget=budget, jobs=jobs)

    clusters: list[list[int]] = [[i] for i in range(len(programs))]
    while len(clusters) > 1:
        best: tuple[float, int, int] | None = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                linkage = max(matrix[i][j] for i in clusters[a] for j in clusters[b])
                if best is None or linkage < best[0]:
                    best = (linkage, a, b)
        assert best is not None
        linkage, a, b = best
        if linkage > threshold:
            break
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]

    clusters.sort(key=min)
    labelled = tuple(
        (f"cluster-{k}", tuple(members)) for k, members in enumerate(clusters)
    )
    return DomainPartition(clusters=labelled, threshold=threshold)
