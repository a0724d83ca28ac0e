"""Skill-acquisition-efficiency scoring.

A system is evaluated on test tasks after training on a curriculum of task
domains. Each task contributes

    tc = sqrt(exp(12 * theta) * sum_i weight_i * difficulty_i / (rho + experience_i))

where theta rewards how close the generated program is to the reference,
difficulty amplifies how far the task sits from each training domain, and the
per-domain weight and experience terms penalise sample count and compute
spend. The benchmark score is the mean task contribution.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from . import divergence
from .errors import FlowError, InvalidConfigError
from .flow import ProgramDag, build_dag, parse_flow
from .generalization import (
    STANDARD_CONSTANTS,
    Curriculum,
    CurriculumDomain,
    FormulaConstants,
    TaskInstance,
    classify_level,
    gd,
    omega,
)


def curriculum_weight(sample_count: int) -> float:
    """Weight of a training domain: 1 / (1 + log2(sample count))."""
    if sample_count < 1:
        raise ValueError(f"sample count must be a positive integer, got {sample_count}")
    return 1.0 / (1.0 + math.log2(sample_count))


def experience(compute_teraflops: float, training_time_seconds: float) -> float:
    """log2 of the compute-time product (teraFLOPS x seconds); requires product >= 1."""
    product = compute_teraflops * training_time_seconds
    if product < 1.0:
        raise ValueError(
            f"compute-time product must be at least 1 teraFLOP-second, got {product}"
        )
    return math.log2(product)


def performance(generated: ProgramDag, reference: ProgramDag, budget: int | None = None) -> float:
    """Performance of a generated program: 1 - divergence from the reference."""
    return 1.0 - divergence.delta(generated, reference, budget).delta


def score_documents(
    reference_text: str, generated_text: str, budget: int | None = None
) -> divergence.DivergenceReport:
    """Score a generated program document against a reference document.

    The reference must parse; a generated document that fails to parse or
    build scores divergence 1.0 with one syntax error counted, rather than
    raising.
    """
    reference = build_dag(parse_flow(reference_text))
    try:
        generated = build_dag(parse_flow(generated_text))
        syntax_errors = 0
    except FlowError:
        generated = ProgramDag()
        syntax_errors = 1
    return divergence.delta(reference, generated, budget, syntax_errors=syntax_errors)


@dataclass(frozen=True)
class SystemDescriptor:
    """The system under evaluation and its built-in priors."""

    name: str
    priors_rho: float = 1.0
    notes: str = ""

    def __post_init__(self) -> None:
        if self.priors_rho < 0:
            raise ValueError(f"priors must be nonnegative, got {self.priors_rho}")


@dataclass(frozen=True)
class EvaluationManifest:
    """Everything needed to score one system: descriptor, curriculum, test tasks."""

    system: SystemDescriptor
    curriculum: Curriculum
    test_tasks: tuple[TaskInstance, ...]


@dataclass(frozen=True)
class DomainContribution:
    """Per-domain terms entering one task's contribution."""

    domain_id: str
    omega: float
    gd: float
    weight: float
    experience: float


@dataclass(frozen=True)
class TaskScore:
    """Scored outcome of a single test task."""

    task_id: str
    theta: float
    omega: float
    tc: float
    syntax_errors: int
    exact: bool
    domains: tuple[DomainContribution, ...]


def _score_task(
    task: TaskInstance,
    manifest: EvaluationManifest,
    budget: int | None,
    constants: FormulaConstants,
    position: int,
) -> TaskScore:
    rho = manifest.system.priors_rho
    syntax_errors = task.syntax_errors
    exact = True
    if task.generated_dag is None:
        theta = 0.0
    else:
        report = divergence.delta(task.reference_dag, task.generated_dag, budget)
        theta = 1.0 - report.delta
        exact = report.exact
        syntax_errors += report.errors.syntax

    contributions: list[DomainContribution] = []
    total = 0.0
    for domain in manifest.curriculum.domains:
        dom_omega = omega(task, domain, budget)
        dom_gd = gd(dom_omega, constants)
        dom_weight = curriculum_weight(domain.sample_count)
        dom_exp = experience(domain.compute_teraflops, domain.training_time_seconds)
        if rho + dom_exp <= 0:
            raise ValueError(
                f"priors + experience must be positive, got {rho + dom_exp} "
                f"for domain '{domain.id}'"
            )
        total += dom_weight * dom_gd / (rho + dom_exp)
        contributions.append(
            DomainContribution(domain.id, dom_omega, dom_gd, dom_weight, dom_exp)
        )

    tc = math.sqrt(math.exp(constants.theta_exponent * theta) * total)
    task_id = task.task_id if task.task_id is not None else f"task-{position}"
    return TaskScore(
        task_id=task_id,
        theta=theta,
        omega=min(c.omega for c in contributions),
        tc=tc,
        syntax_errors=syntax_errors,
        exact=exact,
        domains=tuple(contributions),
    )


def task_contribution(
    task: TaskInstance,
    manifest: EvaluationManifest,
    budget: int | None = None,
    constants: FormulaConstants = STANDARD_CONSTANTS,
) -> float:
    """Contribution of one test task to the benchmark score."""
    return _score_task(task, manifest, budget, constants, 0).tc


@dataclass(frozen=True)
class GIndexReport:
    """Full scored output for one evaluation manifest."""

    system_name: str
    rho: float
    per_task: tuple[TaskScore, ...]
    g_index: float
    mean_theta: float
    mean_omega: float
    skill_level: float
    level_tag: str

    def to_dict(self) -> dict:
        return {
            "system": self.system_name,
            "rho": self.rho,
            "g_index": self.g_index,
            "mean_theta": self.mean_theta,
            "mean_omega": self.mean_omega,
            "skill_level": self.skill_level,
            "level_tag": self.level_tag,
            "task_count": len(self.per_task),
            "per_task": [
                {
                    "task_id": t.task_id,
                    "theta": t.theta,
                    "omega": t.omega,
                    "tc": t.tc,
                    "syntax_errors": t.syntax_errors,
                    "exact": t.exact,
                    "domains": [
                        {
                            "domain_id": d.domain_id,
                            "omega": d.omega,
                            "gd": d.gd,
                            "weight": d.weight,
                            "experience": d.experience,
                        }
                        for d in t.domains
                    ],
                }
                for t in self.per_task
            ],
        }


def skill_level(thetas: Sequence[float]) -> float:
    """Fraction of tasks solved with a fully correct program (theta exactly 1)."""
    if not thetas:
        raise ValueError("skill level needs at least one scored task")
    return sum(1 for t in thetas if t == 1.0) / len(thetas)


def g_index(
    manifest: EvaluationManifest,
    budget: int | None = None,
    constants: FormulaConstants = STANDARD_CONSTANTS,
) -> GIndexReport:
    """Score every test task and average the contributions."""
    if not manifest.test_tasks:
        raise ValueError("empty test set")
    scores = tuple(
        _score_task(task, manifest, budget, constants, k)
        for k, task in enumerate(manifest.test_tasks)
    )
    thetas = [s.theta for s in scores]
    mean_omega = sum(s.omega for s in scores) / len(scores)
    return GIndexReport(
        system_name=manifest.system.name,
        rho=manifest.system.priors_rho,
        per_task=scores,
        g_index=sum(s.tc for s in scores) / len(scores),
        mean_theta=sum(thetas) / len(thetas),
        mean_omega=mean_omega,
        skill_level=skill_level(thetas),
        level_tag=classify_level(mean_omega),
    )


@dataclass(frozen=True)
class SweepConfig:
    """Configuration of a responsiveness sweep.

    One synthetic evaluation task is scored against ``domain_count`` domains
    whose distances are spread evenly over ``[omega_low, omega_high]``. The
    swept variable takes ``points`` values between ``start`` and ``stop``;
    everything else stays fixed. The shaded band comes from ``band_draws``
    random uneven sample splits per point.
    """

    sweep: str
    start: float
    stop: float
    points: int = 50
    theta: float = 0.7
    total_samples: int = 2560
    compute_teraflops: float = 100.0
    training_time_seconds: float = 3600.0
    domain_count: int = 16
    rho: float = 1.0
    omega_low: float = 0.0
    omega_high: float = 0.3
    band_draws: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sweep not in ("samples", "compute", "theta"):
            raise InvalidConfigError(f"unknown sweep variable '{self.sweep}'")
        if self.points < 2:
            raise InvalidConfigError("a sweep needs at least 2 points")
        if not self.start < self.stop:
            raise InvalidConfigError("sweep start must be below stop")
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidConfigError("theta must lie in [0, 1]")
        if self.domain_count < 1:
            raise InvalidConfigError("domain count must be positive")
        if self.total_samples < self.domain_count:
            raise InvalidConfigError("need at least one sample per domain")
        if not 0.0 <= self.omega_low <= self.omega_high <= 1.0:
            raise InvalidConfigError("omega range must satisfy 0 <= low <= high <= 1")
        if self.rho < 0:
            raise InvalidConfigError("rho must be nonnegative")
        if self.band_draws < 0:
            raise InvalidConfigError("band draws must be nonnegative")
        if self.sweep == "theta" and not (0.0 <= self.start and self.stop <= 1.0):
            raise InvalidConfigError("theta sweep range must lie in [0, 1]")


@dataclass(frozen=True)
class SweepPoint:
    """One sweep sample: the even-split score plus the uneven-split band."""

    sweep_value: float
    g_index: float
    band_low: float
    band_high: float


def _domain_omegas(config: SweepConfig) -> list[float]:
    n = config.domain_count
    if n == 1:
        return [config.omega_low]
    step = (config.omega_high - config.omega_low) / (n - 1)
    return [config.omega_low + k * step for k in range(n)]


def _synthetic_g_index(
    theta: float,
    split: Sequence[int],
    total_samples: int,
    compute_product: float,
    omegas: Sequence[float],
    rho: float,
    constants: FormulaConstants,
) -> float:
    total = 0.0
    for count, dom_omega in zip(split, omegas):
        product = compute_product * count / total_samples
        total += curriculum_weight(count) * gd(dom_omega, constants) / (
            rho + experience(product, 1.0)
        )
    return math.sqrt(math.exp(constants.theta_exponent * theta) * total)


def _even_split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


def _random_split(rng: random.Random, total: int, parts: int) -> list[int]:
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[k + 1] - bounds[k] for k in range(parts)]


def _sample_sweep_values(config: SweepConfig) -> list[int]:
    # Snap to multiples of the domain count: even splits then keep per-domain
    # experience constant across the sweep and sample counts integral.
    n = config.domain_count
    raw = [
        config.start + k * (config.stop - config.start) / (config.points - 1)
        for k in range(config.points)
    ]
    values: list[int] = []
    for value in raw:
        snapped = max(n, int(round(value / n)) * n)
        if not values or snapped > values[-1]:
            values.append(snapped)
    return values


def simulate_responsiveness(config: SweepConfig) -> list[SweepPoint]:
    """Sweep one variable of the benchmark formula over synthetic domains.

    Scores decrease in sample count and in compute, and increase in theta; the
    band shows the spread over random uneven sample distributions.
    """
    constants = STANDARD_CONSTANTS
    omegas = _domain_omegas(config)
    n = config.domain_count
    base_product = config.compute_teraflops * config.training_time_seconds

    if config.sweep == "samples":
        sweep_values: list[float] = [float(v) for v in _sample_sweep_values(config)]
    else:
        step = (config.stop - config.start) / (config.points - 1)
        sweep_values = [config.start + k * step for k in range(config.points)]

    points: list[SweepPoint] = []
    for idx, value in enumerate(sweep_values):
        theta = config.theta
        total_samples = config.total_samples
        product = base_product
        if config.sweep == "samples":
            total_samples = int(value)
        elif config.sweep == "compute":
            product = value * config.training_time_seconds
        else:
            theta = value

        if product < total_samples:
            raise InvalidConfigError(
                "compute-time product must be at least 1 teraFLOP-second per sample "
                f"(product {product}, samples {total_samples})"
            )

        center = _synthetic_g_index(
            theta, _even_split(total_samples, n), total_samples, product, omegas,
            config.rho, constants,
        )
        low = high = center
        rng = random.Random(f"{config.seed}:{idx}")
        for _ in range(config.band_draws):
            drawn = _synthetic_g_index(
                theta, _random_split(rng, total_samples, n), total_samples, product,
                omegas, config.rho, constants,
            )
            low = min(low, drawn)
            high = max(high, drawn)
        points.append(SweepPoint(value, center, low, high))
    return points
