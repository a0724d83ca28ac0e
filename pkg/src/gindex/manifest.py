"""Loading and validation of curriculum and evaluation manifest documents.

Schema violations raise ManifestError carrying the path of the offending
field (e.g. ``curriculum.domains[0].sample_count``). Reference programs must
parse and be nonempty; generated programs that fail to parse are kept with a
syntax-error count so they can be scored as fully divergent instead of being
dropped.
"""

from __future__ import annotations

import json
from typing import Any

from .benchmark import EvaluationManifest, SystemDescriptor
from .errors import FlowError, ManifestError
from .flow import ProgramDag, build_dag, parse_flow
from .generalization import Curriculum, CurriculumDomain, TaskInstance

_REQUIRED = object()

#: petaFLOPS to teraFLOPS.
PETA_TO_TERA = 1000.0


def _object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ManifestError(path, "expected an object")
    return value


def _array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ManifestError(path, "expected an array")
    return value


def _field(obj: dict, key: str, path: str, default: Any = _REQUIRED) -> Any:
    if key not in obj:
        if default is _REQUIRED:
            raise ManifestError(f"{path}.{key}", "missing required field")
        return default
    return obj[key]


def _string(obj: dict, key: str, path: str, default: Any = _REQUIRED) -> str:
    if key not in obj:
        if default is _REQUIRED:
            raise ManifestError(f"{path}.{key}", "missing required field")
        return default
    value = obj[key]
    if not isinstance(value, str):
        raise ManifestError(f"{path}.{key}", "expected a string")
    return value


def _number(obj: dict, key: str, path: str, minimum: float | None = None) -> float:
    value = _field(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ManifestError(f"{path}.{key}", "expected a number")
    if minimum is not None and value < minimum:
        raise ManifestError(f"{path}.{key}", f"must be at least {minimum}")
    return float(value)


def _integer(obj: dict, key: str, path: str, minimum: int) -> int:
    value = _field(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ManifestError(f"{path}.{key}", "expected an integer")
    if value < minimum:
        raise ManifestError(f"{path}.{key}", f"must be at least {minimum}")
    return value


def _program_text(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _reference_dag(obj: dict, key: str, path: str) -> ProgramDag:
    value = _field(obj, key, path)
    try:
        dag = build_dag(parse_flow(_program_text(value)))
    except FlowError as exc:
        raise ManifestError(f"{path}.{key}", str(exc)) from exc
    if len(dag) == 0:
        raise ManifestError(f"{path}.{key}", "reference program must be nonempty")
    return dag


def _generated_dag(obj: dict, key: str, path: str) -> tuple[ProgramDag | None, int]:
    """Parse a generated program; on failure return (None, 1) per the
    score-degenerate-programs rule rather than rejecting the manifest."""
    value = _field(obj, key, path)
    try:
        return build_dag(parse_flow(_program_text(value))), 0
    except FlowError:
        return None, 1


def _compute_teraflops(obj: dict, path: str) -> float:
    # The field name records the unit; petaFLOPS convert on ingest.
    has_tera = "compute_teraflops" in obj
    has_peta = "compute_petaflops" in obj
    if has_tera == has_peta:
        raise ManifestError(
            path, "exactly one of compute_teraflops / compute_petaflops is required"
        )
    if has_tera:
        return _number(obj, "compute_teraflops", path, minimum=0.0)
    return _number(obj, "compute_petaflops", path, minimum=0.0) * PETA_TO_TERA


def _domain(raw: Any, path: str) -> CurriculumDomain:
    obj = _object(raw, path)
    domain_id = _string(obj, "id", path)
    sample_count = _integer(obj, "sample_count", path, minimum=1)
    compute = _compute_teraflops(obj, path)
    seconds = _number(obj, "training_time_seconds", path, minimum=0.0)
    if compute * seconds < 1.0:
        raise ManifestError(
            path, "compute-time product must be at least 1 teraFLOP-second"
        )
    tasks_raw = _array(_field(obj, "tasks", path), f"{path}.tasks")
    if not tasks_raw:
        raise ManifestError(f"{path}.tasks", "domain needs at least one task")
    tasks = []
    for k, task_raw in enumerate(tasks_raw):
        task_path = f"{path}.tasks[{k}]"
        task_obj = _object(task_raw, task_path)
        tasks.append(
            TaskInstance(
                spec_text=_string(task_obj, "spec_text", task_path),
                reference_dag=_reference_dag(task_obj, "reference_program", task_path),
                domain_id=domain_id,
            )
        )
    return CurriculumDomain(
        id=domain_id,
        tasks=tuple(tasks),
        sample_count=sample_count,
        compute_teraflops=compute,
        training_time_seconds=seconds,
    )


def load_curriculum(data: Any, path: str = "curriculum") -> Curriculum:
    obj = _object(data, path)
    domains_raw = _array(_field(obj, "domains", path), f"{path}.domains")
    if not domains_raw:
        raise ManifestError(f"{path}.domains", "curriculum needs at least one domain")
    domains = tuple(_domain(raw, f"{path}.domains[{k}]") for k, raw in enumerate(domains_raw))
    ids = [d.id for d in domains]
    if len(set(ids)) != len(ids):
        raise ManifestError(f"{path}.domains", "domain ids must be unique")
    return Curriculum(domains=domains)


def load_curriculum_text(text: str) -> Curriculum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError("curriculum", f"invalid JSON: {exc}") from exc
    return load_curriculum(data)


def _test_task(raw: Any, path: str, position: int) -> TaskInstance:
    obj = _object(raw, path)
    generated, syntax_errors = _generated_dag(obj, "generated_program", path)
    task_id = _string(obj, "id", path, default=None)
    return TaskInstance(
        spec_text=_string(obj, "spec_text", path),
        reference_dag=_reference_dag(obj, "reference_program", path),
        generated_dag=generated,
        task_id=task_id if task_id else f"task-{position}",
        syntax_errors=syntax_errors,
    )


def load_evaluation_manifest(data: Any) -> EvaluationManifest:
    """Validate a full evaluation document and build the typed manifest."""
    obj = _object(data, "manifest")
    system_obj = _object(_field(obj, "system", "manifest"), "system")
    rho = _field(system_obj, "priors_rho", "system", default=1.0)
    if isinstance(rho, bool) or not isinstance(rho, (int, float)) or rho < 0:
        raise ManifestError("system.priors_rho", "expected a nonnegative number")
    system = SystemDescriptor(
        name=_string(system_obj, "name", "system"),
        priors_rho=float(rho),
        notes=_string(system_obj, "notes", "system", default=""),
    )
    curriculum = load_curriculum(_field(obj, "curriculum", "manifest"))
    tasks_raw = _array(_field(obj, "test_tasks", "manifest"), "test_tasks")
    tasks = tuple(
        _test_task(raw, f"test_tasks[{k}]", k) for k, raw in enumerate(tasks_raw)
    )
    return EvaluationManifest(system=system, curriculum=curriculum, test_tasks=tasks)


def load_evaluation_manifest_text(text: str) -> EvaluationManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError("manifest", f"invalid JSON: {exc}") from exc
    return load_evaluation_manifest(data)
