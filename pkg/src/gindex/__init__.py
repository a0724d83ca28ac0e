"""Divergence scoring and skill-acquisition-efficiency benchmarking for
flow-based programs, plus the flatland toy environment."""

from .benchmark import (
    DomainContribution,
    EvaluationManifest,
    FormulaConstants,
    GIndexReport,
    SweepConfig,
    SweepPoint,
    SystemDescriptor,
    TaskScore,
    curriculum_weight,
    experience,
    g_index,
    performance,
    score_documents,
    simulate_responsiveness,
    skill_level,
    task_contribution,
)
from .divergence import (
    DEFAULT_CLIQUE_BUDGET,
    AssociationGraph,
    AssociationVertex,
    CliqueResult,
    DivergenceReport,
    ErrorBreakdown,
    build_association_graph,
    classify_errors,
    delta,
    delta_brute_force,
    delta_single,
    max_weight_clique,
    node_similarity,
    pairwise_matrix,
)
from .flow import (
    META_KEYS,
    FlowNode,
    FlowProgram,
    ProgramDag,
    attribute_values_equal,
    build_dag,
    canonical_attributes,
    parse_dag,
    parse_flow,
    serialize_flow,
)
from .generalization import (
    Curriculum,
    CurriculumDomain,
    DomainPartition,
    TaskInstance,
    classify_level,
    cluster_domains,
    gd,
    omega,
)
from .manifest import (
    load_curriculum,
    load_curriculum_text,
    load_evaluation_manifest,
    load_evaluation_manifest_text,
)

__version__ = "0.1.0"

__all__ = [
    "AssociationGraph",
    "AssociationVertex",
    "CliqueResult",
    "Curriculum",
    "CurriculumDomain",
    "DEFAULT_CLIQUE_BUDGET",
    "DivergenceReport",
    "DomainContribution",
    "DomainPartition",
    "ErrorBreakdown",
    "EvaluationManifest",
    "FlowNode",
    "FlowProgram",
    "FormulaConstants",
    "GIndexReport",
    "META_KEYS",
    "ProgramDag",
    "SweepConfig",
    "SweepPoint",
    "SystemDescriptor",
    "TaskInstance",
    "TaskScore",
    "attribute_values_equal",
    "build_association_graph",
    "build_dag",
    "canonical_attributes",
    "classify_errors",
    "classify_level",
    "cluster_domains",
    "curriculum_weight",
    "delta",
    "delta_brute_force",
    "delta_single",
    "experience",
    "g_index",
    "gd",
    "load_curriculum",
    "load_curriculum_text",
    "load_evaluation_manifest",
    "load_evaluation_manifest_text",
    "max_weight_clique",
    "node_similarity",
    "omega",
    "pairwise_matrix",
    "parse_dag",
    "parse_flow",
    "performance",
    "score_documents",
    "serialize_flow",
    "simulate_responsiveness",
    "skill_level",
    "task_contribution",
]
