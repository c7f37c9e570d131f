"""Constrained specialization of layer-wise architectures from accuracy tables.

The pipeline: enumerate a 12-block MBConv search space over a fixed
macro-architecture, cost any chromosome analytically (MACs and parameters),
fill a per-layer accuracy table once against an evaluator, convert it to the
accuracy-loss domain, then evolve minimum-loss architectures under hardware
cost ceilings in seconds per target.
"""

__version__ = "0.1.0"

from .accuracy_table import (
    AccuracyLossTable,
    AccuracyTable,
    best_genes,
    layer_importance,
    load,
    quantize6,
    row_best,
    save,
    synth_table,
    to_loss_domain,
)
from .analysis import PairedSamples, export_evolution, export_importance, kendall_tau
from .cost_model import (
    Constraint,
    CostReport,
    Metric,
    SlotCostTable,
    architecture_cost,
    block_cost,
    satisfies,
    slot_cost,
)
from .errors import (
    InfeasibleError,
    PonasError,
    SearchSpaceTooLargeError,
    TableFormatError,
    ValidationError,
)
from .progressive_builder import (
    Evaluator,
    FairnessSchedule,
    SyntheticEvaluator,
    TensorShapeCrop,
    TwoStageSchedule,
    build_table,
    crop_plan,
    fairness_schedule,
    run_manifest,
)
from .search_space import (
    ArchitectureSpec,
    CandidateBlock,
    LayerSlot,
    MacroArchitecture,
    candidate_block,
    decode,
    default_macro,
    enumerate_candidate_blocks,
    largest_block,
    toy_macro,
    validate_genes,
)
from .specializer import (
    EvolutionLog,
    GAConfig,
    GenerationRecord,
    brute_force,
    chromosome_loss,
    improve_at,
    specialize,
    worst_network,
)

__all__ = [
    "__version__",
    "AccuracyLossTable",
    "AccuracyTable",
    "ArchitectureSpec",
    "CandidateBlock",
    "Constraint",
    "CostReport",
    "Evaluator",
    "EvolutionLog",
    "FairnessSchedule",
    "GAConfig",
    "GenerationRecord",
    "InfeasibleError",
    "LayerSlot",
    "MacroArchitecture",
    "Metric",
    "PairedSamples",
    "PonasError",
    "SearchSpaceTooLargeError",
    "SlotCostTable",
    "SyntheticEvaluator",
    "TableFormatError",
    "TensorShapeCrop",
    "TwoStageSchedule",
    "ValidationError",
    "architecture_cost",
    "best_genes",
    "block_cost",
    "brute_force",
    "build_table",
    "candidate_block",
    "chromosome_loss",
    "crop_plan",
    "decode",
    "default_macro",
    "enumerate_candidate_blocks",
    "export_evolution",
    "export_importance",
    "fairness_schedule",
    "improve_at",
    "kendall_tau",
    "largest_block",
    "layer_importance",
    "load",
    "quantize6",
    "row_best",
    "run_manifest",
    "satisfies",
    "save",
    "slot_cost",
    "specialize",
    "synth_table",
    "to_loss_domain",
    "toy_macro",
    "validate_genes",
    "worst_network",
]
