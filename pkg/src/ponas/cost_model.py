"""FLOPs and parameter counting for decoded architectures.

FLOPs are multiply-accumulate counts (the convention under which a standard
300M-class mobile network scores ~300M). Element-wise additions, activations,
normalization arithmetic, and pooling are not counted. Parameter counts
include weights, biases, and 2 normalization parameters per channel after
every convolution. All arithmetic is integer, so results are bit-exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ValidationError
from .search_space import (
    ArchitectureSpec,
    CandidateBlock,
    LayerSlot,
    MacroArchitecture,
    candidate_block,
)

SE_REDUCTION = 4


class Metric(enum.Enum):
    FLOPS = "flops"
    PARAMS = "params"


@dataclass(frozen=True)
class CostReport:
    flops: int
    params: int

    def __add__(self, other: "CostReport") -> "CostReport":
        return CostReport(self.flops + other.flops, self.params + other.params)

    def get(self, metric: Metric) -> int:
        return self.flops if metric is Metric.FLOPS else self.params

    def to_json(self) -> dict:
        return {
            "flops": self.flops,
            "params": self.params,
            "flops_m": round(self.flops / 1e6, 2),
            "params_m": round(self.params / 1e6, 2),
        }


@dataclass(frozen=True)
class Constraint:
    metric: Metric
    ceiling: int

    def __post_init__(self):
        if self.ceiling <= 0:
            raise ValidationError(f"constraint ceiling must be positive, got {self.ceiling}")


ZERO_COST = CostReport(0, 0)


def _mbconv_cost(h: int, cin: int, cout: int, stride: int,
                 kernel: int, expansion: int, se: bool) -> CostReport:
    """Cost of one inverted-bottleneck block on the given slot shapes.

    expand 1x1 (skipped at expansion 1) -> depthwise kxk -> optional
    squeeze-excite on the expanded channels -> project 1x1.
    """
    if h <= 0 or cin <= 0 or cout <= 0:
        raise ValidationError(f"slot shapes must be positive, got H={h} Cin={cin} Cout={cout}")
    cexp = expansion * cin
    hout = h // stride
    flops = 0
    params = 0
    if expansion != 1:
        flops += h * h * cin * cexp
        params += cin * cexp + 2 * cexp
    flops += hout * hout * cexp * kernel * kernel
    params += cexp * kernel * kernel + 2 * cexp
    if se:
        cse = (cexp + SE_REDUCTION - 1) // SE_REDUCTION
        flops += 2 * cexp * cse
        params += 2 * cexp * cse + cse + cexp
    flops += hout * hout * cexp * cout
    params += cexp * cout + 2 * cout
    return CostReport(flops, params)


def block_cost(block: CandidateBlock, slot: LayerSlot) -> CostReport:
    """Cost of a candidate block placed on a searchable slot."""
    return _mbconv_cost(
        slot.input_resolution,
        slot.in_channels,
        slot.out_channels,
        slot.stride,
        block.kernel,
        block.expansion,
        block.se,
    )


def _fixed_slot_cost(slot: LayerSlot) -> CostReport:
    kind = slot.fixed_block.kind
    h, cin, cout = slot.input_resolution, slot.in_channels, slot.out_channels
    hout = slot.output_resolution
    if kind == "conv":
        k = slot.fixed_block.kernel
        return CostReport(hout * hout * k * k * cin * cout, cin * cout * k * k + 2 * cout)
    if kind == "mbconv_e1":
        return _mbconv_cost(h, cin, cout, slot.stride,
                            slot.fixed_block.kernel, expansion=1, se=False)
    if kind == "conv1x1":
        return CostReport(hout * hout * cin * cout, cin * cout + 2 * cout)
    if kind == "avgpool":
        return ZERO_COST
    if kind == "fc":
        return CostReport(cin * cout, cin * cout + cout)
    raise ValidationError(f"unknown fixed block kind {kind!r}")


def slot_cost(slot: LayerSlot, block: CandidateBlock | None) -> CostReport:
    """Cost of one slot: the candidate block if searchable, else the fixed block."""
    if slot.searchable:
        if block is None:
            raise ValidationError("searchable slot needs a candidate block")
        return block_cost(block, slot)
    return _fixed_slot_cost(slot)


def architecture_cost(spec: ArchitectureSpec) -> CostReport:
    """Total cost of a decoded architecture: the sum over all slots."""
    total = ZERO_COST
    for cs in spec.slots:
        total = total + slot_cost(cs.slot, cs.block)
    return total


def satisfies(spec: ArchitectureSpec, constraint: Constraint) -> bool:
    """True iff the architecture's selected cost metric is within the ceiling."""
    return architecture_cost(spec).get(constraint.metric) <= constraint.ceiling


@dataclass(frozen=True)
class SlotCostTable:
    """Per-slot, per-candidate cost lookup for fast chromosome costing.

    ``flops[l][i]`` / ``params[l][i]`` cost searchable slot l with candidate i;
    ``fixed`` is the total of the non-searchable slots. The genetic search
    costs thousands of chromosomes, so the O(L) lookup sum here replaces a
    full decode + per-slot recomputation.
    """

    flops: tuple[tuple[int, ...], ...]
    params: tuple[tuple[int, ...], ...]
    fixed: CostReport

    @classmethod
    def from_macro(cls, macro: MacroArchitecture) -> "SlotCostTable":
        flops_rows, params_rows = [], []
        fixed = ZERO_COST
        for slot in macro.slots:
            if slot.searchable:
                reports = [
                    block_cost(candidate_block(i), slot) for i in range(macro.num_candidates)
                ]
                flops_rows.append(tuple(r.flops for r in reports))
                params_rows.append(tuple(r.params for r in reports))
            else:
                fixed = fixed + _fixed_slot_cost(slot)
        return cls(flops=tuple(flops_rows), params=tuple(params_rows), fixed=fixed)

    @classmethod
    def from_arrays(cls, flops, params, fixed: CostReport = ZERO_COST) -> "SlotCostTable":
        """Build from explicit per-slot cost matrices (stub costs in tests)."""
        flops = tuple(tuple(int(v) for v in row) for row in flops)
        params = tuple(tuple(int(v) for v in row) for row in params)
        if len(flops) != len(params) or any(
            len(a) != len(b) for a, b in zip(flops, params)
        ):
            raise ValidationError("flops and params matrices must have identical shape")
        return cls(flops=flops, params=params, fixed=fixed)

    @property
    def num_slots(self) -> int:
        return len(self.flops)

    @property
    def num_candidates(self) -> int:
        return len(self.flops[0]) if self.flops else 0

    def chromosome_cost(self, genes) -> CostReport:
        f = self.fixed.flops
        p = self.fixed.params
        for l, g in enumerate(genes):
            f += self.flops[l][g]
            p += self.params[l][g]
        return CostReport(f, p)

    def chromosome_metric(self, genes, metric: Metric) -> int:
        table = self.flops if metric is Metric.FLOPS else self.params
        total = self.fixed.get(metric)
        for l, g in enumerate(genes):
            total += table[l][g]
        return total

    def feasible(self, genes, constraint: Constraint) -> bool:
        return self.chromosome_metric(genes, constraint.metric) <= constraint.ceiling
