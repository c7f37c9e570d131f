"""Layer-by-layer construction of the accuracy table over an abstract evaluator.

The builder walks the searchable layers in order. At layer l it scores every
candidate block inside a context network: the best blocks found so far at
layers < l, the candidate under test at layer l, and the largest block
everywhere after l. Scores land in the accuracy table row by row, and the
per-layer winners become the context for the next layer.

Gradient training is out of scope; an :class:`Evaluator` stands in for the
validation-accuracy measurement, and :class:`SyntheticEvaluator` provides a
deterministic reference world for tests and demos. Training-protocol metadata
(two-stage schedule, fairness rounds, weight-crop plans) is modeled at the
shape/bookkeeping level only.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Protocol

import numpy as np

from .accuracy_table import AccuracyTable, quantize6, table_document
from .errors import ValidationError
from .search_space import (
    ArchitectureSpec,
    CandidateBlock,
    LayerSlot,
    MacroArchitecture,
    decode,
)


class Evaluator(Protocol):
    """Scores a concrete architecture with a validation accuracy in [0, 1].

    Implementations must be deterministic — equal specs give equal values —
    and safe for concurrent calls.
    """

    def eval(self, spec: ArchitectureSpec) -> float: ...


@dataclass(frozen=True)
class TwoStageSchedule:
    """Training-schedule metadata recorded into run manifests.

    Defaults: 50 meta epochs at lr 0.1 with 10x decay at epochs 20 and 40,
    then 3 fine-tune epochs per layer at lr 0.001, batch size 256. No
    optimizer runs here; the fields document the protocol a real training
    backend would follow.
    """

    meta_epochs: int = 50
    finetune_epochs_per_layer: int = 3
    meta_lr: float = 0.1
    finetune_lr: float = 0.001
    lr_decay_epochs: tuple[int, ...] = (20, 40)
    batch_size: int = 256

    def __post_init__(self):
        numeric = {
            "meta_epochs": self.meta_epochs,
            "finetune_epochs_per_layer": self.finetune_epochs_per_layer,
            "meta_lr": self.meta_lr,
            "finetune_lr": self.finetune_lr,
            "batch_size": self.batch_size,
        }
        for name, value in numeric.items():
            if value <= 0:
                raise ValidationError(f"{name} must be positive, got {value}")
        object.__setattr__(self, "lr_decay_epochs", tuple(self.lr_decay_epochs))
        if any(e <= 0 for e in self.lr_decay_epochs):
            raise ValidationError("lr_decay_epochs must all be positive")

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["lr_decay_epochs"] = list(self.lr_decay_epochs)
        return doc


@dataclass(frozen=True)
class FairnessSchedule:
    """Rounds of candidate orderings; each round trains every block exactly once."""

    rounds: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(tuple(int(i) for i in r) for r in self.rounds))
        for r, perm in enumerate(self.rounds):
            if sorted(perm) != list(range(len(perm))):
                raise ValidationError(f"round {r} is not a permutation: {perm}")


def fairness_schedule(seed: int, num_candidates: int, rounds: int) -> FairnessSchedule:
    """Seeded strict-fairness schedule: one uniform permutation per round."""
    if rounds < 1:
        raise ValidationError(f"rounds must be >= 1, got {rounds}")
    rng = np.random.default_rng(seed)
    return FairnessSchedule(
        rounds=tuple(tuple(int(i) for i in rng.permutation(num_candidates)) for _ in range(rounds))
    )


@dataclass(frozen=True)
class TensorShapeCrop:
    """Shape-level plan for initializing a smaller block from the largest one.

    ``source`` holds the largest block's parameter-tensor shapes for a slot,
    ``target`` the smaller block's, and ``crop_map`` the per-dimension index
    ranges to copy. Channel crops take the leading channels; kernel crops take
    the centered window. Normalization tensors are not part of the plan.
    """

    source: dict[str, tuple[int, ...]]
    target: dict[str, tuple[int, ...]]
    crop_map: dict[str, tuple[tuple[int, int], ...]]

    def __post_init__(self):
        for name, tshape in self.target.items():
            sshape = self.source.get(name)
            ranges = self.crop_map.get(name)
            if sshape is None or ranges is None:
                raise ValidationError(f"crop plan for {name!r} lacks a source or range")
            if len(tshape) != len(sshape) or len(ranges) != len(sshape):
                raise ValidationError(f"rank mismatch in crop plan for {name!r}")
            for d, ((start, stop), tdim, sdim) in enumerate(zip(ranges, tshape, sshape)):
                if not (0 <= start <= stop <= sdim):
                    raise ValidationError(
                        f"{name!r} dim {d}: range [{start}, {stop}) exceeds source size {sdim}"
                    )
                if stop - start != tdim:
                    raise ValidationError(
                        f"{name!r} dim {d}: range length {stop - start} != target size {tdim}"
                    )

    def target_parameter_count(self) -> int:
        total = 0
        for shape in self.target.values():
            n = 1
            for d in shape:
                n *= d
            total += n
        return total


def _mbconv_tensors(cin: int, cout: int, kernel: int, expansion: int, se: bool) -> dict:
    cexp = expansion * cin
    tensors = {
        "expand_weight": (cexp, cin, 1, 1),
        "depthwise_weight": (cexp, 1, kernel, kernel),
        "project_weight": (cout, cexp, 1, 1),
    }
    if se:
        cse = (cexp + 3) // 4
        tensors.update(
            se_reduce_weight=(cse, cexp),
            se_reduce_bias=(cse,),
            se_expand_weight=(cexp, cse),
            se_expand_bias=(cexp,),
        )
    return tensors


def crop_plan(target: CandidateBlock, slot: LayerSlot) -> TensorShapeCrop:
    """Crop ranges that carve a target block's tensors out of the largest block's.

    Expansion crops keep the leading ``expansion * in_channels`` of the
    largest block's expanded channels; the depthwise kernel crop keeps the
    centered k x k window of the 7 x 7 kernel (offset (7 - k) / 2); disabling
    SE drops the SE tensors entirely.
    """
    if not slot.searchable:
        raise ValidationError("crop plans apply to searchable slots only")
    cin, cout = slot.in_channels, slot.out_channels
    source = _mbconv_tensors(cin, cout, kernel=7, expansion=6, se=True)
    tgt = _mbconv_tensors(cin, cout, target.kernel, target.expansion, target.se)
    offset = (7 - target.kernel) // 2
    cexp = target.expansion * cin
    cse = (cexp + 3) // 4
    crop_map = {
        "expand_weight": ((0, cexp), (0, cin), (0, 1), (0, 1)),
        "depthwise_weight": (
            (0, cexp),
            (0, 1),
            (offset, offset + target.kernel),
            (offset, offset + target.kernel),
        ),
        "project_weight": ((0, cout), (0, cexp), (0, 1), (0, 1)),
    }
    if target.se:
        crop_map.update(
            se_reduce_weight=((0, cse), (0, cexp)),
            se_reduce_bias=((0, cse),),
            se_expand_weight=((0, cexp), (0, cse)),
            se_expand_bias=((0, cexp),),
        )
    return TensorShapeCrop(source=source, target=tgt, crop_map=crop_map)


def build_table(
    macro: MacroArchitecture,
    evaluator: Evaluator,
    threads: int = 1,
) -> tuple[AccuracyTable, tuple[int, ...]]:
    """Fill the accuracy table layer by layer and return it with the winners.

    Performs exactly ``num_searchable * num_candidates`` evaluator calls. The
    candidates of one layer may be scored concurrently (``threads > 1``);
    results are merged by candidate index, so the thread count never changes
    the output. Layers are always processed in order.
    """
    num_layers = macro.num_searchable
    num_cands = macro.num_candidates
    suffix_gene = num_cands - 1  # largest available block fills the unsearched tail
    values = np.zeros((num_layers, num_cands))
    best: list[int] = []

    def score(layer: int, cand: int) -> float:
        genes = tuple(best[:layer]) + (cand,) + (suffix_gene,) * (num_layers - 1 - layer)
        return float(evaluator.eval(decode(genes, macro)))

    for layer in range(num_layers):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                row = list(pool.map(lambda c: score(layer, c), range(num_cands)))
        else:
            row = [score(layer, c) for c in range(num_cands)]
        for cand, acc in enumerate(row):
            if not 0.0 <= acc <= 1.0:
                raise ValidationError(
                    f"evaluator returned {acc} outside [0, 1] at layer {layer}, "
                    f"candidate {cand}"
                )
        values[layer] = row
        best.append(int(np.argmax(values[layer])))
    return AccuracyTable(values=values), tuple(best)


def run_manifest(
    schedule: TwoStageSchedule,
    seed: int,
    table: AccuracyTable,
    best: tuple[int, ...],
) -> dict:
    """Manifest document for one table-construction run."""
    return {
        "schedule": schedule.to_json(),
        "seed": int(seed),
        "evaluations": table.layers * table.candidates,
        "table": table_document(table.values),
        "best_genes": [int(g) for g in best],
    }


class SyntheticEvaluator:
    """Deterministic stand-in for supernet validation accuracy.

    Accuracy is a seeded per-(layer, candidate) additive utility plus a small
    architecture-keyed jitter, clamped to [0, 1]: each layer has a preferred
    candidate whose utility decays with candidate distance, so the world has
    genuine per-layer structure for the table to discover. Utilities are
    scaled so the clamp never binds in practice, keeping accuracy differences
    additive across layers.
    """

    JITTER = 0.001

    def __init__(self, seed: int, macro: MacroArchitecture):
        self.seed = int(seed)
        self.macro = macro
        num_layers = macro.num_searchable
        num_cands = macro.num_candidates
        rng = np.random.default_rng(self.seed)
        self.base = float(rng.uniform(0.65, 0.75))
        span = max(1, num_cands - 1)
        utilities = np.zeros((num_layers, num_cands))
        for layer in range(num_layers):
            preferred = int(rng.integers(0, num_cands))
            weight = rng.uniform(0.005, 0.03)
            utilities[layer] = -weight * np.abs(np.arange(num_cands) - preferred) / span
        self.utilities = utilities
        self.utilities.flags.writeable = False

    def _jitter(self, genes: tuple[int, ...]) -> float:
        payload = self.seed.to_bytes(8, "little", signed=True) + bytes(
            b for g in genes for b in int(g).to_bytes(2, "little")
        )
        frac = zlib.crc32(payload) / 0xFFFFFFFF
        return (2.0 * frac - 1.0) * self.JITTER

    def eval(self, spec: ArchitectureSpec) -> float:
        genes = spec.genes
        if len(genes) != self.utilities.shape[0]:
            raise ValidationError(
                f"evaluator built for {self.utilities.shape[0]} layers, "
                f"got {len(genes)} genes"
            )
        acc = self.base + sum(self.utilities[l, g] for l, g in enumerate(genes))
        acc += self._jitter(genes)
        return quantize6(min(1.0, max(0.0, acc)))
