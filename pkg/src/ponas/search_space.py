"""Candidate-block vocabulary, macro-architecture skeleton, and chromosome codec.

The search space is a fixed stack of MBConv layer slots. Each searchable slot
picks one of 12 candidate blocks (kernel size 3/5/7, expansion ratio 3/6,
squeeze-excite on/off); stem and head slots are fixed. An architecture is
encoded as a gene vector with one candidate index per searchable slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ValidationError

KERNEL_CHOICES = (3, 5, 7)
EXPANSION_CHOICES = (3, 6)

#: Canonical index of the largest block (kernel 7, expansion 6, SE on).
LARGEST_BLOCK_INDEX = 11

MACRO_FORMAT = "ponas-v1"


@dataclass(frozen=True)
class CandidateBlock:
    """One MBConv configuration selectable at a searchable slot."""

    kernel: int
    expansion: int
    se: bool

    def __post_init__(self):
        if self.kernel not in KERNEL_CHOICES:
            raise ValidationError(f"kernel must be one of {KERNEL_CHOICES}, got {self.kernel}")
        if self.expansion not in EXPANSION_CHOICES:
            raise ValidationError(
                f"expansion must be one of {EXPANSION_CHOICES}, got {self.expansion}"
            )

    @property
    def index(self) -> int:
        """Canonical index: kernel-major, then expansion, then SE (0..11)."""
        return (
            KERNEL_CHOICES.index(self.kernel) * 4
            + EXPANSION_CHOICES.index(self.expansion) * 2
            + int(self.se)
        )


def enumerate_candidate_blocks() -> list[CandidateBlock]:
    """All 12 candidate blocks in canonical index order."""
    return [
        CandidateBlock(kernel=k, expansion=e, se=bool(s))
        for k in KERNEL_CHOICES
        for e in EXPANSION_CHOICES
        for s in (False, True)
    ]


def candidate_block(index: int) -> CandidateBlock:
    """Candidate block for a canonical index in 0..11."""
    if not 0 <= index < 12:
        raise ValidationError(f"candidate index must be in [0, 12), got {index}")
    k, rem = divmod(index, 4)
    e, s = divmod(rem, 2)
    return CandidateBlock(kernel=KERNEL_CHOICES[k], expansion=EXPANSION_CHOICES[e], se=bool(s))


def largest_block() -> CandidateBlock:
    return candidate_block(LARGEST_BLOCK_INDEX)


@dataclass(frozen=True)
class FixedBlock:
    """Descriptor for a non-searchable slot (stem conv, head conv, pool, fc)."""

    kind: str  # "conv" | "mbconv_e1" | "conv1x1" | "avgpool" | "fc"
    kernel: int = 1


@dataclass(frozen=True)
class LayerSlot:
    """One position in the network stack, with its shapes and stride."""

    input_resolution: int
    in_channels: int
    out_channels: int
    stride: int
    searchable: bool
    fixed_block: FixedBlock | None = None

    def __post_init__(self):
        for name in ("input_resolution", "in_channels", "out_channels"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.stride not in (1, 2):
            raise ValidationError(f"stride must be 1 or 2, got {self.stride}")
        if self.stride == 2 and self.input_resolution % 2 != 0:
            raise ValidationError(
                f"stride-2 slot needs an even input resolution, got {self.input_resolution}"
            )
        if self.searchable and self.fixed_block is not None:
            raise ValidationError("searchable slot must not carry a fixed block")
        if not self.searchable and self.fixed_block is None:
            raise ValidationError("non-searchable slot must carry a fixed block")

    @property
    def output_resolution(self) -> int:
        if self.fixed_block is not None and self.fixed_block.kind == "avgpool":
            return 1
        return self.input_resolution // self.stride


@dataclass(frozen=True)
class MacroArchitecture:
    """Ordered slot list plus the searchable-slot and candidate counts."""

    slots: tuple[LayerSlot, ...]
    num_candidates: int = 12
    name: str = MACRO_FORMAT

    def __post_init__(self):
        if not 1 <= self.num_candidates <= 12:
            raise ValidationError(
                f"num_candidates must be in [1, 12], got {self.num_candidates}"
            )
        prev = None
        for j, slot in enumerate(self.slots):
            if prev is not None:
                if slot.in_channels != prev.out_channels:
                    raise ValidationError(
                        f"slot {j}: in_channels {slot.in_channels} != "
                        f"previous out_channels {prev.out_channels}"
                    )
                if slot.input_resolution != prev.output_resolution:
                    raise ValidationError(
                        f"slot {j}: input resolution {slot.input_resolution} != "
                        f"previous output resolution {prev.output_resolution}"
                    )
            prev = slot

    @property
    def num_searchable(self) -> int:
        return sum(1 for s in self.slots if s.searchable)

    @property
    def searchable_slots(self) -> tuple[LayerSlot, ...]:
        return tuple(s for s in self.slots if s.searchable)


# Searchable body of the default macro: (resolution, in_ch, out_ch, repeat, stride).
# Within a repeat group only the first slot changes the channel count.
_SEARCHABLE_ROWS = (
    (112, 16, 32, 1, 2),
    (56, 32, 32, 1, 1),
    (56, 32, 40, 1, 2),
    (28, 40, 40, 3, 1),
    (28, 40, 80, 1, 2),
    (14, 80, 96, 4, 1),
    (14, 96, 96, 3, 1),
    (14, 96, 192, 1, 2),
    (7, 192, 320, 4, 1),
)


def default_macro() -> MacroArchitecture:
    """The 224x224 macro-architecture: fixed stem/head and 19 searchable slots.

    Stem is a 3x3 conv (3->32, stride 2) followed by an expansion-1 MBConv
    (32->16). The head is a fixed 1x1 conv to 1280 channels, a 7x7 average
    pool, and a 1280->1000 fully-connected classifier.
    """
    slots = [
        LayerSlot(224, 3, 32, 2, searchable=False, fixed_block=FixedBlock("conv", kernel=3)),
        LayerSlot(112, 32, 16, 1, searchable=False, fixed_block=FixedBlock("mbconv_e1", kernel=3)),
    ]
    for resolution, in_ch, out_ch, repeat, stride in _SEARCHABLE_ROWS:
        for r in range(repeat):
            slots.append(
                LayerSlot(
                    input_resolution=resolution if r == 0 else resolution // stride,
                    in_channels=in_ch if r == 0 else out_ch,
                    out_channels=out_ch,
                    stride=stride if r == 0 else 1,
                    searchable=True,
                )
            )
    slots += [
        LayerSlot(7, 320, 1280, 1, searchable=False, fixed_block=FixedBlock("conv1x1")),
        LayerSlot(7, 1280, 1280, 1, searchable=False, fixed_block=FixedBlock("avgpool", kernel=7)),
        LayerSlot(1, 1280, 1000, 1, searchable=False, fixed_block=FixedBlock("fc")),
    ]
    return MacroArchitecture(slots=tuple(slots))


def toy_macro(num_layers: int, num_candidates: int) -> MacroArchitecture:
    """Small all-searchable macro for tests and exhaustive-search instances.

    Channel widths cycle through a short pattern so per-slot costs differ,
    which keeps cost constraints binding on tiny search spaces.
    """
    if num_layers < 1:
        raise ValidationError(f"num_layers must be >= 1, got {num_layers}")
    widths = [16, 24, 32, 24]
    slots = []
    for j in range(num_layers):
        slots.append(
            LayerSlot(
                input_resolution=16,
                in_channels=widths[j % len(widths)],
                out_channels=widths[(j + 1) % len(widths)],
                stride=1,
                searchable=True,
            )
        )
    return MacroArchitecture(
        slots=tuple(slots),
        num_candidates=num_candidates,
        name=f"toy-{num_layers}x{num_candidates}",
    )


def validate_genes(genes, macro: MacroArchitecture) -> tuple[int, ...]:
    """Check a gene vector against a macro; returns it as a tuple."""
    genes = tuple(int(g) for g in genes)
    expected = macro.num_searchable
    if len(genes) != expected:
        raise ValidationError(
            f"chromosome has {len(genes)} genes but macro expects {expected}"
        )
    for j, g in enumerate(genes):
        if not 0 <= g < macro.num_candidates:
            raise ValidationError(
                f"gene {j} = {g} outside candidate range [0, {macro.num_candidates})"
            )
    return genes


@dataclass(frozen=True)
class ConcreteSlot:
    """A slot with its block resolved: either the fixed block or a candidate."""

    slot: LayerSlot
    block: CandidateBlock | None  # None for fixed slots

    @property
    def gene(self) -> int | None:
        return None if self.block is None else self.block.index


@dataclass(frozen=True)
class ArchitectureSpec:
    """A fully concrete architecture: every slot paired with its block."""

    macro: MacroArchitecture
    genes: tuple[int, ...]
    slots: tuple[ConcreteSlot, ...] = field(repr=False, default=())

    def extract_genes(self) -> tuple[int, ...]:
        """Re-read the gene vector from the resolved slots."""
        return tuple(cs.block.index for cs in self.slots if cs.slot.searchable)

    def to_json(self, include_slots: bool = True) -> dict:
        """Serializable form; the expanded listing covers the searchable slots."""
        doc = {"macro": self.macro.name, "genes": list(self.genes)}
        if include_slots:
            listing = []
            for idx, cs in enumerate(self.slots):
                if not cs.slot.searchable:
                    continue
                listing.append(
                    {
                        "slot_index": idx,
                        "kernel": cs.block.kernel,
                        "expansion": cs.block.expansion,
                        "se": cs.block.se,
                        "in_ch": cs.slot.in_channels,
                        "out_ch": cs.slot.out_channels,
                        "stride": cs.slot.stride,
                        "resolution": cs.slot.input_resolution,
                    }
                )
            doc["slots"] = listing
        return doc

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(**kwargs), indent=2)


def decode(genes, macro: MacroArchitecture) -> ArchitectureSpec:
    """Resolve a gene vector into a concrete architecture.

    Fixed slots keep their fixed blocks; searchable slot j takes the candidate
    block with index ``genes[j]``. Rejects gene vectors whose length does not
    match the macro.
    """
    genes = validate_genes(genes, macro)
    resolved = []
    gene_iter = iter(genes)
    for slot in macro.slots:
        if slot.searchable:
            resolved.append(ConcreteSlot(slot=slot, block=candidate_block(next(gene_iter))))
        else:
            resolved.append(ConcreteSlot(slot=slot, block=None))
    return ArchitectureSpec(macro=macro, genes=genes, slots=tuple(resolved))
