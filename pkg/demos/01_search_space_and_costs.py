"""Walk through the search space and the analytic cost model.

Run with: python3 demos/01_search_space_and_costs.py
"""

from ponas import (
    architecture_cost,
    candidate_block,
    decode,
    default_macro,
    enumerate_candidate_blocks,
    slot_cost,
    SlotCostTable,
)

# Twelve interchangeable blocks: kernel 3/5/7, expansion 3 or 6, squeeze-excite
# on or off. Index 11 is the largest one.
print("candidate blocks, in canonical order:")
for index, block in enumerate(enumerate_candidate_blocks()):
    se = "SE" if block.se else "--"
    print(f"  {index:2d}: kernel {block.kernel}, expansion {block.expansion}, {se}")

macro = default_macro()
searchable = [slot for slot in macro.slots if slot.searchable]
print(f"\nmacro architecture: {len(macro.slots)} slots, {len(searchable)} searchable")
print(f"search space size: 12 ** {len(searchable)} = {12 ** len(searchable):.3e} networks")

# Per-slot cost of the largest block grows and shrinks with resolution and width.
print("\nlargest-block cost per searchable slot:")
big = candidate_block(11)
for layer, slot in enumerate(searchable):
    report = slot_cost(slot, big)
    print(
        f"  layer {layer:2d}: {slot.input_resolution:3d}px "
        f"{slot.in_channels:3d}->{slot.out_channels:3d}  "
        f"{report.flops / 1e6:7.2f}M flops  {report.params / 1e3:7.1f}k params"
    )

# Whole networks: every gene set to one index.
for name, genes in [("all-largest", (11,) * 19), ("all-smallest", (0,) * 19)]:
    report = architecture_cost(decode(genes, macro))
    print(f"\n{name}: {report.to_json()}")

# The precomputed table answers chromosome-cost queries without re-decoding.
costs = SlotCostTable.from_macro(macro)
mixed = tuple(range(12)) + (11,) * 7
print(f"\nmixed chromosome {mixed}")
print(f"  cost: {costs.chromosome_cost(mixed).to_json()}")
