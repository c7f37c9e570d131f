"""Specialize one accuracy table to several hardware budgets.

Run with: python3 demos/03_specialize_under_constraints.py
"""

from ponas import (
    Constraint,
    GAConfig,
    Metric,
    SlotCostTable,
    brute_force,
    chromosome_loss,
    default_macro,
    specialize,
    synth_table,
    to_loss_domain,
    toy_macro,
)

macro = default_macro()
costs = SlotCostTable.from_macro(macro)
loss = to_loss_domain(synth_table(7))

# One table, four budgets. Tighter ceilings trade predicted accuracy for cost.
print("FLOPs ceiling sweep (population 20, 1000 generations):")
for ceiling in (700_000_000, 500_000_000, 400_000_000, 330_000_000):
    genes, log = specialize(loss, Constraint(Metric.FLOPS, ceiling), macro)
    report = log.best_cost
    print(
        f"  <= {ceiling / 1e6:5.0f}M: loss {log.best_loss:.4f}  "
        f"actual {report.flops / 1e6:6.1f}M flops, {report.params / 1e6:5.2f}M params"
    )

# The same search works against a parameter budget.
genes, log = specialize(loss, Constraint(Metric.PARAMS, 6_000_000), macro)
print(f"\n<= 6.00M params: loss {log.best_loss:.4f}  genes {genes}")

# On spaces small enough to enumerate, the heuristic matches exhaustive search.
small = toy_macro(5, 4)
small_loss = to_loss_domain(synth_table(3, layers=5, candidates=4))
small_costs = SlotCostTable.from_macro(small)
cheapest = small_costs.chromosome_cost((0,) * 5).flops
constraint = Constraint(Metric.FLOPS, int(cheapest * 1.4))
oracle = brute_force(small_loss, constraint, small)
heuristic, _ = specialize(small_loss, constraint, small, GAConfig(generations=200, seed=1))
print(f"\ntoy space: exhaustive {oracle} vs evolved {heuristic}")
print(f"  losses: {chromosome_loss(oracle, small_loss):.4f} "
      f"vs {chromosome_loss(heuristic, small_loss):.4f}")
