"""Check that the loss table ranks architectures sensibly, then ablate it.

Two questions about a filled table. First: does low predicted loss line up
with high evaluator accuracy across whole networks, not just single layers?
Kendall's tau over a handful of sampled chromosomes answers that; the sign
should be strongly negative. Second: which layers carry the ranking? Fixing
the worst network one layer at a time shows the per-layer stakes.

Run with: python3 demos/04_rank_correlation_and_ablation.py
"""

import numpy as np

from ponas import (
    PairedSamples,
    SyntheticEvaluator,
    build_table,
    chromosome_loss,
    decode,
    default_macro,
    improve_at,
    kendall_tau,
    layer_importance,
    to_loss_domain,
    worst_network,
)

macro = default_macro()
evaluator = SyntheticEvaluator(0, macro)
table, _ = build_table(macro, evaluator)
loss = to_loss_domain(table)

rng = np.random.default_rng(100)
sampled = [tuple(int(g) for g in rng.integers(0, 12, size=19)) for _ in range(6)]
predicted = [chromosome_loss(genes, loss) for genes in sampled]
measured = [evaluator.eval(decode(genes, macro)) for genes in sampled]

print("sampled architectures, predicted loss vs measured accuracy:")
for genes, pred, acc in zip(sampled, predicted, measured):
    print(f"  {''.join(f'{g:x}' for g in genes)}  loss {pred:.4f}  acc {acc:.4f}")

tau = kendall_tau(PairedSamples(predicted, measured))
print(f"\nKendall tau: {tau:+.4f} (negative: lower predicted loss, higher accuracy)")

# Ablation: start from the worst chromosome the table can express, then swap
# in the best block at a single layer.
worst = worst_network(loss)
base = chromosome_loss(worst, loss)
importance = layer_importance(loss)
most = int(np.argmax(importance))
least = int(np.argmin(importance))

print(f"\nworst network loss: {base:.4f}")
for label, layer in [("most important", most), ("least important", least)]:
    improved = chromosome_loss(improve_at(worst, layer, loss), loss)
    print(f"  fix {label} layer {layer:2d}: {base:.4f} -> {improved:.4f}"
          f"  (gain {base - improved:.4f})")
