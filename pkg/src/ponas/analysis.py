"""Rank correlation and CSV exports for ablation studies.

Kendall's tau here is the tie-corrected tau-b, computed by direct pair
enumeration. Sample sizes are tiny (six architectures in the motivating
study), so the O(n^2) loop is the honest implementation and doubles as an
easy target for cross-checking against scipy in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .accuracy_table import AccuracyLossTable, layer_importance
from .errors import ValidationError
from .specializer import EvolutionLog


@dataclass(frozen=True)
class PairedSamples:
    """Aligned (x, y) observations, e.g. predicted loss vs measured accuracy."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __init__(self, xs, ys):
        xs = tuple(float(x) for x in xs)
        ys = tuple(float(y) for y in ys)
        if len(xs) != len(ys):
            raise ValidationError(
                f"paired samples must align: {len(xs)} xs vs {len(ys)} ys"
            )
        if len(xs) < 2:
            raise ValidationError(f"need at least 2 pairs, got {len(xs)}")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return len(self.xs)


def kendall_tau(samples: PairedSamples) -> float:
    """Tie-corrected Kendall rank correlation (tau-b) in [-1, 1].

    (C - D) / sqrt((P - Tx)(P - Ty)) where P = n(n-1)/2 and Tx, Ty count
    pairs tied in x resp. y. Undefined when either variable is constant.
    """
    xs, ys = samples.xs, samples.ys
    if min(xs) == max(xs):
        raise ValidationError("correlation undefined: all x values are tied")
    if min(ys) == max(ys):
        raise ValidationError("correlation undefined: all y values are tied")
    n = len(xs)
    concordant = discordant = tied_x = tied_y = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = xs[j] - xs[i]
            dy = ys[j] - ys[i]
            if dx == 0:
                tied_x += 1
            if dy == 0:
                tied_y += 1
            if dx == 0 or dy == 0:
                continue
            if (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    pairs = n * (n - 1) // 2
    return (concordant - discordant) / math.sqrt(
        (pairs - tied_x) * (pairs - tied_y)
    )


def export_importance(loss: AccuracyLossTable, path) -> None:
    """Write per-layer maximum loss as CSV (header ``layer,max_loss``)."""
    lines = ["layer,max_loss"]
    for layer, value in enumerate(layer_importance(loss)):
        lines.append(f"{layer},{value:.6f}")
    _write_lines(path, lines)


def export_evolution(log: EvolutionLog, path) -> None:
    """Write the per-generation loss curve as CSV (one row per generation)."""
    lines = ["generation,best_loss,mean_loss"]
    for record in log.records:
        lines.append(f"{record.generation},{record.best_loss:.6f},{record.mean_loss:.6f}")
    _write_lines(path, lines)


def _write_lines(path, lines) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
