"""Genetic search for the minimum-accuracy-loss architecture under a cost cap.

Fitness is a pure table lookup: a chromosome's loss is the sum of its genes'
entries in the accuracy-loss table, so evolving for a new hardware constraint
costs seconds, not GPU time. A brute-force enumerator doubles as the oracle
for validating the search on small instances, and two helpers reconstruct the
worst-block ablation networks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .accuracy_table import AccuracyLossTable
from .cost_model import Constraint, CostReport, SlotCostTable
from .errors import InfeasibleError, SearchSpaceTooLargeError, ValidationError
from .search_space import MacroArchitecture

_INIT_SAMPLING_CAP = 10_000


@dataclass(frozen=True)
class GAConfig:
    """Genetic-algorithm settings.

    Defaults follow the reference setup: population 20 with the top half kept
    as parents, 1000 generations, per-gene mutation probability 0.1.
    ``selection`` picks how the next parents are chosen: "pooled" ranks
    parents and children together (default); "parents_only" never lets
    children displace the parent set.
    """

    population: int = 20
    parents_kept: int | None = None
    generations: int = 1000
    mutation_prob: float = 0.1
    seed: int = 0
    repair_attempts: int = 100
    selection: str = "pooled"
    record_populations: bool = False

    def __post_init__(self):
        if self.population < 4 or self.population % 2 != 0:
            raise ValidationError(
                f"population must be even and >= 4, got {self.population}"
            )
        kept = self.population // 2 if self.parents_kept is None else self.parents_kept
        if kept != self.population // 2:
            raise ValidationError(
                f"parents_kept must be population/2 = {self.population // 2}, got {kept}"
            )
        object.__setattr__(self, "parents_kept", kept)
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValidationError(f"mutation_prob must be in [0, 1], got {self.mutation_prob}")
        if self.generations < 0:
            raise ValidationError(f"generations must be >= 0, got {self.generations}")
        if self.repair_attempts < 1:
            raise ValidationError(f"repair_attempts must be >= 1, got {self.repair_attempts}")
        if self.selection not in ("pooled", "parents_only"):
            raise ValidationError(f"selection must be 'pooled' or 'parents_only'")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_loss: float
    mean_loss: float
    best_genes: tuple[int, ...]


@dataclass(frozen=True)
class EvolutionLog:
    """Per-generation loss trace plus the run's final winner."""

    records: tuple[GenerationRecord, ...]
    best_genes: tuple[int, ...]
    best_loss: float
    best_cost: CostReport
    seed: int
    populations: tuple[tuple[tuple[int, ...], ...], ...] = field(default=(), repr=False)


def chromosome_loss(genes, loss: AccuracyLossTable) -> float:
    """Total accuracy loss of a chromosome: sum of its per-layer table entries."""
    genes = tuple(int(g) for g in genes)
    if len(genes) != loss.layers:
        raise ValidationError(
            f"chromosome has {len(genes)} genes but the loss table has {loss.layers} rows"
        )
    total = 0.0
    for layer, gene in enumerate(genes):
        if not 0 <= gene < loss.candidates:
            raise ValidationError(
                f"gene {layer} = {gene} outside candidate range [0, {loss.candidates})"
            )
        total += float(loss.deltas[layer, gene])
    return total


def worst_network(loss: AccuracyLossTable) -> tuple[int, ...]:
    """Per-layer argmax of the loss table: the worst block everywhere."""
    return tuple(int(i) for i in np.argmax(loss.deltas, axis=1))


def improve_at(genes, layer: int, loss: AccuracyLossTable) -> tuple[int, ...]:
    """Replace one gene with that layer's best (zero-loss) block."""
    genes = tuple(int(g) for g in genes)
    if not 0 <= layer < loss.layers:
        raise ValidationError(f"layer {layer} out of range [0, {loss.layers})")
    improved = list(genes)
    improved[layer] = int(np.argmin(loss.deltas[layer]))
    return tuple(improved)


def _check_dimensions(loss: AccuracyLossTable, costs: SlotCostTable) -> None:
    if costs.num_slots != loss.layers or costs.num_candidates != loss.candidates:
        raise ValidationError(
            f"loss table is {loss.layers}x{loss.candidates} but the cost table is "
            f"{costs.num_slots}x{costs.num_candidates}"
        )


def _cheapest_genes(costs: SlotCostTable, constraint: Constraint) -> tuple[int, ...]:
    from .cost_model import Metric

    table = costs.flops if constraint.metric is Metric.FLOPS else costs.params
    return tuple(min(range(len(row)), key=lambda i: (row[i], i)) for row in table)


def _require_feasible_space(costs: SlotCostTable, constraint: Constraint) -> tuple[int, ...]:
    cheapest = _cheapest_genes(costs, constraint)
    if not costs.feasible(cheapest, constraint):
        cost = costs.chromosome_cost(cheapest)
        raise InfeasibleError(
            f"no feasible architecture: cheapest {constraint.metric.value} is "
            f"{cost.get(constraint.metric)}, ceiling is {constraint.ceiling}",
            cheapest=cost,
        )
    return cheapest


def brute_force(
    loss: AccuracyLossTable,
    constraint: Constraint,
    macro: MacroArchitecture | None = None,
    *,
    costs: SlotCostTable | None = None,
) -> tuple[int, ...]:
    """Exhaustive minimum-loss search; the oracle for validating the GA.

    Guarded against spaces above 10^7 chromosomes. Ties break lexicographically
    (enumeration order). Intended for tests and the CLI oracle command only.
    """
    if costs is None:
        if macro is None:
            raise ValidationError("brute_force needs a macro or an explicit cost table")
        costs = SlotCostTable.from_macro(macro)
    _check_dimensions(loss, costs)
    num_layers, num_cands = loss.layers, loss.candidates
    if num_cands ** num_layers > 10_000_000:
        raise SearchSpaceTooLargeError(
            f"{num_cands}^{num_layers} chromosomes exceed the enumeration guard of 10^7"
        )
    _require_feasible_space(costs, constraint)
    loss_rows = [[float(v) for v in row] for row in loss.deltas]
    best_genes = None
    best_loss = None
    for genes in itertools.product(range(num_cands), repeat=num_layers):
        if not costs.feasible(genes, constraint):
            continue
        value = 0.0
        for layer, gene in enumerate(genes):
            value += loss_rows[layer][gene]
        if best_loss is None or value < best_loss:
            best_loss = value
            best_genes = genes
    return best_genes


def _mutate(genes, rng, prob: float, num_cands: int) -> tuple[int, ...]:
    # Mutation retargets to a uniformly random *different* index, never a no-op.
    if num_cands < 2 or prob == 0.0:
        return genes
    mask = rng.random(len(genes)) < prob
    if not mask.any():
        return genes
    out = list(genes)
    for pos in np.flatnonzero(mask):
        new = int(rng.integers(0, num_cands - 1))
        if new >= out[pos]:
            new += 1
        out[pos] = new
    return tuple(out)


def specialize(
    loss: AccuracyLossTable,
    constraint: Constraint,
    macro: MacroArchitecture | None = None,
    cfg: GAConfig = GAConfig(),
    *,
    costs: SlotCostTable | None = None,
) -> tuple[tuple[int, ...], EvolutionLog]:
    """Evolve the minimum-loss chromosome that satisfies the cost constraint.

    The population is seeded with the zero-loss startpoint (when feasible)
    plus rejection-sampled feasible chromosomes. Each generation ranks by
    loss (ties lexicographic), keeps the top half as parents, pairs them by
    rank, applies single-point crossover at a uniform cut and per-gene
    mutation, and feasibility-repairs every child: an infeasible child is
    regenerated with a fresh cut and mutation up to ``repair_attempts`` times,
    then falls back to a clone of its parent. Populations therefore only ever
    contain feasible chromosomes. Returns the best feasible chromosome seen
    at any point in the run, with the per-generation log.

    Raises :class:`InfeasibleError` when even the cheapest chromosome exceeds
    the ceiling. Deterministic for a fixed ``cfg.seed``.
    """
    if costs is None:
        if macro is None:
            raise ValidationError("specialize needs a macro or an explicit cost table")
        costs = SlotCostTable.from_macro(macro)
    _check_dimensions(loss, costs)
    num_layers, num_cands = loss.layers, loss.candidates
    cheapest = _require_feasible_space(costs, constraint)

    rng = np.random.default_rng(cfg.seed)
    loss_rows = [[float(v) for v in row] for row in loss.deltas]

    def loss_of(genes) -> float:
        total = 0.0
        for layer, gene in enumerate(genes):
            total += loss_rows[layer][gene]
        return total

    # Initial population: startpoint first, then rejection sampling, then a
    # greedy fallback that downgrades the least important layers to the
    # cheapest block until the constraint is met.
    startpoint = tuple(int(i) for i in np.argmin(loss.deltas, axis=1))
    population: list[tuple[float, tuple[int, ...]]] = []
    if costs.feasible(startpoint, constraint):
        population.append((loss_of(startpoint), startpoint))
    draws = 0
    while len(population) < cfg.population and draws < _INIT_SAMPLING_CAP:
        genes = tuple(int(g) for g in rng.integers(0, num_cands, size=num_layers))
        draws += 1
        if costs.feasible(genes, constraint):
            population.append((loss_of(genes), genes))
    if len(population) < cfg.population:
        fallback = list(startpoint)
        importance = loss.deltas.max(axis=1)
        for layer in np.argsort(importance, kind="stable"):
            if costs.feasible(tuple(fallback), constraint):
                break
            fallback[int(layer)] = cheapest[int(layer)]
        fallback = tuple(fallback)
        while len(population) < cfg.population:
            population.append((loss_of(fallback), fallback))

    best_loss, best_genes = min(population, key=lambda e: (e[0], e[1]))

    records: list[GenerationRecord] = []
    population_trace: list[tuple[tuple[int, ...], ...]] = []
    parents: list[tuple[float, tuple[int, ...]]] | None = None

    for generation in range(1, cfg.generations + 1):
        if parents is None or cfg.selection == "pooled":
            parents = sorted(population, key=lambda e: (e[0], e[1]))[: cfg.parents_kept]

        children: list[tuple[float, tuple[int, ...]]] = []
        for a in range(0, len(parents), 2):
            pair = parents[a : a + 2]
            if len(pair) < 2:
                children.append(pair[0])
                continue
            (_, mother), (_, father) = pair
            for child_pos in (0, 1):
                child = None
                for _ in range(cfg.repair_attempts):
                    cut = int(rng.integers(1, num_layers)) if num_layers > 1 else 1
                    if child_pos == 0:
                        crossed = mother[:cut] + father[cut:]
                    else:
                        crossed = father[:cut] + mother[cut:]
                    candidate = _mutate(crossed, rng, cfg.mutation_prob, num_cands)
                    if costs.feasible(candidate, constraint):
                        child = candidate
                        break
                if child is None:
                    child = pair[child_pos][1]  # repair exhausted: clone the parent
                children.append((loss_of(child), child))

        population = parents + children
        for value, genes in children:
            if value < best_loss or (value == best_loss and genes < best_genes):
                best_loss, best_genes = value, genes

        mean_loss = sum(v for v, _ in population) / len(population)
        records.append(
            GenerationRecord(
                generation=generation,
                best_loss=best_loss,
                mean_loss=mean_loss,
                best_genes=best_genes,
            )
        )
        if cfg.record_populations:
            population_trace.append(tuple(genes for _, genes in population))

    log = EvolutionLog(
        records=tuple(records),
        best_genes=best_genes,
        best_loss=best_loss,
        best_cost=costs.chromosome_cost(best_genes),
        seed=cfg.seed,
        populations=tuple(population_trace),
    )
    return best_genes, log
