import numpy as np
import pytest

from ponas import (
    SyntheticEvaluator,
    TwoStageSchedule,
    ValidationError,
    best_genes,
    block_cost,
    build_table,
    candidate_block,
    crop_plan,
    decode,
    default_macro,
    fairness_schedule,
    largest_block,
    run_manifest,
    toy_macro,
)
from ponas.accuracy_table import AccuracyTable


class CountingEvaluator:
    """Wraps a scoring function and records every gene vector it sees."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = []

    def eval(self, spec):
        self.calls.append(spec.genes)
        return self.fn(spec.genes)


def test_constant_evaluator_ties_break_low():
    macro = toy_macro(3, 4)
    ev = CountingEvaluator(lambda genes: 0.5)
    table, best = build_table(macro, ev)
    assert (table.values == 0.5).all()
    assert best == (0, 0, 0)


def test_evaluator_rewarding_largest_gene():
    macro = toy_macro(4, 5)
    ev = CountingEvaluator(lambda genes: 0.5 + 0.05 * sum(g == 4 for g in genes) / len(genes))
    _, best = build_table(macro, ev)
    assert best == (4, 4, 4, 4)


def test_exact_evaluation_count():
    macro = default_macro()
    ev = CountingEvaluator(lambda genes: 0.5)
    build_table(macro, ev)
    assert len(ev.calls) == 228

    small = toy_macro(3, 5)
    ev2 = CountingEvaluator(lambda genes: 0.5)
    build_table(small, ev2)
    assert len(ev2.calls) == 15


def test_progressive_call_structure():
    """Layer l is scored with the best prefix, candidate i, largest-block tail."""
    macro = toy_macro(4, 3)
    ev = CountingEvaluator(lambda genes: 0.4 + 0.01 * genes[min(2, len(genes) - 1)])
    table, best = build_table(macro, ev)
    suffix = macro.num_candidates - 1
    k = 0
    for layer in range(4):
        for cand in range(3):
            genes = ev.calls[k]
            assert genes[:layer] == best[:layer]
            assert genes[layer] == cand
            assert genes[layer + 1:] == (suffix,) * (4 - 1 - layer)
            k += 1


def test_best_matches_row_best():
    macro = default_macro()
    table, best = build_table(macro, SyntheticEvaluator(3, macro))
    assert best == best_genes(table)


def test_thread_count_does_not_change_output():
    macro = default_macro()
    t1, b1 = build_table(macro, SyntheticEvaluator(8, macro), threads=1)
    t4, b4 = build_table(macro, SyntheticEvaluator(8, macro), threads=4)
    assert np.array_equal(t1.values, t4.values)
    assert b1 == b4


def test_repeated_runs_identical():
    macro = default_macro()
    t1, b1 = build_table(macro, SyntheticEvaluator(8, macro))
    t2, b2 = build_table(macro, SyntheticEvaluator(8, macro))
    assert np.array_equal(t1.values, t2.values)
    assert b1 == b2


def test_out_of_range_evaluator_named():
    macro = toy_macro(2, 3)

    class Bad:
        def eval(self, spec):
            return 1.5 if spec.genes[0] == 1 else 0.5

    with pytest.raises(ValidationError, match="layer 0.*candidate 1"):
        build_table(macro, Bad())


def test_fairness_schedule_properties():
    sched = fairness_schedule(7, 12, 3)
    assert len(sched.rounds) == 3
    for perm in sched.rounds:
        assert sorted(perm) == list(range(12))
    counts = {}
    for perm in sched.rounds:
        for i in perm:
            counts[i] = counts.get(i, 0) + 1
    assert all(c == 3 for c in counts.values())
    assert sched == fairness_schedule(7, 12, 3)
    with pytest.raises(ValidationError):
        fairness_schedule(7, 12, 0)


def test_two_stage_schedule_defaults():
    sched = TwoStageSchedule()
    assert sched.meta_epochs == 50
    assert sched.finetune_epochs_per_layer == 3
    assert sched.meta_lr == 0.1
    assert sched.finetune_lr == 0.001
    assert sched.lr_decay_epochs == (20, 40)
    assert sched.batch_size == 256
    with pytest.raises(ValidationError):
        TwoStageSchedule(meta_epochs=0)


def test_crop_plan_identity_for_largest():
    slot = default_macro().searchable_slots[0]
    plan = crop_plan(largest_block(), slot)
    assert plan.source == plan.target
    for name, shape in plan.target.items():
        assert plan.crop_map[name] == tuple((0, d) for d in shape)


def test_crop_plan_kernel_centering():
    slot = default_macro().searchable_slots[0]
    plan = crop_plan(candidate_block(0), slot)  # kernel 3
    ranges = plan.crop_map["depthwise_weight"]
    assert ranges[2] == (2, 5)
    assert ranges[3] == (2, 5)
    plan5 = crop_plan(candidate_block(4), slot)  # kernel 5
    assert plan5.crop_map["depthwise_weight"][2] == (1, 6)


def test_crop_plan_channels_leading_and_se_dropped():
    slot = default_macro().searchable_slots[2]  # 56x56, 32 -> 40
    plan = crop_plan(candidate_block(2), slot)  # k3 e6 no-SE
    assert plan.crop_map["expand_weight"][0] == (0, 6 * 32)
    assert "se_reduce_weight" not in plan.target
    plan_se = crop_plan(candidate_block(3), slot)  # k3 e6 SE
    assert "se_reduce_weight" in plan_se.target


def test_crop_plan_within_bounds_for_all_candidates():
    for slot in default_macro().searchable_slots:
        for i in range(12):
            plan = crop_plan(candidate_block(i), slot)
            for name, ranges in plan.crop_map.items():
                source = plan.source[name]
                for (start, stop), dim in zip(ranges, source):
                    assert 0 <= start <= stop <= dim


def test_crop_plan_matches_cost_model_params():
    # Cropped tensors cover everything except the normalization parameters:
    # 2 per channel after each of expand, depthwise, and project.
    for slot in default_macro().searchable_slots[:3]:
        for i in range(12):
            block = candidate_block(i)
            plan = crop_plan(block, slot)
            cexp = block.expansion * slot.in_channels
            norm = 2 * cexp + 2 * cexp + 2 * slot.out_channels
            assert plan.target_parameter_count() == block_cost(block, slot).params - norm


def test_crop_plan_rejects_fixed_slot():
    with pytest.raises(ValidationError):
        crop_plan(largest_block(), default_macro().slots[0])


def test_run_manifest_fields():
    macro = default_macro()
    table, best = build_table(macro, SyntheticEvaluator(1, macro))
    doc = run_manifest(TwoStageSchedule(), 1, table, best)
    assert set(doc) == {"schedule", "seed", "evaluations", "table", "best_genes"}
    assert doc["evaluations"] == 228
    assert doc["seed"] == 1
    assert doc["best_genes"] == list(best)
    assert doc["table"]["format"] == "ponas-acc-table-v1"


def test_synthetic_evaluator_contract():
    macro = default_macro()
    ev1 = SyntheticEvaluator(5, macro)
    ev2 = SyntheticEvaluator(5, macro)
    spec = decode((4,) * 19, macro)
    assert ev1.eval(spec) == ev2.eval(spec)
    assert 0.0 <= ev1.eval(spec) <= 1.0
    assert ev1.eval(spec) != SyntheticEvaluator(6, macro).eval(spec)
    with pytest.raises(ValidationError):
        ev1.eval(decode((0,) * 3, toy_macro(3, 4)))


def test_build_table_returns_valid_table():
    macro = toy_macro(5, 4)
    table, _ = build_table(macro, SyntheticEvaluator(2, macro))
    assert isinstance(table, AccuracyTable)
    assert (table.layers, table.candidates) == (5, 4)
