import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from ponas import (
    Constraint,
    GAConfig,
    Metric,
    PairedSamples,
    SyntheticEvaluator,
    ValidationError,
    build_table,
    chromosome_loss,
    decode,
    default_macro,
    export_evolution,
    export_importance,
    kendall_tau,
    specialize,
    synth_table,
    to_loss_domain,
    toy_macro,
)
from ponas.accuracy_table import AccuracyLossTable


def test_perfect_concordance():
    assert kendall_tau(PairedSamples([1, 2, 3], [10, 20, 30])) == 1.0


def test_perfect_discordance():
    assert kendall_tau(PairedSamples([1, 2, 3], [3, 2, 1])) == -1.0


def test_one_discordant_pair():
    assert kendall_tau(PairedSamples([1, 2, 3], [2, 1, 3])) == 1 / 3


def test_undefined_when_all_tied():
    with pytest.raises(ValidationError, match="x values"):
        kendall_tau(PairedSamples([1, 1, 1], [1, 2, 3]))
    with pytest.raises(ValidationError, match="y values"):
        kendall_tau(PairedSamples([1, 2, 3], [4, 4, 4]))


def test_paired_samples_validation():
    with pytest.raises(ValidationError):
        PairedSamples([1, 2], [1])
    with pytest.raises(ValidationError):
        PairedSamples([1], [1])
    samples = PairedSamples([1, 2], [3, 4])
    assert len(samples) == 2


unique_floats = st.lists(
    st.integers(min_value=-1000, max_value=1000), min_size=3, max_size=12, unique=True
).map(lambda xs: [float(x) for x in xs])


@given(unique_floats, unique_floats)
def test_antisymmetry_tie_free(xs, ys):
    n = min(len(xs), len(ys))
    xs, ys = xs[:n], ys[:n]
    tau = kendall_tau(PairedSamples(xs, ys))
    flipped = kendall_tau(PairedSamples(xs, [-y for y in ys]))
    assert flipped == -tau


@given(unique_floats, unique_floats)
def test_monotone_transform_invariance(xs, ys):
    n = min(len(xs), len(ys))
    xs, ys = xs[:n], ys[:n]
    tau = kendall_tau(PairedSamples(xs, ys))
    assert kendall_tau(PairedSamples(xs, [3.0 * y + 7.0 for y in ys])) == tau
    assert kendall_tau(PairedSamples([math.exp(x / 500) for x in xs], ys)) == tau


def test_matches_scipy_with_ties():
    rng = np.random.default_rng(17)
    for _ in range(30):
        n = int(rng.integers(3, 15))
        xs = rng.integers(0, 5, size=n).astype(float)
        ys = rng.integers(0, 5, size=n).astype(float)
        if xs.min() == xs.max() or ys.min() == ys.max():
            continue
        ours = kendall_tau(PairedSamples(xs, ys))
        reference = scipy.stats.kendalltau(xs, ys, variant="b").statistic
        assert ours == pytest.approx(reference, abs=1e-12)


def test_bounded():
    rng = np.random.default_rng(3)
    for _ in range(20):
        xs = rng.normal(size=8)
        ys = rng.normal(size=8)
        assert -1.0 <= kendall_tau(PairedSamples(xs, ys)) <= 1.0


def test_predicted_loss_anticorrelates_with_synthetic_accuracy():
    macro = default_macro()
    for world_seed in range(5):
        evaluator = SyntheticEvaluator(world_seed, macro)
        table, _ = build_table(macro, evaluator)
        loss = to_loss_domain(table)
        rng = np.random.default_rng(100 + world_seed)
        sampled = [tuple(int(g) for g in rng.integers(0, 12, size=19)) for _ in range(6)]
        xs = [chromosome_loss(g, loss) for g in sampled]
        ys = [evaluator.eval(decode(g, macro)) for g in sampled]
        assert kendall_tau(PairedSamples(xs, ys)) <= -0.6


def test_export_importance_uniform(tmp_path):
    loss = AccuracyLossTable(deltas=np.zeros((3, 4)))
    path = tmp_path / "imp.csv"
    export_importance(loss, path)
    assert path.read_text() == "layer,max_loss\n0,0.000000\n1,0.000000\n2,0.000000\n"


def test_export_importance_example(tmp_path):
    loss = AccuracyLossTable(deltas=np.array([[0.0, 0.02], [0.01, 0.0]]))
    path = tmp_path / "imp.csv"
    export_importance(loss, path)
    assert path.read_text().splitlines() == ["layer,max_loss", "0,0.020000", "1,0.010000"]


def test_export_evolution_row_count(tmp_path):
    macro = toy_macro(5, 4)
    loss = to_loss_domain(synth_table(2, layers=5, candidates=4))
    _, log = specialize(loss, Constraint(Metric.FLOPS, 2**62), macro,
                        GAConfig(seed=1, generations=37))
    path = tmp_path / "evo.csv"
    export_evolution(log, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "generation,best_loss,mean_loss"
    assert len(lines) == 1 + 37
    assert lines[1].startswith("1,")
    for line in lines[1:]:
        gen, best, mean = line.split(",")
        assert len(best.split(".")[1]) == 6
        # best-so-far never exceeds the population mean (up to CSV rounding)
        assert float(best) <= float(mean) + 1e-6


def test_export_errors_name_path(tmp_path):
    loss = AccuracyLossTable(deltas=np.zeros((1, 2)))
    missing_dir = tmp_path / "no" / "such" / "dir" / "x.csv"
    with pytest.raises(OSError, match="x.csv"):
        export_importance(loss, missing_dir)
