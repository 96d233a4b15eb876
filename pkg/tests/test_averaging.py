import math
import random
from fractions import Fraction

import pytest

import seqchaos.systems as sy
from seqchaos.averaging import (
    ArcCell,
    CylinderCell,
    average_trace,
    cylinder_partition,
    disintegration_consistency,
    dyadic_arcs,
    empirical_measure,
    ergodic_average,
    geometric_checkpoints,
    very_good_deviation,
)
from seqchaos.errors import ConfigError
from seqchaos.observables import (
    Constant,
    CylinderIndicator,
    LinearCombination,
    TrigOnRotation,
)
from seqchaos.seqgen import SequenceSpec

FAIR = sy.FullShift.uniform(2)
GOLDEN = sy.Rotation.golden()
NATURALS = SequenceSpec.naturals()
PRIMES = SequenceSpec.primes()


def brute_average(system, x, f, seq, n):
    # reference path: explicit orbit iteration, no vectorization
    from seqchaos.seqgen import generate_prefix

    vals = [f.value(system, sy.iterate(system, x, m)) for m in generate_prefix(seq, n)]
    return math.fsum(vals) / n


def test_fixed_point_average_is_one():
    x = sy.PeriodicPoint((0,), 2)
    f = CylinderIndicator(((0, 0),))
    for seq in (NATURALS, PRIMES, SequenceSpec.lacunary(2)):
        assert ergodic_average(FAIR, x, f, seq, 20) == 1.0


def test_rotation_four_cycle_cancels():
    rot = sy.Rotation.from_fraction(Fraction(1, 4))
    a = ergodic_average(rot, 0, TrigOnRotation(1, "cos"), NATURALS, 4)
    assert abs(a) < 1e-12


def test_vectorized_average_matches_bruteforce():
    x = sy.sample_point(FAIR, 7)
    f = CylinderIndicator(((0, 0),))
    for n in (1, 17, 1000):
        assert ergodic_average(FAIR, x, f, PRIMES, n) == pytest.approx(
            brute_average(FAIR, x, f, PRIMES, n), abs=1e-14
        )
    g = TrigOnRotation(1, "cos")
    assert ergodic_average(GOLDEN, 5, g, NATURALS, 500) == pytest.approx(
        brute_average(GOLDEN, 5, g, NATURALS, 500), abs=1e-12
    )


def test_bernoulli_average_near_half_across_seeds():
    f = CylinderIndicator(((0, 0),))
    devs = [
        abs(ergodic_average(FAIR, sy.sample_point(FAIR, s), f, PRIMES, 10_000) - 0.5)
        for s in range(30)
    ]
    assert max(devs) < 0.03


def test_average_within_observable_bounds():
    f = CylinderIndicator(((0, 0), (3, 1)))
    x = sy.sample_point(FAIR, 3)
    a = ergodic_average(FAIR, x, f, NATURALS, 1000)
    lo, hi = f.bounds()
    assert lo - 1e-12 <= a <= hi + 1e-12


def test_linearity():
    rng = random.Random(0)
    f = CylinderIndicator(((0, 0),))
    g = CylinderIndicator(((1, 1),))
    x = sy.sample_point(FAIR, 12)
    for _ in range(20):
        alpha = rng.uniform(-1, 1)
        beta = rng.uniform(-1, 1)
        combo = LinearCombination(((alpha, f), (beta, g)))
        lhs = ergodic_average(FAIR, x, combo, PRIMES, 2000)
        rhs = alpha * ergodic_average(FAIR, x, f, PRIMES, 2000) + beta * ergodic_average(
            FAIR, x, g, PRIMES, 2000
        )
        assert abs(lhs - rhs) < 1e-10


# ---------------------------------------------------------------------------
# traces


def test_trace_constant_observable():
    tr = average_trace(FAIR, sy.sample_point(FAIR, 1), Constant(0.25), NATURALS, [10, 100, 1000])
    assert all(c.value == 0.25 for c in tr.checkpoints)
    assert tr.liminf_proxy == tr.limsup_proxy == 0.25


def test_trace_fixed_point_complement():
    x = sy.PeriodicPoint((0,), 2)
    tr = average_trace(FAIR, x, CylinderIndicator(((0, 1),)), NATURALS, [10, 100])
    assert all(c.value == 0.0 for c in tr.checkpoints)


def test_trace_matches_fresh_averages_bit_for_bit():
    x = sy.sample_point(FAIR, 77)
    f = CylinderIndicator(((0, 0),))
    tr = average_trace(FAIR, x, f, PRIMES, [10, 100, 1000])
    for cp in tr.checkpoints:
        assert cp.value == ergodic_average(FAIR, x, f, PRIMES, cp.n)


def test_trace_running_extrema():
    x = sy.sample_point(FAIR, 5)
    f = CylinderIndicator(((0, 0),))
    tr = average_trace(FAIR, x, f, NATURALS, geometric_checkpoints(10, 10_000))
    values = [c.value for c in tr.checkpoints]
    for i, cp in enumerate(tr.checkpoints):
        assert cp.running_min == min(values[: i + 1])
        assert cp.running_max == max(values[: i + 1])
        assert cp.running_min <= cp.value <= cp.running_max


def test_cesaro_domination_on_doubling_ladder():
    # for 0 <= f <= 1 the averages at N and 2N differ by at most 1/2
    f = CylinderIndicator(((0, 0),))
    for seed in range(10):
        x = sy.sample_point(FAIR, seed)
        tr = average_trace(FAIR, x, f, NATURALS, [2**k for k in range(1, 13)])
        vals = [c.value for c in tr.checkpoints]
        assert all(abs(b - a) <= 0.5 + 1e-12 for a, b in zip(vals, vals[1:]))


def test_trace_csv_shape():
    tr = average_trace(FAIR, sy.sample_point(FAIR, 1), Constant(1.0), NATURALS, [5, 10])
    rows = tr.csv_rows()
    assert len(rows) == 2 and len(rows[0]) == len(tr.CSV_HEADER)


# ---------------------------------------------------------------------------
# deviation from the declared integral


def test_deviation_requires_declared_integral():
    prod = sy.ProductSystem((FAIR, GOLDEN))
    f = CylinderIndicator(((0, 0),))
    with pytest.raises(ConfigError):
        very_good_deviation(prod, [1, 2], f, NATURALS, 10)


def test_golden_rotation_deviation_with_closed_form_bound():
    # |sum_{k<=N} e(k alpha)| <= 1/(2 ||alpha||) bounds the cosine average
    f = TrigOnRotation(1, "cos")
    n = 10_000
    alpha = sy.GOLDEN_CONJUGATE / 2.0**128
    dist_to_int = min(alpha, 1 - alpha)
    bound = 1 / (2 * dist_to_int) / n
    dev = very_good_deviation(GOLDEN, list(range(10)), f, NATURALS, n)
    assert dev <= bound + 1e-12
    assert dev < 0.01


def test_fractional_power_deviation_desk_scale():
    f = TrigOnRotation(1, "cos")
    dev = very_good_deviation(
        GOLDEN, list(range(5)), f, SequenceSpec.fractional_power_floor(Fraction(3, 2)), 20_000
    )
    assert dev < 0.05


def test_bernoulli_cylinder_deviation():
    f = CylinderIndicator(((0, 0),))
    dev = very_good_deviation(FAIR, list(range(100)), f, NATURALS, 100_000)
    assert dev < 0.02


# ---------------------------------------------------------------------------
# empirical measures


def test_trivial_partition():
    m = empirical_measure(FAIR, sy.sample_point(FAIR, 2), [CylinderCell(())], NATURALS, 50)
    assert m.weights == (1.0,)


def test_rotation_quarter_cycle_arcs():
    rot = sy.Rotation.from_fraction(Fraction(1, 4))
    m = empirical_measure(rot, 0, dyadic_arcs(2), NATURALS, 4000)
    assert m.weights == (0.25, 0.25, 0.25, 0.25)


def test_weights_sum_to_one():
    x = sy.sample_point(FAIR, 8)
    cells = cylinder_partition(2, [0, 1, 2])
    m = empirical_measure(FAIR, x, cells, PRIMES, 3000)
    assert abs(sum(m.weights) - 1.0) < 1e-12
    assert all(w >= 0 for w in m.weights)


def test_refined_partition_counts_add_exactly():
    x = sy.sample_point(FAIR, 21)
    coarse = empirical_measure(FAIR, x, cylinder_partition(2, [0]), PRIMES, 2000)
    fine = empirical_measure(FAIR, x, cylinder_partition(2, [0, 1]), PRIMES, 2000)
    # fine cells are ordered with coordinate-0 symbol slowest
    assert coarse.counts[0] == fine.counts[0] + fine.counts[1]
    assert coarse.counts[1] == fine.counts[2] + fine.counts[3]


def test_partition_validation():
    with pytest.raises(ConfigError):
        empirical_measure(
            sy.Rotation.golden(),
            0,
            [ArcCell(0, 1 << 127), ArcCell(1 << 126, 1 << 128)],  # overlap
            NATURALS,
            10,
        )
    with pytest.raises(ConfigError):
        empirical_measure(
            sy.Rotation.golden(),
            0,
            [ArcCell(0, 1 << 126), ArcCell(1 << 127, 1 << 128)],  # gap
            NATURALS,
            10,
        )
    with pytest.raises(ConfigError):
        # missing patterns: not a partition of the shift
        empirical_measure(FAIR, sy.sample_point(FAIR, 0), [CylinderCell(((0, 0),))], NATURALS, 10)


def test_arc_membership_is_exact_on_dyadics():
    rot = sy.Rotation.from_fraction(Fraction(1, 2))
    m = empirical_measure(rot, 0, dyadic_arcs(1), NATURALS, 101)
    # orbit alternates 1/2, 0, 1/2, ... starting at a_1 = 1
    assert m.counts == (50, 51)


# ---------------------------------------------------------------------------
# disintegration consistency


def test_constant_observable_gap_is_zero():
    assert disintegration_consistency(FAIR, Constant(1.0), NATURALS, 100, 20, seed=4) == 0.0


def test_bernoulli_primes_consistency_desk_scale():
    gap = disintegration_consistency(
        FAIR, CylinderIndicator(((0, 0),)), PRIMES, 10_000, 200, seed=6
    )
    assert gap < 0.01


def test_rotation_consistency_desk_scale():
    gap = disintegration_consistency(GOLDEN, TrigOnRotation(1, "cos"), NATURALS, 10_000, 50, seed=6)
    assert gap < 0.01


def test_parallel_map_over_seeds_matches_serial():
    f = CylinderIndicator(((0, 0),))
    serial = very_good_deviation(FAIR, list(range(8)), f, PRIMES, 500, workers=1)
    parallel = very_good_deviation(FAIR, list(range(8)), f, PRIMES, 500, workers=2)
    assert serial == parallel
