"""Averaged pairwise-distance statistics of orbit tuples, and explicit
construction of finite scrambled families in full shifts.

For an n-tuple (x_1..x_n) and a time sequence {a_k}, two quantities are
tracked along a checkpoint ladder:

    max-average(N) = (1/N) sum_{k<=N} max_{i<j} d(T**(a_k) x_i, T**(a_k) x_j)
    min-average(N) = (1/N) sum_{k<=N} min_{i<j} d(T**(a_k) x_i, T**(a_k) x_j)

A tuple behaves chaotically in the mean sense when the running minimum
of the max-average (the liminf proxy) is near zero while the running
maximum of the min-average (the limsup proxy) stays above a positive
constant.  :func:`build_scrambled_family` manufactures such tuples in a
full shift by alternating coalescence phases (all points carry symbol 0
on a coordinate block covering the phase's sampling times plus the
metric window) with separation phases (point i carries constant symbol
i), and returns a certificate of per-phase bounds in exact rational
arithmetic; :func:`verify_scrambled` re-measures the averages and
checks every certified inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import systems as sy
from .averaging import SUM_ERROR_BOUND, _validate_checkpoints
from .errors import ConfigError, DomainError, SequenceOverflowError
from .pool import parallel_map
from .prf import child_seed
from .seqgen import MAX_TERM, SequenceSpec, times_array

# ---------------------------------------------------------------------------
# vectorized distance series


def _symbol_runs(point) -> list[tuple[int, int]] | None:
    """Change points [(start, symbol), ...] of a piecewise-constant point.

    Returns None when the point is not piecewise constant (e.g. PRF-seeded
    tapes), in which case callers fall back to windowed evaluation.
    """
    if isinstance(point, sy.PeriodicPoint):
        if len(set(point.word)) == 1:
            return [(0, point.word[0])]
        return None
    if isinstance(point, sy.ShiftedPoint):
        base = _symbol_runs(point.base)
        if base is None:
            return None
        out: list[tuple[int, int]] = []
        for start, symbol in base:
            start -= point.offset
            if start <= 0:
                out = [(0, symbol)]
            else:
                out.append((start, symbol))
        return out
    if isinstance(point, sy.BlockScheduledPoint):
        if not all(isinstance(c, int) for c in point.contents):
            return None
        runs = [(0, point.contents[0])]
        for start, symbol in zip(point.boundaries, point.contents[1:]):
            if symbol != runs[-1][1]:
                runs.append((start, symbol))
        return runs
    return None


def _difference_intervals(x, y) -> list[tuple[int, int | None]] | None:
    """Coordinate intervals on which two piecewise-constant points differ."""
    rx = _symbol_runs(x)
    ry = _symbol_runs(y)
    if rx is None or ry is None:
        return None

    def symbol_at(runs: list[tuple[int, int]], pos: int) -> int:
        lo, hi = 0, len(runs)
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if runs[mid][0] <= pos:
                lo = mid
            else:
                hi = mid
        return runs[lo][1]

    marks = sorted({s for s, _ in rx} | {s for s, _ in ry})
    intervals: list[tuple[int, int | None]] = []
    open_start: int | None = None
    for pos in marks:
        differ = symbol_at(rx, pos) != symbol_at(ry, pos)
        if differ and open_start is None:
            open_start = pos
        elif not differ and open_start is not None:
            intervals.append((open_start, pos))
            open_start = None
    if open_start is not None:
        intervals.append((open_start, None))
    return intervals


def _series_from_intervals(
    intervals: list[tuple[int, int | None]], times: np.ndarray, window: int
) -> np.ndarray:
    # contribution of a difference interval [s, e) to d(T**m x, T**m y):
    #   2**-clip(s - m, 0, w) - 2**-clip(e - m, 0, w)
    out = np.zeros(len(times), dtype=np.float64)
    tail = 2.0 ** (-window)
    for start, end in intervals:
        lo = np.clip(start - times, 0, window).astype(np.int32)
        out += np.ldexp(1.0, -lo)
        if end is None:
            out -= tail
        else:
            hi = np.clip(end - times, 0, window).astype(np.int32)
            out -= np.ldexp(1.0, -hi)
    return out


def _series_from_windows(x, y, times: np.ndarray, window: int) -> np.ndarray:
    if len(times) and int(times.max()) > MAX_TERM - window:
        raise DomainError("times too close to the 2**63 - 1 cap for the metric window")
    weights = np.ldexp(1.0, -np.arange(1, window + 1))
    offsets = np.arange(window, dtype=np.int64)
    out = np.empty(len(times), dtype=np.float64)
    chunk = max(1, (1 << 21) // window)
    for lo in range(0, len(times), chunk):
        t = times[lo : lo + chunk]
        idx = (t[:, None] + offsets[None, :]).ravel()
        diff = x.coordinates(idx) != y.coordinates(idx)
        out[lo : lo + len(t)] = diff.reshape(len(t), window).astype(np.float64) @ weights
    return out


def distance_series(system, x, y, times: np.ndarray) -> np.ndarray:
    """d(T**m x, T**m y) for every m in ``times``.

    Full shifts with the summed metric get a vectorized path (interval
    algebra for piecewise-constant points, windowed PRF evaluation
    otherwise); both agree bit-for-bit with the scalar metric.  Other
    systems evaluate pointwise.
    """
    if (
        isinstance(system, sy.FullShift)
        and system.side == sy.ONE_SIDED
        and system.metric == sy.METRIC_SUMMED
    ):
        intervals = _difference_intervals(x, y)
        if intervals is not None:
            return _series_from_intervals(intervals, times, system.window)
        return _series_from_windows(x, y, times, system.window)
    return np.array(
        [
            sy.distance(system, sy.iterate(system, x, int(m)), sy.iterate(system, y, int(m)))
            for m in times
        ],
        dtype=np.float64,
    )


# ---------------------------------------------------------------------------
# tuple reports


@dataclass(frozen=True)
class TupleCheckpoint:
    n: int
    max_average: float
    min_average: float


@dataclass(frozen=True)
class TupleChaosReport:
    tuple_size: int
    checkpoints: tuple[TupleCheckpoint, ...]
    liminf_proxy: float  # min over checkpoints of the max-average
    limsup_proxy: float  # max over checkpoints of the min-average
    err_bound: float
    eta: float | None = None  # constructor's claimed lower bound for the limsup proxy

    CSV_HEADER = ["N", "max_average", "min_average", "err_bound"]

    def csv_rows(self) -> list[list]:
        return [[c.n, c.max_average, c.min_average, self.err_bound] for c in self.checkpoints]

    def to_json_dict(self) -> dict:
        return {
            "tuple_size": self.tuple_size,
            "liminf_proxy": self.liminf_proxy,
            "limsup_proxy": self.limsup_proxy,
            "eta": self.eta,
            "err_bound": self.err_bound,
            "checkpoints": [
                {"N": c.n, "max_average": c.max_average, "min_average": c.min_average}
                for c in self.checkpoints
            ],
        }


def tuple_distance_averages(
    system, points: Sequence, seq: SequenceSpec, checkpoints: Sequence[int], eta: float | None = None
) -> TupleChaosReport:
    """One pass over k <= max(checkpoints) recording both averages."""
    if len(points) < 2:
        raise DomainError("need at least two points")
    cps = _validate_checkpoints(checkpoints)
    ts = times_array(seq, cps[-1])
    pair_series = [
        distance_series(system, points[i], points[j], ts)
        for i in range(len(points))
        for j in range(i + 1, len(points))
    ]
    dmax = np.maximum.reduce(pair_series)
    dmin = np.minimum.reduce(pair_series)
    entries = [
        TupleCheckpoint(n, math.fsum(dmax[:n]) / n, math.fsum(dmin[:n]) / n) for n in cps
    ]
    return TupleChaosReport(
        tuple_size=len(points),
        checkpoints=tuple(entries),
        liminf_proxy=min(e.max_average for e in entries),
        limsup_proxy=max(e.min_average for e in entries),
        err_bound=sy.metric_error_bound(system) + SUM_ERROR_BOUND,
        eta=eta,
    )


# ---------------------------------------------------------------------------
# scrambled families


@dataclass(frozen=True)
class ScrambledFamilyCertificate:
    """Analytic per-phase guarantees for a constructed family.

    Phases alternate starting with coalescence: phase t (1-based) ends at
    checkpoint N_t = growth**t and owns coordinates up to M_t = a_{N_t} +
    window + 1.  ``coalescence_bounds[j]`` bounds the max-average at
    N_{2j+1} from above; ``separation_bounds[j]`` bounds the min-average
    at N_{2j+2} from below, discounting the ``in_zone_counts`` sampling
    times whose metric window still overlaps the previous phase's block.
    ``c_star`` is the family's claimed lower bound for the limsup proxy.
    All bounds are exact rationals.
    """

    tuple_size: int
    alphabet_size: int
    growth: int
    phase_pairs: int
    window: int
    sequence: str
    checkpoint_indices: tuple[int, ...]  # N_1 .. N_{2J}
    sequence_at_checkpoints: tuple[int, ...]  # a_{N_1} .. a_{N_{2J}}
    coordinate_boundaries: tuple[int, ...]  # M_1 .. M_{2J}
    coalescence_bounds: tuple[Fraction, ...]
    separation_bounds: tuple[Fraction, ...]
    in_zone_counts: tuple[int, ...]
    c_star: Fraction

    def to_json_dict(self) -> dict:
        return {
            "tuple_size": self.tuple_size,
            "alphabet_size": self.alphabet_size,
            "growth": self.growth,
            "phase_pairs": self.phase_pairs,
            "window": self.window,
            "sequence": self.sequence,
            "checkpoint_indices": list(self.checkpoint_indices),
            "sequence_at_checkpoints": list(self.sequence_at_checkpoints),
            "coordinate_boundaries": list(self.coordinate_boundaries),
            "coalescence_bounds": [str(b) for b in self.coalescence_bounds],
            "separation_bounds": [str(b) for b in self.separation_bounds],
            "in_zone_counts": list(self.in_zone_counts),
            "c_star": str(self.c_star),
        }


def _separation_zones(cert: ScrambledFamilyCertificate) -> list[tuple[int, int]]:
    """Coordinate ranges carrying the distinct per-point symbols.

    A separation phase writes on [M_{t-1}, a_{N_t} + 1); everything else
    stays at symbol 0, so a coalescence window never straddles into
    separation content.
    """
    zones = []
    for j in range(cert.phase_pairs):
        t = 2 * j + 1  # 0-based index of separation phase 2j+2
        lo = cert.coordinate_boundaries[t - 1]
        hi = max(lo, cert.sequence_at_checkpoints[t] + 1)
        if hi > lo:
            zones.append((lo, hi))
    return zones


def _family_points(cert: ScrambledFamilyCertificate) -> list[sy.BlockScheduledPoint]:
    zones = _separation_zones(cert)
    points = []
    for i in range(cert.tuple_size):
        boundaries: list[int] = []
        contents: list[int] = [0]
        for lo, hi in zones:
            boundaries.extend((lo, hi))
            contents.extend((i, 0))
        points.append(
            sy.BlockScheduledPoint(
                boundaries=tuple(boundaries),
                contents=tuple(contents),
                alphabet_size=cert.alphabet_size,
                side=sy.ONE_SIDED,
            )
        )
    return points


def build_scrambled_family(
    seq: SequenceSpec,
    tuple_size: int,
    growth: int,
    phase_pairs: int,
    window: int = sy.DEFAULT_WINDOW,
    alphabet_size: int | None = None,
) -> tuple[list[sy.BlockScheduledPoint], ScrambledFamilyCertificate]:
    """Construct n block-scheduled points that are mean-chaotic along ``seq``.

    Checkpoints follow N_t = growth**t for t = 1..2*phase_pairs.  The
    sequence prefix is streamed ahead of construction and must be
    strictly increasing.
    """
    if tuple_size < 2:
        raise ConfigError("tuple_size must be >= 2")
    if growth < 2:
        raise ConfigError("growth must be >= 2")
    if phase_pairs < 1:
        raise ConfigError("phase_pairs must be >= 1")
    if window < 1:
        raise ConfigError("window must be >= 1")
    s = tuple_size if alphabet_size is None else alphabet_size
    if s < tuple_size:
        raise ConfigError("alphabet_size must be >= tuple_size")

    n_checkpoints = [growth**t for t in range(1, 2 * phase_pairs + 1)]
    n_max = n_checkpoints[-1]
    a = times_array(seq, n_max)
    if not bool(np.all(a[1:] > a[:-1])):
        raise ConfigError(f"{seq.describe()} prefix is not strictly increasing")

    a_at = [int(a[n - 1]) for n in n_checkpoints]
    if a_at[-1] > MAX_TERM - window - 1:
        raise SequenceOverflowError(n_max, "coordinate boundary would leave the 64-bit range")
    m_bounds = [v + window + 1 for v in a_at]

    tail = Fraction(1, 1 << window)
    coalescence = []
    separation = []
    in_zone = []
    for t in range(1, 2 * phase_pairs + 1):
        n_prev = 1 if t == 1 else n_checkpoints[t - 2]
        n_t = n_checkpoints[t - 1]
        if t % 2 == 1:
            coalescence.append(Fraction(n_prev, n_t) + tail)
        else:
            zone_lo = m_bounds[t - 2]
            # sampling times of the phase whose whole window sits in the zone era
            lo_idx = int(np.searchsorted(a[:n_t], zone_lo, side="left"))
            count = n_t - max(lo_idx, n_prev)
            count = max(count, 0)
            in_zone.append(count)
            separation.append(Fraction(count, 2 * n_t))

    cert = ScrambledFamilyCertificate(
        tuple_size=tuple_size,
        alphabet_size=s,
        growth=growth,
        phase_pairs=phase_pairs,
        window=window,
        sequence=seq.describe(),
        checkpoint_indices=tuple(n_checkpoints),
        sequence_at_checkpoints=tuple(a_at),
        coordinate_boundaries=tuple(m_bounds),
        coalescence_bounds=tuple(coalescence),
        separation_bounds=tuple(separation),
        in_zone_counts=tuple(in_zone),
        c_star=Fraction(growth - 1, 2 * growth),
    )
    return _family_points(cert), cert


@dataclass(frozen=True)
class BoundCheck:
    name: str
    claimed: str
    measured: float
    passed: bool


@dataclass(frozen=True)
class ScrambledVerification:
    report: TupleChaosReport
    checks: tuple[BoundCheck, ...]
    schedule_valid: bool
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "schedule_valid": self.schedule_valid,
            "checks": [
                {"name": c.name, "claimed": c.claimed, "measured": c.measured, "passed": c.passed}
                for c in self.checks
            ],
            "report": self.report.to_json_dict(),
        }


def verify_scrambled(
    points: Sequence, cert: ScrambledFamilyCertificate, system: sy.FullShift, seq: SequenceSpec
) -> ScrambledVerification:
    """Measure the constructed family and check every certified bound.

    Value-level mismatches (a perturbed coordinate boundary, a bound that
    the measurements violate) are reported as failed checks, never as
    exceptions; structural mismatches (wrong point count, incompatible
    system) raise ConfigError.
    """
    if len(points) != cert.tuple_size:
        raise ConfigError("point count does not match the certificate")
    if not isinstance(system, sy.FullShift) or system.side != sy.ONE_SIDED:
        raise ConfigError("scrambled families live in one-sided full shifts")
    if system.window != cert.window:
        raise ConfigError("system metric window does not match the certificate")
    if system.metric != sy.METRIC_SUMMED:
        raise ConfigError("verification requires the summed metric")
    if system.alphabet_size < cert.alphabet_size:
        raise ConfigError("system alphabet too small for the certificate")
    if len(cert.checkpoint_indices) != 2 * cert.phase_pairs:
        raise ConfigError("certificate checkpoint schedule is malformed")

    a = times_array(seq, cert.checkpoint_indices[-1])
    schedule_valid = True
    checks: list[BoundCheck] = []
    for t, (n_t, m_t) in enumerate(zip(cert.checkpoint_indices, cert.coordinate_boundaries), 1):
        expected = int(a[n_t - 1]) + cert.window + 1
        ok = m_t == expected
        schedule_valid &= ok
        if not ok:
            checks.append(
                BoundCheck(
                    name=f"schedule/M_{t}",
                    claimed=f"{expected}",
                    measured=float(m_t),
                    passed=False,
                )
            )

    report = tuple_distance_averages(
        system, points, seq, cert.checkpoint_indices, eta=float(cert.c_star)
    )

    for j, bound in enumerate(cert.coalescence_bounds):
        entry = report.checkpoints[2 * j]
        checks.append(
            BoundCheck(
                name=f"coalescence/{j + 1}/max_average<=B",
                claimed=str(bound),
                measured=entry.max_average,
                passed=Fraction(entry.max_average) <= bound,
            )
        )
    for j, bound in enumerate(cert.separation_bounds):
        entry = report.checkpoints[2 * j + 1]
        checks.append(
            BoundCheck(
                name=f"separation/{j + 1}/min_average>=C",
                claimed=str(bound),
                measured=entry.min_average,
                passed=Fraction(entry.min_average) >= bound,
            )
        )
    checks.append(
        BoundCheck(
            name="limsup_proxy>=c_star",
            claimed=str(cert.c_star),
            measured=report.limsup_proxy,
            passed=Fraction(report.limsup_proxy) >= cert.c_star,
        )
    )
    min_b = min(cert.coalescence_bounds)
    checks.append(
        BoundCheck(
            name="liminf_proxy<=min_B",
            claimed=str(min_b),
            measured=report.liminf_proxy,
            passed=Fraction(report.liminf_proxy) <= min_b,
        )
    )
    passed = schedule_valid and all(c.passed for c in checks)
    return ScrambledVerification(
        report=report, checks=tuple(checks), schedule_valid=schedule_valid, passed=passed
    )


# ---------------------------------------------------------------------------
# random tuple scans


@dataclass(frozen=True)
class TupleScanResult:
    index: int
    seeds: tuple[int, ...]
    max_average: float
    min_average: float


def _scan_one(args) -> TupleScanResult:
    system, seq, n_terms, index, seeds = args
    pts = [sy.sample_point(system, s) for s in seeds]
    rep = tuple_distance_averages(system, pts, seq, [n_terms])
    entry = rep.checkpoints[0]
    return TupleScanResult(index, seeds, entry.max_average, entry.min_average)


def random_tuple_scan(
    system,
    seq: SequenceSpec,
    tuple_size: int,
    tuple_count: int,
    n_terms: int,
    seed: int,
    workers: int = 1,
) -> list[TupleScanResult]:
    """Both averages at N for ``tuple_count`` independently sampled tuples."""
    if tuple_size < 2:
        raise ConfigError("tuple_size must be >= 2")
    if tuple_count < 1:
        raise ConfigError("tuple_count must be >= 1")
    tasks = []
    for t in range(tuple_count):
        seeds = tuple(
            child_seed(seed, f"tuple/{t}/point/{i}") for i in range(tuple_size)
        )
        tasks.append((system, seq, n_terms, t, seeds))
    return parallel_map(_scan_one, tasks, workers=workers)
