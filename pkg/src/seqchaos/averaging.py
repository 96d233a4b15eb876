"""Ergodic averages along integer sequences.

The core quantity is A_N f(x) = (1/N) * sum_{k<=N} f(T**(a_k) x) for a
sequence spec {a_k}.  Summation uses exact-rounding compensated
summation (math.fsum), so the average of up to 10**7 bounded terms
carries well below 1e-12 of summation error; the only other error
sources are the declared per-evaluation bounds of the observable, and
they are reported on every trace.

Checkpointed traces record running extrema across the checkpoint
ladder; the running minimum and maximum at the final checkpoint are the
finite-N stand-ins for liminf / limsup of the averages.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import systems as sy
from .errors import ConfigError, DomainError
from .observables import Observable
from .pool import parallel_map
from .prf import child_seed
from .seqgen import SequenceSpec, times_array

SUM_ERROR_BOUND = 2.0**-50  # fsum is exactly rounded; this is a generous blanket


def _validate_checkpoints(checkpoints: Sequence[int]) -> list[int]:
    cps = [int(n) for n in checkpoints]
    if not cps or any(n < 1 for n in cps):
        raise ConfigError("checkpoints must be positive")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ConfigError("checkpoints must be strictly increasing")
    return cps


def geometric_checkpoints(start: int, stop: int, factor: int = 2) -> list[int]:
    """start, start*factor, ... capped at stop (stop always included)."""
    if start < 1 or factor < 2 or stop < start:
        raise ConfigError("need 1 <= start <= stop and factor >= 2")
    out = []
    n = start
    while n < stop:
        out.append(n)
        n *= factor
    out.append(stop)
    return out


def ergodic_average(system, x, f: Observable, seq: SequenceSpec, n_terms: int) -> float:
    """(1/N) sum_{k=1}^{N} f(T**(a_k) x), exactly summed."""
    if n_terms < 1:
        raise ConfigError("n_terms must be >= 1")
    ts = times_array(seq, n_terms)
    vals = f.series(system, x, ts)
    return math.fsum(vals) / n_terms


@dataclass(frozen=True)
class TraceCheckpoint:
    n: int
    value: float
    running_min: float
    running_max: float


@dataclass(frozen=True)
class AverageTrace:
    sequence: str
    point: str
    observable: str
    checkpoints: tuple[TraceCheckpoint, ...]
    err_bound: float

    @property
    def liminf_proxy(self) -> float:
        return self.checkpoints[-1].running_min

    @property
    def limsup_proxy(self) -> float:
        return self.checkpoints[-1].running_max

    def csv_rows(self) -> list[list]:
        return [
            [c.n, c.value, c.running_min, c.running_max, self.err_bound]
            for c in self.checkpoints
        ]

    CSV_HEADER = ["N", "value", "running_min", "running_max", "err_bound"]

    def to_json_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "point": self.point,
            "observable": self.observable,
            "err_bound": self.err_bound,
            "checkpoints": [
                {
                    "N": c.n,
                    "value": c.value,
                    "running_min": c.running_min,
                    "running_max": c.running_max,
                }
                for c in self.checkpoints
            ],
        }


def average_trace(
    system, x, f: Observable, seq: SequenceSpec, checkpoints: Sequence[int]
) -> AverageTrace:
    """Single pass producing A_N at each checkpoint plus running extrema.

    The value at each checkpoint equals a fresh :func:`ergodic_average`
    at the same N to the last bit (same values, same exact summation).
    """
    cps = _validate_checkpoints(checkpoints)
    ts = times_array(seq, cps[-1])
    vals = f.series(system, x, ts)
    entries = []
    run_min = math.inf
    run_max = -math.inf
    for n in cps:
        a = math.fsum(vals[:n]) / n
        run_min = min(run_min, a)
        run_max = max(run_max, a)
        entries.append(TraceCheckpoint(n, a, run_min, run_max))
    try:
        point_desc = x.describe()
    except AttributeError:
        point_desc = repr(x) if not isinstance(x, int) else f"fraction:0x{x:032x}"
    return AverageTrace(
        sequence=seq.describe(),
        point=point_desc,
        observable=f.describe(),
        checkpoints=tuple(entries),
        err_bound=f.error_bound() + SUM_ERROR_BOUND,
    )


def _average_for_seed(args) -> float:
    system, f, seq, n_terms, seed = args
    return ergodic_average(system, sy.sample_point(system, seed), f, seq, n_terms)


def very_good_deviation(
    system,
    seeds: Sequence[int],
    f: Observable,
    seq: SequenceSpec,
    n_terms: int,
    workers: int = 1,
) -> float:
    """max over sampled points of |A_N f(x) - integral(f)|."""
    target = f.integral(system)
    if target is None:
        raise ConfigError(f"observable {f.describe()} declares no exact integral")
    tasks = [(system, f, seq, n_terms, s) for s in seeds]
    averages = parallel_map(_average_for_seed, tasks, workers=workers)
    return max(abs(a - target) for a in averages)


def disintegration_consistency(
    system,
    f: Observable,
    seq: SequenceSpec,
    n_terms: int,
    sample_count: int,
    seed: int,
    workers: int = 1,
) -> float:
    """|mean_j A_N f(x_j) - integral(f)| over sample_count sampled points.

    Monte-Carlo form of the identity that averaging the per-point limits
    against the invariant measure recovers the space average.
    """
    target = f.integral(system)
    if target is None:
        raise ConfigError(f"observable {f.describe()} declares no exact integral")
    if sample_count < 1:
        raise ConfigError("sample_count must be >= 1")
    seeds = [child_seed(seed, f"sample/{j}") for j in range(sample_count)]
    tasks = [(system, f, seq, n_terms, s) for s in seeds]
    averages = parallel_map(_average_for_seed, tasks, workers=workers)
    return abs(math.fsum(averages) / sample_count - target)


# ---------------------------------------------------------------------------
# empirical measures


@dataclass(frozen=True)
class CylinderCell:
    constraints: tuple[tuple[int, int], ...]

    def describe(self) -> str:
        return "cyl[" + ";".join(f"{c}:{s}" for c, s in self.constraints) + "]"


@dataclass(frozen=True)
class ArcCell:
    """Half-open arc [lo, hi) on the 2**-128 circle grid."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo < self.hi <= sy.FRACTION_MOD):
            raise ConfigError("arc must satisfy 0 <= lo < hi <= 1")

    def describe(self) -> str:
        return f"arc[{self.lo / sy.FRACTION_MOD:.6g};{self.hi / sy.FRACTION_MOD:.6g})"


def dyadic_arcs(level: int) -> list[ArcCell]:
    """The 2**level equal dyadic arcs tiling the circle."""
    if level < 0 or level > 60:
        raise ConfigError("level must be in [0, 60]")
    step = sy.FRACTION_MOD >> level
    return [ArcCell(i * step, (i + 1) * step) for i in range(1 << level)]


def cylinder_partition(alphabet_size: int, coordinates: Sequence[int]) -> list[CylinderCell]:
    """All symbol patterns over the given coordinates (a genuine partition)."""
    coords = tuple(coordinates)
    cells = [CylinderCell(())]
    for c in coords:
        cells = [
            CylinderCell(cell.constraints + ((c, s),))
            for cell in cells
            for s in range(alphabet_size)
        ]
    return cells


@dataclass(frozen=True)
class EmpiricalMeasure:
    cells: tuple[str, ...]
    counts: tuple[int, ...]
    total: int

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(c / self.total for c in self.counts)

    CSV_HEADER = ["cell", "count", "weight"]

    def csv_rows(self) -> list[list]:
        return [[c, k, k / self.total] for c, k in zip(self.cells, self.counts)]

    def to_json_dict(self) -> dict:
        return {
            "total": self.total,
            "cells": list(self.cells),
            "counts": list(self.counts),
            "weights": list(self.weights),
        }


def _validate_partition(system, cells: Sequence) -> None:
    if not cells:
        raise ConfigError("partition must be non-empty")
    kinds = {type(c) for c in cells}
    if len(kinds) != 1:
        raise ConfigError("partition cells must all be of the same kind")
    if isinstance(cells[0], ArcCell):
        if not isinstance(system, sy.Rotation):
            raise DomainError("arc cells partition rotation spaces")
        ordered = sorted(cells, key=lambda c: c.lo)
        if ordered[0].lo != 0 or ordered[-1].hi != sy.FRACTION_MOD:
            raise ConfigError("arcs must tile the full circle")
        for a, b in zip(ordered, ordered[1:]):
            if a.hi > b.lo:
                raise ConfigError("arcs overlap")
            if a.hi < b.lo:
                raise ConfigError("arcs leave a gap")
    elif isinstance(cells[0], CylinderCell):
        if not isinstance(system, sy.FullShift):
            raise DomainError("cylinder cells partition shift spaces")
        coord_sets = {tuple(sorted(c for c, _ in cell.constraints)) for cell in cells}
        if len(coord_sets) != 1:
            raise ConfigError("cylinder cells must share one coordinate set")
        coords = next(iter(coord_sets))
        expected = system.alphabet_size ** len(coords)
        patterns = {tuple(sorted(cell.constraints)) for cell in cells}
        if len(patterns) != len(cells):
            raise ConfigError("duplicate cylinder cells")
        if len(cells) != expected:
            raise ConfigError(
                f"cylinder partition over coordinates {coords} needs {expected} cells"
            )
    else:
        raise ConfigError(f"unknown cell type {type(cells[0]).__name__}")


def empirical_measure(
    system, x, partition: Sequence, seq: SequenceSpec, n_terms: int
) -> EmpiricalMeasure:
    """Visit frequencies of T**(a_k) x across the partition cells, k <= N.

    Membership tests are exact: symbol comparisons for cylinders, full
    128-bit grid comparisons for arcs.
    """
    _validate_partition(system, partition)
    if n_terms < 1:
        raise ConfigError("n_terms must be >= 1")
    ts = times_array(seq, n_terms)
    counts = [0] * len(partition)
    if isinstance(partition[0], ArcCell):
        ordered = sorted(range(len(partition)), key=lambda i: partition[i].lo)
        starts = [partition[i].lo for i in ordered]
        alpha = system.alpha_num
        for m in ts.tolist():
            v = (x + m * alpha) % sy.FRACTION_MOD
            counts[ordered[bisect_right(starts, v) - 1]] += 1
    else:
        remaining = np.ones(len(ts), dtype=bool)
        for i, cell in enumerate(partition):
            mask = np.ones(len(ts), dtype=bool)
            for c, s in cell.constraints:
                mask &= x.coordinates(ts + c) == s
            counts[i] = int(np.count_nonzero(mask & remaining))
            remaining &= ~mask
    return EmpiricalMeasure(
        cells=tuple(c.describe() for c in partition),
        counts=tuple(counts),
        total=n_terms,
    )
