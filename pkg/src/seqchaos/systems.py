"""Explicitly computable dynamical systems.

Phase spaces come in four kinds:

* full shifts over a finite alphabet with a Bernoulli measure, whose
  points are lazy symbol tapes with O(1) coordinate access (periodic,
  counter-PRF-seeded, or block-scheduled);
* circle rotations stored as exact 128-bit binary fractions, iterated
  by exact modular arithmetic so that T**m at m up to 2**63 loses no
  precision;
* finite products of the above;
* natural extensions of one-sided full shifts (two-sided tapes whose
  negative coordinates are filled by a seeded past rule).

Iteration at time m costs O(polylog m): shifts return a shifted view,
rotations a single multiply-reduce.  Every metric is truncated at a
configurable coordinate window ``w`` and the truncation error bound
(2**-w style) is available alongside via :func:`metric_error_bound`.

Nothing here mutates after construction; points and systems are safe to
share across any number of workers.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, DomainError
from .prf import MASK64, child_seed, prf64, prf64_np

ONE_SIDED = "one_sided"
TWO_SIDED = "two_sided"

FRACTION_BITS = 128
FRACTION_MOD = 1 << FRACTION_BITS

DEFAULT_WINDOW = 48

METRIC_SUMMED = "summed"
METRIC_FIRST_DIFFERENCE = "first_difference"


def golden_conjugate_fraction() -> int:
    """floor(((sqrt(5) - 1) / 2) * 2**128), exact to the last bit.

    Derived from the integer square root of 5 * 2**256; equals
    0x9e3779b97f4a7c15f39cc0605cedc834.
    """
    return (math.isqrt(5 << (2 * FRACTION_BITS)) - FRACTION_MOD) // 2


GOLDEN_CONJUGATE = golden_conjugate_fraction()


def _weights_to_separators(weights: tuple[Fraction, ...]) -> tuple[int, ...]:
    # Cumulative thresholds on the 2**64 grid; symbol(h) = #separators <= h.
    cum = Fraction(0)
    seps = []
    for w in weights[:-1]:
        cum += w
        seps.append((cum.numerator << 64) // cum.denominator)
    return tuple(seps)


# ---------------------------------------------------------------------------
# symbolic points


class SymbolicPoint:
    """A point of a shift space: a deterministic map index -> symbol."""

    alphabet_size: int
    side: str

    def coordinate(self, i: int) -> int:
        raise NotImplementedError

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized coordinate access; default falls back to a loop."""
        return np.array([self.coordinate(int(i)) for i in indices], dtype=np.int64)

    def _check_index(self, i: int) -> None:
        if self.side == ONE_SIDED and i < 0:
            raise DomainError(f"coordinate {i} < 0 on a one-sided point")

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class PeriodicPoint(SymbolicPoint):
    word: tuple[int, ...]
    alphabet_size: int
    side: str = ONE_SIDED

    def __post_init__(self):
        if not self.word:
            raise ConfigError("periodic word must be non-empty")
        if any(not (0 <= s < self.alphabet_size) for s in self.word):
            raise ConfigError("periodic word symbol out of range")

    def coordinate(self, i: int) -> int:
        self._check_index(i)
        return self.word[i % len(self.word)]

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        w = np.array(self.word, dtype=np.int64)
        return w[np.asarray(indices, dtype=np.int64) % len(self.word)]

    def describe(self) -> str:
        return f"Periodic[{''.join(map(str, self.word))}]"


@dataclass(frozen=True)
class SeededRandomPoint(SymbolicPoint):
    """Coordinates drawn i.i.d. from ``weights`` via the counter PRF.

    Symbol at index i is a pure function of (seed, i); there is no tape.
    """

    seed: int
    weights: tuple[Fraction, ...]
    side: str = ONE_SIDED

    @property
    def alphabet_size(self) -> int:
        return len(self.weights)

    @cached_property
    def _separators(self) -> tuple[int, ...]:
        return _weights_to_separators(self.weights)

    @cached_property
    def _separators_np(self) -> np.ndarray:
        return np.array(self._separators, dtype=np.uint64)

    def coordinate(self, i: int) -> int:
        self._check_index(i)
        return bisect_right(self._separators, prf64(self.seed, i))

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        h = prf64_np(self.seed, np.asarray(indices, dtype=np.int64))
        return np.searchsorted(self._separators_np, h, side="right").astype(np.int64)

    def describe(self) -> str:
        return f"SeededRandom[seed={self.seed}]"


BlockContent = Union[int, SymbolicPoint]


@dataclass(frozen=True)
class BlockScheduledPoint(SymbolicPoint):
    """Piecewise content on coordinate blocks.

    ``boundaries[k]`` is the first index of block k+1; block 0 covers
    everything below ``boundaries[0]``.  Each block holds either a
    constant symbol or a view onto another point.
    """

    boundaries: tuple[int, ...]
    contents: tuple[BlockContent, ...]
    alphabet_size: int
    side: str = ONE_SIDED

    def __post_init__(self):
        if len(self.contents) != len(self.boundaries) + 1:
            raise ConfigError("need exactly one block content per boundary gap")
        if any(b >= c for b, c in zip(self.boundaries, self.boundaries[1:])):
            raise ConfigError("block boundaries must be strictly increasing")
        for c in self.contents:
            if isinstance(c, int) and not (0 <= c < self.alphabet_size):
                raise ConfigError("block symbol out of range")

    def coordinate(self, i: int) -> int:
        self._check_index(i)
        c = self.contents[bisect_right(self.boundaries, i)]
        return c if isinstance(c, int) else c.coordinate(i)

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        out = np.empty(idx.shape, dtype=np.int64)
        block = np.searchsorted(np.array(self.boundaries, dtype=np.int64), idx, side="right")
        for k, c in enumerate(self.contents):
            mask = block == k
            if not mask.any():
                continue
            out[mask] = c if isinstance(c, int) else c.coordinates(idx[mask])
        return out

    def describe(self) -> str:
        return f"BlockScheduled[{len(self.contents)} blocks]"


@dataclass(frozen=True)
class ShiftedPoint(SymbolicPoint):
    base: SymbolicPoint
    offset: int

    @property
    def alphabet_size(self) -> int:
        return self.base.alphabet_size

    @property
    def side(self) -> str:
        return self.base.side

    def coordinate(self, i: int) -> int:
        self._check_index(i)
        return self.base.coordinate(i + self.offset)

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        return self.base.coordinates(np.asarray(indices, dtype=np.int64) + self.offset)

    def describe(self) -> str:
        return f"Shifted[{self.base.describe()}, {self.offset}]"


def shift_point(point: SymbolicPoint, offset: int) -> SymbolicPoint:
    """Shifted view of a point; nested shifts collapse to one offset."""
    if point.side == ONE_SIDED and offset < 0:
        raise DomainError("cannot shift a one-sided point backwards")
    if offset == 0:
        return point
    if isinstance(point, ShiftedPoint):
        return ShiftedPoint(point.base, point.offset + offset)
    return ShiftedPoint(point, offset)


# ---------------------------------------------------------------------------
# natural-extension points


@dataclass(frozen=True)
class ExtendedPoint:
    """A point of the natural extension of a one-sided shift.

    The two-sided tape reads ``base`` on coordinates >= 0 and the ``past``
    rule on negative coordinates (past index 0 is tape coordinate -1).
    ``offset`` tracks how often the extension's shift has been applied.
    """

    base: SymbolicPoint
    past: SymbolicPoint
    offset: int = 0

    @property
    def alphabet_size(self) -> int:
        return self.base.alphabet_size

    def tape_coordinate(self, j: int) -> int:
        jj = j + self.offset
        return self.base.coordinate(jj) if jj >= 0 else self.past.coordinate(-1 - jj)

    def component(self, depth: int) -> SymbolicPoint:
        """The one-sided point x_depth (depth >= 1) of the backward orbit."""
        if depth < 1:
            raise DomainError("component depth starts at 1")
        return _TapeView(self, depth)

    def describe(self) -> str:
        return (
            f"Extended[base={self.base.describe()}, past={self.past.describe()},"
            f" offset={self.offset}]"
        )


@dataclass(frozen=True)
class _TapeView(SymbolicPoint):
    ext: ExtendedPoint
    depth: int
    side: str = ONE_SIDED

    @property
    def alphabet_size(self) -> int:
        return self.ext.alphabet_size

    def coordinate(self, i: int) -> int:
        self._check_index(i)
        return self.ext.tape_coordinate(i - (self.depth - 1))


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class FullShift:
    """Shift on sequences over {0..s-1} with a Bernoulli product measure."""

    alphabet_size: int
    weights: tuple[Fraction, ...]
    side: str = ONE_SIDED
    window: int = DEFAULT_WINDOW
    metric: str = METRIC_SUMMED

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ConfigError("alphabet size must be >= 2")
        if len(self.weights) != self.alphabet_size:
            raise ConfigError("one weight per symbol required")
        if any(w < 0 for w in self.weights):
            raise ConfigError("weights must be non-negative")
        total = sum(self.weights)
        if abs(total - 1) > Fraction(1, 1 << 52):
            raise ConfigError(f"weights sum to {total}, expected 1 within 2**-52")
        if total != 1:  # exact renormalization of an in-tolerance sum
            object.__setattr__(self, "weights", tuple(w / total for w in self.weights))
        if self.window < 1:
            raise ConfigError("metric window must be >= 1")
        if self.metric not in (METRIC_SUMMED, METRIC_FIRST_DIFFERENCE):
            raise ConfigError(f"unknown metric {self.metric!r}")

    @classmethod
    def bernoulli(
        cls,
        weights: Sequence[Fraction | int | str],
        side: str = ONE_SIDED,
        window: int = DEFAULT_WINDOW,
        metric: str = METRIC_SUMMED,
    ) -> "FullShift":
        ws = tuple(Fraction(w) for w in weights)
        return cls(len(ws), ws, side=side, window=window, metric=metric)

    @classmethod
    def uniform(cls, alphabet_size: int, **kwargs) -> "FullShift":
        w = Fraction(1, alphabet_size)
        return cls(alphabet_size, (w,) * alphabet_size, **kwargs)

    def describe(self) -> str:
        return f"FullShift[s={self.alphabet_size}, weights=({','.join(map(str, self.weights))}), {self.side}, w={self.window}]"


@dataclass(frozen=True)
class Rotation:
    """Rotation x -> x + alpha on the circle, on the 2**-128 dyadic grid.

    ``alpha_num`` is the exact numerator of alpha * 2**128; all orbit
    arithmetic is exact modular arithmetic on that grid.
    """

    alpha_num: int

    def __post_init__(self):
        if not (0 <= self.alpha_num < FRACTION_MOD):
            raise ConfigError("alpha numerator out of [0, 2**128) range")

    @classmethod
    def from_fraction(cls, alpha: Fraction | int | str) -> "Rotation":
        fr = Fraction(alpha)
        if not (0 <= fr < 1):
            raise ConfigError("alpha must lie in [0, 1)")
        return cls((fr.numerator << FRACTION_BITS) // fr.denominator)

    @classmethod
    def golden(cls) -> "Rotation":
        return cls(GOLDEN_CONJUGATE)

    def describe(self) -> str:
        return f"Rotation[alpha=0x{self.alpha_num:032x}/2^128]"


@dataclass(frozen=True)
class ProductSystem:
    components: tuple["SystemSpec", ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise ConfigError("product needs at least one component")

    def describe(self) -> str:
        return "Product[" + ", ".join(c.describe() for c in self.components) + "]"


@dataclass(frozen=True)
class NaturalExtension:
    """Invertible cover of a one-sided full shift on backward orbits."""

    base: FullShift

    def __post_init__(self):
        if self.base.side != ONE_SIDED:
            raise ConfigError("natural extension applies to one-sided shifts")

    @property
    def window(self) -> int:
        return self.base.window

    def describe(self) -> str:
        return f"NaturalExtension[{self.base.describe()}]"


SystemSpec = Union[FullShift, Rotation, ProductSystem, NaturalExtension]
Point = Union[SymbolicPoint, int, tuple, ExtendedPoint]


# ---------------------------------------------------------------------------
# operations


def iterate(system: SystemSpec, point: Point, m: int):
    """T**m applied to ``point``, in O(polylog m)."""
    if m < 0 and not isinstance(system, (Rotation, NaturalExtension)):
        raise DomainError("negative iteration on a non-invertible system")
    if isinstance(system, FullShift):
        if getattr(point, "side", None) != system.side:
            raise DomainError("point side does not match the shift")
        return shift_point(point, m)
    if isinstance(system, Rotation):
        return (point + m * system.alpha_num) % FRACTION_MOD
    if isinstance(system, ProductSystem):
        if len(point) != len(system.components):
            raise DomainError("component count mismatch")
        return tuple(iterate(c, x, m) for c, x in zip(system.components, point))
    if isinstance(system, NaturalExtension):
        if not isinstance(point, ExtendedPoint):
            raise DomainError("natural extension iterates ExtendedPoint values")
        return ExtendedPoint(point.base, point.past, point.offset + m)
    raise ConfigError(f"unknown system {system!r}")


def _shift_distance(x: SymbolicPoint, y: SymbolicPoint, window: int, side: str, metric: str) -> float:
    if metric == METRIC_FIRST_DIFFERENCE:
        for i in range(window):
            if x.coordinate(i) != y.coordinate(i):
                return 2.0 ** (-i)
        return 0.0
    if side == ONE_SIDED:
        return math.fsum(
            2.0 ** (-(i + 1)) for i in range(window) if x.coordinate(i) != y.coordinate(i)
        )
    parts = [0.5] if x.coordinate(0) != y.coordinate(0) else []
    for i in range(1, window):
        for j in (i, -i):
            if x.coordinate(j) != y.coordinate(j):
                parts.append(2.0 ** (-(i + 1)))
    return math.fsum(parts) / 2.0


def distance(system: SystemSpec, x: Point, y: Point) -> float:
    """Metric evaluation, truncated at the system's coordinate window.

    The certified truncation bound is :func:`metric_error_bound`; the
    true distance lies within that bound of the returned value.
    """
    if isinstance(system, FullShift):
        if getattr(x, "side", None) != system.side or getattr(y, "side", None) != system.side:
            raise DomainError("points do not live in this shift space")
        return _shift_distance(x, y, system.window, system.side, system.metric)
    if isinstance(system, Rotation):
        delta = abs(x - y)
        delta = min(delta, FRACTION_MOD - delta)
        return delta / FRACTION_MOD
    if isinstance(system, ProductSystem):
        if len(x) != len(system.components) or len(y) != len(system.components):
            raise DomainError("component count mismatch")
        return math.fsum(
            2.0 ** (-(j + 1)) * distance(c, xc, yc)
            for j, (c, xc, yc) in enumerate(zip(system.components, x, y))
        )
    if isinstance(system, NaturalExtension):
        w = system.window
        if system.base.metric != METRIC_SUMMED:
            return math.fsum(
                2.0 ** (-i)
                * _shift_distance(x.component(i), y.component(i), w, ONE_SIDED, system.base.metric)
                for i in range(1, w + 1)
            )
        # component i reads tape coordinates [-(i-1), w-i); fetch the union once
        span = range(-w + 1, w)
        neq = np.array(
            [x.tape_coordinate(j) != y.tape_coordinate(j) for j in span], dtype=np.float64
        )
        weights = np.ldexp(1.0, -(np.arange(w) + 1))
        parts = [
            2.0 ** (-i) * float(neq[w - i : 2 * w - i] @ weights) for i in range(1, w + 1)
        ]
        return math.fsum(parts)
    raise ConfigError(f"unknown system {system!r}")


def metric_error_bound(system: SystemSpec) -> float:
    """Certified truncation/rounding bound for :func:`distance`."""
    if isinstance(system, FullShift):
        return 2.0 ** (-system.window)
    if isinstance(system, Rotation):
        return 2.0**-53
    if isinstance(system, ProductSystem):
        return math.fsum(
            2.0 ** (-(j + 1)) * metric_error_bound(c) for j, c in enumerate(system.components)
        )
    if isinstance(system, NaturalExtension):
        return 2.0 ** (1 - system.window)
    raise ConfigError(f"unknown system {system!r}")


def sample_point(system: SystemSpec, seed: int) -> Point:
    """A point distributed per the system's invariant measure; pure in seed."""
    if isinstance(system, FullShift):
        return SeededRandomPoint(seed & MASK64, system.weights, side=system.side)
    if isinstance(system, Rotation):
        return (prf64(seed, 0) << 64) | prf64(seed, 1)
    if isinstance(system, ProductSystem):
        return tuple(
            sample_point(c, child_seed(seed, f"component/{j}"))
            for j, c in enumerate(system.components)
        )
    if isinstance(system, NaturalExtension):
        return natural_extension_lift(
            system, sample_point(system.base, child_seed(seed, "base")), child_seed(seed, "past")
        )
    raise ConfigError(f"unknown system {system!r}")


def natural_extension_lift(
    system: NaturalExtension | FullShift,
    base_point: SymbolicPoint,
    past_seed: int | None = None,
    past: SymbolicPoint | None = None,
) -> ExtendedPoint:
    """Lift a one-sided point to the natural extension.

    Non-negative coordinates equal ``base_point``'s; negative ones come
    from ``past`` (or a PRF-seeded Bernoulli rule built from ``past_seed``).
    """
    shift = system.base if isinstance(system, NaturalExtension) else system
    if shift.side != ONE_SIDED:
        raise ConfigError("natural extension applies to one-sided shifts")
    if past is None:
        if past_seed is None:
            raise ConfigError("provide past_seed or an explicit past rule")
        past = SeededRandomPoint(past_seed & MASK64, shift.weights, side=ONE_SIDED)
    return ExtendedPoint(base_point, past)


def project(point: ExtendedPoint) -> SymbolicPoint:
    """First-coordinate projection onto the underlying one-sided shift."""
    return point.component(1)


# ---------------------------------------------------------------------------
# orbit evaluation helpers


def rotation_orbit_fractions(system: Rotation, x0: int, times) -> np.ndarray:
    """Fractions (x0 + m*alpha mod 1) for each m, as float64.

    Each value is the exact 128-bit grid point rounded down to 53 bits,
    so the per-entry error is below 2**-53.
    """
    alpha = system.alpha_num
    ts = times.tolist() if isinstance(times, np.ndarray) else times
    vals = [(x0 + m * alpha) % FRACTION_MOD for m in ts]
    scale = 2.0**-53
    return np.array([v >> 75 for v in vals], dtype=np.float64) * scale


def rotation_point_to_float(x: int) -> float:
    return (x >> 75) * 2.0**-53
