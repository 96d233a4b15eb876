"""Bounded, finitely-determined observables.

Only functions whose value at a point is decided by finitely many
symbol coordinates or by the exact rotation fraction are supported, so
f(T**m x) is computed without any approximation of the orbit itself.
Each kind optionally declares its exact integral against the ambient
invariant measure (cylinder mass under a Bernoulli law, zero mean for
nonconstant circle harmonics), which is what the deviation-style
experiments compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError
from . import systems as sy

TWO_PI = 2.0 * math.pi


class Observable:
    def value(self, system, point) -> float:
        raise NotImplementedError

    def series(self, system, point, times: np.ndarray) -> np.ndarray:
        """Values f(T**m point) for each m in ``times`` (vectorized)."""
        return np.array(
            [self.value(system, sy.iterate(system, point, int(m))) for m in times],
            dtype=np.float64,
        )

    def integral(self, system) -> float | None:
        """Exact integral of f against the invariant measure, when declared."""
        return None

    def bounds(self) -> tuple[float, float]:
        raise NotImplementedError

    def error_bound(self) -> float:
        """Worst-case evaluation error of a single value() call."""
        return 0.0

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Constant(Observable):
    c: float

    def value(self, system, point) -> float:
        return self.c

    def series(self, system, point, times) -> np.ndarray:
        return np.full(len(times), self.c, dtype=np.float64)

    def integral(self, system) -> float:
        return self.c

    def bounds(self) -> tuple[float, float]:
        return (self.c, self.c)

    def describe(self) -> str:
        return f"Constant[{self.c}]"


@dataclass(frozen=True)
class CylinderIndicator(Observable):
    """Indicator of the cylinder {x : x_c = s for every (c, s) constraint}.

    The empty constraint tuple is the indicator of the whole space.
    """

    constraints: tuple[tuple[int, int], ...]

    def __post_init__(self):
        coords = [c for c, _ in self.constraints]
        if len(set(coords)) != len(coords):
            raise ConfigError("cylinder constraints must use distinct coordinates")

    def value(self, system, point) -> float:
        if not isinstance(point, sy.SymbolicPoint):
            raise DomainError("cylinder observable needs a symbolic point")
        return 1.0 if all(point.coordinate(c) == s for c, s in self.constraints) else 0.0

    def series(self, system, point, times) -> np.ndarray:
        if not isinstance(point, sy.SymbolicPoint):
            raise DomainError("cylinder observable needs a symbolic point")
        ts = np.asarray(times, dtype=np.int64)
        out = np.ones(ts.shape, dtype=bool)
        for c, s in self.constraints:
            out &= point.coordinates(ts + c) == s
        return out.astype(np.float64)

    def integral(self, system) -> float | None:
        if isinstance(system, sy.FullShift):
            mass = Fraction(1)
            for _, s in self.constraints:
                if not (0 <= s < system.alphabet_size):
                    raise ConfigError("cylinder symbol outside the alphabet")
                mass *= system.weights[s]
            return float(mass)
        return None

    def bounds(self) -> tuple[float, float]:
        return (0.0, 1.0)

    def describe(self) -> str:
        inner = ",".join(f"{c}:{s}" for c, s in self.constraints)
        return f"Cylinder[{inner}]" if inner else "Cylinder[full]"


@dataclass(frozen=True)
class TrigOnRotation(Observable):
    """cos(2 pi h x) or sin(2 pi h x) on the circle, h a nonzero integer."""

    frequency: int
    component: str = "cos"

    def __post_init__(self):
        if self.frequency == 0:
            raise ConfigError("frequency must be nonzero (use Constant for h = 0)")
        if self.component not in ("cos", "sin"):
            raise ConfigError("component must be 'cos' or 'sin'")

    def _fn(self):
        return np.cos if self.component == "cos" else np.sin

    def value(self, system, point) -> float:
        if not isinstance(point, int):
            raise DomainError("trig observable needs a rotation point")
        angle = TWO_PI * self.frequency * sy.rotation_point_to_float(point)
        return float(self._fn()(angle))

    def series(self, system, point, times) -> np.ndarray:
        if not isinstance(system, sy.Rotation):
            raise DomainError("trig observable needs a rotation system")
        fr = sy.rotation_orbit_fractions(system, point, times)
        return self._fn()(TWO_PI * self.frequency * fr)

    def integral(self, system) -> float:
        return 0.0

    def bounds(self) -> tuple[float, float]:
        return (-1.0, 1.0)

    def error_bound(self) -> float:
        # 2**-53 fraction granularity into a Lipschitz-(2 pi h) function.
        return TWO_PI * abs(self.frequency) * 2.0**-53 + 1e-16

    def describe(self) -> str:
        return f"{self.component}[2pi*{self.frequency}x]"


@dataclass(frozen=True)
class ProductOf(Observable):
    """Product of per-component observables on a product system."""

    factors: tuple[Observable, ...]

    def __post_init__(self):
        if not self.factors:
            raise ConfigError("need at least one factor")

    def _split(self, system, point):
        if not isinstance(system, sy.ProductSystem) or len(system.components) != len(self.factors):
            raise DomainError("factor count must match the product components")
        return zip(self.factors, system.components, point)

    def value(self, system, point) -> float:
        out = 1.0
        for f, comp, x in self._split(system, point):
            out *= f.value(comp, x)
        return out

    def series(self, system, point, times) -> np.ndarray:
        out = np.ones(len(times), dtype=np.float64)
        for f, comp, x in self._split(system, point):
            out *= f.series(comp, x, times)
        return out

    def integral(self, system) -> float | None:
        if not isinstance(system, sy.ProductSystem):
            return None
        parts = [f.integral(c) for f, c in zip(self.factors, system.components)]
        if any(p is None for p in parts):
            return None
        return math.prod(parts)

    def bounds(self) -> tuple[float, float]:
        lo, hi = 1.0, 1.0
        for f in self.factors:
            a, b = f.bounds()
            candidates = (lo * a, lo * b, hi * a, hi * b)
            lo, hi = min(candidates), max(candidates)
        return lo, hi

    def error_bound(self) -> float:
        # factors are bounded by 1 in magnitude for all supported kinds
        return math.fsum(f.error_bound() for f in self.factors)

    def describe(self) -> str:
        return "Product[" + " * ".join(f.describe() for f in self.factors) + "]"


@dataclass(frozen=True)
class LinearCombination(Observable):
    """sum of coef * observable; used mainly to exercise linearity."""

    parts: tuple[tuple[float, Observable], ...]

    def value(self, system, point) -> float:
        return math.fsum(c * f.value(system, point) for c, f in self.parts)

    def series(self, system, point, times) -> np.ndarray:
        out = np.zeros(len(times), dtype=np.float64)
        for c, f in self.parts:
            out += c * f.series(system, point, times)
        return out

    def integral(self, system) -> float | None:
        vals = [f.integral(system) for _, f in self.parts]
        if any(v is None for v in vals):
            return None
        return math.fsum(c * v for (c, _), v in zip(self.parts, vals))

    def bounds(self) -> tuple[float, float]:
        lo = hi = 0.0
        for c, f in self.parts:
            a, b = f.bounds()
            pa, pb = c * a, c * b
            lo += min(pa, pb)
            hi += max(pa, pb)
        return lo, hi

    def error_bound(self) -> float:
        return math.fsum(abs(c) * f.error_bound() for c, f in self.parts) + 2.0**-50

    def describe(self) -> str:
        return " + ".join(f"{c}*{f.describe()}" for c, f in self.parts)


ObservableSpec = Union[Constant, CylinderIndicator, TrigOnRotation, ProductOf, LinearCombination]
