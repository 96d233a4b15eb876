"""Zero-entropy-factor experiments on product systems.

A Bernoulli shift crossed with a circle rotation carries an obvious
zero-entropy coordinate: the rotation angle.  Along sequences with
vanishing close-pair density, limits of sequence averages should be
measurable with respect to that coordinate alone, which makes three
effects observable at finite N:

* within-fiber constancy: points sharing the rotation coordinate theta
  get (nearly) the same average, while different theta fibers may get
  different values (made non-trivial by freezing the rotation: a
  rational angle paired with a sequence that multiplies it to integers);
* the Kolmogorov-type collapse: on the Bernoulli factor alone the limit
  is the plain space average for every sampled point;
* the lacunary contrast: along geometric sequences the per-point
  averages keep binomial-scale spread no matter how many of the at most
  62 available terms are used, while catalogued families calm down as N
  grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import systems as sy
from .averaging import ergodic_average
from .errors import ConfigError
from .observables import Observable
from .pool import parallel_map
from .prf import child_seed
from .seqgen import SequenceSpec, lacunary_max_terms


@dataclass(frozen=True)
class FiberReport:
    """Per-fiber averages over a frozen rotation coordinate."""

    thetas: tuple[Fraction, ...]
    sample_count: int
    n_terms: int
    values: tuple[tuple[float, ...], ...]  # values[f][j] = A_N at fiber f, sample j

    @property
    def dispersions(self) -> tuple[float, ...]:
        return tuple(max(v) - min(v) for v in self.values)

    @property
    def fiber_means(self) -> tuple[float, ...]:
        return tuple(math.fsum(v) / len(v) for v in self.values)

    CSV_HEADER = ["theta", "sample", "value"]

    def csv_rows(self) -> list[list]:
        return [
            [str(theta), j, value]
            for theta, vals in zip(self.thetas, self.values)
            for j, value in enumerate(vals)
        ]

    def to_json_dict(self) -> dict:
        return {
            "n_terms": self.n_terms,
            "sample_count": self.sample_count,
            "fibers": [
                {"theta": str(t), "dispersion": d, "mean": m}
                for t, d, m in zip(self.thetas, self.dispersions, self.fiber_means)
            ],
        }


def _fiber_task(args) -> float:
    product, point, f, seq, n_terms = args
    return ergodic_average(product, point, f, seq, n_terms)


def fiber_constancy_report(
    shift: sy.FullShift,
    rotation: sy.Rotation,
    thetas: Sequence[Fraction],
    f: Observable,
    seq: SequenceSpec,
    n_terms: int,
    sample_count: int,
    seed: int,
    workers: int = 1,
) -> FiberReport:
    """Sample the shift factor per fiber and measure A_N on the product.

    Thetas are placed on the 2**-128 rotation grid (exact for dyadic
    values, within 2**-128 otherwise).
    """
    if sample_count < 1:
        raise ConfigError("sample_count must be >= 1")
    if not thetas:
        raise ConfigError("need at least one theta")
    product = sy.ProductSystem((shift, rotation))
    tasks = []
    for fi, theta in enumerate(thetas):
        fr = Fraction(theta)
        if not (0 <= fr < 1):
            raise ConfigError("theta must lie in [0, 1)")
        theta_point = (fr.numerator << sy.FRACTION_BITS) // fr.denominator
        for j in range(sample_count):
            omega = sy.sample_point(shift, child_seed(seed, f"theta/{fi}/omega/{j}"))
            tasks.append((product, (omega, theta_point), f, seq, n_terms))
    flat = parallel_map(_fiber_task, tasks, workers=workers)
    values = tuple(
        tuple(flat[fi * sample_count : (fi + 1) * sample_count]) for fi in range(len(thetas))
    )
    return FiberReport(
        thetas=tuple(Fraction(t) for t in thetas),
        sample_count=sample_count,
        n_terms=n_terms,
        values=values,
    )


def kolmogorov_limit_check(
    shift: sy.FullShift,
    f: Observable,
    seq: SequenceSpec,
    n_terms: int,
    sample_count: int,
    seed: int,
    workers: int = 1,
) -> float:
    """max over sampled points of |A_N f - integral(f)| on the shift alone."""
    target = f.integral(shift)
    if target is None:
        raise ConfigError("observable must declare an exact integral")
    tasks = [
        (shift, sy.sample_point(shift, child_seed(seed, f"sample/{j}")), f, seq, n_terms)
        for j in range(sample_count)
    ]
    averages = parallel_map(_fiber_task, tasks, workers=workers)
    return max(abs(a - target) for a in averages)


def _spread(values: Sequence[float]) -> float:
    """Two sample standard deviations: the +-2 sigma spread of the averages."""
    m = len(values)
    if m < 2:
        return 0.0
    mean = math.fsum(values) / m
    var = math.fsum((v - mean) ** 2 for v in values) / (m - 1)
    return 2.0 * math.sqrt(var)


def lacunary_dispersion_contrast(
    shift: sy.FullShift,
    f: Observable,
    good_seq: SequenceSpec,
    lacunary_seq: SequenceSpec,
    n_terms: int,
    sample_count: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Dispersion of per-point averages at matched term count K.

    Returns (good, lacunary) where each entry is twice the sample
    standard deviation of {A_K f(x_j)} over ``sample_count`` points.
    At matched small K both sequences show the same binomial-scale
    spread; the difference is structural: the good sequence keeps going
    (see :func:`lacunary_contrast_report`), the lacunary one runs out of
    representable terms.
    """
    if lacunary_seq.family == "Lacunary":
        cap = lacunary_max_terms(lacunary_seq.base)
        if n_terms > cap:
            raise ConfigError(f"lacunary base {lacunary_seq.base} has only {cap} terms")
    seeds = [child_seed(seed, f"sample/{j}") for j in range(sample_count)]
    out = []
    for s in (good_seq, lacunary_seq):
        tasks = [(shift, sy.sample_point(shift, sd), f, s, n_terms) for sd in seeds]
        out.append(_spread(parallel_map(_fiber_task, tasks, workers=workers)))
    return out[0], out[1]


@dataclass(frozen=True)
class LacunaryContrastReport:
    matched_terms: int
    good_dispersion: float
    lacunary_dispersion: float
    extended_terms: int
    good_extended_dispersion: float
    lacunary_max_terms: int
    lacunary_extended_available: bool

    def to_json_dict(self) -> dict:
        return {
            "matched_terms": self.matched_terms,
            "good_dispersion": self.good_dispersion,
            "lacunary_dispersion": self.lacunary_dispersion,
            "extended_terms": self.extended_terms,
            "good_extended_dispersion": self.good_extended_dispersion,
            "lacunary_max_terms": self.lacunary_max_terms,
            "lacunary_extended_available": self.lacunary_extended_available,
        }


def lacunary_contrast_report(
    shift: sy.FullShift,
    f: Observable,
    good_seq: SequenceSpec,
    lacunary_seq: SequenceSpec,
    n_terms: int,
    sample_count: int,
    seed: int,
    extended_terms: int = 100_000,
    workers: int = 1,
) -> LacunaryContrastReport:
    """Matched-K contrast plus the long-horizon run the lacunary side lacks."""
    good_disp, lac_disp = lacunary_dispersion_contrast(
        shift, f, good_seq, lacunary_seq, n_terms, sample_count, seed, workers=workers
    )
    seeds = [child_seed(seed, f"sample/{j}") for j in range(sample_count)]
    tasks = [(shift, sy.sample_point(shift, sd), f, good_seq, extended_terms) for sd in seeds]
    good_ext = _spread(parallel_map(_fiber_task, tasks, workers=workers))
    cap = (
        lacunary_max_terms(lacunary_seq.base)
        if lacunary_seq.family == "Lacunary"
        else len(lacunary_seq.explicit_terms or ())
    )
    return LacunaryContrastReport(
        matched_terms=n_terms,
        good_dispersion=good_disp,
        lacunary_dispersion=lac_disp,
        extended_terms=extended_terms,
        good_extended_dispersion=good_ext,
        lacunary_max_terms=cap,
        lacunary_extended_available=extended_terms <= cap,
    )
