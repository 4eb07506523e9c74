"""Decision-boundary computation for likelihood-ratio classifiers.

The boundaries of the ratio classifier at threshold eta are the roots of

    p1 * f1(x) - eta * p0 * f0(x) = 0.

For a pair of Gaussians this reduces to a quadratic with known coefficients
and is solved in closed form.  For arbitrary families the equation is scanned
on a grid in the log domain (underflow-proof) and every bracketed sign change
is refined by bisection.

Tangential (double) roots are excluded: they bound regions of zero measure,
change no probability, and destabilize downstream derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classifier import BoundarySet, Orientation, region_accuracy
from .densities import Family, HypothesisPair
from .errors import EmptyIntervalError, InvalidParameterError, NoRootError

#: Relative residual bound every reported root must satisfy.
RESIDUAL_RTOL = 1e-10
_RESIDUAL_FLOOR = 1e-300

#: Below this relative spread two Gaussian widths are treated as equal and the
#: quadratic degenerates to its linear branch (the a -> 0 limit is unstable).
EQUAL_SIGMA_RTOL = 1e-9

DEFAULT_GRID = 4096
SCALE_SPAN = 8.0
BISECTION_WIDTH = 1e-12


class RootMethod(str, Enum):
    GAUSSIAN_QUADRATIC = "gaussian_quadratic"
    GRID_BISECTION = "grid_bisection"


@dataclass(frozen=True)
class LikelihoodRootReport:
    """Roots of the ratio equation plus the induced region orientation.

    ``orientation`` identifies the hypothesis winning left of the first root
    (or, with no roots, everywhere).  ``residuals`` hold the absolute defect
    |p1 f1(r) - eta p0 f0(r)| at each root.
    """

    roots: tuple[float, ...]
    method: RootMethod
    orientation: Orientation
    residuals: tuple[float, ...]
    eta: float
    warnings: tuple[str, ...] = field(default=())

    def boundary_set(self) -> BoundarySet:
        if not self.roots:
            raise NoRootError("report holds no roots; the classifier is a single region")
        return BoundarySet(self.roots, self.orientation)

    def to_dict(self) -> dict:
        return {
            "roots": list(self.roots),
            "method": self.method.value,
            "orientation": self.orientation.value,
            "residuals": list(self.residuals),
            "eta": self.eta,
            "warnings": list(self.warnings),
        }


def log_ratio_gap(pair: HypothesisPair, eta: float, x):
    """log(p1 f1(x)) - log(eta p0 f0(x)); positive where H1 wins."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            float(np.log(pair.p1))
            + np.asarray(pair.h1.log_pdf(x))
            - math.log(eta)
            - float(np.log(pair.p0))
            - np.asarray(pair.h0.log_pdf(x))
        )
    return out if out.ndim else float(out)


def _residual(pair: HypothesisPair, eta: float, r: float) -> float:
    t1 = pair.p1 * float(pair.h1.pdf(r))
    t0 = eta * pair.p0 * float(pair.h0.pdf(r))
    return abs(t1 - t0)


def _check_residuals(pair, eta, roots) -> tuple[float, ...]:
    residuals = []
    for r in roots:
        res = _residual(pair, eta, r)
        bound = RESIDUAL_RTOL * max(
            pair.p0 * float(pair.h0.pdf(r)), pair.p1 * float(pair.h1.pdf(r)), _RESIDUAL_FLOOR
        )
        if res > bound:
            raise InvalidParameterError(
                f"root {r!r} fails the residual bound ({res:.3e} > {bound:.3e})"
            )
        residuals.append(res)
    return tuple(residuals)


def default_search_interval(pair: HypothesisPair) -> tuple[float, float]:
    """Span of both models out to 8 scale units, clipped to the support union."""
    (m0, s0) = pair.h0.mean_scale()
    (m1, s1) = pair.h1.mean_scale()
    lo = min(m0 - SCALE_SPAN * s0, m1 - SCALE_SPAN * s1)
    hi = max(m0 + SCALE_SPAN * s0, m1 + SCALE_SPAN * s1)
    sup0, sup1 = pair.h0.support, pair.h1.support
    lo = max(lo, min(sup0[0], sup1[0]))
    hi = min(hi, max(sup0[1], sup1[1]))
    if not lo < hi:
        raise EmptyIntervalError(f"degenerate search interval [{lo}, {hi}]")
    return (lo, hi)


def gaussian_quadratic_coefficients(
    pair: HypothesisPair, eta: float
) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of the quadratic the Gaussian boundaries satisfy."""
    mu0, sig0 = pair.h0.params
    mu1, sig1 = pair.h1.params
    a = 0.5 * (1.0 / sig0**2 - 1.0 / sig1**2)
    b = mu1 / sig1**2 - mu0 / sig0**2
    c = (
        math.log(sig0 / sig1)
        + math.log(pair.p1 / pair.p0)
        + mu0**2 / (2.0 * sig0**2)
        - mu1**2 / (2.0 * sig1**2)
        - math.log(eta)
    )
    return a, b, c


def ml_boundaries_gaussian(pair: HypothesisPair, eta: float = 1.0) -> LikelihoodRootReport:
    """Closed-form boundaries for a Gaussian pair.

    Root cases: two simple roots, a single root when the widths coincide,
    and zero roots when the parabola never crosses (including the tangential
    double root, which is dropped as zero-measure).
    """
    if pair.h0.family is not Family.GAUSSIAN or pair.h1.family is not Family.GAUSSIAN:
        raise InvalidParameterError("ml_boundaries_gaussian requires two Gaussian models")
    if not eta > 0:
        raise InvalidParameterError(f"eta must be > 0, got {eta}")
    if pair.p0 in (0.0, 1.0):
        orient = Orientation.H1_FIRST if pair.p0 == 0.0 else Orientation.H0_FIRST
        return LikelihoodRootReport((), RootMethod.GAUSSIAN_QUADRATIC, orient, (), eta)

    a, b, c = gaussian_quadratic_coefficients(pair, eta)
    sig0, sig1 = pair.h0.params[1], pair.h1.params[1]

    def orient_from_sign(value: float) -> Orientation:
        return Orientation.H0_FIRST if value < 0 else Orientation.H1_FIRST

    if abs(sig0 - sig1) <= EQUAL_SIGMA_RTOL * max(sig0, sig1):
        # Equal widths: the quadratic term vanishes; treat exactly as linear.
        if b == 0.0:
            return LikelihoodRootReport(
                (), RootMethod.GAUSSIAN_QUADRATIC, orient_from_sign(c), (), eta
            )
        root = -c / b
        # Left of the root the gap has the sign opposite to b.
        orient = Orientation.H0_FIRST if b > 0 else Orientation.H1_FIRST
        residuals = _check_residuals(pair, eta, (root,))
        return LikelihoodRootReport(
            (root,), RootMethod.GAUSSIAN_QUADRATIC, orient, residuals, eta
        )

    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        # No crossing (or a zero-measure tangency): a single region.  A
        # non-crossing parabola carries the sign of its leading coefficient.
        return LikelihoodRootReport(
            (), RootMethod.GAUSSIAN_QUADRATIC, orient_from_sign(a), (), eta
        )

    sq = math.sqrt(disc)
    if b >= 0.0:
        q = -(b + sq) / 2.0
    else:
        q = -(b - sq) / 2.0
    r1, r2 = q / a, c / q
    roots = []
    for r in sorted((r1, r2)):
        slope = 2.0 * a * r + b
        if slope != 0.0:  # one Newton polish pass against float rounding
            r = r - (a * r * r + b * r + c) / slope
        roots.append(r)
    roots = tuple(roots)
    # Outside the outer roots the parabola carries the sign of a.
    orient = orient_from_sign(a)
    residuals = _check_residuals(pair, eta, roots)
    return LikelihoodRootReport(roots, RootMethod.GAUSSIAN_QUADRATIC, orient, residuals, eta)


def _bisect(fn, lo: float, hi: float, f_lo: float, f_hi: float) -> float:
    """Plain bisection to BISECTION_WIDTH interval width."""
    for _ in range(200):
        if hi - lo <= BISECTION_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def ml_boundaries_generic(
    pair: HypothesisPair,
    eta: float = 1.0,
    interval: tuple[float, float] | None = None,
    grid: int = DEFAULT_GRID,
) -> LikelihoodRootReport:
    """Grid-scan plus bisection boundaries for arbitrary density pairs.

    The caller-supplied interval is the root-isolation contract: sign changes
    outside it are not seen.  The default interval spans both models out to 8
    scale units, beyond which the densities are numerically negligible.
    """
    if not eta > 0:
        raise InvalidParameterError(f"eta must be > 0, got {eta}")
    if grid < 2:
        raise InvalidParameterError(f"grid resolution must be >= 2, got {grid}")
    if pair.p0 in (0.0, 1.0):
        orient = Orientation.H1_FIRST if pair.p0 == 0.0 else Orientation.H0_FIRST
        return LikelihoodRootReport((), RootMethod.GRID_BISECTION, orient, (), eta)
    lo, hi = interval if interval is not None else default_search_interval(pair)
    if not lo < hi:
        raise EmptyIntervalError(f"empty search interval [{lo}, {hi}]")

    xs = np.linspace(lo, hi, grid)
    gap = np.asarray(log_ratio_gap(pair, eta, xs))
    defined = ~np.isnan(gap)
    warnings: list[str] = []
    if not defined.any():
        warnings.append("log ratio undefined on the whole interval")
        return LikelihoodRootReport(
            (), RootMethod.GRID_BISECTION, Orientation.H0_FIRST, (), eta, tuple(warnings)
        )

    xs_d = xs[defined]
    gap_d = gap[defined]
    signs = np.sign(gap_d)
    roots: list[float] = []
    scalar_gap = lambda t: float(log_ratio_gap(pair, eta, t))
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        roots.append(float(_bisect(scalar_gap, xs_d[i], xs_d[i + 1], gap_d[i], gap_d[i + 1])))
    for i in np.nonzero(signs == 0)[0]:  # exact grid hits
        roots.append(float(xs_d[i]))
    roots = sorted(roots)

    ends_differ = signs[signs != 0][0] != signs[signs != 0][-1] if (signs != 0).any() else False
    if len(roots) % 2 != (1 if ends_differ else 0):
        warnings.append(
            "root count parity disagrees with the interval end signs; "
            "the grid may be too coarse for this pair"
        )

    first_sign = signs[signs != 0][0] if (signs != 0).any() else -1.0
    orient = Orientation.H0_FIRST if first_sign < 0 else Orientation.H1_FIRST
    residuals = _check_residuals(pair, eta, roots)
    return LikelihoodRootReport(
        tuple(roots), RootMethod.GRID_BISECTION, orient, residuals, eta, tuple(warnings)
    )


def ml_boundaries(
    pair: HypothesisPair,
    eta: float = 1.0,
    interval: tuple[float, float] | None = None,
    grid: int = DEFAULT_GRID,
) -> LikelihoodRootReport:
    """Closed form for Gaussian pairs, grid scan otherwise."""
    if pair.h0.family is Family.GAUSSIAN and pair.h1.family is Family.GAUSSIAN:
        return ml_boundaries_gaussian(pair, eta)
    return ml_boundaries_generic(pair, eta, interval, grid)


@dataclass(frozen=True)
class LinearOptimum:
    y: float
    orientation: Orientation
    accuracy: float

    def to_dict(self) -> dict:
        return {"y": self.y, "orientation": self.orientation.value, "accuracy": self.accuracy}


def optimal_linear_boundary(
    pair: HypothesisPair,
    interval: tuple[float, float] | None = None,
    grid: int = DEFAULT_GRID,
) -> LinearOptimum:
    """Best single-boundary classifier.

    Candidates are the unit-threshold ratio roots; each is scored under both
    orientations and the most accurate wins, ties resolved toward the smaller
    boundary and then toward H0-first.
    """
    report = ml_boundaries(pair, 1.0, interval, grid)
    if not report.roots:
        raise NoRootError("the unit-threshold ratio equation has no root for this pair")
    best: LinearOptimum | None = None
    for y in report.roots:
        for orient in (Orientation.H0_FIRST, Orientation.H1_FIRST):
            acc = region_accuracy(pair, (y,), orient)
            if best is None or acc > best.accuracy + 1e-15:
                best = LinearOptimum(y, orient, acc)
    return best
