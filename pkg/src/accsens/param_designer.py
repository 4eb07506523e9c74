"""Distribution-parameter design: minimum sensitivity at prescribed accuracy.

Given a box of admissible Gaussian parameters and a target accuracy gamma,
``design_params`` searches for the parameter vector whose maximum-accuracy
classifier attains exactly gamma with the smallest sensitivity.  The inner
boundaries move with the parameters, which makes the objective nonsmooth; the
search is a derivative-free simplex method under a quadratic penalty with a
stiffening continuation, multistarted from a fixed-seed low-discrepancy
sequence, with a final one-dimensional restoration of the accuracy equality.

The module also provides the closed-form accuracy/sensitivity laws for two
analytically solvable families (equal-variance Gaussian and exponential),
used as oracles for the generic pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.stats import qmc

from .classifier import Norm, Orientation
from .densities import DensityModel, HypothesisPair
from .errors import InfeasibleTargetError, InvalidParameterError, SchemaError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

FEASIBILITY_TOL = 1e-5
RHO_SCHEDULE = (1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8)
DEFAULT_RESTARTS = 30
EQUAL_SIGMA_RTOL = 1e-9


def _phi_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def _phi_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


# ---- closed-form laws ----


def gaussian_equal_variance_law(delta_mu: float, sigma: float) -> tuple[float, float]:
    """Equal-variance Gaussian pair with equal priors, adversary acting on the
    means: accuracy and sensitivity of the maximum-accuracy classifier.

    The boundary sits at the midpoint, accuracy is Phi(dmu / 2 sigma), and the
    sensitivity is |d accuracy / d mu1| = phi(dmu / 2 sigma) / (2 sigma) --
    the derivative of the accuracy law itself, which also matches central
    finite differences of the generic pipeline.
    """
    if delta_mu < 0:
        raise InvalidParameterError(f"mean separation must be >= 0, got {delta_mu}")
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    z = delta_mu / (2.0 * sigma)
    return _phi_cdf(z), _phi_pdf(z) / (2.0 * sigma)


@dataclass(frozen=True)
class ExponentialLaw:
    accuracy: float
    sensitivity: float
    boundary: float
    orientation: Orientation

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "boundary": self.boundary,
            "orientation": self.orientation.value,
        }


def exponential_law(r: float, lambda0: float) -> ExponentialLaw:
    """Exponential pair with rates (lambda0, r * lambda0), equal priors,
    adversary acting on the second rate.

    The unit-threshold boundary is log(r) / (lambda0 (r - 1)); the steeper
    density wins below it, so the configuration is H1-first.  Closed forms:

        accuracy    = 1/2 + 1/2 (r - 1) r^(-r/(r-1))
        sensitivity = log(r) / (2 lambda0 (r - 1)) * r^(-r/(r-1))
    """
    if not r > 1.0:
        raise InvalidParameterError(f"rate ratio must be > 1 (swap the rates otherwise), got {r}")
    if not lambda0 > 0:
        raise InvalidParameterError(f"lambda0 must be > 0, got {lambda0}")
    power = r ** (-r / (r - 1.0))
    boundary = math.log(r) / (lambda0 * (r - 1.0))
    accuracy = 0.5 + 0.5 * (r - 1.0) * power
    sensitivity = math.log(r) / (2.0 * lambda0 * (r - 1.0)) * power
    return ExponentialLaw(accuracy, sensitivity, boundary, Orientation.H1_FIRST)


# ---- inner evaluation: max-accuracy classifier of a Gaussian pair ----


def _gaussian_ml_eval(theta, p0: float, norm: Norm) -> tuple[float, float, tuple[float, ...]]:
    """(accuracy, sensitivity, boundaries) of the unit-threshold classifier.

    Scalar math only: this sits in the innermost loop of the design search.
    Widths within EQUAL_SIGMA_RTOL are routed to the single-boundary branch;
    the quadratic's a -> 0 limit is numerically unstable if unguarded.
    """
    mu0, s0, mu1, s1 = theta
    p1 = 1.0 - p0
    a = 0.5 * (1.0 / (s0 * s0) - 1.0 / (s1 * s1))
    b = mu1 / (s1 * s1) - mu0 / (s0 * s0)
    c = (
        math.log(s0 / s1)
        + math.log(p1 / p0)
        + mu0 * mu0 / (2.0 * s0 * s0)
        - mu1 * mu1 / (2.0 * s1 * s1)
    )

    if abs(s0 - s1) <= EQUAL_SIGMA_RTOL * max(s0, s1):
        if b == 0.0:
            return 0.5, 0.0, ()
        y = -c / b
        h0_first = b > 0
        roots = (y,)
    else:
        disc = b * b - 4.0 * a * c
        if disc <= 0.0:
            # single region: the ratio never crosses one; H0 wins iff a < 0
            return (p0 if a < 0 else p1), 0.0, ()
        sq = math.sqrt(disc)
        q = -(b + sq) / 2.0 if b >= 0 else -(b - sq) / 2.0
        y1, y2 = sorted((q / a, c / q))
        h0_first = a < 0
        roots = (y1, y2)

    if len(roots) == 1:
        (y,) = roots
        z0, z1 = (y - mu0) / s0, (y - mu1) / s1
        f0, f1 = _phi_pdf(z0) / s0, _phi_pdf(z1) / s1
        acc = p0 * _phi_cdf(z0) + p1 * (1.0 - _phi_cdf(z1))
        g = (-p0 * f0, -p0 * z0 * f0, p1 * f1, p1 * z1 * f1)
    else:
        y1, y2 = roots
        z01, z02 = (y1 - mu0) / s0, (y2 - mu0) / s0
        z11, z12 = (y1 - mu1) / s1, (y2 - mu1) / s1
        f01, f02 = _phi_pdf(z01) / s0, _phi_pdf(z02) / s0
        f11, f12 = _phi_pdf(z11) / s1, _phi_pdf(z12) / s1
        acc = p0 * (_phi_cdf(z01) - _phi_cdf(z02) + 1.0) + p1 * (_phi_cdf(z12) - _phi_cdf(z11))
        g = (
            p0 * (f02 - f01),
            p0 * (z02 * f02 - z01 * f01),
            p1 * (f11 - f12),
            p1 * (z11 * f11 - z12 * f12),
        )
    if not h0_first:
        acc = 1.0 - acc
    if norm is Norm.INF:
        sens = max(abs(v) for v in g)
    else:
        sens = math.sqrt(sum(v * v for v in g))
    return acc, sens, roots


# ---- design problem ----


@dataclass(frozen=True)
class ParamDesignProblem:
    """Search box for a Gaussian pair design.

    ``bounds`` are per-component (lo, hi) for (mu0, sigma0, mu1, sigma1).
    ``mean_gap_max`` optionally caps |mu0 - mu1|; ``ordered_sigmas`` demands
    sigma1 <= sigma0.  Violations of the coupled constraints are projected
    out and penalized on activation.
    """

    bounds: tuple[tuple[float, float], ...]
    gamma: float
    norm: Norm = Norm.INF
    mean_gap_max: float | None = None
    ordered_sigmas: bool = False
    p0: float = 0.5

    def __post_init__(self) -> None:
        if len(self.bounds) != 4:
            raise InvalidParameterError("bounds must cover (mu0, sigma0, mu1, sigma1)")
        for lo, hi in self.bounds:
            if not lo <= hi:
                raise InvalidParameterError(f"empty bound ({lo}, {hi})")
        if not (self.bounds[1][0] > 0 and self.bounds[3][0] > 0):
            raise InvalidParameterError("sigma bounds must be positive")
        if not 0.5 <= self.gamma <= 1.0:
            raise InvalidParameterError(f"gamma must lie in [0.5, 1], got {self.gamma}")

    def project(self, theta: np.ndarray) -> np.ndarray:
        out = theta.copy()
        for i, (lo, hi) in enumerate(self.bounds):
            out[i] = min(max(out[i], lo), hi)
        if self.mean_gap_max is not None:
            lo, hi = out[0] - self.mean_gap_max, out[0] + self.mean_gap_max
            out[2] = min(max(out[2], lo), hi)
        if self.ordered_sigmas and out[3] > out[1]:
            out[3] = out[1]
        return out

    def to_dict(self) -> dict:
        return {
            "bounds": [list(b) for b in self.bounds],
            "gamma": self.gamma,
            "norm": self.norm.value,
            "mean_gap_max": self.mean_gap_max,
            "ordered_sigmas": self.ordered_sigmas,
            "p0": self.p0,
        }

    @staticmethod
    def from_dict(obj: dict, gamma: float | None = None, norm: Norm = Norm.INF) -> "ParamDesignProblem":
        if not isinstance(obj, dict):
            raise SchemaError("design box spec must be an object")
        known = {"bounds", "gamma", "norm", "mean_gap_max", "ordered_sigmas", "p0"}
        unknown = set(obj) - known
        if unknown:
            raise SchemaError(f"unknown key {sorted(unknown)[0]!r} in design box spec")
        if "bounds" not in obj:
            raise SchemaError("design box spec missing key 'bounds'")
        bounds = tuple(tuple(float(v) for v in b) for b in obj["bounds"])
        return ParamDesignProblem(
            bounds=bounds,
            gamma=float(obj["gamma"]) if gamma is None else float(gamma),
            norm=Norm(obj["norm"]) if "norm" in obj and gamma is None else norm,
            mean_gap_max=obj.get("mean_gap_max"),
            ordered_sigmas=bool(obj.get("ordered_sigmas", False)),
            p0=float(obj.get("p0", 0.5)),
        )


def fig3_box(gamma: float, norm: Norm = Norm.INF) -> ParamDesignProblem:
    """The reference design box: mean gap up to 40, widths in [0.1, 15] with
    sigma1 <= sigma0, first mean pinned at zero (the problem is translation
    invariant)."""
    return ParamDesignProblem(
        bounds=((0.0, 0.0), (0.1, 15.0), (0.0, 40.0), (0.1, 15.0)),
        gamma=gamma,
        norm=norm,
        mean_gap_max=40.0,
        ordered_sigmas=True,
    )


@dataclass(frozen=True)
class RestartOutcome:
    start: tuple[float, ...]
    theta: tuple[float, ...]
    accuracy: float
    sensitivity: float
    feasible: bool
    box_active: bool

    def to_dict(self) -> dict:
        return {
            "start": list(self.start),
            "theta": list(self.theta),
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "feasible": self.feasible,
            "box_active": self.box_active,
        }


@dataclass(frozen=True)
class DesignResult:
    theta: tuple[float, ...]
    sensitivity: float
    accuracy: float
    boundaries: tuple[float, ...]
    gamma: float
    norm: Norm
    restarts: tuple[RestartOutcome, ...] = field(default=(), repr=False)

    @property
    def pair(self) -> HypothesisPair:
        return HypothesisPair(
            DensityModel.gaussian(self.theta[0], self.theta[1]),
            DensityModel.gaussian(self.theta[2], self.theta[3]),
        )

    def to_dict(self) -> dict:
        return {
            "theta": list(self.theta),
            "sensitivity": self.sensitivity,
            "accuracy": self.accuracy,
            "boundaries": list(self.boundaries),
            "gamma": self.gamma,
            "norm": self.norm.value,
            "restarts": [r.to_dict() for r in self.restarts],
        }


def _sobol_starts(n: int, seed: int) -> np.ndarray:
    """First n points of a scrambled Sobol sequence (drawn as a full 2^m block
    to keep the sampler quiet about balance)."""
    sampler = qmc.Sobol(d=4, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(max(n, 2))))
    return sampler.random_base2(m)[:n]


def max_accuracy(problem: ParamDesignProblem, starts: int = 12, seed: int = 1) -> float:
    """Largest attainable accuracy over the box (feasibility certificate)."""
    lo = np.array([b[0] for b in problem.bounds])
    hi = np.array([b[1] for b in problem.bounds])
    pts = lo + _sobol_starts(starts, seed) * (hi - lo)

    def neg_acc(raw: np.ndarray) -> float:
        theta = problem.project(raw)
        acc, _, _ = _gaussian_ml_eval(theta, problem.p0, problem.norm)
        return -acc + 1e2 * float(np.sum((raw - theta) ** 2))

    best = 0.5
    for x0 in pts:
        res = minimize(neg_acc, problem.project(x0), method="Nelder-Mead",
                       options={"maxiter": 400, "xatol": 1e-9, "fatol": 1e-12})
        acc, _, _ = _gaussian_ml_eval(problem.project(res.x), problem.p0, problem.norm)
        best = max(best, acc)
    return best


def _restore_accuracy(problem: ParamDesignProblem, theta: np.ndarray) -> np.ndarray | None:
    """One-dimensional polish of the accuracy equality.

    Accuracy grows with mean separation and shrinks as the widths close in on
    each other, so two monotone paths cover both defect signs: scale the mean
    gap, then (if bound-blocked) slide sigma1 toward sigma0.
    """
    gamma = problem.gamma

    def acc_at(t: np.ndarray) -> float:
        return _gaussian_ml_eval(problem.project(t), problem.p0, problem.norm)[0]

    # path 1: scale the separation mu1 - mu0
    delta = theta[2] - theta[0]
    if delta != 0.0:
        lo_s, hi_s = 0.0, 1.0
        cap = problem.bounds[2][1] - problem.bounds[2][0]
        if problem.mean_gap_max is not None:
            cap = min(cap if cap > 0 else math.inf, problem.mean_gap_max)
        if abs(delta) > 0:
            hi_s = min(4.0, cap / abs(delta)) if cap > 0 else 1.0

        def path(s: float) -> np.ndarray:
            t = theta.copy()
            t[2] = theta[0] + s * delta
            return t

        f_lo = acc_at(path(lo_s)) - gamma
        f_hi = acc_at(path(hi_s)) - gamma
        f_cur = acc_at(theta) - gamma
        try:
            if f_cur == 0.0:
                return theta
            if f_lo * f_cur < 0:
                s = brentq(lambda s: acc_at(path(s)) - gamma, lo_s, 1.0, xtol=1e-13)
                return problem.project(path(s))
            if f_cur * f_hi < 0:
                s = brentq(lambda s: acc_at(path(s)) - gamma, 1.0, hi_s, xtol=1e-13)
                return problem.project(path(s))
        except ValueError:
            pass
    # path 2: slide sigma1 toward sigma0 (less discriminable) or to its floor
    s1_lo, s1_hi = problem.bounds[3]
    if problem.ordered_sigmas:
        s1_hi = min(s1_hi, theta[1])

    def path2(v: float) -> np.ndarray:
        t = theta.copy()
        t[3] = v
        return t

    f_a = acc_at(path2(s1_lo)) - gamma
    f_b = acc_at(path2(s1_hi)) - gamma
    if f_a * f_b <= 0:
        try:
            v = brentq(lambda v: acc_at(path2(v)) - gamma, s1_lo, s1_hi, xtol=1e-13)
            return problem.project(path2(v))
        except ValueError:
            return None
    return None


def design_params(
    problem: ParamDesignProblem,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    nm_maxiter: int = 160,
) -> DesignResult:
    """Best-of-multistart minimum-sensitivity design at accuracy gamma."""
    attainable = max_accuracy(problem)
    if problem.gamma > attainable + 1e-9:
        raise InfeasibleTargetError(
            f"gamma={problem.gamma!r} exceeds the box's attainable accuracy {attainable!r}"
        )

    lo = np.array([b[0] for b in problem.bounds])
    hi = np.array([b[1] for b in problem.bounds])
    starts = lo + _sobol_starts(restarts, seed) * (hi - lo)

    outcomes: list[RestartOutcome] = []
    best_idx = -1
    best_key: tuple[float, int] | None = None
    for k, raw0 in enumerate(starts):
        x = problem.project(raw0)
        for rho in RHO_SCHEDULE:

            def objective(raw: np.ndarray, rho=rho) -> float:
                theta = problem.project(raw)
                acc, sens, _ = _gaussian_ml_eval(theta, problem.p0, problem.norm)
                excess = float(np.sum((raw - theta) ** 2))
                return sens + rho * (acc - problem.gamma) ** 2 + (1e2 + rho) * excess

            res = minimize(
                objective, x, method="Nelder-Mead",
                options={"maxiter": nm_maxiter, "xatol": 1e-10, "fatol": 1e-14},
            )
            x = res.x
        theta = problem.project(x)
        polished = _restore_accuracy(problem, theta)
        if polished is not None:
            theta = polished
        acc, sens, roots = _gaussian_ml_eval(theta, problem.p0, problem.norm)
        feasible = abs(acc - problem.gamma) <= FEASIBILITY_TOL
        box_active = bool(np.any(np.abs(x - theta) > 1e-12))
        outcomes.append(
            RestartOutcome(
                tuple(float(v) for v in raw0),
                tuple(float(v) for v in theta),
                float(acc), float(sens), feasible, box_active,
            )
        )
        if feasible and (best_key is None or (sens, k) < best_key):
            best_key = (sens, k)
            best_idx = k
    if best_idx < 0:
        raise InfeasibleTargetError(
            f"no restart reached accuracy {problem.gamma!r} within {FEASIBILITY_TOL}"
        )
    chosen = outcomes[best_idx]
    _, _, roots = _gaussian_ml_eval(np.asarray(chosen.theta), problem.p0, problem.norm)
    return DesignResult(
        chosen.theta, chosen.sensitivity, chosen.accuracy, tuple(roots),
        problem.gamma, problem.norm, tuple(outcomes),
    )


def gamma_sweep(
    box: ParamDesignProblem,
    gammas,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> list[DesignResult]:
    """Design at each accuracy level of a sweep, sharing the box."""
    results = []
    for gamma in gammas:
        problem = ParamDesignProblem(
            bounds=box.bounds, gamma=float(gamma), norm=box.norm,
            mean_gap_max=box.mean_gap_max, ordered_sigmas=box.ordered_sigmas, p0=box.p0,
        )
        results.append(design_params(problem, restarts=restarts, seed=seed))
    return results


def sweep_csv_text(results: list[DesignResult]) -> str:
    lines = ["gamma,sens_star,mu0,sigma0,mu1,sigma1"]
    for r in results:
        lines.append(
            ",".join(repr(float(v)) for v in (r.gamma, r.sensitivity, *r.theta))
        )
    return "\n".join(lines) + "\n"
