"""Logistic concept-diffusion model: rate law, trajectories, and fitting.

A concept spreads through a population of potential adopters at a rate
proportional to the product of current adopters and remaining room:

    rate(p) = (c / p_m) * p * (p_m - p)

which integrates to the logistic curve

    p(t) = p_m / (1 + ((p_m - p_0) / p_0) * exp(-c * t)).

When fitting corpus data, the adopter count is proxied by the cumulative
number of distinct documents matching a query in a discipline up to each
bin; timestamps are bin start years, so the growth constant is per year.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import CorpusIndex, TermQuery, count_matches
from .errors import TermflowError


class OutOfRangeP(TermflowError):
    pass


class InvalidParams(TermflowError):
    pass


class InvalidStep(TermflowError):
    pass


class NoGrowthSignal(TermflowError):
    pass


class DegenerateSeries(TermflowError):
    pass


_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class DiffusionParams:
    """Growth constant (per year), adopter ceiling, and initial adopters.

    The boundary values p_0 = 0 and p_0 = p_m are admitted as fixed points
    of the rate law; fitting always produces an interior p_0.
    """

    c: float
    p_m: float
    p_0: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and self.c > 0):
            raise InvalidParams(f"growth constant must be > 0, got {self.c!r}")
        if not (math.isfinite(self.p_m) and self.p_m > 0):
            raise InvalidParams(f"population ceiling must be > 0, got {self.p_m!r}")
        if not (math.isfinite(self.p_0) and 0 <= self.p_0 <= self.p_m):
            raise InvalidParams(
                f"initial adopters must lie in [0, {self.p_m}], got {self.p_0!r}"
            )


@dataclass(frozen=True)
class AdoptionTrajectory:
    times: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.times) != len(self.p):
            raise ValueError("times and p must have equal length")


def adoption_rate(p_t: float, params: DiffusionParams) -> float:
    """Instantaneous spread rate (c / p_m) * p_t * (p_m - p_t)."""
    if not 0 <= p_t <= params.p_m:
        raise OutOfRangeP(f"p_t must lie in [0, {params.p_m}], got {p_t!r}")
    return (params.c / params.p_m) * p_t * (params.p_m - p_t)


def inflection_time(params: DiffusionParams) -> float:
    """Time at which adopters reach p_m / 2 and the spread rate peaks."""
    if not 0 < params.p_0 < params.p_m:
        raise InvalidParams("inflection requires 0 < p_0 < p_m")
    return math.log((params.p_m - params.p_0) / params.p_0) / params.c


def logistic_value(params: DiffusionParams, t: float) -> float:
    """Closed-form adopter count at time t (t = 0 holds p_0 adopters)."""
    if params.p_0 == 0.0:
        return 0.0
    a = (params.p_m - params.p_0) / params.p_0
    exponent = min(max(-params.c * t, -_EXP_CLAMP), _EXP_CLAMP)
    return params.p_m / (1.0 + a * math.exp(exponent))


def trajectory_closed_form(
    params: DiffusionParams, times: Sequence[float]
) -> AdoptionTrajectory:
    """Exact logistic values at the given (sorted) times."""
    ts = list(times)
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError("times must be sorted ascending")
    return AdoptionTrajectory(
        times=tuple(float(t) for t in ts),
        p=tuple(logistic_value(params, t) for t in ts),
    )


def trajectory_euler(
    params: DiffusionParams, t_end: float, dt: float
) -> AdoptionTrajectory:
    """Forward-Euler integration of the rate law from t = 0, clamped to [0, p_m].

    A verification oracle for the closed form; global error is first order
    in the step size.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidStep(f"step size must be > 0, got {dt!r}")
    if t_end < 0:
        raise InvalidStep("t_end must be >= 0")
    times = [0.0]
    values = [float(params.p_0)]
    p = float(params.p_0)
    t = 0.0
    steps = int(round(t_end / dt))
    for _ in range(steps):
        p = p + dt * (params.c / params.p_m) * p * (params.p_m - p)
        p = min(max(p, 0.0), params.p_m)
        t += dt
        times.append(t)
        values.append(p)
    return AdoptionTrajectory(times=tuple(times), p=tuple(values))


def adoption_series(
    index: CorpusIndex, query: TermQuery, discipline: str
) -> AdoptionTrajectory:
    """Cumulative distinct matching documents per bin, as an adopter proxy."""
    times = []
    cumulative = []
    running = 0
    for b in index.bins:
        if index.doc_count(discipline, b):
            running += count_matches(index, query, discipline, b)
        times.append(float(b.start_year))
        cumulative.append(float(running))
    return AdoptionTrajectory(times=tuple(times), p=tuple(cumulative))


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters plus the root-mean-square residual.

    ``params.p_0`` is the fitted adopter count at the first observation
    time; predictions use times measured from that first timestamp.
    """

    params: DiffusionParams
    rmse: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "c": self.params.c,
            "p_m": self.params.p_m,
            "p_0": self.params.p_0,
            "rmse": self.rmse,
            "n_points": self.n_points,
        }


def _predict(
    c: float, p_m: float, p_0: float, times: np.ndarray
) -> np.ndarray:
    a = (p_m - p_0) / p_0
    exponent = np.clip(-c * times, -_EXP_CLAMP, _EXP_CLAMP)
    return p_m / (1.0 + a * np.exp(exponent))


def _rmse(pred: np.ndarray, obs: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - obs) ** 2)))


def fit(
    trajectory: AdoptionTrajectory,
    c_bounds: tuple[float, float] = (1e-3, 10.0),
    c_grid: int = 25,
    pm_max_factor: float = 10.0,
    pm_grid: int = 16,
    tol: float = 1e-8,
) -> FitResult:
    """Least-squares logistic fit via grid scan plus coordinate refinement.

    The scan walks log-spaced growth constants and ceilings (from just above
    the observed maximum up to ``pm_max_factor`` times it); for each
    candidate the initial adopter count is solved from the first positive
    observation. The best candidate is then refined one coordinate at a
    time with multiplicative steps until the relative step falls below
    ``tol``.
    """
    times = np.asarray(trajectory.times, dtype=float)
    obs = np.asarray(trajectory.p, dtype=float)
    if times.size < 5:
        raise DegenerateSeries(f"need at least 5 points, got {times.size}")
    if obs.max() == obs.min():
        raise NoGrowthSignal("series is flat; nothing to fit")
    positive = np.nonzero(obs > 0)[0]
    if positive.size == 0:
        raise NoGrowthSignal("series has no positive adopter counts")

    t0 = times[0]
    shifted = times - t0
    anchor_i = int(positive[0])
    t_anchor = shifted[anchor_i]
    p_anchor = obs[anchor_i]
    p_max = obs.max()

    def solve_p0(c: float, p_m: float) -> Optional[float]:
        if p_anchor >= p_m:
            return None
        a = (p_m / p_anchor - 1.0) * math.exp(min(c * t_anchor, _EXP_CLAMP))
        p_0 = p_m / (1.0 + a)
        if not (0 < p_0 < p_m and math.isfinite(p_0)):
            return None
        return p_0

    c_candidates = np.geomspace(c_bounds[0], c_bounds[1], c_grid)
    pm_candidates = np.geomspace(p_max * 1.001, p_max * pm_max_factor, pm_grid)

    best: Optional[tuple[float, float, float]] = None
    best_err = math.inf
    for c in c_candidates:
        for p_m in pm_candidates:
            p_0 = solve_p0(float(c), float(p_m))
            if p_0 is None:
                continue
            err = _rmse(_predict(float(c), float(p_m), p_0, shifted), obs)
            if err < best_err:
                best_err = err
                best = (float(c), float(p_m), p_0)
    if best is None:
        raise NoGrowthSignal("no admissible logistic candidate found")

    vec = list(best)

    def objective(v: Sequence[float]) -> float:
        c, p_m, p_0 = v
        if not (c > 0 and p_m > 0 and 0 < p_0 < p_m):
            return math.inf
        return _rmse(_predict(c, p_m, p_0, shifted), obs)

    step = 0.5
    while step > tol:
        improved = False
        for idx in range(3):
            for factor in (1.0 + step, 1.0 / (1.0 + step)):
                while True:
                    cand = list(vec)
                    cand[idx] *= factor
                    err = objective(cand)
                    if err < best_err:
                        vec, best_err = cand, err
                        improved = True
                    else:
                        break
        if not improved:
            step *= 0.5

    params = DiffusionParams(c=vec[0], p_m=vec[1], p_0=vec[2])
    return FitResult(params=params, rmse=best_err, n_points=int(times.size))
