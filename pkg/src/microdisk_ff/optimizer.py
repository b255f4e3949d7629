"""Parameter sweeps, argmax refinement and Monte Carlo robustness studies."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from sklearn.base import clone

from ._validation import InvalidParameterError, MicrodiskError, NoBracketError, check_positive
from .efficiency import eta_zpl
from .estimator import MicrodiskEmitter
from .lattice import basis, canonicalize_alignment, reduce_alignment

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("a", "u", "v", "r_h", "t", "NA")
METRICS = ("eta_col", "eta")
INVPHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SweepSpec:
    param: str
    lo: float
    hi: float
    count: int = 26
    metric: str = "eta_col"

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise InvalidParameterError(f"cannot sweep {self.param!r}; choose from {SWEEP_PARAMS}")
        if self.metric not in METRICS:
            raise InvalidParameterError(f"unknown metric {self.metric!r}; choose from {METRICS}")
        if not self.lo < self.hi:
            raise InvalidParameterError(f"sweep range needs lo < hi, got [{self.lo}, {self.hi}]")
        if int(self.count) != self.count or self.count < 3:
            raise InvalidParameterError(f"sweep needs at least 3 samples, got {self.count}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.count))


@dataclass
class Objective:
    """Metric of a :class:`MicrodiskEmitter` as a function of one parameter."""

    base: MicrodiskEmitter
    param: str
    metric: str = "eta_col"
    purcell: float = 52.6
    center: str = "SnV"

    def estimator_at(self, value: float) -> MicrodiskEmitter:
        key = "na" if self.param == "NA" else self.param
        return clone(self.base).set_params(**{key: float(value)})

    def __call__(self, value: float) -> float:
        eta_col = self.estimator_at(value).fit().score()
        if self.metric == "eta":
            return eta_col * eta_zpl(self.purcell, self.center)
        return eta_col


@dataclass
class SweepResult:
    param: str
    metric: str
    values: np.ndarray
    metrics: np.ndarray
    errors: dict[int, str] = field(default_factory=dict)
    objective: Callable[[float], float] | None = field(default=None, repr=False)
    refined: "RefinedArgmax | None" = None

    @property
    def argmax_index(self) -> int:
        """Index of the best sample; ties go to the lowest parameter value."""
        ok = np.isfinite(self.metrics)
        if not ok.any():
            raise MicrodiskError("every sweep point failed")
        masked = np.where(ok, self.metrics, -np.inf)
        return int(np.argmax(masked))

    @property
    def argmax(self) -> tuple[float, float]:
        i = self.argmax_index
        return float(self.values[i]), float(self.metrics[i])

    def rows(self):
        for x, y in zip(self.values, self.metrics):
            yield self.param, float(x), float(y)

    def summary(self) -> dict:
        x, y = self.argmax
        out = {
            "param": self.param,
            "metric": self.metric,
            "count": len(self.values),
            "argmax": {"value": x, "metric": y, "index": self.argmax_index},
            "failures": {str(i): msg for i, msg in sorted(self.errors.items())},
        }
        if self.refined is not None:
            out["refined"] = self.refined.to_dict()
        return out


@dataclass(frozen=True)
class RefinedArgmax:
    value: float
    metric: float
    interval: tuple[float, float]
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "metric": self.metric,
            "interval": list(self.interval),
            "evaluations": self.evaluations,
        }


def _map_ordered(func, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _safe(func):
    def run(x):
        try:
            return float(func(x)), None
        except (MicrodiskError, ValueError, ArithmeticError) as exc:
            return math.nan, f"{type(exc).__name__}: {exc}"

    return run


def run_sweep(spec: SweepSpec, objective: Callable[[float], float], threads: int = 1) -> SweepResult:
    """Evaluate ``objective`` at uniformly spaced samples; failures are recorded per point."""
    xs = spec.values()
    results = _map_ordered(_safe(objective), list(xs), threads)
    metrics = np.array([r[0] for r in results])
    errors = {i: r[1] for i, r in enumerate(results) if r[1] is not None}
    if len(errors) == len(xs):
        raise MicrodiskError(f"every sweep point failed; first error: {errors[0]}")
    for i, msg in errors.items():
        logger.warning("sweep point %s=%g failed: %s", spec.param, xs[i], msg)
    return SweepResult(spec.param, spec.metric, xs, metrics, errors, objective)


def sweep(spec: SweepSpec, base: MicrodiskEmitter, purcell: float = 52.6, center: str = "SnV", threads: int = 1) -> SweepResult:
    """Sweep one parameter of ``base`` and record the chosen metric.

    NA sweeps reuse a single far-field evaluation.
    """
    if spec.param == "NA":
        est = clone(base).fit()
        scale = eta_zpl(purcell, center) if spec.metric == "eta" else 1.0

        def by_na(na):
            return scale * est.set_params(na=float(na)).score()

        result = run_sweep(spec, by_na, threads=1)
        result.objective = Objective(base, "NA", spec.metric, purcell, center)
        return result
    return run_sweep(spec, Objective(base, spec.param, spec.metric, purcell, center), threads)


def golden_section_max(func, lo: float, hi: float, xtol: float, max_iter: int = 200):
    """Maximize a unimodal ``func`` on ``[lo, hi]``; returns the best point seen and the final bracket."""
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = func(c), func(d)
    seen = [(c, fc), (d, fd)]
    n = 2
    while abs(b - a) > xtol and n < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = func(c)
            seen.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = func(d)
            seen.append((d, fd))
        n += 1
    best = max(seen, key=lambda p: (p[1], -p[0]))
    return best, (a, b), n


def refine_argmax(result: SweepResult, rtol: float = 1e-3, objective=None) -> RefinedArgmax:
    """Golden-section refinement between the neighbors of the best coarse sample.

    Stops once the bracket is narrower than ``rtol`` times the coarse
    argmax (absolute ``rtol`` if that is zero). Never returns a metric below
    the best coarse sample.
    """
    check_positive("rtol", rtol)
    func = objective if objective is not None else result.objective
    if func is None:
        raise InvalidParameterError("no objective available for refinement")
    i = result.argmax_index
    if i == 0 or i == len(result.values) - 1:
        raise NoBracketError(
            f"maximum of {result.param} sits at the sweep boundary ({result.values[i]:.6g}); widen the sweep range"
        )
    lo, hi = float(result.values[i - 1]), float(result.values[i + 1])
    x0, y0 = result.argmax
    xtol = rtol * abs(x0) if x0 != 0 else rtol

    def safe(x):
        try:
            return float(func(x))
        except (MicrodiskError, ValueError, ArithmeticError):
            return -math.inf

    (xb, yb), interval, n = golden_section_max(safe, lo, hi, xtol)
    if yb < y0:
        xb, yb = x0, y0
    refined = RefinedArgmax(float(xb), float(yb), (float(interval[0]), float(interval[1])), n)
    result.refined = refined
    return refined


_ROBUST_PARAMS = ("a", "r_h", "t", "u", "v", "uv")


@dataclass(frozen=True)
class RobustnessSpec:
    """Monte Carlo study over fabrication variations.

    ``distributions`` maps a parameter to ``{"dist": "uniform", "lo", "hi"}``,
    ``{"dist": "normal", "mean", "sd"}`` or, for the alignment pair ``"uv"``,
    ``{"dist": "cell"}`` (uniform over the primitive cell). Nominal values
    come from the base estimator when a parameter is not listed.
    """

    seed: int
    count: int = 205
    distributions: dict = field(default_factory=lambda: {"uv": {"dist": "cell"}})
    thresholds: tuple = tuple(np.linspace(0.0, 0.5, 51))

    def __post_init__(self):
        if self.seed is None or int(self.seed) != self.seed:
            raise InvalidParameterError("a Monte Carlo study needs an integer seed")
        if int(self.count) != self.count or self.count < 1:
            raise InvalidParameterError(f"sample count must be a positive integer, got {self.count}")
        for name, d in self.distributions.items():
            if name not in _ROBUST_PARAMS:
                raise InvalidParameterError(f"cannot vary {name!r}; choose from {_ROBUST_PARAMS}")
            kind = d.get("dist")
            if name == "uv":
                if kind != "cell":
                    raise InvalidParameterError("the 'uv' pair only supports dist='cell'")
            elif kind == "uniform":
                if not d["lo"] <= d["hi"]:
                    raise InvalidParameterError(f"{name}: uniform needs lo <= hi")
            elif kind == "normal":
                if d["sd"] < 0:
                    raise InvalidParameterError(f"{name}: normal width must be non-negative")
            else:
                raise InvalidParameterError(f"{name}: unknown distribution {kind!r}")
        if "uv" in self.distributions and ({"u", "v"} & set(self.distributions)):
            raise InvalidParameterError("vary either 'uv' or 'u'/'v', not both")


@dataclass
class RobustnessResult:
    seed: int
    samples: list[dict]
    metrics: np.ndarray
    thresholds: np.ndarray
    fraction_above: np.ndarray
    failures: dict[int, str]

    @property
    def n_failed(self) -> int:
        return len(self.failures)

    def summary(self) -> dict:
        ok = self.metrics[np.isfinite(self.metrics)]
        return {
            "seed": self.seed,
            "count": len(self.samples),
            "evaluated": int(ok.size),
            "failed": self.n_failed,
            "failures": {str(i): m for i, m in sorted(self.failures.items())},
            "mean_metric": float(ok.mean()) if ok.size else None,
            "max_metric": float(ok.max()) if ok.size else None,
        }


def draw_samples(spec: RobustnessSpec, base: MicrodiskEmitter) -> list[dict]:
    """Parameter tuples for every sample, drawn in a fixed order from the seeded generator."""
    rng = np.random.default_rng(int(spec.seed))
    n = int(spec.count)
    cols = {}
    for name in sorted(spec.distributions):
        d = spec.distributions[name]
        if name == "uv":
            f = rng.random((n, 2))
            cols["uv_frac"] = f
        elif d["dist"] == "uniform":
            cols[name] = rng.uniform(d["lo"], d["hi"], n)
        else:
            cols[name] = rng.normal(d["mean"], d["sd"], n)
    samples = []
    for i in range(n):
        s = {}
        for name in ("a", "r_h", "t", "u", "v"):
            if name in cols:
                s[name] = float(cols[name][i])
        a = s.get("a", base.a)
        if "uv_frac" in cols:
            u, v = cols["uv_frac"][i] @ basis(a)
            s["u"], s["v"] = float(u), float(v)
        if "u" in s or "v" in s:
            u, v = s.get("u", base.u), s.get("v", base.v)
            s["u_reduced"], s["v_reduced"] = reduce_alignment(u, v, a)
            s["u_canonical"], s["v_canonical"] = canonicalize_alignment(u, v, a)
        samples.append(s)
    return samples


def cumulative_fraction(metrics, thresholds) -> np.ndarray:
    """Fraction of finite samples strictly above each threshold."""
    m = np.asarray(metrics, dtype=float)
    m = m[np.isfinite(m)]
    t = np.asarray(thresholds, dtype=float)
    if m.size == 0:
        return np.zeros_like(t)
    return (m[None, :] > t[:, None]).sum(axis=1) / m.size


def robustness(spec: RobustnessSpec, base: MicrodiskEmitter, threads: int = 1) -> RobustnessResult:
    """Evaluate collection efficiency for randomly varied devices.

    Alignments are evaluated at their symmetry-reduced representative,
    which gives the same efficiency as the drawn offset. Failed samples are
    counted and excluded from the cumulative curve.
    """
    samples = draw_samples(spec, base)

    def evaluate(s):
        params = {k: s[k] for k in ("a", "r_h", "t") if k in s}
        if "u_reduced" in s:
            params["u"], params["v"] = s["u_reduced"], s["v_reduced"]
        return clone(base).set_params(**params).fit().score()

    results = _map_ordered(_safe(evaluate), samples, threads)
    metrics = np.array([r[0] for r in results])
    failures = {i: r[1] for i, r in enumerate(results) if r[1] is not None}
    for i, msg in failures.items():
        logger.warning("robustness sample %d failed: %s", i, msg)
    thresholds = np.asarray(spec.thresholds, dtype=float)
    return RobustnessResult(int(spec.seed), samples, metrics, thresholds, cumulative_fraction(metrics, thresholds), failures)
