"""Normalized gauge norms on grid functions, their duals and axiom checks.

A grid function is a simple function: node ``j`` is a set of measure
``1/n`` on which the function is constant.  All norms here therefore work on
weighted vectors ``(values, weights)`` with ``sum(weights) == 1``, which also
covers the non-uniform simple functions built by
:func:`extend_to_measurable`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import (
    AxiomViolation,
    NormEvaluationError,
    NumericInputError,
    OptimizationFailure,
    ResolutionError,
    ShapeError,
    UnsupportedNormError,
)
from .spectral import CircleFunction, Grid, sample_grid

AXIOM_RTOL = 1e-12


def _as_weighted(f, weights=None):
    if isinstance(f, CircleFunction):
        values = np.abs(f.samples)
        if weights is None:
            weights = np.full(f.n, 1.0 / f.n)
    else:
        values = np.abs(np.asarray(f))
        if weights is None:
            weights = np.full(values.shape[-1], 1.0 / values.shape[-1])
    return values, np.asarray(weights, dtype=float)


class GaugeNorm:
    """Base class for ``||.||_1``-dominating normalized gauge norms.

    Subclasses implement ``_batch`` (rows of nonnegative values against
    shared weights), ``fundamental`` (the value on an indicator of measure
    ``t``), ``gradient`` and ``to_config``.
    """

    continuous = True
    name = "gauge"

    def __call__(self, f, weights=None) -> float:
        return self.evaluate(f, weights)

    def evaluate(self, f, weights=None) -> float:
        values, weights = _as_weighted(f, weights)
        if not np.all(np.isfinite(values)):
            raise NumericInputError(f"{self.name}: non-finite sample; use extend_to_measurable")
        return float(self.evaluate_batch(values[None, :], weights)[0])

    def evaluate_batch(self, values, weights) -> np.ndarray:
        values = np.abs(np.atleast_2d(values)).astype(float)
        weights = np.asarray(weights, dtype=float)
        if values.shape[1] != weights.shape[0]:
            raise ShapeError("values and weights disagree in length")
        out = np.zeros(values.shape[0])
        support = (values > 0) & (weights > 0)
        nonzero = support.any(axis=1)
        big = np.where(support, values, -np.inf).max(axis=1)
        small = np.where(support, values, np.inf).min(axis=1)
        flat = nonzero & (big == small)
        if flat.any():
            mass = (support[flat] * weights).sum(axis=1)
            out[flat] = big[flat] * np.array([self.fundamental(min(t, 1.0)) for t in mass])
        rest = nonzero & ~flat
        if rest.any():
            out[rest] = self._batch(values[rest], weights)
        return out

    def _batch(self, values, weights):
        raise NotImplementedError

    def fundamental(self, t: float) -> float:
        raise NotImplementedError

    def gradient(self, values, weights) -> np.ndarray:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items() if k != "variant")
        return f"{type(self).__name__}({params})"


class Lp(GaugeNorm):
    def __init__(self, p: float):
        p = float(p)
        if not p >= 1 or not math.isfinite(p):
            raise ValueError(f"Lp needs 1 <= p < inf, got {p}")
        self.p = p
        self.name = f"L{p:g}"

    def _batch(self, values, weights):
        top = values.max(axis=1)
        scaled = values / top[:, None]
        return top * np.sum(weights * scaled ** self.p, axis=1) ** (1.0 / self.p)

    def fundamental(self, t):
        return float(t) ** (1.0 / self.p)

    def gradient(self, values, weights):
        a = self.evaluate(values, weights)
        return weights * (values / a) ** (self.p - 1)

    def to_config(self):
        return {"variant": "lp", "p": self.p}


class LInfinity(GaugeNorm):
    """Sup norm; a gauge norm that is not continuous (negative control)."""

    continuous = False
    name = "Linf"

    def _batch(self, values, weights):
        return np.where(weights > 0, values, 0.0).max(axis=1)

    def fundamental(self, t):
        return 1.0 if t > 0 else 0.0

    def gradient(self, values, weights):
        g = np.zeros_like(values, dtype=float)
        g[np.argmax(np.where(weights > 0, values, -np.inf))] = 1.0
        return g

    def to_config(self):
        return {"variant": "linf"}


class WeightedLpMix(GaugeNorm):
    """Convex combination ``sum_k w_k ||f||_{p_k}``."""

    def __init__(self, weights, exponents):
        w = np.asarray(weights, dtype=float)
        ps = [float(p) for p in exponents]
        if w.ndim != 1 or len(w) != len(ps) or len(w) == 0:
            raise ValueError("weights and exponents must be nonempty and of equal length")
        if np.any(w <= 0):
            raise ValueError("mixture weights must be positive")
        w = w / w.sum()
        # make the sequential sum of the weights exactly one so alpha(1) == 1
        w[-1] = 1.0 - sum(w[:-1])
        self.weights = tuple(float(x) for x in w)
        self.terms = tuple(Lp(p) for p in ps)
        self.name = "LpMix"

    @classmethod
    def geometric(cls, terms: int = 8) -> "WeightedLpMix":
        """``sum_n 2^-n ||.||_n`` truncated to ``terms`` and renormalized."""
        return cls([2.0 ** -k for k in range(1, terms + 1)], list(range(1, terms + 1)))

    def _batch(self, values, weights):
        out = np.zeros(values.shape[0])
        for w, term in zip(self.weights, self.terms):
            out = out + w * term._batch(values, weights)
        return out

    def fundamental(self, t):
        total = 0.0
        for w, term in zip(self.weights, self.terms):
            total += w * term.fundamental(t)
        return total

    def gradient(self, values, weights):
        return sum(w * term.gradient(values, weights) for w, term in zip(self.weights, self.terms))

    def to_config(self):
        return {"variant": "mix", "weights": list(self.weights),
                "exponents": [t.p for t in self.terms]}


class Lorentz(GaugeNorm):
    """Lorentz norm ``||f||_{p,q} = (int_0^1 (t^{1/p} f*(t))^q (q/p) dt/t)^{1/q}``.

    On a simple function the decreasing rearrangement is a step function, so
    the integral is a finite sum.  Restricted to ``1 <= q <= p`` where the
    functional is a norm.
    """

    def __init__(self, p: float, q: float):
        p, q = float(p), float(q)
        if not (1 <= q <= p < math.inf):
            raise ValueError(f"Lorentz norm needs 1 <= q <= p < inf, got p={p}, q={q}")
        self.p, self.q = p, q
        self.name = f"Lorentz({p:g},{q:g})"
        self.normalization = 1.0
        self.normalization = 1.0 / self._raw_fundamental(1.0)

    def _raw_fundamental(self, t):
        return float(t) ** (1.0 / self.p)

    def _increments(self, values, weights):
        order = np.argsort(-values, axis=1, kind="stable")
        v = np.take_along_axis(values, order, axis=1)
        T = np.cumsum(weights[order], axis=1)
        Tprev = np.concatenate([np.zeros((len(v), 1)), T[:, :-1]], axis=1)
        r = self.q / self.p
        return order, v, T ** r - Tprev ** r

    def _batch(self, values, weights):
        _, v, incr = self._increments(values, weights)
        top = v[:, :1]
        s = np.sum((v / top) ** self.q * incr, axis=1) ** (1.0 / self.q)
        return self.normalization * top[:, 0] * s

    def fundamental(self, t):
        return self.normalization * self._raw_fundamental(t)

    def gradient(self, values, weights):
        order, v, incr = self._increments(values[None, :], weights)
        a = self._batch(values[None, :], weights)[0] / self.normalization
        g_sorted = incr[0] * (v[0] / a) ** (self.q - 1)
        g = np.empty_like(g_sorted)
        g[order[0]] = g_sorted
        return self.normalization * g

    def to_config(self):
        return {"variant": "lorentz", "p": self.p, "q": self.q}


class Orlicz(GaugeNorm):
    """Normalized Luxemburg norm of a tabulated Young function.

    ``Phi`` is the piecewise-linear interpolant of the table, extended
    linearly past the last point.  ``alpha(f) = c * inf{lam : int Phi(|f|/lam) <= 1}``
    with ``c = Phi^{-1}(1)`` unless an explicit ``normalization`` is given.
    Construction runs the axiom suite (500 trials) and rejects failures.
    """

    def __init__(self, table, normalization=None, validate=True, name="Orlicz"):
        tab = np.asarray(table, dtype=float)
        if tab.ndim != 2 or tab.shape[1] != 2 or len(tab) < 2:
            raise ValueError("Young table must be a list of (x, Phi(x)) pairs")
        x, y = tab[:, 0], tab[:, 1]
        if x[0] != 0 or y[0] != 0:
            raise ValueError("Young table must start at (0, 0)")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise ValueError("Young table must be strictly increasing")
        slopes = np.diff(y) / np.diff(x)
        if np.any(np.diff(slopes) < -1e-9 * np.abs(slopes[1:])):
            raise ValueError("Young table is not convex")
        self.x, self.y, self.slopes = x, y, slopes
        self.name = name
        self.scale_at_one = self.inverse(1.0)
        self.normalization = self.scale_at_one if normalization is None else float(normalization)
        if validate:
            report = validate_axioms(self, trials=500, seed=0)
            if not report.passed:
                raise AxiomViolation(f"{name} fails the gauge-norm axioms", report)

    @classmethod
    def llogl(cls, validate=True) -> "Orlicz":
        """Young function ``t log(1 + t)`` (the L log L class), tabulated."""
        x = np.concatenate([[0.0], np.geomspace(1e-6, 1e8, 1200)])
        out = cls(np.column_stack([x, x * np.log1p(x)]), validate=validate, name="LlogL")
        out.young = "llogl"
        return out

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self.x, self.y)
        beyond = self.y[-1] + self.slopes[-1] * (t - self.x[-1])
        return np.where(t <= self.x[-1], inside, beyond)

    def phi_slope(self, t):
        idx = np.clip(np.searchsorted(self.x, t, side="right") - 1, 0, len(self.slopes) - 1)
        return self.slopes[idx]

    def inverse(self, y):
        y = float(y)
        if y <= self.y[-1]:
            return float(np.interp(y, self.y, self.x))
        return float(self.x[-1] + (y - self.y[-1]) / self.slopes[-1])

    def luxemburg(self, values, weights):
        """Solve ``sum w Phi(v mu) = 1`` for ``mu = 1/lambda``, return ``lambda``.

        The left side is convex and increasing in ``mu``, so Newton steps
        started above the root decrease monotonically onto it; the Jensen
        bracket ``[||f||_1, ||f||_inf] / Phi^{-1}(1)`` guards every step.
        """
        values = np.atleast_2d(values)
        l1 = values @ weights
        linf = values.max(axis=1)
        mu_hi = self.scale_at_one / l1 * (1 + 1e-12)
        mu_lo = self.scale_at_one / linf * (1 - 1e-12)

        def excess(mu):
            return np.sum(weights * self.phi(values * mu[:, None]), axis=1) - 1.0

        slack = 1e-12
        if np.any(excess(mu_hi) < -slack) or np.any(excess(mu_lo) > slack):
            raise NormEvaluationError(f"{self.name}: Luxemburg equation is not bracketed")
        mu = mu_hi.copy()
        active = np.ones(len(mu), dtype=bool)
        for _ in range(200):
            v = values[active]
            m = mu[active]
            g = np.sum(weights * self.phi(v * m[:, None]), axis=1) - 1.0
            dg = np.sum(weights * v * self.phi_slope(v * m[:, None]), axis=1)
            step = np.where(dg > 0, g / np.where(dg > 0, dg, 1.0), 0.0)
            new = np.clip(m - step, mu_lo[active], m)
            done = m - new <= 2 * np.finfo(float).eps * m
            mu[active] = new
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            if not active.any():
                break
        else:
            raise NormEvaluationError(f"{self.name}: Luxemburg iteration did not settle")
        return 1.0 / mu

    def _batch(self, values, weights):
        return self.normalization * self.luxemburg(values, weights)

    def fundamental(self, t):
        if t <= 0:
            return 0.0
        return self.normalization / self.inverse(1.0 / t)

    def gradient(self, values, weights):
        lam = self.luxemburg(values, weights)[0]
        d = weights * self.phi_slope(values / lam)
        return self.normalization * d / np.sum(d * values / lam)

    young = None

    def to_config(self):
        if self.young is not None:
            return {"variant": "orlicz", "young": self.young}
        cfg = {"variant": "orlicz", "table": np.column_stack([self.x, self.y]).tolist()}
        if self.normalization != self.scale_at_one:
            cfg["normalization"] = self.normalization
        return cfg


class DualNorm(GaugeNorm):
    """The dual norm ``alpha'`` as an evaluator in its own right.

    On an indicator of measure ``t`` the dual of a rearrangement-invariant
    norm equals ``t / alpha(chi_E)``; general inputs go through
    :func:`dual_norm`.
    """

    def __init__(self, base: GaugeNorm, method: str = "ascent"):
        self.base = base
        self.method = method
        self.name = f"dual({base.name})"
        self.continuous = self.fundamental(1e-12) < 1e-3

    def _batch(self, values, weights):
        return np.array([dual_norm(self.base, row, self.method, weights=weights) for row in values])

    def fundamental(self, t):
        if t <= 0:
            return 0.0
        return t / self.base.fundamental(t)

    def to_config(self):
        return {"variant": "dual", "base": self.base.to_config(), "method": self.method}


def shipped_continuous_norms() -> list[GaugeNorm]:
    """The continuous norms exercised by the test and acceptance suites."""
    return [Lp(1), Lp(1.5), Lp(2), Lp(3), WeightedLpMix.geometric(8), Lorentz(2, 1),
            Orlicz.llogl()]


def norm_from_config(cfg: dict) -> GaugeNorm:
    variant = str(cfg.get("variant", "")).lower()
    if variant == "lp":
        return Lp(cfg["p"])
    if variant == "linf":
        return LInfinity()
    if variant == "mix":
        if cfg.get("preset") == "geometric":
            return WeightedLpMix.geometric(int(cfg.get("terms", 8)))
        return WeightedLpMix(cfg["weights"], cfg["exponents"])
    if variant == "lorentz":
        return Lorentz(cfg["p"], cfg["q"])
    if variant == "orlicz":
        if cfg.get("young") == "llogl":
            return Orlicz.llogl()
        return Orlicz(cfg["table"], normalization=cfg.get("normalization"),
                      validate=cfg.get("validate", True))
    if variant == "dual":
        return DualNorm(norm_from_config(cfg["base"]), cfg.get("method", "ascent"))
    raise ValueError(f"unknown norm variant {cfg.get('variant')!r}")


# axioms -------------------------------------------------------------------


@dataclass
class CheckResult:
    passed: bool
    failures: int = 0
    worst_excess: float = 0.0
    witness: dict | None = None

    def to_dict(self):
        return {"passed": self.passed, "failures": self.failures,
                "worst_excess": self.worst_excess, "witness": self.witness}


@dataclass
class AxiomReport:
    norm: str
    trials: int
    seed: int
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self):
        return {"norm": self.norm, "trials": self.trials, "seed": self.seed,
                "rtol": AXIOM_RTOL, "passed": self.passed,
                "checks": {k: v.to_dict() for k, v in self.checks.items()}}


def _inequality(lhs, rhs, rows):
    """Check ``lhs <= rhs`` row-wise with relative slack; report the worst row."""
    excess = (lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)
    bad = excess > AXIOM_RTOL
    worst = int(np.argmax(excess))
    witness = None
    if bad.any():
        witness = {"row": worst, "lhs": float(lhs[worst]), "rhs": float(rhs[worst]),
                   "values": [float(v) for v in rows[worst]]}
    return CheckResult(not bad.any(), int(bad.sum()), float(max(excess[worst], 0.0)), witness)


def random_simple_functions(rng, trials, size, max_levels=6):
    """Random nonnegative simple functions on ``size`` equal cells."""
    out = np.empty((trials, size))
    for i in range(trials):
        k = rng.integers(1, max_levels + 1)
        levels = rng.lognormal(0.0, 1.0, size=k)
        levels[rng.random(k) < 0.15] = 0.0
        out[i] = levels[rng.integers(0, k, size=size)]
    out[~out.any(axis=1), 0] = 1.0
    return out


def validate_axioms(spec: GaugeNorm, trials: int = 200, seed: int = 0, size: int = 64) -> AxiomReport:
    """Randomized check of the gauge-norm axioms and their first consequences.

    Checks normalization, the gauge property, ``||.||_1`` domination,
    monotonicity, ``alpha(fg) <= alpha(f)||g||_inf`` and
    ``alpha(g) <= ||g||_inf``.  Failures are reported, never raised.
    """
    rng = np.random.default_rng(seed)
    w = np.full(size, 1.0 / size)
    report = AxiomReport(spec.name, trials, seed)

    one = spec.evaluate_batch(np.ones((1, size)), w)[0]
    ok = abs(one - 1.0) <= AXIOM_RTOL
    report.checks["normalization"] = CheckResult(
        ok, int(not ok), abs(one - 1.0), None if ok else {"f": "1", "value": float(one)})

    f = random_simple_functions(rng, trials, size)
    # quarter-turn phases keep |f u| bit-identical to |f|, so equality is exact
    phases = np.array([1, 1j, -1, -1j])[rng.integers(0, 4, size=(trials, size))]
    a_f = spec.evaluate_batch(f, w)
    a_cf = spec.evaluate_batch(f * phases, w)
    diff = np.abs(a_cf - a_f)
    report.checks["gauge"] = CheckResult(bool(np.all(diff == 0)), int(np.sum(diff != 0)),
                                         float(diff.max()), None)

    report.checks["l1_domination"] = _inequality(f @ w, a_f, f)

    g = f * (1 + rng.random((trials, size)))
    g = g + (f == 0) * rng.random((trials, size)) * (rng.random((trials, 1)) < 0.5)
    a_g = spec.evaluate_batch(g, w)
    report.checks["monotone"] = _inequality(a_f, a_g, f)

    bound = rng.uniform(0.1, 3.0, size=(trials, 1))
    mult = bound * rng.random((trials, size)) * np.exp(2j * np.pi * rng.random((trials, size)))
    a_fm = spec.evaluate_batch(np.abs(f * mult), w)
    report.checks["multiplier_bound"] = _inequality(a_fm, a_f * np.abs(mult).max(axis=1), f)

    report.checks["sup_bound"] = _inequality(a_g, g.max(axis=1), g)
    return report


def continuity_modulus(spec: GaugeNorm, measures, grid: Grid | None = None):
    """``alpha(chi_E)`` for arcs ``E`` of the requested measures."""
    grid = grid or sample_grid()
    out = []
    for t in measures:
        j = float(t) * grid.n
        if not 0 < t <= 1 or abs(j - round(j)) > 1e-9 * grid.n:
            raise ResolutionError(f"measure {t} is not a multiple of 1/{grid.n}")
        out.append((float(t), spec.evaluate(grid.arc_indicator(0, int(round(j))))))
    return out


# measurable extension -------------------------------------------------------


@dataclass(frozen=True)
class ExtendedValue:
    value: float
    stabilized: bool
    truncations: tuple = ()

    @property
    def finite(self) -> bool:
        return self.stabilized and math.isfinite(self.value)


def _singular_cells(values, n, cap, ratio=2.0 ** (1 / 16)):
    """Sub-cell simple functions modelling ``inf`` markers as power-law spikes.

    Returns ``(levels, weights)`` per marker node, or ``None`` if a marker has
    no recognizable growth profile in its neighbours.
    """
    h = 2 * np.pi / n
    cells = []
    for j in np.flatnonzero(~np.isfinite(values)):
        gammas, amps = [], []
        for side in (1, -1):
            v1, v2 = values[(j + side) % n], values[(j + 2 * side) % n]
            if not (np.isfinite(v1) and np.isfinite(v2)) or v2 <= 0 or v1 <= v2:
                return None
            g = math.log2(v1 / v2)
            gammas.append(g)
            amps.append(v1 * h ** g)
        gamma = 0.5 * sum(gammas)
        amp = math.sqrt(amps[0] * amps[1])
        edge = amp * (h / 2) ** -gamma
        count = max(1, int(math.ceil(math.log(max(cap / edge, 1.0)) / math.log(ratio))) + 1)
        levels = edge * ratio ** np.arange(count + 1)
        radii = (amp / levels) ** (1 / gamma)
        radii[0] = h / 2
        shell_w = 2 * (radii[:-1] - radii[1:]) / (2 * np.pi)
        shell_v = levels[:-1] * math.sqrt(ratio)
        core_w = 2 * radii[-1] / (2 * np.pi)
        cells.append((np.append(shell_v, np.inf), np.append(shell_w, core_w)))
    return cells


def extend_to_measurable(spec: GaugeNorm, f, cap: float = 1e12, rtol: float = 1e-8) -> ExtendedValue:
    """Evaluate ``spec`` on a function that may be unbounded.

    Takes the supremum of ``alpha(min(|f|, c))`` over levels ``c`` doubling
    up to ``cap``.  ``inf`` samples are read as isolated power-law spikes
    whose profile is inferred from the neighbouring nodes and resolved by a
    geometric family of sub-cells.  The value is finite only if the last
    doubling changed it by less than ``rtol`` (relative).
    """
    values, weights = _as_weighted(f)
    n = len(values)
    finite = np.isfinite(values)
    top = float(values[finite].max(initial=0.0))
    if finite.all() and top <= cap:
        v = spec.evaluate(values, weights)
        return ExtendedValue(v, True, ((top, v),))
    cells = _singular_cells(values, n, cap) if not finite.all() else []
    if cells is None:
        return ExtendedValue(math.inf, False)
    all_v = np.concatenate([np.where(finite, values, 0.0)] + [c[0] for c in cells])
    all_w = np.concatenate([np.where(finite, weights, 0.0)] + [c[1] for c in cells])
    levels = [cap]
    while levels[-1] / 2 > max(top, 1.0):
        levels.append(levels[-1] / 2)
    levels = levels[::-1]
    if len(levels) < 2:
        levels = [cap / 2, cap]
    vals = spec.evaluate_batch(np.minimum(all_v[None, :], np.array(levels)[:, None]), all_w)
    history = tuple(zip(levels, (float(x) for x in vals)))
    last, prev = vals[-1], vals[-2]
    stabilized = last - prev <= rtol * last
    return ExtendedValue(float(last) if stabilized else math.inf, bool(stabilized), history)


# duality ------------------------------------------------------------------


def pairing(f: CircleFunction, h: CircleFunction) -> complex:
    """Quadrature of ``int f h dm``."""
    if f.grid != h.grid:
        raise ShapeError("pairing needs functions on the same grid")
    return complex(np.mean(f.samples * h.samples))


def _levels(a, w):
    keep = (a > 0) & (w > 0)
    a, w = a[keep], w[keep]
    if a.size == 0:
        return a, w
    uniq, inv = np.unique(a, return_inverse=True)
    mass = np.bincount(inv, weights=w)
    return uniq[::-1], mass[::-1]


def _dual_ascent(spec, a, w, maxiter=10_000, rtol=1e-9):
    a, W = _levels(a, w)
    if a.size == 0:
        return 0.0
    # indicators of the top-i level sets: exact for norms linear on the
    # decreasing cone (L1, Lorentz q=1), a certified lower bound otherwise
    A = np.cumsum(W * a)
    T = np.cumsum(W)
    vertex = max(A[i] / spec.fundamental(min(T[i], 1.0)) for i in range(a.size))
    if a.size == 1:
        return float(vertex)
    aw = a * W

    def objective(x):
        h = np.exp(x - x.max())
        num = aw @ h
        den = spec.evaluate(h, W)
        grad = -aw * h / num + spec.gradient(h, W) * h / den
        return -math.log(num) + math.log(den), grad

    # warm start on the power family h = a^s, which contains the Lp optimum
    log_a = np.log(a)
    fit = minimize_scalar(lambda s: objective(s * log_a)[0], bounds=(0.0, 8.0), method="bounded",
                          options={"xatol": 1e-6})
    x = fit.x * log_a
    best = max(vertex, math.exp(-fit.fun))
    previous = -math.inf
    used = 0
    # restarts shake L-BFGS off the kinks of piecewise-linear norms
    for _ in range(20):
        res = minimize(objective, x, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter - used, "ftol": 1e-12, "gtol": 1e-10})
        used += res.nit
        value = math.exp(-res.fun)
        best = max(best, value)
        if res.status == 1 or used >= maxiter:
            raise OptimizationFailure(f"dual ascent hit the iteration cap for {spec.name}", best)
        if value - previous <= rtol * 1e-3 * value:
            break
        previous, x = value, res.x
    return float(best)


def _dual_brute(spec, a, w, budget=70_000):
    """Dense cube search over step functions plus coordinate pattern refinement."""
    k = a.size
    if k > 16:
        raise ShapeError("brute_small is limited to 16 cells")
    levels = max(1, int(budget ** (1.0 / k)) - 1)
    grid_1d = np.linspace(0.0, 1.0, levels + 1)
    mesh = np.stack(np.meshgrid(*([grid_1d] * k), indexing="ij"), axis=-1).reshape(-1, k)
    mesh = mesh[mesh.any(axis=1)]

    def ratios(H):
        den = spec.evaluate_batch(H, w)
        return np.where(den > 0, (H * a) @ w / np.where(den > 0, den, 1.0), 0.0)

    r = ratios(mesh)
    h = mesh[int(np.argmax(r))].copy()
    best = float(r.max())
    step = 0.5
    while step > 1e-9:
        moves = []
        for j in range(k):
            for factor in (1 + step, 1 / (1 + step)):
                c = h.copy()
                c[j] = c[j] * factor if c[j] > 0 else step * h.max()
                moves.append(c)
            c = h.copy()
            c[j] = 0.0
            moves.append(c)
        moves = np.array(moves)
        moves = moves[moves.any(axis=1)]
        r = ratios(moves)
        i = int(np.argmax(r))
        if r[i] > best * (1 + 1e-15):
            best, h = float(r[i]), moves[i]
        else:
            step /= 2
    return best


def dual_norm(spec: GaugeNorm, f, method: str = "ascent", weights=None) -> float:
    """``alpha'(f) = sup{ int |f h| dm : alpha(h) <= 1 }``.

    ``closed_form`` covers ``Lp`` (Hoelder) and ``LInfinity``; ``ascent``
    maximizes the pairing over ``h >= 0`` constant on the level sets of
    ``|f|``; ``brute_small`` is a derivative-free search for grids of at most
    16 nodes, intended as an oracle.
    """
    a, w = _as_weighted(f, weights)
    if not np.all(np.isfinite(a)):
        raise NumericInputError("dual_norm needs finite samples")
    if method == "closed_form":
        if isinstance(spec, Lp):
            if spec.p == 1:
                return float(np.max(np.where(w > 0, a, 0.0)))
            return Lp(spec.p / (spec.p - 1)).evaluate(a, w)
        if isinstance(spec, LInfinity):
            return float(a @ w)
        raise UnsupportedNormError(f"no closed-form dual for {spec.name}")
    if method == "ascent":
        return _dual_ascent(spec, a, w)
    if method == "brute_small":
        return _dual_brute(spec, a, w)
    raise ValueError(f"unknown dual-norm method {method!r}")
