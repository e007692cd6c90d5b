"""Outer functions, inner-outer splitting and bounded-inverse factorization.

Boundary values of an outer function are built from a modulus ``phi`` as
``exp(L + i Q L)`` where ``L = log phi`` and ``Q`` is the conjugate
function.  Isolated zeros and poles of ``phi`` at grid nodes are split off
and carried as exact factors ``(1 - conj(zeta) z)^order`` (see
:func:`hardygauge.spectral.split_log_modulus`), which keeps the smooth part
spectrally resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InverseUnboundedError,
    NotHardyError,
    NotLogIntegrableError,
    NumericInputError,
    UnsupportedNormError,
    VanishingModulusError,
)
from .norms import GaugeNorm, extend_to_measurable
from .spectral import (
    MAX_SMALL_FRACTION,
    CircleFunction,
    conjugate_function,
    split_log_modulus,
)

ANALYTIC_RTOL = 1e-8
DIVISION_GUARD = 1e-10


@dataclass(frozen=True)
class MembershipReport:
    """Two-sided membership test ``H^alpha = H^1 cap L^alpha`` on the grid.

    ``negative_energy`` is the sum of ``|c_k|^2`` over ``k < 0``; the
    analytic side passes when it is at most ``tol * total_energy``.
    """

    negative_energy: float
    total_energy: float
    analytic: bool
    norm_value: float
    norm_finite: bool
    tol: float
    singular_nodes: int = 0

    @property
    def member(self) -> bool:
        return self.analytic and self.norm_finite

    def to_dict(self) -> dict:
        return {
            "negative_energy": self.negative_energy,
            "total_energy": self.total_energy,
            "analytic": self.analytic,
            "norm_value": self.norm_value,
            "norm_finite": self.norm_finite,
            "tol": self.tol,
            "singular_nodes": self.singular_nodes,
            "member": self.member,
        }


@dataclass(frozen=True)
class LogIntegrabilityReport:
    value: float
    passed: bool
    small_fraction: float
    singular_nodes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "passed": self.passed,
            "small_fraction": self.small_fraction,
            "max_small_fraction": MAX_SMALL_FRACTION,
            "singular_nodes": [list(s) for s in self.singular_nodes],
        }


@dataclass(frozen=True, eq=False)
class FactorizationResult:
    """``f = unimodular * outer`` with the recomputed residuals.

    For :func:`inner_outer_factorize` the pair is ``(u, g)``; for
    :func:`factorize_inverse_bounded` it is ``(w, h)``.
    """

    unimodular: CircleFunction
    outer: CircleFunction
    residual_reconstruction: float
    residual_unimodularity: float
    outer_negative_energy: float
    outer_at_origin: float
    extras: dict = field(default_factory=dict)
    inverse_outer: CircleFunction | None = None

    def to_dict(self) -> dict:
        out = {
            "residual_reconstruction": self.residual_reconstruction,
            "residual_unimodularity": self.residual_unimodularity,
            "outer_negative_energy": self.outer_negative_energy,
            "outer_at_origin": self.outer_at_origin,
        }
        out.update(self.extras)
        return out


def _require_continuous(spec: GaugeNorm):
    if not spec.continuous:
        raise UnsupportedNormError(f"{spec.name} is not a continuous gauge norm")


def _analytic_completion(f: CircleFunction, holes: np.ndarray) -> CircleFunction:
    """Fill ``holes`` with the values that minimize the negative-frequency energy."""
    n = f.n
    base = np.where(holes, 0, f.samples)
    neg = np.flatnonzero(f.grid.frequencies < 0)
    idx = np.flatnonzero(holes)
    c0 = np.fft.fft(base)[neg] / n
    A = np.exp(-1j * np.outer(f.grid.frequencies[neg], f.grid.theta[idx])) / n
    x = np.linalg.lstsq(A, -c0, rcond=None)[0]
    base[idx] = x
    return CircleFunction(f.grid, base)


def is_in_Halpha(f: CircleFunction, spec: GaugeNorm, tol: float = ANALYTIC_RTOL) -> MembershipReport:
    """Grid version of ``H^alpha = H^1 cap L^alpha``.

    The analytic side compares the negative-frequency energy with
    ``tol`` times the total energy.  The ``L^alpha`` side goes through
    :func:`extend_to_measurable`, so ``inf`` markers at isolated nodes are
    allowed; such nodes take the values that minimize the negative-frequency
    energy, since a single node carries no information about the limit.

    Raises
    ------
    UnsupportedNormError
        If ``spec`` is not continuous.
    """
    _require_continuous(spec)
    finite = np.isfinite(f.samples)
    spectral_part = f if finite.all() else _analytic_completion(f, ~finite)
    neg = spectral_part.negative_energy
    total = spectral_part.total_energy
    ext = extend_to_measurable(spec, f)
    return MembershipReport(
        negative_energy=neg,
        total_energy=total,
        analytic=bool(neg <= tol * total),
        norm_value=float(ext.value),
        norm_finite=ext.finite,
        tol=tol,
        singular_nodes=int(np.count_nonzero(~finite)),
    )


def log_integrability(phi: CircleFunction) -> LogIntegrabilityReport:
    """Floored quadrature of ``log phi`` and the gate verdict.

    Never raises for a nonnegative input; a modulus that vanishes
    identically gives ``-inf`` and a failed gate.
    """
    try:
        lm = split_log_modulus(phi)
    except NotLogIntegrableError as exc:
        return LogIntegrabilityReport(-math.inf, False, float(exc.small_fraction or 1.0))
    return LogIntegrabilityReport(
        value=lm.mean,
        passed=lm.integrable,
        small_fraction=lm.small_fraction,
        singular_nodes=tuple((s.index, s.order) for s in lm.singularities),
    )


def _outer_parts(phi: CircleFunction):
    try:
        lm = split_log_modulus(phi)
    except NotLogIntegrableError as exc:
        raise VanishingModulusError(str(exc), exc.small_fraction) from exc
    if not lm.integrable:
        raise VanishingModulusError(
            f"modulus is small on {lm.small_fraction:.3%} of the nodes", lm.small_fraction)
    L = CircleFunction(phi.grid, lm.log_regular)
    smooth = np.exp(lm.log_regular + 1j * conjugate_function(L).samples)
    return lm, smooth


def outer_from_modulus(phi: CircleFunction) -> CircleFunction:
    """Boundary values of the outer function with modulus ``phi``.

    The result is normalized so that its value at the origin,
    ``exp(int log phi dm)``, is real and positive.

    Raises
    ------
    VanishingModulusError
        If ``phi`` fails the log-integrability gate.
    """
    lm, smooth = _outer_parts(phi)
    return CircleFunction(phi.grid, smooth * lm.singular_factor(phi.grid.z))


def _fill_unimodular(values: np.ndarray, nodes) -> np.ndarray:
    """Replace ``values`` at isolated ``nodes`` by a unit-modulus extrapolation."""
    n = len(values)
    out = values.copy()
    for j in nodes:
        a, b, c, d = (values[(j + s) % n] for s in (-2, -1, 1, 2))
        fill = (4 * (b + c) - (a + d)) / 6
        if not np.isfinite(fill) or abs(fill) == 0:
            fill = b + c
        out[j] = fill / abs(fill)
    return out


def _residuals(target, unimodular, outer):
    with np.errstate(invalid="ignore"):
        rec = target.samples - unimodular.samples * outer.samples
    ok = np.isfinite(target.samples) & np.isfinite(outer.samples)
    return (float(np.max(np.abs(rec[ok]), initial=0.0)),
            float(np.max(np.abs(np.abs(unimodular.samples) - 1))))


def inner_outer_factorize(f: CircleFunction, tol: float = ANALYTIC_RTOL) -> FactorizationResult:
    """Split an analytic ``f`` as ``u * g`` with ``u`` inner and ``g`` outer.

    The log-integrability gate is checked before analyticity, so indicator
    moduli always surface as :class:`VanishingModulusError`.

    Raises
    ------
    VanishingModulusError
        If ``|f|`` fails the log gate or ``g`` is tiny away from isolated zeros.
    NotHardyError
        If the negative-frequency energy of ``f`` exceeds ``tol`` times its total.
    """
    if not f.is_finite:
        raise NumericInputError("inner_outer_factorize needs finite samples")
    g = outer_from_modulus(abs(f))
    if f.negative_energy > tol * f.total_energy:
        raise NotHardyError(
            f"negative-frequency energy {f.negative_energy:.3e} exceeds "
            f"{tol:g} of the total {f.total_energy:.3e}")
    lm = split_log_modulus(abs(f))
    zeros = {s.index for s in lm.singularities if s.order > 0}
    tiny = np.abs(g.samples) < DIVISION_GUARD * g.max_abs
    stray = set(np.flatnonzero(tiny).tolist()) - zeros
    if stray:
        raise VanishingModulusError(
            f"outer part is below {DIVISION_GUARD:g} of its maximum at {len(stray)} nodes",
            float(np.mean(tiny)))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(tiny, 0, f.samples / np.where(tiny, 1, g.samples))
    u = CircleFunction(f.grid, _fill_unimodular(u, sorted(zeros)))
    rec, uni = _residuals(f, u, g)
    return FactorizationResult(
        unimodular=u,
        outer=g,
        residual_reconstruction=rec,
        residual_unimodularity=uni,
        outer_negative_energy=g.negative_energy,
        outer_at_origin=float(math.exp(lm.mean)),
        extras={"isolated_zeros": sorted(zeros)},
    )


def factorize_inverse_bounded(k: CircleFunction, spec: GaugeNorm) -> FactorizationResult:
    """Factor a bounded ``k`` as ``w * h`` with ``w`` unimodular and ``1/h`` in ``H^alpha``.

    Follows the constructive route: ``g`` is the outer function with
    ``|g| = 1/|k|``, then ``h = 1/g`` and ``w = k g``.  Zeros of ``k`` at
    isolated nodes become ``inf`` markers of ``1/|k|`` and are handled by
    the measurable extension of ``spec``.

    Raises
    ------
    InverseUnboundedError
        If ``alpha(1/k)`` does not stabilize below the extension cap.
    VanishingModulusError
        If ``1/|k|`` fails the log gate.
    """
    _require_continuous(spec)
    if not k.is_finite:
        raise NumericInputError("k must be bounded")
    mod = np.abs(k.samples)
    zero = mod <= 1e-14 * max(float(mod.max()), 1e-300)
    inv = np.where(zero, np.inf, 1.0 / np.where(zero, 1.0, mod))
    ext = extend_to_measurable(spec, inv)
    if not ext.finite:
        raise InverseUnboundedError(f"{spec.name} of 1/|k| does not stabilize below the cap")
    phi = CircleFunction(k.grid, inv)
    try:
        g = outer_from_modulus(phi)
    except NumericInputError as exc:
        raise InverseUnboundedError(str(exc)) from exc
    lm = split_log_modulus(phi)
    poles = sorted(s.index for s in lm.singularities if s.order < 0)
    pole_mask = ~np.isfinite(g.samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(pole_mask, 0, 1 / np.where(pole_mask, 1, g.samples))
        w = np.where(pole_mask, 0, k.samples * np.where(pole_mask, 0, g.samples))
    w = CircleFunction(k.grid, _fill_unimodular(w, poles))
    h = CircleFunction(k.grid, h)
    rec, uni = _residuals(k, w, h)
    membership = is_in_Halpha(g, spec)
    return FactorizationResult(
        unimodular=w,
        outer=h,
        residual_reconstruction=rec,
        residual_unimodularity=uni,
        outer_negative_energy=h.negative_energy,
        outer_at_origin=float(math.exp(-lm.mean)),
        extras={
            "inverse_norm": ext.value,
            "inverse_membership": membership.to_dict(),
        },
        inverse_outer=g,
    )
