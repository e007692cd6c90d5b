"""Shift-invariant subspaces generated by grid functions.

A :class:`SubspaceModel` stores an orthonormal basis of
``span{z^n f : 0 <= n <= n_basis}`` built by Arnoldi iteration on the
multiplication operator ``z``, with classical Gram-Schmidt applied twice
per step.  Distances are measured in ``L^2(m)``.

The classifier decides between the two forms of a closed invariant
subspace: ``phi H^alpha`` (simply invariant, ``zW`` strictly inside ``W``)
and ``chi_E L^alpha`` (doubly invariant, ``zW = W``).  The decision
statistic is the relative distance of ``conj(z) f`` to the model; it is
cross-checked against the log-integrability gate of ``|f|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateGeneratorError,
    InconsistentCrossCheckError,
    NormEvaluationError,
    NumericInputError,
    ResolutionError,
    ShapeError,
    UnsupportedNormError,
)
from .factorization import (
    _fill_unimodular,
    factorize_inverse_bounded,
    is_in_Halpha,
    log_integrability,
    outer_from_modulus,
)
from .norms import GaugeNorm, extend_to_measurable
from .spectral import CircleFunction, cesaro_mean, split_log_modulus

DROP_TOL = 1e-10
ZERO_GENERATOR = 1e-12
E_MASK_RELATIVE = 1e-8
DEFAULT_N_BASIS = 64
DEFAULT_M_TRUNC = 1024
DEFAULT_TAU = 1e-6


@dataclass(frozen=True, eq=False)
class SubspaceModel:
    """Orthonormal model of ``span{z^n f_i : 0 <= n <= n_basis}``.

    Attributes
    ----------
    generators : tuple of CircleFunction
    basis : ndarray, shape (n, r)
        Columns orthonormal in the Euclidean inner product of samples.
    truncation : (n_basis, m_trunc)
    conditioning : float
        Smallest relative residual norm among accepted Arnoldi vectors.
    dropped : int
        Candidate vectors rejected by the drop tolerance.
    """

    generators: tuple
    basis: np.ndarray
    truncation: tuple
    conditioning: float
    dropped: int = 0

    @property
    def generator(self) -> CircleFunction:
        return self.generators[0]

    @property
    def grid(self):
        return self.generators[0].grid

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def basis_degrees(self) -> range:
        return range(self.truncation[0] + 1)

    @property
    def orthonormal_basis(self) -> np.ndarray:
        """Basis spectra in FFT order, orthonormal in ``l^2`` of coefficients."""
        return np.fft.fft(self.basis, axis=0) / np.sqrt(self.grid.n)

    def project(self, g: CircleFunction) -> CircleFunction:
        if g.grid != self.grid:
            raise ShapeError("function and model live on different grids")
        Q = self.basis
        c = Q.conj().T @ g.samples
        p = Q @ c
        r = g.samples - p
        # second pass recovers digits lost to cancellation
        p = p + Q @ (Q.conj().T @ r)
        return CircleFunction(self.grid, p)


def build_cyclic_subspace(f: CircleFunction | Sequence[CircleFunction], n_basis: int = DEFAULT_N_BASIS,
                          m_trunc: int = DEFAULT_M_TRUNC) -> SubspaceModel:
    """Orthonormalize ``z^n f`` for ``n = 0..n_basis`` by Arnoldi iteration.

    Several generators give the joint model (block Arnoldi).  A candidate
    whose residual after orthogonalization is below ``1e-10`` of its norm is
    dropped and its generator stops contributing.

    Raises
    ------
    DegenerateGeneratorError
        If a generator has ``max |f| <= 1e-12``.
    ResolutionError
        Unless ``n_basis < m_trunc <= n/2``.
    """
    gens = (f,) if isinstance(f, CircleFunction) else tuple(f)
    if not gens:
        raise DegenerateGeneratorError("no generator given")
    grid = gens[0].grid
    for g in gens:
        if g.grid != grid:
            raise ShapeError("generators live on different grids")
        if not g.is_finite:
            raise NumericInputError("generators must have finite samples")
        if g.max_abs <= ZERO_GENERATOR:
            raise DegenerateGeneratorError("generator vanishes on the grid")
    if not (0 < n_basis < m_trunc <= grid.n // 2):
        raise ResolutionError(
            f"need 0 < n_basis < m_trunc <= n/2, got n_basis={n_basis}, m_trunc={m_trunc}, n={grid.n}")

    z = grid.z
    Q = np.empty((grid.n, len(gens) * (n_basis + 1)), dtype=complex)
    r = 0
    conditioning = 1.0
    dropped = 0

    def accept(v):
        nonlocal r, conditioning
        norm0 = np.linalg.norm(v)
        B = Q[:, :r]
        for _ in range(2):
            v = v - B @ (B.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm < DROP_TOL * norm0:
            return None
        conditioning = min(conditioning, norm / norm0)
        Q[:, r] = v / norm
        r += 1
        return Q[:, r - 1]

    active = []
    for g in gens:
        q = accept(g.samples)
        if q is None:
            dropped += 1
        else:
            active.append(q)
    for _ in range(n_basis):
        nxt = []
        for q in active:
            new = accept(z * q)
            if new is None:
                dropped += 1
            else:
                nxt.append(new)
        active = nxt
        if not active:
            break
    basis = Q[:, :r].copy()
    basis.flags.writeable = False
    return SubspaceModel(gens, basis, (n_basis, m_trunc), float(conditioning), dropped)


def distance_to_subspace(g: CircleFunction, model: SubspaceModel) -> float:
    """``L^2(m)`` distance from ``g`` to the model space.

    Raises
    ------
    ShapeError
        If ``g`` is on a different grid.
    """
    return (g - model.project(g)).l2_norm


# classification -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Classification:
    """Verdict of the dichotomy with its certificate.

    Exactly one of ``e_mask`` (doubly invariant) and ``phi`` (simply
    invariant) is set.
    """

    verdict: str
    certificate: dict
    params: dict
    e_mask: np.ndarray | None = None
    phi: CircleFunction | None = None

    @property
    def is_doubly(self) -> bool:
        return self.verdict == "doubly"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "certificate": self.certificate, "params": self.params}
        if self.e_mask is not None:
            out["e_mask_runs"] = mask_runs(self.e_mask)
            out["e_mask_measure"] = float(np.mean(self.e_mask))
        return out


def mask_runs(mask: np.ndarray) -> list:
    """Maximal ``[start, stop)`` index runs where ``mask`` is true (no wrap-around merge)."""
    m = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]])
    edges = np.flatnonzero(np.diff(m.astype(np.int8)))
    return [[int(a), int(b)] for a, b in zip(edges[::2], edges[1::2])]


def _unimodular_part(f: CircleFunction):
    """``f / outer(|f|)`` with isolated zeros filled by unit-modulus extrapolation."""
    g = outer_from_modulus(abs(f))
    lm = split_log_modulus(abs(f))
    zeros = sorted(s.index for s in lm.singularities if s.order > 0)
    hole = np.zeros(f.n, dtype=bool)
    hole[zeros] = True
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(hole, 0, f.samples / np.where(hole, 1, g.samples))
    return CircleFunction(f.grid, _fill_unimodular(phi, zeros))


def classify(f: CircleFunction, spec: GaugeNorm, n_basis: int = DEFAULT_N_BASIS,
             m_trunc: int = DEFAULT_M_TRUNC, tau_doubly: float = DEFAULT_TAU) -> Classification:
    """Decide whether the cyclic subspace of ``f`` is simply or doubly invariant.

    The statistic is ``d_back = dist(conj(z) f, W) / ||f||_2``.  Below
    ``tau_doubly`` the subspace is doubly invariant with ``E = {|f| > 1e-8 max|f|}``;
    otherwise it is simply invariant with ``phi = f / outer(|f|)``.

    Raises
    ------
    UnsupportedNormError
        If ``spec`` is not continuous.
    DegenerateGeneratorError
        If ``f`` vanishes.
    InconsistentCrossCheckError
        If the verdict disagrees with the log-integrability gate of ``|f|``;
        the exception carries the classification.
    """
    if not spec.continuous:
        raise UnsupportedNormError(f"{spec.name} is not a continuous gauge norm")
    model = build_cyclic_subspace(f, n_basis, m_trunc)
    scale = f.l2_norm
    d_back = distance_to_subspace(f.shift(-1), model) / scale
    d_fwd = distance_to_subspace(f.shift(1), model) / scale
    gate = log_integrability(abs(f))
    params = {"n_basis": n_basis, "m_trunc": m_trunc, "tau_doubly": tau_doubly,
              "e_mask_relative": E_MASK_RELATIVE, "drop_tol": DROP_TOL, "norm": spec.to_config()}
    cert = {
        "dist_backward": d_back,
        "dist_forward": d_fwd,
        "margin_log10": float(np.log10(max(d_back, 1e-300) / tau_doubly)),
        "conditioning": model.conditioning,
        "rank": model.rank,
        "norm_value": float(extend_to_measurable(spec, f).value),
        "log_integral_report": gate.to_dict(),
    }
    if d_back < tau_doubly:
        mask = np.abs(f.samples) > E_MASK_RELATIVE * f.max_abs
        cert["phi_unimodularity"] = None
        cert["regeneration_residual"] = None
        result = Classification("doubly", cert, params, e_mask=mask)
        if gate.passed:
            raise InconsistentCrossCheckError(
                "backward distance says doubly invariant but |f| is log-integrable", result)
        return result
    if not gate.passed:
        cert["phi_unimodularity"] = None
        cert["regeneration_residual"] = None
        result = Classification("simply", cert, params)
        raise InconsistentCrossCheckError(
            "backward distance says simply invariant but |f| fails the log gate", result)
    phi = _unimodular_part(f)
    cert["phi_unimodularity"] = float(np.max(np.abs(np.abs(phi.samples) - 1)))
    regen = build_cyclic_subspace(phi, n_basis, m_trunc)
    cert["regeneration_residual"] = distance_to_subspace(f, regen) / scale
    cert["phi_negative_energy"] = phi.negative_energy
    return Classification("simply", cert, params, phi=phi)


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks if c["passed"] is not None)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": list(self.checks)}


def _check(name, value, bound, passed, note=""):
    return {"name": name, "value": value, "bound": bound, "passed": passed, "note": note}


def verify_certificate(c: Classification, f: CircleFunction, spec: GaugeNorm,
                       tol: float = 1e-8) -> VerificationReport:
    """Recompute the evidence for ``c`` from ``f`` alone.

    Checks forward invariance; for a doubly invariant verdict the backward
    distance and ``chi_E f = f``; for a simply invariant one ``|phi| = 1``,
    the strict inclusion ``dist(conj(z) f, W) > 10 tau`` and, when ``f`` lies in
    ``H^alpha``, analyticity of ``phi``.  Checks that do not apply are
    reported with ``passed = None``.
    """
    n_basis, m_trunc, tau = c.params["n_basis"], c.params["m_trunc"], c.params["tau_doubly"]
    model = build_cyclic_subspace(f, n_basis, m_trunc)
    scale = f.l2_norm
    fwd = distance_to_subspace(f.shift(1), model) / scale
    back = distance_to_subspace(f.shift(-1), model) / scale
    checks = [_check("forward_invariance", fwd, tol, fwd <= tol)]
    if c.is_doubly:
        leak = float(np.max(np.abs(f.samples[~c.e_mask]), initial=0.0)) / f.max_abs
        checks.append(_check("backward_invariance", back, tau, back < tau))
        checks.append(_check("mask_support", leak, E_MASK_RELATIVE, leak <= E_MASK_RELATIVE))
        checks.append(_check("phi_unimodular", None, tol, None, "not applicable"))
        checks.append(_check("phi_inner", None, tol, None, "not applicable"))
    else:
        uni = float(np.max(np.abs(np.abs(c.phi.samples) - 1)))
        checks.append(_check("strict_inclusion", back, 10 * tau, back > 10 * tau))
        checks.append(_check("phi_unimodular", uni, tol, uni <= tol))
        if is_in_Halpha(f, spec).member:
            ratio = c.phi.negative_energy / c.phi.total_energy
            checks.append(_check("phi_inner", ratio, tol, ratio <= tol))
        else:
            checks.append(_check("phi_inner", None, tol, None, "generator not in H^alpha"))
    return VerificationReport(tuple(checks))


# bounded approximation ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ApproximationStage:
    degree: int
    function: CircleFunction
    error: float


def default_degrees(n: int, stages: int) -> list:
    """Cesaro degrees from 0 to ``n/2 - 1``, roughly geometric."""
    if stages == 1:
        return [n // 2 - 1]
    raw = np.geomspace(1, n // 2, stages) - 1
    degrees = np.unique(np.round(raw).astype(int))
    if len(degrees) != stages:
        raise ResolutionError(f"{stages} distinct Cesaro degrees do not fit on a grid of {n}")
    return degrees.tolist()


def bounded_approximation(f: CircleFunction, spec: GaugeNorm, stages: int = 5,
                          degrees: Sequence[int] | None = None) -> list:
    """Bounded functions in the cyclic subspace of ``f`` converging to ``f`` in ``alpha``.

    With ``k = 1/(|f| + 1)`` factored as ``k = w h`` (``h`` outer, ``1/h`` in
    ``H^alpha``), stage ``j`` emits ``sigma_{n_j}(1/h) h f``, which is
    bounded because ``|h f| < 1``, together with its ``alpha``-distance to ``f``.

    Raises
    ------
    NormEvaluationError
        If ``alpha(f)`` is not finite.
    """
    if not spec.continuous:
        raise UnsupportedNormError(f"{spec.name} is not a continuous gauge norm")
    if not f.is_finite:
        raise NumericInputError("bounded_approximation needs finite (grid-capped) samples")
    if not extend_to_measurable(spec, f).finite:
        raise NormEvaluationError(f"{spec.name} of the input is not finite")
    if degrees is None:
        degrees = default_degrees(f.n, stages)
    elif len(degrees) != stages or any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be strictly increasing with one entry per stage")
    k = CircleFunction(f.grid, 1.0 / (np.abs(f.samples) + 1.0))
    fact = factorize_inverse_bounded(k, spec)
    inverse = fact.inverse_outer
    hf = fact.outer * f
    out = []
    for d in degrees:
        b = cesaro_mean(inverse, int(d)) * hf
        out.append(ApproximationStage(int(d), b, spec.evaluate(b - f)))
    return out
