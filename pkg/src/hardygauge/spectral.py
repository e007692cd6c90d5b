"""Grid functions on the unit circle and their spectral toolbox.

Functions on the circle are stored as samples on a uniform grid of ``n``
nodes ``theta_j = 2 pi j / n``.  Every node carries the quadrature weight
``1/n`` so the grid discretizes normalized arc length.  Fourier
coefficients follow the convention ``c_k = (1/n) sum_j f_j exp(-i k theta_j)``
for ``-n/2 < k <= n/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    InvalidGridError,
    NearBoundaryError,
    NotLogIntegrableError,
    NumericInputError,
    ResolutionError,
    ShapeError,
)

DEFAULT_GRID_SIZE = 4096

# log-modulus policy
SMALL_RELATIVE = 1e-8
FLOOR_RELATIVE = 1e-12
MAX_SMALL_FRACTION = 1e-3


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` nodes on the unit circle."""

    n: int

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise InvalidGridError(f"grid size must be an integer, got {n!r}")
        if n < 8 or n & (n - 1):
            raise InvalidGridError(f"grid size must be a power of two >= 8, got {n}")

    @cached_property
    def theta(self) -> np.ndarray:
        t = 2 * np.pi * np.arange(self.n) / self.n
        t.flags.writeable = False
        return t

    @cached_property
    def z(self) -> np.ndarray:
        w = np.exp(1j * self.theta)
        # exact values at the quarter points so that 1 + z vanishes at theta = pi
        w[:: self.n // 4] = [1, 1j, -1, -1j]
        w.flags.writeable = False
        return w

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Integer frequencies in FFT storage order, Nyquist stored as ``+n/2``."""
        k = np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)
        k[self.n // 2] = self.n // 2
        k.flags.writeable = False
        return k

    def function(self, fn: Callable[[np.ndarray], np.ndarray]) -> "CircleFunction":
        """Sample ``fn`` (a function of the boundary point ``z``) on the grid."""
        return CircleFunction(self, np.broadcast_to(fn(self.z), (self.n,)))

    def constant(self, value: complex = 1.0) -> "CircleFunction":
        return CircleFunction(self, np.full(self.n, value, dtype=complex))

    def monomial(self, degree: int) -> "CircleFunction":
        return CircleFunction(self, np.exp(1j * degree * self.theta))

    def arc_indicator(self, start: int, stop: int) -> "CircleFunction":
        """Indicator of the nodes ``start <= j < stop`` (indices taken mod n)."""
        mask = np.zeros(self.n, dtype=bool)
        mask[np.arange(start, stop) % self.n] = True
        return CircleFunction(self, mask.astype(complex))


def sample_grid(n: int = DEFAULT_GRID_SIZE) -> Grid:
    return Grid(n)


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """Complex samples of a function on a :class:`Grid`.

    Instances are immutable; arithmetic returns new functions.  Samples may
    hold ``inf`` markers (used by the measurable extension of gauge norms),
    but every spectral operation rejects non-finite input.
    """

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.shape != (self.grid.n,):
            raise ShapeError(f"expected {self.grid.n} samples, got shape {s.shape}")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_spectrum(cls, grid: Grid, coefficients: np.ndarray) -> "CircleFunction":
        """Build from coefficients stored in FFT order (see ``Grid.frequencies``)."""
        c = np.asarray(coefficients, dtype=complex)
        if c.shape != (grid.n,):
            raise ShapeError(f"expected {grid.n} coefficients, got shape {c.shape}")
        return cls(grid, np.fft.ifft(c) * grid.n)

    @property
    def n(self) -> int:
        return self.grid.n

    @cached_property
    def spectrum(self) -> np.ndarray:
        if not np.all(np.isfinite(self.samples)):
            raise NumericInputError("non-finite sample in spectral operation")
        c = np.fft.fft(self.samples) / self.n
        c.flags.writeable = False
        return c

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.samples)))

    def is_real(self, rtol: float = 1e-12) -> bool:
        scale = max(float(np.max(np.abs(self.samples))), 1.0)
        return bool(np.all(np.abs(self.samples.imag) <= rtol * scale))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    @property
    def total_energy(self) -> float:
        return float(np.sum(np.abs(self.spectrum) ** 2))

    @property
    def negative_energy(self) -> float:
        """Sum of ``|c_k|^2`` over ``-n/2 < k < 0``."""
        neg = self.grid.frequencies < 0
        return float(np.sum(np.abs(self.spectrum[neg]) ** 2))

    def coefficient(self, k: int) -> complex:
        if not -self.n // 2 < k <= self.n // 2:
            raise ResolutionError(f"frequency {k} not resolved on a grid of {self.n}")
        return complex(self.spectrum[k % self.n])

    # arithmetic --------------------------------------------------------------

    def _values(self, other):
        if isinstance(other, CircleFunction):
            if other.grid != self.grid:
                raise ShapeError("functions live on different grids")
            return other.samples
        return other

    def __add__(self, other):
        return CircleFunction(self.grid, self.samples + self._values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CircleFunction(self.grid, self.samples - self._values(other))

    def __rsub__(self, other):
        return CircleFunction(self.grid, self._values(other) - self.samples)

    def __mul__(self, other):
        return CircleFunction(self.grid, self.samples * self._values(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return CircleFunction(self.grid, self.samples / self._values(other))

    def __rtruediv__(self, other):
        return CircleFunction(self.grid, self._values(other) / self.samples)

    def __neg__(self):
        return CircleFunction(self.grid, -self.samples)

    def __abs__(self):
        return CircleFunction(self.grid, np.abs(self.samples))

    def conj(self) -> "CircleFunction":
        return CircleFunction(self.grid, np.conj(self.samples))

    def shift(self, degree: int) -> "CircleFunction":
        """Multiply by ``z**degree``."""
        return CircleFunction(self.grid, self.samples * np.exp(1j * degree * self.grid.theta))

    def __repr__(self):
        return f"CircleFunction(n={self.n}, max_abs={self.max_abs:.6g})"


def fourier_coefficients(f: CircleFunction) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(k, c_k)`` in ascending frequency order ``-n/2 < k <= n/2``."""
    order = np.argsort(f.grid.frequencies)
    return np.asarray(f.grid.frequencies)[order], np.asarray(f.spectrum)[order]


def cesaro_mean(f: CircleFunction, degree: int) -> CircleFunction:
    """Fejer mean ``sigma_degree(f)``: average of partial sums ``S_0 .. S_degree``."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree >= f.n // 2:
        raise ResolutionError(f"Cesaro degree {degree} needs a grid larger than {f.n}")
    k = np.abs(f.grid.frequencies)
    weights = np.clip(1.0 - k / (degree + 1.0), 0.0, None)
    return CircleFunction.from_spectrum(f.grid, f.spectrum * weights)


def riesz_projection(f: CircleFunction) -> CircleFunction:
    """Keep the coefficients with ``k >= 0``."""
    return CircleFunction.from_spectrum(f.grid, np.where(f.grid.frequencies >= 0, f.spectrum, 0))


def conjugate_function(u: CircleFunction) -> CircleFunction:
    """Harmonic conjugate on the circle: ``(Qu)_k = -i sgn(k) u_k``.

    The mean and the Nyquist coefficient are mapped to zero, so ``u + iQu``
    has a one-sided spectrum.
    """
    if not u.is_real():
        raise DomainError("conjugate_function needs real-valued input")
    k = u.grid.frequencies
    mult = -1j * np.sign(k)
    mult[u.n // 2] = 0
    real_part = CircleFunction(u.grid, u.samples.real)
    q = np.fft.ifft(real_part.spectrum * mult) * u.n
    return CircleFunction(u.grid, q.real)


# log-modulus handling ---------------------------------------------------------


@dataclass(frozen=True)
class BoundarySingularity:
    """Isolated zero (``order > 0``) or pole (``order < 0``) at a grid node."""

    index: int
    order: float

    def point(self, grid: Grid) -> complex:
        return complex(grid.z[self.index])


@dataclass(frozen=True, eq=False)
class LogModulus:
    """``log phi`` split into a smooth floored part and node singularities.

    ``phi = |prod_k (1 - conj(zeta_k) z)^{order_k}| * exp(log_regular)``.
    The singular factors integrate to zero against ``dm``, so the
    quadrature of ``log phi`` is the mean of ``log_regular``.
    """

    grid: Grid
    log_regular: np.ndarray
    singularities: tuple
    small_fraction: float
    integrable: bool

    @property
    def mean(self) -> float:
        return float(np.mean(self.log_regular))

    def singular_factor(self, z) -> np.ndarray:
        """``prod_k (1 - conj(zeta_k) z)^{order_k}`` with the principal branch."""
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for s in self.singularities:
            base = 1 - np.conj(s.point(self.grid)) * z
            # the node itself, where rounding leaves |base| ~ 1e-16
            base = np.where(np.abs(base) < 1e-13, 0, base)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = out * np.where(base == 0, 0.0 if s.order > 0 else np.inf, base ** s.order)
        return out


def _estimate_order(v: np.ndarray, j: int, n: int) -> float | None:
    """Power-law order of ``v`` at node ``j`` from neighbours at 1, 2 and 4 steps."""
    est = []
    for side in (1, -1):
        a, b, c = (v[(j + side * s) % n] for s in (1, 2, 4))
        if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(c)) or min(a, b, c) <= 0:
            return None
        fine = np.log2(b / a)
        coarse = np.log2(c / b)
        if abs(fine - coarse) > 0.05 * max(1.0, abs(fine)):
            return None
        # second-order bias cancels: fine ~ beta + e h^2, coarse ~ beta + 4 e h^2
        est.append((4 * fine - coarse) / 3)
    if abs(est[0] - est[1]) > 0.05 * max(1.0, abs(est[0])):
        return None
    beta = 0.5 * (est[0] + est[1])
    snapped = round(4 * beta) / 4
    if abs(beta - snapped) < 1e-3:
        beta = snapped
    if beta == 0 or abs(beta) > 8:
        return None
    return float(beta)


def split_log_modulus(phi: CircleFunction | np.ndarray, grid: Grid | None = None) -> LogModulus:
    """Apply the flooring policy to ``log phi`` and extract isolated node singularities.

    Nodes with ``phi < 1e-8 * max(phi)`` count as small; if more than 0.1% of
    the nodes are small the result is flagged as not log-integrable.  A small
    or infinite node whose neighbours follow a clean power law is removed
    exactly as a factor ``|1 - conj(zeta) z|^order``; everything else small
    is floored at ``1e-12 * max(phi)``.
    """
    if isinstance(phi, CircleFunction):
        grid = phi.grid
        s = phi.samples
        finite = np.isfinite(s)
        scale = np.max(np.abs(s[finite])) if finite.any() else 0.0
        if np.any(np.abs(s[finite].imag) > 1e-12 * max(scale, 1.0)):
            raise DomainError("modulus must be real-valued")
        v = np.where(finite, s.real, np.inf)
    else:
        v = np.asarray(phi, dtype=float)
    n = grid.n
    finite = np.isfinite(v)
    if np.any(v[finite] < -1e-12 * max(np.max(np.abs(v[finite]), initial=0.0), 1.0)):
        raise DomainError("modulus must be nonnegative")
    v = np.where(finite, np.maximum(v, 0.0), np.inf)
    scale = float(np.max(v[finite], initial=0.0))
    if scale <= 0:
        raise NotLogIntegrableError("modulus vanishes identically", small_fraction=1.0)

    small = finite & (v < SMALL_RELATIVE * scale)
    bad = small | ~finite
    small_fraction = float(np.mean(small))

    singular = []
    for j in np.flatnonzero(bad):
        if any(bad[(j + d) % n] for d in (-4, -2, -1, 1, 2, 4)):
            if not finite[j]:
                raise NumericInputError(f"non-finite modulus at node {j} is not an isolated pole")
            continue
        beta = _estimate_order(v, j, n)
        if beta is None or (beta > 0) != bool(finite[j]):
            if not finite[j]:
                raise NumericInputError(f"non-finite modulus at node {j} has no power-law profile")
            continue
        singular.append(BoundarySingularity(int(j), beta))

    lm = LogModulus(grid, np.zeros(n), tuple(singular), small_fraction,
                    small_fraction <= MAX_SMALL_FRACTION)
    if not singular:
        reg = v
    else:
        idx = np.array([s.index for s in singular])
        keep = np.ones(n, dtype=bool)
        keep[idx] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            reg = np.where(keep, v / np.abs(lm.singular_factor(grid.z)), 0.0)
        for j in idx:
            near = [reg[(j + d) % n] for d in (-2, -1, 1, 2)]
            fill = (4 * (near[1] + near[2]) - (near[0] + near[3])) / 6
            reg[j] = fill if fill > 0 else 0.5 * (near[1] + near[2])
    reg_scale = float(np.max(reg))
    log_regular = np.log(np.maximum(reg, FLOOR_RELATIVE * reg_scale))
    log_regular.flags.writeable = False
    object.__setattr__(lm, "log_regular", log_regular)
    return lm


def herglotz_evaluate_interior(phi: CircleFunction, z: complex) -> complex:
    """Evaluate ``exp( int (w+z)/(w-z) log phi(w) dm(w) )`` at an interior point.

    The integral is the trapezoid rule on the grid after the node
    singularities of ``log phi`` are split off and evaluated exactly.
    """
    z = complex(z)
    r = abs(z)
    if r >= 1:
        raise DomainError(f"|z| = {r} is not inside the unit disk")
    if 1 - r < 1.0 / phi.n:
        raise NearBoundaryError(f"|z| = {r} is within 1/n of the circle; refine the grid")
    lm = split_log_modulus(phi)
    if not lm.integrable:
        raise NotLogIntegrableError(
            f"modulus is small on {lm.small_fraction:.3%} of the nodes", lm.small_fraction)
    w = phi.grid.z
    kernel = (w + z) / (w - z)
    log_g = np.mean(kernel * lm.log_regular)
    return complex(np.exp(log_g) * lm.singular_factor(np.array([z]))[0])
