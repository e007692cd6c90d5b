"""Deterministic corpus of generators with known invariant-subspace type.

Each item carries the expected verdict of the dichotomy and, where a
closed form exists, the expected inner and outer factors.  Random
choices (Blaschke zeros, arc positions) come from ``numpy.random.default_rng(seed)``
so that a given seed always yields the same files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .io import format_function
from .spectral import DEFAULT_GRID_SIZE, CircleFunction, Grid

DEFAULT_SEED = 42


def blaschke(z, a: complex) -> np.ndarray:
    """Single Blaschke factor ``(z - a) / (1 - conj(a) z)``."""
    return (z - a) / (1 - np.conj(a) * z)


def blaschke_product(z, zeros) -> np.ndarray:
    out = np.ones_like(np.asarray(z, dtype=complex))
    for a in zeros:
        out = out * blaschke(z, a)
    return out


@dataclass(frozen=True)
class CorpusItem:
    """A generator with its expected classification.

    ``inner`` and ``outer`` are callables on the grid points ``z`` (and
    angles ``theta``) giving the closed-form factors, or ``None``.
    ``analytic`` says whether the generator lies in the Hardy class.
    """

    name: str
    description: str
    verdict: str
    analytic: bool
    build: Callable
    inner: Callable | None = None
    outer: Callable | None = None
    inner_label: str | None = None
    outer_label: str | None = None
    smooth_modulus: bool = False

    def function(self, grid: Grid) -> CircleFunction:
        return CircleFunction(grid, self.build(grid.z, grid.theta))

    def expected_inner(self, grid: Grid) -> CircleFunction | None:
        return None if self.inner is None else CircleFunction(grid, self.inner(grid.z, grid.theta))

    def expected_outer(self, grid: Grid) -> CircleFunction | None:
        return None if self.outer is None else CircleFunction(grid, self.outer(grid.z, grid.theta))

    def manifest_entry(self) -> dict:
        return {
            "name": self.name,
            "file": f"{self.name}.txt",
            "description": self.description,
            "expected_verdict": self.verdict,
            "analytic": self.analytic,
            "expected_inner": self.inner_label,
            "expected_outer": self.outer_label,
            "smooth_modulus": self.smooth_modulus,
        }


def _arc(theta, start, stop):
    return ((theta >= start) & (theta < stop)).astype(float)


def canonical_corpus(seed: int = DEFAULT_SEED) -> list[CorpusItem]:
    """The canonical corpus: 24 generators covering both branches of the dichotomy."""
    rng = np.random.default_rng(seed)
    radii = rng.uniform(0.2, 0.7, size=3)
    angles = rng.uniform(0, 2 * np.pi, size=3)
    zeros = tuple(complex(np.round(r * np.exp(1j * t), 12)) for r, t in zip(radii, angles))
    a_mix = complex(np.round(0.6 * np.exp(1j * rng.uniform(0, 2 * np.pi)), 12))
    arc_start = float(np.round(rng.uniform(0, 2 * np.pi), 12))
    one = lambda z, t: np.ones_like(z)

    def mono(d):
        return lambda z, t: z ** d

    items = [
        CorpusItem("monomial_0", "constant 1", "simply", True, mono(0), one, one, "1", "1"),
        CorpusItem("monomial_1", "z", "simply", True, mono(1), mono(1), one, "z", "1"),
        CorpusItem("monomial_2", "z^2", "simply", True, mono(2), mono(2), one, "z^2", "1"),
        CorpusItem("monomial_5", "z^5", "simply", True, mono(5), mono(5), one, "z^5", "1"),
        CorpusItem("outer_affine", "1 + z/2", "simply", True, lambda z, t: 1 + z / 2,
                   one, lambda z, t: 1 + z / 2, "1", "1 + z/2", True),
        CorpusItem("outer_boundary_zero", "1 + z, vanishing at theta = pi", "simply", True,
                   lambda z, t: 1 + z, one, lambda z, t: 1 + z, "1", "1 + z", True),
        CorpusItem("outer_exp", "exp(z), modulus exp(cos theta)", "simply", True,
                   lambda z, t: np.exp(z), one, lambda z, t: np.exp(z), "1", "exp(z)", True),
        CorpusItem("outer_scaled", "3 exp(z)", "simply", True, lambda z, t: 3 * np.exp(z),
                   one, lambda z, t: 3 * np.exp(z), "1", "3 exp(z)", True),
        CorpusItem("outer_quadratic", "(1 + z)^2 / 4", "simply", True, lambda z, t: (1 + z) ** 2 / 4,
                   one, lambda z, t: (1 + z) ** 2 / 4, "1", "(1 + z)^2/4", True),
        CorpusItem("blaschke_half", "Blaschke factor with zero 1/2", "simply", True,
                   lambda z, t: blaschke(z, 0.5), lambda z, t: blaschke(z, 0.5), one,
                   "blaschke(0.5)", "1"),
        CorpusItem("blaschke_pair", "Blaschke product, zeros 1/2 and -0.3+0.4i", "simply", True,
                   lambda z, t: blaschke_product(z, (0.5, -0.3 + 0.4j)),
                   lambda z, t: blaschke_product(z, (0.5, -0.3 + 0.4j)), one,
                   "blaschke(0.5, -0.3+0.4i)", "1"),
        CorpusItem("blaschke_random", f"Blaschke product with seeded zeros {zeros}", "simply", True,
                   lambda z, t: blaschke_product(z, zeros), lambda z, t: blaschke_product(z, zeros),
                   one, f"blaschke{zeros}", "1"),
        CorpusItem("mixed_blaschke_affine", "blaschke(1/2) (1 + z)/2", "simply", True,
                   lambda z, t: blaschke(z, 0.5) * (1 + z) / 2, lambda z, t: blaschke(z, 0.5),
                   lambda z, t: (1 + z) / 2, "blaschke(0.5)", "(1 + z)/2", True),
        CorpusItem("mixed_monomial_affine", "z (1 + z)/2", "simply", True,
                   lambda z, t: z * (1 + z) / 2, mono(1), lambda z, t: (1 + z) / 2,
                   "z", "(1 + z)/2", True),
        CorpusItem("mixed_monomial_exp", "z^3 exp(z)", "simply", True,
                   lambda z, t: z ** 3 * np.exp(z), mono(3), lambda z, t: np.exp(z),
                   "z^3", "exp(z)", True),
        CorpusItem("mixed_blaschke_exp", f"blaschke({a_mix}) exp(z)", "simply", True,
                   lambda z, t: blaschke(z, a_mix) * np.exp(z), lambda z, t: blaschke(z, a_mix),
                   lambda z, t: np.exp(z), f"blaschke({a_mix})", "exp(z)", True),
        CorpusItem("modulus_three_plus_cos", "(3 + cos theta)/4, real and non-analytic", "simply",
                   False, lambda z, t: (3 + np.cos(t)) / 4 + 0j, None, None, None, None, True),
        CorpusItem("anti_analytic", "conj(z)", "simply", False, lambda z, t: np.conj(z)),
        CorpusItem("arc_half", "indicator of the upper half circle", "doubly", False,
                   lambda z, t: _arc(t, 0, np.pi)),
        CorpusItem("arc_quarter", "indicator of [pi/2, pi)", "doubly", False,
                   lambda z, t: _arc(t, np.pi / 2, np.pi)),
        CorpusItem("arc_random", f"indicator of an arc of length pi/4 starting at {arc_start}",
                   "doubly", False,
                   lambda z, t: _arc((t - arc_start) % (2 * np.pi), 0, np.pi / 4)),
        CorpusItem("arcs_two", "indicator of [0, 1) and [3, 4)", "doubly", False,
                   lambda z, t: _arc(t, 0, 1) + _arc(t, 3, 4)),
        CorpusItem("arcs_three", "indicator of [0, 0.5), [2, 2.5) and [4, 5)", "doubly", False,
                   lambda z, t: _arc(t, 0, 0.5) + _arc(t, 2, 2.5) + _arc(t, 4, 5)),
        CorpusItem("arc_times_monomial", "z times the indicator of [0, pi/2)", "doubly", False,
                   lambda z, t: z * _arc(t, 0, np.pi / 2)),
        CorpusItem("arc_times_outer", "exp(z) times the indicator of [0, pi/2)", "doubly", False,
                   lambda z, t: np.exp(z) * _arc(t, 0, np.pi / 2)),
    ]
    return items


def write_corpus(directory, seed: int = DEFAULT_SEED, n: int = DEFAULT_GRID_SIZE) -> dict:
    """Write every corpus item as a function file plus ``manifest.json``.

    Returns the manifest.  The output depends only on ``seed`` and ``n``.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid(n)
    items = canonical_corpus(seed)
    for item in items:
        (out / f"{item.name}.txt").write_text(format_function(item.function(grid)))
    manifest = {"seed": seed, "grid_size": n, "items": [it.manifest_entry() for it in items]}
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest
