import numpy as np
import pytest

from hardygauge import (
    CircleFunction,
    LInfinity,
    Lp,
    bounded_approximation,
    build_cyclic_subspace,
    classify,
    distance_to_subspace,
    extend_to_measurable,
    sample_grid,
    shipped_continuous_norms,
    verify_certificate,
)
from hardygauge.corpus import blaschke
from hardygauge.errors import (
    DegenerateGeneratorError,
    InconsistentCrossCheckError,
    NormEvaluationError,
    ResolutionError,
    ShapeError,
    UnsupportedNormError,
)
from hardygauge.subspaces import default_degrees, mask_runs


def cf(grid, values):
    return CircleFunction(grid, values)


def three_arcs(grid):
    t = grid.theta
    return cf(grid, (((t < 0.5) | ((t >= 2) & (t < 2.5)) | ((t >= 4) & (t < 5)))) * 1.0)


# model construction -----------------------------------------------------------


def test_model_of_one_is_monomials(small_grid):
    m = build_cyclic_subspace(small_grid.constant(1), n_basis=4, m_trunc=8)
    assert m.rank == 5
    monomials = np.stack([small_grid.z**k for k in range(5)], axis=1) / np.sqrt(64)
    overlap = np.abs(monomials.conj().T @ m.basis)
    np.testing.assert_allclose(overlap, np.eye(5), atol=1e-13)


def test_model_of_z_squared(small_grid):
    m = build_cyclic_subspace(small_grid.monomial(2), n_basis=4, m_trunc=8)
    for k in range(2, 7):
        assert distance_to_subspace(small_grid.monomial(k), m) <= 1e-12
    for k in (0, 1, 7):
        assert distance_to_subspace(small_grid.monomial(k), m) == pytest.approx(1, abs=1e-12)


def test_arc_model_commutes_with_shift_on_generator(grid):
    f = grid.arc_indicator(0, grid.n // 2)
    m = build_cyclic_subspace(f, 64, 1024)
    for shift in (1, -1):
        commutator = m.project(f).shift(shift) - m.project(f.shift(shift))
        assert commutator.l2_norm <= 1e-8 * f.l2_norm


@pytest.mark.parametrize("name", ["arc", "exp", "blaschke", "three_arcs"])
def test_model_invariants(grid, name):
    z = grid.z
    f = {
        "arc": grid.arc_indicator(100, 1500),
        "exp": cf(grid, np.exp(z)),
        "blaschke": cf(grid, blaschke(z, 0.4j) * (2 + z)),
        "three_arcs": three_arcs(grid),
    }[name]
    m = build_cyclic_subspace(f, 64, 1024)
    gram = m.basis.conj().T @ m.basis
    assert np.max(np.abs(gram - np.eye(m.rank))) <= 1e-10
    for k in range(65):
        assert distance_to_subspace(f.shift(k), m) <= 1e-8 * f.l2_norm
    spectra = m.orthonormal_basis
    assert np.max(np.abs(spectra.conj().T @ spectra - np.eye(m.rank))) <= 1e-10


def test_distance_examples(small_grid, rng):
    m = build_cyclic_subspace(small_grid.constant(1), 8, 16)
    assert distance_to_subspace(small_grid.monomial(-1), m) == pytest.approx(1, abs=1e-13)
    inside = cf(small_grid, m.basis @ (rng.normal(size=m.rank) + 1j * rng.normal(size=m.rank)))
    assert distance_to_subspace(inside, m) <= 1e-10 * inside.l2_norm


def test_distance_pythagoras(grid, rng):
    m = build_cyclic_subspace(cf(grid, np.exp(grid.z)), 32, 64)
    g = cf(grid, rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n))
    d = distance_to_subspace(g, m)
    p = m.project(g).l2_norm
    assert d**2 + p**2 == pytest.approx(g.l2_norm**2, rel=1e-10)


def test_distance_grid_mismatch(small_grid):
    m = build_cyclic_subspace(small_grid.constant(1), 4, 8)
    with pytest.raises(ShapeError):
        distance_to_subspace(sample_grid(128).constant(1), m)


def test_build_errors(small_grid):
    with pytest.raises(DegenerateGeneratorError):
        build_cyclic_subspace(small_grid.constant(1e-13), 4, 8)
    with pytest.raises(ResolutionError):
        build_cyclic_subspace(small_grid.constant(1), 8, 8)
    with pytest.raises(ResolutionError):
        build_cyclic_subspace(small_grid.constant(1), 4, 64)


def test_joint_model_of_two_generators(grid):
    a = grid.arc_indicator(0, 1024)
    b = grid.arc_indicator(2048, 3072)
    m = build_cyclic_subspace([a, b], 32, 64)
    assert m.rank == 66
    assert distance_to_subspace(a + b.shift(7), m) <= 1e-10
    assert distance_to_subspace(grid.arc_indicator(1024, 2048), m) == pytest.approx(
        grid.arc_indicator(1024, 2048).l2_norm, rel=1e-12)


# backward distance behaviour ------------------------------------------------------


@pytest.mark.parametrize("values", ["outer_square", "exp", "blaschke"])
def test_backward_distance_stabilizes_for_simply_invariant(grid, values):
    z = grid.z
    f = cf(grid, {"outer_square": (1 + z) ** 2 / 4, "exp": np.exp(z),
                  "blaschke": blaschke(z, 0.5) * (1 + z / 3)}[values])
    d = [distance_to_subspace(f.shift(-1), build_cyclic_subspace(f, nb, 1024)) / f.l2_norm
         for nb in (4, 8, 16, 32, 64, 128)]
    assert all(b <= a + 1e-12 for a, b in zip(d, d[1:]))
    assert d[-1] > 10 * 1e-6
    assert d[-1] > 0.5 * d[-2]


@pytest.mark.parametrize("which", ["half", "three"])
def test_backward_distance_vanishes_for_doubly_invariant(grid, which):
    f = grid.arc_indicator(0, grid.n // 2) if which == "half" else three_arcs(grid)
    d = [distance_to_subspace(f.shift(-1), build_cyclic_subspace(f, nb, 1024)) / f.l2_norm
         for nb in (8, 16, 32, 64, 128)]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] < 1e-12


# classification ------------------------------------------------------------------


def test_classify_half_arc(grid):
    f = grid.arc_indicator(0, grid.n // 2)
    c = classify(f, Lp(2))
    assert c.verdict == "doubly" and c.phi is None
    np.testing.assert_array_equal(c.e_mask, f.samples.real > 0)
    assert c.certificate["dist_forward"] <= 1e-8
    assert not c.certificate["log_integral_report"]["passed"]
    assert verify_certificate(c, f, Lp(2)).passed


def test_classify_outer(grid):
    f = cf(grid, 1 + grid.z / 2)
    c = classify(f, Lp(2))
    assert c.verdict == "simply" and c.e_mask is None
    assert np.max(np.abs(c.phi.samples - 1)) <= 1e-8
    assert c.certificate["regeneration_residual"] <= 1e-6


def test_classify_monomial(grid):
    f = grid.monomial(2)
    c = classify(f, Lp(2))
    assert c.verdict == "simply"
    assert np.max(np.abs(c.phi.samples - grid.z**2)) <= 1e-8
    report = verify_certificate(c, f, Lp(2))
    assert report.passed
    assert {ch["name"] for ch in report.checks} >= {"forward_invariance", "strict_inclusion", "phi_unimodular", "phi_inner"}


def test_classify_blaschke_times_outer(grid):
    z = grid.z
    f = cf(grid, blaschke(z, 0.5) * (1 + z) / 2)
    c = classify(f, Lp(2))
    assert np.max(np.abs(c.phi.samples - blaschke(z, 0.5))) <= 1e-8
    assert verify_certificate(c, f, Lp(2)).passed


def test_verify_arc_marks_simply_checks_vacuous(grid):
    f = grid.arc_indicator(300, 1000)
    report = verify_certificate(classify(f, Lp(1)), f, Lp(1))
    assert report.passed
    vacuous = [ch["name"] for ch in report.checks if ch["passed"] is None]
    assert vacuous == ["phi_unimodular", "phi_inner"]


def test_verify_catches_wrong_verdict(grid):
    f = grid.arc_indicator(0, grid.n // 2)
    c = classify(f, Lp(2))
    fake = type(c)("simply", c.certificate, c.params, phi=grid.constant(1))
    assert not verify_certificate(fake, f, Lp(2)).passed


def test_non_analytic_generator_has_unimodular_phi(grid):
    f = cf(grid, (3 + np.cos(grid.theta)) / 4)
    c = classify(f, Lp(2))
    assert c.verdict == "simply"
    assert c.certificate["phi_unimodularity"] <= 1e-8
    report = verify_certificate(c, f, Lp(2))
    assert report.passed
    assert [ch for ch in report.checks if ch["name"] == "phi_inner"][0]["passed"] is None


@pytest.mark.parametrize("c", [3.0, -2j, 1e-6 * (1 + 1j), 1e5])
def test_scale_invariance(grid, c):
    for f in (cf(grid, blaschke(grid.z, 0.3) * np.exp(grid.z)), three_arcs(grid)):
        a, b = classify(f, Lp(2)), classify(f * c, Lp(2))
        assert a.verdict == b.verdict
        if a.e_mask is not None:
            np.testing.assert_array_equal(a.e_mask, b.e_mask)
        else:
            ratio = b.phi.samples / a.phi.samples
            np.testing.assert_allclose(ratio, c / abs(c), atol=1e-10)


def test_norm_independence(grid):
    for f in (cf(grid, 1 + grid.z), grid.arc_indicator(0, 1000)):
        verdicts = {classify(f, spec).verdict for spec in shipped_continuous_norms()}
        assert len(verdicts) == 1


def test_classify_refuses_linfinity(grid):
    with pytest.raises(UnsupportedNormError):
        classify(grid.constant(1), LInfinity())


def test_classify_zero_generator(grid):
    with pytest.raises(DegenerateGeneratorError):
        classify(grid.constant(0), Lp(2))


def test_inconsistent_cross_check(grid):
    with pytest.raises(InconsistentCrossCheckError) as info:
        classify(grid.constant(1), Lp(2), tau_doubly=2.0)
    assert info.value.classification.verdict == "doubly"
    with pytest.raises(InconsistentCrossCheckError) as info:
        classify(grid.arc_indicator(0, 2048), Lp(2), tau_doubly=1e-300)
    assert info.value.classification.verdict == "simply"


def test_mask_runs():
    assert mask_runs(np.array([1, 1, 0, 0, 1, 0, 1, 1], dtype=bool)) == [[0, 2], [4, 5], [6, 8]]
    assert mask_runs(np.zeros(4, dtype=bool)) == []


# bounded approximation -------------------------------------------------------


def test_bounded_approximation_of_one(grid):
    stages = bounded_approximation(grid.constant(1), Lp(2), 5)
    assert all(s.error <= 1e-15 for s in stages)


def test_bounded_approximation_stage_zero_bound(grid):
    z = grid.z
    f = cf(grid, np.exp(z) + 0.5 * np.conj(z))
    stages = bounded_approximation(f, Lp(2), 5)
    errors = [s.error for s in stages]
    assert all(b <= a + 1e-10 for a, b in zip(errors, errors[1:]))
    for s in stages:
        assert np.isfinite(s.function.max_abs)


def test_emitted_functions_are_bounded(grid):
    t = grid.theta
    d = np.minimum(t, 2 * np.pi - t)
    d[0] = np.pi / grid.n
    f = cf(grid, d**-0.5)
    stages = bounded_approximation(f, Lp(1), 5)
    errors = [s.error for s in stages]
    assert all(b <= a + 1e-10 for a, b in zip(errors, errors[1:]))
    assert all(np.all(np.isfinite(s.function.samples)) for s in stages)
    assert errors[-1] < 0.1 * errors[0]


def test_bounded_approximation_errors(grid):
    with pytest.raises(UnsupportedNormError):
        bounded_approximation(grid.constant(1), LInfinity(), 3)
    big = np.ones(grid.n)
    big[7] = 1e14
    assert not extend_to_measurable(Lp(2), cf(grid, big)).finite
    with pytest.raises(NormEvaluationError):
        bounded_approximation(cf(grid, big), Lp(2), 3)
    with pytest.raises(ValueError):
        bounded_approximation(grid.constant(1), Lp(2), 3, degrees=[4, 2, 8])


def test_default_degrees():
    assert default_degrees(4096, 5) == [0, 6, 44, 303, 2047]
    with pytest.raises(ResolutionError):
        default_degrees(16, 12)
