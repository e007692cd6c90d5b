"""Acceptance suite: ten end-to-end criteria at n = 4096.

Each test prints one ``PASS``/``FAIL`` line (visible without ``-s``) and
asserts its own 60 s budget.
"""

import json
import math
import time

import numpy as np
import pytest

from hardygauge import (
    CircleFunction,
    LInfinity,
    Lp,
    bounded_approximation,
    classify,
    continuity_modulus,
    dual_norm,
    factorize_inverse_bounded,
    inner_outer_factorize,
    is_in_Halpha,
    outer_from_modulus,
    sample_grid,
    shipped_continuous_norms,
    validate_axioms,
)
from hardygauge.cli import main
from hardygauge.corpus import canonical_corpus, write_corpus
from hardygauge.errors import InverseUnboundedError, NotHardyError, VanishingModulusError
from hardygauge.io import write_function

N = 4096
BUDGET_SECONDS = 60.0
SPECS = shipped_continuous_norms()
CORPUS = canonical_corpus()


@pytest.fixture(scope="module")
def grid():
    return sample_grid(N)


@pytest.fixture
def verdict(capsys):
    """Print the criterion line through pytest's capture and enforce the budget."""
    start = time.perf_counter()

    def report(number, title, ok, detail=""):
        elapsed = time.perf_counter() - start
        ok = bool(ok) and elapsed < BUDGET_SECONDS
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} "
                  f"[{elapsed:.1f}s] {detail}")
        assert elapsed < BUDGET_SECONDS, f"criterion {number} took {elapsed:.1f}s"
        return ok

    return report


def test_criterion_01_norm_axioms(verdict):
    failures = []
    for spec in SPECS:
        axioms = validate_axioms(spec, trials=500, seed=2024, size=N)
        if not axioms.passed:
            failures.append(spec.name)
    probe = continuity_modulus(LInfinity(), [2.0 ** -k for k in range(13)])
    linf_flat = all(v == 1.0 for _, v in probe) and not LInfinity().continuous
    continuous = all(spec.continuous for spec in SPECS)
    ok = not failures and linf_flat and continuous
    verdict(1, "norm axioms", ok, f"failing specs {failures}, Linf continuity value stuck at 1: {linf_flat}")
    assert ok


def test_criterion_02_monotone_convergence(verdict, grid):
    rng = np.random.default_rng(2)
    worst_gap, worst_drop = 0.0, 0.0
    for s in range(50):
        g = np.abs(rng.normal(size=N) + 1j * rng.normal(size=N)) * np.exp(rng.normal(size=N))
        if s % 2 == 0:
            # truncations min(g, c_k) with c_k increasing to max g
            seq = [np.minimum(g, g.max() * (1 - 2.0 ** -k)) for k in range(1, 45, 4)]
        else:
            # restrictions to increasing sets exhausting the circle
            order = rng.permutation(N)
            seq = []
            for frac in np.linspace(0.1, 1.0, 10):
                mask = np.zeros(N)
                mask[order[: int(round(frac * N))]] = 1
                seq.append(g * mask)
        for spec in SPECS:
            values = [spec.evaluate(CircleFunction(grid, h)) for h in seq]
            limit = spec.evaluate(CircleFunction(grid, g))
            worst_drop = max(worst_drop, max(a - b for a, b in zip(values, values[1:])) / limit)
            worst_gap = max(worst_gap, abs(values[-1] - limit) / limit)
    ok = worst_gap <= 1e-10 and worst_drop <= 1e-14
    verdict(2, "monotone convergence", ok, f"final gap {worst_gap:.1e}, worst decrease {worst_drop:.1e}")
    assert ok


def test_criterion_03_dual_oracles(verdict, grid):
    rng = np.random.default_rng(3)
    holder = 0.0
    for i in range(100):
        p = (1.0, 1.5, 2.0, 3.0, 1.25)[i % 5]
        f = CircleFunction(grid, rng.normal(size=N) + 1j * rng.normal(size=N))
        exact = f.max_abs if p == 1 else Lp(p / (p - 1)).evaluate(f)
        holder = max(holder, abs(dual_norm(Lp(p), f) / exact - 1))
    brute_gap = 0.0
    eight = np.full(8, 1 / 8)
    for spec in SPECS:
        for _ in range(20):
            f = rng.lognormal(size=8)
            a = dual_norm(spec, f, weights=eight)
            b = dual_norm(spec, f, method="brute_small", weights=eight)
            brute_gap = max(brute_gap, abs(a - b) / b)
    unit = [dual_norm(spec, grid.constant(1)) for spec in SPECS]
    ok = holder <= 1e-6 and brute_gap <= 1e-3 and all(v == 1.0 for v in unit)
    verdict(3, "dual-norm oracles", ok,
            f"Holder {holder:.1e}, ascent vs brute {brute_gap:.1e}, dual of 1 = {sorted(set(unit))}")
    assert ok


def test_criterion_04_outer_functions(verdict, grid):
    t = grid.theta
    # closed-form geometric means exp(integral of log phi)
    cases = {
        "1": (np.ones(N), 1.0),
        "|1+z|": (np.abs(1 + grid.z), 1.0),
        "exp(cos)": (np.exp(np.cos(t)), 1.0),
        "(3+cos)/4": ((3 + np.cos(t)) / 4, (3 + math.sqrt(8)) / 8),
    }
    worst = {"modulus": 0.0, "negative": 0.0, "origin": 0.0}
    for phi, geometric_mean in cases.values():
        g = outer_from_modulus(CircleFunction(grid, phi))
        worst["modulus"] = max(worst["modulus"], float(np.max(np.abs(np.abs(g.samples) - phi))))
        worst["negative"] = max(worst["negative"], g.negative_energy)
        worst["origin"] = max(worst["origin"], abs(g.coefficient(0) - geometric_mean))
    ok = worst["modulus"] <= 1e-8 and worst["negative"] <= 1e-9 and worst["origin"] <= 1e-10
    verdict(4, "outer functions", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_05_factorization(verdict, grid, tmp_path):
    residual, unexpected = 0.0, []
    for item in CORPUS:
        f = item.function(grid)
        if item.analytic:
            res = inner_outer_factorize(f)
            residual = max(residual, res.residual_reconstruction, res.residual_unimodularity)
        elif item.verdict == "doubly":
            try:
                inner_outer_factorize(f)
                unexpected.append(item.name)
            except VanishingModulusError:
                pass
        else:
            with pytest.raises(NotHardyError):
                inner_outer_factorize(f)
        try:
            res = factorize_inverse_bounded(f, Lp(1))
            residual = max(residual, res.residual_reconstruction, res.residual_unimodularity)
        except (InverseUnboundedError, VanishingModulusError) as exc:
            # 1/|k| leaves L^1 exactly for arcs and for a (1 + z) factor (zero of order >= 1)
            expected = item.verdict == "doubly" or "(1 + z)" in item.description or "1 + z," in item.description
            if not expected:
                unexpected.append(f"{item.name}: {type(exc).__name__}")
    arc = tmp_path / "arc.txt"
    write_function(arc, CORPUS[[i.name for i in CORPUS].index("arc_half")].function(grid))
    codes = [main(["factorize", str(arc)]), main(["outer", str(arc)])]
    ok = residual <= 1e-8 and not unexpected and codes == [4, 4]
    verdict(5, "factorization", ok, f"worst residual {residual:.1e}, arc exit codes {codes}, unexpected {unexpected}")
    assert ok


def test_criterion_06_membership(verdict, grid):
    rng = np.random.default_rng(6)
    rejected, injected_error = [], 0.0
    for item in CORPUS:
        if not item.analytic:
            continue
        f = item.function(grid)
        eps = 1e-3 * (rng.normal() + 1j * rng.normal())
        k = int(rng.integers(1, 20))
        corrupted = f + eps * grid.monomial(-k)
        for spec in SPECS:
            if not is_in_Halpha(f, spec).member:
                rejected.append((item.name, spec.name))
            bad = is_in_Halpha(corrupted, spec)
            if bad.member:
                rejected.append((item.name + "+conj", spec.name))
            injected_error = max(injected_error, abs(bad.negative_energy - abs(eps) ** 2))
    ok = not rejected and injected_error <= 1e-10
    verdict(6, "H^alpha membership", ok, f"misjudged {rejected}, injected-mass error {injected_error:.1e}")
    assert ok


def test_criterion_07_classification(verdict, grid):
    mismatches, phi_error = [], 0.0
    backward = {"simply": [], "doubly": []}
    for item in CORPUS:
        f = item.function(grid)
        results = [classify(f, spec, n_basis=64, m_trunc=1024) for spec in SPECS]
        verdicts = {c.verdict for c in results}
        if verdicts != {item.verdict}:
            mismatches.append((item.name, sorted(verdicts)))
        c = results[0]
        backward[c.verdict].append(c.certificate["dist_backward"])
        if c.verdict == "simply" and item.analytic:
            phi = c.phi
            relative_negative = phi.negative_energy / phi.total_energy
            phi_error = max(phi_error, float(np.max(np.abs(np.abs(phi.samples) - 1))), relative_negative,
                            float(np.max(np.abs(phi.samples - item.expected_inner(grid).samples))))
    margin = math.log10(min(backward["simply"]) / max(backward["doubly"]))
    ok = not mismatches and margin >= 4 and phi_error <= 1e-8 and len(CORPUS) >= 20
    verdict(7, "classification dichotomy", ok,
            f"{len(CORPUS)} items, margin {margin:.1f} orders, inner error {phi_error:.1e}, mismatches {mismatches}")
    assert ok


def test_criterion_08_bounded_approximation(verdict, grid):
    items = [item for item in CORPUS if item.smooth_modulus]
    worst_ratio, worst_rise = 0.0, -math.inf
    for item in items:
        errors = [s.error for s in bounded_approximation(item.function(grid), Lp(1), stages=5)]
        worst_rise = max(worst_rise, max(b - a for a, b in zip(errors, errors[1:])))
        worst_ratio = max(worst_ratio, errors[-1] / errors[0])
    ok = len(items) == 10 and worst_rise <= 1e-10 and worst_ratio <= 1e-3
    verdict(8, "bounded approximation", ok,
            f"{len(items)} items, worst final/initial {worst_ratio:.1e}, worst rise {worst_rise:.1e}")
    assert ok


def test_criterion_09_ball_topology(verdict, grid):
    rng = np.random.default_rng(9)
    worst_final, l2_final, max_sup, non_monotone = 0.0, 0.0, 0.0, 0
    for _ in range(10):
        f = rng.uniform(0, 1, N) * np.exp(2j * np.pi * rng.uniform(size=N))
        g = rng.uniform(0, 1, N) * np.exp(2j * np.pi * rng.uniform(size=N))
        start = int(rng.integers(N))
        terms = []
        for k in range(1, 9):
            # move a shrinking arc of f toward g by a shrinking amount
            mask = np.zeros(N)
            mask[(start + np.arange(N >> (k - 1))) % N] = 1
            terms.append(f + 10.0 ** -k * mask * (g - f))
        max_sup = max(max_sup, max(np.abs(t).max() for t in terms))
        l2_final = max(l2_final, CircleFunction(grid, terms[-1] - f).l2_norm)
        for spec in SPECS:
            values = [spec.evaluate(CircleFunction(grid, t - f)) for t in terms]
            non_monotone += sum(b > a for a, b in zip(values, values[1:]))
            worst_final = max(worst_final, values[-1])
    ok = max_sup <= 1 and worst_final <= 1e-6 and non_monotone == 0
    verdict(9, "ball topology", ok,
            f"sup {max_sup:.3f}, final L2 {l2_final:.1e}, final alpha {worst_final:.1e}")
    assert ok


def test_criterion_10_cli_determinism(verdict, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    write_corpus("run_a")
    assert main(["corpus", "run_b"]) == 0
    names = [p.name for p in sorted((tmp_path / "run_a").iterdir())]
    corpus_same = names == [p.name for p in sorted((tmp_path / "run_b").iterdir())] and all(
        (tmp_path / "run_a" / n).read_bytes() == (tmp_path / "run_b" / n).read_bytes() for n in names)
    (tmp_path / "llogl.json").write_text(json.dumps({"variant": "orlicz", "young": "llogl"}))
    commands = [
        ["norm", "run_a/outer_exp.txt", "--norm", "llogl.json"],
        ["outer", "run_a/modulus_three_plus_cos.txt"],
        ["factorize", "run_a/mixed_blaschke_exp.txt"],
        ["classify", "run_a/arcs_two.txt"],
        ["approx", "run_a/outer_affine.txt", "--norm", "llogl.json"],
    ]
    identical, codes = [], []
    for i, cmd in enumerate(commands):
        texts = []
        for run in ("first", "second"):
            path = f"{run}_{i}.json"
            codes.append(main(cmd + ["--report", path]))
            texts.append((tmp_path / path).read_bytes())
        identical.append(texts[0] == texts[1])
    capsys.readouterr()
    ok = corpus_same and all(identical) and codes == [0, 0, 0, 0, 0, 0, 10, 10, 0, 0]
    verdict(10, "CLI determinism", ok, f"corpus identical {corpus_same}, reports identical {identical}, codes {codes}")
    assert ok
