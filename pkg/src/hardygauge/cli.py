"""Command-line interface.

Subcommands: ``norm``, ``validate``, ``outer``, ``factorize``, ``classify``,
``approx`` and ``corpus``.  Exit codes are part of the public contract:

====  ==========================================================
0     success; for ``classify`` the subspace is simply invariant
1     other numerical error (resolution, domain, ...)
2     input does not parse (files, configs, arguments)
3     norm fails the gauge-norm axioms
4     vanishing modulus (log-integrability gate fails)
5     inverse of the input is not in the norm's space
6     degenerate (zero) generator
7     file-system error
8     input is not analytic to tolerance
9     dual-norm optimization did not converge
10    ``classify``: doubly invariant subspace
11    ``classify``: distance verdict and log gate disagree
====  ==========================================================
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .corpus import DEFAULT_SEED, write_corpus
from .errors import (
    AxiomViolation,
    DegenerateGeneratorError,
    HardyGaugeError,
    InconsistentCrossCheckError,
    InverseUnboundedError,
    NotHardyError,
    OptimizationFailure,
    VanishingModulusError,
)
from .factorization import factorize_inverse_bounded, inner_outer_factorize, log_integrability, outer_from_modulus
from .io import FormatError, format_report, read_function, read_norm_config, write_function
from .norms import continuity_modulus, dual_norm, norm_from_config, validate_axioms
from .spectral import herglotz_evaluate_interior
from .subspaces import bounded_approximation, classify, verify_certificate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_AXIOM = 3
EXIT_VANISHING = 4
EXIT_INVERSE_UNBOUNDED = 5
EXIT_DEGENERATE = 6
EXIT_IO = 7
EXIT_NOT_HARDY = 8
EXIT_OPTIMIZATION = 9
EXIT_DOUBLY = 10
EXIT_INCONSISTENT = 11

DEFAULT_NORM = {"variant": "lp", "p": 2}

# order matters: subclasses before their bases
_ERROR_CODES = (
    (FormatError, EXIT_PARSE),
    (json.JSONDecodeError, EXIT_PARSE),
    (AxiomViolation, EXIT_AXIOM),
    (VanishingModulusError, EXIT_VANISHING),
    (InverseUnboundedError, EXIT_INVERSE_UNBOUNDED),
    (DegenerateGeneratorError, EXIT_DEGENERATE),
    (NotHardyError, EXIT_NOT_HARDY),
    (OptimizationFailure, EXIT_OPTIMIZATION),
    (InconsistentCrossCheckError, EXIT_INCONSISTENT),
    (OSError, EXIT_IO),
    (HardyGaugeError, EXIT_ERROR),
)


def _norm_config(args) -> dict:
    return read_norm_config(args.norm) if args.norm else dict(DEFAULT_NORM)


def _build_norm(cfg: dict):
    try:
        return norm_from_config(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, HardyGaugeError):
            raise
        raise FormatError(f"invalid norm config: {exc}") from exc


def _spec_summary(spec) -> dict:
    return {"name": spec.name, "config": spec.to_config(), "continuous": spec.continuous}


# commands -------------------------------------------------------------------


def cmd_norm(args, report):
    f = read_function(args.function)
    cfg = _norm_config(args)
    report["inputs"] = {"function": args.function, "norm": cfg, "dual": args.dual, "method": args.method}
    spec = _build_norm(cfg)
    if args.dual:
        value = dual_norm(spec, f, method=args.method)
    else:
        value = spec.evaluate(f)
    report["result"] = {"value": value, "norm": _spec_summary(spec)}
    print(repr(float(value)))
    return EXIT_OK


def cmd_validate(args, report):
    cfg = dict(_norm_config(args))
    report["inputs"] = {"norm": cfg, "trials": args.trials, "seed": args.seed}
    if cfg.get("variant") == "orlicz":
        cfg["validate"] = False
    spec = _build_norm(cfg)
    axioms = validate_axioms(spec, trials=args.trials, seed=args.seed)
    probe = continuity_modulus(spec, [2.0 ** -k for k in range(0, 11)])
    report["result"] = {
        "axioms": axioms.to_dict(),
        "continuity_probe": [{"measure": t, "value": v} for t, v in probe],
        "continuous": spec.continuous,
    }
    print("PASS" if axioms.passed else "FAIL", spec.name)
    return EXIT_OK if axioms.passed else EXIT_AXIOM


def cmd_outer(args, report):
    phi = read_function(args.modulus)
    report["inputs"] = {"modulus": args.modulus}
    gate = log_integrability(abs(phi))
    report["cross_checks"] = {"log_integrability": gate.to_dict()}
    g = outer_from_modulus(phi)
    g0 = herglotz_evaluate_interior(phi, 0)
    report["result"] = {
        "modulus_residual": float(abs(abs(g) - phi).max_abs),
        "negative_energy": g.negative_energy,
        "herglotz_at_origin": g0,
        "geometric_mean": math.exp(gate.value),
    }
    if args.output:
        write_function(args.output, g)
    print(f"outer: modulus residual {report['result']['modulus_residual']:.3e}")
    return EXIT_OK


def cmd_factorize(args, report):
    f = read_function(args.function)
    cfg = _norm_config(args)
    report["inputs"] = {"function": args.function, "norm": cfg, "inverse_bounded": args.inverse_bounded}
    if args.inverse_bounded:
        res = factorize_inverse_bounded(f, _build_norm(cfg))
    else:
        res = inner_outer_factorize(f)
    report["residuals"] = res.to_dict()
    if args.unimodular:
        write_function(args.unimodular, res.unimodular)
    if args.outer:
        write_function(args.outer, res.outer)
    print(f"factorize: reconstruction {res.residual_reconstruction:.3e}, "
          f"unimodularity {res.residual_unimodularity:.3e}")
    return EXIT_OK


def cmd_classify(args, report):
    f = read_function(args.function)
    cfg = _norm_config(args)
    report["inputs"] = {"function": args.function, "norm": cfg}
    spec = _build_norm(cfg)
    try:
        c = classify(f, spec, n_basis=args.n_basis, m_trunc=args.m_trunc, tau_doubly=args.tau)
    except InconsistentCrossCheckError as exc:
        report["classification"] = exc.classification.to_dict()
        raise
    report["classification"] = c.to_dict()
    report["verification"] = verify_certificate(c, f, spec).to_dict()
    if c.phi is not None and args.phi:
        write_function(args.phi, c.phi)
    print(f"classify: {c.verdict} (backward distance {c.certificate['dist_backward']:.3e})")
    return EXIT_DOUBLY if c.is_doubly else EXIT_OK


def cmd_approx(args, report):
    f = read_function(args.function)
    cfg = _norm_config(args)
    report["inputs"] = {"function": args.function, "norm": cfg, "stages": args.stages}
    stages = bounded_approximation(f, _build_norm(cfg), stages=args.stages)
    report["result"] = {
        "stages": [{"degree": s.degree, "error": s.error, "sup": s.function.max_abs} for s in stages]
    }
    for s in stages:
        print(f"{s.degree} {s.error:.16e}")
    return EXIT_OK


def cmd_corpus(args, report):
    report["inputs"] = {"directory": args.directory, "seed": args.seed, "grid_size": args.grid_size}
    manifest = write_corpus(args.directory, seed=args.seed, n=args.grid_size)
    report["result"] = {"items": len(manifest["items"])}
    print(f"corpus: {len(manifest['items'])} items written to {args.directory}")
    return EXIT_OK


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardygauge", description="Hardy spaces under gauge norms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, norm=True):
        if norm:
            p.add_argument("--norm", help="JSON norm config (default: L^2)")
        p.add_argument("--report", help="write a JSON report to this path")
        p.add_argument("--timing", action="store_true", help="record wall time in the report")

    p = sub.add_parser("norm", help="evaluate a gauge norm or its dual")
    p.add_argument("function")
    p.add_argument("--dual", action="store_true")
    p.add_argument("--method", default="ascent", choices=["ascent", "closed_form", "brute_small"])
    common(p)
    p.set_defaults(run=cmd_norm)

    p = sub.add_parser("validate", help="run the randomized gauge-norm axiom suite")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("outer", help="outer function with a given boundary modulus")
    p.add_argument("modulus")
    p.add_argument("--output", "-o")
    common(p, norm=False)
    p.set_defaults(run=cmd_outer)

    p = sub.add_parser("factorize", help="inner-outer or bounded-inverse factorization")
    p.add_argument("function")
    p.add_argument("--inverse-bounded", action="store_true",
                   help="factor k = w h with 1/h in the norm's Hardy space")
    p.add_argument("--unimodular")
    p.add_argument("--outer")
    common(p)
    p.set_defaults(run=cmd_factorize)

    p = sub.add_parser("classify", help="simply or doubly invariant cyclic subspace")
    p.add_argument("function")
    p.add_argument("--n-basis", type=int, default=64)
    p.add_argument("--m-trunc", type=int, default=1024)
    p.add_argument("--tau", type=float, default=1e-6)
    p.add_argument("--phi", help="write the unimodular generator here (simply invariant case)")
    common(p)
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("approx", help="bounded approximation by Cesaro means")
    p.add_argument("function")
    p.add_argument("--stages", type=int, default=5)
    common(p)
    p.set_defaults(run=cmd_approx)

    p = sub.add_parser("corpus", help="write the canonical test corpus")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--grid-size", type=int, default=4096)
    common(p, norm=False)
    p.set_defaults(run=cmd_corpus)
    return parser


def _exit_code(exc) -> int:
    for cls, code in _ERROR_CODES:
        if isinstance(exc, cls):
            return code
    raise exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command, "version": __version__,
              "options": {k: v for k, v in sorted(vars(args).items()) if k not in ("run", "report")}}
    start = time.perf_counter()
    try:
        code = args.run(args, report)
    except Exception as exc:  # mapped to the exit-code contract below
        code = _exit_code(exc)
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, AxiomViolation):
            report["error"]["axioms"] = exc.report.to_dict()
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    report["exit_code"] = code
    report["runtime_seconds"] = time.perf_counter() - start if args.timing else None
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(format_report(report))
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
