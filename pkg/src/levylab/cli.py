"""Command-line entry points; every subcommand writes CSV/JSON artifacts.

Exit codes: 0 success, 2 partial (some samples skipped), 1 failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    ExperimentConfig,
    derived_seed,
    emit,
    run_local_law,
    run_transition_sweep,
)
from .fixed_point import (
    QuadratureConfig,
    population_dynamics,
    pool_moment,
    solve_gamma_star,
    spectral_density,
)
from .kernel_spectrum import alpha_scan, flag_minima
from .matrix_model import build_levy_matrix, eigendecompose


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
    else:
        cfg = ExperimentConfig(alpha=args.alpha if args.alpha else 1.0)
    return cfg.with_overrides(
        alpha=args.alpha, master_seed=args.seed, output_dir=args.out)


def _common(parser, with_alpha=True):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--out", default=None, help="output directory")
    if with_alpha:
        parser.add_argument("--alpha", type=float, default=None)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="levylab",
                                description="heavy-tailed random matrix laboratory")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample-spectrum", help="eigenvalues of one sample")
    _common(sp)
    sp.add_argument("--n", type=int, default=1000)

    sw = sub.add_parser("localization-sweep", help="Q_I over (n, seed, E)")
    _common(sw)

    ll = sub.add_parser("local-law", help="window mass vs the limiting measure")
    _common(ll)

    fx = sub.add_parser("solve-fixed-point", help="order-parameter fixed point")
    _common(fx)
    fx.add_argument("--z-re", type=float, default=0.0)
    fx.add_argument("--z-im", type=float, default=0.1)
    fx.add_argument("--tol", type=float, default=1e-7)
    fx.add_argument("--grid", type=int, default=65)

    de = sub.add_parser("density", help="limiting spectral density table")
    _common(de)
    de.add_argument("--e-max", type=float, default=2.0)
    de.add_argument("--points", type=int, default=21)

    pd = sub.add_parser("population-dynamics", help="pool for the recursive law")
    _common(pd)
    pd.add_argument("--z-re", type=float, default=0.0)
    pd.add_argument("--z-im", type=float, default=0.2)
    pd.add_argument("--pool", type=int, default=100000)
    pd.add_argument("--sweeps", type=int, default=30)
    pd.add_argument("--K", type=int, default=200)

    ks = sub.add_parser("kernel-scan", help="Fredholm determinant scan over alpha")
    _common(ks, with_alpha=False)
    ks.add_argument("--alpha-min", type=float, default=1.1)
    ks.add_argument("--alpha-max", type=float, default=1.9)
    ks.add_argument("--step", type=float, default=0.05)
    ks.add_argument("--nodes", type=int, default=64)
    ks.add_argument("--kappa", type=float, default=0.5)
    ks.add_argument("--no-refine", action="store_true")

    args = p.parse_args(argv)
    out = Path(args.out or "out")

    if args.command == "sample-spectrum":
        cfg = _load_config(args)
        out.mkdir(parents=True, exist_ok=True)
        seed = derived_seed(cfg.master_seed, args.n, 0)
        sd = eigendecompose(build_levy_matrix(args.n, cfg.alpha, seed))
        path = out / f"spectrum-n{args.n}-a{cfg.alpha}-s{cfg.master_seed}.csv"
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "eigenvalue"])
            for i, lam in enumerate(sd.eigenvalues):
                w.writerow([i, "%.17g" % lam])
        print(path)
        return 0

    if args.command in ("localization-sweep", "local-law"):
        cfg = _load_config(args)
        runner = run_transition_sweep if args.command == "localization-sweep" \
            else run_local_law
        try:
            record = runner(cfg)
        except RuntimeError as exc:
            print(f"run failed: {exc}", file=sys.stderr)
            return 1
        for path in emit(record, "csv", out):
            print(path)
        return 2 if record.skipped else 0

    if args.command == "solve-fixed-point":
        cfg = _load_config(args)
        z = complex(args.z_re, args.z_im)
        quad = QuadratureConfig().scaled(cfg.quad_scale)
        sol = solve_gamma_star(z, cfg.alpha, tol=args.tol, m=args.grid, quad=quad)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"gamma-star-a{cfg.alpha}-z{z}.json"
        path.write_text(sol.checkpoint_json(quad))
        print(path)
        print(f"residual {sol.residual:.3e} after {sol.iterations} iterations")
        return 0

    if args.command == "density":
        cfg = _load_config(args)
        out.mkdir(parents=True, exist_ok=True)
        cache: dict = {}
        path = out / f"density-a{cfg.alpha}.csv"
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["E", "f_star", "eta_used", "extrapolation_error"])
            for e in np.linspace(0.0, args.e_max, args.points):
                val, err = spectral_density(float(e), cfg.alpha,
                                            cfg.eta_ladder, cache=cache,
                                            with_error=True)
                w.writerow(["%.17g" % e, "%.17g" % val,
                            "%.17g" % cfg.eta_ladder[-1], "%.17g" % err])
        print(path)
        return 0

    if args.command == "population-dynamics":
        cfg = _load_config(args)
        z = complex(args.z_re, args.z_im)
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.master_seed, spawn_key=(0xB0D,)))
        pool = population_dynamics(z, cfg.alpha, args.pool, args.sweeps,
                                   args.K, rng)
        m1, se1 = pool_moment(pool, 1.0, "abs")
        m2, se2 = pool_moment(pool, 2.0, "abs")
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"pool-a{cfg.alpha}-z{z}.json"
        path.write_text(json.dumps({
            "z_re": z.real, "z_im": z.imag, "alpha": cfg.alpha,
            "pool_size": args.pool, "sweeps": args.sweeps, "K": args.K,
            "converged": pool.converged, "m_history": list(pool.m_history),
            "E_abs_R": m1, "se_abs_R": se1,
            "E_abs_R2": m2, "se_abs_R2": se2,
        }, indent=1))
        print(path)
        return 0

    if args.command == "kernel-scan":
        grid = np.arange(args.alpha_min, args.alpha_max + 0.5 * args.step,
                         args.step)
        results, failures = alpha_scan(grid, n_nodes=args.nodes,
                                       kappa=args.kappa,
                                       refine=not args.no_refine)
        minima = set(flag_minima(results))
        out.mkdir(parents=True, exist_ok=True)
        path = out / "kernel-scan.csv"
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re_alpha", "im_alpha", "m", "n_nodes", "det_re",
                        "det_im", "abs_det", "abs_det_deflated",
                        "refinement_delta", "candidate_minimum"])
            for i, r in enumerate(results):
                w.writerow(["%.17g" % r.alpha.real, "%.17g" % r.alpha.imag,
                            r.m, r.grid_size,
                            "%.17g" % r.det_value.real,
                            "%.17g" % r.det_value.imag,
                            "%.17g" % abs(r.det_value),
                            "%.17g" % abs(r.det_deflated),
                            "%.17g" % r.refinement_delta,
                            int(i in minima)])
        print(path)
        for a, msg in failures:
            print(f"skipped alpha={a}: {msg}", file=sys.stderr)
        return 2 if failures else 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
