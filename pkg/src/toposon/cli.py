"""Command-line front end.

``topo-son run`` drives a whole Monte-Carlo scenario to CSV; the
``plan-freq``, ``conserve``, ``recover`` and ``betti`` subcommands run
one planner at a time for inspection.  Exit codes: 0 success, 2 bad
config or input, 3 when any seed's run failed (the batch still
completes and the CSV is written).
"""

import argparse
import csv
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .complexes import cech, complex_from_text, rips_from_disks
from .energy import conserve, make_qos_groups
from .experiments import (ConfigError, emit_csv, load_config, run_batch,
                          seeds_csv_path)
from .frequency import (auto_plan, coverage_per_frequency, greedy_coloring,
                        interference_graph)
from .geometry import (NodeSet, as_rng, assign_radii_uniform, make_boundary,
                       sample_poisson)
from .homology import betti
from .recovery import (DamageScenario, gen_damaged, perturbed_beta1, recover,
                       set_cover_baseline)

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SEED_FAILURES = 3


def _fail_config(message):
    print(f"topo-son: {message}", file=sys.stderr)
    return EXIT_CONFIG


def _write_rows(out, header, rows):
    """CSV to a file path, or stdout when out is None."""
    if out is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_float(value):
    return repr(float(value))


def _load_cfg(args, kind):
    cfg = load_config(args.config)
    if cfg.kind != kind:
        raise ConfigError(f"config kind is {cfg.kind!r}, expected {kind!r}")
    overrides = {}
    if getattr(args, "seeds", None) is not None:
        overrides["seeds"] = args.seeds
    if getattr(args, "seed0", None) is not None:
        overrides["seed0"] = args.seed0
    return replace(cfg, **overrides) if overrides else cfg


# --- run -------------------------------------------------------------------

def _cmd_run(args):
    try:
        cfg = load_config(args.config)
        if args.seeds is not None or args.seed0 is not None:
            cfg = replace(cfg,
                          seeds=cfg.seeds if args.seeds is None
                          else args.seeds,
                          seed0=cfg.seed0 if args.seed0 is None
                          else args.seed0)
    except ConfigError as exc:
        return _fail_config(str(exc))
    report = run_batch(cfg, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"{cfg.kind}.csv")
    agg_path, seed_path = emit_csv(report, path)
    print(f"wrote {agg_path} and {seed_path}")
    print(f"seeds: {len(report.records)} ok, {len(report.failures)} failed")
    if report.failures:
        for seed, message in report.failures:
            print(f"seed {seed} failed: {message}", file=sys.stderr)
        return EXIT_SEED_FAILURES
    return EXIT_OK


# --- plan-freq -------------------------------------------------------------

def _plan_freq_row(ns, seed, resolution, rng):
    x = rips_from_disks(ns, "comm")
    ig = interference_graph(ns)
    greedy = greedy_coloring(ig)
    plan = auto_plan(x, ig, rng)
    fractions = coverage_per_frequency(ns, plan, resolution)
    return [seed, ns.n, greedy.n_freqs, plan.n_freqs], list(fractions)


def _cmd_plan_freq(args):
    rows = []
    failures = 0
    try:
        if args.nodes is not None:
            ns = NodeSet.load(args.nodes)
            fixed, fractions = _plan_freq_row(ns, args.seed,
                                              args.resolution,
                                              as_rng(args.seed))
            rows.append((fixed, fractions))
        else:
            cfg = _load_cfg(args, "frequency")
            hi = 2.0 / math.sqrt(math.pi * cfg.intensity)
            for seed in range(cfg.seed0, cfg.seed0 + cfg.seeds):
                rng = as_rng(seed)
                ns = sample_poisson(cfg.intensity, cfg.side, rng)
                ns = assign_radii_uniform(ns, cfg.side / 10.0, hi, rng)
                try:
                    fixed, fractions = _plan_freq_row(ns, seed,
                                                      cfg.resolution, rng)
                except Exception as exc:
                    failures += 1
                    print(f"seed {seed} failed: {exc}", file=sys.stderr)
                    continue
                rows.append((fixed, fractions))
    except (ConfigError, OSError, ValueError) as exc:
        return _fail_config(str(exc))
    width = max((len(fr) for _, fr in rows), default=0)
    header = (["seed", "n", "n_g", "n_f"]
              + [f"f{i + 1}" for i in range(width)])
    out_rows = []
    for fixed, fractions in rows:
        cells = [_fmt_float(f) for f in fractions]
        out_rows.append([str(v) for v in fixed]
                        + cells + [""] * (width - len(cells)))
    _write_rows(args.out, header, out_rows)
    return EXIT_SEED_FAILURES if failures else EXIT_OK


# --- conserve ----------------------------------------------------------------

def _conserve_row(ns, seed, edge_scale, shrink_step, trace, rng):
    x = rips_from_disks(ns, "cov", scale=edge_scale)
    qg = make_qos_groups(x, rng)
    res = conserve(x, ns, qg, rng, shrink_step=shrink_step,
                   edge_scale=edge_scale, trace=trace)
    n_o = qg.n_optimal()
    n_k = len(res.kept)
    before = float(np.sum(ns.r_cov ** 2))
    after = float(sum(r * r for r in res.r_cov.values()))
    return [str(seed), str(ns.n), str(n_o), str(n_k), str(n_k - n_o),
            _fmt_float(before), _fmt_float(after)]


def _cmd_conserve(args):
    header = ["seed", "n", "n_o", "n_k", "n_k_minus_n_o",
              "energy_before", "energy_after"]
    trace = sys.stderr if args.trace else None
    rows = []
    failures = 0
    try:
        if args.nodes is not None:
            ns = NodeSet.load(args.nodes)
            rows.append(_conserve_row(ns, args.seed, args.edge_scale,
                                      args.shrink_step, trace,
                                      as_rng(args.seed)))
        else:
            cfg = _load_cfg(args, "energy")
            hi = 2.0 / math.sqrt(math.pi * cfg.intensity)
            for seed in range(cfg.seed0, cfg.seed0 + cfg.seeds):
                rng = as_rng(seed)
                ns = sample_poisson(cfg.intensity, cfg.side, rng)
                ns = assign_radii_uniform(ns, 2.0 * cfg.side / 10.0,
                                          2.0 * hi, rng)
                ns = make_boundary(ns, "square_perimeter")
                try:
                    rows.append(_conserve_row(ns, seed, cfg.edge_scale,
                                              cfg.shrink_step, trace,
                                              rng))
                except Exception as exc:
                    failures += 1
                    print(f"seed {seed} failed: {exc}", file=sys.stderr)
    except (ConfigError, OSError, ValueError) as exc:
        return _fail_config(str(exc))
    _write_rows(args.out, header, rows)
    return EXIT_SEED_FAILURES if failures else EXIT_OK


# --- recover -----------------------------------------------------------------

def _cmd_recover(args):
    if args.config is not None:
        try:
            cfg = _load_cfg(args, "recovery")
        except (ConfigError, OSError) as exc:
            return _fail_config(str(exc))
        coverage, r, sigma = cfg.coverage, cfg.r, cfg.sigma
        seeds, seed0 = cfg.seeds, cfg.seed0
        mcmc_steps, n_modes = cfg.mcmc_steps, cfg.n_modes
        grid_step, side = cfg.grid_step, cfg.side
    else:
        if args.coverage is None:
            return _fail_config("recover needs --config or --coverage")
        coverage, r, sigma = args.coverage, args.r, args.sigma
        seeds = args.seeds if args.seeds is not None else 1000
        seed0 = args.seed0 if args.seed0 is not None else 0
        mcmc_steps, n_modes = args.mcmc_steps, args.n_modes
        grid_step, side = args.grid_step, 2.0
    try:
        ds = DamageScenario(coverage, r, side)
    except ValueError as exc:
        return _fail_config(str(exc))
    header = ["seed", "n_i", "n_added_total", "n_added_kept",
              "beta1_after_perturbation"]
    rows = []
    failures = 0
    for seed in range(seed0, seed0 + seeds):
        rng = as_rng(seed)
        ns = gen_damaged(ds, rng)
        inside = ((ns.xs >= 0.0) & (ns.xs <= ns.side)
                  & (ns.ys >= 0.0) & (ns.ys <= ns.side))
        n_i = int(np.count_nonzero(inside & ~ns.boundary))
        try:
            if args.planner == "homology":
                res = recover(ns, ds.r, rng, mcmc_steps=mcmc_steps,
                              n_modes=n_modes)
            else:
                res = set_cover_baseline(ns, ds.r, grid_step=grid_step)
            b1 = perturbed_beta1(ns, res.added_final, ds.r, sigma, rng)
        except Exception as exc:
            failures += 1
            print(f"seed {seed} failed: {exc}", file=sys.stderr)
            continue
        rows.append([str(seed), str(n_i), str(res.n_added_total),
                     str(len(res.added_final)), str(b1)])
    _write_rows(args.out, header, rows)
    return EXIT_SEED_FAILURES if failures else EXIT_OK


# --- betti -------------------------------------------------------------------

def _cmd_betti(args):
    try:
        if args.complex is not None:
            with open(args.complex, encoding="utf-8") as fh:
                x = complex_from_text(fh.read())
        else:
            ns = NodeSet.load(args.nodes)
            if args.cech is not None:
                x = cech(ns, args.cech)
            else:
                x = rips_from_disks(ns, args.role, scale=args.scale)
    except (OSError, ValueError) as exc:
        return _fail_config(str(exc))
    pair = betti(x)
    print(f"beta0={pair.beta0} beta1={pair.beta1}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="topo-son",
        description="Topology-driven planners for cellular networks: "
                    "frequency auto-planning, energy conservation, "
                    "disaster recovery, and Monte-Carlo batch runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config to CSV")
    p_run.add_argument("config", help="scenario config file")
    p_run.add_argument("--seeds", type=int, default=None,
                       help="override the config's seed count")
    p_run.add_argument("--seed0", type=int, default=None,
                       help="override the config's first seed")
    p_run.add_argument("--out", default=".",
                       help="output directory (default: current)")
    p_run.add_argument("--workers", type=int, default=None,
                       help="process-pool size (default: in-process)")
    p_run.set_defaults(func=_cmd_run)

    p_pf = sub.add_parser("plan-freq",
                          help="frequency plans as CSV rows")
    src = p_pf.add_mutually_exclusive_group(required=True)
    src.add_argument("--nodes", help="NodeSet text file")
    src.add_argument("--config", help="frequency scenario config")
    p_pf.add_argument("--seed", type=int, default=0,
                      help="planner seed for --nodes (default 0)")
    p_pf.add_argument("--seeds", type=int, default=None)
    p_pf.add_argument("--seed0", type=int, default=None)
    p_pf.add_argument("--resolution", type=int, default=256,
                      help="coverage raster cells per side for --nodes")
    p_pf.add_argument("--out", default=None,
                      help="CSV path (default: stdout)")
    p_pf.set_defaults(func=_cmd_plan_freq)

    p_co = sub.add_parser("conserve",
                          help="energy conservation as CSV rows")
    src = p_co.add_mutually_exclusive_group(required=True)
    src.add_argument("--nodes", help="NodeSet text file (r_cov set)")
    src.add_argument("--config", help="energy scenario config")
    p_co.add_argument("--seed", type=int, default=0,
                      help="run seed for --nodes (default 0)")
    p_co.add_argument("--seeds", type=int, default=None)
    p_co.add_argument("--seed0", type=int, default=None)
    p_co.add_argument("--edge-scale", type=float, default=1.0,
                      dest="edge_scale",
                      help="link-threshold scale for --nodes (default 1)")
    p_co.add_argument("--shrink-step", type=float, default=0.05,
                      dest="shrink_step")
    p_co.add_argument("--trace", action="store_true",
                      help="reduction trace lines to stderr: "
                           "step vertex index action beta0 beta1")
    p_co.add_argument("--out", default=None,
                      help="CSV path (default: stdout)")
    p_co.set_defaults(func=_cmd_conserve)

    p_re = sub.add_parser("recover",
                          help="disaster recovery as CSV rows")
    p_re.add_argument("--config", default=None,
                      help="recovery scenario config")
    p_re.add_argument("--coverage", type=float, default=None,
                      help="surviving coverage fraction in (0, 1)")
    p_re.add_argument("--r", type=float, default=0.5,
                      help="common coverage radius (default 0.5)")
    p_re.add_argument("--sigma", type=float, default=0.1,
                      help="perturbation scale (default 0.1)")
    p_re.add_argument("--planner", choices=("homology", "setcover"),
                      default="homology")
    p_re.add_argument("--seeds", type=int, default=None)
    p_re.add_argument("--seed0", type=int, default=None)
    p_re.add_argument("--mcmc-steps", type=int, default=None,
                      dest="mcmc_steps")
    p_re.add_argument("--n-modes", type=int, default=None, dest="n_modes")
    p_re.add_argument("--grid-step", type=float, default=None,
                      dest="grid_step")
    p_re.add_argument("--out", default=None,
                      help="CSV path (default: stdout)")
    p_re.set_defaults(func=_cmd_recover)

    p_be = sub.add_parser("betti", help="Betti numbers of one complex")
    src = p_be.add_mutually_exclusive_group(required=True)
    src.add_argument("--complex", help="complex text file")
    src.add_argument("--nodes", help="NodeSet text file")
    p_be.add_argument("--role", choices=("comm", "cov"), default="cov",
                      help="radius set for the flag complex (default cov)")
    p_be.add_argument("--scale", type=float, default=1.0,
                      help="link-threshold scale (default 1)")
    p_be.add_argument("--cech", type=float, default=None,
                      help="build the coverage complex at this radius "
                           "instead of the flag complex")
    p_be.set_defaults(func=_cmd_betti)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
