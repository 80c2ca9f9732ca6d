"""Scenario configs, Monte-Carlo batch driver, aggregation, CSV emission.

A scenario is a flat ``key = value`` text file with a ``kind``
discriminator.  ``run_batch`` executes one independent run per seed
(``seed0 .. seed0 + seeds - 1``), optionally on a process pool, and folds
the per-seed records into table-shaped aggregates in seed order, so the
report is a pure function of the config.  Failed seeds become flagged
records instead of aborting the batch.  ``emit_csv`` writes the
aggregates plus a raw per-seed file whose floats round-trip exactly.
"""

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .complexes import rips_from_disks
from .energy import conserve, make_qos_groups
from .frequency import (auto_plan, coverage_per_frequency, greedy_coloring,
                        interference_graph, plan_is_valid)
from .geometry import (as_rng, assign_radii_uniform, make_boundary,
                       sample_poisson)
from .recovery import (DamageScenario, gen_damaged, perturbed_beta1, recover,
                       set_cover_baseline)

__all__ = [
    "ConfigError",
    "RunReport",
    "ScenarioConfig",
    "aggregate_records",
    "emit_csv",
    "load_config",
    "parse_config",
    "read_csv",
    "records_from_seeds_csv",
    "run_batch",
]

KINDS = ("frequency", "energy", "recovery")


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One Monte-Carlo scenario; kind selects which fields apply.

    intensity is the Poisson intensity (the ``lambda`` config key);
    coverage is the surviving-coverage fraction of a recovery scenario.
    """

    kind: str
    seeds: int = 2000
    seed0: int = 0
    side: float = 2.0
    intensity: float = None
    coverage: float = None
    r: float = 0.5
    sigma: float = 0.1
    resolution: int = 256
    shrink_step: float = 0.05
    edge_scale: float = 0.75
    grid_step: float = None
    mcmc_steps: int = None
    n_modes: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}")
        if self.seeds < 1:
            raise ConfigError("seeds must be at least 1")
        if self.seed0 < 0:
            raise ConfigError("seed0 must be nonnegative")
        if not self.side > 0:
            raise ConfigError("side must be positive")
        if self.kind in ("frequency", "energy"):
            if self.intensity is None:
                raise ConfigError(f"kind={self.kind} requires lambda")
            if not self.intensity > 0:
                raise ConfigError("lambda must be positive")
        if self.kind == "frequency" and self.resolution < 16:
            raise ConfigError("resolution must be at least 16")
        if self.kind == "energy":
            if not 0 < self.shrink_step < 1:
                raise ConfigError("shrink_step must be in (0, 1)")
            if not self.edge_scale > 0:
                raise ConfigError("edge_scale must be positive")
        if self.kind == "recovery":
            if self.coverage is None:
                raise ConfigError("kind=recovery requires coverage")
            if not 0 < self.coverage < 1:
                raise ConfigError("coverage must be in (0, 1)")
            if not self.r > 0:
                raise ConfigError("r must be positive")
            if self.sigma < 0:
                raise ConfigError("sigma must be nonnegative")
            if self.grid_step is not None and not self.grid_step > 0:
                raise ConfigError("grid_step must be positive")
            if self.mcmc_steps is not None and self.mcmc_steps < 1:
                raise ConfigError("mcmc_steps must be at least 1")
            if self.n_modes is not None and self.n_modes < 1:
                raise ConfigError("n_modes must be at least 1")


_INT_KEYS = {"seeds", "seed0", "resolution", "mcmc_steps", "n_modes"}
_FLOAT_KEYS = {"lambda", "coverage", "a", "r", "sigma", "shrink_step",
               "edge_scale", "grid_step"}
_KEY_TO_FIELD = {"lambda": "intensity", "a": "side"}
_KIND_KEYS = {
    "frequency": {"lambda", "a", "seeds", "seed0", "resolution"},
    "energy": {"lambda", "a", "seeds", "seed0", "shrink_step", "edge_scale"},
    "recovery": {"coverage", "a", "r", "sigma", "seeds", "seed0",
                 "grid_step", "mcmc_steps", "n_modes"},
}


def parse_config(text):
    """ScenarioConfig from ``key = value`` lines (# starts a comment)."""
    raw = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {ln}: expected 'key = value'")
        if key in raw:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        raw[key] = (ln, value)
    if "kind" not in raw:
        raise ConfigError("missing required key 'kind'")
    kind = raw.pop("kind")[1]
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}")
    allowed = _KIND_KEYS[kind]
    fields = {"kind": kind}
    for key, (ln, value) in raw.items():
        if key not in allowed:
            raise ConfigError(f"line {ln}: key {key!r} not valid for "
                              f"kind={kind}")
        try:
            parsed = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ConfigError(f"line {ln}: bad number {value!r} "
                              f"for {key!r}") from None
        fields[_KEY_TO_FIELD.get(key, key)] = parsed
    return ScenarioConfig(**fields)


def load_config(path):
    """parse_config over a file's contents."""
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


# --- per-seed runners ----------------------------------------------------

SEED_COLUMNS = {
    "frequency": (("seed", int), ("n", int), ("n_g", int), ("n_f", int),
                  ("minmax_ratio_auto", float),
                  ("minmax_ratio_greedy", float)),
    "energy": (("seed", int), ("n", int), ("n_o", int), ("n_k", int),
               ("n_k_minus_n_o", int), ("energy_before", float),
               ("energy_after", float)),
    "recovery": (("seed", int), ("n_i", int), ("hom_added_total", int),
                 ("hom_added_kept", int), ("hom_beta1_perturbed", int),
                 ("sc_added", int), ("sc_beta1_perturbed", int)),
}


def _minmax_ratio(fractions):
    top = float(np.max(fractions))
    return float(np.min(fractions)) / top if top > 0 else 0.0


def _frequency_seed(cfg, seed):
    rng = as_rng(seed)
    ns = sample_poisson(cfg.intensity, cfg.side, rng)
    hi = 2.0 / math.sqrt(math.pi * cfg.intensity)
    ns = assign_radii_uniform(ns, cfg.side / 10.0, hi, rng)
    x = rips_from_disks(ns, "comm")
    ig = interference_graph(ns)
    greedy = greedy_coloring(ig)
    plan = auto_plan(x, ig, rng)
    if not plan_is_valid(plan, ig) or not plan_is_valid(greedy, ig):
        raise RuntimeError("planner produced a conflicting assignment")
    return (seed, ns.n, greedy.n_freqs, plan.n_freqs,
            _minmax_ratio(coverage_per_frequency(ns, plan, cfg.resolution)),
            _minmax_ratio(coverage_per_frequency(ns, greedy,
                                                 cfg.resolution)))


def _energy_seed(cfg, seed):
    rng = as_rng(seed)
    ns = sample_poisson(cfg.intensity, cfg.side, rng)
    hi = 2.0 / math.sqrt(math.pi * cfg.intensity)
    ns = assign_radii_uniform(ns, 2.0 * cfg.side / 10.0, 2.0 * hi, rng)
    ns = make_boundary(ns, "square_perimeter")
    x = rips_from_disks(ns, "cov", scale=cfg.edge_scale)
    qg = make_qos_groups(x, rng)
    res = conserve(x, ns, qg, rng, shrink_step=cfg.shrink_step,
                   edge_scale=cfg.edge_scale)
    n_o = qg.n_optimal()
    n_k = len(res.kept)
    before = float(np.sum(ns.r_cov ** 2))
    after = float(sum(r * r for r in res.r_cov.values()))
    return (seed, ns.n, n_o, n_k, n_k - n_o, before, after)


def _recovery_seed(cfg, seed):
    ds = DamageScenario(cfg.coverage, cfg.r, cfg.side)
    rng = as_rng(seed)
    ns = gen_damaged(ds, rng)
    hom = recover(ns, ds.r, rng, mcmc_steps=cfg.mcmc_steps,
                  n_modes=cfg.n_modes)
    sc = set_cover_baseline(ns, ds.r, grid_step=cfg.grid_step)
    b1_hom = perturbed_beta1(ns, hom.added_final, ds.r, cfg.sigma, rng)
    b1_sc = perturbed_beta1(ns, sc.added_final, ds.r, cfg.sigma, rng)
    inside = ((ns.xs >= 0.0) & (ns.xs <= ns.side)
              & (ns.ys >= 0.0) & (ns.ys <= ns.side))
    n_i = int(np.count_nonzero(inside & ~ns.boundary))
    return (seed, n_i, hom.n_added_total, len(hom.added_final), b1_hom,
            sc.n_added_total, b1_sc)


_RUNNERS = {"frequency": _frequency_seed, "energy": _energy_seed,
            "recovery": _recovery_seed}


def _run_one(task):
    """(cfg, seed) -> ("ok", record) or ("fail", (seed, message))."""
    cfg, seed = task
    try:
        return ("ok", _RUNNERS[cfg.kind](cfg, seed))
    except Exception as exc:
        return ("fail", (seed, f"{type(exc).__name__}: {exc}"))


# --- aggregation ---------------------------------------------------------

def _by_value(records, key_col, val_col):
    groups = {}
    for rec in records:
        groups.setdefault(rec[key_col], []).append(rec[val_col])
    return groups


def aggregate_records(kind, records, coverage=None):
    """(agg_columns, agg_rows) for per-seed record dicts.

    frequency/energy rows are (stat, key, value) triples: occurrence
    percentages over the conditioning count plus the conditional means
    the tables report.  recovery rows follow the fixed robustness schema
    (scenario, planner, mean_beta1, p_beta1_zero).
    """
    if kind == "recovery":
        columns = ("scenario", "planner", "mean_beta1", "p_beta1_zero")
        if not records:
            return columns, ()
        scen = coverage if coverage is not None else ""
        rows = []
        for planner, col in (("homology", "hom_beta1_perturbed"),
                             ("set_cover", "sc_beta1_perturbed")):
            vals = [rec[col] for rec in records]
            rows.append((scen, planner,
                         float(np.mean(vals)),
                         float(np.mean([v == 0 for v in vals]))))
        return columns, tuple(rows)

    columns = ("stat", "key", "value")
    rows = []
    n = len(records)
    if kind == "frequency":
        for ng, vals in sorted(_by_value(records, "n_g", "n_f").items()):
            rows.append(("occurrence_pct", str(ng), 100.0 * len(vals) / n))
            rows.append(("mean_n_f_given_n_g", str(ng), float(np.mean(vals))))
        for stat, count_col, ratio_col in (
                ("mean_minmax_ratio_auto_at_4", "n_f", "minmax_ratio_auto"),
                ("mean_minmax_ratio_greedy_at_4", "n_g",
                 "minmax_ratio_greedy")):
            vals = [rec[ratio_col] for rec in records if rec[count_col] == 4]
            if vals:
                rows.append((stat, "", float(np.mean(vals))))
    elif kind == "energy":
        diffs = [rec["n_k_minus_n_o"] for rec in records]
        if diffs:
            rows.append(("mean_n_k_minus_n_o", "", float(np.mean(diffs))))
        for d, vals in sorted(_by_value(records, "n_k_minus_n_o",
                                        "n_k").items()):
            rows.append(("occurrence_pct", str(d), 100.0 * len(vals) / n))
        for n_o, vals in sorted(_by_value(records, "n_o", "n_k").items()):
            rows.append(("mean_n_k_given_n_o", str(n_o),
                         float(np.mean(vals))))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return columns, tuple(rows)


@dataclass(frozen=True)
class RunReport:
    """Per-seed records plus the table-shaped aggregates of one batch."""

    config: ScenarioConfig
    columns: tuple
    records: tuple
    agg_columns: tuple
    aggregates: tuple
    failures: tuple

    @property
    def kind(self):
        return self.config.kind

    def record_dicts(self):
        names = [name for name, _ in SEED_COLUMNS[self.kind]]
        return [dict(zip(names, rec)) for rec in self.records]


def run_batch(cfg, workers=None):
    """Run cfg.seeds independent seeds and fold them into a RunReport.

    workers > 1 dispatches seeds to a process pool; records are folded
    in seed order either way, so the report does not depend on worker
    scheduling.  A seed whose run raises becomes a (seed, message)
    failure entry instead of aborting the batch.
    """
    seeds = range(cfg.seed0, cfg.seed0 + cfg.seeds)
    tasks = [(cfg, s) for s in seeds]
    if workers is not None and workers > 1:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=chunk))
    else:
        outcomes = [_run_one(t) for t in tasks]
    records = []
    failures = []
    for status, payload in outcomes:
        if status == "ok":
            records.append(payload)
        else:
            failures.append(payload)
    names = [name for name, _ in SEED_COLUMNS[cfg.kind]]
    dicts = [dict(zip(names, rec)) for rec in records]
    agg_columns, aggregates = aggregate_records(cfg.kind, dicts,
                                                coverage=cfg.coverage)
    return RunReport(cfg, tuple(names), tuple(records), agg_columns,
                     aggregates, tuple(failures))


# --- CSV plumbing --------------------------------------------------------

def _fmt(value):
    if isinstance(value, bool):
        raise TypeError("booleans have no CSV encoding here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def seeds_csv_path(path):
    """Path of the per-seed raw file that accompanies ``path``."""
    base, ext = os.path.splitext(os.fspath(path))
    return base + "_seeds" + (ext or ".csv")


def emit_csv(report, path):
    """Write aggregate CSV at ``path`` and per-seed raw records beside it.

    Both files are RFC-4180 style (CRLF, minimal quoting, one header
    row).  Floats are serialized with repr so re-parsing reproduces them
    bit-exactly; failed seeds appear in the per-seed file as rows with
    an error message and empty data cells.  Returns (path, seeds_path).
    """
    path = os.fspath(path)
    seeds_path = seeds_csv_path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(report.agg_columns)
        for row in report.aggregates:
            writer.writerow([_fmt(v) for v in row])
    with open(seeds_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(report.columns) + ["error"])
        rows = {rec[0]: rec for rec in report.records}
        errors = dict(report.failures)
        for seed in sorted(set(rows) | set(errors)):
            if seed in rows:
                writer.writerow([_fmt(v) for v in rows[seed]] + [""])
            else:
                writer.writerow([_fmt(seed)]
                                + [""] * (len(report.columns) - 1)
                                + [errors[seed]])
    return path, seeds_path


def read_csv(path):
    """(header, rows) of a CSV file, all cells as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return header, list(reader)


def records_from_seeds_csv(kind, path):
    """Typed per-seed record dicts plus (seed, error) failures."""
    spec = SEED_COLUMNS[kind]
    header, rows = read_csv(path)
    expected = [name for name, _ in spec] + ["error"]
    if header != expected:
        raise ValueError(f"unexpected header {header!r}")
    records = []
    failures = []
    for row in rows:
        if row[-1]:
            failures.append((int(row[0]), row[-1]))
            continue
        records.append({name: typ(cell)
                        for (name, typ), cell in zip(spec, row)})
    return records, failures
