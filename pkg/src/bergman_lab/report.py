"""
Experiment orchestration and report files.

``run_experiment`` builds (or loads) the model once, runs the configured
sweeps, checks their invariants and writes

* ``<name>.csv`` -- header comment ``# blab-csv v1`` then rows
  ``experiment,parameter,value,ratio,stderr``; floats use ``repr`` so a rerun
  with the same config and seed is byte-identical;
* ``<name>.json`` -- one summary per sweep (sup, inf, verdict, config hash,
  schema version) plus the runtime.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import csv
import io
import json
import logging
import math
import os
import time

import numpy as np

from . import cache
from . import config as cf
from . import geometry as geo
from . import lab
from . import measures as ms
from . import weights as wt
from .errors import InvariantViolation, ValidationError

log = logging.getLogger(__name__)

CSV_HEADER = "# blab-csv v1"
CSV_COLUMNS = ("experiment", "parameter", "value", "ratio", "stderr")
SCHEMA_VERSION = 1
CAUCHY_SCHWARZ_SLACK = 1e-10
HESSIAN_TOL = 1e-10
HESSIAN_FD_TOL = 1e-5


@dataclass
class ExperimentReport:
    name: str
    config_hash: str
    series: list
    verdicts: dict
    runtime_seconds: float
    csv_path: str = None
    json_path: str = None


def sweep_seed(seed, index):
    """Per-sweep seed derived from the experiment seed and the sweep position."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def _grid(sw, seed):
    g = sw.get("grid") or {}
    return lab.GridSpec(tuple(g["radial_levels"]), int(g.get("directions_per_level", 1)),
                        int(g.get("seed", seed)))


def _hessian_series(sw, n, seed):
    count = int(sw.get("pair_count", 50))
    radius = float(sw.get("radius", 0.8))
    params, ratios, values = [], [], []
    inv_sum = 0.0
    for i in range(count):
        rng = lab.task_rng(seed, i)
        z = geo.sample_ball(n, 1, rng, radius=radius)[0]
        w = geo.sample_ball(n, 1, rng, radius=radius)[0]
        t = float(rng.uniform(0.05, 0.95))
        chk = lab.hessian_inverse_check(z, w, t)
        params.append(t)
        ratios.append(chk.identity_residual)
        values.append(chk.finite_difference_error)
        inv_sum = max(inv_sum, chk.inverse_sum_residual)
    return lab.RatioSeries("hessian", params, ratios, values,
                           meta={"inverse_sum_residual": inv_sum})


def run_sweep(sw, index, cfg, get_model):
    """Run one configured sweep and return its :class:`RatioSeries`."""
    kind = sw["type"]
    seed = sweep_seed(cfg.seed, index)
    n, spec = cfg.dimension, cfg.weight
    eta = sw.get("eta")
    if isinstance(eta, str):
        eta = cfg.measures[eta]
    elif isinstance(eta, dict):
        eta = ms.measure_from_json(eta, n)
    if kind == "norm_estimate":
        s = lab.norm_estimate_sweep(get_model(), _grid(sw, seed))
    elif kind == "local_kernel_equivalence":
        s = lab.local_kernel_equivalence_sweep(get_model(), float(sw["r"]), _grid(sw, seed),
                                               a_r=sw.get("a_r"),
                                               pairs_per_center=int(sw.get("pairs_per_center", 8)))
    elif kind == "pointwise_decay":
        s = lab.pointwise_decay_sweep(get_model(), float(sw["t_decay"]),
                                      int(sw.get("pair_count", 400)), seed)
    elif kind == "difference_bound":
        s = lab.difference_bound_sweep(get_model(), float(sw["r"]),
                                       int(sw.get("trial_count", 1000)), seed, a_r=sw.get("a_r"))
    elif kind == "carleson":
        s = lab.carleson_ratio_sweep(eta, spec, float(sw["p"]), float(sw["p_tilde"]),
                                     float(sw["r"]), _grid(sw, seed), n=n)
    elif kind == "embedding":
        family = lab.test_function_family(sw["levels"], float(sw["t"]), float(sw["p"]), n, seed)
        model = None if wt.is_radial(spec) else get_model()
        s = lab.embedding_ratio_sweep(eta, spec, float(sw["p"]), float(sw["p_tilde"]), family, model)
    elif kind == "test_function":
        norms, peaks = lab.test_function_sweep(spec, float(sw["t"]), float(sw["p"]), sw["levels"], n,
                                               z_radius=float(sw.get("z_radius", 0.5)), seed=seed)
        s = lab.RatioSeries("test_function", norms.parameters, norms.ratios, peaks.ratios,
                            verdict=norms.verdict, meta={**norms.meta, **peaks.meta})
    elif kind == "forelli_rudin":
        s = lab.forelli_rudin_slope(float(sw.get("q", 0.0)), float(sw["t"]), n, sw["levels"], cfg.rule)
    elif kind == "comparability":
        s = lab.comparability_sweep(spec, sw["levels"], float(sw["r"]),
                                    int(sw.get("sample_count", 2000)), seed, n=n)
    elif kind == "hessian":
        s = _hessian_series(sw, n, seed)
    else:
        raise ValidationError(f"unknown sweep type {kind!r}")
    s.name = cf.sweep_name(index, sw)
    s.meta["type"] = kind
    return s


def check_invariants(series):
    """Raise :class:`InvariantViolation` when a sweep breaks a proven inequality."""
    kind = series.meta.get("type")
    if not np.all(np.isfinite(series.ratios)):
        raise InvariantViolation(f"{series.name}: non-finite ratios")
    if kind == "norm_estimate" and not np.all(series.ratios > 0):
        raise InvariantViolation(f"{series.name}: nonpositive norm ratio")
    if kind == "local_kernel_equivalence" and series.sup > 1 + CAUCHY_SCHWARZ_SLACK:
        raise InvariantViolation(f"{series.name}: Cauchy-Schwarz ceiling exceeded ({series.sup!r})")
    if kind == "difference_bound" and series.sup > series.meta["bound"]:
        raise InvariantViolation(
            f"{series.name}: sup {series.sup!r} exceeds bound {series.meta['bound']!r}")
    if kind == "hessian":
        if series.sup >= HESSIAN_TOL or series.meta["inverse_sum_residual"] >= HESSIAN_TOL:
            raise InvariantViolation(f"{series.name}: Hessian inverse residual {series.sup!r}")
        if np.max(series.values) >= HESSIAN_FD_TOL:
            raise InvariantViolation(f"{series.name}: finite-difference Hessian mismatch")


# ---------------------------------------------------------------- files

def _fmt(x):
    x = float(x)
    return repr(x) if math.isfinite(x) or math.isnan(x) else ("inf" if x > 0 else "-inf")


def series_rows(series):
    for p, v, r, e in zip(series.parameters, series.values, series.ratios, series.stderr):
        yield (series.name, _fmt(p), _fmt(v), _fmt(r), _fmt(e))


def csv_text(series_list):
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in series_list:
        writer.writerows(series_rows(s))
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def series_summary(series, chash):
    return _jsonable({"name": series.name, "type": series.meta.get("type"), "sup": series.sup,
                      "inf": series.inf, "verdict": series.verdict, "config_hash": chash,
                      "schema_version": SCHEMA_VERSION, "meta": series.meta})


def write_report(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    report.csv_path = os.path.join(out_dir, f"{report.name}.csv")
    report.json_path = os.path.join(out_dir, f"{report.name}.json")
    with open(report.csv_path, "w", newline="") as fh:
        fh.write(csv_text(report.series))
    summary = {"name": report.name, "config_hash": report.config_hash,
               "schema_version": SCHEMA_VERSION,
               "runtime_seconds": report.runtime_seconds,
               "series": [series_summary(s, report.config_hash) for s in report.series]}
    with open(report.json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def read_csv(path):
    """Rows of a report CSV (header comment and column row checked)."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_HEADER:
            raise ValidationError(f"{path}: expected header {CSV_HEADER!r}, got {first!r}")
        reader = csv.reader(fh)
        cols = next(reader, None)
        if tuple(cols or ()) != CSV_COLUMNS:
            raise ValidationError(f"{path}: unexpected columns {cols!r}")
        return [tuple(row) for row in reader]


def merge_csv(paths):
    """One CSV text holding the rows of every report, in argument order."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in paths:
        writer.writerows(read_csv(p))
    return buf.getvalue()


# ---------------------------------------------------------------- run

def run_experiment(cfg, out_dir=None, seed=None, threads=1, cache_path=None):
    """
    Run every sweep of ``cfg``; returns the written :class:`ExperimentReport`.

    Sweeps may run on ``threads`` workers; the report is assembled in
    declaration order, so output does not depend on scheduling.
    """
    start = time.perf_counter()
    raw = dict(cfg.raw)
    if seed is not None:
        cfg.seed = int(seed)
        raw["seed"] = int(seed)
    chash = cf.config_hash(raw)
    cache_path = cache_path or (cfg.raw.get("model") or {}).get("cache")
    needs_model = any(sw["type"] in cf.KERNEL_SWEEPS for sw in cfg.sweeps) or (
        not wt.is_radial(cfg.weight) and any(sw["type"] == "embedding" for sw in cfg.sweeps))
    model = cache.load_or_build(cache_path, cfg.weight, cfg.degree_cap, cfg.rule) if needs_model else None
    get_model = lambda: model

    jobs = list(enumerate(cfg.sweeps))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            series = list(pool.map(lambda job: run_sweep(job[1], job[0], cfg, get_model), jobs))
    else:
        series = [run_sweep(sw, i, cfg, get_model) for i, sw in jobs]
    for s in series:
        log.info("sweep %s: sup=%.6g inf=%.6g verdict=%s", s.name, s.sup, s.inf, s.verdict)
    report = ExperimentReport(cfg.name, chash, series, {s.name: s.verdict for s in series},
                              time.perf_counter() - start)
    write_report(report, out_dir or cfg.output_dir)
    for s in series:
        check_invariants(s)
    return report
