"""
Experiment configuration files.

A config is a JSON object::

    {
      "name": "unit_weight_norms",
      "dimension": 2,
      "seed": 0,
      "output_dir": "out",
      "measures": {"eta": {"type": "radial_density", "beta": 1.0}},
      "weight": {"type": "potential_harmonic", "q": 0, "s": 0,
                 "mu": {"type": "zero"}, "nu": {"type": "uniform_boundary", "mass": 1}},
      "model": {"degree_cap": 12, "rule": {"radial_order": 64, "sphere_count": 4096}},
      "sweeps": [{"type": "norm_estimate", "grid": {"radial_levels": [0.1, 0.3, 0.5]}}]
    }

``weight.mu`` / ``weight.nu`` and sweep ``eta`` entries may name a measure
declared under ``measures``.  :func:`validate_config` lists every problem
without running anything.
"""

from dataclasses import dataclass, field
import hashlib
import json

from . import geometry as geo
from . import measures as ms
from . import model as md
from . import quadrature as qd
from . import weights as wt
from .lab import GridSpec
from .errors import ValidationError

SWEEP_TYPES = ("norm_estimate", "local_kernel_equivalence", "pointwise_decay",
               "difference_bound", "carleson", "embedding", "test_function",
               "forelli_rudin", "comparability", "hessian")
KERNEL_SWEEPS = ("norm_estimate", "local_kernel_equivalence", "pointwise_decay",
                 "difference_bound")


@dataclass
class ExperimentConfig:
    name: str
    dimension: int
    weight: object
    measures: dict
    degree_cap: int
    rule: object
    sweeps: list
    seed: int = 0
    output_dir: str = "out"
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def config_hash(self):
        return config_hash(self.raw)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(raw):
    """SHA-256 of the canonical JSON form, first 16 hex digits."""
    return hashlib.sha256(canonical_json(raw).encode()).hexdigest()[:16]


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc


def _sweep_problems(i, sw, n, weight, measures):
    tag = f"sweep[{i}]"
    out = []
    if not isinstance(sw, dict):
        return [f"{tag}: sweep descriptor must be an object"]
    kind = sw.get("type")
    if kind not in SWEEP_TYPES:
        return [f"{tag}: unknown sweep type {kind!r} (expected one of {', '.join(SWEEP_TYPES)})"]
    tag = f"{tag} ({sw.get('name', kind)})"

    def positive(key, default=None):
        v = sw.get(key, default)
        if not (isinstance(v, (int, float)) and v > 0):
            out.append(f"{tag}: {key} must be positive, got {v!r}")

    def unit_interval(key, default=None):
        v = sw.get(key, default)
        if not (isinstance(v, (int, float)) and 0 < v < 1):
            out.append(f"{tag}: {key} must lie in (0, 1), got {v!r}")

    def levels(key):
        lv = sw["grid"].get("radial_levels") if key == "grid" else sw.get(key)
        try:
            if lv is None:
                raise ValidationError(f"{key} missing")
            GridSpec(tuple(lv), 1, 0)
        except (ValidationError, TypeError, ValueError) as exc:
            out.append(f"{tag}: {exc}")

    if kind in ("norm_estimate", "local_kernel_equivalence", "carleson"):
        grid = sw.get("grid")
        if not isinstance(grid, dict):
            out.append(f"{tag}: needs a grid object")
        else:
            levels("grid")
    if kind in ("local_kernel_equivalence", "difference_bound", "carleson", "comparability"):
        unit_interval("r")
    if kind == "pointwise_decay":
        unit_interval("t_decay")
    if kind in ("carleson", "embedding"):
        positive("p")
        positive("p_tilde")
        ref = sw.get("eta")
        if isinstance(ref, str):
            if ref not in measures:
                out.append(f"{tag}: unknown measure name {ref!r}")
            elif not isinstance(measures[ref], (ms.AtomicBall, ms.RadialDensity)):
                out.append(f"{tag}: eta must be a ball measure")
        elif ref is None:
            out.append(f"{tag}: eta is required")
    if kind in ("embedding", "test_function"):
        positive("t")
        positive("p")
        levels("levels")
        t = sw.get("t")
        if weight is not None and isinstance(t, (int, float)):
            for msg in md.test_function_problems(t, weight, n):
                out.append(f"{tag}: {msg}")
    if kind == "forelli_rudin":
        levels("levels")
        q, t = sw.get("q", 0.0), sw.get("t")
        if not isinstance(t, (int, float)):
            out.append(f"{tag}: t is required")
        elif not 2 * n + t > n + 1 + q:
            out.append(f"{tag}: need 2n + t > n + 1 + q, got t={t}, q={q}")
    if kind == "comparability":
        levels("levels")
    return out


def _resolve_measures(obj, n, diags):
    measures = {}
    if not isinstance(obj, dict):
        diags.append("measures must be an object mapping names to measure specs")
        return measures
    for name, spec in obj.items():
        try:
            measures[name] = ms.measure_from_json(spec, n)
        except (ValidationError, KeyError, TypeError, ValueError) as exc:
            diags.append(f"measure {name!r}: {exc}")
    return measures


def _resolve_weight(obj, n, measures, diags):
    if not isinstance(obj, dict):
        diags.append("weight must be an object")
        return None
    if obj.get("type") == "potential_harmonic":
        def measure(ref):
            if ref is None:
                return ms.ZERO
            if isinstance(ref, str):
                if ref not in measures:
                    diags.append(f"weight: unknown measure name {ref!r}")
                    return None
                return measures[ref]
            try:
                return ms.measure_from_json(ref, n)
            except (ValidationError, KeyError, TypeError, ValueError) as exc:
                diags.append(f"weight: {exc}")
                return None
        mu, nu = measure(obj.get("mu")), measure(obj.get("nu"))
        if mu is None or nu is None:
            return None
        q, s = float(obj.get("q", 0.0)), float(obj.get("s", 1.0))
        problems = wt.potential_harmonic_problems(mu, q, s, nu)
        if problems:
            diags.extend(f"weight: {p}" for p in problems)
            return None
        return wt.PotentialHarmonic(mu, q, s, nu)
    try:
        return wt.weight_from_json(obj, n, measures)
    except (ValidationError, KeyError, TypeError, ValueError) as exc:
        diags.append(f"weight: {exc}")
        return None


def parse_config(raw):
    """``(config, diagnostics)``; ``config`` is None when anything is invalid."""
    diags = []
    if not isinstance(raw, dict):
        return None, ["config must be a JSON object"]
    n = raw.get("dimension")
    try:
        n = geo.check_dimension(n)
    except ValueError as exc:
        return None, [str(exc)]
    measures = _resolve_measures(raw.get("measures", {}), n, diags)
    weight = _resolve_weight(raw.get("weight"), n, measures, diags)
    model_obj = raw.get("model", {}) or {}
    N = model_obj.get("degree_cap", md.DEFAULT_DEGREE[n])
    if not (isinstance(N, int) and N >= 1):
        diags.append(f"model.degree_cap must be an integer >= 1, got {N!r}")
    rule = None
    try:
        rule = qd.rule_from_json(model_obj.get("rule", {}), n)
    except (TypeError, ValueError) as exc:
        diags.append(f"model.rule: {exc}")
    sweeps = raw.get("sweeps")
    if not isinstance(sweeps, list) or not sweeps:
        diags.append("sweeps must be a nonempty list")
        sweeps = []
    for i, sw in enumerate(sweeps):
        diags.extend(_sweep_problems(i, sw, n, weight, measures))
    names = [sweep_name(i, sw) for i, sw in enumerate(sweeps) if isinstance(sw, dict)]
    dupes = sorted({x for x in names if names.count(x) > 1})
    if dupes:
        diags.append(f"duplicate sweep names: {', '.join(dupes)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        diags.append(f"seed must be a nonnegative integer, got {seed!r}")
    if diags:
        return None, diags
    cfg = ExperimentConfig(str(raw.get("name", "experiment")), n, weight, measures, N, rule,
                           sweeps, seed, str(raw.get("output_dir", "out")), raw)
    return cfg, []


def sweep_name(i, sw):
    return str(sw.get("name") or f"{sw.get('type')}_{i}")


def validate_config(path):
    """All diagnostics for the config at ``path``; an empty list means valid."""
    try:
        raw = load_json(path)
    except ValidationError as exc:
        return [str(exc)]
    return parse_config(raw)[1]


def load_config(path):
    """Parse and validate; raises :class:`ValidationError` listing every problem."""
    cfg, diags = parse_config(load_json(path))
    if diags:
        raise ValidationError("\n".join(diags))
    return cfg
