import json
import math
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from bergman_lab import cache
from bergman_lab import cli
from bergman_lab import config as cf
from bergman_lab import lab
from bergman_lab import model as md
from bergman_lab import quadrature as qd
from bergman_lab import report as rp
from bergman_lab import weights as wt
from bergman_lab.errors import CacheMismatchError

from conftest import three_atom_spec

ATOMS_JSON = {"type": "atomic_ball", "atoms": [
    {"point": [[0.8, 0.0], [0.0, 0.0]], "mass": 1.0},
    {"point": [[0.0, 0.0], [0.0, 0.8]], "mass": 1.0},
    {"point": [[-0.5, 0.0], [-0.6, 0.0]], "mass": 1.0}]}


def small_config(**overrides):
    raw = {
        "name": "small",
        "dimension": 2,
        "seed": 5,
        "measures": {"atoms": ATOMS_JSON, "eta": {"type": "radial_density", "beta": 1.0}},
        "weight": {"type": "potential_harmonic", "q": 0, "s": 1, "mu": "atoms",
                   "nu": {"type": "uniform_boundary", "mass": 1.0}},
        "model": {"degree_cap": 6, "rule": {"radial_order": 32, "sphere_count": 1024}},
        "sweeps": [
            {"type": "norm_estimate", "name": "norms", "grid": {"radial_levels": [0.1, 0.3, 0.5]}},
            {"type": "local_kernel_equivalence", "name": "local", "r": 0.5,
             "grid": {"radial_levels": [0.2, 0.4]}},
            {"type": "pointwise_decay", "name": "decay", "t_decay": 0.5, "pair_count": 20},
            {"type": "difference_bound", "name": "diff", "r": 0.5, "trial_count": 20},
            {"type": "carleson", "name": "carleson", "eta": "eta", "p": 2, "p_tilde": 2, "r": 0.5,
             "grid": {"radial_levels": [0.5, 0.9, 0.99]}},
            {"type": "hessian", "name": "hessian", "pair_count": 5},
            {"type": "comparability", "name": "comp", "r": 0.5, "levels": [0.3, 0.6, 0.9],
             "sample_count": 50},
        ],
    }
    raw.update(overrides)
    return raw


def write(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def test_parse_point():
    np.testing.assert_allclose(cli.parse_point("0.5,0.3j"), [0.5, 0.3j])
    np.testing.assert_allclose(cli.parse_point("0.1+0.2j, -0.4"), [0.1 + 0.2j, -0.4])


def test_validate_ok(tmp_path, capsys):
    path = write(tmp_path, small_config())
    assert cf.validate_config(path) == []
    assert cli.main(["validate", path]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_reports_every_problem(tmp_path, capsys):
    raw = small_config()
    raw["weight"] = dict(raw["weight"], q=-3)
    raw["sweeps"] = raw["sweeps"] + [
        {"type": "embedding", "name": "emb", "eta": "eta", "p": 2, "p_tilde": 2, "t": 1.0,
         "levels": [0.5, 0.9]},
        {"type": "pointwise_decay", "name": "bad_t", "t_decay": 1.5},
        {"type": "warp"},
    ]
    diags = cf.validate_config(write(tmp_path, raw))
    text = "\n".join(diags)
    assert "q=-3" in text and "t_decay" in text and "warp" in text
    raw["weight"] = dict(raw["weight"], q=0)
    diags = cf.validate_config(write(tmp_path, raw))
    assert any("t + q" in d for d in diags)
    assert cli.main(["validate", write(tmp_path, raw)]) == 2


def test_validate_atom_outside_ball(tmp_path):
    raw = small_config()
    raw["measures"]["atoms"] = {"type": "atomic_ball", "atoms": [
        {"point": [[0.9, 0.0], [0.9, 0.0]], "mass": 1.0}]}
    diags = cf.validate_config(write(tmp_path, raw))
    assert any("atoms" in d for d in diags)


def test_validate_unreadable(tmp_path):
    assert cf.validate_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert "not valid JSON" in cf.validate_config(str(bad))[0]


def test_invalid_config_exit_code(tmp_path, capsys):
    raw = small_config()
    raw["weight"] = dict(raw["weight"], q=-3)
    assert cli.main(["run", write(tmp_path, raw), "--out", str(tmp_path / "o")]) == 2
    assert "q=-3" in capsys.readouterr().err


def test_guard_exit_code(tmp_path, capsys):
    raw = small_config(model={"degree_cap": 12, "rule": {"radial_order": 4, "sphere_count": 16}})
    assert cli.main(["run", write(tmp_path, raw), "--out", str(tmp_path / "o")]) == 3
    assert "condition" in capsys.readouterr().err


def test_invariant_exit_code(tmp_path, monkeypatch, capsys):
    real = lab.local_kernel_equivalence_sweep

    def broken(*args, **kwargs):
        s = real(*args, **kwargs)
        s.ratios = s.ratios * 1.5
        return s

    monkeypatch.setattr(lab, "local_kernel_equivalence_sweep", broken)
    assert cli.main(["run", write(tmp_path, small_config()), "--out", str(tmp_path / "o")]) == 4
    assert "Cauchy-Schwarz" in capsys.readouterr().err
    # the report is still written so the offending data can be inspected
    assert os.path.exists(tmp_path / "o" / "small.csv")


def test_run_byte_identical(tmp_path, capsys):
    path = write(tmp_path, small_config())
    assert cli.main(["run", path, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["run", path, "--out", str(tmp_path / "b"), "--threads", "3"]) == 0
    a = (tmp_path / "a" / "small.csv").read_bytes()
    b = (tmp_path / "b" / "small.csv").read_bytes()
    assert a == b and a.startswith(b"# blab-csv v1\nexperiment,parameter,value,ratio,stderr\n")
    assert cli.main(["run", path, "--out", str(tmp_path / "c"), "--seed", "6"]) == 0
    assert (tmp_path / "c" / "small.csv").read_bytes() != a


def test_run_summary_json(tmp_path):
    path = write(tmp_path, small_config())
    assert cli.main(["run", path, "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "small.json").read_text())
    assert summary["config_hash"] == cf.config_hash(small_config())
    names = [s["name"] for s in summary["series"]]
    assert names == [sw["name"] for sw in small_config()["sweeps"]]
    for s in summary["series"]:
        assert {"sup", "inf", "verdict", "config_hash", "schema_version"} <= set(s)
    rows = rp.read_csv(str(tmp_path / "o" / "small.csv"))
    assert {r[0] for r in rows} == set(names)
    assert all(math.isfinite(float(r[3])) for r in rows)


def test_cache_roundtrip_and_tamper(tmp_path):
    rule = qd.ProductRule(2, 32, 1024)
    spec = three_atom_spec()
    model = md.build_model(spec, 6, rule)
    path = str(tmp_path / "m.json")
    cache.store(model, path)
    back = cache.load(path, spec, 6, rule)
    z = np.array([[0.3, 0.2j], [0.5, -0.1]])
    assert np.array_equal(back.kernel(z, z[::-1]), model.kernel(z, z[::-1]))
    with pytest.raises(CacheMismatchError):
        cache.load(path, wt.unit_weight(2), 6, rule)
    payload = json.loads(open(path).read())
    payload["gram"][1][0] += 1e-9
    open(path, "w").write(json.dumps(payload))
    with pytest.raises(CacheMismatchError, match="content hash"):
        cache.load(path)


def test_cache_hit_via_cli(tmp_path, caplog):
    raw = small_config()
    path = write(tmp_path, raw)
    cpath = str(tmp_path / "model.json")
    assert cli.main(["kernel", "build", path, "--cache", cpath]) == 0
    assert os.path.exists(cpath)
    with caplog.at_level("INFO", logger="bergman_lab.cache"):
        assert cli.main(["run", path, "--out", str(tmp_path / "a"), "--cache", cpath]) == 0
    assert any("cache hit" in r.message for r in caplog.records)
    assert cli.main(["run", path, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "small.csv").read_bytes() == (tmp_path / "b" / "small.csv").read_bytes()


def test_cache_tamper_exit_code(tmp_path):
    raw = small_config()
    path = write(tmp_path, raw)
    cpath = tmp_path / "model.json"
    assert cli.main(["kernel", "build", path, "--cache", str(cpath)]) == 0
    cpath.write_text(cpath.read_text().replace('"degree_cap": 6', '"degree_cap": 5'))
    assert cli.main(["run", path, "--out", str(tmp_path / "a"), "--cache", str(cpath)]) == 2


def test_report_merge(tmp_path, capsys):
    path = write(tmp_path, small_config())
    assert cli.main(["run", path, "--out", str(tmp_path / "a")]) == 0
    raw2 = small_config(name="other", seed=9)
    assert cli.main(["run", write(tmp_path, raw2, "b.json"), "--out", str(tmp_path / "b")]) == 0
    a, b = str(tmp_path / "a" / "small.csv"), str(tmp_path / "b" / "other.csv")
    out = str(tmp_path / "merged.csv")
    assert cli.main(["report", a, b, "--out", out]) == 0
    assert rp.read_csv(out) == rp.read_csv(a) + rp.read_csv(b)
    bogus = tmp_path / "bogus.csv"
    bogus.write_text("x,y\n")
    assert cli.main(["report", str(bogus)]) == 2


@pytest.mark.parametrize("argv,key,want", [
    (["pseudo-hyperbolic", "0,0", "0.5,0"], "gamma", 0.5),
    (["bergman-metric", "0,0", "0.6,0"], "beta", math.log(2)),
    (["volume", "0,0", str(math.atanh(0.5))], "volume", 0.0625),
    (["in-ball", "0,0", "1.0", "0.9,0"], "inside", False),
    (["green", "0.5,0"], "g", 0.75 * (2 - 0.5 + math.log(0.5))),
    (["ellipsoid", "0.5,0", "0.5"], "t_param", 0.8),
    (["inclusion", "0.5", "2"], "big_c", 1 / math.cosh(0.5) ** 2 / 4),
])
def test_geometry_subcommands(argv, key, want, capsys):
    assert cli.main(["geometry"] + argv) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[key] == pytest.approx(want, abs=1e-12)


def test_geometry_involution_and_errors(capsys):
    assert cli.main(["geometry", "involution", "0.5,0", "0.5,0"]) == 0
    phi = json.loads(capsys.readouterr().out)["phi"]
    assert np.allclose(phi, 0.0)
    assert cli.main(["geometry", "pseudo-hyperbolic", "0,0", "1.5,0"]) == 2
    assert cli.main(["geometry", "green", "0,0"]) == 2


@pytest.mark.skipif(shutil.which("blab") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["blab", "geometry", "pseudo-hyperbolic", "0,0", "0.5,0"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == {"gamma": 0.5}


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bergman_lab.cli", "geometry", "green", "1,0"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == {"g": 0.0}
