"""
Running a configured experiment
===============================

A JSON config names a weight, a model resolution and a list of sweeps.
The same run is available as ``blab run CONFIG``; here it is driven from
Python and the CSV output is checked for byte-identical reruns.
"""

import os
import tempfile

from bergman_lab import config as cf
from bergman_lab import report as rp

here = os.path.dirname(os.path.abspath(__file__)) if "__file__" in globals() else "demos"
cfg_path = os.path.join(here, "configs", "three_atoms.json")

# %%
# Validation lists every problem at once; a valid config gives an empty list.
print("three_atoms:", cf.validate_config(cfg_path))
print("invalid_q:", cf.validate_config(os.path.join(here, "configs", "invalid_q.json")))

# %%
# Run twice into separate directories and compare the CSV bytes.
outputs = []
with tempfile.TemporaryDirectory() as tmp:
    for run in ("first", "second"):
        cfg = cf.load_config(cfg_path)
        report = rp.run_experiment(cfg, out_dir=os.path.join(tmp, run))
        with open(report.csv_path, "rb") as fh:
            outputs.append(fh.read())
    for s in report.series:
        print(f"{s.name:12s} sup={s.sup:.6g} inf={s.inf:.6g} verdict={s.verdict}")
    print("config hash", report.config_hash)
print("byte-identical:", outputs[0] == outputs[1])
