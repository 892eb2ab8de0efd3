"""Driving the ``fdm`` command line from files.

Writes a function and a measure as JSON, then runs a few verbs and shows the
exit codes: 0 success, 1 usage, 2 invalid input, 3 no convergence.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def fdm(*args):
    proc = subprocess.run([sys.executable, "-m", "fdm.cli", *args], capture_output=True, text=True)
    out = (proc.stdout or proc.stderr).strip()
    print(f"$ fdm {' '.join(args)}\n  [{proc.returncode}] {out}")


with tempfile.TemporaryDirectory() as d:
    d = Path(d)
    (d / "quad.json").write_text(json.dumps({"kind": "quadratic", "dim": 1, "A": [[1.0]], "b": [0.0], "c": 0.0}))
    (d / "two.json").write_text(json.dumps({"kind": "measure", "dim": 1,
                                            "atoms": [{"x": [-1], "w": 0.5}, {"x": [1], "w": 0.5}]}))
    (d / "line.json").write_text(json.dumps({"kind": "measure", "dim": 2,
                                             "atoms": [{"x": [1, 0], "w": 1}, {"x": [-1, 0], "w": 1}]}))
    fdm("quermass", "--fn", str(d / "quad.json"), "--q", "-2")
    fdm("solve", "--measure", str(d / "two.json"), "--q", "-1", "--out", str(d / "sol.json"))
    fdm("verify", "--measure", str(d / "two.json"), "--fn", str(d / "sol.json"), "--q", "-1")
    fdm("solve", "--measure", str(d / "line.json"), "--q", "0")
    fdm("check", "pl", "--battery", "default")
    fdm("frobnicate")
