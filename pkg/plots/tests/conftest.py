"""Generate real rabispec output files once per session via its CLI."""
import subprocess
import sys

import pytest


def run_rabispec(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "rabispec.cli"] + args,
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("rabispec-data")
    run_rabispec(["spectrum", "--delta", "1.2", "--epsilon", "0.3",
                  "--g", "0.05:1.2:40", "--levels", "6",
                  "--baseline-rows", "4", "--out", "sweep.csv"], d)
    run_rabispec(["exceptional", "--delta", "1.2", "--epsilon", "0.3",
                  "--n", "1,2", "--branches", "plus,minus",
                  "--g-window", "0.0125:1.2", "--no-verify",
                  "--out", "points.json"], d)
    run_rabispec(["curves", "--epsilon", "0.3", "--baselines", "1+,1-",
                  "--delta-range", "0:2:61", "--g-range", "0.02:1:61",
                  "--out", "biased"], d)
    run_rabispec(["curves", "--epsilon", "0", "--baselines", "0+,1+,2+,3+",
                  "--delta-range", "0:4:61", "--g-range", "0.02:2:61",
                  "--out", "symmetric"], d)
    return d
