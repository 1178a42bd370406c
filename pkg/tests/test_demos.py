import subprocess
import sys
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.mark.parametrize("script, args", [
    ("hidden_vehicle.py", []),
    ("classification.py", []),
    ("rss_scan.py", []),
    ("toa_vs_pdoa.py", ["--trials", "3"]),
])
def test_demo_runs(script, args, tmp_path):
    svg = [] if script == "hidden_vehicle.py" else ["--plot", str(tmp_path / "fig.svg")]
    out = subprocess.run([sys.executable, str(DEMOS / script), *args, *svg],
                         capture_output=True, text=True, timeout=300)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip()
