import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize(
    "name",
    ["cheeger_examples", "interval_oracles", "large_alpha_limit", pytest.param("small_alpha_limit", marks=pytest.mark.slow)],
)
def test_script_matches_expected(name, tmp_path):
    proc = subprocess.run(
        [sys.executable, str(SCRIPTS / f"{name}.py"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        timeout=900,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "OK" in proc.stdout
