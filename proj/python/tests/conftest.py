import json
import os
import subprocess
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    exe = os.environ.get("BWT_CLI", str(ROOT / "build" / "bwt"))
    if not Path(exe).exists():
        pytest.skip("bwt executable not built")

    def run(*args, expect=0):
        proc = subprocess.run([exe, *map(str, args)], capture_output=True, text=True)
        assert proc.returncode == expect, proc.stderr
        return json.loads(proc.stdout) if expect == 0 else proc

    return run


@pytest.fixture(scope="session")
def schemas():
    d = Path(os.environ.get("BWT_SCHEMAS", ROOT / "schemas"))
    return {p.name.split(".")[0]: json.loads(p.read_text()) for p in d.glob("*.schema.json")}


@pytest.fixture
def write_matrix(tmp_path):
    def write(name, m):
        path = tmp_path / name
        path.write_text(json.dumps({"matrix": [list(map(float, row)) for row in m]}))
        return path

    return write
