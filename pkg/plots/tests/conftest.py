import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PLOTS_DIR))

GOLDEN = PLOTS_DIR.parent / "artifacts" / "golden"


@pytest.fixture(scope="session")
def golden_root() -> Path:
    if not GOLDEN.exists():
        pytest.skip("golden artifacts not present; run scripts/make_golden_artifacts.py")
    return GOLDEN
