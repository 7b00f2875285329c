import os
from pathlib import Path

import numpy as np
import pytest

# EuStockMarkets is not redistributable here; point STABLEFIT_EUSTOCKS at a
# CSV export (columns DAX, SMI, CAC, FTSE) to enable the regression tests
# that need it, or drop the file at tests/data/EuStockMarkets.csv.
_EUSTOCKS_ENV = "STABLEFIT_EUSTOCKS"
_EUSTOCKS_DEFAULT = Path(__file__).parent / "data" / "EuStockMarkets.csv"


def eustocks_path() -> Path | None:
    env = os.environ.get(_EUSTOCKS_ENV)
    if env and Path(env).exists():
        return Path(env)
    if _EUSTOCKS_DEFAULT.exists():
        return _EUSTOCKS_DEFAULT
    return None


@pytest.fixture
def eustocks():
    path = eustocks_path()
    if path is None:
        pytest.skip(
            "EuStockMarkets CSV not supplied (set STABLEFIT_EUSTOCKS or add "
            "tests/data/EuStockMarkets.csv); skipping real-data regression"
        )
    return path


@pytest.fixture
def rng_np():
    return np.random.default_rng(20240811)
