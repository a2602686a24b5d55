import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))  # for oracle.py

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def genesis_hex() -> str:
    return (FIXTURES / "genesis_header.hex").read_text().strip()


@pytest.fixture(scope="session")
def genesis_bytes(genesis_hex) -> bytes:
    return bytes.fromhex(genesis_hex)
