"""Pytest configuration and fixtures."""

import tempfile
from pathlib import Path
from typing import Generator

import pytest

from src.hgsa.hilbert import ModeSpec
from src.hgsa.protocol import HgsaAnalyzer
from src.hgsa.states import make_hyper, parse_label


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def mock_env_file(temp_dir: Path) -> Path:
    """Create a mock .env file."""
    env_file = temp_dir / ".env"
    env_file.write_text(
        """HGSA_PHOTONS=4
HGSA_SHOTS=25
HGSA_SEED=42
HGSA_FORMAT=json
HGSA_WORKERS=2
HGSA_MAX_CANDIDATES=500
"""
    )
    return env_file


@pytest.fixture(autouse=True)
def isolate_env(monkeypatch):
    """Isolate tests from actual environment variables."""
    config_keys = [
        "HGSA_PHOTONS",
        "HGSA_SHOTS",
        "HGSA_SEED",
        "HGSA_FORMAT",
        "HGSA_WORKERS",
        "HGSA_MAX_CANDIDATES",
    ]
    for key in config_keys:
        monkeypatch.delenv(key, raising=False)


@pytest.fixture
def spec3() -> ModeSpec:
    """Three photons on the default 4-slot, 2-path lattice."""
    return ModeSpec(3)


@pytest.fixture
def hyper_state(spec3):
    """P+001,T-010 on three photons, every photon on path x1."""
    return make_hyper(parse_label("P+001,T-010"), spec3)


@pytest.fixture(scope="session")
def analyzer3() -> HgsaAnalyzer:
    """Shared three-photon analyzer; its evolution caches are reused across tests."""
    return HgsaAnalyzer(3)


@pytest.fixture
def tesa_template_file(temp_dir: Path) -> Path:
    path = temp_dir / "tesa.circuit"
    path.write_text(
        """# reference front end, applied to every photon
t2p(photon=*; in=1, out=1:2)
bs(photon=*; paths=1:2)
"""
    )
    return path
