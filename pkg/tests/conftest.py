import pathlib

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def reference_scenario_path() -> pathlib.Path:
    return REPO_ROOT / "scenarios" / "reference.scenario"


@pytest.fixture(scope="session")
def scan_spec_path() -> pathlib.Path:
    return REPO_ROOT / "scenarios" / "commutator_scan.spec"
