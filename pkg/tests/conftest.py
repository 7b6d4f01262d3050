import pytest
from hypothesis import settings

from mumfordkit.cli import load_example

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def examples():
    return {name: load_example(name) for name in ("tate", "theta1", "theta3", "shifted-theta", "mon-sep")}
