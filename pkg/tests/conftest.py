import os
import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

from natmod import catalog  # noqa: E402
from natmod.dclass import run_pipeline  # noqa: E402
from natmod.typeformers import Formers  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def built(name: str):
    """Pipeline result for ``name`` with every morphism in the class."""
    C = catalog.by_name(name)
    return run_pipeline(C, list(C.morphisms()))


@lru_cache(maxsize=None)
def formers(name: str) -> Formers:
    r = built(name)
    return Formers(r.model, pi=r.pi, sigma=r.sigma, ident=r.ident)


@pytest.fixture(scope="session")
def diamond():
    return built("diamond")


@pytest.fixture(scope="session")
def diamond_formers():
    return formers("diamond")
