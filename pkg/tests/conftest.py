import os
import sys

import pytest

ROOT_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

FIXTURES_DIR = os.path.join(ROOT_DIR, "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as f:
        return f.read()


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    from src.config import reset_settings

    for name in list(os.environ):
        if name.startswith("HYPGLUING_"):
            monkeypatch.delenv(name)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def figure_eight_tri():
    from src.triangulation import parse_triangulation

    return parse_triangulation(read_fixture("figure_eight.json"))


@pytest.fixture
def lens_tri():
    from src.triangulation import parse_triangulation

    return parse_triangulation(read_fixture("lens_5_1.json"))


@pytest.fixture
def lens_rep():
    from src.formats import parse_representation

    return parse_representation(read_fixture("lens_5_1_rep.json"))


@pytest.fixture(scope="session")
def connected_sum_tri():
    from src import census

    return census.sphere_cross_circle_connected_sum()


@pytest.fixture(scope="session")
def connected_sum_rep(connected_sum_tri):
    """Nonelementary: a loxodromic and a parabolic with no common fixed point, tr[A, B] = 2.28+0.96i."""
    from src.fundamental_group import free_basis, presentation, representation_on_free_basis
    from src.geometry import Mobius

    fb = free_basis(presentation(connected_sum_tri))
    first, second = fb.basis
    loxodromic = Mobius.from_array([[1.2 + 0.3j, 1.0], [0.0, 1 / (1.2 + 0.3j)]])
    parabolic = Mobius.from_array([[1.0, 0.0], [0.8 + 0.6j, 1.0]])
    return representation_on_free_basis(fb, {first: loxodromic, second: parabolic})
