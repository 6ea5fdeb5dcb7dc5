"""
Pytest configuration and shared fixtures for DualGraphLens tests.
"""

import os
from collections.abc import Generator

# Set a high rate limit for testing BEFORE importing the app
os.environ["RATE_LIMIT"] = "1000/minute"

import pytest
from fastapi.testclient import TestClient

from app.analyzers.graph_core import SerreGraph, from_edges
from app.main import app
from app.services.fixtures import FixtureCorpus


# === Test Client Fixtures ===


@pytest.fixture(scope="session")
def client() -> Generator[TestClient, None, None]:
    """
    Provides a FastAPI TestClient for the entire test session.
    Uses session scope for efficiency - the app is only initialized once.
    """
    with TestClient(app) as test_client:
        yield test_client


# === Fixture Corpus ===


@pytest.fixture(scope="session")
def corpus() -> FixtureCorpus:
    """The packaged fixture corpus."""
    return FixtureCorpus()


# === Sample Graphs ===


@pytest.fixture
def triangle() -> SerreGraph:
    return from_edges(["a", "b", "c"], [("1", "a", "b"), ("2", "b", "c"), ("3", "c", "a")])


@pytest.fixture
def triangle_with_pendant() -> SerreGraph:
    """Triangle a-b-c with a leaf d hanging from a."""
    return from_edges(
        ["a", "b", "c", "d"],
        [("1", "a", "b"), ("2", "b", "c"), ("3", "c", "a"), ("4", "a", "d")],
    )


@pytest.fixture
def square() -> SerreGraph:
    return from_edges(
        ["w", "x", "y", "z"],
        [("1", "w", "x"), ("2", "x", "y"), ("3", "y", "z"), ("4", "z", "w")],
    )


@pytest.fixture
def path3() -> SerreGraph:
    """Path with three vertices."""
    return from_edges(["a", "b", "c"], [("1", "a", "b"), ("2", "b", "c")])


@pytest.fixture
def single_vertex() -> SerreGraph:
    return from_edges(["o"], [])


@pytest.fixture
def single_loop() -> SerreGraph:
    return from_edges(["o"], [("1", "o", "o")])


@pytest.fixture
def theta() -> SerreGraph:
    return from_edges(["p", "q"], [("1", "p", "q"), ("2", "p", "q"), ("3", "p", "q")])


@pytest.fixture
def figure_eight() -> SerreGraph:
    return from_edges(["o"], [("1", "o", "o"), ("2", "o", "o")])


# === Sample Text Fixtures ===


@pytest.fixture
def triangle_text() -> str:
    """Triangle in the line-oriented graph format."""
    return "dualgraph 1\nv a\nv b\nv c\ne 1 a b\ne 2 b c\ne 3 c a\n"


@pytest.fixture
def square_text() -> str:
    return "v w\nv x\nv y\nv z\ne 1 w x\ne 2 x y\ne 3 y z\ne 4 z w\n"


@pytest.fixture
def path_text() -> str:
    return "v a b=1\nv b b=1\ne 1 a b\n"


# === Markers ===


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "acceptance: acceptance criteria that corpus-check also runs"
    )
