"""
conftest.py - Pytest configuration and shared fixtures.
Provides the small fields and helpers used across the test modules.
"""
import pytest
import random
import sys
import os

# Add backend directory to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture(scope="session")
def gf3():
    from services.ffield import make_field
    return make_field(3)


@pytest.fixture(scope="session")
def gf5():
    from services.ffield import make_field
    return make_field(5)


@pytest.fixture(scope="session")
def gf7():
    from services.ffield import make_field
    return make_field(7)


@pytest.fixture(scope="session")
def gf4():
    """GF(4) declared quadratic over GF(2)."""
    from services.ffield import make_field
    return make_field(2, 2, quadratic=True)


@pytest.fixture(scope="session")
def gf9():
    """GF(9) declared quadratic over GF(3)."""
    from services.ffield import make_field
    return make_field(3, 2, quadratic=True)


@pytest.fixture
def rng():
    """Seeded generator so every run sees the same random instances."""
    return random.Random(20240601)


@pytest.fixture
def mat():
    """Shorthand: mat(spec, rows) -> FMatrix."""
    from services.matrix import FMatrix

    def _mat(spec, rows):
        return FMatrix.from_rows(spec, rows)
    return _mat


@pytest.fixture
def random_nonsingular():
    """random_nonsingular(spec, k, rng) -> invertible k x k FMatrix."""
    from services.ffield import random_element
    from services.matrix import FMatrix

    def _draw(spec, k, rng):
        while True:
            m = FMatrix.from_rows(spec, [[random_element(spec, rng) for _ in range(k)]
                                         for _ in range(k)])
            if m.rank() == k:
                return m
    return _draw
