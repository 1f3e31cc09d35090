import numpy as np
import pytest

from normctrl.matrices import FiniteMatrix, IndexWindow


def mat(rows, lo: int = 0) -> FiniteMatrix:
    a = np.asarray(rows, dtype=complex)
    return FiniteMatrix(IndexWindow(lo, lo + a.shape[0] - 1), a)


def random_matrix(rng: np.random.Generator, n: int) -> FiniteMatrix:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return FiniteMatrix(IndexWindow(0, n - 1), a)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
