from fractions import Fraction

import numpy as np
import pytest
from conftest import ALPHA, BETA, GAMMA5, SIGMA

from diracsym.algebra import (
    DIRAC,
    I_UNIT,
    GaussianRational,
    SpinorMatrix,
    anticommutator,
    commutator,
    dot_alpha,
    sigma_from_cross,
)
from diracsym.errors import UsageError


def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 3), 2)
    b = GaussianRational(-1, Fraction(1, 2))
    assert a + b == GaussianRational(Fraction(-2, 3), Fraction(5, 2))
    assert a * b == GaussianRational(Fraction(-1, 3) - 1, Fraction(1, 6) - 2)
    assert (a / b) * b == a
    assert I_UNIT * I_UNIT == GaussianRational(-1)
    assert complex(a) == pytest.approx(1 / 3 + 2j)


def test_gaussian_rational_rejects_floats():
    with pytest.raises(TypeError):
        GaussianRational.coerce(0.5j)
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1) / GaussianRational(0)


def test_basis_matches_kron_construction():
    assert np.array_equal(DIRAC.beta.array, BETA)
    assert np.array_equal(DIRAC.gamma5.array, GAMMA5)
    for i in range(3):
        assert np.array_equal(DIRAC.alpha[i].array, ALPHA[i])
        assert np.array_equal(DIRAC.sigma[i].array, SIGMA[i])


def test_sigma_is_alpha_cross_alpha():
    for i in range(3):
        assert sigma_from_cross(i) == DIRAC.sigma[i]


def test_clifford_relations_exact():
    ident, zero = SpinorMatrix.identity(), SpinorMatrix.zeros()
    for i in range(3):
        assert anticommutator(DIRAC.alpha[i], DIRAC.beta) == zero
        assert commutator(DIRAC.gamma5, DIRAC.sigma[i]) == zero
        for j in range(3):
            want = ident * 2 if i == j else zero
            assert anticommutator(DIRAC.alpha[i], DIRAC.alpha[j]) == want


def test_exact_and_numeric_agree():
    rng = np.random.default_rng(3)
    names = list(DIRAC.elements())
    for _ in range(20):
        a, b = (DIRAC.elements()[n] for n in rng.choice(names, 2))
        exact = (a @ b - b @ a * Fraction(1, 3)).array
        num = (a.numeric() @ b.numeric() - b.numeric() @ a.numeric() * (1 / 3)).array
        assert np.max(np.abs(exact - num)) < 1e-15


def test_mode_mismatch_raises():
    with pytest.raises(UsageError, match="mode mismatch"):
        DIRAC.beta @ DIRAC.beta.numeric()
    with pytest.raises(UsageError):
        DIRAC.beta * 0.5


def test_matrix_shape_checked():
    with pytest.raises(UsageError):
        SpinorMatrix([[1, 0], [0, 1]])


def test_first_nonzero_certificate():
    m = DIRAC.beta - SpinorMatrix.identity()
    assert m.first_nonzero() == (2, 2, GaussianRational(-2))
    assert SpinorMatrix.zeros().first_nonzero() is None


def test_dot_alpha_mode_follows_components():
    assert dot_alpha((0, 0, 1)).exact
    assert not dot_alpha((0.0, 0.6, 0.8)).exact
    assert dot_alpha((Fraction(3, 5), Fraction(4, 5), 0)).array == pytest.approx(
        0.6 * ALPHA[0] + 0.8 * ALPHA[1])
