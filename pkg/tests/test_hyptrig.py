import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from torsion_forge.core.errors import DegenerateElementError, DomainError
from torsion_forge.core.hyptrig import (close, dz, hexagon_side, law_of_sines_ratios, opposite_sides,
                                        require_nonvanishing, safe_arccosh, ss, triangle_side)

finite = floats(min_value=-3, max_value=3)


@given(finite, finite)
def test_dz_is_a_homomorphism(x, y):
    np.testing.assert_allclose(dz(x) @ dz(y), dz(x + y), rtol=1e-12, atol=1e-12)


@given(finite)
def test_dz_and_ss_are_unimodular(s):
    assert abs(np.linalg.det(dz(1j * s)) - 1) < 1e-12
    assert abs(np.linalg.det(ss(s)) - 1) < 1e-10


@given(finite, finite)
def test_ss_is_a_homomorphism(x, y):
    np.testing.assert_allclose(ss(x) @ ss(y), ss(x + y), rtol=1e-10, atol=1e-10)


@given(finite, finite)
def test_dz_and_ss_are_symmetric(x, y):
    for M in (dz(complex(x, y)), ss(complex(x, y))):
        assert M[0, 1] == M[1, 0]


@given(finite, finite, finite, finite)
def test_cosh_difference_identity(a, b, c, d):
    z, w = complex(a, b), complex(c, d)
    lhs = np.cosh(z) - np.cosh(w)
    rhs = 2 * np.sinh((z + w) / 2) * np.sinh((z - w) / 2)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(np.cosh(z)) + abs(np.cosh(w)))


def test_dz_rejects_non_finite_input():
    with pytest.raises(DomainError):
        dz(float("nan"))


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (1.0 - 1e-13, 0.0), (np.cosh(0.5), 0.5)])
def test_safe_arccosh(x, expected):
    assert safe_arccosh(x) == pytest.approx(expected, abs=1e-12)


def test_safe_arccosh_rejects_values_below_one():
    with pytest.raises(DomainError):
        safe_arccosh(0.99)


def test_equilateral_triangle_side():
    # cosh s = cos a (1 + cos a) / sin^2 a for three equal angles
    a = np.pi / 4
    expected = np.arccosh(np.cos(a) * (1 + np.cos(a)) / np.sin(a) ** 2)
    assert triangle_side(a, a, a) == pytest.approx(expected, rel=1e-12)


def test_triangle_side_rejects_euclidean_angles():
    with pytest.raises(DomainError):
        triangle_side(np.pi / 3, np.pi / 3, np.pi / 3)


def test_hexagon_side_rejects_non_positive_lengths():
    with pytest.raises(DomainError):
        hexagon_side(1.0, 0.0, 1.0)


def test_opposite_sides_are_ordered_by_parameter():
    sides = opposite_sides((0.3, 0.5, 0.7), "cone")
    # the largest angle faces the longest side
    assert sides[2] > sides[1] > sides[0]


@pytest.mark.parametrize("params, kind", [((0.3, 0.5, 0.7), "cone"), ((0.4, 1.1, 2.0), "boundary")])
def test_law_of_sines(params, kind):
    ratios = law_of_sines_ratios(params, kind)
    np.testing.assert_allclose(ratios, [ratios[0]] * 3, rtol=1e-10)


def test_close_scales_with_magnitude():
    assert close(1e6, 1e6 + 1e-5, tol=1e-10)
    assert not close(1.0, 1.0 + 1e-8, tol=1e-10)


def test_require_nonvanishing():
    assert require_nonvanishing(0.5, "x") == 0.5
    with pytest.raises(DegenerateElementError, match="sin alpha"):
        require_nonvanishing(1e-15, "sin alpha")
