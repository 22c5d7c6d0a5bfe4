from math import gcd

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis.strategies import integers

from torsion_forge.core.assembly import CharacterPoint, closed_form_torsion
from torsion_forge.core.errors import DegenerateElementError, InputError, SolverError
from torsion_forge.core.fixtures import (REGULAR_ALPHA, d1_graph, d2_graph, random_d1_character,
                                         random_d2_character, regular_length)
from torsion_forge.core.surgery import (change_of_curves, core_curve, core_holonomy, filled_torsion,
                                        jacobian_convergence, longitude_holonomy, meridian_holonomy,
                                        parse_curves, peripheral_jacobian, solve_filling, surgery_apply)
from torsion_forge.core.torsion import TorsionValue

slopes = integers(min_value=-20, max_value=20)


def test_parse_curves():
    assert parse_curves("1,0; 2,-1;0,1", 3) == [(1, 0), (2, -1), (0, 1)]


@pytest.mark.parametrize("text, n", [("1,0;x,1", 2), ("1,0,2", 1), ("1,0", 2), ("0,0;1,0", 2)])
def test_parse_curves_errors(text, n):
    with pytest.raises(InputError):
        parse_curves(text, n)


@given(slopes, slopes)
def test_core_curve_is_dual(p, q):
    assume(gcd(p, q) == 1)
    r, s = core_curve(p, q)
    assert p * s - q * r == 1


@pytest.mark.parametrize("slope", [(4, 0), (0, 0), (6, 9)])
def test_core_curve_needs_a_primitive_slope(slope):
    with pytest.raises(InputError):
        core_curve(*slope)


def test_fsl_meridians():
    chi = CharacterPoint("fsl", {1: 0.5, 2: 0.6, 3: 0.7})
    meridians = meridian_holonomy(d1_graph(), chi)
    assert meridians == {1: 1.0j, 2: 1.2j, 3: 1.4j}
    longitudes = longitude_holonomy(d1_graph(), chi)
    assert all(value.imag == 0 and value.real > 0 for value in longitudes.values())


def test_double_longitudes(rng):
    g = d2_graph("double")
    chi = random_d2_character(rng, "double")
    longitudes = longitude_holonomy(g, chi)
    assert all(longitudes[t] == 2 * chi.values[t] for t in chi.values)
    # each edge appears in both blocks of the double
    assert all(0 < value.imag < 2 * np.pi and value.real == 0 for value in meridian_holonomy(g, chi).values())


@pytest.mark.parametrize("kind, curve", [("fsl", (1, 0)), ("double", (0, 1))])
def test_base_curves_leave_the_torsion_unchanged(kind, curve, rng):
    g = d1_graph(kind)
    chi = random_d1_character(rng, kind)
    curves = [curve] * g.n
    np.testing.assert_allclose(peripheral_jacobian(g, chi, curves), np.eye(g.n), atol=1e-12)
    assert change_of_curves(g, chi, curves).equals(closed_form_torsion(g, chi)[0])


def test_change_of_curves_scales_by_the_jacobian(rng):
    g = d1_graph("fsl")
    chi = random_d1_character(rng, "fsl")
    curves = [(1, 2), (3, 1), (2, 1)]
    det = np.linalg.det(peripheral_jacobian(g, chi, curves))
    assert change_of_curves(g, chi, curves).equals(closed_form_torsion(g, chi)[0] * det, tol=1e-9)


def test_finite_differences_converge(rng):
    g = d2_graph("fsl")
    result = jacobian_convergence(g, random_d2_character(rng, "fsl"))
    assert result["relative_difference"] < 1e-6


def test_surgery_apply():
    value = surgery_apply(TorsionValue(2.0), [2.0, 1j * np.pi])
    expected = 2.0 / (4 * np.sinh(1.0) ** 2) / (4 * np.sinh(0.5j * np.pi) ** 2)
    assert value.equals(TorsionValue(expected))


def test_surgery_apply_rejects_trivial_core_holonomy():
    with pytest.raises(DegenerateElementError):
        surgery_apply(TorsionValue(1.0), [0.0])


def test_core_holonomy_uses_the_dual_curve():
    g = d1_graph()
    chi = CharacterPoint("fsl", {1: 0.5, 2: 0.6, 3: 0.7})
    meridians, longitudes = meridian_holonomy(g, chi), longitude_holonomy(g, chi)
    curves = [(1, 0), (2, 1), (3, 2)]
    values = core_holonomy(g, chi, curves)
    for value, torus, (p, q) in zip(values, g.tori, curves):
        r, s = core_curve(p, q)
        assert value == r * meridians[torus.id] + s * longitudes[torus.id]


@pytest.mark.parametrize("curves", [[(1, 2), (3, 1), (2, 1)], [(1, 0)] * 3, [(5, 1), (1, 1), (2, 3)]])
def test_fsl_filled_torsion_matches_its_explicit_form(curves, rng):
    g = d1_graph("fsl")
    result = filled_torsion(g, random_d1_character(rng, "fsl"), curves)
    assert result["residual"] < 1e-9
    assert result["curves"] == [list(curve) for curve in curves]


@pytest.mark.parametrize("builder", [d1_graph, d2_graph])
def test_double_meridian_filling_matches_its_explicit_form(builder, rng):
    g = builder("double")
    chi = random_d1_character(rng, "double") if g.d == 1 else random_d2_character(rng, "double")
    result = filled_torsion(g, chi, [(1, 0)] * g.n)
    assert result["residual"] < 1e-9


def test_double_filling_along_other_slopes_has_no_explicit_form(rng):
    g = d2_graph("double")
    result = filled_torsion(g, random_d2_character(rng, "double"), [(1, 1)] * g.n)
    assert "explicit" not in result
    assert isinstance(result["filled"], TorsionValue)


def test_solve_fsl_filling():
    g = d1_graph("fsl")
    chi, info = solve_filling(g, [(4, 0)] * 3, CharacterPoint("fsl", {1: 0.6, 2: 0.6, 3: 0.6}))
    np.testing.assert_allclose(chi.vector(g), [REGULAR_ALPHA] * 3, atol=1e-8)
    assert info["residual"] < 1e-10


def test_solve_double_filling_reaches_the_regular_shape():
    g = d2_graph("double")
    initial = CharacterPoint("double", {t.id: 1.0 for t in g.tori})
    chi, info = solve_filling(g, [(4, 0)] * g.n, initial)
    np.testing.assert_allclose(np.cosh(chi.vector(g)), [1.7071068] * g.n, atol=1e-6)
    np.testing.assert_allclose(chi.vector(g), [regular_length()] * g.n, atol=1e-8)
    assert info["iterations"] > 0


@pytest.mark.parametrize("slope", [(0, 1), (1, 0)])
def test_fsl_filling_without_a_solution(slope):
    g = d1_graph("fsl")
    with pytest.raises(SolverError) as excinfo:
        solve_filling(g, [slope] * 3, CharacterPoint("fsl", {1: 0.6, 2: 0.6, 3: 0.6}))
    assert excinfo.value.exit_code == 4


def test_solver_rejects_an_invalid_start():
    g = d1_graph("fsl")
    with pytest.raises(SolverError):
        solve_filling(g, [(4, 0)] * 3, CharacterPoint("fsl", {1: 2.5, 2: 2.5, 3: 2.5}))
