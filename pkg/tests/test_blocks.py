import itertools

import numpy as np
import pytest

from torsion_forge.core.blocks import (block_lemma_checks, dblock_closed_form, dblock_torsion, expansion_identity,
                                       holonomy_checks, pants_closed_form, pants_lemma_checks, pants_torsion,
                                       require_agreement, s_invariant, s_invariant_spread, trace_closure,
                                       verify_gram_identity)
from torsion_forge.core.errors import DegenerateElementError, InputError, VerificationError
from torsion_forge.core.gram import TetShape
from torsion_forge.core.rep import (BlockGeometry, PantsGeometry, block_holonomy, mod_sign_matrix_residual,
                                    random_block_geometry, random_pants_geometry)
from torsion_forge.core.torsion import TorsionValue

from .conftest import REGULAR_ALPHA, REGULAR_GRAM_DET


def regular_block():
    return BlockGeometry("fsl", TetShape.from_angles([REGULAR_ALPHA] * 6))


def test_cone_pants_anchor():
    value = pants_closed_form(PantsGeometry("cone", (np.pi / 4,) * 3))
    assert abs(value.canonical() - 0.1767767j) < 1e-7


def test_boundary_pants_anchor():
    value = pants_closed_form(PantsGeometry("boundary", (1.0, 1.0, 1.0)))
    assert value.canonical() == pytest.approx(1 / (16 * np.sinh(1.0) ** 3), rel=1e-12)
    assert abs(value.canonical() - 0.0385060) < 2e-6


def test_regular_dblock_anchor():
    value = dblock_closed_form(regular_block())
    c = np.cos(REGULAR_ALPHA)
    sinh_l = np.sqrt((c / (2 * c - 1)) ** 2 - 1)
    # sinh^2 of the short edges is 2 + 2 sqrt 2 on the regular block
    expected = 1j * sinh_l * (2 + 2 * np.sqrt(2)) / (32 * np.sin(REGULAR_ALPHA) ** 3)
    assert abs(value.canonical() - expected) < 1e-10
    assert abs(value.canonical() - 0.5904664j) < 2e-6


@pytest.mark.parametrize("kind", ["cone", "boundary"])
def test_pants_closed_form_matches_direct(kind, rng):
    for _ in range(5):
        report = pants_torsion(random_pants_geometry(rng, kind))
        assert report.residual < 1e-9
        assert report.passed()
        assert report.homology_dims == (0, 3)


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_dblock_closed_form_matches_direct(kind, rng):
    for _ in range(5):
        report = dblock_torsion(random_block_geometry(rng, kind))
        assert report.residual < 1e-8
        assert report.passed(tol=1e-8)


def test_max_normalization_rescales_the_direct_torsion(rng):
    g = random_block_geometry(rng, "fsl")
    hol = block_holonomy(g)
    ratios = []
    for frame, largest in zip(hol.lift_vectors("frame"), hol.lift_vectors("max")):
        k = int(np.argmax(np.abs(frame)))
        ratios.append(largest[k] / frame[k])
    report = dblock_torsion(g, "direct", normalize="max")
    assert report.normalization == "max"
    frame_torsion = dblock_torsion(g, "direct").direct
    assert frame_torsion.residual(dblock_closed_form(g)) < 1e-8
    assert report.direct.equals(frame_torsion * complex(np.prod(ratios)), tol=1e-8)


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_lift_scales_enter_the_direct_torsion_once_each(kind, rng):
    g = random_block_geometry(rng, kind)
    scales = [1.5, -2.0, 0.5j, 1.0, 3.0, 1 - 1j]
    plain = dblock_torsion(g, "direct").direct
    scaled = dblock_torsion(g, "direct", lift_scales=scales).direct
    assert scaled.equals(plain * complex(np.prod(scales)), tol=1e-8)
    with pytest.raises(InputError):
        dblock_torsion(g, "direct", lift_scales=scales[:3])


def test_single_method_reports_skip_the_residual():
    report = dblock_torsion(regular_block(), method="closed")
    assert report.direct is None
    assert np.isnan(report.residual)
    assert report.passed()
    assert report.value is report.closed_form


def test_unknown_method():
    with pytest.raises(InputError):
        pants_torsion(PantsGeometry("cone", (0.5, 0.5, 0.5)), method="exact")


def test_require_agreement_raises_on_a_gap():
    report = dblock_torsion(regular_block(), method="closed")
    report.direct = TorsionValue(1.0)
    report.residual = report.closed_form.residual(report.direct)
    with pytest.raises(VerificationError) as excinfo:
        require_agreement(report)
    assert excinfo.value.residual == report.residual


def test_vanishing_sine_is_degenerate():
    with pytest.raises(DegenerateElementError):
        pants_closed_form(PantsGeometry("boundary", (1e-16, 1.0, 1.0)))


def test_regular_gram_identity():
    result = verify_gram_identity(regular_block())
    assert result["gram_det"].real == pytest.approx(REGULAR_GRAM_DET, rel=1e-9)
    assert result["residual"] < 1e-10


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_gram_identity(kind, rng):
    for _ in range(10):
        assert verify_gram_identity(random_block_geometry(rng, kind))["residual"] < 1e-9


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_s_invariant_is_independent_of_the_facet_ordering(kind, rng):
    g = random_block_geometry(rng, kind)
    assert s_invariant_spread(g) < 1e-9


def test_s_invariant_rejects_a_bad_facet_choice():
    with pytest.raises(InputError):
        s_invariant(regular_block(), (1, 1, 2, 3))


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_expansion_identity(kind, rng):
    g = random_block_geometry(rng, kind)
    for choice in itertools.permutations((1, 2, 3, 4)):
        assert expansion_identity(g, choice)["residual"] < 1e-9


@pytest.mark.parametrize("kind", ["cone", "boundary"])
def test_pants_lemmas(kind, rng):
    checks = pants_lemma_checks(random_pants_geometry(rng, kind))
    assert len(checks) == 2
    for name, check in checks.items():
        assert check["residual"] < 1e-8, name


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_block_lemmas(kind, rng):
    checks = block_lemma_checks(random_block_geometry(rng, kind))
    assert set(checks) == {"det_12_13_14", "det_12_23_24", "det_13_23_34", "det_14_24_34", "det4"}
    for name, check in checks.items():
        assert check["residual"] < 1e-8, name


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_lemma_residuals_see_the_phase(kind, rng):
    for name, check in block_lemma_checks(random_block_geometry(rng, kind)).items():
        numeric, closed = check["numeric"], check["closed"]
        assert check["residual"] == pytest.approx(
            min(abs(numeric - closed), abs(numeric + closed)) / max(1.0, abs(closed)), abs=1e-15)
        # a closed form off by a quarter turn has the same modulus but must not pass
        assert min(abs(numeric - 1j * closed), abs(numeric + 1j * closed)) > 0.1 * abs(closed), name


@pytest.mark.parametrize("kind", ["fsl", "dual"])
def test_both_factorizations_of_gamma_14_agree(kind, rng):
    for _ in range(5):
        hol = block_holonomy(random_block_geometry(rng, kind))
        assert mod_sign_matrix_residual(hol.matrices["14"], hol.alternatives["14"]) < 1e-9


@pytest.mark.parametrize("make", [
    lambda rng: random_pants_geometry(rng, "cone"),
    lambda rng: random_pants_geometry(rng, "boundary"),
    lambda rng: random_block_geometry(rng, "fsl"),
    lambda rng: random_block_geometry(rng, "dual"),
])
def test_holonomy_checks(make, rng):
    for name, residual in holonomy_checks(make(rng)).items():
        assert residual < 1e-8, name


def test_trace_closure_covers_every_edge(rng):
    closure = trace_closure(random_block_geometry(rng, "dual"))
    assert sorted(closure) == [f"trace_{label}" for label in ("12", "13", "14", "23", "24", "34")]
