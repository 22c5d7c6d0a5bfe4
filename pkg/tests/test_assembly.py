import json

import numpy as np
import pytest

from torsion_forge.core.assembly import (CharacterPoint, assemble_torsion, character_from_graph, closed_form_torsion,
                                         piece_geometries, piece_lift_scales)
from torsion_forge.core.errors import GluingError, InputError
from torsion_forge.core.fixtures import (REGULAR_ALPHA, d1_graph, d2_graph, random_d1_character,
                                         random_d2_character, regular_length)
from torsion_forge.core.gluing import graph_from_document
from torsion_forge.core.gram import PAIRS, TetShape, gram
from torsion_forge.core.rep import BlockGeometry, PantsGeometry
from torsion_forge.core.schemas import GluingDocument, load_document
from torsion_forge.core.torsion import TorsionValue

from .conftest import FIXTURES, REGULAR_GRAM_DET


def regular_d1():
    return CharacterPoint("fsl", {1: REGULAR_ALPHA, 2: REGULAR_ALPHA, 3: REGULAR_ALPHA})


def test_regular_fsl_d1_anchor():
    report = assemble_torsion(d1_graph(), regular_d1())
    assert abs(report.closed_form.canonical() - 8j * np.sqrt(-REGULAR_GRAM_DET)) < 1e-10
    assert abs(report.closed_form.canonical() - 18.8949565j) < 5e-6
    assert report.residual < 1e-8
    assert report.passed(tol=1e-8)


def test_regular_d1_pieces():
    blocks, interfaces = piece_geometries(d1_graph(), regular_d1())
    assert isinstance(blocks[1], BlockGeometry)
    assert all(isinstance(blocks[i], PantsGeometry) for i in (2, 3))
    assert sorted(interfaces) == [1, 2, 3, 4]
    assert all(p.params == (REGULAR_ALPHA,) * 3 for p in interfaces.values())


def test_d2_closed_form_is_a_gram_determinant(rng):
    chi = random_d2_character(rng, "fsl")
    value, dets = closed_form_torsion(d2_graph("fsl"), chi)
    det = np.linalg.det(gram(TetShape.from_angles([chi.values[i + 1] for i in range(6)])))
    assert len(dets) == 2
    assert value.equals(TorsionValue(64 * det), tol=1e-9)


def test_regular_d2_double():
    length = regular_length()
    chi = CharacterPoint("double", {i + 1: length for i in range(len(PAIRS))})
    report = assemble_torsion(d2_graph("double"), chi)
    c = np.cosh(length)
    # length Gram matrix with -cosh l off the diagonal
    assert report.closed_form.equals(TorsionValue(64 * (1 + c) ** 3 * (1 - 3 * c)), tol=1e-9)
    assert report.residual < 1e-8


@pytest.mark.parametrize("kind", ["fsl", "double"])
def test_d1_closed_form_matches_mayer_vietoris(kind, rng):
    for _ in range(3):
        report = assemble_torsion(d1_graph(kind), random_d1_character(rng, kind))
        assert report.residual < 1e-8
        assert report.tor_h.equals(TorsionValue(1.0))
        assert len(report.pieces) == 7


@pytest.mark.parametrize("kind", ["fsl", "double"])
def test_d2_closed_form_matches_mayer_vietoris(kind, rng):
    for _ in range(3):
        report = assemble_torsion(d2_graph(kind), random_d2_character(rng, kind))
        assert report.residual < 1e-8
        assert len(report.pieces) == 6


@pytest.mark.parametrize("name", ["d1_fsl.json", "d1_double.json", "d2_fsl.json", "d2_double.json"])
def test_fixture_files_assemble(name, fixture_path):
    g = load_document(fixture_path(name), GluingDocument).to_graph()
    report = assemble_torsion(g, character_from_graph(g))
    assert report.residual < 1e-8


def test_single_method_reports():
    closed = assemble_torsion(d1_graph(), regular_d1(), method="closed")
    assert closed.mv is None and closed.tor_h is None
    assert closed.value is closed.closed_form
    mv = assemble_torsion(d1_graph(), regular_d1(), method="mv")
    assert mv.closed_form is None
    assert mv.value.equals(closed.value, tol=1e-8)


def test_unknown_assembly_method():
    with pytest.raises(InputError):
        assemble_torsion(d1_graph(), regular_d1(), method="direct")


def test_character_needs_every_torus():
    with pytest.raises(InputError):
        piece_geometries(d1_graph(), CharacterPoint("fsl", {1: 0.5, 2: 0.5}))


def test_character_from_inline_block_shape():
    doc = json.loads((FIXTURES / "d1_fsl.json").read_text())
    for torus in doc["tori"]:
        torus.pop("alpha")
    doc["blocks"][0]["u"] = [[0.0, REGULAR_ALPHA]] * 6
    chi = character_from_graph(graph_from_document(doc))
    assert chi.values == regular_d1().values


def test_character_without_values():
    doc = json.loads((FIXTURES / "d2_double.json").read_text())
    doc["tori"][0].pop("length")
    with pytest.raises(GluingError) as excinfo:
        character_from_graph(graph_from_document(doc))
    assert excinfo.value.invariant == "geometry"


def test_character_vector_round_trip():
    g = d1_graph()
    chi = regular_d1().with_values({2: 0.6})
    assert CharacterPoint.from_vector(g, chi.vector(g)) == chi


@pytest.mark.parametrize("builder", [d1_graph, d2_graph])
def test_every_torus_meets_as_many_block_slots_as_cone_points(builder):
    g = builder()
    for torus in g.tori:
        blocks, interfaces = piece_lift_scales(g, {torus.id: 2.0})
        block_power = sum(scale == 2.0 for scales in blocks.values() for scale in scales)
        interface_power = sum(scale == 2.0 for scales in interfaces.values() for scale in scales)
        assert block_power == interface_power == len(torus.traversal)


@pytest.mark.parametrize("kind", ["fsl", "double"])
@pytest.mark.parametrize("builder, sampler", [(d1_graph, random_d1_character), (d2_graph, random_d2_character)])
def test_mayer_vietoris_ignores_invariant_vector_scales(builder, sampler, kind, rng):
    g = builder(kind)
    chi = sampler(rng, kind)
    scales = {torus.id: (1.5 + 0.5j) ** k for k, torus in enumerate(g.tori, start=1)}
    plain = assemble_torsion(g, chi, "mv")
    scaled = assemble_torsion(g, chi, "mv", lift_scales=scales)
    assert scaled.mv.equals(plain.mv, tol=1e-9)
    assert not all(a["torsion"].equals(b["torsion"]) for a, b in zip(plain.pieces, scaled.pieces))
