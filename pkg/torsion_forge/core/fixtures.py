"""
Reference decompositions used by the sweeps and the test suite.

- d=1: one (dual) D-block glued to itself through two thickened pants, three
  boundary tori (edge 34 alone, edge 12 alone, the other four edges together).
- d=2: two (dual) D-blocks glued face to face, one torus per edge.

The JSON files under config/fixtures describe the same graphs.
"""
from typing import Dict, Optional, Tuple

import numpy as np

from .assembly import CharacterPoint
from .config import get_config
from .errors import InputError, InvalidShapeError
from .gluing import Block, GluingGraph, Interface, Torus, build_gluing_graph, face_slots
from .gram import PAIRS, TetShape, angles_from_lengths, pair_label, random_angle_shape, random_length_shape

REGULAR_ALPHA = np.pi / 4

def d1_graph(kind: str = "fsl", edge34: Optional[float] = None, edge12: Optional[float] = None,
             others: Optional[float] = None) -> GluingGraph:
    """
    One D-block glued to itself through two thickened pants, faces 1-2 and 3-4.

    The tori are {34}, {12} and the four remaining edges. Pairing opposite
    edges ({12, 34}, {13, 24}, {14, 23}) cannot be reached this way: edge jk
    ends on the two faces other than j and k, so a torus {jk, lm} needs
    faces l, m joined to faces j, k, and no single matching of the four
    faces into two pairs does that for all three opposite pairs at once.
    """
    block_kind = "dblock" if kind == "fsl" else "dual_dblock"
    blocks = [Block(1, block_kind), Block(2, "thickened_pants"), Block(3, "thickened_pants")]
    interfaces = [
        Interface(1, (1, 1), (2, 0), (("34", "0"), ("23", "1"), ("24", "2"))),
        Interface(2, (2, 1), (1, 2), (("0", "34"), ("1", "13"), ("2", "14"))),
        Interface(3, (1, 3), (3, 0), (("12", "0"), ("14", "1"), ("24", "2"))),
        Interface(4, (3, 1), (1, 4), (("0", "12"), ("1", "13"), ("2", "23"))),
    ]
    tori = [
        Torus(1, ((1, "34"), (2, "0")), edge34),
        Torus(2, ((1, "12"), (3, "0")), edge12),
        Torus(3, ((1, "13"), (2, "1"), (1, "23"), (3, "2"), (1, "24"), (2, "2"), (1, "14"), (3, "1")), others),
    ]
    return build_gluing_graph(kind, blocks, interfaces, tori)

def d2_graph(kind: str = "fsl", values: Optional[Dict[Tuple[int, int], float]] = None) -> GluingGraph:
    block_kind = "dblock" if kind == "fsl" else "dual_dblock"
    blocks = [Block(1, block_kind), Block(2, block_kind)]
    interfaces = [Interface(face, (1, face), (2, face),
                            tuple((slot, slot) for slot in face_slots(block_kind, face)))
                  for face in (1, 2, 3, 4)]
    tori = [Torus(index + 1, ((1, pair_label(pair)), (2, pair_label(pair))),
                  None if values is None else values[pair])
            for index, pair in enumerate(PAIRS)]
    return build_gluing_graph(kind, blocks, interfaces, tori)

def regular_length() -> float:
    """Edge length of the regular tetrahedron with all dihedral angles pi/4."""
    return float(np.arccosh(1 + np.sqrt(2) / 2))

def random_d1_character(rng: np.random.Generator, kind: str = "fsl", max_tries: int = 10000) -> CharacterPoint:
    margin = get_config().sampling.margin
    for _ in range(max_tries):
        if kind == "fsl":
            beta = rng.uniform(0.2, 1.2)
            bound = np.pi - 2 * beta - margin
            if bound <= 0.2:
                continue
            edge34, edge12 = rng.uniform(0.2, bound, size=2)
            return CharacterPoint("fsl", {1: edge34, 2: edge12, 3: beta})
        edge34, edge12, others = rng.uniform(0.6, 1.6, size=3)
        try:
            angles_from_lengths(TetShape.from_lengths([edge12, others, others, others, others, edge34]))
        except InvalidShapeError:
            continue
        return CharacterPoint("double", {1: edge34, 2: edge12, 3: others})
    raise InputError(f"No valid d=1 character found in {max_tries} draws")

def random_d2_character(rng: np.random.Generator, kind: str = "fsl") -> CharacterPoint:
    if kind == "fsl":
        shape = random_angle_shape(rng)
    else:
        shape = random_length_shape(rng)
    return CharacterPoint(kind, {index + 1: shape.param(pair) for index, pair in enumerate(PAIRS)})
