"""
Gluing Module - Combinatorics of a decomposition into blocks and pants.

A manifold is described by its pieces (D-blocks, dual D-blocks, thickened
pants), by the pants interfaces that glue one face to another, and by the
boundary tori, each listed as the cyclic sequence of block slots it passes
through. A D-block slot "jk" is an edge and meets the two faces numbered by
{1,2,3,4} minus {j,k}; a thickened pants has faces 0 and 1 and slots 0, 1, 2,
each meeting both faces. An interface matches the three slots of its left
face with the three slots of its right face, one pair per cone point.

Key components:
- `GluingGraph`: Validated, immutable decomposition.
- `build_gluing_graph`: Validates a raw document; every failure names the broken invariant.
- `walk_tori`: Recomputes the torus cycles from the interfaces alone.
- `mv_matrices`: The Mayer-Vietoris homology sequence as a based complex.

Integration:
- Built by the CLI from `schemas.GluingDocument`; consumed by `assembly`.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import GluingError
from .gram import PAIRS, dual_pair, pair_label
from .torsion import BasedChainComplex

logger = logging.getLogger(__name__)

GRAPH_KINDS = {"fsl": "dblock", "double": "dual_dblock"}
BLOCK_KINDS = ("dblock", "dual_dblock", "thickened_pants")
DBLOCK_SLOTS = tuple(pair_label(pair) for pair in PAIRS)
PANTS_SLOTS = ("0", "1", "2")

Slot = Tuple[int, str]
FaceRef = Tuple[int, int]

def slots_of(kind: str) -> Tuple[str, ...]:
    return PANTS_SLOTS if kind == "thickened_pants" else DBLOCK_SLOTS

def faces_of(kind: str) -> Tuple[int, ...]:
    return (0, 1) if kind == "thickened_pants" else (1, 2, 3, 4)

def slot_faces(kind: str, slot: str) -> Tuple[int, int]:
    if kind == "thickened_pants":
        return (0, 1)
    return dual_pair((int(slot[0]), int(slot[1])))

def face_slots(kind: str, face: int) -> Tuple[str, ...]:
    return tuple(slot for slot in slots_of(kind) if face in slot_faces(kind, slot))

@dataclass(frozen=True)
class Block:
    id: int
    kind: str
    u: Optional[Tuple[complex, ...]] = None

@dataclass(frozen=True)
class Interface:
    id: int
    left: FaceRef
    right: FaceRef
    match: Tuple[Tuple[str, str], ...]

@dataclass(frozen=True)
class Torus:
    id: int
    traversal: Tuple[Slot, ...]
    value: Optional[float] = None

@dataclass(frozen=True)
class ConePoint:
    """Cone point q of an interface, the crossing between two matched slots."""

    interface: int
    index: int
    left: Slot
    right: Slot

@dataclass(frozen=True)
class GluingGraph:
    kind: str
    blocks: Tuple[Block, ...]
    interfaces: Tuple[Interface, ...]
    tori: Tuple[Torus, ...]
    walks: Tuple[Tuple[Tuple[Slot, ConePoint], ...], ...]

    @property
    def d(self) -> int:
        return sum(1 for b in self.blocks if b.kind != "thickened_pants")

    @property
    def c(self) -> int:
        return sum(1 for b in self.blocks if b.kind == "thickened_pants")

    @property
    def p(self) -> int:
        return len(self.interfaces)

    @property
    def n(self) -> int:
        return len(self.tori)

    def block(self, block_id: int) -> Block:
        return self._blocks_by_id()[block_id]

    def block_position(self, block_id: int) -> int:
        return [b.id for b in self.blocks].index(block_id)

    def _blocks_by_id(self) -> Dict[int, Block]:
        return {b.id: b for b in self.blocks}

    def cone_points(self) -> List[ConePoint]:
        points = []
        for interface in self.interfaces:
            for q, (left_slot, right_slot) in enumerate(interface.match):
                points.append(ConePoint(interface.id, q, (interface.left[0], left_slot),
                                        (interface.right[0], right_slot)))
        return points

    def block_slots(self) -> List[Slot]:
        return [(b.id, slot) for b in self.blocks for slot in slots_of(b.kind)]

    def torus_of_slot(self) -> Dict[Slot, int]:
        return {slot: torus.id for torus in self.tori for slot in torus.traversal}

    def torus_values(self) -> Dict[int, float]:
        return {torus.id: torus.value for torus in self.tori}

    def relabeled(self, block_order: Sequence[int], interface_order: Sequence[int],
                  torus_order: Sequence[int]) -> "GluingGraph":
        """The same decomposition with its lists reordered (positions, not ids)."""
        return build_gluing_graph(
            self.kind,
            [self.blocks[i] for i in block_order],
            [self.interfaces[i] for i in interface_order],
            [self.tori[i] for i in torus_order],
        )

def _cyclic_equal(a: Sequence[Slot], b: Sequence[Slot]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = list(a) + list(a)
    forward = any(doubled[i:i + len(b)] == list(b) for i in range(len(a)))
    backward_b = list(reversed(b))
    backward = any(doubled[i:i + len(b)] == backward_b for i in range(len(a)))
    return forward or backward

def walk_tori(blocks: Sequence[Block], interfaces: Sequence[Interface]) -> List[List[Tuple[Slot, ConePoint]]]:
    """
    Boundary cycles traced through the interfaces.

    Each entry pairs a slot with the cone point crossed when leaving it.
    From a slot, the walk leaves through one of its two faces, crosses the
    interface on that face to the matched slot and leaves that slot through
    its other face.
    """
    kinds = {b.id: b.kind for b in blocks}
    crossing: Dict[Tuple[int, int, str], Tuple[Slot, int, ConePoint]] = {}
    for interface in interfaces:
        for q, (left_slot, right_slot) in enumerate(interface.match):
            point = ConePoint(interface.id, q, (interface.left[0], left_slot), (interface.right[0], right_slot))
            crossing[(interface.left[0], interface.left[1], left_slot)] = (
                (interface.right[0], right_slot), interface.right[1], point)
            crossing[(interface.right[0], interface.right[1], right_slot)] = (
                (interface.left[0], left_slot), interface.left[1], point)
    visited = set()
    walks = []
    for block in blocks:
        for slot in slots_of(block.kind):
            if (block.id, slot) in visited:
                continue
            start = (block.id, slot)
            exit_face = slot_faces(block.kind, slot)[0]
            current = start
            walk = []
            while True:
                visited.add(current)
                key = (current[0], exit_face, current[1])
                if key not in crossing:
                    raise GluingError("face-coverage",
                                      f"slot {current} leaves through face {exit_face}, which is not glued")
                target, entry_face, point = crossing[key]
                walk.append((current, point))
                faces = slot_faces(kinds[target[0]], target[1])
                exit_face = faces[1] if faces[0] == entry_face else faces[0]
                current = target
                if current == start:
                    break
                if len(walk) > 6 * len(kinds) + 3:
                    raise GluingError("traversal", f"walk from {start} does not close")
            walks.append(walk)
    return walks

def build_gluing_graph(kind: str, blocks: Sequence[Block], interfaces: Sequence[Interface],
                       tori: Sequence[Torus]) -> GluingGraph:
    if kind not in GRAPH_KINDS:
        raise GluingError("kind", f"graph kind must be one of {sorted(GRAPH_KINDS)}, got '{kind}'")
    for name, items in (("block", blocks), ("interface", interfaces), ("torus", tori)):
        ids = [item.id for item in items]
        if len(set(ids)) != len(ids):
            raise GluingError("unique-ids", f"duplicate {name} ids in {ids}")
    allowed = {GRAPH_KINDS[kind], "thickened_pants"}
    for block in blocks:
        if block.kind not in allowed:
            raise GluingError("block-kinds", f"block {block.id} of kind '{block.kind}' in a '{kind}' graph")
    d = sum(1 for b in blocks if b.kind != "thickened_pants")
    c = len(blocks) - d
    if d < 1:
        raise GluingError("d>=1", "the decomposition needs at least one D-block")
    if len(interfaces) != c + 2 * d:
        raise GluingError("p=c+2d", f"{len(interfaces)} interfaces, but c + 2d = {c} + 2*{d} = {c + 2 * d}")

    kinds = {b.id: b.kind for b in blocks}
    seen_faces: Dict[FaceRef, int] = {}
    for interface in interfaces:
        if interface.left[0] == interface.right[0]:
            raise GluingError("no-self-gluing", f"interface {interface.id} glues block {interface.left[0]} to itself")
        for side in (interface.left, interface.right):
            block_id, face = side
            if block_id not in kinds:
                raise GluingError("face-coverage", f"interface {interface.id} names unknown block {block_id}")
            if face not in faces_of(kinds[block_id]):
                raise GluingError("face-coverage", f"block {block_id} has no face {face}")
            if side in seen_faces:
                raise GluingError("face-coverage",
                                  f"face {face} of block {block_id} is used by interfaces {seen_faces[side]} and {interface.id}")
            seen_faces[side] = interface.id
        left_slots = sorted(slot for slot, _ in interface.match)
        right_slots = sorted(slot for _, slot in interface.match)
        if (len(interface.match) != 3
                or left_slots != sorted(face_slots(kinds[interface.left[0]], interface.left[1]))
                or right_slots != sorted(face_slots(kinds[interface.right[0]], interface.right[1]))):
            raise GluingError("match", f"interface {interface.id} must pair the three slots of each face")
    for block in blocks:
        for face in faces_of(block.kind):
            if (block.id, face) not in seen_faces:
                raise GluingError("face-coverage", f"face {face} of block {block.id} is not glued")

    all_slots = [(b.id, slot) for b in blocks for slot in slots_of(b.kind)]
    owner: Dict[Slot, int] = {}
    for torus in tori:
        if not torus.traversal:
            raise GluingError("torus-coverage", f"torus {torus.id} has an empty traversal")
        for slot in torus.traversal:
            if slot not in all_slots:
                raise GluingError("torus-coverage", f"torus {torus.id} names unknown slot {slot}")
            if slot in owner:
                raise GluingError("torus-coverage", f"slot {slot} is in tori {owner[slot]} and {torus.id}")
            owner[slot] = torus.id
    missing = [slot for slot in all_slots if slot not in owner]
    if missing:
        raise GluingError("torus-coverage", f"slots {missing} belong to no torus")

    walks = walk_tori(blocks, interfaces)
    ordered_walks = []
    for torus in tori:
        match = [walk for walk in walks if _cyclic_equal([slot for slot, _ in walk], torus.traversal)]
        if not match:
            raise GluingError("traversal", f"torus {torus.id} traversal {list(torus.traversal)} is not a boundary cycle")
        ordered_walks.append(tuple(match[0]))
    if len(walks) != len(tori):
        raise GluingError("traversal", f"interfaces give {len(walks)} boundary cycles, {len(tori)} tori declared")

    slot_torus = {slot: torus for torus in tori for slot in torus.traversal}
    for block in blocks:
        if block.u is None:
            continue
        if block.kind == "thickened_pants":
            raise GluingError("geometry", f"thickened pants {block.id} takes its geometry from the tori")
        for slot, u in zip(DBLOCK_SLOTS, block.u):
            torus = slot_torus[(block.id, slot)]
            inline = u.imag if kind == "fsl" else u.real
            if torus.value is not None and abs(inline - torus.value) > 1e-9 * max(1.0, abs(torus.value)):
                raise GluingError("angle-consistency" if kind == "fsl" else "length-consistency",
                                  f"block {block.id} edge {slot} carries {inline}, torus {torus.id} carries {torus.value}")

    graph = GluingGraph(kind=kind, blocks=tuple(blocks), interfaces=tuple(interfaces),
                        tori=tuple(tori), walks=tuple(ordered_walks))
    logger.info(f"Gluing graph: d={graph.d}, c={graph.c}, p={graph.p}, n={graph.n}")
    return graph

def graph_from_document(document: Mapping[str, Any]) -> GluingGraph:
    """Builds a graph from a plain dict in the input JSON layout."""
    value_key = "alpha" if document.get("kind") == "fsl" else "length"
    blocks = [Block(int(b["id"]), b["kind"],
                    tuple(complex(re, im) for re, im in b["u"]) if b.get("u") is not None else None)
              for b in document.get("blocks", [])]
    interfaces = [Interface(int(i["id"]), (int(i["left"][0]), int(i["left"][1])),
                            (int(i["right"][0]), int(i["right"][1])),
                            tuple((str(a), str(b)) for a, b in i.get("match", [])))
                  for i in document.get("interfaces", [])]
    tori = [Torus(int(t["id"]), tuple((int(block), str(slot)) for block, slot in t["traversal"]),
                  float(t[value_key]) if t.get(value_key) is not None else None)
            for t in document.get("tori", [])]
    return build_gluing_graph(document.get("kind"), blocks, interfaces, tori)

def mv_matrices(g: GluingGraph) -> BasedChainComplex:
    """
    Mayer-Vietoris homology sequence H_2(M) -> (+)H_1(P) -> (+)H_1(D) -> H_1(M).

    Degrees 3..0 carry the tori, the interface cone points, the block slots and
    the tori again. delta sends a cone point to +slot of the lower-positioned
    block and -slot of the other; the boundary of a torus gets +-1 on each cone
    point of its walk, + when the block before the crossing sits lower; epsilon
    sends a slot to its torus.
    """
    points = g.cone_points()
    point_index = {(cp.interface, cp.index): i for i, cp in enumerate(points)}
    slots = g.block_slots()
    slot_index = {slot: i for i, slot in enumerate(slots)}
    torus_index = {torus.id: i for i, torus in enumerate(g.tori)}
    position = {b.id: i for i, b in enumerate(g.blocks)}

    delta = np.zeros((len(slots), len(points)))
    for column, cp in enumerate(points):
        lower, upper = sorted((cp.left, cp.right), key=lambda slot: position[slot[0]])
        delta[slot_index[lower], column] = 1
        delta[slot_index[upper], column] = -1

    boundary = np.zeros((len(points), g.n))
    for column, walk in enumerate(g.walks):
        for slot, cp in walk:
            other = cp.right if cp.left == slot else cp.left
            sign = 1 if position[slot[0]] < position[other[0]] else -1
            boundary[point_index[(cp.interface, cp.index)], column] = sign

    epsilon = np.zeros((g.n, len(slots)))
    for torus in g.tori:
        for slot in torus.traversal:
            epsilon[torus_index[torus.id], slot_index[slot]] = 1

    names = {
        0: [f"H1(M).T{t.id}" for t in g.tori],
        1: [f"H1(D{b}).{s}" for b, s in slots],
        2: [f"H1(P{cp.interface}).{cp.index}" for cp in points],
        3: [f"H2(M).T{t.id}" for t in g.tori],
    }
    return BasedChainComplex(
        dims=(g.n, len(slots), len(points), g.n),
        boundaries={1: epsilon, 2: delta, 3: boundary},
        cell_names=names,
        expected_ranks={1: g.n, 2: len(points) - g.n, 3: g.n},
    )
