"""
Representation Module - Holonomies of pants and D-blocks, and their adjoint lifts.

Holonomies are SL(2,C) matrices assembled from `dz` and `ss`. The adjoint
representation is realized as Sym^2 acting on quadratic forms in the basis
(X^2, XY, Y^2); twisted chain complexes use the transpose action
`twist(A) = sym2(A^T)`, under which `invariant_vector(A^T)` is fixed.

Key components:
- `sym2`, `twist`, `invariant_vector`: Adjoint lift and its fixed vectors.
- `PantsGeometry`, `BlockGeometry`: Validated geometric inputs.
- `pants_holonomy`, `block_holonomy`: Holonomy builders returning a `Holonomy`
  with the explicit generators, the alternative factorizations and the spine
  generators used by the twisted graph complexes.
- `conjugate`: Moves a holonomy to another point of its conjugacy class.

Integration:
- Consumed by `blocks` for direct torsion and lemma checks.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import get_config
from .errors import DegenerateElementError, InputError, InvalidShapeError, NonUnimodularError
from .gram import (PAIRS, TetShape, angles_from_lengths, dual_pair, lengths_from_angles,
                   random_angle_shape, random_length_shape, validate_hyperideal)
from .hyptrig import dz, hexagon_side, opposite_sides, ss, triangle_side

logger = logging.getLogger(__name__)

# Relative split below which two eigenvalues count as equal.
EIGEN_SPLIT_TOL = 1e-7
EIGEN_TIE_TOL = 1e-9

PANTS_LIFT_PAIRS = ((0, 1), (1, 2), (0, 2))
BLOCK_LIFT_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

def inv2(A: np.ndarray) -> np.ndarray:
    a, b = A[0]
    c, d = A[1]
    return np.array([[d, -b], [-c, a]], dtype=complex) / (a * d - b * c)

def word(*factors: np.ndarray) -> np.ndarray:
    result = np.eye(2, dtype=complex)
    for factor in factors:
        result = result @ factor
    return result

def sym2(A: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    if tol is None:
        tol = get_config().numerics.unimodular_tol
    A = np.asarray(A, dtype=complex)
    (p, q), (r, s) = A
    det = p * s - q * r
    if abs(det - 1) > tol * max(1.0, float(np.abs(A).max()) ** 2):
        raise NonUnimodularError(f"sym2 needs det 1, got {det:.6g}")
    return np.array([
        [p * p, p * q, q * q],
        [2 * p * r, p * s + q * r, 2 * q * s],
        [r * r, r * s, s * s],
    ], dtype=complex)

def twist(A: np.ndarray) -> np.ndarray:
    """Ad(A)^T acting on the coefficient space of the twisted complexes."""
    return sym2(np.asarray(A).T)

def invariant_vector(M: np.ndarray, normalize: str = "frame") -> np.ndarray:
    """
    Fixed vector (ac, ad+bc, bd) of sym2(M) built from eigenvectors (a,b), (c,d) of M.

    v+ belongs to the eigenvalue of larger modulus, ties going to the larger
    imaginary part. "frame" divides by ad - bc, which makes the vector
    independent of eigenvector scaling and canonical up to sign. "max" scales
    the largest component to 1.
    """
    M = np.asarray(M, dtype=complex)
    eigenvalues, eigenvectors = np.linalg.eig(M)
    l0, l1 = eigenvalues
    scale = max(1.0, abs(l0), abs(l1))
    if abs(l0 - l1) <= EIGEN_SPLIT_TOL * scale:
        raise DegenerateElementError(f"Central or parabolic element, eigenvalues {l0:.6g}, {l1:.6g}")
    if abs(abs(l0) - abs(l1)) <= EIGEN_TIE_TOL * scale:
        plus = 0 if l0.imag >= l1.imag else 1
    else:
        plus = 0 if abs(l0) > abs(l1) else 1
    a, b = eigenvectors[:, plus]
    c, d = eigenvectors[:, 1 - plus]
    vector = np.array([a * c, a * d + b * c, b * d], dtype=complex)
    if normalize == "frame":
        return vector / (a * d - b * c)
    if normalize == "max":
        return vector / vector[int(np.argmax(np.abs(vector)))]
    raise InputError(f"Unknown normalization '{normalize}'")

@dataclass(frozen=True)
class PantsGeometry:
    """Half cone-angles ("cone") or half boundary-lengths ("boundary")."""

    kind: str
    params: Tuple[float, float, float]

    def __post_init__(self):
        params = tuple(float(x) for x in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != 3 or not all(np.isfinite(params)):
            raise InvalidShapeError(f"Pants need three finite parameters, got {self.params}")
        if self.kind == "cone":
            diagnostics = [f"cone point {k + 1}: half-angle {a:.6g} outside (0, pi)"
                           for k, a in enumerate(params) if not 0.0 < a < np.pi]
            if sum(params) >= np.pi:
                diagnostics.append(f"half-angle sum {sum(params):.6g} is not below pi")
            if diagnostics:
                raise InvalidShapeError("No hyperbolic triangle with these angles", diagnostics)
        elif self.kind == "boundary":
            if not all(l > 0 for l in params):
                raise InvalidShapeError("Boundary lengths must be positive",
                                        [f"boundary {k + 1}: {l:.6g}" for k, l in enumerate(params) if l <= 0])
        else:
            raise InputError(f"Unknown pants kind '{self.kind}'")

    @property
    def sides(self) -> Tuple[float, float, float]:
        return opposite_sides(self.params, self.kind)

@dataclass(frozen=True)
class BlockGeometry:
    """A D-block ("fsl", angle shape) or a dual D-block ("dual", length shape)."""

    kind: str
    shape: TetShape

    def __post_init__(self):
        if self.kind == "fsl":
            valid, diagnostics = validate_hyperideal(self.shape)
            if not valid:
                raise InvalidShapeError("Not a hyperideal tetrahedron", diagnostics)
        elif self.kind == "dual":
            if self.shape.kind != "lengths":
                raise InvalidShapeError(f"Dual blocks need a length shape, got '{self.shape.kind}'")
            angles_from_lengths(self.shape)
        else:
            raise InputError(f"Unknown block kind '{self.kind}'")

    @cached_property
    def alpha(self) -> Dict[Tuple[int, int], float]:
        """Dihedral angles in the block's own edge labelling."""
        if self.kind == "fsl":
            return {pair: self.shape.param(pair) for pair in PAIRS}
        other = angles_from_lengths(self.shape)
        return {pair: other.param(dual_pair(pair)) for pair in PAIRS}

    @cached_property
    def length(self) -> Dict[Tuple[int, int], float]:
        """Edge lengths in the block's own edge labelling."""
        if self.kind == "dual":
            return {pair: self.shape.param(pair) for pair in PAIRS}
        other = lengths_from_angles(self.shape)
        return {pair: other.param(dual_pair(pair)) for pair in PAIRS}

    @cached_property
    def side(self) -> Dict[Tuple[int, int], float]:
        """
        Short edges s_jk for ordered j != k.

        fsl: the side of triangle T_j on face H_k. dual: the side of hexagon
        H_j on triangle T_k.
        """
        sides = {}
        for j in (1, 2, 3, 4):
            for k in (1, 2, 3, 4):
                if j == k:
                    continue
                m, n = dual_pair(tuple(sorted((j, k))))
                km, kn = tuple(sorted((k, m))), tuple(sorted((k, n)))
                if self.kind == "fsl":
                    sides[(j, k)] = triangle_side(self.alpha[(m, n)], self.alpha[km], self.alpha[kn])
                else:
                    sides[(j, k)] = hexagon_side(self.length[(m, n)], self.length[km], self.length[kn])
        return sides

    def s(self, j: int, k: int) -> float:
        return self.side[(j, k)]

    def a(self, j: int, k: int) -> float:
        return self.alpha[tuple(sorted((j, k)))]

    def l(self, j: int, k: int) -> float:
        return self.length[tuple(sorted((j, k)))]

@dataclass
class Holonomy:
    """Generators, alternative factorizations and spine data of one piece."""

    kind: str
    matrices: Dict[str, np.ndarray]
    alternatives: Dict[str, np.ndarray] = field(default_factory=dict)
    spine: Tuple[np.ndarray, ...] = ()
    lift_pairs: Tuple[Tuple[int, int], ...] = ()
    lift_labels: Tuple[str, ...] = ()

    def spine_word(self, pair: Tuple[int, int]) -> np.ndarray:
        j, k = pair
        return self.spine[j] @ inv2(self.spine[k])

    def lift_vectors(self, normalize: str = "frame") -> List[np.ndarray]:
        return [invariant_vector(self.spine_word(pair).T, normalize) for pair in self.lift_pairs]

def pants_holonomy(g: PantsGeometry) -> Holonomy:
    s1, s2, s3 = g.sides
    S1, S2, S3 = ss(s1), ss(s2), ss(s3)
    if g.kind == "cone":
        a1, a2, a3 = g.params
        # gamma_k counterclockwise around the cone point p_k; p_1 sits at (0,0,1)
        r1 = dz(2j * a1)
        r2 = word(inv2(dz(1j * a1)), S3, dz(2j * a2), inv2(S3), dz(1j * a1))
        r3 = word(S2, dz(2j * a3), inv2(S2))
        alt2 = word(S2, inv2(dz(-1j * a3)), inv2(S1), dz(2j * a2), S1, dz(-1j * a3), inv2(S2))
        alt3 = word(inv2(dz(1j * a1)), S3, inv2(dz(1j * a2)), inv2(S1), dz(2j * a3),
                    S1, dz(1j * a2), inv2(S3), dz(1j * a1))
    else:
        l1, l2, l3 = g.params
        r1 = dz(2 * l1)
        r2 = word(S3, dz(-2 * l2), inv2(S3))
        r3 = word(dz(l1), S2, dz(-2 * l3), inv2(S2), inv2(dz(l1)))
        alt2 = word(dz(l1), S2, inv2(dz(l3)), inv2(S1), dz(2 * l2), S1, dz(l3), inv2(S2), inv2(dz(l1)))
        alt3 = word(S3, dz(l2), inv2(S1), dz(2 * l3), S1, inv2(dz(l2)), inv2(S3))
    identity = np.eye(2, dtype=complex)
    return Holonomy(
        kind=g.kind,
        matrices={"1": r1, "2": r2, "3": r3},
        alternatives={"2": alt2, "3": alt3},
        spine=(inv2(r3), r2, identity),
        lift_pairs=PANTS_LIFT_PAIRS,
        lift_labels=("1", "2", "3"),
    )

def block_holonomy(g: BlockGeometry) -> Holonomy:
    s = {key: ss(value) for key, value in g.side.items()}
    S41, S31, S21, S42, S12 = s[(4, 1)], s[(3, 1)], s[(2, 1)], s[(4, 2)], s[(1, 2)]
    a, l = g.a, g.l
    if g.kind == "fsl":
        # gamma_13 goes clockwise, the others counterclockwise, seen from above T_3
        r12 = dz(2j * a(1, 2))
        r13 = word(S41, dz(-2j * a(1, 3)), inv2(S41))
        r14 = word(dz(l(1, 2)), S31, dz(2j * a(1, 4)), inv2(S31), inv2(dz(l(1, 2))))
        alt14 = word(S41, dz(l(1, 3)), inv2(S21), dz(-2j * a(1, 4)), S21, inv2(dz(l(1, 3))), inv2(S41))
        r23 = word(inv2(dz(1j * a(1, 2))), S42, dz(2j * a(2, 3)), inv2(S42), dz(1j * a(1, 2)))
        r24 = word(inv2(dz(1j * a(1, 2))), S42, dz(l(2, 3)), inv2(S12), dz(-2j * a(2, 4)),
                   S12, inv2(dz(l(2, 3))), inv2(S42), dz(1j * a(1, 2)))
        fourth = r14 @ r13
        r34 = inv2(fourth)
    else:
        r12 = dz(-2 * l(1, 2))
        r13 = word(S41, dz(-2 * l(1, 3)), inv2(S41))
        r14 = word(inv2(dz(1j * a(1, 2))), S31, dz(-2 * l(1, 4)), inv2(S31), dz(1j * a(1, 2)))
        alt14 = word(S41, dz(1j * a(1, 3)), inv2(S21), dz(-2 * l(1, 4)), S21, inv2(dz(1j * a(1, 3))), inv2(S41))
        r23 = word(dz(l(1, 2)), S42, dz(2 * l(2, 3)), inv2(S42), inv2(dz(l(1, 2))))
        r24 = word(dz(l(1, 2)), S42, dz(1j * a(2, 3)), inv2(S12), dz(2 * l(2, 4)),
                   S12, inv2(dz(1j * a(2, 3))), inv2(S42), inv2(dz(l(1, 2))))
        fourth = inv2(r14) @ r13
        r34 = inv2(r13) @ r14
    identity = np.eye(2, dtype=complex)
    return Holonomy(
        kind=g.kind,
        matrices={"12": r12, "13": r13, "14": r14, "23": r23, "24": r24, "34": r34},
        alternatives={"14": alt14},
        spine=(r13, r23, identity, fourth),
        lift_pairs=BLOCK_LIFT_PAIRS,
        lift_labels=("12", "13", "14", "23", "24", "34"),
    )

def conjugate(hol: Holonomy, X: np.ndarray) -> Holonomy:
    X_inv = inv2(X)
    move = lambda M: X @ M @ X_inv
    return Holonomy(
        kind=hol.kind,
        matrices={key: move(M) for key, M in hol.matrices.items()},
        alternatives={key: move(M) for key, M in hol.alternatives.items()},
        spine=tuple(move(M) for M in hol.spine),
        lift_pairs=hol.lift_pairs,
        lift_labels=hol.lift_labels,
    )

def mod_sign_matrix_residual(A: np.ndarray, B: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(A).max()))
    return float(min(np.abs(A - B).max(), np.abs(A + B).max()) / scale)

def random_sl2(rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    entries = rng.normal(scale=spread, size=(2, 2)) + 1j * rng.normal(scale=spread, size=(2, 2))
    det = np.linalg.det(entries)
    return entries / np.sqrt(det)

def random_pants_geometry(rng: np.random.Generator, kind: str, max_tries: int = 10000) -> PantsGeometry:
    sampling = get_config().sampling
    if kind == "boundary":
        return PantsGeometry("boundary", tuple(rng.uniform(*sampling.length_range, size=3)))
    for _ in range(max_tries):
        params = rng.uniform(*sampling.pants_angle_range, size=3)
        if params.sum() < np.pi - sampling.margin:
            return PantsGeometry("cone", tuple(params))
    raise InputError(f"No valid cone pants found in {max_tries} draws")

def random_block_geometry(rng: np.random.Generator, kind: str) -> BlockGeometry:
    if kind == "fsl":
        return BlockGeometry("fsl", random_angle_shape(rng))
    return BlockGeometry("dual", random_length_shape(rng))
