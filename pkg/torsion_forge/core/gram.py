"""
Gram Module - Gram matrix function of truncated hyperideal tetrahedra.

A tetrahedron shape is six complex edge parameters u_jk. Angle shapes carry
u_jk = i*alpha_jk with the edge e_jk = H_j cap H_k indexed by the two
hexagonal faces it joins; length shapes carry u_jk = l_jk with e_jk joining
the truncation triangles T_j and T_k. The same physical edge therefore has
complementary indices in the two labellings, and `dual_pair` translates
between them. With this convention each conversion is a literal cofactor
formula of the other Gram matrix.

Key components:
- `TetShape`: Immutable shape value with `from_angles` / `from_lengths` constructors.
- `gram`, `gram_cofactor`: The Gram matrix function and its signed cofactors.
- `lengths_from_angles`, `angles_from_lengths`: Cofactor conversions.
- `validate_hyperideal`: Vertex-sum existence criterion with diagnostics.
- `random_angle_shape`, `random_length_shape`: Seeded samplers for sweeps.

Integration:
- Used by `rep` for block holonomies, by `blocks` for closed forms and by
  `assembly` for the main closed formula.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import get_config
from .errors import DomainError, InputError, InvalidShapeError
from .hyptrig import safe_arccosh

logger = logging.getLogger(__name__)

PAIRS: Tuple[Tuple[int, int], ...] = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
PAIR_INDEX: Dict[Tuple[int, int], int] = {}
for _index, (_j, _k) in enumerate(PAIRS):
    PAIR_INDEX[(_j, _k)] = _index
    PAIR_INDEX[(_k, _j)] = _index

SHAPE_KINDS = ("angles", "lengths", "mixed")

def pair_label(pair: Tuple[int, int]) -> str:
    j, k = sorted(pair)
    return f"{j}{k}"

def parse_pair(label: str) -> Tuple[int, int]:
    if len(label) != 2 or not label.isdigit():
        raise InputError(f"Edge label must be two digits, got '{label}'")
    pair = (int(label[0]), int(label[1]))
    if pair not in PAIR_INDEX:
        raise InputError(f"Edge label '{label}' is not a pair of distinct indices in 1..4")
    return tuple(sorted(pair))

def dual_pair(pair: Tuple[int, int]) -> Tuple[int, int]:
    """The complementary pair {1,2,3,4} minus {j,k}."""
    if pair not in PAIR_INDEX:
        raise InputError(f"Not an edge pair: {pair}")
    rest = sorted({1, 2, 3, 4} - set(pair))
    return (rest[0], rest[1])

@dataclass(frozen=True)
class TetShape:
    """Six edge parameters ordered as PAIRS, plus the kind tag."""

    u: Tuple[complex, ...]
    kind: str = "mixed"

    def __post_init__(self):
        values = tuple(complex(x) for x in self.u)
        if len(values) != 6:
            raise InputError(f"A tetrahedron shape needs 6 edge parameters, got {len(values)}")
        if not all(np.isfinite(x) for x in values):
            raise InputError("Edge parameters must be finite")
        if self.kind not in SHAPE_KINDS:
            raise InputError(f"Unknown shape kind '{self.kind}'")
        object.__setattr__(self, "u", values)

    @classmethod
    def from_angles(cls, alphas: Sequence[float]) -> "TetShape":
        return cls(tuple(1j * float(a) for a in alphas), "angles")

    @classmethod
    def from_lengths(cls, lengths: Sequence[float]) -> "TetShape":
        return cls(tuple(complex(float(l)) for l in lengths), "lengths")

    @property
    def alpha(self) -> Tuple[float, ...]:
        return tuple(float(x.imag) for x in self.u)

    @property
    def length(self) -> Tuple[float, ...]:
        return tuple(float(x.real) for x in self.u)

    def value(self, pair: Tuple[int, int]) -> complex:
        return self.u[PAIR_INDEX[pair]]

    def param(self, pair: Tuple[int, int]) -> float:
        """The real angle or length of an edge, depending on the kind."""
        x = self.value(pair)
        return float(x.imag) if self.kind == "angles" else float(x.real)

def gram(shape: TetShape) -> np.ndarray:
    G = np.eye(4, dtype=complex)
    for (j, k), u in zip(PAIRS, shape.u):
        G[j - 1, k - 1] = G[k - 1, j - 1] = -np.cosh(u)
    return G

def gram_cofactor(G: np.ndarray, s: int, t: int) -> complex:
    if s not in (1, 2, 3, 4) or t not in (1, 2, 3, 4):
        raise InputError(f"Cofactor index ({s}, {t}) out of range 1..4")
    minor = np.delete(np.delete(np.asarray(G), s - 1, axis=0), t - 1, axis=1)
    return complex((-1) ** (s + t) * np.linalg.det(minor))

def cofactor_matrix(G: np.ndarray) -> np.ndarray:
    return np.array([[gram_cofactor(G, s, t) for t in range(1, 5)] for s in range(1, 5)])

def _normalized_cofactors(G: np.ndarray) -> Dict[Tuple[int, int], float]:
    tol = get_config().numerics.unimodular_tol
    C = cofactor_matrix(G)
    ratios = {}
    for s, t in PAIRS:
        product = C[s - 1, s - 1] * C[t - 1, t - 1]
        scale = max(1.0, abs(product))
        if abs(product.imag) > tol * scale or product.real <= 0:
            raise InvalidShapeError(
                f"Cofactor product G^{s}{s}*G^{t}{t} = {product:.6g} is not positive",
                [f"cofactors {s}{s} and {t}{t} must share a sign"])
        ratio = C[s - 1, t - 1] / np.sqrt(product.real)
        if abs(ratio.imag) > tol * max(1.0, abs(ratio)):
            raise InvalidShapeError(f"Cofactor ratio for pair {s}{t} is not real: {ratio:.6g}")
        ratios[(s, t)] = float(ratio.real)
    return ratios

def validate_hyperideal(shape: TetShape) -> Tuple[bool, List[str]]:
    if shape.kind != "angles":
        return False, [f"validity criterion needs an angle shape, got kind '{shape.kind}'"]
    diagnostics = []
    for (j, k), u in zip(PAIRS, shape.u):
        if abs(u.real) > 0:
            diagnostics.append(f"edge {j}{k}: angle parameter has a real part")
        if not 0.0 < u.imag < np.pi:
            diagnostics.append(f"edge {j}{k}: angle {u.imag:.6g} outside (0, pi)")
    for m in (1, 2, 3, 4):
        incident = [pair for pair in PAIRS if m not in pair]
        total = sum(shape.param(pair) for pair in incident)
        if total >= np.pi:
            edges = ", ".join(pair_label(pair) for pair in incident)
            diagnostics.append(f"vertex {m}: angles at edges {edges} sum to {total:.6g} >= pi")
    return not diagnostics, diagnostics

def lengths_from_angles(shape: TetShape) -> TetShape:
    """Edge lengths, indexed by truncation triangles, of a hyperideal angle shape."""
    if shape.kind != "angles":
        raise InvalidShapeError(f"lengths_from_angles needs an angle shape, got '{shape.kind}'")
    valid, diagnostics = validate_hyperideal(shape)
    if not valid:
        raise InvalidShapeError("Not a hyperideal tetrahedron", diagnostics)
    ratios = _normalized_cofactors(gram(shape))
    lengths = []
    for pair in PAIRS:
        try:
            lengths.append(safe_arccosh(ratios[pair]))
        except DomainError as e:
            raise InvalidShapeError(f"Edge {pair_label(pair)}: {e}") from e
    return TetShape.from_lengths(lengths)

def angles_from_lengths(shape: TetShape) -> TetShape:
    """Dihedral angles, indexed by hexagonal faces, of a length shape."""
    if shape.kind != "lengths":
        raise InvalidShapeError(f"angles_from_lengths needs a length shape, got '{shape.kind}'")
    bad = [pair_label(pair) for pair, u in zip(PAIRS, shape.u) if not u.real > 0 or u.imag != 0]
    if bad:
        raise InvalidShapeError("Edge lengths must be positive reals",
                                [f"edge {label}: non-positive length" for label in bad])
    ratios = _normalized_cofactors(gram(shape))
    angles = []
    for pair in PAIRS:
        cos_alpha = ratios[pair]
        if not -1.0 < cos_alpha < 1.0:
            raise InvalidShapeError(
                f"No tetrahedron with these lengths: cos of angle {pair_label(pair)} is {cos_alpha:.6g}")
        angles.append(float(np.arccos(cos_alpha)))
    return TetShape.from_angles(angles)

def random_angle_shape(rng: np.random.Generator, low: Optional[float] = None,
                       high: Optional[float] = None, margin: Optional[float] = None,
                       max_tries: int = 10000) -> TetShape:
    sampling = get_config().sampling
    low = sampling.angle_range[0] if low is None else low
    high = sampling.angle_range[1] if high is None else high
    margin = sampling.margin if margin is None else margin
    for _ in range(max_tries):
        alphas = rng.uniform(low, high, size=6)
        shape = TetShape.from_angles(alphas)
        if all(sum(shape.param(p) for p in PAIRS if m not in p) < np.pi - margin
               for m in (1, 2, 3, 4)):
            return shape
    raise InputError(f"No valid angle shape found in {max_tries} draws from ({low}, {high})")

def random_length_shape(rng: np.random.Generator, **kwargs) -> TetShape:
    return lengths_from_angles(random_angle_shape(rng, **kwargs))
