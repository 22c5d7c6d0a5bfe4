"""
Hyperbolic Trigonometry Module - Scalar kernel and 2x2 matrix builders.

All holonomy matrices in the package are words in two families of SL(2,C)
elements: the diagonal `dz(z) = diag(e^{z/2}, e^{-z/2})` and the symmetric
`ss(s)` built from cosh(s/2), sinh(s/2). The side-length helpers solve the
hyperbolic law of cosines for triangles (cone pants, truncation triangles) and
right-angled hexagons (boundary pants, hexagonal faces).

Key components:
- `dz`, `ss`: Matrix builders.
- `triangle_side`, `hexagon_side`: Law-of-cosines solvers.
- `safe_arccosh`: Principal arccosh with a clamped slack window below 1.
- `close`: Absolute-or-relative comparison used across the package.

Integration:
- Used by `gram` for the cofactor conversions and by `rep` for the holonomies.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import get_config
from .errors import DegenerateElementError, DomainError

logger = logging.getLogger(__name__)

def _require_finite(*values: complex) -> None:
    for value in values:
        if not np.isfinite(value):
            raise DomainError(f"Non-finite argument: {value}")

def dz(z: complex) -> np.ndarray:
    _require_finite(z)
    half = np.exp(complex(z) / 2)
    return np.array([[half, 0], [0, 1 / half]], dtype=complex)

def ss(s: complex) -> np.ndarray:
    _require_finite(s)
    c = np.cosh(complex(s) / 2)
    h = np.sinh(complex(s) / 2)
    return np.array([[c, h], [h, c]], dtype=complex)

def safe_arccosh(x: float, slack: Optional[float] = None) -> float:
    """Real arccosh for x >= 1; values in [1 - slack, 1) are clamped to 0."""
    if slack is None:
        slack = get_config().numerics.arccosh_slack
    x = float(np.real(x))
    if not np.isfinite(x):
        raise DomainError(f"arccosh of non-finite value {x}")
    if x < 1.0 - slack:
        raise DomainError(f"arccosh argument {x:.17g} below 1")
    if x <= 1.0:
        return 0.0
    return float(np.arccosh(x))

def triangle_side(alpha_opposite: float, alpha_adj1: float, alpha_adj2: float) -> float:
    angles = (alpha_opposite, alpha_adj1, alpha_adj2)
    for angle in angles:
        _require_finite(angle)
        if not 0.0 < angle < np.pi:
            raise DomainError(f"Triangle angle {angle} outside (0, pi)")
    if sum(angles) >= np.pi:
        raise DomainError(f"Triangle angle sum {sum(angles):.17g} is not below pi")
    cosh_s = (np.cos(alpha_opposite) + np.cos(alpha_adj1) * np.cos(alpha_adj2)) / (
        np.sin(alpha_adj1) * np.sin(alpha_adj2))
    return safe_arccosh(cosh_s)

def hexagon_side(l_opposite: float, l_adj1: float, l_adj2: float) -> float:
    lengths = (l_opposite, l_adj1, l_adj2)
    for length in lengths:
        _require_finite(length)
        if not length > 0.0:
            raise DomainError(f"Hexagon side length {length} must be positive")
    cosh_s = (np.cosh(l_opposite) + np.cosh(l_adj1) * np.cosh(l_adj2)) / (
        np.sinh(l_adj1) * np.sinh(l_adj2))
    return safe_arccosh(cosh_s)

def opposite_sides(params: Sequence[float], kind: str) -> Tuple[float, float, float]:
    """Side s_k opposite to the k-th parameter of a triangle ("cone") or hexagon ("boundary")."""
    solver = triangle_side if kind == "cone" else hexagon_side
    a1, a2, a3 = params
    return (solver(a1, a2, a3), solver(a2, a1, a3), solver(a3, a1, a2))

def law_of_sines_ratios(params: Sequence[float], kind: str) -> Tuple[float, float, float]:
    sides = opposite_sides(params, kind)
    denominator = np.sin if kind == "cone" else np.sinh
    return tuple(float(np.sinh(s) / denominator(p)) for s, p in zip(sides, params))

def close(a: complex, b: complex, tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = get_config().numerics.tolerance
    return bool(abs(a - b) <= tol * max(1.0, abs(a), abs(b)))

def require_nonvanishing(value: complex, name: str, floor: Optional[float] = None) -> complex:
    if floor is None:
        floor = get_config().numerics.degenerate_floor
    if abs(value) < floor:
        raise DegenerateElementError(f"Degenerate geometry: {name} = {value:.3e}")
    return value
