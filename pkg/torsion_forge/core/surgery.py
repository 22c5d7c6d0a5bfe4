"""
Surgery Module - Peripheral holonomy, change of curves and Dehn filling.

Logarithmic holonomies per boundary torus:

- fsl: meridian u_m = 2i*alpha; longitude u_l = sum of the real edge lengths
  along the torus (real model, see DESIGN.md). Torsion is computed with
  respect to the meridians.
- doubles: longitude u_l = 2l; meridian u_m = i*theta, theta the sum of the
  dihedral angles along the torus. Torsion is computed with respect to the
  longitudes.

For a system of curves mu = p*m + q*l the torsion changes by the Jacobian
det(d u_mu / d u_base); filling along mu multiplies by
prod 1 / (4 sinh^2(u_gamma / 2)) over the core curves gamma.

Key components:
- `meridian_holonomy`, `longitude_holonomy`, `peripheral_jacobian`.
- `change_of_curves`, `core_curve`, `surgery_apply`, `filled_torsion`.
- `solve_filling`: Damped Gauss-Newton on p*u_m + q*u_l = 2*pi*i.

Integration:
- Drives the `--curves` and `--solve` options of `torsion-forge assemble`.
"""
import logging
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .assembly import CharacterPoint, closed_form_torsion, piece_geometries
from .config import get_config
from .errors import DegenerateElementError, InputError, SolverError
from .gluing import GluingGraph
from .hyptrig import require_nonvanishing
from .gram import parse_pair
from .torsion import TorsionValue

logger = logging.getLogger(__name__)

Curve = Tuple[int, int]

def parse_curves(text: str, n: int) -> List[Curve]:
    """Parses "p,q;p,q;..." with one pair per torus."""
    try:
        curves = [tuple(int(x) for x in item.split(",")) for item in text.split(";") if item.strip()]
    except ValueError as e:
        raise InputError(f"Curves must look like 'p,q;p,q', got '{text}'") from e
    if any(len(curve) != 2 for curve in curves):
        raise InputError(f"Every curve needs two integers, got '{text}'")
    if len(curves) != n:
        raise InputError(f"{len(curves)} curves given for {n} tori")
    for p, q in curves:
        if (p, q) == (0, 0):
            raise InputError("Curve (0, 0) is not a slope")
    return curves

def _dblock_slots(g: GluingGraph, torus) -> List[Tuple[int, Tuple[int, int]]]:
    return [(block_id, parse_pair(slot)) for block_id, slot in torus.traversal
            if g.block(block_id).kind != "thickened_pants"]

def longitude_holonomy(g: GluingGraph, chi: CharacterPoint) -> Dict[int, complex]:
    if g.kind == "double":
        return {t.id: complex(2 * chi.values[t.id]) for t in g.tori}
    blocks, _ = piece_geometries(g, chi)
    result = {}
    for torus in g.tori:
        slots = _dblock_slots(g, torus)
        if not slots:
            raise InputError(f"Torus {torus.id} crosses no D-block edge")
        result[torus.id] = complex(sum(blocks[block_id].l(*pair) for block_id, pair in slots))
    return result

def meridian_holonomy(g: GluingGraph, chi: CharacterPoint) -> Dict[int, complex]:
    if g.kind == "fsl":
        return {t.id: 2j * chi.values[t.id] for t in g.tori}
    blocks, _ = piece_geometries(g, chi)
    result = {}
    for torus in g.tori:
        slots = _dblock_slots(g, torus)
        if not slots:
            raise InputError(f"Torus {torus.id} crosses no dual D-block edge")
        result[torus.id] = 1j * sum(blocks[block_id].a(*pair) for block_id, pair in slots)
    return result

def _varying_holonomy(g: GluingGraph, chi: CharacterPoint) -> Dict[int, complex]:
    """The peripheral holonomy that depends non-trivially on the torus parameters."""
    return longitude_holonomy(g, chi) if g.kind == "fsl" else meridian_holonomy(g, chi)

def holonomy_derivative(g: GluingGraph, chi: CharacterPoint, step: Optional[float] = None) -> np.ndarray:
    """Central differences of d u_l / d alpha (fsl) or d u_m / d l (doubles)."""
    if step is None:
        step = get_config().solver.fd_step
    x = chi.vector(g)
    columns = []
    for j in range(len(x)):
        h = step * max(1.0, abs(x[j]))
        forward, backward = x.copy(), x.copy()
        forward[j] += h
        backward[j] -= h
        up = _varying_holonomy(g, CharacterPoint.from_vector(g, forward))
        down = _varying_holonomy(g, CharacterPoint.from_vector(g, backward))
        columns.append([(up[t.id] - down[t.id]) / (2 * h) for t in g.tori])
    return np.array(columns, dtype=complex).T

def peripheral_jacobian(g: GluingGraph, chi: CharacterPoint, curves: Sequence[Curve],
                        derivative: Optional[np.ndarray] = None) -> np.ndarray:
    """d u_mu / d u_base for mu = p*m + q*l."""
    if derivative is None:
        derivative = holonomy_derivative(g, chi)
    p = np.diag([float(c[0]) for c in curves])
    q = np.diag([float(c[1]) for c in curves])
    if g.kind == "fsl":
        return p + q @ derivative / 2j
    return p @ derivative / 2 + q

def jacobian_convergence(g: GluingGraph, chi: CharacterPoint) -> Dict[str, float]:
    step = get_config().solver.fd_step
    coarse = holonomy_derivative(g, chi, step)
    fine = holonomy_derivative(g, chi, step / 2)
    difference = float(np.abs(coarse - fine).max() / max(1.0, np.abs(fine).max()))
    return {"step": step, "relative_difference": difference}

def change_of_curves(g: GluingGraph, chi: CharacterPoint, curves: Sequence[Curve],
                     base: Optional[TorsionValue] = None,
                     derivative: Optional[np.ndarray] = None) -> TorsionValue:
    if base is None:
        base = closed_form_torsion(g, chi)[0]
    det = complex(np.linalg.det(peripheral_jacobian(g, chi, curves, derivative)))
    if abs(det) < get_config().numerics.degenerate_floor:
        raise DegenerateElementError(f"Change-of-curves Jacobian is singular (det {det:.3e})")
    return base * det

def core_curve(p: int, q: int) -> Curve:
    """(r, s) with p*s - q*r = 1."""
    if gcd(p, q) != 1:
        raise InputError(f"Slope ({p}, {q}) is not primitive")
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
        old_t, t = t, old_t - quotient * t
    # old_s*p + old_t*q = old_r = +-1
    sign = 1 if old_r == 1 else -1
    return (-sign * old_t, sign * old_s)

def surgery_apply(T_mu: TorsionValue, u_gamma: Sequence[complex]) -> TorsionValue:
    factor = 1.0 + 0j
    for u in u_gamma:
        half = require_nonvanishing(complex(np.sinh(u / 2)), f"sinh(u_gamma/2) at u_gamma={u}")
        factor /= 4 * half * half
    return T_mu * factor

def core_holonomy(g: GluingGraph, chi: CharacterPoint, curves: Sequence[Curve]) -> List[complex]:
    meridians, longitudes = meridian_holonomy(g, chi), longitude_holonomy(g, chi)
    values = []
    for torus, (p, q) in zip(g.tori, curves):
        r, s = core_curve(p, q)
        values.append(r * meridians[torus.id] + s * longitudes[torus.id])
    return values

def filled_torsion(g: GluingGraph, chi: CharacterPoint, curves: Sequence[Curve]) -> Dict[str, Any]:
    base, dets = closed_form_torsion(g, chi)
    derivative = holonomy_derivative(g, chi)
    jacobian = peripheral_jacobian(g, chi, curves, derivative)
    changed = change_of_curves(g, chi, curves, base, derivative)
    u_gamma = core_holonomy(g, chi, curves)
    filled = surgery_apply(changed, u_gamma)
    d, n = g.d, g.n
    roots = np.prod([np.sqrt(det) for det in dets])
    sinh_factor = np.prod([1 / np.sinh(u / 2) ** 2 for u in u_gamma])
    explicit = None
    if g.kind == "fsl":
        explicit = 2.0 ** (3 * d - 2 * n) * np.linalg.det(jacobian) * roots * sinh_factor
    elif all(curve == (1, 0) for curve in curves):
        theta_derivative = derivative / 1j
        explicit = (1j ** n) * 2.0 ** (3 * d - 3 * n) * np.linalg.det(theta_derivative) * roots * sinh_factor
    result = {
        "curves": [list(curve) for curve in curves],
        "jacobian_det": complex(np.linalg.det(jacobian)),
        "changed": changed,
        "u_gamma": u_gamma,
        "filled": filled,
    }
    if explicit is not None:
        result["explicit"] = TorsionValue(explicit)
        result["residual"] = filled.residual(result["explicit"])
    return result

def filling_residual(g: GluingGraph, chi: CharacterPoint, curves: Sequence[Curve]) -> np.ndarray:
    meridians, longitudes = meridian_holonomy(g, chi), longitude_holonomy(g, chi)
    F = np.array([p * meridians[t.id] + q * longitudes[t.id] - 2j * np.pi
                  for t, (p, q) in zip(g.tori, curves)])
    return np.concatenate([F.real, F.imag])

def solve_filling(g: GluingGraph, curves: Sequence[Curve], initial: CharacterPoint,
                  max_iter: Optional[int] = None, tol: Optional[float] = None) -> Tuple[CharacterPoint, Dict[str, Any]]:
    """
    Damped Gauss-Newton on the filling equations in the torus parameters.

    A step is halved while it leaves the space of valid shapes or fails to
    decrease the sup norm of the residual.
    """
    settings = get_config().solver
    max_iter = settings.max_iter if max_iter is None else max_iter
    tol = settings.tol if tol is None else tol
    x = initial.vector(g)
    try:
        F = filling_residual(g, initial, curves)
    except InputError as e:
        raise SolverError(f"Initial character point is not valid: {e}") from e
    norm = float(np.abs(F).max())
    for iteration in range(max_iter + 1):
        if norm < tol:
            logger.info(f"Filling solved in {iteration} iterations, residual {norm:.3e}")
            return CharacterPoint.from_vector(g, x), {"iterations": iteration, "residual": norm}
        if iteration == max_iter:
            break
        columns = []
        for j in range(len(x)):
            h = settings.fd_step * max(1.0, abs(x[j]))
            forward, backward = x.copy(), x.copy()
            forward[j] += h
            backward[j] -= h
            try:
                up = filling_residual(g, CharacterPoint.from_vector(g, forward), curves)
                down = filling_residual(g, CharacterPoint.from_vector(g, backward), curves)
            except InputError as e:
                raise SolverError(f"Jacobian evaluation left the valid region: {e}",
                                  iterations=iteration, residual=norm) from e
            columns.append((up - down) / (2 * h))
        J = np.column_stack(columns)
        if np.linalg.matrix_rank(J) < len(x):
            raise SolverError("Filling Jacobian is singular", iterations=iteration, residual=norm)
        step = scipy.linalg.lstsq(J, -F)[0]
        damping = 1.0
        while True:
            if damping < settings.min_damping:
                raise SolverError(f"Line search stalled at residual {norm:.3e}",
                                  iterations=iteration, residual=norm)
            candidate = x + damping * step
            try:
                F_new = filling_residual(g, CharacterPoint.from_vector(g, candidate), curves)
            except InputError:
                damping /= 2
                continue
            new_norm = float(np.abs(F_new).max())
            if new_norm < norm:
                break
            damping /= 2
        x, F, norm = candidate, F_new, new_norm
        logger.debug(f"Newton iteration {iteration + 1}: residual {norm:.3e}, damping {damping:g}")
    raise SolverError(f"No convergence in {max_iter} iterations (residual {norm:.3e})",
                      iterations=max_iter, residual=norm)
