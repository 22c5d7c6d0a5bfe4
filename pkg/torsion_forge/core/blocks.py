"""
Blocks Module - Torsion of pairs of pants and (dual) D-blocks.

Every piece is computed twice: by its closed formula in sines and hyperbolic
sines, and directly as the torsion of the adjoint-twisted spine complex with
the homology basis {I_k (x) [gamma_k]}. The two must agree modulo sign.

Key components:
- `pants_torsion`, `dblock_torsion`: Closed form, direct, or both, as a `BlockTorsionReport`.
- `s_invariant`, `verify_gram_identity`, `expansion_identity`: The S-invariant
  of a block and the identity S^2 = det G.
- `pants_lemma_checks`, `block_lemma_checks`: Invariant-vector determinants
  against their closed forms.
- `holonomy_checks`: Relations, traces and alternative factorizations.

Integration:
- Used by `assembly` for the Mayer-Vietoris product and by `sweeps` for the
  property suites.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .config import get_config
from .errors import InputError, VerificationError
from .gram import PAIRS, gram, pair_label
from .hyptrig import require_nonvanishing
from .rep import (BlockGeometry, Holonomy, PantsGeometry, block_holonomy, inv2,
                  invariant_vector, mod_sign_matrix_residual, pants_holonomy, twist)
from .torsion import TorsionValue, chain_torsion, numerical_rank, twisted_graph_complex

logger = logging.getLogger(__name__)

METHODS = ("closed", "direct", "both")

@dataclass
class BlockTorsionReport:
    piece: str
    kind: str
    closed_form: Optional[TorsionValue] = None
    direct: Optional[TorsionValue] = None
    residual: float = float("nan")
    s_invariant: Optional[complex] = None
    homology_dims: Optional[Tuple[int, int]] = None
    normalization: str = "frame"
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def value(self) -> TorsionValue:
        return self.direct if self.closed_form is None else self.closed_form

    def passed(self, tol: Optional[float] = None) -> bool:
        if tol is None:
            tol = get_config().numerics.tolerance
        if self.closed_form is None or self.direct is None:
            return True
        return self.residual <= tol

def _sin(x: float, name: str) -> float:
    return require_nonvanishing(float(np.sin(x)), f"sin {name}")

def _sinh(x: float, name: str) -> float:
    return require_nonvanishing(float(np.sinh(x)), f"sinh {name}")

def pants_closed_form(g: PantsGeometry) -> TorsionValue:
    if g.kind == "cone":
        product = np.prod([_sin(a, f"alpha{k + 1}") for k, a in enumerate(g.params)])
        return TorsionValue(1j / (16 * product))
    product = np.prod([_sinh(l, f"l{k + 1}") for k, l in enumerate(g.params)])
    return TorsionValue(1 / (16 * product))

def spine_complex(hol: Holonomy, normalize: str = "frame", lift_scales: Optional[Sequence[complex]] = None):
    """Twisted spine complex; `lift_scales` rescales the invariant vector of each lift, in `lift_labels` order."""
    vectors = hol.lift_vectors(normalize)
    if lift_scales is not None:
        if len(lift_scales) != len(vectors):
            raise InputError(f"Expected {len(vectors)} lift scales, got {len(lift_scales)}")
        vectors = [complex(require_nonvanishing(scale, "lift scale")) * v for scale, v in zip(lift_scales, vectors)]
    return twisted_graph_complex(hol.spine, hol.lift_pairs, vectors)

def _direct(hol: Holonomy, normalize: str, rng: Optional[np.random.Generator],
            lift_scales: Optional[Sequence[complex]] = None):
    cx = spine_complex(hol, normalize, lift_scales)
    rank = numerical_rank(cx.boundary(1))
    homology_dims = (cx.dims[0] - rank, cx.dims[1] - rank)
    return chain_torsion(cx, rng=rng), homology_dims

def pants_direct(g: PantsGeometry, normalize: str = "frame",
                 rng: Optional[np.random.Generator] = None) -> TorsionValue:
    return _direct(pants_holonomy(g), normalize, rng)[0]

def pants_torsion(g: PantsGeometry, method: str = "both", normalize: str = "frame",
                  rng: Optional[np.random.Generator] = None,
                  lift_scales: Optional[Sequence[complex]] = None) -> BlockTorsionReport:
    if method not in METHODS:
        raise InputError(f"Unknown method '{method}', expected one of {METHODS}")
    report = BlockTorsionReport(piece="pants", kind=g.kind, normalization=normalize)
    report.details["params"] = list(g.params)
    report.details["sides"] = list(g.sides)
    if method in ("closed", "both"):
        report.closed_form = pants_closed_form(g)
    if method in ("direct", "both"):
        report.direct, report.homology_dims = _direct(pants_holonomy(g), normalize, rng, lift_scales)
    if method == "both":
        report.residual = report.closed_form.residual(report.direct)
        logger.debug(f"Pants {g.kind} {g.params}: residual {report.residual:.3e}")
    return report

def dblock_closed_form(g: BlockGeometry) -> TorsionValue:
    s24, s34 = _sinh(g.s(2, 4), "s24"), _sinh(g.s(3, 4), "s34")
    if g.kind == "fsl":
        numerator = 1j * _sinh(g.l(1, 4), "l14") * s24 * s34
        denominator = 32 * _sin(g.a(1, 2), "alpha12") * _sin(g.a(1, 3), "alpha13") * _sin(g.a(2, 3), "alpha23")
    else:
        numerator = 1j * _sin(g.a(1, 4), "alpha14") * s24 * s34
        denominator = 32 * _sinh(g.l(1, 2), "l12") * _sinh(g.l(1, 3), "l13") * _sinh(g.l(2, 3), "l23")
    return TorsionValue(numerator / denominator)

def dblock_direct(g: BlockGeometry, normalize: str = "frame",
                  rng: Optional[np.random.Generator] = None) -> TorsionValue:
    return _direct(block_holonomy(g), normalize, rng)[0]

def s_invariant(g: BlockGeometry, facet_choice: Tuple[int, int, int, int] = (1, 2, 3, 4)) -> complex:
    if sorted(facet_choice) != [1, 2, 3, 4]:
        raise InputError(f"Facet choice must be a permutation of 1..4, got {facet_choice}")
    a, b, c, d = facet_choice
    shared = np.sinh(g.s(a, d)) * np.sinh(g.s(b, d))
    if g.kind == "fsl":
        value = 1j * np.sinh(g.l(c, d)) * shared * np.sin(g.a(a, d)) * np.sin(g.a(b, d)) * np.sin(g.a(c, d))
    else:
        value = 1j * np.sin(g.a(c, d)) * shared * np.sinh(g.l(a, d)) * np.sinh(g.l(b, d)) * np.sinh(g.l(c, d))
    return complex(value)

def s_invariant_spread(g: BlockGeometry) -> float:
    """Largest deviation of S over the 24 facet orderings, relative to |S|."""
    values = [s_invariant(g, perm) for perm in itertools.permutations((1, 2, 3, 4))]
    reference = values[0]
    return max(abs(v - reference) for v in values) / max(1.0, abs(reference))

def block_gram_determinant(g: BlockGeometry) -> complex:
    return complex(np.linalg.det(gram(g.shape)))

def verify_gram_identity(g: BlockGeometry) -> Dict[str, Any]:
    S = s_invariant(g)
    det = block_gram_determinant(g)
    residual = abs(S * S - det) / max(1.0, abs(det))
    return {"kind": g.kind, "s_invariant": S, "s_squared": S * S, "gram_det": det, "residual": residual}

def expansion_identity(g: BlockGeometry, facet_choice: Tuple[int, int, int, int] = (1, 2, 3, 4)) -> Dict[str, float]:
    a, b, c, d = facet_choice
    cosh_ad, cosh_bd, cosh_cd = (np.cosh(g.s(x, d)) for x in (a, b, c))
    squares = cosh_ad ** 2 + cosh_bd ** 2 + cosh_cd ** 2
    product = 2 * cosh_ad * cosh_bd * cosh_cd
    short = np.sinh(g.s(a, d)) ** 2 * np.sinh(g.s(b, d)) ** 2
    if g.kind == "fsl":
        lhs = np.sinh(g.l(c, d)) ** 2 * short
        rhs = product + squares - 1
    else:
        lhs = np.sin(g.a(c, d)) ** 2 * short
        rhs = product - squares + 1
    return {"lhs": float(lhs), "rhs": float(rhs), "residual": float(abs(lhs - rhs) / max(1.0, abs(rhs)))}

def dblock_torsion(g: BlockGeometry, method: str = "both", normalize: str = "frame",
                   rng: Optional[np.random.Generator] = None,
                   lift_scales: Optional[Sequence[complex]] = None) -> BlockTorsionReport:
    if method not in METHODS:
        raise InputError(f"Unknown method '{method}', expected one of {METHODS}")
    report = BlockTorsionReport(piece="dblock", kind=g.kind, normalization=normalize)
    report.s_invariant = s_invariant(g)
    report.details["alpha"] = {pair_label(p): g.alpha[p] for p in PAIRS}
    report.details["length"] = {pair_label(p): g.length[p] for p in PAIRS}
    report.details["gram_det"] = block_gram_determinant(g)
    if method in ("closed", "both"):
        report.closed_form = dblock_closed_form(g)
    if method in ("direct", "both"):
        report.direct, report.homology_dims = _direct(block_holonomy(g), normalize, rng, lift_scales)
    if method == "both":
        report.residual = report.closed_form.residual(report.direct)
        logger.debug(f"D-block {g.kind}: residual {report.residual:.3e}")
    return report

def require_agreement(report: BlockTorsionReport, tol: Optional[float] = None) -> BlockTorsionReport:
    if not report.passed(tol):
        raise VerificationError(
            f"{report.piece} closed form {report.closed_form} and direct {report.direct} disagree",
            residual=report.residual)
    return report

def _det(*columns: np.ndarray) -> complex:
    return complex(np.linalg.det(np.column_stack(columns)))

def _sign_residual(numeric: complex, closed: complex) -> float:
    return min(abs(numeric - closed), abs(numeric + closed)) / max(1.0, abs(closed))

def _fixed(M: np.ndarray) -> np.ndarray:
    return invariant_vector(np.asarray(M).T)

def pants_lemma_checks(g: PantsGeometry) -> Dict[str, Dict[str, complex]]:
    hol = pants_holonomy(g)
    r2, r3 = hol.matrices["2"], hol.matrices["3"]
    I1, I2, I3 = (_fixed(hol.matrices[key]) for key in ("1", "2", "3"))
    s1, s2, s3 = g.sides
    T2, T3inv = twist(r2), twist(inv2(r3))
    if g.kind == "cone":
        a1, a2, a3 = g.params
        checks = {
            "det": (_det(I1, I2, I3), -0.5j * np.sin(a1) * np.sinh(s2) * np.sinh(s3)),
            "det5": (_det(I1 - T3inv @ I1, I2 - T3inv @ I2, I3 - T2 @ I3),
                     4j * np.sin(a1) * np.sin(a2) * np.sin(a3) ** 3 * np.sinh(s1) ** 2 * np.sinh(s2) ** 2),
        }
    else:
        l1, l2, l3 = g.params
        checks = {
            "ldet": (_det(I1, I2, I3), -0.5 * np.sinh(l1) * np.sinh(s2) * np.sinh(s3)),
            "detl5": (_det(I1 - T2 @ I1, I2 - T3inv @ I2, I3 - T2 @ I3),
                      4 * np.sinh(l1) * np.sinh(l2) ** 3 * np.sinh(l3) * np.sinh(s1) ** 2 * np.sinh(s3) ** 2),
        }
    return {name: {"numeric": num, "closed": closed, "residual": _sign_residual(num, closed)}
            for name, (num, closed) in checks.items()}

def block_lemma_checks(g: BlockGeometry) -> Dict[str, Dict[str, complex]]:
    hol = block_holonomy(g)
    I = {key: _fixed(M) for key, M in hol.matrices.items()}
    T13, T23 = twist(hol.matrices["13"]), twist(hol.matrices["23"])
    sh = lambda x: np.sinh(x)
    s, a, l = g.s, g.a, g.l
    triples = {
        "det_12_13_14": _det(I["12"], I["13"], I["14"]),
        "det_12_23_24": _det(I["12"], I["23"], I["24"]),
        "det_13_23_34": _det(I["13"], I["23"], I["34"]),
        "det_14_24_34": _det(I["14"], I["24"], I["34"]),
    }
    differences = _det(I["12"] - T13 @ I["12"], I["14"] - T13 @ I["14"], I["24"] - T23 @ I["24"])
    if g.kind == "fsl":
        closed = {
            "det_12_13_14": -0.5 * sh(l(1, 2)) * sh(s(3, 1)) * sh(s(4, 1)),
            "det_12_23_24": 0.5 * sh(l(1, 2)) * sh(s(3, 2)) * sh(s(4, 2)),
            "det_13_23_34": -0.5 * sh(l(1, 3)) * sh(s(2, 3)) * sh(s(4, 3)),
            "det_14_24_34": 0.5 * sh(l(1, 4)) * sh(s(2, 4)) * sh(s(3, 4)),
            "det4": 4j * np.sin(a(1, 2)) * np.sin(a(1, 3)) ** 2 * sh(l(1, 3)) * sh(l(2, 3))
                    * sh(s(1, 2)) * sh(s(2, 1)) * sh(s(4, 1)) ** 2,
        }
    else:
        closed = {
            "det_12_13_14": 0.5j * np.sin(a(1, 2)) * sh(s(3, 1)) * sh(s(4, 1)),
            "det_12_23_24": -0.5j * np.sin(a(1, 2)) * sh(s(3, 2)) * sh(s(4, 2)),
            "det_13_23_34": 0.5j * np.sin(a(1, 3)) * sh(s(2, 3)) * sh(s(4, 3)),
            "det_14_24_34": -0.5j * np.sin(a(1, 4)) * sh(s(2, 4)) * sh(s(3, 4)),
            "det4": -4 * np.sin(a(1, 3)) * np.sin(a(2, 3)) * sh(l(1, 2)) * sh(l(1, 3)) ** 2
                    * sh(s(1, 2)) * sh(s(2, 1)) * sh(s(4, 1)) ** 2,
        }
    numeric = dict(triples, det4=differences)
    return {name: {"numeric": numeric[name], "closed": complex(closed[name]),
                   "residual": _sign_residual(numeric[name], closed[name])} for name in closed}

def _trace_residual(M: np.ndarray, expected: float) -> float:
    trace = complex(np.trace(M))
    return min(abs(trace - expected), abs(trace + expected)) / max(1.0, abs(expected))

def holonomy_checks(g) -> Dict[str, float]:
    """Residuals of the relations, traces and factorization identities of one piece."""
    checks: Dict[str, float] = {}
    if isinstance(g, PantsGeometry):
        hol = pants_holonomy(g)
        r1, r2, r3 = (hol.matrices[key] for key in ("1", "2", "3"))
        checks["relation"] = mod_sign_matrix_residual(r1 @ r2 @ r3, np.eye(2))
        for k, p in enumerate(g.params):
            expected = 2 * np.cos(p) if g.kind == "cone" else 2 * np.cosh(p)
            checks[f"trace_{k + 1}"] = _trace_residual(hol.matrices[str(k + 1)], expected)
    else:
        hol = block_holonomy(g)
        for pair in PAIRS:
            expected = 2 * np.cos(g.alpha[pair]) if g.kind == "fsl" else 2 * np.cosh(g.length[pair])
            checks[f"trace_{pair_label(pair)}"] = _trace_residual(hol.matrices[pair_label(pair)], expected)
        for (j, k), label in zip(hol.lift_pairs, hol.lift_labels):
            pair = (int(label[0]), int(label[1]))
            expected = 2 * np.cos(g.alpha[pair]) if g.kind == "fsl" else 2 * np.cosh(g.length[pair])
            checks[f"spine_trace_{label}"] = _trace_residual(hol.spine_word((j, k)), expected)
    for key, alternative in hol.alternatives.items():
        checks[f"factorization_{key}"] = mod_sign_matrix_residual(hol.matrices[key], alternative)
    for key, M in hol.matrices.items():
        vector = _fixed(M)
        checks[f"fixed_{key}"] = float(np.abs(twist(M) @ vector - vector).max() / max(1.0, np.abs(vector).max()))
    return checks

def trace_closure(g: BlockGeometry) -> Dict[str, float]:
    return {key: value for key, value in holonomy_checks(g).items() if key.startswith("trace_")}
