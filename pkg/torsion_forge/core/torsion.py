"""
Torsion Module - Reidemeister torsion of based chain complexes.

A complex is stored by degree: dimensions dim C_0..dim C_N, boundary matrices
d_k : C_k -> C_{k-1} and explicit homology lifts (cycles) per degree. The
torsion is the alternating product of transition determinants

    Tor = prod_k det[b_k | b~_{k-1} | h~_k ; c_k] ** ((-1) ** (k + 1))

where b_k spans the image of d_{k+1} (pivot columns of d_{k+1}) and b~_{k-1}
are the matching cells of C_k. For a two-term spine complex this is
det(C_1 basis) / det(C_0 image). Values live in C*/{+-1}.

Key components:
- `TorsionValue`: Complex number compared modulo sign.
- `BasedChainComplex`: Validated complex with homology lifts.
- `chain_torsion`, `exact_sequence_torsion`: The torsion functional.
- `twisted_graph_complex`: Adjoint-twisted complex of a two-vertex graph spine.
- `check_multiplicativity`: Tor(F) = Tor(E) Tor(G) Tor(H) for 0 -> E -> F -> G -> 0.

Integration:
- Used by `blocks` (pants and D-block spines) and `assembly` (Mayer-Vietoris sequence).
"""
import cmath
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import get_config
from .errors import InconsistentComplexError
from .rep import twist

logger = logging.getLogger(__name__)

MOD_SIGN_NOTE = "defined up to sign (mod +-1)"

@dataclass(frozen=True)
class TorsionValue:
    """A nonzero complex number considered modulo sign."""

    value: complex

    def __post_init__(self):
        value = complex(self.value)
        if value == 0 or not cmath.isfinite(value):
            raise InconsistentComplexError(f"Torsion must be finite and nonzero, got {value}")
        object.__setattr__(self, "value", value)

    def distance(self, other: "TorsionValue") -> float:
        a, b = self.value, complex(getattr(other, "value", other))
        return min(abs(a - b), abs(a + b))

    def residual(self, other: "TorsionValue") -> float:
        return self.distance(other) / max(1.0, abs(self.value))

    def equals(self, other: "TorsionValue", tol: Optional[float] = None) -> bool:
        if tol is None:
            tol = get_config().numerics.tolerance
        return self.residual(other) <= tol

    def canonical(self) -> complex:
        """Representative with nonnegative real part (positive imaginary part on the axis)."""
        v = self.value
        if v.real < 0 or (v.real == 0 and v.imag < 0):
            return -v
        return v

    def __mul__(self, other):
        return TorsionValue(self.value * complex(getattr(other, "value", other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return TorsionValue(self.value / complex(getattr(other, "value", other)))

    def __abs__(self) -> float:
        return abs(self.value)

    def __repr__(self) -> str:
        v = self.canonical()
        return f"TorsionValue(+-({v.real:.10g}{v.imag:+.10g}j))"

@dataclass
class BasedChainComplex:
    """
    Finite complex C_N -> ... -> C_0 with cell bases and homology lifts.

    `boundaries[k]` has shape (dims[k-1], dims[k]); missing degrees are zero
    maps. `homology[k]` holds one cycle per column. `expected_ranks` pins the
    rank of `boundaries[k]` when it is known exactly.
    """

    dims: Tuple[int, ...]
    boundaries: Dict[int, np.ndarray] = field(default_factory=dict)
    homology: Dict[int, np.ndarray] = field(default_factory=dict)
    cell_names: Optional[Dict[int, List[str]]] = None
    expected_ranks: Optional[Dict[int, int]] = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        top = len(self.dims) - 1
        boundaries = {}
        for k in range(1, top + 1):
            matrix = self.boundaries.get(k)
            shape = (self.dims[k - 1], self.dims[k])
            if matrix is None:
                matrix = np.zeros(shape, dtype=complex)
            matrix = np.asarray(matrix, dtype=complex)
            if matrix.shape != shape:
                raise InconsistentComplexError(
                    f"Boundary d_{k} has shape {matrix.shape}, expected {shape}")
            boundaries[k] = matrix
        extra = set(self.boundaries) - set(boundaries)
        if extra:
            raise InconsistentComplexError(f"Boundary maps given for missing degrees {sorted(extra)}")
        self.boundaries = boundaries
        homology = {}
        for k in range(top + 1):
            lifts = self.homology.get(k)
            if lifts is None:
                lifts = np.zeros((self.dims[k], 0), dtype=complex)
            lifts = np.asarray(lifts, dtype=complex)
            if lifts.ndim != 2 or lifts.shape[0] != self.dims[k]:
                raise InconsistentComplexError(
                    f"Homology lifts in degree {k} have shape {lifts.shape}, expected ({self.dims[k]}, r)")
            homology[k] = lifts
        self.homology = homology

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def boundary(self, k: int) -> np.ndarray:
        """d_k, with zero maps outside 1..top."""
        if 1 <= k <= self.top:
            return self.boundaries[k]
        rows = self.dims[k - 1] if 0 <= k - 1 <= self.top else 0
        cols = self.dims[k] if 0 <= k <= self.top else 0
        return np.zeros((rows, cols), dtype=complex)

    def homology_dims(self) -> Tuple[int, ...]:
        return tuple(self.homology[k].shape[1] for k in range(self.top + 1))

    def permuted(self, orders: Dict[int, Sequence[int]]) -> "BasedChainComplex":
        """The same complex with the cells of degree k listed as orders[k]; torsion changes by +-1."""
        perms = {k: np.asarray(orders.get(k, range(d)), dtype=int) for k, d in enumerate(self.dims)}
        for k, perm in perms.items():
            if sorted(perm.tolist()) != list(range(self.dims[k])):
                raise InconsistentComplexError(f"Order for degree {k} is not a permutation of its cells")
        names = None
        if self.cell_names is not None:
            names = {k: [cells[i] for i in perms[k]] for k, cells in self.cell_names.items()}
        return BasedChainComplex(
            dims=self.dims,
            boundaries={k: m[np.ix_(perms[k - 1], perms[k])] for k, m in self.boundaries.items()},
            homology={k: h[perms[k], :] for k, h in self.homology.items()},
            cell_names=names,
            expected_ranks=self.expected_ranks,
        )

def _scale(*matrices: np.ndarray) -> float:
    return max([1.0] + [float(np.abs(m).max()) for m in matrices if m.size])

def validate_complex(cx: BasedChainComplex, tol: Optional[float] = None) -> None:
    if tol is None:
        tol = get_config().numerics.tolerance
    for k in range(2, cx.top + 1):
        product = cx.boundary(k - 1) @ cx.boundary(k)
        if product.size and np.abs(product).max() > tol * _scale(cx.boundary(k - 1), cx.boundary(k)) ** 2:
            raise InconsistentComplexError(f"d_{k - 1} d_{k} != 0 (max entry {np.abs(product).max():.3e})")
    for k in range(cx.top + 1):
        lifts = cx.homology[k]
        if lifts.size == 0:
            continue
        image = cx.boundary(k) @ lifts
        if image.size and np.abs(image).max() > tol * _scale(cx.boundary(k), lifts) ** 2:
            raise InconsistentComplexError(f"Homology lift in degree {k} is not a cycle")
    euler_cells = sum((-1) ** k * d for k, d in enumerate(cx.dims))
    euler_homology = sum((-1) ** k * h for k, h in enumerate(cx.homology_dims()))
    if euler_cells != euler_homology:
        raise InconsistentComplexError(
            f"Euler characteristic mismatch: cells give {euler_cells}, homology gives {euler_homology}")

def _random_independent_columns(A: np.ndarray, rank: int, rng: np.random.Generator, rtol: float,
                                floor: float = 0.05) -> Optional[np.ndarray]:
    """Random greedy scan for `rank` well-conditioned independent columns, or None."""
    scale = max(1.0, float(np.linalg.norm(A, axis=0).max()))
    basis = np.zeros((A.shape[0], 0), dtype=complex)
    chosen = []
    for j in rng.permutation(A.shape[1]):
        column = A[:, j].astype(complex)
        norm = np.linalg.norm(column)
        if norm <= rtol * scale:
            continue
        residual = column
        for _ in range(2):
            residual = residual - basis @ (basis.conj().T @ residual)
        if np.linalg.norm(residual) <= floor * norm:
            continue
        basis = np.hstack([basis, (residual / np.linalg.norm(residual))[:, None]])
        chosen.append(int(j))
        if len(chosen) == rank:
            return np.sort(np.array(chosen, dtype=int))
    return None

def pivot_columns(A: np.ndarray, rtol: Optional[float] = None,
                  rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Indices of a maximal independent set of columns.

    The rank is read off pivoted QR with the threshold rtol * max(1, |R_00|),
    so rounding noise has rank 0. Without `rng` the QR pivots are returned;
    with it, a random independent set of the same size.
    """
    if rtol is None:
        rtol = get_config().numerics.rank_rtol
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return np.zeros(0, dtype=int)
    _, R, P = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    if diagonal.size == 0:
        return np.zeros(0, dtype=int)
    rank = int(np.sum(diagonal > rtol * max(1.0, diagonal[0])))
    if rng is not None and rank:
        chosen = _random_independent_columns(A, rank, rng, rtol)
        if chosen is not None:
            return chosen
        logger.debug(f"Random column scan fell short of rank {rank}, using QR pivots")
    return np.sort(P[:rank])

def numerical_rank(A: np.ndarray, rtol: Optional[float] = None) -> int:
    return len(pivot_columns(np.asarray(A, dtype=complex), rtol))

def chain_torsion(cx: BasedChainComplex, rng: Optional[np.random.Generator] = None,
                  rtol: Optional[float] = None, validate: bool = True) -> TorsionValue:
    """
    Torsion of a based complex with homology lifts.

    Worked example: 0 -> C_1 -> C_0 -> 0 with d_1 = [lam] and no homology.
    Degree 0 uses b_0 = d_1 e = lam (exponent -1), degree 1 uses b~_0 = e
    (exponent +1), so Tor = 1/lam.

    With `rng`, the pivot columns are a random independent set and random
    boundaries are added to the homology lifts; the value is unchanged
    modulo sign.
    """
    if validate:
        validate_complex(cx)
    pivots = {}
    for k in range(1, cx.top + 1):
        pivots[k] = pivot_columns(cx.boundary(k), rtol, rng)
        if cx.expected_ranks and k in cx.expected_ranks and len(pivots[k]) != cx.expected_ranks[k]:
            raise InconsistentComplexError(
                f"Rank of d_{k} is {len(pivots[k])}, expected {cx.expected_ranks[k]}")
    log_abs = 0.0
    phase = 1.0 + 0j
    for k in range(cx.top + 1):
        next_boundary = cx.boundary(k + 1)
        image = next_boundary[:, pivots.get(k + 1, np.zeros(0, dtype=int))]
        preimage = np.eye(cx.dims[k], dtype=complex)[:, pivots.get(k, np.zeros(0, dtype=int))]
        lifts = cx.homology[k]
        if rng is not None and lifts.size and next_boundary.size:
            lifts = lifts + next_boundary @ rng.normal(size=(next_boundary.shape[1], lifts.shape[1]))
        basis = np.hstack([image, preimage, lifts])
        if basis.shape[1] != cx.dims[k]:
            raise InconsistentComplexError(
                f"Degree {k}: {image.shape[1]} boundaries + {preimage.shape[1]} lifted cells"
                f" + {lifts.shape[1]} homology classes != dim {cx.dims[k]}")
        if cx.dims[k] == 0:
            continue
        sign, logdet = np.linalg.slogdet(basis)
        if sign == 0 or not np.isfinite(logdet):
            raise InconsistentComplexError(f"Degree {k}: transition matrix is singular")
        exponent = (-1) ** (k + 1)
        log_abs += exponent * logdet
        phase *= sign if exponent > 0 else 1 / sign
    value = phase * np.exp(log_abs)
    logger.debug(f"Chain torsion over dims {cx.dims}: {value:.12g}")
    return TorsionValue(value)

def exact_sequence_torsion(seq: BasedChainComplex, rtol: Optional[float] = None) -> TorsionValue:
    if any(seq.homology_dims()):
        raise InconsistentComplexError("An exact sequence carries no homology lifts")
    try:
        return chain_torsion(seq, rtol=rtol)
    except InconsistentComplexError as e:
        raise InconsistentComplexError(f"Sequence is not acyclic: {e}") from e

def twisted_graph_complex(generators: Sequence[np.ndarray],
                          lift_pairs: Sequence[Tuple[int, int]] = (),
                          lift_vectors: Optional[Sequence[np.ndarray]] = None,
                          expected_rank: Optional[int] = 6) -> BasedChainComplex:
    """
    Adjoint-twisted complex of the spine with vertices x_1, x_2 and edges a_1..a_m.

    Edge a_j runs from x_2 to x_1 along a path with holonomy A_j, so
    d(v (x) a_j) = v (x) x_1 - Ad(A_j)^T v (x) x_2. The lift for a pair (j, k)
    is I (x) (a_j - a_k) with I fixed by Ad(A_j A_k^-1)^T.
    """
    m = len(generators)
    if m < 2:
        raise InconsistentComplexError(f"A graph spine needs at least 2 edges, got {m}")
    if len(lift_vectors or ()) != len(lift_pairs):
        raise InconsistentComplexError("One invariant vector per lift pair is required")
    boundary = np.zeros((6, 3 * m), dtype=complex)
    for j, A in enumerate(generators):
        boundary[0:3, 3 * j:3 * j + 3] = np.eye(3)
        boundary[3:6, 3 * j:3 * j + 3] = -twist(A)
    lifts = np.zeros((3 * m, len(lift_pairs)), dtype=complex)
    for column, (j, k) in enumerate(lift_pairs):
        if not (0 <= j < m and 0 <= k < m) or j == k:
            raise InconsistentComplexError(f"Lift pair {(j, k)} does not name two spine edges")
        vector = lift_vectors[column]
        lifts[3 * j:3 * j + 3, column] += vector
        lifts[3 * k:3 * k + 3, column] -= vector
    names = {0: [f"x{v}.{c}" for v in (1, 2) for c in range(3)],
             1: [f"a{j + 1}.{c}" for j in range(m) for c in range(3)]}
    return BasedChainComplex(
        dims=(6, 3 * m),
        boundaries={1: boundary},
        homology={1: lifts},
        cell_names=names,
        expected_ranks={1: expected_rank} if expected_rank is not None else None,
    )

def random_chain_complex(rng: np.random.Generator, ranks: Sequence[int],
                         homology: Sequence[int]) -> BasedChainComplex:
    """
    Random complex with rank d_k = ranks[k-1] and dim H_k = homology[k].

    Built by conjugating the standard complex, whose degree-k cells are
    [image of d_{k+1} | homology | cells mapped onto the image of d_k].
    """
    top = len(homology) - 1
    r = [0] + list(ranks) + [0]
    if len(ranks) != top:
        raise InconsistentComplexError("Need one rank per boundary map")
    dims = [r[k + 1] + homology[k] + r[k] for k in range(top + 1)]
    frames = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in dims]
    boundaries = {}
    for k in range(1, top + 1):
        standard = np.zeros((dims[k - 1], dims[k]), dtype=complex)
        standard[:r[k], dims[k] - r[k]:] = np.eye(r[k])
        boundaries[k] = frames[k - 1] @ standard @ np.linalg.inv(frames[k])
    lifts = {k: frames[k][:, r[k + 1]:r[k + 1] + homology[k]] for k in range(top + 1)}
    return BasedChainComplex(dims=tuple(dims), boundaries=boundaries, homology=lifts)

def random_short_exact_sequence(rng: np.random.Generator, ranks_E: Sequence[int], homology_E: Sequence[int],
                                ranks_G: Sequence[int], homology_G: Sequence[int]):
    """
    Random 0 -> E -> F -> G -> 0 with F glued from E and G.

    d_F = [[d_E, X], [0, d_G]] with X_k = d_E Y_k - Y_{k-1} d_G for random Y,
    f the inclusion of the first block and g the projection onto the second.
    Returns (E, F, G, f, g).
    """
    E = random_chain_complex(rng, ranks_E, homology_E)
    G = random_chain_complex(rng, ranks_G, homology_G)
    if E.top != G.top:
        raise InconsistentComplexError("E and G must span the same degrees")
    Y = {k: rng.normal(size=(E.dims[k], G.dims[k])) for k in range(E.top + 1)}
    boundaries, lifts, f, g = {}, {}, {}, {}
    for k in range(E.top + 1):
        a, b = E.dims[k], G.dims[k]
        f[k] = np.vstack([np.eye(a), np.zeros((b, a))])
        g[k] = np.hstack([np.zeros((b, a)), np.eye(b)])
        lifts[k] = np.block([[E.homology[k], -Y[k] @ G.homology[k]],
                             [np.zeros((b, E.homology[k].shape[1])), G.homology[k]]])
        if k >= 1:
            coupling = E.boundary(k) @ Y[k] - Y[k - 1] @ G.boundary(k)
            boundaries[k] = np.block([[E.boundary(k), coupling],
                                      [np.zeros((G.dims[k - 1], a)), G.boundary(k)]])
    dims = tuple(E.dims[k] + G.dims[k] for k in range(E.top + 1))
    F = BasedChainComplex(dims=dims, boundaries=boundaries, homology=lifts)
    return E, F, G, f, g

def _homology_coordinates(cx: BasedChainComplex, k: int, vectors: np.ndarray,
                          rtol: Optional[float] = None) -> np.ndarray:
    """Coefficients of cycles in the homology basis of degree k, modulo boundaries."""
    lifts = cx.homology[k]
    image = cx.boundary(k + 1)
    image = image[:, pivot_columns(image, rtol)] if image.size else image
    frame = np.hstack([lifts, image])
    if vectors.shape[1] == 0 or lifts.shape[1] == 0:
        return np.zeros((lifts.shape[1], vectors.shape[1]), dtype=complex)
    solution = scipy.linalg.lstsq(frame, vectors)[0]
    return solution[:lifts.shape[1]]

def _solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[1], B.shape[1]), dtype=complex)
    return scipy.linalg.lstsq(A, B)[0]

def homology_sequence(E: BasedChainComplex, F: BasedChainComplex, G: BasedChainComplex,
                      f: Dict[int, np.ndarray], g: Dict[int, np.ndarray]) -> BasedChainComplex:
    """
    Long exact homology sequence as an acyclic based complex.

    H_k(E), H_k(F), H_k(G) sit in degrees 3k+2, 3k+1, 3k; the boundaries are
    f_*, g_* and the connecting map H_k(G) -> H_{k-1}(E).
    """
    top = E.top
    h_E, h_F, h_G = E.homology_dims(), F.homology_dims(), G.homology_dims()
    dims = []
    for k in range(top + 1):
        dims.extend([h_G[k], h_F[k], h_E[k]])
    boundaries = {}
    for k in range(top + 1):
        f_star = _homology_coordinates(F, k, f[k] @ E.homology[k])
        g_star = _homology_coordinates(G, k, g[k] @ F.homology[k])
        boundaries[3 * k + 2] = f_star
        boundaries[3 * k + 1] = g_star
        if k >= 1:
            lifted = _solve(g[k], G.homology[k])
            pushed = F.boundary(k) @ lifted
            pulled = _solve(f[k - 1], pushed)
            boundaries[3 * k] = _homology_coordinates(E, k - 1, pulled)
    return BasedChainComplex(dims=tuple(dims), boundaries=boundaries)

def check_multiplicativity(E: BasedChainComplex, F: BasedChainComplex, G: BasedChainComplex,
                           f: Dict[int, np.ndarray], g: Dict[int, np.ndarray],
                           tol: Optional[float] = None) -> Dict[str, Any]:
    if tol is None:
        tol = get_config().numerics.tolerance
    if not E.top == F.top == G.top:
        raise InconsistentComplexError("E, F and G must span the same degrees")
    lifted_basis_dets = []
    for k in range(F.top + 1):
        fk, gk = np.asarray(f[k], dtype=complex), np.asarray(g[k], dtype=complex)
        if fk.shape != (F.dims[k], E.dims[k]) or gk.shape != (G.dims[k], F.dims[k]):
            raise InconsistentComplexError(f"Chain maps in degree {k} have the wrong shape")
        if gk.size and fk.size and np.abs(gk @ fk).max() > tol * _scale(gk, fk) ** 2:
            raise InconsistentComplexError(f"g f != 0 in degree {k}")
        if E.dims[k] + G.dims[k] != F.dims[k]:
            raise InconsistentComplexError(f"dim E_{k} + dim G_{k} != dim F_{k}")
        if numerical_rank(fk) != E.dims[k] or numerical_rank(gk) != G.dims[k]:
            raise InconsistentComplexError(f"Sequence is not short exact in degree {k}")
        if k >= 1:
            for name, left, right in (("f", f[k - 1] @ E.boundary(k), F.boundary(k) @ fk),
                                      ("g", g[k - 1] @ F.boundary(k), G.boundary(k) @ gk)):
                if left.size and np.abs(left - right).max() > tol * _scale(left, right):
                    raise InconsistentComplexError(f"{name} is not a chain map in degree {k}")
        if F.dims[k]:
            frame = np.hstack([fk, _solve(gk, np.eye(G.dims[k], dtype=complex))])
            lifted_basis_dets.append(complex(np.linalg.det(frame)))
    lifted_ok = all(min(abs(d - 1), abs(d + 1)) <= tol * 100 for d in lifted_basis_dets)
    if not lifted_ok:
        logger.warning(f"Lifted-basis condition violated: determinants {lifted_basis_dets}")

    tor_E, tor_F, tor_G = chain_torsion(E), chain_torsion(F), chain_torsion(G)
    tor_H = exact_sequence_torsion(homology_sequence(E, F, G, f, g))
    product = tor_E * tor_G * tor_H
    residual = tor_F.residual(product)
    return {
        "tor_E": tor_E,
        "tor_F": tor_F,
        "tor_G": tor_G,
        "tor_H": tor_H,
        "residual": residual,
        "lifted_basis_dets": lifted_basis_dets,
        "lifted_basis_ok": lifted_ok,
        "passed": lifted_ok and residual <= tol,
    }
