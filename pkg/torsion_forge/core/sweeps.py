"""
Sweeps Module - Seeded property sweeps behind `torsion-forge verify`.

Each sample draws random geometry from its own seed and evaluates a fixed list
of checks, each returning a nonnegative residual. A check passes on a sample
when its residual is at most `tol * scale`, with the scale taken from
`CHECK_SCALES`.

Key components:
- `IDENTITY_CHECKS`: Gram identity, expansion identity, conversions, law of
  sines, invariant-vector determinants, holonomy relations and trace closure.
- `TORSION_CHECKS`: Closed form against direct torsion for every piece,
  pivot and conjugation invariance, Mayer-Vietoris torsion under relabeling,
  assembly of the reference decompositions, multiplicativity.
- `run_suite`: Runs a suite over a thread pool and aggregates by sample index.

Integration:
- Called by `cli/commands/verify.py`; per-sample seeds in the report replay a
  failure exactly.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .assembly import assemble_torsion
from .blocks import (block_lemma_checks, dblock_torsion, expansion_identity, holonomy_checks,
                     pants_lemma_checks, pants_torsion, spine_complex, trace_closure,
                     verify_gram_identity)
from .config import get_config
from .errors import InputError, TorsionForgeError
from .fixtures import d1_graph, d2_graph, random_d1_character, random_d2_character
from .gluing import mv_matrices
from .gram import PAIRS, angles_from_lengths, gram, lengths_from_angles, random_angle_shape
from .hyptrig import law_of_sines_ratios
from .rep import block_holonomy, conjugate, random_block_geometry, random_pants_geometry, random_sl2
from .torsion import TorsionValue, chain_torsion, check_multiplicativity, exact_sequence_torsion, \
    random_short_exact_sequence

logger = logging.getLogger(__name__)

SUITES = ("identities", "torsion", "all")

Check = Callable[[np.random.Generator], float]

def _gram_identity(kind: str, rng: np.random.Generator) -> float:
    return verify_gram_identity(random_block_geometry(rng, kind))["residual"]

def _expansion_identity(kind: str, rng: np.random.Generator) -> float:
    g = random_block_geometry(rng, kind)
    facets = tuple(int(x) for x in rng.permutation([1, 2, 3, 4]))
    return expansion_identity(g, facets)["residual"]

def _gram_sign(rng: np.random.Generator) -> float:
    det = complex(np.linalg.det(gram(random_angle_shape(rng))))
    # hyperideal angle shapes have a Lorentzian Gram matrix
    return abs(det.imag) if det.real < 0 else 1.0 + det.real

def _conversion_round_trip(rng: np.random.Generator) -> float:
    shape = random_angle_shape(rng)
    back = angles_from_lengths(lengths_from_angles(shape))
    return max(abs(shape.param(p) - back.param(p)) for p in PAIRS)

def _law_of_sines(kind: str, rng: np.random.Generator) -> float:
    g = random_pants_geometry(rng, kind)
    ratios = law_of_sines_ratios(g.params, kind)
    return (max(ratios) - min(ratios)) / max(1.0, float(np.mean(ratios)))

def _pants_lemmas(kind: str, rng: np.random.Generator) -> float:
    return max(entry["residual"] for entry in pants_lemma_checks(random_pants_geometry(rng, kind)).values())

def _block_lemmas(kind: str, rng: np.random.Generator) -> float:
    return max(entry["residual"] for entry in block_lemma_checks(random_block_geometry(rng, kind)).values())

def _pants_holonomy(kind: str, rng: np.random.Generator) -> float:
    return max(holonomy_checks(random_pants_geometry(rng, kind)).values())

def _block_holonomy(kind: str, rng: np.random.Generator) -> float:
    return max(holonomy_checks(random_block_geometry(rng, kind)).values())

def _trace_closure(kind: str, rng: np.random.Generator) -> float:
    return max(trace_closure(random_block_geometry(rng, kind)).values())

def _pants_torsion(kind: str, rng: np.random.Generator) -> float:
    return pants_torsion(random_pants_geometry(rng, kind), "both").residual

def _dblock_torsion(kind: str, rng: np.random.Generator) -> float:
    return dblock_torsion(random_block_geometry(rng, kind), "both").residual

def _pivot_invariance(kind: str, rng: np.random.Generator) -> float:
    cx = spine_complex(block_holonomy(random_block_geometry(rng, kind)))
    orders = {k: rng.permutation(d) for k, d in enumerate(cx.dims)}
    return chain_torsion(cx).residual(chain_torsion(cx.permuted(orders), rng=rng))

def _conjugation_invariance(kind: str, rng: np.random.Generator) -> float:
    hol = block_holonomy(random_block_geometry(rng, kind))
    moved = conjugate(hol, random_sl2(rng, spread=0.5))
    return chain_torsion(spine_complex(hol)).residual(chain_torsion(spine_complex(moved)))

def _mv_relabeled(builder: Callable, rng: np.random.Generator) -> float:
    g = builder()
    relabeled = g.relabeled(rng.permutation(g.c + g.d), rng.permutation(g.p), rng.permutation(g.n))
    return exact_sequence_torsion(mv_matrices(relabeled)).residual(TorsionValue(1.0))

def _assembly(d: int, kind: str, rng: np.random.Generator) -> float:
    if d == 1:
        g, chi = d1_graph(kind), random_d1_character(rng, kind)
    else:
        g, chi = d2_graph(kind), random_d2_character(rng, kind)
    return assemble_torsion(g, chi, "both").residual

def _multiplicativity(rng: np.random.Generator) -> float:
    ranks = lambda: [int(x) for x in rng.integers(1, 3, size=2)]
    homology = lambda: [int(x) for x in rng.integers(0, 3, size=3)]
    E, F, G, f, g = random_short_exact_sequence(rng, ranks(), homology(), ranks(), homology())
    return check_multiplicativity(E, F, G, f, g)["residual"]

IDENTITY_CHECKS: Dict[str, Check] = {
    "gram_identity_fsl": partial(_gram_identity, "fsl"),
    "gram_identity_dual": partial(_gram_identity, "dual"),
    "expansion_identity_fsl": partial(_expansion_identity, "fsl"),
    "expansion_identity_dual": partial(_expansion_identity, "dual"),
    "gram_det_negative": _gram_sign,
    "conversion_round_trip": _conversion_round_trip,
    "law_of_sines_cone": partial(_law_of_sines, "cone"),
    "law_of_sines_boundary": partial(_law_of_sines, "boundary"),
    "pants_lemmas_cone": partial(_pants_lemmas, "cone"),
    "pants_lemmas_boundary": partial(_pants_lemmas, "boundary"),
    "block_lemmas_fsl": partial(_block_lemmas, "fsl"),
    "block_lemmas_dual": partial(_block_lemmas, "dual"),
    "pants_holonomy_cone": partial(_pants_holonomy, "cone"),
    "pants_holonomy_boundary": partial(_pants_holonomy, "boundary"),
    "block_holonomy_fsl": partial(_block_holonomy, "fsl"),
    "block_holonomy_dual": partial(_block_holonomy, "dual"),
    "trace_closure_fsl": partial(_trace_closure, "fsl"),
    "trace_closure_dual": partial(_trace_closure, "dual"),
}

TORSION_CHECKS: Dict[str, Check] = {
    "pants_cone": partial(_pants_torsion, "cone"),
    "pants_boundary": partial(_pants_torsion, "boundary"),
    "dblock_fsl": partial(_dblock_torsion, "fsl"),
    "dblock_dual": partial(_dblock_torsion, "dual"),
    "pivot_invariance_fsl": partial(_pivot_invariance, "fsl"),
    "pivot_invariance_dual": partial(_pivot_invariance, "dual"),
    "conjugation_invariance_fsl": partial(_conjugation_invariance, "fsl"),
    "conjugation_invariance_dual": partial(_conjugation_invariance, "dual"),
    "mv_relabeled_d1": partial(_mv_relabeled, d1_graph),
    "mv_relabeled_d2": partial(_mv_relabeled, d2_graph),
    "assembly_fsl_d1": partial(_assembly, 1, "fsl"),
    "assembly_double_d1": partial(_assembly, 1, "double"),
    "assembly_fsl_d2": partial(_assembly, 2, "fsl"),
    "assembly_double_d2": partial(_assembly, 2, "double"),
    "multiplicativity": _multiplicativity,
}

# Multiples of the configured tolerance; products of many factors lose digits.
CHECK_SCALES: Dict[str, float] = {
    "block_lemmas_fsl": 10.0,
    "block_lemmas_dual": 10.0,
    "pivot_invariance_fsl": 10.0,
    "pivot_invariance_dual": 10.0,
    "assembly_fsl_d1": 100.0,
    "assembly_double_d1": 100.0,
    "assembly_fsl_d2": 100.0,
    "assembly_double_d2": 100.0,
    "multiplicativity": 10.0,
}

@dataclass
class CheckSummary:
    suite: str
    threshold: float
    max_residual: float = 0.0
    worst_seed: Optional[int] = None
    failing_seeds: List[int] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failing_seeds

@dataclass
class SweepReport:
    suite: str
    seed: int
    samples: int
    tolerance: float
    checks: Dict[str, CheckSummary] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    @property
    def failing_seeds(self) -> List[int]:
        return sorted({seed for check in self.checks.values() for seed in check.failing_seeds})

    def suite_max_residuals(self) -> Dict[str, float]:
        result: Dict[str, float] = {}
        for check in self.checks.values():
            result[check.suite] = max(result.get(check.suite, 0.0), check.max_residual)
        return result

def suite_checks(name: str) -> Dict[str, Tuple[str, Check]]:
    if name not in SUITES:
        raise InputError(f"Unknown suite '{name}', expected one of {SUITES}")
    checks: Dict[str, Tuple[str, Check]] = {}
    if name in ("identities", "all"):
        checks.update({key: ("identities", check) for key, check in IDENTITY_CHECKS.items()})
    if name in ("torsion", "all"):
        checks.update({key: ("torsion", check) for key, check in TORSION_CHECKS.items()})
    return checks

def sample_seeds(seed: int, samples: int) -> List[int]:
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2 ** 63, size=samples)]

def run_sample(checks: Dict[str, Tuple[str, Check]], sample_seed: int) -> Dict[str, Tuple[float, Optional[str]]]:
    """Residual (or error message) of every check for one sample seed."""
    results = {}
    for index, (name, (_, check)) in enumerate(checks.items()):
        rng = np.random.default_rng([sample_seed, index])
        try:
            results[name] = (float(check(rng)), None)
        except (TorsionForgeError, np.linalg.LinAlgError, ArithmeticError) as e:
            logger.warning(f"Check {name} failed on seed {sample_seed}: {e}")
            results[name] = (float("inf"), f"{type(e).__name__}: {e}")
    return results

def run_suite(name: str, samples: Optional[int] = None, seed: Optional[int] = None,
              tol: Optional[float] = None, workers: Optional[int] = None) -> SweepReport:
    config = get_config()
    samples = config.sampling.samples if samples is None else samples
    seed = config.sampling.seed if seed is None else seed
    tol = config.numerics.tolerance if tol is None else tol
    workers = config.sampling.workers if workers is None else workers
    if samples < 0:
        raise InputError(f"Sample count must be nonnegative, got {samples}")
    if workers < 1:
        raise InputError(f"Worker count must be positive, got {workers}")

    checks = suite_checks(name)
    report = SweepReport(suite=name, seed=seed, samples=samples, tolerance=tol)
    report.checks = {key: CheckSummary(suite=suite, threshold=tol * CHECK_SCALES.get(key, 1.0))
                     for key, (suite, _) in checks.items()}
    if samples == 0:
        message = "No samples drawn; the sweep passes vacuously"
        logger.warning(message)
        report.warnings.append(message)
        return report

    seeds = sample_seeds(seed, samples)
    logger.info(f"Running suite '{name}': {samples} samples, {len(checks)} checks, {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        outcomes = list(executor.map(partial(run_sample, checks), seeds))

    for sample_seed, outcome in zip(seeds, outcomes):
        for key, (residual, error) in outcome.items():
            summary = report.checks[key]
            if summary.worst_seed is None or residual > summary.max_residual:
                summary.max_residual = residual
                summary.worst_seed = sample_seed
            if error is not None:
                summary.errors.append(f"seed {sample_seed}: {error}")
            if not residual <= summary.threshold:
                summary.failing_seeds.append(sample_seed)

    for key, summary in report.checks.items():
        if not summary.passed:
            logger.warning(f"Check {key} failed on {len(summary.failing_seeds)} samples, "
                           f"max residual {summary.max_residual:.3e}")
    return report
