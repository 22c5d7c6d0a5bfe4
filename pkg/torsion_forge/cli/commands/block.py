"""
Block Command - Torsion of a single pair of pants or (dual) D-block.

Reports the closed form and the direct chain-complex torsion with their
residual; exits 3 when they disagree beyond tolerance.
"""
import argparse
import logging
from typing import Any, Dict, Tuple

from torsion_forge.core.blocks import (METHODS, block_lemma_checks, dblock_torsion, holonomy_checks,
                                       pants_lemma_checks, pants_torsion)
from torsion_forge.core.config import get_config
from torsion_forge.core.schemas import BlockDocument, PantsDocument, load_document

logger = logging.getLogger(__name__)

def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("block", parents=parents, help="Torsion of one pants or D-block")
    parser.add_argument("file", help="Pants or block document (JSON)")
    parser.add_argument("--kind", choices=("pants", "dblock"), default="dblock")
    parser.add_argument("--method", choices=METHODS, default="both")
    parser.add_argument("--checks", action="store_true",
                        help="Also report invariant-vector determinants and holonomy relations")
    parser.set_defaults(handler=run)

def run(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    tol = get_config().numerics.tolerance
    if args.kind == "pants":
        geometry = load_document(args.file, PantsDocument).to_geometry()
        result = pants_torsion(geometry, args.method)
    else:
        geometry = load_document(args.file, BlockDocument).to_geometry()
        result = dblock_torsion(geometry, args.method)
    report: Dict[str, Any] = {
        "command": "block",
        "input": args.file,
        "piece": result.piece,
        "kind": result.kind,
        "method": args.method,
        "tolerance": tol,
        "normalization": result.normalization,
        "details": result.details,
    }
    if result.closed_form is not None:
        report["closed_form"] = result.closed_form
    if result.direct is not None:
        report["direct"] = result.direct
        report["homology_dims"] = list(result.homology_dims)
    if result.s_invariant is not None:
        report["s_invariant"] = result.s_invariant
    if args.method == "both":
        report["residual"] = result.residual
    if args.checks:
        lemmas = pants_lemma_checks(geometry) if args.kind == "pants" else block_lemma_checks(geometry)
        report["lemma_checks"] = lemmas
        report["holonomy_checks"] = holonomy_checks(geometry)
    passed = result.passed(tol)
    report["passed"] = passed
    if not passed:
        logger.warning(f"Closed form and direct torsion differ by {result.residual:.3e} (tol {tol:g})")
    return report, 0 if passed else 3
