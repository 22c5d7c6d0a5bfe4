"""
Gram Command - Gram matrix, cofactors, validity and angle/length conversion of one shape.
"""
import argparse
import logging
from typing import Any, Dict, Tuple

import numpy as np

from torsion_forge.core.blocks import verify_gram_identity
from torsion_forge.core.errors import InvalidShapeError
from torsion_forge.core.gram import (PAIRS, angles_from_lengths, cofactor_matrix, gram,
                                     lengths_from_angles, pair_label, validate_hyperideal)
from torsion_forge.core.rep import BlockGeometry
from torsion_forge.core.schemas import ShapeDocument, load_document

logger = logging.getLogger(__name__)

def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("gram", parents=parents, help="Gram matrix of a tetrahedron shape")
    parser.add_argument("file", help="Shape document (JSON)")
    parser.set_defaults(handler=run)

def _labelled(shape) -> Dict[str, float]:
    return {pair_label(pair): shape.param(pair) for pair in PAIRS}

def run(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    shape = load_document(args.file, ShapeDocument).to_shape()
    G = gram(shape)
    report: Dict[str, Any] = {
        "command": "gram",
        "input": args.file,
        "kind": shape.kind,
        "u": list(shape.u),
        "gram": G,
        "det": complex(np.linalg.det(G)),
        "cofactors": cofactor_matrix(G),
    }
    if shape.kind == "angles":
        valid, diagnostics = validate_hyperideal(shape)
        if not valid:
            raise InvalidShapeError("Not a hyperideal tetrahedron", diagnostics)
        report["angles"] = _labelled(shape)
        report["lengths"] = _labelled(lengths_from_angles(shape))
        report["gram_identity"] = verify_gram_identity(BlockGeometry("fsl", shape))
    elif shape.kind == "lengths":
        report["lengths"] = _labelled(shape)
        report["angles"] = _labelled(angles_from_lengths(shape))
        report["gram_identity"] = verify_gram_identity(BlockGeometry("dual", shape))
    logger.info(f"Gram report for {args.file}: det {report['det']:.10g}")
    return report, 0
