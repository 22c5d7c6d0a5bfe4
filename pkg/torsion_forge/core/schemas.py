"""
Schemas Module - Pydantic models for the JSON input documents.

Complex numbers are two-element arrays [re, im]. Angles are half cone-angles
alpha, lengths are edge lengths l, both listed in the edge order
12, 13, 14, 23, 24, 34.

Key components:
- `ShapeDocument`: Input of `torsion-forge gram`.
- `PantsDocument`, `BlockDocument`: Input of `torsion-forge block`.
- `GluingDocument`: Input of `torsion-forge assemble`.
- `load_document`: Reads a file and validates it, raising `ParseError` with the
  line and column of a JSON error or the dotted path of a schema violation.

Integration:
- Used by the CLI commands; the models convert into core types.
"""
import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, model_validator

from .errors import ParseError
from .gluing import GluingGraph, graph_from_document
from .gram import TetShape
from .rep import BlockGeometry, PantsGeometry

logger = logging.getLogger(__name__)

Six = Tuple[float, float, float, float, float, float]
ComplexPair = Tuple[float, float]

class ShapeDocument(BaseModel):
    kind: Literal["angles", "lengths", "mixed"] = Field("angles", description="How the edge parameters are read")
    u: Optional[List[ComplexPair]] = Field(None, description="Six complex edge parameters as [re, im]")
    alpha: Optional[Six] = Field(None, description="Six half cone-angles alpha_jk")
    length: Optional[Six] = Field(None, description="Six edge lengths l_jk")

    @model_validator(mode="after")
    def one_source(self) -> "ShapeDocument":
        given = [name for name in ("u", "alpha", "length") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of 'u', 'alpha', 'length' is required, got {given or 'none'}")
        if self.u is not None and len(self.u) != 6:
            raise ValueError(f"'u' needs 6 entries, got {len(self.u)}")
        return self

    def to_shape(self) -> TetShape:
        if self.alpha is not None:
            return TetShape.from_angles(self.alpha)
        if self.length is not None:
            return TetShape.from_lengths(self.length)
        return TetShape(tuple(complex(re, im) for re, im in self.u), self.kind)

class PantsDocument(BaseModel):
    kind: Literal["cone", "boundary"] = Field(..., description="Cone points (angles) or geodesic boundary (lengths)")
    params: Tuple[float, float, float] = Field(..., description="Half cone-angles or boundary half-lengths")

    def to_geometry(self) -> PantsGeometry:
        return PantsGeometry(self.kind, self.params)

class BlockDocument(BaseModel):
    kind: Literal["fsl", "dual"] = Field(..., description="D-block (angles) or dual D-block (lengths)")
    alpha: Optional[Six] = Field(None, description="Six half cone-angles, required for kind 'fsl'")
    length: Optional[Six] = Field(None, description="Six edge lengths, required for kind 'dual'")

    @model_validator(mode="after")
    def matching_params(self) -> "BlockDocument":
        if self.kind == "fsl" and self.alpha is None:
            raise ValueError("a 'fsl' block needs 'alpha'")
        if self.kind == "dual" and self.length is None:
            raise ValueError("a 'dual' block needs 'length'")
        return self

    def to_geometry(self) -> BlockGeometry:
        if self.kind == "fsl":
            return BlockGeometry("fsl", TetShape.from_angles(self.alpha))
        return BlockGeometry("dual", TetShape.from_lengths(self.length))

class BlockEntry(BaseModel):
    id: int
    kind: Literal["dblock", "dual_dblock", "thickened_pants"]
    u: Optional[List[ComplexPair]] = Field(None, description="Inline shape, six [re, im] pairs")

class InterfaceEntry(BaseModel):
    id: int
    left: Tuple[int, int] = Field(..., description="[block id, face]")
    right: Tuple[int, int] = Field(..., description="[block id, face]")
    match: List[Tuple[str, str]] = Field(..., description="Three [left slot, right slot] pairs, one per cone point")

class TorusEntry(BaseModel):
    id: int
    traversal: List[Tuple[int, str]] = Field(..., description="Cyclic list of [block id, slot]")
    alpha: Optional[float] = Field(None, description="Half cone-angle (fsl)")
    length: Optional[float] = Field(None, description="Edge length (double)")

class GluingDocument(BaseModel):
    kind: Literal["fsl", "double"]
    blocks: List[BlockEntry]
    interfaces: List[InterfaceEntry]
    tori: List[TorusEntry]

    def to_graph(self) -> GluingGraph:
        return graph_from_document(self.model_dump())

Document = TypeVar("Document", bound=BaseModel)

def parse_document(text: str, model: Type[Document], source: str = "<input>") -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"{source}:{e.lineno}:{e.colno}") from e
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(part) for part in first["loc"]) or "<root>"
        logger.debug(f"{source} failed validation with {e.error_count()} errors")
        raise ParseError(first["msg"], f"{source}: {path}") from e

def load_document(path: str, model: Type[Document]) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", path) from e
    return parse_document(text, model, source=path)
