"""JSON exchange of matrices (``pptfarm-matrix/1``) and family description files."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import StructureError
from .family import BlockPair
from .tensor_core import FactorSpace, SymMatrix

MATRIX_FORMAT = "pptfarm-matrix/1"

PathLike = Union[str, Path]


def matrix_to_dict(M: SymMatrix) -> dict:
    return {
        "format": MATRIX_FORMAT,
        "dims": list(M.space.dims),
        "roles": list(M.space.roles),
        "order": M.order,
        "entries": [float(v) for v in M.array.ravel()],
    }


def matrix_from_dict(doc: dict) -> SymMatrix:
    if doc.get("format") != MATRIX_FORMAT:
        raise StructureError(f"expected format {MATRIX_FORMAT!r}, got {doc.get('format')!r}")
    try:
        dims = tuple(int(d) for d in doc["dims"])
        roles = tuple(doc.get("roles") or ())
        order = int(doc["order"])
        entries = np.asarray(doc["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed matrix document: {exc}") from exc
    space = FactorSpace(dims, roles)
    if space.order != order or entries.size != order * order:
        raise StructureError(
            f"order {order} inconsistent with dims {list(dims)} or {entries.size} entries"
        )
    return SymMatrix(entries.reshape(order, order), space)


def dumps_matrix(M: SymMatrix) -> str:
    # repr-based float output is the shortest round-trip form
    return json.dumps(matrix_to_dict(M), separators=(",", ":")) + "\n"


def save_matrix(M: SymMatrix, path: PathLike) -> None:
    Path(path).write_text(dumps_matrix(M), encoding="utf-8")


def load_matrix(path: PathLike) -> SymMatrix:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh))


def load_family(path: PathLike) -> tuple[dict, Optional[BlockPair]]:
    """Read ``{n, d_A, d_B, q, blocks}``; ``blocks`` is ``"canonical"`` or ``{a, b}`` paths.

    Payload paths are resolved relative to the description file.  Returns the
    raw parameter values (any may be missing) and the payloads, or ``None``
    for canonical ones.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise StructureError("family description must be a JSON object")
    values = {k: doc[k] for k in ("n", "d_A", "d_B", "q") if k in doc}
    spec = doc.get("blocks", "canonical")
    if spec == "canonical":
        return values, None
    if not isinstance(spec, dict) or set(spec) != {"a", "b"}:
        raise StructureError('"blocks" must be "canonical" or an object with keys "a" and "b"')
    a = load_matrix(path.parent / spec["a"])
    b = load_matrix(path.parent / spec["b"])
    return values, BlockPair(a, b)


def format_float(x: Optional[float]) -> str:
    """Shortest round-trip decimal; ``nan``/``inf`` spelled out."""
    if x is None:
        return ""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return repr(float(x)) if isinstance(x, float) else str(x)
