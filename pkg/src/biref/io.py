"""JSON forms of fields, spaces, matrices and isometries.

Field elements are plain ints over prime fields and coefficient lists
(constant term first) over GF(p^k).  Every writer here has a reader that
returns an equal value.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .algebra import Field, field_make
from .errors import BirefError, ParseError
from .ortho import Isometry
from .space import BilinearSpace


def field_to_json(F: Field) -> dict:
    out = {"p": F.p, "k": F.k}
    if F.k > 1:
        out["modulus"] = list(F.modulus)
    return out


def field_from_json(obj) -> Field:
    if not isinstance(obj, dict) or "p" not in obj:
        raise ParseError("field must be an object with at least 'p'")
    try:
        return field_make(int(obj["p"]), int(obj.get("k", 1)), obj.get("modulus"))
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad field: {e}") from e


def mat_to_json(F: Field, M) -> list:
    return [[F.encode(int(a)) for a in row] for row in np.asarray(M)]


def mat_from_json(F: Field, rows) -> np.ndarray:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a list of rows")
    if len({len(r) for r in rows}) > 1:
        raise ParseError("matrix rows have different lengths")
    try:
        M = np.array([[F.elem(a) for a in r] for r in rows], dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad matrix entry: {e}") from e
    return M.reshape(len(rows), len(rows[0]) if rows else 0)


def space_to_json(S: BilinearSpace) -> dict:
    return {"field": field_to_json(S.field), "gram": mat_to_json(S.field, S.gram)}


def space_from_json(obj) -> BilinearSpace:
    if not isinstance(obj, dict) or "gram" not in obj or "field" not in obj:
        raise ParseError("space must be an object with 'field' and 'gram'")
    F = field_from_json(obj["field"])
    G = mat_from_json(F, obj["gram"])
    if G.shape[0] != G.shape[1]:
        raise ParseError("Gram matrix is not square")
    if not (G == G.T).all():
        raise ParseError("Gram matrix is not symmetric")
    return BilinearSpace(F, G)


def element_to_json(phi: Isometry) -> dict:
    return {"matrix": mat_to_json(phi.field, phi.matrix)}


def element_from_json(S: BilinearSpace, obj) -> Isometry:
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    M = mat_from_json(S.field, obj)
    return Isometry(S, M)


def load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from e


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_default)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, BirefError):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dump(obj, path=None) -> None:
    text = dumps(obj) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
