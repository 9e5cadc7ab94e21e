"""Text and JSON formats: ray files, model files and state files.

Every number in every format is an exact scalar string; a float anywhere is
a parse error.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .exact_algebra import Scalar, ScalarParseError, SymMatrix, Vec, parse_scalar
from .hv_model import (
    HiddenVariableModel,
    MaximalObservable,
    ObservableDecl,
    ProjectorObservable,
)
from .hypergraph import RaySet, canonicalize_ray

__all__ = [
    "InputError",
    "parse_rays",
    "load_rays",
    "format_rays",
    "parse_model",
    "load_model",
    "model_to_json",
    "parse_state",
    "load_state",
    "parse_contexts_spec",
]


class InputError(ValueError):
    """Malformed input file; the message carries the location."""


def parse_rays(text: str, source: str = "<rays>") -> tuple[RaySet, list[str]]:
    """Parse the ray file format.  Returns the ray set and duplicate warnings."""
    vectors = []
    first_line: dict[tuple[Scalar, ...], int] = {}
    warnings = []
    dim = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        entries = []
        col = 0
        for tok in line.split():
            col = line.index(tok, col) + 1
            try:
                entries.append(parse_scalar(tok))
            except ScalarParseError as exc:
                raise InputError(f"{source}:{lineno}:{col}: {exc}") from None
            col += len(tok) - 1
        if dim is None:
            dim = len(entries)
            if dim < 2:
                raise InputError(f"{source}:{lineno}: rays need at least 2 entries")
        elif len(entries) != dim:
            raise InputError(f"{source}:{lineno}: expected {dim} entries, found {len(entries)}")
        if not any(entries):
            raise InputError(f"{source}:{lineno}: zero vector is not a ray")
        key = canonicalize_ray(entries).entries
        if key in first_line:
            warnings.append(f"{source}:{lineno}: duplicate of the ray on line {first_line[key]}")
            continue
        first_line[key] = lineno
        vectors.append(entries)
    if not vectors:
        raise InputError(f"{source}: no rays found")
    return RaySet(vectors), warnings


def load_rays(path: str | Path) -> tuple[RaySet, list[str]]:
    p = Path(path)
    return parse_rays(p.read_text(encoding="utf-8"), str(p))


def format_rays(rays: RaySet, comment: str | None = None) -> str:
    lines = [f"# {line}" for line in comment.splitlines()] if comment else []
    lines += [str(r) for r in rays]
    return "\n".join(lines) + "\n"


# -- JSON -------------------------------------------------------------------


def _no_floats(text: str) -> Any:
    raise InputError(f"floating-point literal {text} is not allowed; use an exact scalar string")


def _loads(text: str, source: str) -> Any:
    try:
        return json.loads(text, parse_float=_no_floats, parse_constant=_no_floats)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def _scalar(value: Any, where: str) -> Scalar:
    if not isinstance(value, str):
        raise InputError(f"{where}: expected a scalar string, got {json.dumps(value)}")
    try:
        return parse_scalar(value)
    except ScalarParseError as exc:
        raise InputError(f"{where}: {exc}") from None


def _vec(value: Any, where: str) -> Vec:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list of scalar strings")
    try:
        return Vec(_scalar(x, f"{where}[{i}]") for i, x in enumerate(value))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{where}: {exc}") from None


def _expect(obj: Any, kind: type, where: str) -> Any:
    if not isinstance(obj, kind):
        raise InputError(f"{where}: expected {kind.__name__}")
    return obj


def parse_model(text: str, source: str = "<model>") -> HiddenVariableModel:
    data = _expect(_loads(text, source), dict, source)
    dim = data.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise InputError(f"{source}: 'dimension' must be an integer >= 2")
    lambdas = []
    for i, item in enumerate(_expect(data.get("lambdas"), list, f"{source}: lambdas")):
        where = f"{source}: lambdas[{i}]"
        _expect(item, dict, where)
        label = item.get("label")
        if not isinstance(label, str):
            raise InputError(f"{where}: 'label' must be a string")
        lambdas.append((label, _scalar(item.get("weight"), f"{where}.weight")))
    observables: list[ObservableDecl] = []
    for i, item in enumerate(_expect(data.get("observables"), list, f"{source}: observables")):
        where = f"{source}: observables[{i}]"
        _expect(item, dict, where)
        oid = item.get("id")
        if not isinstance(oid, str):
            raise InputError(f"{where}: 'id' must be a string")
        kind = item.get("kind")
        if kind == "projector":
            observables.append(ProjectorObservable(oid, _vec(item.get("ray"), f"{where}.ray")))
        elif kind == "maximal":
            eig = _expect(item.get("eigenvalues"), list, f"{where}.eigenvalues")
            ctx = _expect(item.get("context"), list, f"{where}.context")
            observables.append(MaximalObservable(
                oid,
                tuple(_scalar(x, f"{where}.eigenvalues[{k}]") for k, x in enumerate(eig)),
                tuple(_vec(v, f"{where}.context[{k}]") for k, v in enumerate(ctx)),
            ))
        else:
            raise InputError(f"{where}: unknown kind {kind!r} (expected 'projector' or 'maximal')")
    responses = {}
    for oid, table in _expect(data.get("responses", {}), dict, f"{source}: responses").items():
        where = f"{source}: responses.{oid}"
        responses[oid] = {l: _scalar(v, f"{where}.{l}") for l, v in _expect(table, dict, where).items()}
    return HiddenVariableModel(dim, tuple(lambdas), tuple(observables), responses)


def load_model(path: str | Path) -> HiddenVariableModel:
    p = Path(path)
    return parse_model(p.read_text(encoding="utf-8"), str(p))


def model_to_json(m: HiddenVariableModel) -> dict:
    obs = []
    for o in m.observables:
        if isinstance(o, ProjectorObservable):
            obs.append({"id": o.id, "kind": "projector", "ray": [str(x) for x in o.ray]})
        else:
            obs.append({
                "id": o.id,
                "kind": "maximal",
                "eigenvalues": [str(x) for x in o.eigenvalues],
                "context": [[str(x) for x in v] for v in o.context],
            })
    return {
        "dimension": m.dimension,
        "lambdas": [{"label": l, "weight": str(w)} for l, w in m.lambdas],
        "observables": obs,
        "responses": {oid: {l: str(v) for l, v in table.items()} for oid, table in m.responses.items()},
    }


def parse_state(text: str, source: str = "<state>") -> SymMatrix:
    rows = _expect(_loads(text, source), list, source)
    parsed = [
        [_scalar(x, f"{source}[{i}][{j}]") for j, x in enumerate(_expect(row, list, f"{source}[{i}]"))]
        for i, row in enumerate(rows)
    ]
    try:
        return SymMatrix.unchecked(parsed)
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_state(path: str | Path) -> SymMatrix:
    p = Path(path)
    return parse_state(p.read_text(encoding="utf-8"), str(p))


def parse_contexts_spec(spec: str) -> list[tuple[int, ...]]:
    """``"0,1;2,3"`` -> [(0, 1), (2, 3)]: ray ids by comma, contexts by semicolon."""
    out = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(tuple(int(x) for x in part.split(",")))
        except ValueError:
            raise InputError(f"bad context list {part!r}; expected comma-separated ray ids") from None
    if not out:
        raise InputError("no contexts given")
    return out
