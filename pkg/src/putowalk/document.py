"""JSON walk documents.

Schema (all keys except ``coin`` and ``kind`` required unless ``builtin_walk`` is used)::

    {
      "dimension": 2,
      "kind": "plain",                          # or "product"
      "steps": [[1, 0], [-1, 0], [0, 1], [0, -1]],
      "projections": {"partition": [[0], [1], [2], [3]]},
      "coin": {"builtin": "grover"}
    }

``projections`` may instead be ``{"matrices": [...]}`` with one D x D matrix
per step.  Complex entries are written as ``[re, im]`` pairs or plain reals.

``coin`` is one of::

    {"builtin": "grover"} | {"builtin": "fourier"}
    {"builtin": "reflection", "vector": [...]}
    {"builtin": "wkkk", "p": 0.3} | {"builtin": "sbj", "rho": 0.4}
    {"matrix": [[...], ...]}

The default coin is Grover.  A document may instead name a built-in layout:
``{"builtin_walk": "lazy", "dimension": 1, "coin": {...}}``.
"""

from __future__ import annotations

import json

import numpy as np

from .deformation import sbj_coin, wkkk_coin
from .walks import (
    BUILTIN_WALKS,
    PLAIN,
    Coin,
    ResolutionOfUnity,
    StepSet,
    Walk,
    builtin_walk,
    fourier_coin,
    grover_coin,
    reflection_coin,
    validate_resolution,
)


class DocumentError(ValueError):
    """Invalid walk document; the message names the offending location."""


def _complex(v, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        return complex(v[0], v[1])
    raise DocumentError(f"{where}: expected a number or [re, im] pair, got {v!r}")


def parse_vector(v, where):
    if not isinstance(v, list) or not v:
        raise DocumentError(f"{where}: expected a non-empty list")
    return np.array([_complex(c, f"{where}[{k}]") for k, c in enumerate(v)])


def parse_matrix(m, where):
    if not isinstance(m, list) or not m:
        raise DocumentError(f"{where}: expected a non-empty list of rows")
    rows = [parse_vector(r, f"{where}[{k}]") for k, r in enumerate(m)]
    if len({r.size for r in rows}) != 1:
        raise DocumentError(f"{where}: rows have different lengths")
    return np.stack(rows)


def _require(doc, key, where="document"):
    if key not in doc:
        raise DocumentError(f"{where}: missing key {key!r}")
    return doc[key]


def parse_coin(entry, dim, where="coin") -> Coin:
    if not isinstance(entry, dict):
        raise DocumentError(f"{where}: expected an object")
    try:
        if "matrix" in entry:
            m = parse_matrix(entry["matrix"], f"{where}.matrix")
            if m.shape != (dim, dim):
                raise DocumentError(f"{where}.matrix: shape {m.shape}, expected ({dim}, {dim})")
            return Coin(m)
        name = _require(entry, "builtin", where)
        if name == "grover":
            return grover_coin(dim)
        if name == "fourier":
            return fourier_coin(dim)
        if name == "reflection":
            mu = parse_vector(_require(entry, "vector", where), f"{where}.vector")
            if mu.size != dim:
                raise DocumentError(f"{where}.vector: length {mu.size}, expected {dim}")
            return reflection_coin(mu)
        if name == "wkkk":
            c = wkkk_coin(float(_require(entry, "p", where)))
        elif name == "sbj":
            c = sbj_coin(float(_require(entry, "rho", where)))
        else:
            raise DocumentError(f"{where}.builtin: unknown coin {name!r}")
        if c.dim != dim:
            raise DocumentError(f"{where}: {name} coin is {c.dim}x{c.dim}, walk needs {dim}x{dim}")
        return c
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def walk_from_document(doc) -> Walk:
    """Build and validate a :class:`Walk`; raises :class:`DocumentError`."""
    if not isinstance(doc, dict):
        raise DocumentError("document: expected a JSON object")
    if "builtin_walk" in doc:
        name = doc["builtin_walk"]
        if name not in BUILTIN_WALKS:
            raise DocumentError(f"builtin_walk: unknown walk {name!r}")
        d = int(doc.get("dimension", 2 if name in ("triangular6", "product-triangular3") else 1))
        try:
            base = builtin_walk(name, d)
        except ValueError as exc:
            raise DocumentError(f"builtin_walk: {exc}") from None
        if "coin" in doc:
            base = base.with_coin(parse_coin(doc["coin"], base.coin_dim))
        return base

    d = _require(doc, "dimension")
    if not isinstance(d, int) or d < 1:
        raise DocumentError(f"dimension: expected a positive integer, got {d!r}")
    raw_steps = _require(doc, "steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise DocumentError("steps: expected a non-empty list")
    steps = []
    for k, s in enumerate(raw_steps):
        if not isinstance(s, list) or len(s) != d or not all(isinstance(c, int) for c in s):
            raise DocumentError(f"steps[{k}]: expected {d} integers, got {s!r}")
        steps.append(tuple(s))
    try:
        step_set = StepSet(tuple(steps))
    except ValueError as exc:
        raise DocumentError(f"steps: {exc}") from None

    proj = _require(doc, "projections")
    if not isinstance(proj, dict):
        raise DocumentError("projections: expected an object")
    if "partition" in proj:
        parts = proj["partition"]
        if not isinstance(parts, list) or len(parts) != len(steps):
            raise DocumentError(f"projections.partition: expected {len(steps)} index lists")
        flat = [i for p in parts for i in p]
        if not all(isinstance(i, int) for i in flat):
            raise DocumentError("projections.partition: indices must be integers")
        dim = max(flat) + 1 if flat else 0
        try:
            res = ResolutionOfUnity.from_partition(dim, parts)
        except ValueError as exc:
            raise DocumentError(f"projections.partition: {exc}") from None
    elif "matrices" in proj:
        mats = proj["matrices"]
        if not isinstance(mats, list) or len(mats) != len(steps):
            raise DocumentError(f"projections.matrices: expected {len(steps)} matrices")
        arr = [parse_matrix(m, f"projections.matrices[{k}]") for k, m in enumerate(mats)]
        if len({a.shape for a in arr}) != 1 or arr[0].shape[0] != arr[0].shape[1]:
            raise DocumentError("projections.matrices: matrices must be square and of one size")
        res = ResolutionOfUnity(np.stack(arr))
    else:
        raise DocumentError("projections: expected 'partition' or 'matrices'")
    report = validate_resolution(res)
    if not report:
        raise DocumentError(f"projections: {report.describe()}")

    coin = parse_coin(doc.get("coin", {"builtin": "grover"}), res.dim)
    kind = doc.get("kind", PLAIN)
    try:
        return Walk(step_set, res, coin, kind, doc.get("name"))
    except ValueError as exc:
        raise DocumentError(f"kind: {exc}") from None


def load_walk(path) -> Walk:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return walk_from_document(doc)


def load_vector_document(path, key="mu"):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if isinstance(doc, dict):
        doc = _require(doc, key)
    return parse_vector(doc, key)


def walk_summary(walk: Walk):
    return {
        "name": walk.name,
        "dimension": walk.dimension,
        "coin_dim": walk.coin_dim,
        "kind": walk.kind,
        "steps": [list(s) for s in walk.steps],
        "coin_type": walk.coin.kind.names(),
    }
