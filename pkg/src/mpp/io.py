"""JSON documents holding a filtered space and named processes.

Format::

    {"depth": N,
     "leaf_probs": [...],
     "level_atoms": [[[leaf, ...], ...], ...],
     "processes": {"name": [[value per atom] per level]}}

Loading validates everything and raises :class:`DocumentError` naming the
first offending location as a ``$``-rooted path.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .martingale import AdaptedProcess, Martingale, is_martingale
from .space import FilteredSpace, SpaceError


class DocumentError(SpaceError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"{path}.{key}", "missing field")
    return doc[key]


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise DocumentError(path, f"expected a finite number, got {x!r}")
    return float(x)


def space_from_doc(doc) -> FilteredSpace:
    depth = _require(doc, "depth", "$")
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 0:
        raise DocumentError("$.depth", f"expected a nonnegative integer, got {depth!r}")
    probs = _require(doc, "leaf_probs", "$")
    if not isinstance(probs, list):
        raise DocumentError("$.leaf_probs", "expected a list")
    probs = [_number(x, f"$.leaf_probs[{i}]") for i, x in enumerate(probs)]
    levels = _require(doc, "level_atoms", "$")
    if not isinstance(levels, list):
        raise DocumentError("$.level_atoms", "expected a list")
    if len(levels) != depth + 1:
        raise DocumentError("$.level_atoms", f"expected {depth + 1} levels, got {len(levels)}")
    for n, level in enumerate(levels):
        if not isinstance(level, list):
            raise DocumentError(f"$.level_atoms[{n}]", "expected a list of atoms")
        for a, atom in enumerate(level):
            if not isinstance(atom, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in atom):
                raise DocumentError(f"$.level_atoms[{n}][{a}]", "expected a list of leaf indices")
    try:
        return FilteredSpace(probs, levels)
    except SpaceError as exc:
        msg = str(exc)
        # space errors already carry a location such as "level_atoms[2][1]: ..."
        if msg.startswith(("level_atoms", "leaf_probs")):
            loc, _, rest = msg.partition(": ")
            raise DocumentError(f"$.{loc}", rest) from None
        raise DocumentError("$", msg) from None


def process_from_doc(space, values, path, martingale=True, level_atoms=None):
    """Values are listed per atom in the order of ``level_atoms`` (the space's own order by default)."""
    if not isinstance(values, list) or len(values) != space.depth + 1:
        raise DocumentError(path, f"expected {space.depth + 1} levels")
    level_atoms = space.level_atoms if level_atoms is None else level_atoms
    rows = []
    for n, level in enumerate(values):
        if not isinstance(level, list) or len(level) != space.atom_counts[n]:
            raise DocumentError(f"{path}[{n}]", f"expected {space.atom_counts[n]} atom values")
        row = np.empty(space.atom_counts[n])
        for a, x in enumerate(level):
            row[space.atom_index[n][level_atoms[n][a][0]]] = _number(x, f"{path}[{n}][{a}]")
        rows.append(row)
    proc = AdaptedProcess(space, rows)
    if martingale:
        ok, where = is_martingale(proc)
        if not ok:
            raise DocumentError(f"{path}[{where[0] + 1}]", f"tower property fails below atom {where[1]}")
        return Martingale(space, proc.values, check=False)
    return proc


def load_document(text, martingale=True):
    """Parse a document into ``(space, {name: process})``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"invalid JSON ({exc})") from None
    space = space_from_doc(doc)
    procs = doc.get("processes", {}) if isinstance(doc, dict) else {}
    if not isinstance(procs, dict):
        raise DocumentError("$.processes", "expected an object")
    return space, {
        name: process_from_doc(space, vals, f"$.processes.{name}", martingale, doc["level_atoms"])
        for name, vals in procs.items()
    }


def load_space(path, martingale=True):
    with open(path, encoding="utf-8") as fh:
        return load_document(fh.read(), martingale)


def dump_document(space: FilteredSpace, processes=None, indent=None):
    doc = {
        "depth": space.depth,
        "leaf_probs": [float(x) for x in space.leaf_probs],
        "level_atoms": space.level_atoms,
        "processes": {name: [v.tolist() for v in proc.values] for name, proc in (processes or {}).items()},
    }
    return json.dumps(doc, indent=indent)


def save_space(path, space, processes=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_document(space, processes, indent=2))
