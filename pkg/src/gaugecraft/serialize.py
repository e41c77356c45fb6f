"""JSON schemas for groups, cocycles, tensors and representations.

Complex numbers are [re, im] pairs throughout; NaN/Inf are rejected.  These
formats are the wire contract of the command-line tools.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .cohomology import Cocycle, CocycleMatrix, cocycle_from_matrix
from .groups import AbelianGroup, Subgroup, make_group, subgroup_span
from .projrep import Representation
from .tensornet import MpsTensor, UnitCellMps


def _c2pair(z: complex) -> list[float]:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite value in serialization")
    return [float(z.real), float(z.imag)]


def _pair2c(pair) -> complex:
    re, im = float(pair[0]), float(pair[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValueError("non-finite value in JSON input")
    return complex(re, im)


def array_to_json(arr: np.ndarray) -> list:
    flat = [_c2pair(complex(z)) for z in np.asarray(arr, dtype=complex).reshape(-1)]
    return flat


def array_from_json(flat, shape) -> np.ndarray:
    data = np.array([_pair2c(p) for p in flat], dtype=complex)
    return data.reshape(shape)


# group / subgroup -----------------------------------------------------------


def group_to_json(group: AbelianGroup) -> dict:
    return {"moduli": list(group.moduli)}


def group_from_json(obj) -> AbelianGroup:
    if "moduli" not in obj:
        raise ValueError("group JSON needs a 'moduli' key")
    return make_group(obj["moduli"])


def subgroup_from_json(group: AbelianGroup, obj) -> Subgroup:
    gens = [tuple(int(x) for x in g) for g in obj.get("generators", [])]
    return subgroup_span(group, gens)


# cocycle --------------------------------------------------------------------


def cocycle_to_json(alpha: Cocycle) -> dict:
    n = len(alpha.group.elements)
    return {"table": array_to_json(alpha.values), "size": n}


def cocycle_from_json(group, obj) -> Cocycle:
    if "matrix" in obj:
        if not isinstance(group, AbelianGroup):
            raise ValueError("matrix cocycles require a full moduli group")
        mat = CocycleMatrix(group, tuple(tuple(r) for r in obj["matrix"]))
        return cocycle_from_matrix(mat)
    if "table" in obj:
        n = len(group.elements)
        return Cocycle(group, array_from_json(obj["table"], (n, n)))
    raise ValueError("cocycle JSON needs a 'matrix' or a 'table' key")


# MPS ------------------------------------------------------------------------


def mps_to_json(cell: UnitCellMps) -> dict:
    sites = []
    for t in cell.tensors:
        sites.append({"shape": list(t.shape), "data": array_to_json(t.data)})
    return {"sites": sites}


def mps_from_json(obj) -> UnitCellMps:
    if "sites" not in obj or not obj["sites"]:
        raise ValueError("MPS JSON needs a non-empty 'sites' list")
    tensors = []
    for site in obj["sites"]:
        shape = tuple(int(x) for x in site["shape"])
        if len(shape) != 3:
            raise ValueError(f"site shape must be rank 3, got {shape}")
        data = array_from_json(site["data"], shape)
        tensors.append(MpsTensor(data))
    return UnitCellMps(tensors)


# representation -------------------------------------------------------------


def representation_to_json(rep: Representation) -> dict:
    mats = {
        str(i): array_to_json(rep.matrices[i]) for i in range(len(rep.group.elements))
    }
    return {
        "dim": rep.dim,
        "matrices": mats,
        "cocycle": cocycle_to_json(rep.cocycle),
    }


def representation_from_json(group, obj) -> Representation:
    d = int(obj["dim"])
    n = len(group.elements)
    mats = np.zeros((n, d, d), dtype=complex)
    for key, flat in obj["matrices"].items():
        mats[int(key)] = array_from_json(flat, (d, d))
    if "cocycle" in obj:
        alpha = cocycle_from_json(group, obj["cocycle"])
    else:
        alpha = Cocycle.trivial(group)
    return Representation(group, alpha, mats)


# files ----------------------------------------------------------------------


def load_json(path_or_literal: str):
    """Accept either a filesystem path or an inline JSON literal."""
    s = path_or_literal.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s)
    with open(path_or_literal) as fh:
        return json.load(fh)


def dump_json(obj, path: str | None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
