"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``WORMHOLE_TELEPORT_KERNELS=python`` to force the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # no compiler at install time
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = os.environ.get("WORMHOLE_TELEPORT_KERNELS", "").strip().lower() or None
    if name is None:
        return BACKENDS.get("cython", _pykernels)
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}") from None


_active = get_backend()
BACKEND = "cython" if _active is _ckernels else "python"

apply_unitary = _active.apply_unitary
reduced_density = _active.reduced_density
ry_ansatz_matrix = _active.ry_ansatz_matrix
