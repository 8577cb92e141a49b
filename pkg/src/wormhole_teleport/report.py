"""Protocol reports and their JSON/CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

LN2 = math.log(2)

# excluded when comparing two runs for reproducibility
VOLATILE_KEYS = frozenset({"created", "duration_s", "timestamp", "wall_clock_s"})


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def complex_matrix_to_json(m: np.ndarray | None) -> list | None:
    if m is None:
        return None
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def complex_matrix_from_json(data: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)


def complex_vector_to_json(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


@dataclass
class ProtocolReport:
    teleported_state_label: str
    output_fidelity: float
    hawking_fidelity: float | None = None
    hawking_entropy_nats: float | None = None
    hawking_reduced_dm: np.ndarray | None = None
    epr_restored_fidelity: float | None = None
    output_reduced_dm: np.ndarray | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def hawking_entropy_over_ln2(self) -> float | None:
        if self.hawking_entropy_nats is None:
            return None
        return self.hawking_entropy_nats / LN2

    def to_dict(self) -> dict[str, Any]:
        return {
            "teleported_state_label": self.teleported_state_label,
            "output_fidelity": self.output_fidelity,
            "hawking_fidelity": self.hawking_fidelity,
            "hawking_entropy_nats": self.hawking_entropy_nats,
            "hawking_entropy_over_ln2": self.hawking_entropy_over_ln2,
            "hawking_reduced_dm": complex_matrix_to_json(self.hawking_reduced_dm),
            "epr_restored_fidelity": self.epr_restored_fidelity,
            "output_reduced_dm": complex_matrix_to_json(self.output_reduced_dm),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ProtocolReport:
        def dm(key):
            return None if d.get(key) is None else complex_matrix_from_json(d[key])

        return cls(
            teleported_state_label=d["teleported_state_label"],
            output_fidelity=d["output_fidelity"],
            hawking_fidelity=d.get("hawking_fidelity"),
            hawking_entropy_nats=d.get("hawking_entropy_nats"),
            hawking_reduced_dm=dm("hawking_reduced_dm"),
            epr_restored_fidelity=d.get("epr_restored_fidelity"),
            output_reduced_dm=dm("output_reduced_dm"),
            metadata=dict(d.get("metadata", {})),
        )

    def to_json(self, **kw) -> str:
        return dumps(self.to_dict(), **kw)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    return json.dumps(obj, indent=indent, default=_default, sort_keys=False) + "\n"


def strip_volatile(obj: Any) -> Any:
    """Drop timestamp/duration fields recursively, for reproducibility comparisons."""
    if isinstance(obj, dict):
        return {k: strip_volatile(v) for k, v in obj.items() if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [strip_volatile(v) for v in obj]
    return obj


def rows_to_csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
