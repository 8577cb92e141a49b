"""Measurement-free, entanglement-recycling quantum teleportation.

Exact dense simulation of the protocol, its security analysis under
pseudo-pure noise, thermofield double states, and a variational search for
the sender/receiver unitary on larger registers.
"""
__version__ = "0.1.0"

from .circuits import build_v, epr_pair, standard_teleportation, superdense_code, v_closed_form
from .kernels import BACKEND
from .noise import ExperimentConfig, NoiseConfig, pseudo_pure, run_experiment, sample_counts, tomography_1q
from .protocols import (
    TfdSpec,
    black_hole_side_entropy,
    general_protocol,
    measurement_free_teleport,
    recycle_teleport,
    tfd_state,
)
from .qstate import (
    apply_unitary,
    fidelity,
    hermitian_sqrt,
    partial_trace,
    tensor_product,
    to_density,
    von_neumann_entropy,
)
from .report import ProtocolReport
from .variational import AnsatzSpec, OptimizerConfig, cost, optimize, ry_ansatz, verify_v_equivalence

__all__ = [
    "BACKEND", "AnsatzSpec", "ExperimentConfig", "NoiseConfig", "OptimizerConfig", "ProtocolReport",
    "TfdSpec", "apply_unitary", "black_hole_side_entropy", "build_v", "cost", "epr_pair", "fidelity",
    "general_protocol", "hermitian_sqrt", "measurement_free_teleport", "optimize", "partial_trace",
    "pseudo_pure", "recycle_teleport", "run_experiment", "ry_ansatz", "sample_counts",
    "standard_teleportation", "superdense_code", "tensor_product", "tfd_state", "to_density",
    "tomography_1q", "v_closed_form", "verify_v_equivalence", "von_neumann_entropy",
]
