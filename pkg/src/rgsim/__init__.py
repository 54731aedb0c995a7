"""All-photonic repeater-link simulator built on an exact stabilizer core.

Layers, bottom to top:

- `tableau` / `pauli`: bit-packed stabilizer simulator (compiled kernels
  with a NumPy fallback), the ground-truth oracle for everything above.
- `clifford1` / `graphstate`: graph-plus-side-effect states and the three
  manipulation rules the protocol needs.
- `build`: the deterministic emitter sequence producing one anchored half
  of a repeater graph state, plus the half-joining step.
- `decoder`: ABSA-side classical processing and end-node Pauli frames.
- `netsim`: whole-chain trials, lossy channels, batches, verification.
- `verify` / `cli`: invariant suites and the operator entry point.
"""

from .build import (
    compile_half_rgs,
    execute_schedule,
    join_halves,
    photons_per_arm,
    resource_report,
    tree_size,
)
from .decoder import (
    AbsaReport,
    BsmOutcome,
    PauliFrame,
    absa_process,
    build_tree,
    decode_logical,
    end_node_frame,
    indirect_z,
    propagate_bsm,
    run_bsm,
    select_arm,
)
from .graphstate import GraphState
from .netsim import (
    ChainConfig,
    TrialRecord,
    run_batch,
    run_trial,
    survival_from_length,
    transmit,
    verify_final,
)
from .pauli import PauliString
from .tableau import Tableau, active_backend, new_tableau

__all__ = [
    "AbsaReport",
    "BsmOutcome",
    "ChainConfig",
    "GraphState",
    "PauliFrame",
    "PauliString",
    "Tableau",
    "TrialRecord",
    "absa_process",
    "active_backend",
    "build_tree",
    "compile_half_rgs",
    "decode_logical",
    "end_node_frame",
    "execute_schedule",
    "indirect_z",
    "join_halves",
    "new_tableau",
    "photons_per_arm",
    "propagate_bsm",
    "resource_report",
    "run_batch",
    "run_bsm",
    "run_trial",
    "select_arm",
    "survival_from_length",
    "transmit",
    "tree_size",
    "verify_final",
]

__version__ = "0.1.0"
