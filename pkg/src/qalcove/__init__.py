"""Quantum alcove model crystals and combinatorial R-matrices."""

from .chains import (
    ChainMove,
    LambdaChain,
    apply_reversal,
    concat_chains,
    connect_chains,
    omega_chain,
    valid_moves,
)
from .errors import InvalidInput, ResourceLimit, TheoremViolation
from .model import (
    CrystalGraph,
    admissible_kinds,
    build_crystal,
    crystal_dot,
    crystal_json,
    crystal_step,
    enumerate_admissible,
    fold_data,
    height_of,
    is_admissible,
    sign_word,
)
from .roots import (
    RootRef,
    RootSystem,
    build_root_system,
    is_quantum_root,
    rank2_subsystem,
    reflect_weight,
    subsystem_census,
)
from .typea import (
    TensorElement,
    build_tensor_crystal,
    charge,
    dual_demazure_filter,
    jdt_swap,
    jdt_two_columns,
    sfill,
    tableau_crystal_step,
    tensor_element,
    verify_isomorphism,
)
from .weyl import (
    WeylElement,
    build_qbg,
    from_one_line,
    identity_element,
    one_line,
    qb_edge,
    root_reflection,
    shellable_path,
    simple_reflection,
)
from .ybmoves import (
    apply_moves,
    column_perfect,
    connect_moves,
    move_contexts,
    probe_connection_conjecture,
    r_matrix,
    r_matrix_label,
    rank2_table_lookup,
    verify_tables,
    yb_context,
    yb_move,
)

__version__ = "0.1.0"
