"""Exact classification of the longest restricted Weyl element acting on
L-invariant vectors of irreducible highest-weight modules, for real forms
of orthogonal and exceptional simple Lie algebras."""

from .conjecture import (
    MinimalP,
    VerificationReport,
    minimal_p_i,
    table_predicate,
    verify_range,
)
from .exactla import SparseMat, Subspace, exp_nilpotent, kernel, restrict_operator
from .hwmodule import (
    HWModule,
    SizeCapError,
    TitsRep,
    build_module,
    tits_representative,
    weight_system,
    zero_weight_space,
)
from .linvariant import LInvariants, l_invariants, nonzero
from .rootsystem import CartanType, RootSystem, apply_word, build_root_system, longest_word, weyl_dim
from .satake import RestrictedRootSystem, SatakeDiagram, lookup_form, split_diagram
from .w0action import Classification, classify_w0, involution_check, w0_matrix_on_zero_space

__version__ = "0.1.0"

__all__ = [
    "CartanType",
    "Classification",
    "HWModule",
    "LInvariants",
    "MinimalP",
    "RestrictedRootSystem",
    "RootSystem",
    "SatakeDiagram",
    "SizeCapError",
    "SparseMat",
    "Subspace",
    "TitsRep",
    "VerificationReport",
    "apply_word",
    "build_module",
    "build_root_system",
    "classify_w0",
    "exp_nilpotent",
    "involution_check",
    "kernel",
    "l_invariants",
    "longest_word",
    "lookup_form",
    "minimal_p_i",
    "nonzero",
    "restrict_operator",
    "split_diagram",
    "table_predicate",
    "tits_representative",
    "verify_range",
    "w0_matrix_on_zero_space",
    "weight_system",
    "weyl_dim",
    "zero_weight_space",
]
