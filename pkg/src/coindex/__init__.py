"""Congruence-image bounds and infinite-index certification for a
subgroup of GL2 over the Eisenstein integers."""

from .abelian import IntMat, abelian_invariants, int_rank, snf, subgroup_image_rank
from .congruence import (
    bsgs_order,
    cayley_coset_table,
    closure_order,
    congruence_index_bound,
    multi_modulus_bound,
    orbit_stabilizer_schreier,
)
from .eiszeta import EisensteinInt, MatZ2, PaperDataset, builtin_dataset
from .ffq import FieldDesc, MatFq2, make_reduction, reduce_matrix
from .pipeline import CertifyConfig, certify_infinite_index
from .reidemeister import rs_rewrite, schreier_transversal, subgroup_presentation
from .toddcoxeter import CosetTable, TCConfig, coset_enumerate
from .words import Presentation, Word, parse_word, simplify_presentation, tietze_eliminate

__version__ = "0.1.0"

__all__ = [
    "EisensteinInt", "MatZ2", "PaperDataset", "builtin_dataset",
    "FieldDesc", "MatFq2", "make_reduction", "reduce_matrix",
    "Presentation", "Word", "parse_word", "tietze_eliminate", "simplify_presentation",
    "closure_order", "bsgs_order", "cayley_coset_table",
    "orbit_stabilizer_schreier", "congruence_index_bound", "multi_modulus_bound",
    "CosetTable", "TCConfig", "coset_enumerate",
    "schreier_transversal", "rs_rewrite", "subgroup_presentation",
    "IntMat", "snf", "int_rank", "abelian_invariants", "subgroup_image_rank",
    "CertifyConfig", "certify_infinite_index",
]
