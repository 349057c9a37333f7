"""Exterior-algebra toolkit: compound matrices, exact Cauchy-Binet checks and a
truncated multilinear Parseval identity."""

from .cauchy_binet import (
    Decomposition,
    cauchy_binet_sum,
    embedding_matrix,
    minor,
    phi_identify,
    projection_matrix,
    verify_abstract,
    verify_classical,
    verify_determinant,
    verify_identified,
    verify_lemma1,
    verify_multiplicativity,
    verify_partition_of_identity,
    verify_pythagorean,
)
from .exterior import (
    AlternatingTensor,
    basis_tensor,
    compound,
    det_lu,
    det_top_power,
    evaluate,
    pullback,
    pullback_matrix,
    wedge,
)
from .reports import IdentityReport
from .scalars import as_matrix
from .subsets import enumerate_subsets, rank, unrank

__version__ = "0.1.0"
