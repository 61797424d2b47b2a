"""Positive definite completion of partial matrices over Gaussian DAG models."""

from .analytics import (
    C4Report,
    InverseReport,
    c4_inequalities,
    c4_partial_matrix,
    counterexample_partial_matrix,
    markov_determinant,
    markov_inverse,
    separation_split_inverse,
)
from .completion import (
    complete_decomposable,
    complete_in_p,
    complete_in_pd,
    complete_in_pd_perfect,
    complete_via_immorality_closure,
    verify_in_p,
    verify_in_pd,
)
from .graph import Dag, UGraph, topological_relabel
from .partial import PartialMatrix, from_dag_pattern, is_partial_positive_definite

__version__ = "0.1.0"
