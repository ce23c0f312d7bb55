"""Shared numeric tolerances.

A single record so that code and tests agree on what "equal" means for
matrices and how strictly structural properties are enforced.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericSettings:
    #: max-entry absolute difference below which two matrices are "equal"
    equality_tol: float = 1e-9
    #: entrywise residual above which the (anti-)Hermiticity check fails
    hermiticity_tol: float = 1e-9
    #: residual target of the dense eigensolver, relative to ||H||
    eigen_residual_tol: float = 1e-10
    #: |Im| threshold used when classifying eigenvalues as nonreal
    nonreal_tol: float = 1e-9


DEFAULT_NUMERIC = NumericSettings()


def matrices_equal(a, b, tol=None):
    """Tolerance-based matrix equality (max-entry absolute difference)."""
    import numpy as np

    if a.shape != b.shape:
        return False
    t = DEFAULT_NUMERIC.equality_tol if tol is None else tol
    return bool(np.max(np.abs(a - b)) <= t)
