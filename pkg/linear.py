"""
Exact Linear Algebra
Row reduction, ranks and affine solves over the rationals or a prime field,
delegated to sympy's DomainMatrix.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from nc_core import FieldSpec

Vector = List[Any]


def _matrix(rows: Sequence[Sequence[Any]], ncols: int, field: FieldSpec) -> DomainMatrix:
    K = field.domain
    return DomainMatrix([[field.coerce(v) for v in row] for row in rows], (len(rows), ncols), K)


def _sparse(rows: Sequence[Dict[int, Any]], ncols: int, field: FieldSpec) -> DomainMatrix:
    data = {i: dict(row) for i, row in enumerate(rows) if row}
    return DomainMatrix(data, (len(rows), ncols), field.domain)


def _entries(M: DomainMatrix, field: FieldSpec) -> List[Vector]:
    K = field.domain
    return [[K.from_sympy(v) for v in M.to_Matrix().row(i)] for i in range(M.shape[0])]


def rref(rows: Sequence[Sequence[Any]], ncols: int, field: FieldSpec) -> Tuple[List[Vector], Tuple[int, ...]]:
    """
    Reduced row echelon form.

    Returns:
        The nonzero rows of the reduced matrix and the pivot columns
    """
    if not rows:
        return [], ()
    M, pivots = _matrix(rows, ncols, field).rref()
    return _entries(M, field)[: len(pivots)], tuple(pivots)


def sparse_pivots(rows: Sequence[Dict[int, Any]], ncols: int, field: FieldSpec) -> Tuple[int, ...]:
    """Pivot columns of a sparse matrix given as column -> value rows."""
    if not any(rows):
        return ()
    _, pivots = _sparse(rows, ncols, field).rref()
    return tuple(pivots)


def rank(rows: Sequence[Sequence[Any]], ncols: int, field: FieldSpec) -> int:
    if not rows or ncols == 0:
        return 0
    return _matrix(rows, ncols, field).rank()


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, field: FieldSpec) -> List[Vector]:
    """Basis of {v : rows . v = 0}, one vector per free column in increasing order."""
    reduced, pivots = rref(rows, ncols, field)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        v = [field.zero] * ncols
        v[j] = field.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[j]
        basis.append(v)
    return basis


def solve_affine(rows: Sequence[Sequence[Any]], rhs: Sequence[Any], ncols: int,
                 field: FieldSpec) -> Optional[Tuple[Vector, List[Vector]]]:
    """
    Solve rows . v = rhs.

    Returns:
        (particular solution with free variables 0, nullspace basis), or None when inconsistent
    """
    if not rows:
        return [field.zero] * ncols, nullspace([], ncols, field) if ncols else []
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1, field)
    if pivots and pivots[-1] == ncols:
        return None
    particular = [field.zero] * ncols
    for row, p in zip(reduced, pivots):
        particular[p] = row[ncols]
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        v = [field.zero] * ncols
        v[j] = field.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[j]
        basis.append(v)
    return particular, basis


def solve_sparse(rows: Sequence[Dict[int, Any]], rhs: Sequence[Any], ncols: int,
                 field: FieldSpec) -> Optional[Vector]:
    """
    Sparse variant of solve_affine returning only the particular solution (free variables 0).

    Rows map column -> coefficient; returns None when the system is inconsistent.
    """
    particular = [field.zero] * ncols
    augmented = []
    for row, b in zip(rows, rhs):
        entry = {j: field.coerce(v) for j, v in row.items() if v}
        b = field.coerce(b)
        if b:
            entry[ncols] = b
        augmented.append(entry)
    if not any(augmented):
        return particular
    M, pivots = _sparse(augmented, ncols + 1, field).rref()
    if pivots and pivots[-1] == ncols:
        return None
    reduced = M.to_sparse().rep
    for i, p in enumerate(pivots):
        particular[p] = reduced.get(i, {}).get(ncols, field.zero)
    return particular
