"""Dense linear algebra over Q(i) (exact) or complex doubles (float).

Matrices are 2-D numpy arrays.  Object arrays are handled exactly: they are
converted to sympy ``DomainMatrix`` objects in sparse format over QQ when
every entry is real and over QQ_I otherwise, and reduced there.  Complex
arrays use row reduction with a pivot threshold ``tol * max|entry|``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import NotDiagonalisable
from .scalars import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_TOL,
    ONE,
    ZERO,
    GaussQ,
    _new,
    exact_eye,
    exact_zeros,
    gq,
)


def _tol(tol):
    return DEFAULT_TOL if tol is None else tol


# --------------------------------------------------------------------------
# exact path


def to_domain_matrix(m: np.ndarray) -> DomainMatrix:
    rows, cols = m.shape
    entries = {}
    real = True
    for (i, j), x in np.ndenumerate(m):
        if x:
            g = gq(x)
            if g.im:
                real = False
            entries[(i, j)] = g
    sdm: dict[int, dict[int, object]] = {}
    for (i, j), g in entries.items():
        sdm.setdefault(i, {})[j] = g.re if real else QQ_I(g.re, g.im)
    return DomainMatrix(sdm, (rows, cols), QQ if real else QQ_I)


def _from_domain_element(x, domain) -> GaussQ:
    if domain == QQ:
        return GaussQ(x)
    return _new(QQ.convert(x.x), QQ.convert(x.y))


def from_domain_matrix(dm: DomainMatrix) -> np.ndarray:
    rows, cols = dm.shape
    out = exact_zeros((rows, cols))
    for i, row in dm.to_sdm().items():
        for j, x in row.items():
            out[i, j] = _from_domain_element(x, dm.domain)
    return out


def _rref_exact(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    if m.shape[0] == 0 or m.shape[1] == 0:
        return exact_zeros(m.shape), []
    dm = to_domain_matrix(m).to_sparse()
    r, pivots = dm.rref()
    return from_domain_matrix(r), list(pivots)


# --------------------------------------------------------------------------
# float path


def _rref_float(m: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    a = np.array(m, dtype=complex)
    rows, cols = a.shape
    if a.size == 0:
        return a, []
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return np.zeros_like(a), []
    thresh = tol * scale
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= thresh:
            a[r:, c] = 0
            continue
        a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        others = np.arange(rows) != r
        a[others] -= np.outer(a[others, c], a[r])
        pivots.append(c)
        r += 1
    a[r:] = 0
    return a, pivots


# --------------------------------------------------------------------------
# public API


def rref(m: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    if m.dtype == object:
        return _rref_exact(m)
    return _rref_float(m, _tol(tol))


def matrix_rank(m: np.ndarray, tol: float | None = None) -> int:
    return len(rref(m, tol)[1])


def kernel_basis(m: np.ndarray, tol: float | None = None) -> list[np.ndarray]:
    """Basis of the right kernel, one vector per free column of the rref."""
    cols = m.shape[1]
    r, pivots = rref(m, tol)
    exact = m.dtype == object
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = exact_zeros(cols) if exact else np.zeros(cols, dtype=complex)
        v[f] = ONE if exact else 1.0
        for row, p in enumerate(pivots):
            v[p] = -r[row, f]
        basis.append(v)
    return basis


def kernel_matrix(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Kernel basis as the columns of a matrix (``cols x dim ker``)."""
    basis = kernel_basis(m, tol)
    return _stack_columns(basis, m.shape[1], m.dtype == object)


def _stack_columns(vectors, length: int, exact: bool) -> np.ndarray:
    if not vectors:
        return exact_zeros((length, 0)) if exact else np.zeros((length, 0), dtype=complex)
    return np.stack(vectors, axis=1)


def solve_linear(m: np.ndarray, b: np.ndarray, tol: float | None = None):
    """One solution of ``m @ x = b``, or None when the system is inconsistent."""
    rows, cols = m.shape
    aug = np.concatenate([m, np.asarray(b, dtype=m.dtype).reshape(rows, 1)], axis=1)
    if m.dtype != object:
        # consistency in float mode is judged relative to ||b|| as well
        scale = max(float(np.max(np.abs(m))) if m.size else 0.0, 1.0)
        r, pivots = _rref_float(aug / scale, _tol(tol))
    else:
        r, pivots = rref(aug)
    if cols in pivots:
        return None
    exact = m.dtype == object
    x = exact_zeros(cols) if exact else np.zeros(cols, dtype=complex)
    for row, p in enumerate(pivots):
        x[p] = r[row, cols]
    return x


def column_basis(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Independent columns of ``m`` spanning its column space."""
    _, pivots = rref(m, tol)
    return m[:, pivots]


def well_conditioned(m: np.ndarray) -> np.ndarray:
    """Same column span; orthonormal columns in float mode, unchanged in exact mode."""
    if m.dtype == object or m.shape[1] == 0:
        return m
    q, _ = np.linalg.qr(m)
    return q


def reduced_column_basis(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Canonical basis of the column space: the nonzero rows of rref(m.T), as columns."""
    r, pivots = rref(m.T, tol)
    return r[: len(pivots)].T.copy()


def span_equal(a: np.ndarray, b: np.ndarray, tol: float | None = None) -> bool:
    """Column spans of ``a`` and ``b`` coincide."""
    ra, rb = matrix_rank(a, tol), matrix_rank(b, tol)
    if ra != rb:
        return False
    return matrix_rank(np.concatenate([a, b], axis=1), tol) == ra


def inverse(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if m.dtype != object:
        if matrix_rank(m, tol) < n:
            raise ZeroDivisionError("singular matrix")
        return np.linalg.inv(m)
    if n == 0:
        return exact_zeros((0, 0))
    aug = np.concatenate([m, exact_eye(n)], axis=1)
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise ZeroDivisionError("singular matrix")
    return r[:, n:].copy()


def left_inverse(w: np.ndarray, tol: float | None = None) -> np.ndarray:
    """A ``d x n`` matrix L with ``L @ w = I`` for ``w`` of full column rank ``d``."""
    n, d = w.shape
    exact = w.dtype == object
    if d == 0:
        return exact_zeros((0, n)) if exact else np.zeros((0, n), dtype=complex)
    _, rows = rref(w.T, tol)
    if len(rows) != d:
        raise ValueError("columns are linearly dependent")
    sub_inv = inverse(w[rows, :], tol)
    out = exact_zeros((d, n)) if exact else np.zeros((d, n), dtype=complex)
    out[:, rows] = sub_inv
    return out


def coordinates(w: np.ndarray, v: np.ndarray, tol: float | None = None):
    """Coordinates of ``v`` (vector or matrix of columns) in the column basis ``w``."""
    return left_inverse(w, tol) @ v


def is_nilpotent_matrix(m: np.ndarray, tol: float | None = None) -> bool:
    """``m**n == 0`` with ``n`` the size of ``m`` (relative test in float mode)."""
    n = m.shape[0]
    if n == 0:
        return True
    p = m
    for _ in range(n - 1):
        p = p @ m
    if m.dtype == object:
        return not any(p.reshape(-1))
    scale = max(float(np.max(np.abs(m))), 1.0) ** n
    return float(np.max(np.abs(p))) <= _tol(tol) * scale


# --------------------------------------------------------------------------
# eigen-clustering


def _cluster(values: np.ndarray, cluster_tol: float, scale: float) -> list[list[int]]:
    """Single-linkage clustering of eigenvalues.

    Two groups merge when their distance is within ``cluster_tol`` or within the
    spread a defective eigenvalue of the merged multiplicity could show after
    rounding, ``(eps * scale) ** (1 / k)``.
    """
    eps = np.finfo(float).eps
    groups = [[i] for i in range(len(values))]
    merged = True
    while merged:
        merged = False
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                k = len(groups[a]) + len(groups[b])
                allowed = max(cluster_tol, 10.0 * (eps * scale) ** (1.0 / k))
                dist = min(abs(values[i] - values[j]) for i in groups[a] for j in groups[b])
                if dist <= allowed:
                    groups[a] = groups[a] + groups[b]
                    del groups[b]
                    merged = True
                    break
            if merged:
                break
    groups.sort(key=lambda g: (np.mean(values[g]).real, np.mean(values[g]).imag))
    return groups


def _idempotent_refine(p: np.ndarray, iterations: int) -> np.ndarray:
    for _ in range(iterations):
        p2 = p @ p
        p = 3 * p2 - 2 * (p2 @ p)
    return p


def eigen_split(
    m: np.ndarray,
    tol: float | None = None,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    refine: bool = True,
) -> list[tuple[complex, np.ndarray]]:
    """Cluster the eigenvalues of ``m`` and return ``(eigenvalue, projector)`` pairs.

    Projectors are Lagrange polynomials in ``m`` on the cluster means.  With
    ``refine`` they are pushed to exact idempotency by ``p -> 3p^2 - 2p^3``,
    which turns them into spectral projectors onto generalized eigenspaces
    even when ``m`` has Jordan blocks.  Without ``refine`` a defective ``m``
    is rejected.
    """
    tol = _tol(tol)
    if m.dtype == object:
        raise TypeError("eigen_split works in float mode only")
    n = m.shape[0]
    if n == 0:
        return []
    m = np.asarray(m, dtype=complex)
    scale = max(float(np.max(np.abs(m))), 1.0)
    values = np.linalg.eigvals(m)
    groups = _cluster(values, cluster_tol, scale)
    reps = [complex(np.mean(values[g])) for g in groups]
    eye = np.eye(n, dtype=complex)
    projectors = []
    for c, lam in enumerate(reps):
        factors = [(m - mu * eye) / (lam - mu) for d, mu in enumerate(reps) if d != c]
        p = reduce(np.matmul, factors, eye)
        if refine:
            p = _idempotent_refine(p, 2 * int(np.ceil(np.log2(n + 1))) + 4)
        projectors.append(p)
    total = sum(projectors)
    bad = float(np.max(np.abs(total - eye)))
    for a, p in enumerate(projectors):
        bad = max(bad, float(np.max(np.abs(p @ p - p))))
        for q in projectors[a + 1 :]:
            bad = max(bad, float(np.max(np.abs(p @ q))))
    if not np.isfinite(bad) or bad > tol * scale * n:
        raise NotDiagonalisable(
            f"spectral projectors fail idempotency by {bad:.3g}; resample the element"
        )
    return list(zip(reps, projectors))


def identity(n: int, exact: bool = True) -> np.ndarray:
    return exact_eye(n) if exact else np.eye(n, dtype=complex)


__all__ = [
    "ONE",
    "ZERO",
    "column_basis",
    "coordinates",
    "eigen_split",
    "identity",
    "inverse",
    "is_nilpotent_matrix",
    "kernel_basis",
    "kernel_matrix",
    "left_inverse",
    "matrix_rank",
    "reduced_column_basis",
    "rref",
    "solve_linear",
    "span_equal",
]
