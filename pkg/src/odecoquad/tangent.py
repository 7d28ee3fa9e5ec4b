"""Zariski tangent spaces of the variety cut out by Robeva's quadrics."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from . import linalg
from .scalars import DEFAULT_TOL, exact_zeros, gq, to_float
from .tensor import (
    BilinearForm,
    SymTensor3,
    canonical_tuples,
    default_form,
    robeva_residuals,
    sorted_triples,
    structure_constants,
)


@dataclass(frozen=True)
class TangentReport:
    base_dim: int
    ambient_dim: int
    tangent_dim: int
    expected_Y_dim: int
    in_X: bool

    @property
    def excess(self) -> int:
        return self.tangent_dim - self.expected_Y_dim

    @property
    def label(self) -> str:
        if self.in_X:
            return "tangent space"
        return "Jacobian kernel at a point outside the variety"


def _unknown_index(n: int) -> dict:
    return {t: u for u, t in enumerate(sorted_triples(n))}


def _sparse_rows_identity(t: SymTensor3) -> list[dict]:
    """Rows of the linearised quadrics at ``t`` for the standard form.

    Row ``(i,j,k,l)``: ``sum_r X_jkr T_ilr + T_jkr X_ilr - X_ijr T_klr - T_ijr X_klr``.
    """
    n = t.dim
    index = _unknown_index(n)
    dense = t.dense()
    rows = []
    for (i, j, k, l), _ in canonical_tuples(n):
        row: dict = {}

        def add(a, b, r, coeff):
            if coeff:
                u = index[tuple(sorted((a, b, r)))]
                row[u] = row.get(u, 0) + coeff

        for r in range(n):
            add(j, k, r, dense[i, l, r])
            add(i, l, r, dense[j, k, r])
            add(i, j, r, -dense[k, l, r])
            add(k, l, r, -dense[i, j, r])
        row = {u: v for u, v in row.items() if v}
        if row:
            rows.append(row)
    return rows


def _unit_tensors(n: int, exact: bool) -> np.ndarray:
    """Dense tensors of the symmetric basis elements, one per sorted triple."""
    triples = list(sorted_triples(n))
    out = exact_zeros((len(triples), n, n, n)) if exact else np.zeros((len(triples), n, n, n), complex)
    one = gq(1) if exact else 1.0
    for u, (a, b, c) in enumerate(triples):
        for p in {(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)}:
            out[(u,) + p] = one
    return out


def _dense_jacobian_general(t: SymTensor3, f: BilinearForm) -> np.ndarray:
    """Jacobian of the form-twisted residuals, rows on canonical tuples."""
    n = t.dim
    exact = t.exact and f.exact
    g = f.gram if exact else to_float(f.gram)
    c = structure_constants(t, f)
    basis = _unit_tensors(n, exact)
    dc = np.einsum("ia,jb,uabk->uijk", g, g, basis)
    # d(e_a e_b | e_c e_d) = (dc_ab | c_cd) + (c_ab | dc_cd)
    left = np.einsum("uabr,rs,cds->uabcd", dc, g, c)
    dq = left + left.transpose(0, 3, 4, 1, 2)
    reps = [tup for tup, _ in canonical_tuples(n)]
    rows = [dq[:, j, k, i, l] - dq[:, i, j, k, l] for i, j, k, l in reps]
    return np.stack(rows, axis=0) if rows else np.zeros((0, len(basis)))


def jacobian_matrix(t: SymTensor3, f: BilinearForm | None = None) -> np.ndarray:
    """Dense Jacobian (rows: canonical index tuples, columns: sorted triples)."""
    f = default_form(t, f)
    f.require_nondegenerate()
    n = t.dim
    if not f.is_identity:
        return _dense_jacobian_general(t, f)
    rows = _sparse_rows_identity(t)
    cols = comb(n + 2, 3)
    out = exact_zeros((len(rows), cols)) if t.exact else np.zeros((len(rows), cols), complex)
    for r, row in enumerate(rows):
        for u, v in row.items():
            out[r, u] = v
    return out


def _sparse_rank_exact(rows: list[dict], cols: int) -> int:
    if not rows:
        return 0
    values = [gq(v) for row in rows for v in row.values()]
    real = all(not v.im for v in values)
    dom = QQ if real else QQ_I
    sdm = {}
    for r, row in enumerate(rows):
        sdm[r] = {u: (gq(v).re if real else QQ_I(gq(v).re, gq(v).im)) for u, v in row.items()}
    return DomainMatrix(sdm, (len(rows), cols), dom).rank()


def tangent_dim(t: SymTensor3, f: BilinearForm | None = None, tol: float | None = None) -> TangentReport:
    """Dimension of the kernel of the linearised quadrics at ``t``."""
    f = default_form(t, f)
    f.require_nondegenerate()
    n = t.dim
    ambient = comb(n + 2, 3)
    in_x = robeva_residuals(t, f, tol).is_zero
    if f.is_identity and t.exact:
        rank = _sparse_rank_exact(_sparse_rows_identity(t), ambient)
    else:
        jac = jacobian_matrix(t, f)
        rank = linalg.matrix_rank(jac, DEFAULT_TOL if tol is None and not t.exact else tol)
    return TangentReport(n, ambient, ambient - rank, comb(n + 1, 2), in_x)


def tangent_dim_at_E_closed_form(n: int) -> int:
    """At the diagonal tensor the linear conditions force ``X_ijk = 0`` for
    distinct indices and ``X_iij = -X_ijj``; the free coordinates are the
    ``n`` values ``X_iii`` and one per pair ``i < j``."""
    if n < 1:
        raise ValueError("n must be positive")
    return n + comb(n, 2)


def orbit_tangent(t: SymTensor3, a: np.ndarray) -> SymTensor3:
    """Derivative of ``exp(s a) . t`` at ``s = 0``."""
    d = t.dense()
    x = np.einsum("ia,ajk->ijk", a, d)
    x = x + x.transpose(1, 0, 2) + x.transpose(1, 2, 0)
    return SymTensor3.from_dense(x)


def in_jacobian_kernel(t: SymTensor3, x: SymTensor3, f: BilinearForm | None = None,
                       tol: float | None = None) -> bool:
    jac = jacobian_matrix(t, f)
    vec = np.array([x[tr] for tr in sorted_triples(t.dim)], dtype=jac.dtype)
    res = jac @ vec
    if jac.dtype == object:
        return not any(res)
    scale = max(float(np.max(np.abs(jac))) if jac.size else 1.0, 1.0)
    return float(np.max(np.abs(res), initial=0.0)) <= (DEFAULT_TOL if tol is None else tol) * scale


__all__ = [
    "TangentReport",
    "in_jacobian_kernel",
    "jacobian_matrix",
    "orbit_tangent",
    "tangent_dim",
    "tangent_dim_at_E_closed_form",
]
