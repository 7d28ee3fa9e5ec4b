"""Adjoining a unit and a socle vector to an algebra with invariant form, and
the inverse construction for local algebras.

Slot convention for the unitalised algebra of an ``n``-dimensional ``A``:
index 0 is the new unit ``1``, indices ``1..n`` are the basis of ``A`` and
index ``n + 1`` is the new socle vector ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import (
    Algebra,
    algebra_from_tensor,
    find_unit,
    is_ideal,
    local_decomposition,
)
from .errors import NotAssociative, NotLocal, NotUnital, SocleTooBig
from .scalars import ONE, all_zero, exact_zeros, is_zero
from .tensor import BilinearForm, SymTensor3, associator_zero, default_form, form_is_invariant


@dataclass
class UnitalisedAlgebra:
    inner: Algebra
    total: Algebra

    @property
    def unit_index(self) -> int:
        return 0

    @property
    def y_index(self) -> int:
        return self.inner.dim + 1

    def embed(self, v) -> np.ndarray:
        """Image of an element of ``A`` in the unitalisation."""
        n = self.inner.dim
        out = exact_zeros(n + 2) if self.total.exact else np.zeros(n + 2, complex)
        out[1 : n + 1] = v
        return out

    def embed_matrix(self, w: np.ndarray) -> np.ndarray:
        n = self.inner.dim
        out = exact_zeros((n + 2, w.shape[1])) if self.total.exact else np.zeros(
            (n + 2, w.shape[1]), complex
        )
        out[1 : n + 1] = w
        return out

    def one(self) -> np.ndarray:
        return self.total.basis_vector(0)

    def y(self) -> np.ndarray:
        return self.total.basis_vector(self.y_index)


def _extended_form(form: BilinearForm) -> BilinearForm:
    n = form.dim
    g = exact_zeros((n + 2, n + 2)) if form.exact else np.zeros((n + 2, n + 2), complex)
    g[1 : n + 1, 1 : n + 1] = form.gram
    g[0, n + 1] = g[n + 1, 0] = ONE if form.exact else 1.0
    return BilinearForm(g)


def unitalize(a: Algebra, check: bool = True) -> UnitalisedAlgebra:
    """``1*x = x``, ``a*a' = aa' + (a|a')y``, ``a*y = y*y = 0``, ``(1|y) = 1``."""
    n = a.dim
    exact = a.exact
    mul = exact_zeros((n + 2,) * 3) if exact else np.zeros((n + 2,) * 3, complex)
    one = ONE if exact else 1.0
    for j in range(n + 2):
        mul[0, j, j] = one
        mul[j, 0, j] = one
    mul[1 : n + 1, 1 : n + 1, 1 : n + 1] = a.mul
    mul[1 : n + 1, 1 : n + 1, n + 1] = a.form.gram
    form = _extended_form(a.form)
    total = Algebra(mul, form, validate=False, tol=a.tol)
    if check:
        if not associator_zero(mul, a.tol):
            raise NotAssociative("unitalisation is not associative; the input is malformed")
        if not form_is_invariant(mul, form.gram, a.tol):
            raise ValueError("unitalised form is not invariant; the input is malformed")
    return UnitalisedAlgebra(a, total)


def unitalize_tensor(t: SymTensor3, f: BilinearForm | None = None) -> tuple[SymTensor3, BilinearForm]:
    """Tensor and form of the unitalisation of the algebra of ``t``."""
    f = default_form(t, f)
    u = unitalize(algebra_from_tensor(t, f), check=False)
    return u.total.to_tensor(), u.total.form


def cw_tensor(n: int, exact: bool = True) -> SymTensor3:
    """Coppersmith-Winograd tensor on ``n + 2`` slots: the symmetrisations of
    ``y a_i a_i`` (``i = 1..n``) and ``1 y y``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    y = n + 1
    coeffs = {(i, i, y): 1 for i in range(1, n + 1)}
    coeffs[(0, y, y)] = 1
    return SymTensor3(n + 2, coeffs, exact)


# --------------------------------------------------------------------------
# de-unitalisation


@dataclass
class DeunitalisedAlgebra:
    algebra: Algebra
    section: np.ndarray  # basis of {m in M : (1|m) = 0}, as columns
    socle_vector: np.ndarray  # z spanning M^d with (1|z) = 1
    maximal_ideal: np.ndarray
    nilpotency_degree: int  # d with M^d != 0 = M^(d+1)


def _product_span(a: Algebra, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = a.dim
    cols = [a.multiply(u[:, i], v[:, j]) for i in range(u.shape[1]) for j in range(v.shape[1])]
    if not cols:
        return exact_zeros((n, 0)) if a.exact else np.zeros((n, 0), complex)
    return linalg.column_basis(np.stack(cols, axis=1), a.tol)


def maximal_ideal(a: Algebra) -> np.ndarray:
    """Kernel of ``x -> tr L_x``, certified to consist of nilpotent elements."""
    if find_unit(a) is None:
        raise NotUnital("algebra has no unit")
    traces = np.array([[np.trace(a.mul[m]) for m in range(a.dim)]], dtype=a.mul.dtype)
    m = linalg.kernel_matrix(traces, a.tol)
    for j in range(m.shape[1]):
        if not linalg.is_nilpotent_matrix(a.L(m[:, j]), a.tol):
            raise NotLocal("algebra is not local")
    return m


def ideal_powers(a: Algebra, m: np.ndarray) -> list[np.ndarray]:
    """``[M, M^2, ...]`` up to the last nonzero power."""
    powers = [m]
    while True:
        nxt = _product_span(a, powers[-1], m)
        if nxt.shape[1] == 0:
            return powers
        if nxt.shape[1] == powers[-1].shape[1]:
            raise NotLocal("powers of the maximal ideal do not terminate")
        powers.append(nxt)


def deunitalize(b: Algebra) -> DeunitalisedAlgebra:
    """Recover the nilpotent ``A`` with ``B = unitalisation of A``.

    The result is written in the canonical (reduced echelon) basis of the
    section ``{m in M : (1|m) = 0}``.
    """
    if b.dim < 2:
        raise NotLocal("need dimension at least 2")
    unit = find_unit(b)
    if unit is None:
        raise NotUnital("algebra has no unit")
    m = maximal_ideal(b)
    powers = ideal_powers(b, m)
    top = powers[-1]
    if top.shape[1] != 1:
        raise SocleTooBig(f"minimal power of the maximal ideal has dimension {top.shape[1]}")
    z = top[:, 0]
    pairing = b.form.pair(unit, z)
    if is_zero(pairing, b.tol):
        raise SocleTooBig("(1|z) = 0: the form is degenerate or not invariant")
    z = z / pairing
    # section: m in M with (1|m) = 0
    functional = (unit @ b.form.gram @ m).reshape(1, -1)
    section = linalg.reduced_column_basis(m @ linalg.kernel_matrix(functional, b.tol), b.tol)
    d = section.shape[1]
    linv = linalg.left_inverse(section, b.tol)
    mul = exact_zeros((d, d, d)) if b.exact else np.zeros((d, d, d), complex)
    for i in range(d):
        for j in range(i, d):
            prod = b.multiply(section[:, i], section[:, j])
            prod = prod - b.form.pair(unit, prod) * z
            mul[i, j] = mul[j, i] = linv @ prod
    form = b.form.restrict(section)
    inner = Algebra(mul, form, validate=False, tol=b.tol)
    return DeunitalisedAlgebra(inner, section, z, m, len(powers))


# --------------------------------------------------------------------------
# block structure of the unitalisation


@dataclass
class TildeBlocks:
    unitalised: UnitalisedAlgebra
    blocks: list  # bases of phi_i(V_i) in the unitalisation
    block_units: list  # phi_i(e_i)
    nilpotent: np.ndarray  # basis of span(N, y, 1 - sum e_i)
    naive_unit: np.ndarray  # 1 - sum e_i
    unit: np.ndarray  # 1 - sum phi_i(e_i), the unit of the last block
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for k, v in self.checks.items() if k != "naive_unit_idempotent")


def decomp_tilde(t: SymTensor3, f: BilinearForm | None = None, seed: int = 0) -> TildeBlocks:
    """Push the decomposition of ``t``'s algebra into its unitalisation.

    Each unital block ``V_i`` with unit ``e_i`` maps to ``v -> v + (v|e_i) y``;
    the nilpotent block ``N`` together with ``y`` and ``1 - sum e_i`` spans the
    remaining ideal.  Its unit is ``1 - sum (e_i + (e_i|e_i) y)``; the naive
    ``1 - sum e_i`` is reported as well, with a flag telling whether it happens
    to be idempotent.
    """
    f = default_form(t, f)
    a = algebra_from_tensor(t, f)
    dec = local_decomposition(a, seed)
    ua = unitalize(a)
    tot = ua.total
    y = ua.y()
    blocks, units = [], []
    naive = ua.one()
    for blk in dec.blocks:
        e = blk.unit
        pairings = e @ a.form.gram @ blk.basis  # (v|e_i) per basis vector
        basis = ua.embed_matrix(blk.basis) + np.outer(y, pairings)
        blocks.append(basis)
        units.append(ua.embed(e) + a.form.pair(e, e) * y)
        naive = naive - ua.embed(e)
    true_unit = ua.one() - sum(units, start=tot.basis_vector(0) * 0)
    nil = np.concatenate(
        [ua.embed_matrix(dec.nilpotent), y.reshape(-1, 1), naive.reshape(-1, 1)], axis=1
    )

    checks = {}
    parts = blocks + [nil]
    full = np.concatenate(parts, axis=1)
    checks["spans_everything"] = linalg.matrix_rank(full, tot.tol) == tot.dim == full.shape[1]
    checks["ideals"] = all(is_ideal(tot, p) for p in parts)
    orth, annihilate = True, True
    for i, p in enumerate(parts):
        for q in parts[i + 1 :]:
            orth &= all_zero(p.T @ tot.form.gram @ q, tot.tol)
            for c in range(p.shape[1]):
                annihilate &= all_zero(tot.L(p[:, c]) @ q, tot.tol)
    checks["orthogonal"] = bool(orth)
    checks["products_vanish"] = bool(annihilate)
    unit_ok = True
    for p, e in zip(blocks, units):
        unit_ok &= all_zero(tot.L(e) @ p - p, tot.tol)
    checks["block_units"] = bool(unit_ok)
    checks["last_unit"] = bool(
        all_zero(tot.L(true_unit) @ nil - nil, tot.tol)
        and linalg.span_equal(nil, np.concatenate([nil, true_unit.reshape(-1, 1)], axis=1), tot.tol)
    )
    checks["naive_unit_kills_blocks"] = all(
        all_zero(tot.L(naive) @ p, tot.tol) for p in blocks
    )
    checks["naive_unit_idempotent"] = bool(all_zero(tot.multiply(naive, naive) - naive, tot.tol))
    return TildeBlocks(ua, blocks, units, nil, naive, true_unit, checks)


__all__ = [
    "DeunitalisedAlgebra",
    "TildeBlocks",
    "UnitalisedAlgebra",
    "cw_tensor",
    "decomp_tilde",
    "deunitalize",
    "ideal_powers",
    "maximal_ideal",
    "unitalize",
    "unitalize_tensor",
]
