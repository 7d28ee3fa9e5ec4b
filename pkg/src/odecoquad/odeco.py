"""Strongly and weakly odeco tensors, isotropic subspaces, dimension counts."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import linalg
from .errors import NotOrthogonal, ZeroParameter
from .scalars import I, ONE, all_zero, exact_array, exact_eye, exact_zeros, gq, is_zero, to_float
from .tensor import (
    BilinearForm,
    SymTensor3,
    default_form,
    flattening,
    sorted_triples,
    structure_constants,
)


def diagonal_tensor(n: int, exact: bool = True) -> SymTensor3:
    """``E = sum_i e_i (x) e_i (x) e_i``."""
    return SymTensor3(n, {(i, i, i): 1 for i in range(n)}, exact)


def hyperbolic_S(exact: bool = True) -> SymTensor3:
    """``S = e1 e2 e2 + e2 e1 e2 + e2 e2 e1`` on C^2 (pair with the hyperbolic form)."""
    return SymTensor3(2, {(0, 1, 1): 1}, exact)


@dataclass(frozen=True)
class OdecoSpec:
    vectors: tuple
    form: BilinearForm

    def check(self, tol: float | None = None):
        for i, v in enumerate(self.vectors):
            if all_zero(np.asarray(v), tol):
                raise ValueError(f"vector {i} is zero")
        for i in range(len(self.vectors)):
            for j in range(i + 1, len(self.vectors)):
                if not is_zero(self.form.pair(self.vectors[i], self.vectors[j]), tol):
                    raise NotOrthogonal(i, j)


@dataclass(frozen=True)
class IsotropicBasis:
    vectors: tuple
    form: BilinearForm

    @property
    def matrix(self) -> np.ndarray:
        """The basis vectors as columns (``n x m``)."""
        n = self.form.dim
        if not self.vectors:
            return exact_zeros((n, 0)) if self.form.exact else np.zeros((n, 0), complex)
        return np.stack(self.vectors, axis=1)

    def gram(self) -> np.ndarray:
        u = self.matrix
        return u.T @ self.form.gram @ u


def odeco_from_vectors(spec: OdecoSpec, tol: float | None = None) -> SymTensor3:
    """``sum_i v_i^{(x)3}`` for pairwise orthogonal nonzero ``v_i``."""
    spec.check(tol)
    n = spec.form.dim
    if not spec.vectors:
        return SymTensor3.zero(n, spec.form.exact)
    return SymTensor3.from_vectors(spec.vectors, exact=spec.form.exact)


def cayley_orthogonal(n: int, rng: np.random.Generator, exact: bool = True) -> np.ndarray:
    """Rational orthogonal matrix ``(I - A)(I + A)^{-1}`` for a random
    antisymmetric integer matrix ``A``."""
    a = exact_zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = int(rng.integers(-3, 4))
            a[i, j] = gq(v)
            a[j, i] = gq(-v)
    eye = exact_eye(n)
    q = (eye - a) @ linalg.inverse(eye + a)
    return q if exact else to_float(q)


def _nonzero_rational(rng: np.random.Generator):
    num = int(rng.integers(1, 6)) * (1 if rng.integers(0, 2) else -1)
    den = int(rng.integers(1, 4))
    return gq(num) / den


def random_orthogonal_family(n: int, k: int, seed: int = 0, exact: bool = True) -> OdecoSpec:
    """``k`` pairwise orthogonal, non-isotropic vectors for the standard form.

    Columns of a Cayley-transform orthogonal matrix, scaled by random nonzero
    rationals; orthogonality is exact.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = np.random.default_rng(seed)
    q = cayley_orthogonal(n, rng)
    cols = rng.permutation(n)[:k]
    vectors = tuple(q[:, c] * _nonzero_rational(rng) for c in cols)
    if not exact:
        vectors = tuple(to_float(v) for v in vectors)
    return OdecoSpec(vectors, BilinearForm.identity(n, exact))


def random_odeco(n: int, k: int | None = None, seed: int = 0, exact: bool = True) -> SymTensor3:
    return odeco_from_vectors(random_orthogonal_family(n, n if k is None else k, seed, exact))


def random_isotropic_subspace(
    n: int, seed: int | None = 0, conjugate: bool = True, exact: bool = True
) -> IsotropicBasis:
    """Maximal isotropic subspace ``u_j = e_j + i e_{m+j}`` (``m = n // 2``) of
    the standard form, optionally moved by a random rational orthogonal map."""
    m = n // 2
    u = exact_zeros((n, m))
    for j in range(m):
        u[j, j] = ONE
        u[m + j, j] = I
    if conjugate and seed is not None:
        u = cayley_orthogonal(n, np.random.default_rng(seed)) @ u
    if not exact:
        u = to_float(u)
    return IsotropicBasis(tuple(u[:, j] for j in range(m)), BilinearForm.identity(n, exact))


def random_cubic_coeffs(m: int, seed: int = 0, low: int = -3, high: int = 3) -> dict:
    """Random integer coordinates on sorted triples of ``range(m)``."""
    rng = np.random.default_rng(seed)
    return {t: gq(int(rng.integers(low, high + 1))) for t in sorted_triples(m)}


def weak_odeco_from_isotropic(b: IsotropicBasis, cubic_coeffs: dict) -> SymTensor3:
    """The element of ``S^3 U`` with coordinates ``cubic_coeffs`` in the basis
    ``u_1..u_m``, written in ambient coordinates."""
    m = len(b.vectors)
    inner = SymTensor3(m, cubic_coeffs, b.form.exact)
    return inner.transform(b.matrix)


def _two_step_general(t: SymTensor3, f: BilinearForm, tol=None) -> bool:
    c = structure_constants(t, f)
    if t.dim == 0:
        return True
    triple = np.tensordot(c, c, axes=([1], [2]))  # e_i (e_j e_k)
    return all_zero(triple, tol)


def _two_step_coordinates(t: SymTensor3, tol=None) -> bool:
    # sum_r T[i,j,r] T[k,l,r] = 0 for all i, j, k, l
    p = t.dense().reshape(t.dim * t.dim, t.dim)
    return all_zero(p @ p.T, tol)


def is_two_step_nilpotent(t: SymTensor3, f: BilinearForm | None = None, tol=None) -> bool:
    """``mu(x, mu(y, z)) == 0`` for all ``x, y, z``."""
    f = default_form(t, f)
    if f.is_identity:
        return _two_step_coordinates(t, tol)
    return _two_step_general(t, f, tol)


def column_span_isotropic(t: SymTensor3, f: BilinearForm | None = None, tol=None) -> bool:
    """The span of the columns of the flattening is isotropic for ``f``."""
    f = default_form(t, f)
    if t.dim == 0:
        return True
    u = linalg.column_basis(flattening(t), tol)
    g = f.gram if (t.exact and f.exact) else to_float(f.gram)
    u = u if g.dtype == u.dtype else to_float(u)
    return all_zero(u.T @ g @ u, tol)


def dim_Y(n: int) -> int:
    """Dimension of the closure of strongly odeco tensors: ``C(n,2) + n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return comb(n, 2) + n


def dim_Z(n: int) -> int:
    """Dimension of the union of ``S^3 U`` over maximal isotropic ``U``."""
    if n < 1:
        raise ValueError("n must be positive")
    return comb(n // 2 + 2, 3) + comb((n + 1) // 2, 2)


def dimension_table(n_max: int) -> list[tuple[int, int, int]]:
    return [(n, dim_Y(n), dim_Z(n)) for n in range(1, n_max + 1)]


def dim2_limit_family(t_param) -> SymTensor3:
    """``1/2 [(t^2 e1 + t^-1 e2)^3 + (t^2 e1 - t^-1 e2)^3]`` on C^2.

    Pairs with the hyperbolic form; equals ``S + t^6 e1^3`` exactly.
    """
    exact = not isinstance(t_param, float | complex)
    t = gq(t_param) if exact else complex(t_param)
    if is_zero(t, 0.0):
        raise ZeroParameter("the limit family is undefined at t = 0")
    plus = [t * t, 1 / t]
    minus = [t * t, -1 / t]
    if exact:
        plus, minus = exact_array(plus), exact_array(minus)
    else:
        plus, minus = np.array(plus, complex), np.array(minus, complex)
    half = gq(1) / 2 if exact else 0.5
    return SymTensor3.from_vectors([plus, minus], weights=[half, half], exact=exact)
