"""Symmetric 3-tensors, bilinear forms, the induced multiplication and
Robeva's quadrics.

Indices are 0-based in Python; the JSON file format uses 1-based triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from types import MappingProxyType

import numpy as np

from . import linalg
from .errors import DegenerateForm
from .scalars import (
    DEFAULT_TOL,
    ZERO,
    all_zero,
    exact_array,
    exact_eye,
    exact_zeros,
    gq,
    is_zero,
    magnitude,
    to_float,
)

Triple = tuple[int, int, int]


def _sorted_triple(idx) -> Triple:
    i, j, k = sorted(int(a) for a in idx)
    return (i, j, k)


def sorted_triples(n: int):
    """All ``i <= j <= k`` triples in lexicographic order."""
    return itertools.combinations_with_replacement(range(n), 3)


def _tensordot3(p: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``T'[a,b,c] = sum P[a,i] P[b,j] P[c,k] T[i,j,k]`` via three contractions."""
    out = np.tensordot(p, t, axes=([1], [0]))  # a j k
    out = np.tensordot(out, p, axes=([2], [1]))  # a j c
    out = np.tensordot(out, p, axes=([1], [1]))  # a c b
    return out.transpose(0, 2, 1)


class SymTensor3:
    """A symmetric tensor in S^3 of an ``n``-dimensional space.

    Only sorted index triples are stored; lookups of any permutation return
    the sorted entry.  ``exact`` selects Gaussian-rational or complex-double
    coefficients.
    """

    __slots__ = ("dim", "exact", "_coeffs", "__dict__")

    def __init__(self, dim: int, coeffs=None, exact: bool = True):
        self.dim = int(dim)
        self.exact = bool(exact)
        store = {}
        for idx, val in (coeffs or {}).items():
            key = _sorted_triple(idx)
            if any(not 0 <= a < self.dim for a in key):
                raise IndexError(f"index {idx} out of range for dimension {dim}")
            if key in store:
                raise ValueError(f"duplicate entry for sorted index {key}")
            val = gq(val) if self.exact else complex(val)
            if val:
                store[key] = val
        self._coeffs = MappingProxyType(store)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, exact: bool = True) -> "SymTensor3":
        return cls(dim, {}, exact)

    @classmethod
    def from_dense(cls, arr: np.ndarray, check: bool = True, tol: float | None = None):
        arr = np.asarray(arr)
        n = arr.shape[0]
        if arr.shape != (n, n, n):
            raise ValueError(f"expected an n x n x n array, got shape {arr.shape}")
        exact = arr.dtype == object
        if check:
            for perm in itertools.permutations(range(3)):
                diff = arr - arr.transpose(perm)
                if not all_zero(diff, tol):
                    raise ValueError("array is not symmetric")
        coeffs = {t: arr[t] for t in sorted_triples(n)}
        return cls(n, coeffs, exact)

    @classmethod
    def from_vectors(cls, vectors, weights=None, exact: bool = True) -> "SymTensor3":
        """``sum w_i v_i^{(x)3}``."""
        vectors = list(vectors)
        if not vectors:
            raise ValueError("need at least one vector (use zero() for the empty sum)")
        n = len(vectors[0])
        weights = [1] * len(vectors) if weights is None else list(weights)
        arr = exact_zeros((n, n, n)) if exact else np.zeros((n, n, n), dtype=complex)
        for v, w in zip(vectors, weights):
            v = exact_array(v) if exact else np.asarray(v, dtype=complex)
            arr = arr + w * np.multiply.outer(np.multiply.outer(v, v), v)
        return cls.from_dense(arr, check=False)

    # access -------------------------------------------------------------

    @property
    def coeffs(self):
        """Read-only mapping from sorted 0-based triples to nonzero coefficients."""
        return self._coeffs

    def __getitem__(self, idx):
        return self._coeffs.get(_sorted_triple(idx), ZERO if self.exact else 0j)

    @cached_property
    def _dense(self) -> np.ndarray:
        n = self.dim
        arr = exact_zeros((n, n, n)) if self.exact else np.zeros((n, n, n), dtype=complex)
        for (i, j, k), v in self._coeffs.items():
            for p in set(itertools.permutations((i, j, k))):
                arr[p] = v
        arr.flags.writeable = False
        return arr

    def dense(self) -> np.ndarray:
        """Full ``n x n x n`` array (read-only view)."""
        return self._dense

    def is_zero(self, tol: float | None = None) -> bool:
        return all(is_zero(v, tol) for v in self._coeffs.values())

    # arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "SymTensor3"):
        if other.dim != self.dim or other.exact != self.exact:
            raise ValueError("tensors differ in dimension or scalar mode")

    def __add__(self, other: "SymTensor3") -> "SymTensor3":
        self._check_compatible(other)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymTensor3(self.dim, out, self.exact)

    def __neg__(self) -> "SymTensor3":
        return SymTensor3(self.dim, {k: -v for k, v in self._coeffs.items()}, self.exact)

    def __sub__(self, other: "SymTensor3") -> "SymTensor3":
        return self + (-other)

    def scale(self, c) -> "SymTensor3":
        c = gq(c) if self.exact else complex(c)
        return SymTensor3(self.dim, {k: c * v for k, v in self._coeffs.items()}, self.exact)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymTensor3):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.exact == other.exact
            and dict(self._coeffs) == dict(other._coeffs)
        )

    __hash__ = None

    def transform(self, p: np.ndarray) -> "SymTensor3":
        """Apply the linear map ``p`` (``m x n``) to every slot; result lives in dim ``m``."""
        if p.shape[1] != self.dim:
            raise ValueError("shape mismatch")
        if self.dim == 0 or p.shape[0] == 0:
            return SymTensor3.zero(p.shape[0], self.exact)
        p = p if self.exact else np.asarray(p, dtype=complex)
        return SymTensor3.from_dense(_tensordot3(p, self.dense()), check=False)

    def to_float(self) -> "SymTensor3":
        if not self.exact:
            return self
        return SymTensor3(self.dim, {k: complex(v) for k, v in self._coeffs.items()}, False)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"SymTensor3(dim={self.dim}, nnz={len(self._coeffs)}, {mode})"


def block_sum(parts: list[SymTensor3]) -> SymTensor3:
    """Direct sum of tensors placed in consecutive coordinate blocks."""
    exact = all(p.exact for p in parts)
    n = sum(p.dim for p in parts)
    coeffs = {}
    offset = 0
    for p in parts:
        for (i, j, k), v in p.coeffs.items():
            coeffs[(i + offset, j + offset, k + offset)] = v if exact else complex(v)
        offset += p.dim
    return SymTensor3(n, coeffs, exact)


class BilinearForm:
    """A symmetric bilinear form given by its Gram matrix."""

    def __init__(self, gram, tol: float | None = None):
        gram = np.asarray(gram)
        if gram.dtype != object and not np.iscomplexobj(gram):
            gram = gram.astype(complex)
        n = gram.shape[0] if gram.ndim == 2 else -1
        if gram.shape != (n, n):
            raise ValueError("Gram matrix must be square")
        if not all_zero(gram - gram.T, tol):
            raise ValueError("Gram matrix must be symmetric")
        self.gram = gram
        self.gram.flags.writeable = False
        self.dim = n
        self.exact = gram.dtype == object
        self.nondegenerate = linalg.matrix_rank(gram, tol) == n

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "BilinearForm":
        return cls(exact_eye(n) if exact else np.eye(n, dtype=complex))

    @classmethod
    def hyperbolic(cls, exact: bool = True) -> "BilinearForm":
        """The form on C^2 with ``(e1|e2) = 1`` and ``(e1|e1) = (e2|e2) = 0``."""
        g = exact_array([[0, 1], [1, 0]])
        return cls(g if exact else to_float(g))

    @cached_property
    def is_identity(self) -> bool:
        eye = exact_eye(self.dim) if self.exact else np.eye(self.dim)
        diff = self.gram - eye
        return all_zero(diff, 0.0) if not self.exact else all_zero(diff)

    def pair(self, x, y):
        return x @ self.gram @ y

    def restrict(self, basis: np.ndarray) -> "BilinearForm":
        """Form on the span of the columns of ``basis``, in that basis."""
        return BilinearForm(basis.T @ self.gram @ basis)

    def to_float(self) -> "BilinearForm":
        return self if not self.exact else BilinearForm(to_float(self.gram))

    def require_nondegenerate(self):
        if not self.nondegenerate:
            raise DegenerateForm("the bilinear form is degenerate")

    def __eq__(self, other):
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return self.dim == other.dim and bool(np.all(self.gram == other.gram))

    __hash__ = None

    def __repr__(self):
        return f"BilinearForm(dim={self.dim}, nondegenerate={self.nondegenerate})"


def default_form(t: SymTensor3, f: BilinearForm | None) -> BilinearForm:
    return BilinearForm.identity(t.dim, t.exact) if f is None else f


def _matched(t: SymTensor3, f: BilinearForm) -> tuple[np.ndarray, np.ndarray]:
    """Dense tensor and Gram in a common scalar mode."""
    if f.dim != t.dim:
        raise ValueError(f"form has dimension {f.dim}, tensor has {t.dim}")
    if t.exact and f.exact:
        return t.dense(), f.gram
    return to_float(t.dense()), to_float(f.gram)


# --------------------------------------------------------------------------
# the multiplication


def structure_constants(t: SymTensor3, f: BilinearForm | None = None) -> np.ndarray:
    """Array ``c`` with ``mu(e_i, e_j) = sum_k c[i, j, k] e_k``.

    The identification of V with V* through the form turns the trilinear
    form ``T(x, y, w)`` into ``(mu(x, y) | w)``, which gives
    ``c[i, j, :] = sum_{a,b} G[i, a] G[j, b] T[a, b, :]``.
    """
    f = default_form(t, f)
    f.require_nondegenerate()
    arr, g = _matched(t, f)
    if f.is_identity:
        return arr.copy()
    out = np.tensordot(g, arr, axes=([1], [0]))  # i b k
    out = np.tensordot(g, out, axes=([1], [1]))  # j i k
    return out.transpose(1, 0, 2)


def mu(t: SymTensor3, f: BilinearForm | None, x, y) -> np.ndarray:
    """The product ``mu_T(x, y)``."""
    f = default_form(t, f)
    f.require_nondegenerate()
    arr, g = _matched(t, f)
    xh = g @ np.asarray(x, dtype=g.dtype)
    yh = g @ np.asarray(y, dtype=g.dtype)
    return np.tensordot(np.tensordot(xh, arr, axes=([0], [0])), yh, axes=([0], [0]))


def multiply(c: np.ndarray, x, y) -> np.ndarray:
    """Product of two coordinate vectors under structure constants ``c``."""
    return np.tensordot(np.tensordot(x, c, axes=([0], [0])), y, axes=([0], [0]))


# --------------------------------------------------------------------------
# Robeva's equations


@dataclass(frozen=True)
class ResidualReport:
    """Summary of ``R[i,j,k,l] = (e_j e_k | e_i e_l) - (e_i e_j | e_k e_l)``.

    ``num_nonzero`` counts over all ``n**4`` index tuples; ``witness`` is the
    lexicographically least tuple of maximal magnitude (0-based).
    """

    max_abs: float
    num_nonzero: int
    witness: tuple[int, int, int, int] | None
    witness_value: object = None

    @property
    def is_zero(self) -> bool:
        return self.num_nonzero == 0


def _product_gram(t: SymTensor3, f: BilinearForm) -> np.ndarray:
    """``Q[(ij), (kl)] = (e_i e_j | e_k e_l)`` as an ``n^2 x n^2`` matrix."""
    n = t.dim
    c = structure_constants(t, f).reshape(n * n, n)
    if f.is_identity:
        return c @ c.T
    g = f.gram if (t.exact and f.exact) else to_float(f.gram)
    return c @ g @ c.T


# the index symmetries of R: (i k) and (j l) flip the sign, (i l)(j k) keeps it
_R_SYMMETRIES = (
    ((0, 1, 2, 3), 1),
    ((2, 1, 0, 3), -1),
    ((0, 3, 2, 1), -1),
    ((2, 3, 0, 1), 1),
    ((3, 2, 1, 0), 1),
    ((1, 2, 3, 0), -1),
    ((3, 0, 1, 2), -1),
    ((1, 0, 3, 2), 1),
)


@lru_cache(maxsize=32)
def canonical_tuples(n: int) -> tuple[tuple[tuple[int, int, int, int], int], ...]:
    """Orbit representatives (lexicographic minima) of the residual's index
    symmetries, with orbit sizes."""
    out = []
    for tup in itertools.product(range(n), repeat=4):
        orbit = {tuple(tup[p] for p in perm) for perm, _ in _R_SYMMETRIES}
        if tup == min(orbit):
            out.append((tup, len(orbit)))
    return tuple(out)


def _report(values, weights, tuples, tol) -> ResidualReport:
    max_abs = 0.0
    count = 0
    witness = None
    witness_value = None
    for tup, val, w in zip(tuples, values, weights):
        if is_zero(val, tol):
            continue
        count += w
        mag = magnitude(val)
        if mag > max_abs or (mag == max_abs and (witness is None or tup < witness)):
            max_abs, witness, witness_value = mag, tup, val
    return ResidualReport(max_abs, count, witness, witness_value)


def robeva_residuals(
    t: SymTensor3,
    f: BilinearForm | None = None,
    tol: float | None = None,
    reduced: bool = True,
) -> ResidualReport:
    """Evaluate Robeva's quadrics at ``t``.

    With ``reduced`` only orbit representatives under the residual's index
    symmetries are evaluated; the report is identical to the full loop.
    """
    f = default_form(t, f)
    f.require_nondegenerate()
    n = t.dim
    q = _product_gram(t, f)
    exact = q.dtype == object
    tol = None if exact else (DEFAULT_TOL if tol is None else tol)
    if reduced:
        reps = canonical_tuples(n)
        tuples = [r[0] for r in reps]
        weights = [r[1] for r in reps]
        values = [q[j * n + k, i * n + l] - q[i * n + j, k * n + l] for i, j, k, l in tuples]
        return _report(values, weights, tuples, tol)
    q4 = q.reshape(n, n, n, n)
    r = q4.transpose(2, 0, 1, 3) - q4
    tuples = list(itertools.product(range(n), repeat=4))
    return _report(r.reshape(-1), itertools.repeat(1), tuples, tol)


def associator_zero(c: np.ndarray, tol: float | None = None) -> bool:
    """``e_i (e_j e_k) == (e_i e_j) e_k`` for all basis triples."""
    n = c.shape[0]
    # left[i, j, k, :] = e_i (e_j e_k);  right[i, j, k, :] = (e_i e_j) e_k
    left = np.tensordot(c, c, axes=([1], [2])).transpose(0, 2, 3, 1)
    right = np.tensordot(c, c, axes=([2], [0]))
    if n == 0:
        return True
    return all_zero(left - right, tol)


def is_in_X(t: SymTensor3, f: BilinearForm | None = None, tol: float | None = None) -> bool:
    """Membership in the variety cut out by Robeva's quadrics."""
    rep = robeva_residuals(t, f, tol)
    if t.exact and (f is None or f.exact):
        return rep.is_zero
    return rep.max_abs <= (DEFAULT_TOL if tol is None else tol)


def form_is_invariant(c: np.ndarray, gram: np.ndarray, tol: float | None = None) -> bool:
    """``(e_i e_j | e_k) == (e_i | e_j e_k)`` for all ``i, j, k``."""
    if c.dtype != gram.dtype:
        c, gram = to_float(c), to_float(gram)
    lhs = np.tensordot(c, gram, axes=([2], [0]))  # [i, j, k]
    rhs = np.tensordot(gram, c, axes=([1], [2]))  # [i, j, k]
    return all_zero(lhs - rhs, tol)


def check_invariance(t, f: BilinearForm | None = None, tol: float | None = None) -> bool:
    """Invariance of the form for the multiplication of ``t``.

    ``t`` may be a SymTensor3 or a raw structure-constant array (the latter
    lets callers probe algebras that do not come from a symmetric tensor).
    """
    if isinstance(t, SymTensor3):
        f = default_form(t, f)
        return form_is_invariant(structure_constants(t, f), f.gram, tol)
    c = np.asarray(t)
    if f is None:
        f = BilinearForm.identity(c.shape[0], c.dtype == object)
    return form_is_invariant(c, f.gram, tol)


def flattening(t: SymTensor3) -> np.ndarray:
    return t.dense().reshape(t.dim, t.dim * t.dim)


def flattening_rank(t: SymTensor3, tol: float | None = None) -> int:
    if t.dim == 0:
        return 0
    return linalg.matrix_rank(flattening(t), tol)


def slices_commute(t: SymTensor3, tol: float | None = None) -> bool:
    arr = t.dense()
    slices = [arr[:, :, k] for k in range(t.dim)]
    for a, b in itertools.combinations(slices, 2):
        if not all_zero(a @ b - b @ a, tol):
            return False
    return True


def zero_scalar(exact: bool):
    return ZERO if exact else 0j
