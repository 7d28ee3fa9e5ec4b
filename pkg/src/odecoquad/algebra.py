"""Commutative algebras with invariant forms: units, nilpotency and the
splitting into unital local ideals plus a nilpotent ideal."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import Poly, Symbol
from sympy.polys.domains import QQ_I

from . import linalg
from .errors import (
    DegenerateForm,
    NotAssociative,
    NotDiagonalisable,
    RandomSearchExhausted,
)
from .scalars import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_TOL,
    ONE,
    all_zero,
    exact_eye,
    exact_zeros,
    gq,
    to_float,
)
from .tensor import (
    BilinearForm,
    SymTensor3,
    associator_zero,
    default_form,
    form_is_invariant,
    is_in_X,
    multiply,
    structure_constants,
)


class Algebra:
    """Structure constants ``mul[i, j, k]`` (``e_i e_j = sum_k mul[i,j,k] e_k``)
    together with a symmetric bilinear form.

    ``validate`` checks commutativity and invariance of the form; pass
    ``False`` only to probe malformed input deliberately.
    """

    def __init__(self, mul: np.ndarray, form: BilinearForm | None = None,
                 validate: bool = True, tol: float | None = None):
        mul = np.asarray(mul)
        n = mul.shape[0]
        if mul.shape != (n, n, n):
            raise ValueError(f"structure constants must be n x n x n, got {mul.shape}")
        self.exact = mul.dtype == object
        if not self.exact and not np.iscomplexobj(mul):
            mul = mul.astype(complex)
        self.mul = mul
        self.mul.flags.writeable = False
        self.dim = n
        if form is None:
            form = BilinearForm.identity(n, self.exact)
        if form.dim != n:
            raise ValueError("form dimension does not match the algebra")
        self.form = form
        self.tol = tol
        if validate:
            if not all_zero(mul - mul.transpose(1, 0, 2), tol):
                raise ValueError("multiplication is not commutative")
            if not form_is_invariant(mul, form.gram, tol):
                raise ValueError("form is not invariant for the multiplication")

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, form: BilinearForm | None = None, exact: bool = True):
        return cls(exact_zeros((n, n, n)) if exact else np.zeros((n, n, n), complex), form)

    # basic operations ---------------------------------------------------

    def _vec(self, x) -> np.ndarray:
        if self.exact:
            return np.asarray(x, dtype=object)
        return np.asarray(x, dtype=complex)

    def basis_vector(self, i: int) -> np.ndarray:
        v = exact_zeros(self.dim) if self.exact else np.zeros(self.dim, complex)
        v[i] = ONE if self.exact else 1.0
        return v

    def multiply(self, x, y) -> np.ndarray:
        return multiply(self.mul, self._vec(x), self._vec(y))

    def L(self, x) -> np.ndarray:
        """Matrix of ``v -> x v`` (columns are images of basis vectors)."""
        return np.tensordot(self._vec(x), self.mul, axes=([0], [0])).T.copy()

    def power(self, x, m: int) -> np.ndarray:
        if m < 1:
            raise ValueError("powers start at 1 (the algebra may have no unit)")
        x = self._vec(x)
        out = x
        for _ in range(m - 1):
            out = self.multiply(x, out)
        return out

    def is_associative(self) -> bool:
        return associator_zero(self.mul, self.tol)

    @cached_property
    def unit(self):
        return find_unit(self)

    def restrict(self, basis: np.ndarray) -> "Algebra":
        """The algebra on the span of ``basis`` (must be closed under products)."""
        d = basis.shape[1]
        linv = linalg.left_inverse(basis, self.tol)
        mul = exact_zeros((d, d, d)) if self.exact else np.zeros((d, d, d), complex)
        for a in range(d):
            for b in range(a, d):
                prod = self.multiply(basis[:, a], basis[:, b])
                coords = linv @ prod
                if not all_zero(basis @ coords - prod, self.tol):
                    raise ValueError("subspace is not closed under multiplication")
                mul[a, b] = coords
                mul[b, a] = coords
        return Algebra(mul, self.form.restrict(basis), validate=False, tol=self.tol)

    def change_basis(self, p: np.ndarray) -> "Algebra":
        """Same algebra written in the basis given by the columns of ``p``."""
        return self.restrict(p)

    def to_float(self) -> "Algebra":
        if not self.exact:
            return self
        return Algebra(to_float(self.mul), self.form.to_float(), validate=False, tol=self.tol)

    def to_tensor(self) -> SymTensor3:
        """The symmetric tensor whose induced multiplication is this one."""
        self.form.require_nondegenerate()
        ginv = linalg.inverse(self.form.gram, self.tol)
        out = np.tensordot(ginv, self.mul, axes=([0], [0]))  # a j k
        out = np.tensordot(ginv, out, axes=([0], [1]))  # b a k
        return SymTensor3.from_dense(out.transpose(1, 0, 2), tol=self.tol)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"Algebra(dim={self.dim}, {mode})"


def algebra_from_tensor(t: SymTensor3, f: BilinearForm | None = None) -> Algebra:
    f = default_form(t, f)
    f.require_nondegenerate()
    if not t.exact and f.exact:
        f = f.to_float()
    return Algebra(structure_constants(t, f), f, validate=False)


# --------------------------------------------------------------------------
# units, invertibility, nilpotency


def find_unit(a: Algebra):
    """Solve ``u e_i = e_i`` for all ``i``; None when there is no unit."""
    n = a.dim
    if n == 0:
        return exact_zeros(0) if a.exact else np.zeros(0, complex)
    # row (i, k), column m:  sum_m u_m mul[m, i, k] = delta_ik
    system = a.mul.transpose(1, 2, 0).reshape(n * n, n)
    rhs = (exact_eye(n) if a.exact else np.eye(n, dtype=complex)).reshape(n * n)
    u = linalg.solve_linear(system, rhs, a.tol)
    if u is None:
        return None
    if not all_zero(a.L(u) - linalg.identity(n, a.exact), a.tol):
        return None
    return u


def _random_element(a: Algebra, rng: np.random.Generator, span: int = 3) -> np.ndarray:
    coeffs = rng.integers(-span, span + 1, size=a.dim)
    if a.exact:
        return np.array([gq(int(c)) for c in coeffs], dtype=object)
    return coeffs.astype(complex)


def is_invertibility_locus(a: Algebra, trials: int = 8, seed: int = 0) -> bool:
    """Some multiplication map ``L_x`` is invertible (basis vectors first)."""
    n = a.dim
    if n == 0:
        return True
    rng = np.random.default_rng(seed)
    candidates = [a.basis_vector(i) for i in range(n)]
    candidates += [_random_element(a, rng) for _ in range(trials)]
    return any(linalg.matrix_rank(a.L(x), a.tol) == n for x in candidates)


def _element_nilpotent(a: Algebra, x) -> bool:
    return linalg.is_nilpotent_matrix(a.L(x), a.tol)


def is_nilpotent(a: Algebra) -> bool:
    """Every ``L_{e_i}`` is nilpotent (enough for commutative associative algebras)."""
    if not a.is_associative():
        raise NotAssociative("nilpotency test needs an associative algebra")
    return all(_element_nilpotent(a, a.basis_vector(i)) for i in range(a.dim))


def radical(a: Algebra) -> np.ndarray:
    """Nilradical as the kernel of the trace form ``(x, y) -> tr L_{xy}``.

    Valid in characteristic zero for commutative associative algebras.
    """
    n = a.dim
    traces = np.array([np.trace(a.mul[m]) for m in range(n)], dtype=a.mul.dtype)
    form = np.tensordot(a.mul, traces, axes=([2], [0]))
    return linalg.kernel_matrix(form, a.tol)


def is_ideal(a: Algebra, basis: np.ndarray) -> bool:
    if basis.shape[1] == 0:
        return True
    r = linalg.matrix_rank(basis, a.tol)
    for i in range(a.dim):
        images = a.L(a.basis_vector(i)) @ basis
        if linalg.matrix_rank(np.concatenate([basis, images], axis=1), a.tol) != r:
            return False
    return True


def _orthogonal(a: Algebra, u: np.ndarray, v: np.ndarray) -> bool:
    if u.shape[1] == 0 or v.shape[1] == 0:
        return True
    return all_zero(u.T @ a.form.gram @ v, a.tol)


# --------------------------------------------------------------------------
# unital / nilpotent splitting


@dataclass
class UnitalNilpotentSplit:
    unital: np.ndarray
    nilpotent: np.ndarray
    pieces: list = field(default_factory=list)


def _find_non_nilpotent(a: Algebra, rng, random_first: bool):
    basis = [a.basis_vector(i) for i in range(a.dim)]
    randoms = [_random_element(a, rng) for _ in range(4 * a.dim)]
    order = randoms + basis if random_first else basis + randoms
    for x in order:
        if not _element_nilpotent(a, x):
            return x
    if not all(_element_nilpotent(a, x) for x in basis):
        raise RandomSearchExhausted("no non-nilpotent element found although one exists")
    return None


def unital_nilpotent_split(a: Algebra, seed: int = 0, random_first: bool = False,
                           verify: bool = True) -> UnitalNilpotentSplit:
    """Split ``V = U (+) N`` with ``U`` a unital ideal and ``N`` a nilpotent ideal.

    Repeatedly picks a non-nilpotent ``x``, takes ``y = x**m`` where the images
    of ``L_x**m`` stabilise, and splits off ``im L_y`` from ``ker L_y``.
    """
    if not a.is_associative():
        raise NotAssociative("the algebra is not associative")
    rng = np.random.default_rng(seed)
    n = a.dim
    current = linalg.identity(n, a.exact)
    pieces = []
    while current.shape[1]:
        sub = a.restrict(current)
        x = _find_non_nilpotent(sub, rng, random_first)
        if x is None:
            break
        lx = sub.L(x)
        m, power = 1, lx
        rank = linalg.matrix_rank(power, a.tol)
        while True:
            nxt = power @ lx
            r2 = linalg.matrix_rank(nxt, a.tol)
            if r2 == rank:
                break
            m, power, rank = m + 1, nxt, r2
        ly = sub.L(sub.power(x, m))
        pieces.append(linalg.well_conditioned(current @ linalg.column_basis(ly, a.tol)))
        current = linalg.well_conditioned(current @ linalg.kernel_matrix(ly, a.tol))
    empty = exact_zeros((n, 0)) if a.exact else np.zeros((n, 0), complex)
    unital = np.concatenate(pieces, axis=1) if pieces else empty
    split = UnitalNilpotentSplit(unital, current, pieces)
    if verify:
        problems = verify_split(a, split)
        if problems:
            raise RuntimeError("unital/nilpotent split failed: " + ", ".join(problems))
    return split


def verify_split(a: Algebra, split: UnitalNilpotentSplit) -> list[str]:
    problems = []
    u, nil = split.unital, split.nilpotent
    if u.shape[1] + nil.shape[1] != a.dim:
        problems.append("dimensions do not add up")
    if not _orthogonal(a, u, nil):
        problems.append("parts are not orthogonal")
    if not (is_ideal(a, u) and is_ideal(a, nil)):
        problems.append("a part is not an ideal")
    if nil.shape[1] and not is_nilpotent(a.restrict(nil)):
        problems.append("nilpotent part is not nilpotent")
    if u.shape[1] and find_unit(a.restrict(u)) is None:
        problems.append("unital part has no unit")
    return problems


# --------------------------------------------------------------------------
# local decomposition


@dataclass
class Block:
    basis: np.ndarray
    unit: np.ndarray | None
    kind: str  # "local-unital", "unital" (not refined) or "nilpotent"

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass
class Decomposition:
    blocks: list
    nilpotent: np.ndarray

    @property
    def unital_blocks(self) -> list:
        return [b for b in self.blocks if b.kind != "nilpotent"]

    def basis_matrix(self) -> np.ndarray:
        return np.concatenate([b.basis for b in self.blocks] + [self.nilpotent], axis=1)

    def verify(self, a: Algebra) -> list[str]:
        problems = []
        full = self.basis_matrix()
        if full.shape[1] != a.dim or linalg.matrix_rank(full, a.tol) != a.dim:
            problems.append("blocks do not form a basis")
        parts = [b.basis for b in self.blocks] + [self.nilpotent]
        for i, p in enumerate(parts):
            if not is_ideal(a, p):
                problems.append(f"part {i} is not an ideal")
            for q in parts[i + 1:]:
                if not _orthogonal(a, p, q):
                    problems.append(f"part {i} is not orthogonal to a later part")
                for col in range(p.shape[1]):
                    if not all_zero(a.L(p[:, col]) @ q, a.tol):
                        problems.append(f"part {i} does not annihilate a later part")
                        break
        for b in self.blocks:
            sub = a.restrict(b.basis)
            if find_unit(sub) is None:
                problems.append("a unital block has no unit")
        return problems


def is_local(a: Algebra) -> bool:
    """Unital with a single maximal ideal, i.e. radical of codimension one."""
    if a.dim == 0 or find_unit(a) is None:
        return False
    return radical(a).shape[1] == a.dim - 1


def _is_local_float(a: Algebra, rng, tol) -> bool:
    z = _random_element(a, rng)
    lz = a.L(z)
    shift = np.trace(lz) / a.dim
    return linalg.is_nilpotent_matrix(lz - shift * np.eye(a.dim), tol)


_X = Symbol("x")


def _to_qqi(g):
    g = gq(g)
    return QQ_I(g.re, g.im)


def _charpoly(m: np.ndarray) -> Poly:
    coeffs = linalg.to_domain_matrix(m).charpoly()
    dom = linalg.to_domain_matrix(m).domain
    gauss = [_to_qqi(linalg._from_domain_element(c, dom)) for c in coeffs]
    return Poly.from_list(gauss, _X, domain=QQ_I)


def _poly_apply(p: Poly, m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``p(m) @ v`` by Horner's rule."""
    out = exact_zeros(v.shape[0])
    for c in p.all_coeffs():
        out = m @ out + linalg._from_domain_element(QQ_I.from_sympy(c), QQ_I) * v
    return out


def _exact_local_blocks(b: Algebra, rng, depth: int = 0):
    """Split a unital exact algebra by coprime factors of a characteristic
    polynomial over Q(i).  Returns ``(basis, kind)`` pairs in ``b``'s coordinates."""
    d = b.dim
    eye = exact_eye(d)
    if is_local(b):
        return [(eye, "local-unital")]
    semisimple_dim = d - radical(b).shape[1]
    u = b.unit
    for _ in range(4 * d + 4):
        z = _random_element(b, rng, span=5)
        lz = b.L(z)
        chi = _charpoly(lz)
        _, factors = chi.factor_list()
        if len(factors) == 1:
            if factors[0][0].degree() == semisimple_dim:
                # one Galois orbit of local factors: no further split over Q(i)
                return [(eye, "unital")]
            continue
        out = []
        for idx, (fac, mult) in enumerate(factors):
            own = fac**mult
            others = Poly(1, _X, domain=QQ_I)
            for jdx, (g, k) in enumerate(factors):
                if jdx != idx:
                    others = others * g**k
            idem_poly = (others * others.invert(own)).rem(chi)
            e = _poly_apply(idem_poly, lz, u)
            basis = linalg.column_basis(b.L(e))
            sub = b.restrict(basis)
            for inner, kind in _exact_local_blocks(sub, rng, depth + 1):
                out.append((basis @ inner, kind))
        return out
    return [(eye, "unital")]


def _float_local_blocks(b: Algebra, rng, tol, cluster_tol, depth: int = 0):
    d = b.dim
    eye = np.eye(d, dtype=complex)
    if _is_local_float(b, rng, tol):
        return [(eye, "local-unital")]
    u = b.unit
    if u is None:
        raise RuntimeError("unital block lost its unit in float mode")
    last_error = None
    for _ in range(8):
        z = rng.normal(size=d) + 1j * rng.normal(size=d)
        try:
            split = linalg.eigen_split(b.L(z), tol, cluster_tol)
        except NotDiagonalisable as exc:
            last_error = exc
            continue
        if len(split) == 1:
            continue
        out = []
        for _, proj in split:
            e = proj @ u
            basis = linalg.column_basis(b.L(e), tol)
            sub = b.restrict(basis)
            for inner, kind in _float_local_blocks(sub, rng, tol, cluster_tol, depth + 1):
                out.append((basis @ inner, kind))
        return out
    raise NotDiagonalisable(
        f"could not split a non-local block after resampling: {last_error}"
    )


def local_decomposition(a: Algebra, seed: int = 0, tol: float | None = None,
                        cluster_tol: float = DEFAULT_CLUSTER_TOL,
                        random_first: bool = False) -> Decomposition:
    """Unital local ideals plus the nilpotent ideal.

    Float algebras are refined through spectral projectors of a random
    multiplication map.  Exact algebras are refined by splitting the
    characteristic polynomial of a random ``L_z`` over Q(i); blocks whose
    residue field is larger than Q(i) stay ``"unital"``.
    """
    rng = np.random.default_rng(seed)
    if not a.exact and a.tol is None and tol is not None:
        a = Algebra(a.mul, a.form, validate=False, tol=tol)
    split = unital_nilpotent_split(a, seed, random_first)
    blocks = []
    if split.unital.shape[1]:
        b = a.restrict(split.unital)
        if a.exact:
            parts = _exact_local_blocks(b, rng)
        else:
            parts = _float_local_blocks(b, rng, DEFAULT_TOL if tol is None else tol, cluster_tol)
        for inner, kind in parts:
            basis = split.unital @ inner
            unit_local = find_unit(a.restrict(basis))
            blocks.append(Block(basis, basis @ unit_local, kind))
    return Decomposition(blocks, split.nilpotent)


# --------------------------------------------------------------------------
# tensors


@dataclass
class TensorBlock:
    tensor: SymTensor3
    basis: np.ndarray
    form: BilinearForm
    kind: str


def restricted_tensor(a: Algebra, basis: np.ndarray) -> tuple[SymTensor3, BilinearForm]:
    sub = a.restrict(basis)
    if not sub.form.nondegenerate:
        raise DegenerateForm("the form restricted to a block is degenerate")
    return sub.to_tensor(), sub.form


def decompose_tensor(t: SymTensor3, f: BilinearForm | None = None, seed: int = 0,
                     tol: float | None = None,
                     cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[TensorBlock]:
    """``t = t_1 + ... + t_k + t_N`` along the decomposition of its algebra."""
    f = default_form(t, f)
    if not is_in_X(t, f, tol):
        raise NotAssociative("tensor does not satisfy Robeva's equations")
    a = algebra_from_tensor(t, f)
    if not a.exact:
        a = Algebra(a.mul, a.form, validate=False, tol=tol)
    dec = local_decomposition(a, seed, tol, cluster_tol)
    out = []
    for b in dec.blocks:
        tb, fb = restricted_tensor(a, b.basis)
        out.append(TensorBlock(tb, b.basis, fb, b.kind))
    if dec.nilpotent.shape[1]:
        tb, fb = restricted_tensor(a, dec.nilpotent)
        out.append(TensorBlock(tb, dec.nilpotent, fb, "nilpotent"))
    return out


def reassemble(blocks: list[TensorBlock], dim: int, exact: bool = True) -> SymTensor3:
    total = SymTensor3.zero(dim, exact)
    for b in blocks:
        total = total + b.tensor.transform(b.basis)
    return total


__all__ = [
    "Algebra",
    "Block",
    "Decomposition",
    "TensorBlock",
    "UnitalNilpotentSplit",
    "algebra_from_tensor",
    "decompose_tensor",
    "find_unit",
    "is_ideal",
    "is_invertibility_locus",
    "is_local",
    "is_nilpotent",
    "local_decomposition",
    "radical",
    "reassemble",
    "restricted_tensor",
    "unital_nilpotent_split",
    "verify_split",
]
