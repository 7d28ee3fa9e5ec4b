"""Presentations of finite-dimensional algebras as quotients of polynomial
rings, Hilbert functions, socles, apolar algebras of forms and the
construction of a 12-dimensional 2-step nilpotent tensor from a local
Gorenstein algebra with Hilbert function (1, 6, 6, 1)."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from functools import cached_property
from importlib import resources
from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial

import gmpy2
import numpy as np

from . import linalg
from .algebra import Algebra, find_unit, is_nilpotent, radical
from .errors import DegenerateCatalecticant, NotUnital
from .odeco import is_two_step_nilpotent
from .scalars import I, ONE, ZERO, all_zero, exact_eye, exact_zeros, gq
from .tensor import BilinearForm, form_is_invariant, robeva_residuals
from .unital import ideal_powers, maximal_ideal

# --------------------------------------------------------------------------
# monomials


def monomials_of_degree(num_vars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``degree``, lexicographically
    descending (``x1^2 > x1 x2 > x2^2``)."""
    out = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        exp = [0] * num_vars
        for v in combo:
            exp[v] += 1
        out.append(tuple(exp))
    return out


@dataclass(frozen=True)
class MonomialBasis:
    """All monomials of degree at most ``max_degree`` in graded-lex order."""

    num_vars: int
    max_degree: int

    @cached_property
    def monomials(self) -> list[tuple[int, ...]]:
        out = []
        for d in range(self.max_degree + 1):
            out.extend(monomials_of_degree(self.num_vars, d))
        return out

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.monomials)}

    def __len__(self) -> int:
        return comb(self.num_vars + self.max_degree, self.max_degree)

    def format(self, exp) -> str:
        parts = []
        for v, e in enumerate(exp):
            if e == 1:
                parts.append(f"x{v + 1}")
            elif e > 1:
                parts.append(f"x{v + 1}^{e}")
        return "*".join(parts) or "1"

    def format_poly(self, coeffs) -> str:
        terms = []
        for c, m in zip(coeffs, self.monomials):
            if c:
                terms.append(f"({c})*{self.format(m)}")
        return " + ".join(terms) or "0"


@dataclass
class IdealBasis:
    """Generators of the kernel of ``x_i -> e_i`` among polynomials of degree
    at most ``basis.max_degree``; rows are coefficient vectors in ``basis``."""

    basis: MonomialBasis
    generators: np.ndarray
    codim: int

    def evaluate(self, point) -> np.ndarray:
        """Value of every generator at a point of affine space."""
        point = [gq(p) for p in point]
        values = []
        for m in self.basis.monomials:
            v = ONE
            for p, e in zip(point, m):
                v = v * p**e if e else v
            values.append(v)
        return self.generators @ np.array(values, dtype=object)

    def as_strings(self) -> list[str]:
        return [self.basis.format_poly(g) for g in self.generators]


def _monomial_images(a: Algebra, basis: MonomialBasis, unit) -> np.ndarray:
    """Columns are the images of the monomials under ``x_i -> e_i``."""
    images = {}
    cols = []
    for m in basis.monomials:
        if sum(m) == 0:
            img = unit
        else:
            v = next(i for i, e in enumerate(m) if e)
            prev = list(m)
            prev[v] -= 1
            img = a.multiply(a.basis_vector(v), images[tuple(prev)])
        images[m] = img
        cols.append(img)
    return np.stack(cols, axis=1)


def generation_degree(a: Algebra) -> int:
    """Least ``s`` such that monomials of degree at most ``s`` span ``a``."""
    unit = find_unit(a)
    if unit is None:
        raise NotUnital("algebra has no unit")
    span = unit.reshape(-1, 1)
    layer = [unit]
    s = 0
    while linalg.matrix_rank(span, a.tol) < a.dim:
        layer = [a.multiply(a.basis_vector(i), v) for v in layer for i in range(a.dim)]
        new = np.concatenate([span, np.stack(layer, axis=1)], axis=1)
        if linalg.matrix_rank(new, a.tol) == linalg.matrix_rank(span, a.tol):
            break
        span = linalg.column_basis(new, a.tol)
        layer = list(span.T)
        s += 1
    return s


def ideal_extraction(a: Algebra, max_degree: int | None = None) -> IdealBasis:
    """Kernel of the evaluation map ``C[x_1..x_n] -> a``, ``1 -> unit``,
    ``x_i -> e_i``, restricted to degree at most ``max_degree``.

    The default degree is one more than the degree in which monomials first
    span ``a``; generators of the kernel up to that degree generate the ideal.
    Generators are returned in reduced row-echelon form.
    """
    unit = find_unit(a)
    if unit is None:
        raise NotUnital("algebra has no unit")
    if max_degree is None:
        max_degree = min(generation_degree(a) + 1, max(a.dim, 1))
    if max_degree < 1:
        raise ValueError("degree bound must be at least 1")
    basis = MonomialBasis(a.dim, max_degree)
    ev = _monomial_images(a, basis, unit)
    kernel = linalg.kernel_matrix(ev, a.tol)
    if kernel.shape[1]:
        gens, piv = linalg.rref(kernel.T, a.tol)
        gens = gens[: len(piv)]
    else:
        gens = kernel.T
    rank = linalg.matrix_rank(ev, a.tol)
    if rank < a.dim:
        warnings.warn(
            f"monomials of degree <= {max_degree} span only {rank} of {a.dim} dimensions",
            stacklevel=2,
        )
    return IdealBasis(basis, gens, rank)


# --------------------------------------------------------------------------
# local structure


def hilbert_function(a: Algebra) -> list[int]:
    """``dim M^k / M^(k+1)`` for ``k = 0, 1, ...`` with ``M^0 = a``."""
    m = maximal_ideal(a)
    dims = [a.dim] + [p.shape[1] for p in ideal_powers(a, m)] + [0]
    return [dims[k] - dims[k + 1] for k in range(len(dims) - 1)]


def annihilator(a: Algebra, sub: np.ndarray) -> np.ndarray:
    """``{v in a : v s = 0 for all s in sub}``."""
    if sub.shape[1] == 0:
        return linalg.identity(a.dim, a.exact)
    # v s_j = L_{s_j} v
    blocks = [a.L(sub[:, j]) for j in range(sub.shape[1])]
    return linalg.kernel_matrix(np.concatenate(blocks, axis=0), a.tol)


def socle(a: Algebra) -> np.ndarray:
    """Annihilator of the maximal ideal of a local algebra."""
    m = maximal_ideal(a)
    return annihilator(a, m)


@dataclass
class GorensteinCertificate:
    is_local: bool
    hilbert_function: list | None
    socle_dim: int
    num_local_factors: int
    gorenstein: bool

    def to_dict(self) -> dict:
        return asdict(self)


def is_gorenstein(a: Algebra) -> GorensteinCertificate:
    """Socle dimension one on every local factor.

    The nilradical is read off the trace form, the total socle is its
    annihilator, and the number of local factors is the codimension of the
    nilradical; the algebra is Gorenstein exactly when those two numbers agree.
    """
    if find_unit(a) is None:
        raise NotUnital("algebra has no unit")
    if not a.is_associative():
        raise ValueError("algebra is not associative")
    rad = radical(a)
    factors = a.dim - rad.shape[1]
    soc = annihilator(a, rad)
    local = factors == 1
    hf = hilbert_function(a) if local else None
    return GorensteinCertificate(local, hf, soc.shape[1], factors, soc.shape[1] == factors)


# --------------------------------------------------------------------------
# apolar algebras


@dataclass(frozen=True)
class HomogeneousForm:
    num_vars: int
    degree: int
    coeffs: dict  # exponent tuple -> scalar

    def __post_init__(self):
        for exp in self.coeffs:
            if len(exp) != self.num_vars or sum(exp) != self.degree:
                raise ValueError(f"monomial {exp} does not fit the form")

    @classmethod
    def from_json(cls, data: dict) -> "HomogeneousForm":
        from .scalars import parse_scalar

        coeffs = {tuple(t["exp"]): parse_scalar(t["coeff"]) for t in data["terms"]}
        return cls(int(data["num_vars"]), int(data["degree"]), coeffs)

    def to_json(self) -> dict:
        from .scalars import format_scalar

        terms = [
            {"exp": list(e), "coeff": format_scalar(gq(c))}
            for e, c in sorted(self.coeffs.items(), reverse=True)
            if c
        ]
        return {"format": "form-v1", "num_vars": self.num_vars, "degree": self.degree, "terms": terms}


def shipped_cubic() -> HomogeneousForm:
    """Integer cubic in 6 variables whose apolar algebra has Hilbert function (1, 6, 6, 1)."""
    text = resources.files("odecoquad").joinpath("data/cubic66.json").read_text()
    return HomogeneousForm.from_json(json.loads(text))


def _differentiate(alpha, beta):
    """``x^alpha`` acting on ``x^beta`` by differentiation: (factor, exponent)."""
    factor = 1
    out = []
    for a, b in zip(alpha, beta):
        if a > b:
            return 0, None
        factor *= factorial(b) // factorial(b - a)
        out.append(b - a)
    return factor, tuple(out)


def catalecticant(form: HomogeneousForm, k: int) -> np.ndarray:
    """Matrix of ``g -> g o f`` from degree ``k`` polynomials to degree ``d - k`` forms."""
    rows = monomials_of_degree(form.num_vars, form.degree - k)
    cols = monomials_of_degree(form.num_vars, k)
    row_index = {r: i for i, r in enumerate(rows)}
    out = exact_zeros((len(rows), len(cols)))
    for j, alpha in enumerate(cols):
        for beta, c in form.coeffs.items():
            factor, rest = _differentiate(alpha, beta)
            if factor and c:
                out[row_index[rest], j] += gq(c) * factor
    return out


@dataclass
class ApolarAlgebra:
    algebra: Algebra
    monomials: list  # representative monomial per basis element
    degrees: list
    catalecticant_ranks: list

    @property
    def hilbert_function(self) -> list:
        return list(self.catalecticant_ranks)


def apolar_algebra(form: HomogeneousForm, expected_hf: list | None = None) -> ApolarAlgebra:
    """``C[x]/Ann(f)`` with the form ``(a|b) = l(ab)``, ``l`` reading the top degree.

    Basis elements are monomials chosen as pivots of each catalecticant,
    ordered by degree; element 0 is the unit.
    """
    d = form.degree
    n = form.num_vars
    cats, pivots, solvers = [], [], []
    for k in range(d + 1):
        cat = catalecticant(form, k)
        _, piv = linalg.rref(cat)
        cats.append(cat)
        pivots.append(piv)
        solvers.append(linalg.left_inverse(cat[:, piv]) if piv else None)
    ranks = [len(p) for p in pivots]
    if ranks[0] == 0:
        raise DegenerateCatalecticant("the zero form has no apolar algebra")
    if expected_hf is not None and ranks != list(expected_hf):
        raise DegenerateCatalecticant(f"catalecticant ranks {ranks} differ from {list(expected_hf)}")
    basis_monos, degrees = [], []
    for k in range(d + 1):
        monos_k = monomials_of_degree(n, k)
        for p in pivots[k]:
            basis_monos.append(monos_k[p])
            degrees.append(k)
    dim = len(basis_monos)
    offsets = np.cumsum([0] + ranks)
    col_index = [{m: j for j, m in enumerate(monomials_of_degree(n, k))} for k in range(d + 1)]

    def coords(exp) -> np.ndarray:
        out = exact_zeros(dim)
        k = sum(exp)
        if k > d or not pivots[k]:
            return out
        col = cats[k][:, col_index[k][exp]]
        out[offsets[k] : offsets[k + 1]] = solvers[k] @ col
        return out

    mul = exact_zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(a, dim):
            prod = tuple(x + y for x, y in zip(basis_monos[a], basis_monos[b]))
            mul[a, b] = mul[b, a] = coords(prod)
    # l reads the coordinate on the top-degree basis element
    top = offsets[d]
    gram = exact_zeros((dim, dim))
    for a in range(dim):
        for b in range(dim):
            if degrees[a] + degrees[b] == d:
                gram[a, b] = mul[a, b, top]
    form_b = BilinearForm(gram)
    if not form_b.nondegenerate:
        raise DegenerateCatalecticant("the induced form on the apolar algebra is degenerate")
    alg = Algebra(mul, form_b, validate=False)
    return ApolarAlgebra(alg, basis_monos, degrees, ranks)


# --------------------------------------------------------------------------
# orthonormal bases over Q(i)


def _rational_sqrt(q):
    q = gmpy2.mpq(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        return None
    return gq(gmpy2.mpq(gmpy2.isqrt(num), gmpy2.isqrt(den)))


def _gaussian_sqrt(x):
    """A square root of ``x`` in Q(i), or None."""
    x = gq(x)
    if not x:
        return ZERO
    a, b = x.re, x.im
    if b == 0:
        r = _rational_sqrt(a)
        if r is not None:
            return r
        r = _rational_sqrt(-a)
        return None if r is None else r * I
    # (p + qi)^2 = a + bi  =>  p^2 = (a + |x|) / 2, q = b / 2p
    modulus = _rational_sqrt(a * a + b * b)
    if modulus is None:
        return None
    p = _rational_sqrt((a + modulus.re) / 2)
    if not p:
        return None
    return p + (gq(b) / (2 * p)) * I


_SMALL_COEFFS = (1, -1, 2, -2, I, -I, 1 + I, 1 - I, 3, -3)


def _diagonal_basis(vecs: list, pair) -> list | None:
    """Pairwise orthogonal non-isotropic vectors spanning ``vecs``; None if degenerate."""
    vecs = [v for v in vecs if any(v)]
    out = []
    while vecs:
        idx = next((k for k, v in enumerate(vecs) if pair(v, v)), None)
        if idx is None:
            hit = next(((j, k) for j in range(len(vecs)) for k in range(j + 1, len(vecs))
                        if pair(vecs[j], vecs[k])), None)
            if hit is None:
                return None
            j, k = hit
            vecs[j] = vecs[j] + vecs[k]
            idx = j
        u = vecs.pop(idx)
        nu = pair(u, u)
        vecs = [w - (pair(w, u) / nu) * u for w in vecs]
        vecs = [w for w in vecs if any(w)]
        out.append(u)
    return out


def _orthonormal_step(vecs: list, pair):
    """Orthonormal vectors spanning part of ``vecs`` (pairwise orthogonal), and
    the indices they use up; None when the search finds nothing."""
    norms = [pair(v, v) for v in vecs]
    for k, v in enumerate(vecs):
        root = _gaussian_sqrt(norms[k])
        if root:
            return [v / root], [k]
    # -1 is a square, so norms a, b with ab square give a hyperbolic plane
    for j, k in combinations(range(len(vecs)), 2):
        r = _gaussian_sqrt(-norms[k] / norms[j])
        if r:
            e = r * vecs[j] + vecs[k]
            f = (r * vecs[j] - vecs[k]) / (-2 * norms[k])
            return [e + f / 2, I * (e - f / 2)], [j, k]
    for size in (2, 3):
        for idx in combinations(range(len(vecs)), size):
            for coeffs in product(_SMALL_COEFFS, repeat=size - 1):
                w = vecs[idx[0]] + sum((c * vecs[j] for c, j in zip(coeffs, idx[1:])),
                                       start=exact_zeros(len(vecs[0])))
                root = _gaussian_sqrt(pair(w, w))
                if root:
                    return [w / root], [idx[0]]
    return None


def orthonormal_basis(gram: np.ndarray):
    """Columns ``P`` with ``P^T gram P = I`` over Q(i), or None if the search fails.

    The search is incomplete: it can miss a basis that needs large
    coefficients (a conic over Z[i] would have to be solved).

    The remaining space is diagonalised, then a square norm is normalised, or
    two norms with square product are turned into an orthonormal pair, or a
    small combination of square norm is used.  By Witt cancellation the rest
    stays orthonormalisable whenever the whole space is.
    """
    n = gram.shape[0]
    vecs = [exact_eye(n)[:, j] for j in range(n)]
    chosen = []

    def pair(u, v):
        return u @ gram @ v

    while vecs:
        vecs = _diagonal_basis(vecs, pair)
        if vecs is None:
            return None
        if not vecs:
            break
        step = _orthonormal_step(vecs, pair)
        if step is None:
            return None
        picked, used = step
        chosen.extend(picked)
        vecs = [v for k, v in enumerate(vecs) if k not in used]
        vecs = [v - sum((pair(v, b) * b for b in picked), start=exact_zeros(n)) for v in vecs]
    if len(chosen) != n:
        return None
    p = np.stack(chosen, axis=1) if chosen else exact_zeros((n, 0))
    if not all_zero(p.T @ gram @ p - exact_eye(n)):
        return None
    return p


def image_condition_check(a: Algebra) -> bool:
    """The algebra comes from a tensor in an orthonormal basis: its form is
    nondegenerate and invariant, and orthonormal in the given basis or
    orthonormalised over Q(i) by ``orthonormal_basis``.  A False answer from
    an exact algebra with a non-identity form can be a search miss."""
    if find_unit(a) is None:
        raise NotUnital("algebra has no unit")
    if not a.form.nondegenerate:
        return False
    if not form_is_invariant(a.mul, a.form.gram, a.tol):
        return False
    if a.form.is_identity:
        return True
    if not a.exact:
        return True
    p = orthonormal_basis(a.form.gram)
    if p is None:
        return False
    b = a.change_basis(p)
    return b.form.is_identity and form_is_invariant(b.mul, b.form.gram)


# --------------------------------------------------------------------------
# the 12-dimensional tensor


NON_SMOOTHABLE_NOTE = (
    "Local Gorenstein algebras with Hilbert function (1,6,6,1) and general cubic "
    "are non-smoothable (cited from the literature, not machine-verified); hence "
    "the emitted tensor lies in X but not in the closure Y of the odeco tensors."
)


@dataclass
class PipelineReport:
    dim_B: int
    hilbert_function_B: list
    catalecticant_ranks: list
    gorenstein_B: bool
    socle_power: int
    radical_equals_top_power: bool
    graded_filtration_matches: bool
    dim_A: int
    form_nondegenerate: bool
    orthonormal: bool
    residual_max_abs: float
    residual_nonzero: int
    is_nilpotent: bool
    is_two_step_nilpotent: bool
    dim_A_squared: int
    citation: str = NON_SMOOTHABLE_NOTE
    gram: list | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return (
            self.radical_equals_top_power
            and self.form_nondegenerate
            and self.residual_nonzero == 0
            and self.is_nilpotent
            and self.is_two_step_nilpotent
            and self.dim_A_squared > 0
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("gram")
        out["ok"] = self.ok
        return out


def _quotient_algebra(b: Algebra, m: np.ndarray, top: np.ndarray) -> tuple[Algebra, np.ndarray]:
    """``M / top`` with the form induced from ``b`` (``top`` must be its radical)."""
    both = np.concatenate([top, m], axis=1)
    _, piv = linalg.rref(both, b.tol)
    keep = [p - top.shape[1] for p in piv if p >= top.shape[1]]
    w = m[:, keep]
    full = np.concatenate([w, top], axis=1)
    linv = linalg.left_inverse(full, b.tol)
    d = w.shape[1]
    mul = exact_zeros((d, d, d)) if b.exact else np.zeros((d, d, d), complex)
    for i in range(d):
        for j in range(i, d):
            coords = linv @ b.multiply(w[:, i], w[:, j])
            mul[i, j] = mul[j, i] = coords[:d]
    return Algebra(mul, b.form.restrict(w), validate=False, tol=b.tol), w


def socle_quotient(b: Algebra) -> Algebra:
    """``M / M^d`` for a local algebra ``b`` whose top power ``M^d`` is the
    radical of the form restricted to ``M``; nilpotent, with nondegenerate form."""
    m = maximal_ideal(b)
    top = ideal_powers(b, m)[-1]
    return _quotient_algebra(b, m, top)[0]


def counterexample_pipeline(cubic: HomogeneousForm | None = None):
    """Return ``(tensor, form, report)`` for ``A = M / M^d`` of the apolar
    algebra of ``cubic`` (default: the shipped generic cubic in 6 variables).

    The tensor is written in an orthonormal basis of ``A`` when one is found
    over Q(i); ``form`` is then the identity.
    """
    cubic = shipped_cubic() if cubic is None else cubic
    ap = apolar_algebra(cubic)
    b = ap.algebra
    cert = is_gorenstein(b)
    m = maximal_ideal(b)
    powers = ideal_powers(b, m)
    top = powers[-1]
    filtration = [b.dim] + [p.shape[1] for p in powers] + [0]
    hf = [filtration[k] - filtration[k + 1] for k in range(len(filtration) - 1)]
    graded = hf == ap.catalecticant_ranks
    restricted = b.form.restrict(m)
    rad = m @ linalg.kernel_matrix(restricted.gram, b.tol)
    rad_ok = linalg.span_equal(rad, top, b.tol)
    a, _ = _quotient_algebra(b, m, top)
    nondeg = a.form.nondegenerate
    p = orthonormal_basis(a.form.gram) if nondeg else None
    if p is not None:
        a_out = a.change_basis(p)
        form_out = BilinearForm.identity(a.dim)
    else:
        a_out = a
        form_out = a.form
    tensor = a_out.to_tensor()
    res = robeva_residuals(tensor, form_out)
    squares = [a_out.multiply(a_out.basis_vector(i), a_out.basis_vector(j))
               for i in range(a.dim) for j in range(i, a.dim)]
    dim_sq = linalg.matrix_rank(np.stack(squares, axis=1)) if squares else 0
    report = PipelineReport(
        dim_B=b.dim,
        hilbert_function_B=hf,
        catalecticant_ranks=list(ap.catalecticant_ranks),
        gorenstein_B=cert.gorenstein,
        socle_power=len(powers),
        radical_equals_top_power=rad_ok,
        graded_filtration_matches=graded,
        dim_A=a.dim,
        form_nondegenerate=nondeg,
        orthonormal=p is not None,
        residual_max_abs=res.max_abs,
        residual_nonzero=res.num_nonzero,
        is_nilpotent=is_nilpotent(a_out),
        is_two_step_nilpotent=is_two_step_nilpotent(tensor, form_out),
        dim_A_squared=dim_sq,
        gram=None if p is not None else a.form.gram.tolist(),
    )
    return tensor, form_out, report


__all__ = [
    "ApolarAlgebra",
    "GorensteinCertificate",
    "HomogeneousForm",
    "IdealBasis",
    "MonomialBasis",
    "PipelineReport",
    "annihilator",
    "apolar_algebra",
    "catalecticant",
    "counterexample_pipeline",
    "generation_degree",
    "hilbert_function",
    "ideal_extraction",
    "image_condition_check",
    "is_gorenstein",
    "monomials_of_degree",
    "orthonormal_basis",
    "shipped_cubic",
    "socle",
    "socle_quotient",
]
