import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from odecoquad.errors import DegenerateForm
from odecoquad.odeco import diagonal_tensor, hyperbolic_S, random_odeco
from odecoquad.scalars import I, all_zero, exact_array, gq
from odecoquad.tensor import (
    _R_SYMMETRIES,
    BilinearForm,
    SymTensor3,
    block_sum,
    canonical_tuples,
    check_invariance,
    flattening_rank,
    is_in_X,
    mu,
    robeva_residuals,
    slices_commute,
    structure_constants,
)


@st.composite
def small_tensors(draw, max_dim=4):
    n = draw(st.integers(1, max_dim))
    triples = list(itertools.combinations_with_replacement(range(n), 3))
    vals = draw(st.lists(st.integers(-2, 2), min_size=len(triples), max_size=len(triples)))
    return SymTensor3(n, dict(zip(triples, vals)))


def test_storage_and_dense_symmetry():
    t = SymTensor3(3, {(0, 1, 2): 5, (2, 2, 2): gq(1, 1)})
    d = t.dense()
    assert all(d[p] == 5 for p in itertools.permutations((0, 1, 2)))
    assert t[(2, 1, 0)] == 5 and t[(0, 0, 0)] == 0
    assert not d.flags.writeable
    with pytest.raises(ValueError):
        SymTensor3(2, {(0, 1, 1): 1, (1, 0, 1): 2})
    assert SymTensor3.from_dense(d) == t
    assert (t - t).is_zero()


def test_from_dense_rejects_asymmetric():
    arr = np.zeros((2, 2, 2), complex)
    arr[0, 0, 1] = 1
    with pytest.raises(ValueError):
        SymTensor3.from_dense(arr)


def test_transform_matches_oracle():
    t = SymTensor3(2, {(0, 0, 1): 1, (1, 1, 1): 2})
    p = exact_array([[1, 2], [I, 1]])
    out = t.transform(p).dense()
    d = oracles.dense_tensor(t)
    for a, b, c in itertools.product(range(2), repeat=3):
        expect = sum(
            oracles.sym(p[a, i]) * oracles.sym(p[b, j]) * oracles.sym(p[c, k]) * d[i][j][k]
            for i in range(2) for j in range(2) for k in range(2)
        )
        assert oracles.sym(out[a, b, c]) == expect.expand()


def test_bilinear_form_basics():
    f = BilinearForm.hyperbolic()
    assert f.nondegenerate and not f.is_identity
    with pytest.raises(ValueError):
        BilinearForm(exact_array([[1, 2], [3, 1]]))
    deg = BilinearForm(exact_array([[1, 1], [1, 1]]))
    assert not deg.nondegenerate
    with pytest.raises(DegenerateForm):
        deg.require_nondegenerate()
    with pytest.raises(DegenerateForm):
        robeva_residuals(diagonal_tensor(2), deg)


def test_structure_constants_examples():
    e = structure_constants(diagonal_tensor(3))
    for i, j, k in itertools.product(range(3), repeat=3):
        assert e[i, j, k] == (1 if i == j == k else 0)
    s = structure_constants(hyperbolic_S(), BilinearForm.hyperbolic())
    # C[y]/(y^2): e1 e1 = e1, e1 e2 = e2, e2 e2 = 0
    assert list(s[0, 0]) == [1, 0] and list(s[0, 1]) == [0, 1] and list(s[1, 1]) == [0, 0]


@settings(max_examples=25, deadline=None)
@given(small_tensors(3))
def test_structure_constants_match_oracle(t):
    f = BilinearForm(exact_array([[1, 1, 0], [1, 2, 0], [0, 0, 1]])[: t.dim, : t.dim])
    if not f.nondegenerate:
        return
    c = structure_constants(t, f)
    ref = oracles.structure_constants(t, f)
    for i, j, k in itertools.product(range(t.dim), repeat=3):
        assert oracles.sym(c[i, j, k]) == ref[i][j][k]


def test_mu_bilinear():
    t = random_odeco(3, 3, 5)
    x = exact_array([1, 2, 0])
    y = exact_array([0, 1, -1])
    z = exact_array([3, 0, 1])
    assert all_zero(mu(t, None, x + z, y) - mu(t, None, x, y) - mu(t, None, z, y))


def test_residuals_at_odeco_points():
    assert robeva_residuals(diagonal_tensor(4)).is_zero
    assert robeva_residuals(hyperbolic_S(), BilinearForm.hyperbolic()).is_zero
    assert robeva_residuals(random_odeco(6, 6, 1)).max_abs == 0


def test_perturbed_tensor_leaves_X():
    # e1 e1 = e1 + e2, e1 e2 = e1, e2 e2 = 0 is not associative
    t = SymTensor3(2, {(0, 0, 0): 1, (0, 0, 1): 1})
    rep = robeva_residuals(t)
    assert rep.max_abs != 0 and not is_in_X(t)
    assert oracles.max_abs_residual(t, BilinearForm.identity(2)) == rep.max_abs
    assert not oracles.is_associative(t, BilinearForm.identity(2))


def test_T111_T122_example_is_odeco():
    # e2^2 = e1 with unit e1: C[x]/(x^2 - 1), the sum of cubes of e1 +- e2 over two
    t = SymTensor3(2, {(0, 0, 0): 1, (0, 1, 1): 1})
    half = gq(1) / 2
    plus, minus = exact_array([1, 1]), exact_array([1, -1])
    assert t == SymTensor3.from_vectors([plus, minus], weights=[half, half])
    assert robeva_residuals(t).is_zero
    assert oracles.is_associative(t, BilinearForm.identity(2))


@settings(max_examples=30, deadline=None)
@given(small_tensors(3))
def test_residual_report_matches_oracle(t):
    f = BilinearForm.identity(t.dim)
    ref = oracles.residuals(t, f)
    rep = robeva_residuals(t)
    nonzero = sum(1 for v in ref.values() if v != 0)
    assert rep.num_nonzero == nonzero
    assert rep.max_abs == pytest.approx(max((abs(complex(v)) for v in ref.values()), default=0.0))
    assert rep.is_zero == oracles.is_associative(t, f)


@settings(max_examples=40, deadline=None)
@given(small_tensors(4))
def test_reduced_loop_equals_full_loop(t):
    assert robeva_residuals(t, reduced=True) == robeva_residuals(t, reduced=False)


def test_reduced_loop_equals_full_loop_general_form():
    f = BilinearForm(exact_array([[0, 1, 0], [1, 0, 0], [0, 0, 2]]))
    t = SymTensor3(3, {(0, 0, 1): 1, (1, 2, 2): 3, (0, 2, 2): -1})
    assert robeva_residuals(t, f, reduced=True) == robeva_residuals(t, f, reduced=False)


def test_residual_symmetries_form_a_signed_group():
    perms = {p: s for p, s in _R_SYMMETRIES}
    assert len(perms) == 8
    for (p, s), (q, r) in itertools.product(_R_SYMMETRIES, repeat=2):
        comp = tuple(p[q[i]] for i in range(4))
        assert comp in perms and perms[comp] == s * r


def test_residual_symmetries_hold_on_values():
    t = SymTensor3(3, {(0, 0, 1): 1, (1, 2, 2): 2, (0, 1, 2): -1})
    ref = oracles.residuals(t, BilinearForm.identity(3))
    for tup in itertools.product(range(3), repeat=4):
        for perm, sign in _R_SYMMETRIES:
            moved = tuple(tup[p] for p in perm)
            assert ref[moved] == sign * ref[tup]


def test_canonical_tuples_cover_everything():
    for n in range(1, 5):
        assert sum(size for _, size in canonical_tuples(n)) == n**4


def test_invariance_and_slices():
    for t in (diagonal_tensor(3), random_odeco(4, 2, 3)):
        assert check_invariance(t)
        assert slices_commute(t)
    assert check_invariance(hyperbolic_S(), BilinearForm.hyperbolic())
    assert flattening_rank(hyperbolic_S()) == 2


def test_block_sum_and_float_mode():
    t = block_sum([diagonal_tensor(1), hyperbolic_S()])
    assert t.dim == 3 and t[(1, 2, 2)] == 1
    tf = random_odeco(4, 4, 2).to_float()
    assert robeva_residuals(tf, tol=1e-9).is_zero
