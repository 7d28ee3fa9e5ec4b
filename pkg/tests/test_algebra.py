import numpy as np
import pytest

from odecoquad import linalg
from odecoquad.algebra import (
    Algebra,
    algebra_from_tensor,
    decompose_tensor,
    find_unit,
    is_ideal,
    is_invertibility_locus,
    is_local,
    is_nilpotent,
    local_decomposition,
    radical,
    reassemble,
    unital_nilpotent_split,
)
from odecoquad.errors import DegenerateForm, NotAssociative
from odecoquad.odeco import diagonal_tensor, hyperbolic_S, random_odeco
from odecoquad.scalars import all_zero, exact_array, exact_eye, exact_zeros, gq
from odecoquad.tensor import BilinearForm, SymTensor3, block_sum, robeva_residuals

from builders import block_diagonal_case, block_form, isotropic_tensor


def s_algebra():
    return algebra_from_tensor(hyperbolic_S(), BilinearForm.hyperbolic())


def quadratic_field_algebra():
    """Q[x]/(x^2 - 2) with its trace form: one local factor per root over C,
    but no idempotents over Q(i)."""
    mul = exact_zeros((2, 2, 2))
    mul[0, 0] = exact_array([1, 0])
    mul[0, 1] = mul[1, 0] = exact_array([0, 1])
    mul[1, 1] = exact_array([2, 0])
    return Algebra(mul, BilinearForm(exact_array([[2, 0], [0, 4]])))


def test_algebra_examples():
    e = algebra_from_tensor(diagonal_tensor(3))
    assert list(e.unit) == [1, 1, 1]
    s = s_algebra()
    assert list(s.unit) == [1, 0]
    z = algebra_from_tensor(SymTensor3.zero(3))
    assert z.unit is None
    with pytest.raises(DegenerateForm):
        algebra_from_tensor(diagonal_tensor(2), BilinearForm(exact_array([[1, 1], [1, 1]])))


def test_algebra_validation():
    mul = exact_zeros((2, 2, 2))
    mul[0, 1] = exact_array([1, 0])
    with pytest.raises(ValueError):
        Algebra(mul)  # not commutative
    e = algebra_from_tensor(diagonal_tensor(2))
    with pytest.raises(ValueError):
        Algebra(e.mul, BilinearForm(exact_array([[1, 1], [1, 3]])))


def test_to_tensor_round_trip():
    t = random_odeco(4, 3, 9)
    assert algebra_from_tensor(t).to_tensor() == t
    assert s_algebra().to_tensor() == hyperbolic_S()


def test_unit_of_two_step_nilpotent_is_absent():
    assert find_unit(algebra_from_tensor(isotropic_tensor(6, 2))) is None


def test_invertibility_locus():
    assert is_invertibility_locus(algebra_from_tensor(diagonal_tensor(3)))
    assert not is_invertibility_locus(algebra_from_tensor(isotropic_tensor(4, 1)))
    assert is_invertibility_locus(s_algebra())
    s = s_algebra()
    assert all_zero(s.L(s.basis_vector(0)) - exact_eye(2))


def test_invertibility_agrees_with_unit():
    for seed in range(10):
        t, f, _, _ = block_diagonal_case(seed)
        a = algebra_from_tensor(t, f)
        assert is_invertibility_locus(a) == (find_unit(a) is not None)


def test_is_nilpotent():
    assert is_nilpotent(Algebra.zero(3))
    assert not is_nilpotent(algebra_from_tensor(diagonal_tensor(2)))
    assert is_nilpotent(algebra_from_tensor(isotropic_tensor(5, 3)))
    bad = algebra_from_tensor(SymTensor3(2, {(0, 0, 0): 1, (0, 0, 1): 1}))
    with pytest.raises(NotAssociative):
        is_nilpotent(bad)


def test_radical():
    assert radical(algebra_from_tensor(diagonal_tensor(3))).shape[1] == 0
    assert radical(s_algebra()).shape[1] == 1
    assert radical(Algebra.zero(2)).shape[1] == 2


def test_split_examples():
    e = algebra_from_tensor(diagonal_tensor(3))
    sp = unital_nilpotent_split(e)
    assert sp.unital.shape[1] == 3 and sp.nilpotent.shape[1] == 0
    sp = unital_nilpotent_split(Algebra.zero(2))
    assert sp.unital.shape[1] == 0 and sp.nilpotent.shape[1] == 2


def test_split_recovers_blocks():
    t = block_sum([diagonal_tensor(2), isotropic_tensor(2, 5)])
    a = algebra_from_tensor(t)
    sp = unital_nilpotent_split(a)
    eye = exact_eye(4)
    assert linalg.span_equal(sp.unital, eye[:, :2])
    assert linalg.span_equal(sp.nilpotent, eye[:, 2:])


def test_split_is_unique_across_seeds():
    for seed in range(8):
        t, f, u, n = block_diagonal_case(seed)
        a = algebra_from_tensor(t, f)
        s1 = unital_nilpotent_split(a, seed=1, random_first=True)
        s2 = unital_nilpotent_split(a, seed=2, random_first=True)
        assert linalg.span_equal(s1.unital, s2.unital) and linalg.span_equal(s1.unital, u)
        assert linalg.span_equal(s1.nilpotent, s2.nilpotent) and linalg.span_equal(s1.nilpotent, n)


def test_split_rejects_non_associative():
    bad = algebra_from_tensor(SymTensor3(2, {(0, 0, 0): 1, (0, 0, 1): 1}))
    with pytest.raises(NotAssociative):
        unital_nilpotent_split(bad)


@pytest.mark.parametrize("exact", [True, False])
def test_local_decomposition_of_E(exact):
    a = algebra_from_tensor(diagonal_tensor(4, exact))
    dec = local_decomposition(a, tol=None if exact else 1e-9)
    assert [b.dim for b in dec.blocks] == [1, 1, 1, 1]
    assert all(b.kind == "local-unital" for b in dec.blocks)
    assert dec.nilpotent.shape[1] == 0
    assert dec.verify(a) == []


def test_local_decomposition_of_S_and_sums():
    dec = local_decomposition(s_algebra())
    assert [(b.kind, b.dim) for b in dec.blocks] == [("local-unital", 2)]
    t = block_sum([diagonal_tensor(2), hyperbolic_S()])
    f = block_form([BilinearForm.identity(2), BilinearForm.hyperbolic()])
    a = algebra_from_tensor(t, f)
    for exact in (True, False):
        alg = a if exact else Algebra(a.to_float().mul, a.form.to_float(), validate=False, tol=1e-9)
        dec = local_decomposition(alg, seed=3, tol=None if exact else 1e-9)
        assert sorted(b.dim for b in dec.blocks) == [1, 1, 2]
        assert dec.verify(alg) == []


def test_exact_refinement_stops_at_irrational_factors():
    a = quadratic_field_algebra()
    assert not is_local(a)
    dec = local_decomposition(a)
    assert [(b.kind, b.dim) for b in dec.blocks] == [("unital", 2)]
    fdec = local_decomposition(a.to_float(), tol=1e-9)
    assert [(b.kind, b.dim) for b in fdec.blocks] == [("local-unital", 1), ("local-unital", 1)]


def test_exact_refinement_splits_over_gaussian_rationals():
    # x^2 + 1 splits over Q(i)
    mul = exact_zeros((2, 2, 2))
    mul[0, 0] = exact_array([1, 0])
    mul[0, 1] = mul[1, 0] = exact_array([0, 1])
    mul[1, 1] = exact_array([-1, 0])
    a = Algebra(mul, BilinearForm(exact_array([[2, 0], [0, -2]])))
    dec = local_decomposition(a)
    assert [(b.kind, b.dim) for b in dec.blocks] == [("local-unital", 1)] * 2
    assert dec.verify(a) == []


def test_block_units_are_idempotent_and_orthogonal():
    a = algebra_from_tensor(random_odeco(5, 3, 4))
    dec = local_decomposition(a)
    units = [b.unit for b in dec.blocks]
    for i, u in enumerate(units):
        assert all_zero(a.multiply(u, u) - u)
        for v in units[i + 1:]:
            assert all_zero(a.multiply(u, v))
    assert is_ideal(a, dec.nilpotent)


@pytest.mark.parametrize("seed", range(6))
def test_decompose_tensor_reassembles(seed):
    t, f, _, _ = block_diagonal_case(seed)
    blocks = decompose_tensor(t, f, seed=seed)
    assert reassemble(blocks, t.dim) == t
    for b in blocks:
        assert b.form.nondegenerate
        assert robeva_residuals(b.tensor, b.form).is_zero


def test_decompose_E_into_rank_one_blocks():
    blocks = decompose_tensor(diagonal_tensor(3))
    assert len(blocks) == 3
    for b in blocks:
        assert b.tensor.dim == 1 and b.kind == "local-unital"
    assert reassemble(blocks, 3) == diagonal_tensor(3)


def test_decompose_rejects_points_outside_X():
    with pytest.raises(NotAssociative):
        decompose_tensor(SymTensor3(2, {(0, 0, 0): 1, (0, 0, 1): 1}))


def test_float_decomposition_of_random_odeco():
    t = random_odeco(5, 5, 8).to_float()
    blocks = decompose_tensor(t, tol=1e-9)
    assert len(blocks) == 5
    assert (reassemble(blocks, 5, exact=False) - t).is_zero(1e-8)


def test_restrict_requires_closed_subspace():
    a = algebra_from_tensor(diagonal_tensor(2))
    with pytest.raises(ValueError):
        a.restrict(exact_array([[1], [1]]) * gq(1) + exact_array([[0], [1]]))
    assert np.array_equal(a.restrict(exact_eye(2)).mul, a.mul)
