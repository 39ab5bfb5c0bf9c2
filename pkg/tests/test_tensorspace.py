from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import kron_embed, random_monomial
from tetrakit.scalars import QQ, ModRing
from tetrakit.tensorspace import (
    BudgetExceeded,
    NotInvertible,
    ShapeMismatch,
    SpaceShape,
    TensorOperator,
    dense_budget,
    embed,
    factor_permutation,
    identity,
    ordered_product,
    partial_trace,
    transposition,
)


def as_int(op):
    return np.array(op.matrix.tolist(), dtype=np.int64)


def test_transposition_squares_to_identity():
    p = transposition(3)
    assert p @ p == identity(3, 2)
    assert partial_trace(p, [0]) == identity(3, 1)


def test_trace_of_identity():
    t = partial_trace(identity(2, 2), [0, 1])
    assert t.scalar().value == 4


def test_swapped_positions_conjugate_by_flip():
    m = TensorOperator.from_matrix([[1, 2, 0, 0], [0, 1, 3, 0], [0, 0, 1, 4], [5, 0, 0, 1]], 2, 2)
    p = transposition(2)
    assert embed(m, (1, 0), 2) == p @ m @ p


@pytest.mark.parametrize("positions", [(0,), (2,), (1, 3), (3, 0), (2, 0, 1)])
def test_embed_matches_kronecker_reference(positions):
    rng = np.random.default_rng(len(positions))
    d, n, m = 2, 4, len(positions)
    mat = rng.integers(-3, 4, (d**m, d**m))
    op = TensorOperator.from_matrix(mat.tolist(), d, m)
    assert (as_int(embed(op, positions, n)) == kron_embed(mat, d, positions, n)).all()


def test_monomial_embedding_agrees_with_dense():
    rng = np.random.default_rng(7)
    op = random_monomial(rng, 3, 2)
    assert embed(op, (2, 0), 3) == embed(op.to_dense(), (2, 0), 3)
    assert embed(op, (2, 0), 3).is_monomial


def test_partial_trace_matches_einsum():
    rng = np.random.default_rng(3)
    mat = rng.integers(-5, 6, (8, 8))
    op = TensorOperator.from_matrix(mat.tolist(), 2, 3)
    ref = np.einsum("abcdbf->acdf", mat.reshape([2] * 6)).reshape(4, 4)
    assert (as_int(partial_trace(op, [1])) == ref).all()
    mono = random_monomial(rng, 2, 3)
    ref = np.einsum("abcdbf->acdf", as_int(mono).reshape([2] * 6)).reshape(4, 4)
    assert (as_int(partial_trace(mono, [1])) == ref).all()


def test_ordered_product_applies_rightmost_first():
    # e_0 -> e_1 on factor 0, then a swap: the result must read e_0 (x) e_1
    raise_ = TensorOperator.from_monomial([1, 0], 2, 1, coef=[1, 0])
    op = ordered_product(2, [(transposition(2), (0, 1)), (raise_, (0,))])
    assert op.perm[0] == 1  # |00> -> |10> -> |01>


def test_factor_permutation_moves_content():
    # content of factor 0 moves to factor 2
    op = factor_permutation(2, (2, 0, 1))
    assert op.perm[0b100] == 0b001


def test_monomial_inverse_needs_bijection_and_units():
    rng = np.random.default_rng(1)
    op = random_monomial(rng, 2, 2)
    assert op @ op.inverse() == identity(2, 2)
    with pytest.raises(NotInvertible):
        TensorOperator.from_monomial([0, 0, 1, 2], 2, 2).inverse()
    with pytest.raises(NotInvertible):
        TensorOperator.from_monomial(list(range(5)), 5, 1, ModRing(25), coef=[5, 1, 1, 1, 1]).inverse()


def test_json_roundtrip_both_representations():
    rng = np.random.default_rng(2)
    op = random_monomial(rng, 2, 2)
    assert TensorOperator.from_json(op.to_json()) == op
    dense = op.to_dense()
    assert TensorOperator.from_json(dense.to_json()) == dense


def test_budget_and_shape_errors():
    with dense_budget(16):
        with pytest.raises(BudgetExceeded):
            identity(2, 3).to_dense()
    with pytest.raises(ShapeMismatch):
        identity(2, 2) @ identity(2, 3)
    with pytest.raises(BudgetExceeded):
        SpaceShape(2, 40)


def test_witness_reported_for_differing_operators():
    a = identity(2, 2)
    b = TensorOperator.from_monomial([0, 1, 3, 2], 2, 2)
    assert list(a.differing_inputs(b)) == [2, 3]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_embedding_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b = random_monomial(rng, 2, 2), random_monomial(rng, 2, 2)
    pos = tuple(rng.permutation(4)[:2])
    assert embed(a @ b, pos, 4) == embed(a, pos, 4) @ embed(b, pos, 4)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dense_and_monomial_products_agree(seed):
    rng = np.random.default_rng(seed)
    a, b = random_monomial(rng, 2, 3, bijective=False), random_monomial(rng, 2, 3)
    assert a @ b == a.to_dense() @ b.to_dense()
    assert a.to_dense() @ b == a @ b.to_dense()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_is_cyclic_on_the_traced_factor(seed):
    rng = np.random.default_rng(seed)
    a, b = random_monomial(rng, 2, 2), random_monomial(rng, 2, 2, bijective=False)
    # Tr_0 only sees the full product through the traced factor when b is local to it
    local = embed(TensorOperator.from_matrix(rng.integers(-2, 3, (2, 2)).tolist(), 2, 1), (0,), 2)
    assert partial_trace(a @ local, [0]) == partial_trace(local @ a, [0])
    assert partial_trace(a + b, [1]) == partial_trace(a, [1]) + partial_trace(b, [1])


def test_rational_coefficients_survive_composition():
    half = TensorOperator.from_monomial([1, 0], 2, 1, coef=[Fraction(1, 2), 3])
    sq = half @ half
    assert list(sq.coef) == [Fraction(3, 2), Fraction(3, 2)]
    assert sq.ring == QQ
