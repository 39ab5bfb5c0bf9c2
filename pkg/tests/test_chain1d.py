from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tetrakit.chain1d import (
    LaxOperator,
    build_Ik,
    build_Q,
    check_conjugator,
    check_lemma3,
    check_lemma4,
    check_rll,
    check_ybe_braid,
    check_ybe_matrix,
    commutators,
    from_braid,
    lax_from_r,
    lax_from_word,
    sl2_r_matrix,
    to_braid,
)
from tetrakit.scalars import ModRing
from tetrakit.tensorspace import ShapeMismatch, TensorOperator, identity, transposition

R = sl2_r_matrix(2)
P = transposition(2)
BRAID = from_braid(R)


def inhomogeneous_lax() -> LaxOperator:
    # quantum parts of this Lax operator do not commute, so the family is a real test
    return lax_from_word([R, P @ R.inverse() @ P, R])


def to_np(op):
    return np.array(op.matrix.tolist(), dtype=object)


def naive_ybe(mat: np.ndarray) -> bool:
    eye = np.eye(2, dtype=object)
    swap = np.eye(4, dtype=object)[[0, 2, 1, 3]]
    r12 = np.kron(mat, eye)
    r23 = np.kron(eye, mat)
    p23 = np.kron(eye, swap)
    r13 = p23.dot(r12).dot(p23)
    return (r12.dot(r13).dot(r23) == r23.dot(r13).dot(r12)).all()


def power_sum(l: LaxOperator, k: int) -> np.ndarray:
    """``sum_a (L^k)_{aa}`` with ``L`` a block matrix of quantum operators.

    The trace of the flipped chain multiplies the quantum blocks right to left,
    so the power is taken in the opposite algebra.
    """
    d, q = l.aux_dim, l.dim**l.q_factors
    m = to_np(l.op)
    blocks = [[m[a * q : (a + 1) * q, b * q : (b + 1) * q] for b in range(d)] for a in range(d)]
    power = blocks
    for _ in range(k - 1):
        power = [[sum(blocks[c][b].dot(power[a][c]) for c in range(d)) for b in range(d)] for a in range(d)]
    return sum(power[a][a] for a in range(d))


def test_jimbo_matrix_solves_ybe_both_ways():
    assert check_ybe_matrix(R).passed and naive_ybe(to_np(R))
    assert check_ybe_braid(to_braid(R)).passed
    assert check_ybe_braid(from_braid(R)).passed


@pytest.mark.parametrize("op", [P, identity(2, 2)])
def test_trivial_solutions(op):
    assert check_ybe_matrix(op).passed
    assert check_ybe_braid(op).passed


def test_generic_matrix_fails_ybe_with_witness():
    m = TensorOperator.from_matrix([[1, 2, 0, 0], [0, 1, 3, 0], [0, 0, 1, 0], [1, 0, 0, 2]], 2, 2)
    rep = check_ybe_matrix(m)
    assert not rep.passed and rep.witness is not None
    assert not naive_ybe(to_np(m))


def test_jimbo_over_a_residue_ring():
    assert check_ybe_matrix(sl2_r_matrix(3, ModRing(25))).passed


def test_rll_for_lax_built_from_the_solution():
    assert check_rll(BRAID, lax_from_r(R, 2)).passed
    assert check_rll(BRAID, inhomogeneous_lax()).passed


def test_rll_rejects_the_other_braid_convention():
    rep = check_rll(to_braid(R), inhomogeneous_lax())
    assert not rep.passed and rep.witness is not None


def test_flip_pairs_only_with_commuting_quantum_parts():
    diag = TensorOperator.from_monomial(range(4), 2, 2, coef=[2, 3, 5, 7])
    assert check_rll(P, lax_from_r(diag, 2)).passed
    assert not check_rll(P, lax_from_r(R, 2)).passed


def test_shape_mismatch_between_r_and_lax():
    with pytest.raises(ShapeMismatch):
        check_rll(identity(2, 4), inhomogeneous_lax())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_family_with_flip_is_a_power_sum(k):
    rng = np.random.default_rng(k)
    l = LaxOperator(TensorOperator.from_matrix(rng.integers(-2, 3, (8, 8)).tolist(), 2, 3), 1)
    assert (to_np(build_Ik(l, P, k)) == power_sum(l, k)).all()


def test_family_commutes_for_inhomogeneous_chain():
    l = inhomogeneous_lax()
    fam = [build_Ik(l, BRAID, k) for k in (1, 2, 3)]
    assert not any(f.is_zero() for f in fam)
    # the members are not diagonal, so commuting is not automatic
    assert any(not f.is_monomial for f in fam)
    for _, _, c in commutators(fam):
        assert c.is_zero()


def test_family_fails_to_commute_with_wrong_braid():
    l = inhomogeneous_lax()
    fam = [build_Ik(l, to_braid(R), k) for k in (1, 2, 3)]
    assert any(not c.is_zero() for _, _, c in commutators(fam))


def test_generating_coefficients_factor_and_commute():
    l = inhomogeneous_lax()
    N = 3
    coeffs = build_Q(l, BRAID, N)
    first = build_Ik(l, BRAID, 1)
    for j, c in enumerate(coeffs):
        assert c == build_Ik(l, BRAID, j + 1) @ first.power(N - 1 - j)
    for _, _, c in commutators(coeffs):
        assert c.is_zero()


@pytest.mark.parametrize("r", [P, BRAID], ids=["flip", "jimbo"])
@pytest.mark.parametrize("k", [3, 4, 5])
def test_chain_shift_lemmas(r, k):
    for m in range(1, k - 1):
        assert check_lemma3(r, k, m).passed
    assert check_lemma4(r, k).passed


def test_chain_shift_needs_a_braid_solution():
    bad = TensorOperator.from_matrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 1, 1]], 2, 2)
    assert not check_lemma3(bad, 3, 1).passed
    assert not check_lemma4(bad, 3).passed


def test_chain_shift_argument_checks():
    with pytest.raises(ValueError):
        check_lemma3(P, 3, 2)
    with pytest.raises(ValueError):
        check_lemma4(P, 2)


@pytest.mark.parametrize("k,lcount", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_conjugator_identity(k, lcount):
    rep = check_conjugator(inhomogeneous_lax(), BRAID, k, lcount)
    assert rep.passed
    if k == lcount:
        assert len(rep.parts) == 1 + k * k


def test_conjugator_with_flip_needs_commuting_quantum_parts():
    diag = TensorOperator.from_monomial(range(4), 2, 2, coef=[2, 3, 5, 7])
    assert check_conjugator(lax_from_r(diag, 1), P, 2, 1).passed
    assert not check_conjugator(lax_from_r(R, 1), P, 2, 1).passed


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 9), st.integers(1, 2))
def test_jimbo_family_commutes_for_any_parameter(q, qf):
    r = sl2_r_matrix(Fraction(q, 3))
    l = lax_from_r(r, qf)
    b = from_braid(r)
    fam = [build_Ik(l, b, k) for k in (1, 2)]
    assert all(c.is_zero() for _, _, c in commutators(fam))
