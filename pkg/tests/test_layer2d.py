import functools
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import cyclic_shift, electric, gf2_solution, kron_embed, random_monomial, relabel, sign_cocycles
from tetrakit.chain1d import check_rll, check_ybe_braid, check_ybe_matrix, to_braid
from tetrakit.cocycle import lift_to_matrix
from tetrakit.layer2d import (
    TWISTED_IDENTITIES,
    FamilySpec,
    LayerShape,
    Side,
    TwistKind,
    build_family,
    build_layer,
    check_exchange_identity,
    check_genericity,
    check_lemma5,
    check_proof_lemmas,
    check_te,
    check_theorem,
    check_twisted_identities,
    check_word_identity,
    derive_L,
    derive_R,
    layer_labels,
    probe_joint_family,
    twist,
)
from tetrakit.settheoretic import SetSolution3
from tetrakit.tensorspace import ShapeMismatch, TensorOperator, identity, transposition


@functools.lru_cache(maxsize=None)
def fixture(name: str) -> TensorOperator:
    """Lifted solutions; the GF(2) ones carry a nontrivial sign cocycle."""
    if name == "e22":
        return lift_to_matrix(electric(2, 2, 1))
    if name == "e22-signed":
        sol = electric(2, 2, 1)
        return lift_to_matrix(sol, sign_cocycles(sol)[15])
    if name == "e52":
        return lift_to_matrix(electric(5, 2, 2))
    if name == "plain-identity":
        return identity(2, 3)
    if name == "identity":
        sol = SetSolution3.identity(2)
        return lift_to_matrix(sol, sign_cocycles(sol)[77])
    sol = gf2_solution(name)
    return lift_to_matrix(sol, sign_cocycles(sol)[-1])


SOLUTIONS = ["e22", "e22-signed", "identity", "gf2-a", "gf2-b"]


def to_np(op):
    return np.array(op.matrix.tolist(), dtype=object)


def test_twists_move_the_right_factors():
    phi = random_monomial(np.random.default_rng(0), 2, 3)
    swap12 = TensorOperator.from_matrix(kron_embed(to_np(transposition(2)), 2, (0, 1), 3).tolist(), 2, 3)
    swap23 = TensorOperator.from_matrix(kron_embed(to_np(transposition(2)), 2, (1, 2), 3).tolist(), 2, 3)
    assert twist(phi, TwistKind.L) == swap12 @ phi
    assert twist(phi, TwistKind.LTILDE) == swap23 @ phi
    assert twist(phi, TwistKind.R) == phi @ swap23
    assert twist(phi, TwistKind.RTILDE) == phi @ swap12
    assert twist(phi, TwistKind.NONE) is phi


@pytest.mark.parametrize("K,M", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_layer_matches_kronecker_product(K, M):
    phi = fixture("gf2-a")
    layer = LayerShape(K, M, 2)
    labels = layer_labels(layer)
    n = len(labels)
    mat = to_np(phi).astype(np.int64)
    expect = np.eye(2**n, dtype=np.int64)
    # row-major over sites; the first factor listed is applied last
    for s, t in itertools.product(range(K), range(M)):
        pos = (labels.index(("i", 0, s)), labels.index(("l", s, t)), labels.index(("j", 0, t)))
        expect = expect.dot(kron_embed(mat, 2, pos, n))
    assert (to_np(build_layer(phi, layer)) == expect).all()


def test_single_site_layer_is_the_operator():
    phi = fixture("gf2-b")
    assert build_layer(phi, LayerShape(1, 1, 2)) == phi


def test_layer_shape_checks():
    with pytest.raises(ShapeMismatch):
        build_layer(fixture("e22"), LayerShape(1, 1, 3))
    with pytest.raises(ValueError):
        LayerShape(0, 1, 2)


@pytest.mark.parametrize("name", SOLUTIONS + ["e52"])
def test_tetrahedral_equation_on_lifts(name):
    rep = check_te(fixture(name))
    assert rep.passed and rep.residual == "0" and rep.witness is None


@pytest.mark.parametrize("s", [0, 1, 2])
def test_tetrahedral_equation_for_every_power(s):
    sol = gf2_solution("gf2-b")
    assert check_te(lift_to_matrix(sol, sign_cocycles(sol)[9], s)).passed


def test_random_monomial_fails_tetrahedral_equation():
    rep = check_te(random_monomial(np.random.default_rng(11), 2, 3))
    assert not rep.passed and rep.witness is not None


def test_cyclic_shift_lift_fails():
    rep = check_te(lift_to_matrix(cyclic_shift()))
    assert not rep.passed


@pytest.mark.parametrize("name", SOLUTIONS + ["e52"])
def test_twisted_identities(name):
    rep = check_twisted_identities(fixture(name))
    assert rep.passed
    assert [p.check for p in rep.parts] == list(TWISTED_IDENTITIES)


@pytest.mark.parametrize("name", ["e22-signed", "gf2-a", "gf2-b"])
def test_mistwisted_identity_fails(name):
    lhs, rhs = TWISTED_IDENTITIES["RRLL"]
    flip = {"L": "R", "R": "L"}
    bad = [(flip[k], s) for k, s in lhs]
    rep = check_word_identity(fixture(name), "RRLL-swapped", bad, rhs)
    assert not rep.passed and rep.witness is not None


@pytest.mark.parametrize("name", SOLUTIONS)
@pytest.mark.parametrize("K,M", [(1, 1), (2, 1), (1, 2)])
def test_layer_consequences(name, K, M):
    rep = check_lemma5(fixture(name), LayerShape(K, M, 2))
    assert rep.passed
    assert [p.check for p in rep.parts] == ["cons", "cons2", "cons3"]


def test_layer_consequences_fail_without_the_equation():
    rep = check_lemma5(lift_to_matrix(cyclic_shift()), LayerShape(1, 1, 2))
    assert not rep.passed


def test_derived_r_of_identity():
    phi = identity(2, 3)
    r = derive_R(phi)
    assert r.plain == identity(2, 2).scale(2)
    assert r.twisted == transposition(2).scale(2)


@pytest.mark.parametrize("name", SOLUTIONS)
@pytest.mark.parametrize("m", [1, 2])
def test_derived_r_is_a_solution(name, m):
    r = derive_R(fixture(name), m)
    assert check_ybe_matrix(r.plain).passed
    assert check_ybe_braid(r.twisted).passed
    assert r.twisted == to_braid(r.plain)


@pytest.mark.parametrize("name", SOLUTIONS)
@pytest.mark.parametrize("K,M", [(1, 1), (2, 1), (1, 2)])
def test_derived_lax_satisfies_rll(name, K, M):
    phi = fixture(name)
    layer = LayerShape(K, M, 2)
    l = derive_L(phi, layer)
    assert l.aux_factors == M and l.q_factors == K * M
    assert check_rll(derive_R(phi, M).twisted, l).passed


def test_derived_data_is_nontrivial_for_gf2_fixture():
    r = derive_R(fixture("gf2-a"))
    assert not r.plain.is_zero()
    l = derive_L(fixture("gf2-a"), LayerShape(1, 1, 2))
    assert not l.op.is_zero()


@pytest.mark.parametrize("K,M,k", [(1, 1, 1), (1, 1, 2), (2, 1, 2), (1, 2, 2), (1, 1, 3)])
def test_identity_families_are_powers_of_the_dimension(K, M, k):
    phi = identity(2, 3)
    layer = LayerShape(K, M, 2)
    q = identity(2, K * M)
    # traced lines give d each; the linked lines of one column form a single cycle
    assert build_family(FamilySpec(phi, layer, k, Side.ROW)) == q.scale(2 ** (k * K + M + k - 1))
    assert build_family(FamilySpec(phi, layer, k, Side.COLUMN)) == q.scale(2 ** (k * M + K + k - 1))


def test_family_order_must_be_positive():
    with pytest.raises(ValueError):
        FamilySpec(fixture("e22"), LayerShape(1, 1, 2), 0)


@pytest.mark.parametrize("name", ["e22-signed", "gf2-a", "gf2-b"])
def test_row_and_column_members_commute(name):
    result = probe_joint_family(fixture(name), LayerShape(1, 1, 2), [1, 2])
    assert all(result.values()), result


@pytest.mark.parametrize("K,M", [(1, 1), (2, 1), (1, 2)])
def test_theorem_for_electric_lift(K, M):
    rep = check_theorem(fixture("e22"), LayerShape(K, M, 2), 2, 2)
    assert rep.passed and rep.extra["generic"] is True
    assert "note" not in rep.extra


def test_theorem_outside_hypotheses_is_flagged():
    rep = check_theorem(fixture("gf2-a"), LayerShape(1, 1, 2), 2, 2)
    assert rep.extra["generic"] is False
    assert rep.extra["note"] == "outside theorem hypotheses"


@pytest.mark.parametrize(
    "name,k,l,expected",
    [("e22", 1, 1, False), ("e22", 2, 1, False), ("e22", 1, 2, True), ("e22", 2, 2, True), ("plain-identity", 2, 2, True), ("identity", 1, 1, False), ("gf2-a", 2, 2, False)],
)
def test_genericity(name, k, l, expected):
    rep = check_genericity(fixture(name), k, l)
    assert rep.extra["generic"] is expected
    assert rep.extra["phi_invertible"] is True


def test_genericity_requires_invertible_operator():
    phi = TensorOperator.from_monomial([0] * 8, 2, 3)
    rep = check_genericity(phi, 1, 1)
    assert rep.extra["phi_invertible"] is False and rep.extra["generic"] is False


@pytest.mark.parametrize("name", ["e22", "e22-signed", "identity", "gf2-a", "gf2-b"])
@pytest.mark.parametrize("k,l", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_proof_lemmas(name, k, l):
    rep = check_proof_lemmas(fixture(name), k, l)
    assert rep.passed
    assert [p.check for p in rep.parts] == ["l1", "l2", "l3", "l4", "chain", "exchange"]


def test_proof_lemmas_fail_for_a_non_solution():
    assert not check_proof_lemmas(lift_to_matrix(cyclic_shift()), 2, 2).passed


@pytest.mark.parametrize("name", SOLUTIONS)
@pytest.mark.parametrize("length", [1, 2])
def test_exchange_identity(name, length):
    assert check_exchange_identity(fixture(name), length).passed


@settings(max_examples=8, deadline=None)
@given(st.permutations(range(5)))
def test_relabelled_solution_keeps_every_identity(g):
    phi = lift_to_matrix(relabel(electric(5, 2, 2), g))
    assert check_te(phi).passed
    assert check_twisted_identities(phi).passed
    assert check_ybe_braid(derive_R(phi).twisted).passed


@settings(max_examples=6, deadline=None)
@given(st.sampled_from(["gf2-a", "gf2-b"]), st.permutations(range(2)))
def test_relabelled_gf2_solution_keeps_layer_consequences(name, g):
    phi = lift_to_matrix(relabel(gf2_solution(name), g))
    assert check_lemma5(phi, LayerShape(1, 1, 2)).passed
