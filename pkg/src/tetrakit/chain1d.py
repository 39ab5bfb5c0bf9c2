"""One-dimensional commuting families built from a braid solution and a Lax operator.

Given ``R'`` on ``V (x) V`` solving the braid relation and a Lax operator
``L`` on ``V (x) V_q`` with ``R' L_1 L_2 = L_1 L_2 R'``, the operators

    I_k = Tr_{1..k} L_1 ... L_k R'_{12} R'_{23} ... R'_{k-1,k}

on ``V_q`` commute pairwise.  This module builds ``I_k``, the generating
polynomial ``Q(t)``, and the chain identities used in the commutativity
argument, each as an exact operator check.

Layout: a product over ``k`` auxiliary copies lives on ``k`` auxiliary
blocks followed by the quantum factors.  An auxiliary space may itself be a
tensor power ``V^{(x)a}``; a block then spans ``a`` consecutive factors and
``R'`` acts on two blocks, i.e. on ``2a`` factors.  Block numbers in the
public API are 1-based, matching the usual ``R_{12}`` subscripts.
"""
from __future__ import annotations

from dataclasses import dataclass

from .report import VerificationReport, combine, compare_operators
from .scalars import QQ, RingDescriptor
from .tensorspace import (
    ShapeMismatch,
    TensorOperator,
    commutator,
    factor_permutation,
    ordered_product,
    partial_trace,
)

__all__ = [
    "LaxOperator",
    "RChain",
    "block_swap",
    "to_braid",
    "from_braid",
    "check_ybe_matrix",
    "check_ybe_braid",
    "check_rll",
    "build_Ik",
    "build_Q",
    "check_lemma3",
    "check_lemma4",
    "check_conjugator",
    "lax_from_r",
    "lax_from_word",
    "sl2_r_matrix",
    "commutators",
]


@dataclass(frozen=True)
class LaxOperator:
    """``op`` on ``aux (x) quantum``; the first ``aux_factors`` factors are auxiliary."""

    op: TensorOperator
    aux_factors: int = 1

    def __post_init__(self):
        if self.aux_factors < 1 or self.aux_factors > self.op.n:
            raise ShapeMismatch(f"{self.aux_factors} auxiliary factors on an operator with {self.op.n} factors")

    @property
    def q_factors(self) -> int:
        return self.op.n - self.aux_factors

    @property
    def aux_dim(self) -> int:
        return self.op.dim**self.aux_factors

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def ring(self) -> RingDescriptor:
        return self.op.ring


def _block_count(r: TensorOperator) -> int:
    if r.n % 2:
        raise ShapeMismatch(f"a two-block operator needs an even factor count, got {r.n}")
    return r.n // 2


def block_swap(dim: int, a: int, ring) -> TensorOperator:
    """The flip of two auxiliary blocks of ``a`` factors each."""
    return factor_permutation(dim, list(range(a, 2 * a)) + list(range(a)), ring)


def to_braid(r: TensorOperator) -> TensorOperator:
    """``R' = R P``: a Yang-Baxter solution turned into a braid solution."""
    return r @ block_swap(r.dim, _block_count(r), r.ring)


def from_braid(r: TensorOperator) -> TensorOperator:
    """``R'' = P R``: the other conversion, used for ``L = R_{1a} R_{1b}``."""
    return block_swap(r.dim, _block_count(r), r.ring) @ r


def _blocks(a: int, *which: int) -> tuple:
    # 1-based block numbers -> factor positions
    return tuple(p for b in which for p in range((b - 1) * a, b * a))


def check_ybe_matrix(r: TensorOperator) -> VerificationReport:
    """``R_12 R_13 R_23 = R_23 R_13 R_12`` on three blocks."""
    a = _block_count(r)
    n = 3 * a
    lhs = ordered_product(n, [(r, _blocks(a, 1, 2)), (r, _blocks(a, 1, 3)), (r, _blocks(a, 2, 3))])
    rhs = ordered_product(n, [(r, _blocks(a, 2, 3)), (r, _blocks(a, 1, 3)), (r, _blocks(a, 1, 2))])
    return compare_operators("ybe", {"dim": r.dim, "block_factors": a}, lhs, rhs)


def check_ybe_braid(r: TensorOperator) -> VerificationReport:
    """``R'_12 R'_23 R'_12 = R'_23 R'_12 R'_23`` on three blocks."""
    a = _block_count(r)
    n = 3 * a
    lhs = ordered_product(n, [(r, _blocks(a, 1, 2)), (r, _blocks(a, 2, 3)), (r, _blocks(a, 1, 2))])
    rhs = ordered_product(n, [(r, _blocks(a, 2, 3)), (r, _blocks(a, 1, 2)), (r, _blocks(a, 2, 3))])
    return compare_operators("ybe_braid", {"dim": r.dim, "block_factors": a}, lhs, rhs)


def _check_pair(r: TensorOperator, l: LaxOperator):
    if r.dim != l.dim or _block_count(r) != l.aux_factors:
        raise ShapeMismatch(f"R acts on blocks of {r.n // 2} factors, L has {l.aux_factors} auxiliary factors")


def _lax_slots(l: LaxOperator, block: int, k: int) -> tuple:
    a = l.aux_factors
    return _blocks(a, block) + tuple(range(k * a, k * a + l.q_factors))


def _chain_factors(l: LaxOperator, k: int) -> list:
    return [(l.op, _lax_slots(l, b, k)) for b in range(1, k + 1)]


def check_rll(r: TensorOperator, l: LaxOperator) -> VerificationReport:
    """``R'_12 L_1 L_2 = L_1 L_2 R'_12`` with both Lax copies on the same quantum factors."""
    _check_pair(r, l)
    a = l.aux_factors
    n = 2 * a + l.q_factors
    lax = _chain_factors(l, 2)
    lhs = ordered_product(n, [(r, _blocks(a, 1, 2))] + lax)
    rhs = ordered_product(n, lax + [(r, _blocks(a, 1, 2))])
    return compare_operators("rll", {"dim": r.dim, "aux_factors": a, "q_factors": l.q_factors}, lhs, rhs)


@dataclass(frozen=True)
class RChain:
    """``R_{start,start+1} R_{start+1,start+2} ... R_{end-1,end}`` (1-based blocks).

    A window with ``start == end`` is the empty product.
    """

    r: TensorOperator
    span: tuple

    def factors(self) -> list:
        a = _block_count(self.r)
        start, end = self.span
        return [(self.r, _blocks(a, b, b + 1)) for b in range(start, end)]

    def inverse_factors(self) -> list:
        inv = self.r.inverse()
        a = _block_count(self.r)
        start, end = self.span
        return [(inv, _blocks(a, b, b + 1)) for b in reversed(range(start, end))]


def _trace_blocks(op: TensorOperator, a: int, k: int) -> TensorOperator:
    return partial_trace(op, range(k * a))


def build_Ik(l: LaxOperator, r: TensorOperator, k: int) -> TensorOperator:
    """``Tr_{1..k} L_1 ... L_k R'_12 ... R'_{k-1,k}`` on the quantum space."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_pair(r, l)
    a = l.aux_factors
    n = k * a + l.q_factors
    word = _chain_factors(l, k) + RChain(r, (1, k)).factors()
    return _trace_blocks(ordered_product(n, word), a, k)


def build_Q(l: LaxOperator, r: TensorOperator, N: int) -> list:
    """Coefficients ``[c_0, ..., c_{N-1}]`` of ``Q(t) = Tr L^{(x)N} (1 + t R'_12 + t^2 R'_12 R'_23 + ...)``.

    ``c_j`` is traced directly from the ``j``-th chain term; it factors as
    ``I_{j+1} I_1^{N-1-j}``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    _check_pair(r, l)
    a = l.aux_factors
    n = N * a + l.q_factors
    lax = _chain_factors(l, N)
    return [_trace_blocks(ordered_product(n, lax + RChain(r, (1, j + 1)).factors()), a, N) for j in range(N)]


def _conj(n: int, chains: list, x: list, dim: int, ring) -> TensorOperator:
    """``g X g^{-1}`` for ``g`` the product of the given chains (leftmost first)."""
    g = [f for c in chains for f in c.factors()]
    g_inv = [f for c in reversed(chains) for f in c.inverse_factors()]
    return ordered_product(n, g + x + g_inv, dim=dim, ring=ring)


def check_lemma3(r: TensorOperator, k: int, m: int) -> VerificationReport:
    """Conjugating by the full chain shifts a link: ``Ad(R_12...R_{k-1,k}) R_{m,m+1} = R_{m+1,m+2}``."""
    if not 1 <= m <= k - 2:
        raise ValueError(f"need 1 <= m <= k-2, got k={k}, m={m}")
    a = _block_count(r)
    n = k * a
    lhs = _conj(n, [RChain(r, (1, k))], [(r, _blocks(a, m, m + 1))], r.dim, r.ring)
    rhs = ordered_product(n, [(r, _blocks(a, m + 1, m + 2))])
    return compare_operators("lemma3", {"k": k, "m": m, "dim": r.dim}, lhs, rhs)


def check_lemma4(r: TensorOperator, k: int) -> VerificationReport:
    """``Ad(R_23...R_{k-1,k}) Ad(R_12...R_{k-2,k-1}) R_{k-1,k} = R_12``."""
    if k < 3:
        raise ValueError(f"need k >= 3, got {k}")
    a = _block_count(r)
    n = k * a
    lhs = _conj(n, [RChain(r, (2, k)), RChain(r, (1, k - 1))], [(r, _blocks(a, k - 1, k))], r.dim, r.ring)
    rhs = ordered_product(n, [(r, _blocks(a, 1, 2))])
    return compare_operators("lemma4", {"k": k, "dim": r.dim}, lhs, rhs)


def _conjugator_chains(r: TensorOperator, k: int, lcount: int) -> list:
    # R-bar_{l,k+l} R-bar_{l-1,k+l-1} ... R-bar_{1,k+1}
    return [RChain(r, (j, k + j)) for j in range(lcount, 0, -1)]


def check_conjugator(l: LaxOperator, r: TensorOperator, k: int, lcount: int) -> VerificationReport:
    """The chain-swapping conjugation behind the commutativity of ``Q(t)``.

    With ``A`` the product of the chains ``R_{j..k+j}`` for ``j = lcount..1``,

        Ad_A (L^{(x)k+l} R_{1..k} R_{k+1..k+l}) = L^{(x)k+l} R_{1..l} R_{l+1..k+l}

    and, for ``k == lcount``, ``Ad_A`` swaps the two ``S`` factors of
    ``S(t) (x) S(u)`` coefficient by coefficient.
    """
    if k < 1 or lcount < 1:
        raise ValueError("k and lcount must be >= 1")
    _check_pair(r, l)
    a = l.aux_factors
    total = k + lcount
    n = total * a + l.q_factors
    lax = _chain_factors(l, total)
    chains = _conjugator_chains(r, k, lcount)
    params = {"k": k, "lcount": lcount, "dim": r.dim}

    def side(first: int, second: int, conj: bool) -> TensorOperator:
        word = lax + RChain(r, (1, first)).factors() + RChain(r, (first + 1, first + second)).factors()
        if conj:
            return _conj(n, chains, word, r.dim, r.ring)
        return ordered_product(n, word)

    parts = [compare_operators("conjugator", params, side(k, lcount, True), side(lcount, k, False))]
    if k == lcount:
        # coefficient of t^x u^y in S(t) (x) S(u) against t^y u^x after conjugation
        for x in range(k):
            for y in range(k):
                word_in = lax + RChain(r, (1, 1 + x)).factors() + RChain(r, (k + 1, k + 1 + y)).factors()
                word_out = lax + RChain(r, (1, 1 + y)).factors() + RChain(r, (k + 1, k + 1 + x)).factors()
                parts.append(
                    compare_operators(
                        "conjugator_swap",
                        dict(params, t_power=x, u_power=y),
                        _conj(n, chains, word_in, r.dim, r.ring),
                        ordered_product(n, word_out),
                    )
                )
    return combine("conjugator", params, parts)


def lax_from_word(rs: list) -> LaxOperator:
    """``L = R1_{1,2} R2_{1,3} ... `` with one quantum factor per operator in ``rs``."""
    if not rs or any(r.n != 2 for r in rs):
        raise ShapeMismatch("lax_from_word needs operators on V (x) V")
    n = 1 + len(rs)
    op = ordered_product(n, [(r, (0, j + 1)) for j, r in enumerate(rs)])
    return LaxOperator(op, 1)


def lax_from_r(r: TensorOperator, q_factors: int) -> LaxOperator:
    """``L = R_{1,2} R_{1,3} ... R_{1,q+1}``; pairs with the braid solution ``P R``."""
    return lax_from_word([r] * q_factors)


def sl2_r_matrix(q=2, ring: RingDescriptor = QQ) -> TensorOperator:
    """The constant ``U_q(sl_2)`` solution of ``R_12 R_13 R_23 = R_23 R_13 R_12`` on ``C^2 (x) C^2``.

    Together with ``P R^{-1} P`` it satisfies the mixed relations needed for
    inhomogeneous Lax operators such as ``lax_from_word([R, P R^-1 P, R])``.
    """
    q = ring.coerce(q)
    if not ring.is_unit(q):
        raise ValueError("q must be invertible")
    c = ring.sub(q, ring.invert(q))
    z, one = ring.zero, ring.one
    rows = [[q, z, z, z], [z, one, z, z], [z, c, one, z], [z, z, z, q]]
    return TensorOperator.from_matrix(rows, 2, 2, ring)


def commutators(ops: list) -> list:
    """``[(a, b, [ops[a], ops[b]])]`` for ``a < b``."""
    return [(a, b, commutator(ops[a], ops[b])) for a in range(len(ops)) for b in range(a + 1, len(ops))]
