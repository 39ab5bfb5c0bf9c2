"""Shared fixtures: extra tetrahedral solutions, cocycle search, planted defects."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from tetrakit.cocycle import Cocycle3, check_cocycle
from tetrakit.settheoretic import ReductionSpec, SetSolution3, build_reduction
from tetrakit.tensorspace import TensorOperator

# Linear maps over GF(2) that solve the set-theoretic equation (found by exhaustive search
# over invertible 3x3 matrices); unlike the electric reductions their traces do not vanish.
GF2_SOLUTIONS = {
    "gf2-a": [[1, 1, 1], [0, 0, 1], [0, 1, 0]],
    "gf2-b": [[1, 0, 0], [1, 0, 1], [1, 1, 0]],
}


def gf2_solution(name: str) -> SetSolution3:
    mat = np.array(GF2_SOLUTIONS[name])
    return SetSolution3.from_function(2, lambda x, y, z: tuple(int(v) for v in mat @ np.array([x, y, z]) % 2))


def electric(p, k, eps) -> SetSolution3:
    return build_reduction(ReductionSpec(p, k, eps))[0]


def cyclic_shift() -> SetSolution3:
    """``(x, y, z) -> (y, z, x)``: a bijection that violates the equation."""
    return SetSolution3.from_function(2, lambda x, y, z: (y, z, x))


def sign_cocycles(sol: SetSolution3) -> list:
    """Every +-1 valued cocycle of a solution on two colors, by brute force."""
    out = []
    for bits in range(256):
        c = Cocycle3(2, [(-1) ** ((bits >> i) & 1) for i in range(8)])
        if check_cocycle(sol, c).passed:
            out.append(c)
    return out


def naive_matrix(sol: SetSolution3, c: Cocycle3, s: int) -> list:
    """The lift as a nested list of Fractions, written out entry by entry."""
    n = sol.set_size
    size = n**3
    rows = [[Fraction(0)] * size for _ in range(size)]
    for x, y, z in itertools.product(range(n), repeat=3):
        xp, yp, zp = sol(x, y, z)
        rows[(xp * n + yp) * n + zp][(x * n + y) * n + z] = Fraction(c(x, y, z).value) ** s
    return rows


def random_monomial(rng, dim, n, bijective=True) -> TensorOperator:
    size = dim**n
    perm = rng.permutation(size) if bijective else rng.integers(0, size, size)
    coef = [Fraction(int(v)) for v in rng.choice([-3, -2, -1, 1, 2, 3], size)]
    return TensorOperator.from_monomial(perm, dim, n, coef=coef)


def kron_embed(mat: np.ndarray, d: int, positions, n: int) -> np.ndarray:
    """Reference embedding: Kronecker with identities, then move factors into place."""
    m = len(positions)
    full = np.kron(mat, np.eye(d ** (n - m), dtype=mat.dtype))
    # factor order of ``full``: positions..., then the remaining factors ascending
    rest = [q for q in range(n) if q not in positions]
    order = list(positions) + rest
    t = full.reshape([d] * (2 * n))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(d**n, d**n)


def relabel(sol: SetSolution3, g) -> SetSolution3:
    """Conjugate a solution by the color permutation ``g``."""
    inv = np.argsort(g)
    return SetSolution3.from_function(sol.set_size, lambda x, y, z: tuple(int(g[v]) for v in sol(inv[x], inv[y], inv[z])))
