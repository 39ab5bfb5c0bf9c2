"""Exact dense inversion over the supported rings.

Fields (rationals, prime fields, ``Z/p``) use Gauss-Jordan elimination.
``Z/p^k`` inverts modulo ``p`` and then Hensel-lifts with the Newton step
``X <- X (2I - A X)``, which doubles the p-adic precision each round.
Composite moduli are split into prime powers and recombined by CRT.
"""
from __future__ import annotations

import numpy as np

from .scalars import RingDescriptor, RingKind, factor_prime_powers


class NotInvertible(ArithmeticError):
    pass


def _gauss_jordan(a: list[list], zero, one, sub, mul, inv, is_zero) -> list[list]:
    n = len(a)
    m = [row[:] + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not is_zero(m[r][col])), None)
        if pivot is None:
            raise NotInvertible(f"singular matrix (no pivot in column {col})")
        m[col], m[pivot] = m[pivot], m[col]
        piv_inv = inv(m[col][col])
        m[col] = [mul(piv_inv, x) for x in m[col]]
        for r in range(n):
            if r == col or is_zero(m[r][col]):
                continue
            f = m[r][col]
            m[r] = [sub(x, mul(f, y)) for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def _inverse_mod_prime(a: list[list], p: int) -> list[list]:
    return _gauss_jordan(
        [[x % p for x in row] for row in a],
        0,
        1,
        lambda x, y: (x - y) % p,
        lambda x, y: x * y % p,
        lambda x: pow(x, -1, p),
        lambda x: x % p == 0,
    )


def _mulmod(x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    return x.dot(y) % m


def hensel_inverse(a: np.ndarray, p: int, k: int) -> np.ndarray:
    """Inverse of an integer matrix modulo ``p**k`` by Newton/Hensel lifting."""
    n = a.shape[0]
    x = np.array(_inverse_mod_prime(a.tolist(), p), dtype=object).reshape(n, n)
    eye = np.eye(n, dtype=np.int64).astype(object)
    prec = 1
    target = p**k
    while prec < k:
        prec = min(2 * prec, k)
        mod = p**prec
        x = _mulmod(x, (2 * eye - _mulmod(a, x, mod)) % mod, mod)
    return x % target


def _crt_pair(r1, m1, r2, m2):
    # m1, m2 coprime
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t


def inverse_matrix(ring: RingDescriptor, a: np.ndarray) -> np.ndarray:
    """Exact inverse of a square object array of ring payloads."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    if n == 0:
        return a.copy()
    if ring.kind is RingKind.COMPLEX:
        c = a.astype(complex)
        if np.linalg.cond(c) > 1 / ring.tolerance:
            raise NotInvertible("matrix is numerically singular")
        return np.linalg.inv(c).astype(object)
    if ring.kind is RingKind.RATIONAL:
        rows = _gauss_jordan(
            a.tolist(),
            ring.zero,
            ring.one,
            lambda x, y: x - y,
            lambda x, y: x * y,
            lambda x: 1 / x,
            lambda x: x == 0,
        )
        return np.array(rows, dtype=object).reshape(n, n)
    m = ring.modulus
    result = np.zeros((n, n), dtype=np.int64).astype(object)
    modulus_so_far = 1
    for p, e in factor_prime_powers(m):
        try:
            part = hensel_inverse(a % p**e, p, e)
        except NotInvertible:
            raise NotInvertible(f"matrix is singular modulo {p} (not invertible in Z/{m})") from None
        if modulus_so_far == 1:
            result = part
        else:
            result = np.frompyfunc(lambda r1, r2: _crt_pair(r1, modulus_so_far, r2, p**e), 2, 1)(result, part)
        modulus_so_far *= p**e
    return result % m


def is_invertible(ring: RingDescriptor, a: np.ndarray) -> bool:
    try:
        inverse_matrix(ring, a)
    except NotInvertible:
        return False
    return True


def rank(ring: RingDescriptor, a: np.ndarray) -> int:
    """Rank over a field (row echelon form)."""
    if not ring.is_field:
        raise ValueError(f"rank is only defined here over fields, not {ring}")
    if ring.kind is RingKind.COMPLEX:
        return int(np.linalg.matrix_rank(a.astype(complex), tol=ring.tolerance))
    rows = [list(r) for r in a.tolist()]
    nrows, ncols = len(rows), (len(rows[0]) if rows else 0)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not ring.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = ring.invert(rows[r][c])
        rows[r] = [ring.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and not ring.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        r += 1
    return r
