"""Linear operators on tensor powers ``V^{(x)n}``.

An operator is stored either densely (a ``d^n x d^n`` object array of ring
payloads) or as a *monomial* operator: for every input basis vector one
output basis vector and one scalar.  Lifts of set-theoretic solutions and
everything composed from them stay monomial, which keeps checks on
``V^{(x)15}`` at one array entry per basis vector.

Conventions
-----------
* Basis multi-indices are big-endian: factor 0 is the most significant digit
  of the flattened index.
* Factor positions are 0-based.
* ``a @ b`` (or ``a.compose(b)``) applies ``b`` first.  An ordered product
  ``A_1 A_2 ... A_n`` therefore acts with ``A_n`` first.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .linalg import NotInvertible
from .scalars import QQ, RingDescriptor, RingElement, RingMismatch

__all__ = [
    "BudgetExceeded",
    "NotInvertible",
    "ShapeMismatch",
    "SpaceShape",
    "TensorOperator",
    "PlacedOperator",
    "embed",
    "compose",
    "partial_trace",
    "inverse",
    "commutator",
    "ordered_product",
    "identity",
    "transposition",
    "factor_permutation",
    "dense_budget",
    "set_dense_budget",
]

_MAX_TOTAL_DIM = 2**31
_dense_budget = 2**26


class BudgetExceeded(MemoryError):
    pass


class ShapeMismatch(ValueError):
    pass


def set_dense_budget(entries: int) -> int:
    """Set the maximum number of dense entries; returns the previous value."""
    global _dense_budget
    old, _dense_budget = _dense_budget, int(entries)
    return old


class dense_budget:
    """Context manager temporarily overriding the dense entry budget."""

    def __init__(self, entries: int):
        self.entries = entries

    def __enter__(self):
        self._old = set_dense_budget(self.entries)

    def __exit__(self, *exc):
        set_dense_budget(self._old)


def _check_dense(total: int):
    if total * total > _dense_budget:
        raise BudgetExceeded(
            f"dense operator with {total}x{total} entries exceeds budget of {_dense_budget} entries"
        )


@dataclass(frozen=True)
class SpaceShape:
    dim: int
    n: int

    def __post_init__(self):
        if self.dim < 1 or self.n < 0:
            raise ValueError(f"invalid space shape dim={self.dim} n={self.n}")
        if self.dim**self.n > _MAX_TOTAL_DIM:
            raise BudgetExceeded(f"V^{self.n} with dim {self.dim} exceeds 2^31 basis vectors")

    @property
    def total(self) -> int:
        return self.dim**self.n


@functools.lru_cache(maxsize=64)
def _digits(n: int, d: int) -> np.ndarray:
    """Row ``i`` holds the big-endian base-``d`` digits of ``i``."""
    idx = np.arange(d**n, dtype=np.int64)
    out = np.empty((d**n, n), dtype=np.int64)
    for q in range(n):
        out[:, q] = (idx // d ** (n - 1 - q)) % d
    out.flags.writeable = False
    return out


def _weights(n: int, d: int) -> np.ndarray:
    return d ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class TensorOperator:
    """Immutable linear operator on ``V^{(x)n}`` with ``dim V = d``."""

    __slots__ = ("shape", "ring", "_dense", "_perm", "_coef")

    def __init__(self, shape: SpaceShape, ring: RingDescriptor, *, dense=None, perm=None, coef=None):
        self.shape = shape
        self.ring = ring
        self._dense = self._perm = self._coef = None
        total = shape.total
        if dense is not None:
            _check_dense(total)
            dense = np.asarray(dense, dtype=object)
            if dense.shape != (total, total):
                raise ShapeMismatch(f"dense matrix has shape {dense.shape}, expected {(total, total)}")
            self._dense = _frozen(dense)
        else:
            perm = np.asarray(perm, dtype=np.int64)
            if perm.shape != (total,) or (total and (perm.min() < 0 or perm.max() >= total)):
                raise ShapeMismatch("monomial index map must send every input to a valid output")
            if coef is None:
                coef = np.empty(total, dtype=object)
                coef.fill(ring.one)
            else:
                coef = np.asarray(coef, dtype=object)
                if coef.shape != (total,):
                    raise ShapeMismatch("monomial needs one scalar per input basis vector")
            self._perm = _frozen(perm)
            self._coef = _frozen(coef)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_matrix(cls, rows, dim: int, n: int, ring: RingDescriptor = QQ) -> "TensorOperator":
        return cls(SpaceShape(dim, n), ring, dense=ring.array(rows))

    @classmethod
    def from_monomial(cls, perm, dim: int, n: int, ring: RingDescriptor = QQ, coef=None) -> "TensorOperator":
        if coef is not None:
            coef = ring.array(list(coef))
        return cls(SpaceShape(dim, n), ring, perm=perm, coef=coef)

    # -- basic properties ------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def size(self) -> int:
        return self.shape.total

    @property
    def is_monomial(self) -> bool:
        return self._perm is not None

    @property
    def perm(self) -> np.ndarray:
        if not self.is_monomial:
            raise TypeError("dense operator has no index map")
        return self._perm

    @property
    def coef(self) -> np.ndarray:
        if not self.is_monomial:
            raise TypeError("dense operator has no monomial scalars")
        return self._coef

    @property
    def matrix(self) -> np.ndarray:
        """Dense matrix (object array, ``[out, in]``)."""
        if self._dense is not None:
            return self._dense
        _check_dense(self.size)
        m = self.ring.zeros((self.size, self.size))
        m[self._perm, np.arange(self.size)] = self._coef
        return m

    def to_dense(self) -> "TensorOperator":
        if self._dense is not None:
            return self
        return TensorOperator(self.shape, self.ring, dense=self.matrix)

    def to_monomial(self) -> "TensorOperator | None":
        """Monomial form of a dense operator, or ``None`` if it is not monomial."""
        if self.is_monomial:
            return self
        m = self._dense
        nz = self.ring.array_nonzero_mask(m)
        counts = nz.sum(axis=0)
        if np.any(counts > 1):
            return None
        perm = np.where(counts == 1, nz.argmax(axis=0), np.arange(self.size))
        coef = m[perm, np.arange(self.size)].copy()
        return TensorOperator(self.shape, self.ring, perm=perm, coef=coef)

    def scalar(self) -> RingElement:
        """The value of a 0-factor operator (e.g. a full trace)."""
        if self.n != 0:
            raise ShapeMismatch("scalar() needs an operator on zero factors")
        return RingElement(self.ring, self.matrix[0, 0])

    def __repr__(self):
        kind = "monomial" if self.is_monomial else "dense"
        return f"<TensorOperator {kind} d={self.dim} n={self.n} over {self.ring}>"

    # -- algebra ------------------------------------------------------------
    def _check_same(self, other: "TensorOperator"):
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes differ: {self.shape} vs {other.shape}")
        if self.ring != other.ring:
            raise RingMismatch(f"rings differ: {self.ring} vs {other.ring}")

    def compose(self, other: "TensorOperator") -> "TensorOperator":
        """``self @ other``: apply ``other`` first."""
        self._check_same(other)
        ring = self.ring
        if self.is_monomial and other.is_monomial:
            perm = self._perm[other._perm]
            coef = ring.reduce_array(self._coef[other._perm] * other._coef)
            return TensorOperator(self.shape, ring, perm=perm, coef=coef)
        if other.is_monomial:
            dense = ring.reduce_array(self._dense[:, other._perm] * other._coef[None, :])
            return TensorOperator(self.shape, ring, dense=dense)
        if self.is_monomial:
            scaled = ring.reduce_array(other._dense * self._coef[:, None])
            out = ring.zeros(scaled.shape)
            if len(np.unique(self._perm)) == self.size:
                out[self._perm] = scaled
            else:
                np.add.at(out, self._perm, scaled)
                out = ring.reduce_array(out)
            return TensorOperator(self.shape, ring, dense=out)
        return TensorOperator(self.shape, ring, dense=ring.matmul(self._dense, other._dense))

    __matmul__ = compose

    def _linear(self, other: "TensorOperator", sign: int) -> "TensorOperator":
        self._check_same(other)
        ring = self.ring
        if self.is_monomial and other.is_monomial:
            same = self._perm == other._perm
            if np.all(same):
                coef = self._coef + other._coef if sign > 0 else self._coef - other._coef
                return TensorOperator(self.shape, ring, perm=self._perm, coef=ring.reduce_array(coef))
        a, b = self.matrix, other.matrix
        return TensorOperator(self.shape, ring, dense=ring.reduce_array(a + b if sign > 0 else a - b))

    def __add__(self, other):
        return self._linear(other, 1)

    def __sub__(self, other):
        return self._linear(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "TensorOperator":
        c = self.ring.coerce(c)
        if self.is_monomial:
            return TensorOperator(self.shape, self.ring, perm=self._perm, coef=self.ring.reduce_array(self._coef * c))
        return TensorOperator(self.shape, self.ring, dense=self.ring.reduce_array(self._dense * c))

    def power(self, k: int) -> "TensorOperator":
        if k < 0:
            return self.inverse().power(-k)
        result = identity(self.dim, self.n, self.ring)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def tensor(self, other: "TensorOperator") -> "TensorOperator":
        """Kronecker product on ``V^{(x)(n+m)}``; ``self`` on the leading factors."""
        if self.dim != other.dim:
            raise ShapeMismatch("tensor factors must share dim V")
        if self.ring != other.ring:
            raise RingMismatch("rings differ")
        shape = SpaceShape(self.dim, self.n + other.n)
        if self.is_monomial and other.is_monomial:
            db = other.size
            perm = (self._perm[:, None] * db + other._perm[None, :]).reshape(-1)
            coef = self.ring.reduce_array(np.multiply.outer(self._coef, other._coef).reshape(-1))
            return TensorOperator(shape, self.ring, perm=perm, coef=coef)
        a, b = self.matrix, other.matrix
        out = np.multiply.outer(a, b).transpose(0, 2, 1, 3).reshape(shape.total, shape.total)
        return TensorOperator(shape, self.ring, dense=self.ring.reduce_array(out))

    def inverse(self) -> "TensorOperator":
        ring = self.ring
        if self.is_monomial:
            perm = self._perm
            if len(np.unique(perm)) != self.size:
                raise NotInvertible("monomial index map is not a bijection")
            inv_perm = np.empty_like(perm)
            inv_perm[perm] = np.arange(self.size)
            inv_coef = np.empty(self.size, dtype=object)
            for i, c in enumerate(self._coef):
                if not ring.is_unit(c):
                    raise NotInvertible(f"scalar {ring.format(c)} at input {i} is not a unit")
                inv_coef[perm[i]] = ring.invert(c)
            return TensorOperator(self.shape, ring, perm=inv_perm, coef=inv_coef)
        return TensorOperator(self.shape, ring, dense=linalg.inverse_matrix(ring, self._dense))

    def is_invertible(self) -> bool:
        try:
            self.inverse()
        except NotInvertible:
            return False
        return True

    # -- comparison -------------------------------------------------------------
    def is_zero(self) -> bool:
        if self.is_monomial:
            return self.ring.array_is_zero(self._coef)
        return self.ring.array_is_zero(self._dense)

    def differing_inputs(self, other: "TensorOperator") -> np.ndarray:
        """Input basis indices whose images under ``self`` and ``other`` differ."""
        self._check_same(other)
        ring = self.ring
        if self.is_monomial and other.is_monomial:
            nz_a = ring.array_nonzero_mask(self._coef)
            nz_b = ring.array_nonzero_mask(other._coef)
            diff_coef = ring.array_nonzero_mask(ring.reduce_array(self._coef - other._coef))
            bad = (nz_a | nz_b) & ((self._perm != other._perm) | diff_coef)
            return np.flatnonzero(bad)
        delta = ring.reduce_array(self.matrix - other.matrix)
        return np.flatnonzero(ring.array_nonzero_mask(delta).any(axis=0))

    def equals(self, other: "TensorOperator") -> bool:
        return len(self.differing_inputs(other)) == 0

    def __eq__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return self.shape == other.shape and self.ring == other.ring and self.equals(other)

    __hash__ = None

    def residual(self, other: "TensorOperator"):
        """Largest entry magnitude of ``self - other`` (ring-exact where possible)."""
        ring = self.ring
        if self.is_monomial and other.is_monomial:
            bad = self.differing_inputs(other)
            mags = [ring.abs_value(c) for c in self._coef[bad]] + [ring.abs_value(c) for c in other._coef[bad]]
            same = bad[self._perm[bad] == other._perm[bad]]
            mags += [ring.abs_value(ring.sub(a, b)) for a, b in zip(self._coef[same], other._coef[same])]
            return max(mags, default=ring.abs_value(ring.zero))
        delta = ring.reduce_array(self.matrix - other.matrix)
        return max((ring.abs_value(x) for x in delta.flat), default=ring.abs_value(ring.zero))

    # -- serialization -------------------------------------------------------------
    def to_json(self) -> dict:
        fmt = self.ring.format
        out = {"dim": self.dim, "factors": self.n, "ring": self.ring.to_json()}
        if self.is_monomial:
            out["repr"] = "monomial"
            out["entries"] = [[i, int(o), fmt(c)] for i, (o, c) in enumerate(zip(self._perm, self._coef))]
        else:
            out["repr"] = "dense"
            out["rows"] = [[fmt(x) for x in row] for row in self._dense]
        return out

    @classmethod
    def from_json(cls, obj: dict, ring: RingDescriptor | None = None) -> "TensorOperator":
        if ring is None:
            ring = RingDescriptor.from_json(obj["ring"]) if "ring" in obj else QQ
        shape = SpaceShape(int(obj["dim"]), int(obj["factors"]))
        if obj["repr"] == "monomial":
            perm = np.arange(shape.total, dtype=np.int64)
            coef = ring.zeros(shape.total)
            seen = set()
            for i, o, c in obj["entries"]:
                if i in seen:
                    raise ValueError(f"duplicate monomial entry for input {i}")
                seen.add(i)
                perm[i] = o
                coef[i] = ring.parse(c)
            if len(seen) != shape.total:
                raise ValueError("monomial dump must list every input basis vector exactly once")
            return cls(shape, ring, perm=perm, coef=coef)
        if obj["repr"] == "dense":
            rows = np.array([[ring.parse(x) for x in row] for row in obj["rows"]], dtype=object)
            return cls(shape, ring, dense=rows.reshape(shape.total, shape.total))
        raise ValueError(f"unknown operator repr {obj['repr']!r}")


# -- constructors -------------------------------------------------------------------


def identity(dim: int, n: int, ring: RingDescriptor = QQ) -> TensorOperator:
    shape = SpaceShape(dim, n)
    return TensorOperator(shape, ring, perm=np.arange(shape.total, dtype=np.int64))


def factor_permutation(dim: int, sigma: Sequence[int], ring: RingDescriptor = QQ) -> TensorOperator:
    """Operator moving the content of factor ``q`` into factor ``sigma[q]``."""
    n = len(sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma!r} is not a permutation")
    dg = _digits(n, dim)
    out = np.empty_like(dg)
    out[:, list(sigma)] = dg
    perm = out @ _weights(n, dim)
    return TensorOperator(SpaceShape(dim, n), ring, perm=perm)


def transposition(dim: int, ring: RingDescriptor = QQ) -> TensorOperator:
    """The flip ``P: e_a (x) e_b -> e_b (x) e_a`` on ``V (x) V``."""
    return factor_permutation(dim, (1, 0), ring)


@dataclass(frozen=True)
class PlacedOperator:
    """An operator on ``m`` factors placed at ``positions`` inside ``V^{(x)n}``."""

    op: TensorOperator
    positions: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))
        pos = self.positions
        if len(pos) != self.op.n:
            raise ShapeMismatch(f"operator acts on {self.op.n} factors but {len(pos)} positions given")
        if len(set(pos)) != len(pos):
            raise ValueError(f"duplicate factor positions {pos}")
        if any(p < 0 or p >= self.n for p in pos):
            raise ValueError(f"positions {pos} out of range for {self.n} factors")

    def embed(self) -> TensorOperator:
        return _embed(self.op, self.positions, self.n)


def _embed(op: TensorOperator, positions: tuple, n: int) -> TensorOperator:
    d, m = op.dim, op.n
    if positions == tuple(range(n)):
        return op
    shape = SpaceShape(d, n)
    dg = _digits(n, d)
    pos = list(positions)
    wn = _weights(n, d)
    sub = dg[:, pos] @ _weights(m, d)
    base = np.arange(shape.total, dtype=np.int64) - dg[:, pos] @ wn[pos]
    sub_digits = _digits(m, d)
    if op.is_monomial:
        out_sub = op.perm[sub]
        perm = base + sub_digits[out_sub] @ wn[pos]
        return TensorOperator(shape, op.ring, perm=perm, coef=op.coef[sub])
    _check_dense(shape.total)
    out = op.ring.zeros((shape.total, shape.total))
    offsets = sub_digits @ wn[pos]  # contribution of every output sub-index
    rows = base[:, None] + offsets[None, :]
    cols = np.broadcast_to(np.arange(shape.total)[:, None], rows.shape)
    out[rows, cols] = op.matrix[:, sub].T
    return TensorOperator(shape, op.ring, dense=out)


def embed(op: TensorOperator | PlacedOperator, positions: Iterable[int] | None = None, n: int | None = None) -> TensorOperator:
    """Act as ``op`` on ``positions`` (in listed order) and as identity elsewhere."""
    if isinstance(op, PlacedOperator):
        return op.embed()
    return PlacedOperator(op, tuple(positions), n).embed()


def compose(a: TensorOperator, b: TensorOperator) -> TensorOperator:
    return a @ b


def commutator(a: TensorOperator, b: TensorOperator) -> TensorOperator:
    return a @ b - b @ a


def inverse(a: TensorOperator) -> TensorOperator:
    return a.inverse()


def partial_trace(a: TensorOperator, over: Iterable[int]) -> TensorOperator:
    """Trace over the factors in ``over``; the rest keep their relative order."""
    over = sorted(set(int(q) for q in over))
    n, d, ring = a.n, a.dim, a.ring
    if any(q < 0 or q >= n for q in over):
        raise ValueError(f"trace factors {over} out of range for {n} factors")
    if not over:
        return a
    keep = [q for q in range(n) if q not in over]
    shape = SpaceShape(d, len(keep))
    _check_dense(shape.total)
    if a.is_monomial:
        dg = _digits(n, d)
        od = dg[a.perm]
        mask = np.all(dg[:, over] == od[:, over], axis=1) & ring.array_nonzero_mask(a.coef)
        w = _weights(len(keep), d)
        cols = dg[mask][:, keep] @ w
        rows = od[mask][:, keep] @ w
        out = ring.zeros((shape.total, shape.total))
        np.add.at(out, (rows, cols), a.coef[mask])
        return TensorOperator(shape, ring, dense=ring.reduce_array(out))
    t = a.matrix.reshape([d] * (2 * n))
    cur = n
    for q in reversed(over):
        t = np.trace(t, axis1=q, axis2=cur + q)
        cur -= 1
    out = ring.reduce_array(np.asarray(t, dtype=object).reshape(shape.total, shape.total))
    return TensorOperator(shape, ring, dense=out)


def ordered_product(n: int, factors: Sequence[tuple[TensorOperator, Sequence[int]]], *, dim: int | None = None, ring: RingDescriptor | None = None) -> TensorOperator:
    """``A_1 A_2 ... A_k`` of placed operators on ``V^{(x)n}`` (``A_k`` acts first).

    An empty product is the identity; ``dim``/``ring`` are then required.
    """
    if not factors:
        if dim is None:
            raise ValueError("empty product needs dim")
        return identity(dim, n, ring or QQ)
    result = None
    for op, pos in reversed(factors):
        placed = _embed(op, tuple(pos), n)
        result = placed if result is None else placed @ result
    return result
