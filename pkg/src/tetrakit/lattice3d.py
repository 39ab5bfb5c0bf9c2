"""The periodic three-dimensional lattice model of a tetrahedral solution.

Edges of a periodic ``K x L x M`` lattice carry colors ``x_ijk`` (along i),
``y_ijk`` (along j) and ``z_ijk`` (along k).  A coloring is admissible when at
every node

    Phi(x_ijk, y_ijk, z_ijk) = (x_{i+1,j,k}, y_{i,j+1,k}, z_{i,j,k+1})

and its weight is the product of ``phi(x, y, z)^s`` over the nodes.  The
partition function ``Z`` is computed two ways: by enumerating colorings, and
as ``Tr T^L`` where the transfer matrix ``T`` adds one layer in the j
direction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocycle import Cocycle3, trivial_cocycle
from .scalars import RingElement
from .settheoretic import SetSolution3
from .tensorspace import BudgetExceeded, TensorOperator, _digits, ordered_product, partial_trace

__all__ = [
    "LatticeSpec",
    "ENUMERATION_BUDGET",
    "partition_bruteforce",
    "partition_naive",
    "transfer_matrix",
    "partition_via_transfer",
]

ENUMERATION_BUDGET = 2**24


@dataclass(frozen=True)
class LatticeSpec:
    K: int
    L: int
    M: int
    set_size: int
    s: int = 1

    def __post_init__(self):
        if min(self.K, self.L, self.M, self.set_size) < 1:
            raise ValueError(f"lattice sizes and set size must be positive: {self}")

    def to_json(self) -> dict:
        return {"K": self.K, "L": self.L, "M": self.M, "set_size": self.set_size, "s": self.s}


def _weights(c: Cocycle3, s: int) -> np.ndarray:
    return c.power(s)


def _sum(ring, values: np.ndarray) -> RingElement:
    total = ring.zero
    for v in values:
        total = ring.add(total, v)
    return ring.element(total)


def partition_bruteforce(phi: SetSolution3, c: Cocycle3 | None, spec: LatticeSpec, budget: int = ENUMERATION_BUDGET) -> tuple:
    """``(Z, admissible_count)`` by propagating colors from the seed slices.

    The free colors are ``x`` on the slice ``i = 0``, ``y`` on ``j = 0`` and
    ``z`` on ``k = 0``.  Visiting nodes in lexicographic order, each node's
    inputs are either seeds or outputs of an earlier node; the outputs that
    wrap around the periodic boundary must reproduce the seeds.
    """
    K, L, M, n = spec.K, spec.L, spec.M, spec.set_size
    if phi.set_size != n:
        raise ValueError(f"solution on |X|={phi.set_size} but lattice spec says {n}")
    c = c or trivial_cocycle(n)
    free = L * M + K * M + K * L
    if n**free > budget:
        raise BudgetExceeded(f"{n}^{free} seed colorings exceed the enumeration budget {budget}")
    seeds = _digits(free, n) if free else np.zeros((1, 0), dtype=np.int64)
    rows = len(seeds)
    x0 = seeds[:, : L * M].reshape(rows, L, M)
    y0 = seeds[:, L * M : L * M + K * M].reshape(rows, K, M)
    z0 = seeds[:, L * M + K * M :].reshape(rows, K, L)

    x = np.empty((rows, K + 1, L, M), dtype=np.int64)
    y = np.empty((rows, K, L + 1, M), dtype=np.int64)
    z = np.empty((rows, K, L, M + 1), dtype=np.int64)
    x[:, 0] = x0
    y[:, :, 0] = y0
    z[:, :, :, 0] = z0
    w = _weights(c, spec.s)
    ring = c.ring
    weight = np.empty(rows, dtype=object)
    weight.fill(ring.one)
    for i in range(K):
        for j in range(L):
            for k in range(M):
                idx = (x[:, i, j, k] * n + y[:, i, j, k]) * n + z[:, i, j, k]
                out = phi.images[idx]
                x[:, i + 1, j, k], y[:, i, j + 1, k], z[:, i, j, k + 1] = out[:, 0], out[:, 1], out[:, 2]
                weight = ring.reduce_array(weight * w[idx])
    closed = (
        np.all((x[:, K] == x[:, 0]).reshape(rows, -1), axis=1)
        & np.all((y[:, :, L] == y[:, :, 0]).reshape(rows, -1), axis=1)
        & np.all((z[:, :, :, M] == z[:, :, :, 0]).reshape(rows, -1), axis=1)
    )
    return _sum(ring, weight[closed]), int(closed.sum())


def partition_naive(phi: SetSolution3, c: Cocycle3 | None, spec: LatticeSpec, budget: int = 2**20) -> tuple:
    """``(Z, admissible_count)`` by testing every assignment of all ``3KLM`` edges.

    Only for tiny lattices; it exists as an independent reference.
    """
    K, L, M, n = spec.K, spec.L, spec.M, spec.set_size
    c = c or trivial_cocycle(n)
    nodes = K * L * M
    if n ** (3 * nodes) > budget:
        raise BudgetExceeded(f"{n}^{3 * nodes} colorings exceed the naive budget {budget}")
    w = _weights(c, spec.s)
    ring = c.ring
    total = ring.zero
    count = 0
    shape = (K, L, M)
    for flat in _digits(3 * nodes, n):
        x, y, z = (flat[a * nodes : (a + 1) * nodes].reshape(shape) for a in range(3))
        weight = ring.one
        ok = True
        for i in range(K):
            for j in range(L):
                for k in range(M):
                    img = phi(int(x[i, j, k]), int(y[i, j, k]), int(z[i, j, k]))
                    if img != (x[(i + 1) % K, j, k], y[i, (j + 1) % L, k], z[i, j, (k + 1) % M]):
                        ok = False
                        break
                    weight = ring.mul(weight, w[(x[i, j, k] * n + y[i, j, k]) * n + z[i, j, k]])
                if not ok:
                    break
            if not ok:
                break
        if ok:
            count += 1
            total = ring.add(total, weight)
    return ring.element(total), count


def transfer_matrix(a: TensorOperator, spec: LatticeSpec) -> TensorOperator:
    """One layer of node operators traced over the horizontal lines.

    Factor layout: ``V_ik`` for ``i < K, k < M`` (row-major), then the
    x-lines ``N_k`` and the z-lines ``E_i``.  The node ``(i, k)`` acts on
    ``(N_k, V_ik, E_i)``.  Along a line, a node acts after its predecessor,
    so ``A_{i+1,k}`` stands left of ``A_ik`` and ``A_{i,k+1}`` left of ``A_ik``.
    """
    K, M = spec.K, spec.M
    if a.n != 3 or a.dim != spec.set_size:
        raise ValueError("node operator must act on three factors of dimension |X|")
    vert = K * M
    n = vert + M + K
    placed = []
    for i in reversed(range(K)):
        for k in reversed(range(M)):
            placed.append((a, (vert + k, i * M + k, vert + M + i)))
    return partial_trace(ordered_product(n, placed), range(vert, n))


def partition_via_transfer(a: TensorOperator, spec: LatticeSpec) -> RingElement:
    """``Tr T^L``."""
    t = transfer_matrix(a, spec)
    return partial_trace(t.power(spec.L), range(t.n)).scalar()
