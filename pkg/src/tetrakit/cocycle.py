"""3-cocycles of the tetrahedral complex and the matrix lift of a solution.

A cocycle assigns a unit weight to every triple of colors.  Coloring the
six-tuple ``(a1..a6)`` step by step with either side of the tetrahedral
equation visits four triples; the cocycle condition asks that the products
of the four weights agree.  Concretely, for the side applying
``Phi_123, Phi_145, Phi_246, Phi_356`` in that order, the visited triples are

    (a1, a2, a3), (a1', a4, a5), (a2', a4', a6), (a3', a5', a6')

where a primed color is the value written by the previous step that touched
that slot.  The other side applies the same maps in reverse order.

Given a solution ``Phi`` and a cocycle ``phi``, the operator

    A(s) e_x (x) e_y (x) e_z = phi(x, y, z)^s  e_x' (x) e_y' (x) e_z'

solves the matrix tetrahedral equation.  Applying the operator product
``A_123 A_145 A_246 A_356`` to a basis vector walks the colorings with
``A_356`` first, so the matrix equation holds exactly when the weight
products of both walks agree, which is the cocycle condition.
"""
from __future__ import annotations

import time

import numpy as np

from .report import VerificationReport
from .scalars import QQ, RingDescriptor, RingMismatch
from .settheoretic import TE_LHS, TE_RHS, SetSolution3
from .tensorspace import SpaceShape, TensorOperator, _digits

__all__ = ["Cocycle3", "CocycleError", "trivial_cocycle", "check_cocycle", "lift_to_matrix"]


class CocycleError(ValueError):
    pass


class Cocycle3:
    """Unit-valued weights on ``X^3``, flattened big-endian in ``(x, y, z)``."""

    def __init__(self, set_size: int, values, ring: RingDescriptor = QQ):
        values = ring.array(list(values))
        if values.shape != (set_size**3,):
            raise CocycleError(f"cocycle on |X|={set_size} needs {set_size**3} values, got {values.shape[0]}")
        for i, v in enumerate(values):
            if not ring.is_unit(v):
                raise CocycleError(f"cocycle value {ring.format(v)} at index {i} is not a unit")
        values.flags.writeable = False
        self.set_size = set_size
        self.ring = ring
        self.values = values

    def __call__(self, x: int, y: int, z: int):
        n = self.set_size
        return self.ring.element(self.values[(x * n + y) * n + z])

    def __mul__(self, other: "Cocycle3") -> "Cocycle3":
        if other.ring != self.ring or other.set_size != self.set_size:
            raise RingMismatch("pointwise product needs cocycles over the same ring and set")
        return Cocycle3(self.set_size, self.ring.reduce_array(self.values * other.values), self.ring)

    def power(self, s: int) -> np.ndarray:
        return np.array([self.ring.power(v, s) for v in self.values], dtype=object)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "set_size": self.set_size, "values": [self.ring.format(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "Cocycle3":
        ring = RingDescriptor.from_json(obj["ring"])
        return cls(int(obj["set_size"]), [ring.parse(v) for v in obj["values"]], ring)


def trivial_cocycle(set_size: int, ring: RingDescriptor = QQ) -> Cocycle3:
    return Cocycle3(set_size, [1] * set_size**3, ring)


def _walk_weights(phi: SetSolution3, c: Cocycle3, order) -> np.ndarray:
    n = phi.set_size
    tuples = _digits(6, n)
    weight = np.empty(len(tuples), dtype=object)
    weight.fill(c.ring.one)
    for slots in order:
        idx = (tuples[:, slots[0]] * n + tuples[:, slots[1]]) * n + tuples[:, slots[2]]
        weight = c.ring.reduce_array(weight * c.values[idx])
        tuples = phi.apply(tuples, slots)
    return weight


def check_cocycle(phi: SetSolution3, c: Cocycle3) -> VerificationReport:
    """Exhaustively test the cocycle condition on every six-tuple of colors."""
    if phi.set_size != c.set_size:
        raise CocycleError(f"solution on |X|={phi.set_size} but cocycle on |X|={c.set_size}")
    start = time.perf_counter()
    forward = _walk_weights(phi, c, TE_RHS)  # Phi_123 first
    backward = _walk_weights(phi, c, TE_LHS)  # Phi_356 first
    ring = c.ring
    bad = [i for i, (a, b) in enumerate(zip(forward, backward)) if not ring.equal(a, b)]
    params = {"set_size": phi.set_size, "ring": ring.to_json()}
    if not bad:
        return VerificationReport("cocycle", params, True, elapsed=time.perf_counter() - start)
    i = bad[0]
    witness = {
        "tuple": _digits(6, phi.set_size)[i].tolist(),
        "forward_weight": ring.format(forward[i]),
        "backward_weight": ring.format(backward[i]),
        "failures": len(bad),
    }
    return VerificationReport("cocycle", params, False, witness, residual=str(len(bad)), elapsed=time.perf_counter() - start)


def lift_to_matrix(phi: SetSolution3, c: Cocycle3 | None = None, s: int = 1, *, validate: bool = True) -> TensorOperator:
    """The monomial operator ``A(s)`` on ``V^{(x)3}``, ``dim V = |X|``.

    With ``validate`` the cocycle condition is checked first and a failure
    raises :class:`CocycleError`.
    """
    if c is None:
        c = trivial_cocycle(phi.set_size)
    if validate:
        report = check_cocycle(phi, c)
        if not report.passed:
            raise CocycleError(f"not a cocycle for this solution: {report.witness}")
    shape = SpaceShape(phi.set_size, 3)
    return TensorOperator(shape, c.ring, perm=phi.flat, coef=c.power(int(s)))
