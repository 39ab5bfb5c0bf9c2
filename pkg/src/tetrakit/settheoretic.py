"""Set-theoretic and functional tetrahedral equations.

A map ``Phi: X^3 -> X^3`` solves the set-theoretic tetrahedral equation when

    Phi_123 o Phi_145 o Phi_246 o Phi_356 = Phi_356 o Phi_246 o Phi_145 o Phi_123

on ``X^6``, where ``Phi_abc`` rewrites the colors in slots ``a, b, c`` and
leaves the others alone (``o`` applies the right-hand map first).

The electric map

    (x, y, z) -> (xy/D, D, yz/D),   D = x + z + xyz

solves the functional version over any ring with the needed divisions, and
restricts to a finite solution on ``X = {x in Z/p^k : x = eps (mod p)}``
whenever ``eps^2 = -1 (mod p)``.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .report import VerificationReport
from .scalars import ModRing, NonUnit, RingDescriptor, RingElement, RingKind, is_prime
from .tensorspace import _digits

__all__ = [
    "SetSolution3",
    "ReductionSpec",
    "InvalidSpec",
    "ClosureViolation",
    "SingularDenominator",
    "TE_LHS",
    "TE_RHS",
    "check_stte",
    "electric_map",
    "check_fte_electric",
    "build_reduction",
    "valid_epsilons",
]

# Slots of the six-fold product, as applied in time order (first applied first).
# Operator product Phi_123 Phi_145 Phi_246 Phi_356 acts with Phi_356 first.
TE_LHS = ((2, 4, 5), (1, 3, 5), (0, 3, 4), (0, 1, 2))
TE_RHS = ((0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5))

RESAMPLE_CAP = 1000


class InvalidSpec(ValueError):
    pass


class ClosureViolation(ArithmeticError):
    pass


class SingularDenominator(NonUnit):
    """``x + z + xyz`` is not invertible."""

    def __init__(self, value: RingElement):
        super().__init__(f"denominator x+z+xyz = {value}", value.ring)
        self.value = value


class SetSolution3:
    """A map ``X^3 -> X^3`` on colors ``0..n-1``.

    ``images[x*n*n + y*n + z]`` is the image triple of ``(x, y, z)``.
    """

    def __init__(self, set_size: int, images):
        images = np.asarray(images, dtype=np.int64).reshape(set_size**3, 3)
        if images.size and (images.min() < 0 or images.max() >= set_size):
            raise ValueError("images must be colors in range(set_size)")
        images.flags.writeable = False
        self.set_size = set_size
        self.images = images

    @classmethod
    def from_function(cls, set_size: int, f: Callable[[int, int, int], Sequence[int]]) -> "SetSolution3":
        rows = [f(x, y, z) for x, y, z in itertools.product(range(set_size), repeat=3)]
        return cls(set_size, rows)

    @classmethod
    def identity(cls, set_size: int) -> "SetSolution3":
        return cls.from_function(set_size, lambda x, y, z: (x, y, z))

    def __call__(self, x: int, y: int, z: int) -> tuple:
        n = self.set_size
        return tuple(int(v) for v in self.images[(x * n + y) * n + z])

    @property
    def flat(self) -> np.ndarray:
        """Image of each flattened triple as a flattened triple."""
        n = self.set_size
        return self.images @ np.array([n * n, n, 1], dtype=np.int64)

    @property
    def is_bijective(self) -> bool:
        return len(np.unique(self.flat)) == self.set_size**3

    def apply(self, tuples: np.ndarray, slots: Sequence[int]) -> np.ndarray:
        """Apply to the given slots of every row of ``tuples`` (vectorized)."""
        n = self.set_size
        slots = list(slots)
        idx = (tuples[:, slots[0]] * n + tuples[:, slots[1]]) * n + tuples[:, slots[2]]
        out = tuples.copy()
        out[:, slots] = self.images[idx]
        return out

    def __eq__(self, other):
        return isinstance(other, SetSolution3) and self.set_size == other.set_size and np.array_equal(self.images, other.images)

    def __repr__(self):
        return f"SetSolution3(set_size={self.set_size}, bijective={self.is_bijective})"

    def to_json(self) -> dict:
        return {"set_size": self.set_size, "map": self.images.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "SetSolution3":
        n = int(obj["set_size"])
        rows = obj["map"]
        if len(rows) != n**3 or any(len(r) != 3 for r in rows):
            raise ValueError(f"map must have {n**3} rows of 3 colors")
        return cls(n, rows)


def _run(phi: SetSolution3, tuples: np.ndarray, order) -> np.ndarray:
    for slots in order:
        tuples = phi.apply(tuples, slots)
    return tuples


def check_stte(phi: SetSolution3) -> VerificationReport:
    """Exhaustively test the set-theoretic tetrahedral equation on ``X^6``."""
    start = time.perf_counter()
    tuples = _digits(6, phi.set_size)
    lhs = _run(phi, tuples, TE_LHS)
    rhs = _run(phi, tuples, TE_RHS)
    bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
    params = {"set_size": phi.set_size, "tuples": int(len(tuples))}
    if len(bad) == 0:
        return VerificationReport("stte", params, True, elapsed=time.perf_counter() - start)
    i = bad[0]
    witness = {"tuple": tuples[i].tolist(), "lhs": lhs[i].tolist(), "rhs": rhs[i].tolist(), "failures": int(len(bad))}
    return VerificationReport("stte", params, False, witness, residual=str(len(bad)), elapsed=time.perf_counter() - start)


def electric_map(x: RingElement, y: RingElement, z: RingElement) -> tuple:
    """``(xy/D, D, yz/D)`` with ``D = x + z + xyz``."""
    den = x + z + x * y * z
    if not den.is_unit():
        raise SingularDenominator(den)
    inv = den.invert()
    return (x * y * inv, den, y * z * inv)


def _electric_sequence(values: list, order) -> list:
    values = list(values)
    for a, b, c in order:
        values[a], values[b], values[c] = electric_map(values[a], values[b], values[c])
    return values


def _sample(ring: RingDescriptor, rng: np.random.Generator) -> RingElement:
    if ring.kind is RingKind.RATIONAL:
        num = int(rng.integers(-9, 10))
        den = int(rng.integers(1, 10))
        return ring.element(Fraction(num, den))
    if ring.is_modular:
        return ring.element(int(rng.integers(0, ring.modulus)))
    re, im = rng.uniform(-2, 2, size=2)
    return ring.element(complex(re, im))


def check_fte_electric(
    ring: RingDescriptor,
    samples: int = 100,
    seed: int = 0,
    domain: Sequence | None = None,
) -> VerificationReport:
    """Check both sides of the functional tetrahedral equation for the electric map.

    With ``domain`` given, all six-tuples from ``domain`` are checked
    exhaustively and ``samples`` is ignored.  Otherwise ``samples`` random
    six-tuples are drawn from a Philox stream seeded by ``seed``; draws hitting
    a singular denominator are redrawn, at most ``RESAMPLE_CAP`` times in total.
    """
    start = time.perf_counter()
    if domain is not None:
        elems = [ring.element(v) for v in domain]
        candidates = itertools.product(elems, repeat=6)
        params = {"ring": ring.to_json(), "domain_size": len(elems), "exhaustive": True}
        limit = None
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        candidates = ([_sample(ring, rng) for _ in range(6)] for _ in itertools.count())
        params = {"ring": ring.to_json(), "samples": samples, "seed": seed}
        limit = samples
    checked = resampled = 0
    for tup in candidates:
        if limit is not None and checked >= limit:
            break
        try:
            lhs = _electric_sequence(tup, TE_LHS)
            rhs = _electric_sequence(tup, TE_RHS)
        except SingularDenominator as exc:
            if domain is not None:
                witness = {"tuple": [v.to_json() for v in tup], "singular": exc.value.to_json()}
                return VerificationReport("fte_electric", params, False, witness, residual="singular", elapsed=time.perf_counter() - start)
            resampled += 1
            if resampled > RESAMPLE_CAP:
                params["resampled"] = resampled
                return VerificationReport(
                    "fte_electric", params, False, {"error": "resample cap exceeded"}, residual="singular", elapsed=time.perf_counter() - start
                )
            continue
        checked += 1
        if any(a != b for a, b in zip(lhs, rhs)):
            witness = {
                "tuple": [v.to_json() for v in tup],
                "lhs": [v.to_json() for v in lhs],
                "rhs": [v.to_json() for v in rhs],
            }
            return VerificationReport("fte_electric", params, False, witness, residual="nonzero", elapsed=time.perf_counter() - start)
    params["checked"] = checked
    params["resampled"] = resampled
    return VerificationReport("fte_electric", params, True, elapsed=time.perf_counter() - start)


@dataclass(frozen=True)
class ReductionSpec:
    p: int
    k: int
    epsilon: int

    def __post_init__(self):
        p, k, eps = self.p, self.k, self.epsilon
        if not is_prime(p) or not (p == 2 or p % 4 == 1):
            raise InvalidSpec(f"p must be 2 or a prime = 1 (mod 4), got {p}")
        if k < 2:
            raise InvalidSpec(f"k must be >= 2, got {k}")
        if not 0 <= eps < p or (eps * eps + 1) % p:
            raise InvalidSpec(f"epsilon={eps} is not a square root of -1 modulo {p}")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "epsilon": self.epsilon}

    @classmethod
    def from_json(cls, obj: dict) -> "ReductionSpec":
        return cls(int(obj["p"]), int(obj["k"]), int(obj["epsilon"]))


def valid_epsilons(p: int) -> list:
    """Residues ``e`` mod ``p`` with ``e^2 = -1``."""
    return [e for e in range(p) if (e * e + 1) % p == 0]


def build_reduction(spec: ReductionSpec) -> tuple:
    """Restrict the electric map to ``X = {x : x = eps mod p}`` in ``Z/p^k``.

    Returns ``(solution, colors)`` where ``colors[i]`` is the residue of color ``i``.
    """
    m = spec.modulus
    ring = ModRing(m)
    colors = [x for x in range(m) if x % spec.p == spec.epsilon]
    index = {x: i for i, x in enumerate(colors)}
    rows = []
    for x, y, z in itertools.product(colors, repeat=3):
        try:
            out = electric_map(ring.element(x), ring.element(y), ring.element(z))
        except SingularDenominator as exc:
            raise ClosureViolation(f"denominator {exc.value} at {(x, y, z)} is not a unit") from None
        vals = [int(v.value) for v in out]
        if any(v not in index for v in vals):
            raise ClosureViolation(f"electric map sends {(x, y, z)} to {tuple(vals)} outside X")
        rows.append([index[v] for v in vals])
    return SetSolution3(len(colors), rows), colors
