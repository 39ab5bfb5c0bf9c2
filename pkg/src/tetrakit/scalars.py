"""Scalar rings used as coefficient domains for every operator.

Four rings are supported: the rationals, residue rings ``Z/mZ``, prime
fields ``GF(p)`` and a tolerance-based complex float ring.  A
:class:`RingDescriptor` knows how to do arithmetic on *raw payloads*
(``Fraction``/``int`` for rationals, canonical ``int`` residues for modular
rings, ``complex`` for floats); :class:`RingElement` pairs a payload with its
ring for the public scalar API.

Operators keep their entries as raw payloads inside numpy object arrays, so
the array helpers at the bottom of this module (:meth:`RingDescriptor.matmul`
and friends) are the hot path.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

__all__ = [
    "RingError",
    "RingMismatch",
    "NonUnit",
    "RingKind",
    "RingDescriptor",
    "RingElement",
    "Rational",
    "ModRing",
    "PrimeField",
    "ComplexFloat",
    "QQ",
    "is_prime",
]

_INT64_SAFE = 2**62


class RingError(ValueError):
    pass


class RingMismatch(RingError):
    pass


class NonUnit(RingError, ZeroDivisionError):
    """Raised when inverting an element that is not a unit."""

    def __init__(self, element: Any, ring: "RingDescriptor | None" = None):
        self.element = element
        self.ring = ring
        where = f" in {ring}" if ring is not None else ""
        super().__init__(f"{element!r} is not a unit{where}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_prime_powers(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization ``n = prod p**e``."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


class RingKind(enum.Enum):
    RATIONAL = "rational"
    MOD = "mod"
    PRIME_FIELD = "prime_field"
    COMPLEX = "complex"


@dataclass(frozen=True)
class RingDescriptor:
    kind: RingKind
    modulus: int = 0
    tolerance: float = 0.0

    def __post_init__(self):
        if self.kind is RingKind.MOD:
            if not isinstance(self.modulus, int) or self.modulus < 2:
                raise RingError(f"ModRing modulus must be >= 2, got {self.modulus!r}")
        elif self.kind is RingKind.PRIME_FIELD:
            if not is_prime(self.modulus):
                raise RingError(f"PrimeField requires a prime, got {self.modulus!r}")
        elif self.kind is RingKind.COMPLEX:
            if not self.tolerance > 0:
                raise RingError("ComplexFloat tolerance must be > 0")
        elif self.modulus or self.tolerance:
            raise RingError("Rational ring takes no parameters")

    def __str__(self):
        if self.kind is RingKind.RATIONAL:
            return "QQ"
        if self.kind is RingKind.MOD:
            return f"Z/{self.modulus}"
        if self.kind is RingKind.PRIME_FIELD:
            return f"GF({self.modulus})"
        return f"CC(tol={self.tolerance:g})"

    # -- classification ---------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.kind is not RingKind.COMPLEX

    @property
    def is_modular(self) -> bool:
        return self.kind in (RingKind.MOD, RingKind.PRIME_FIELD)

    @property
    def is_field(self) -> bool:
        return self.kind is not RingKind.MOD or is_prime(self.modulus)

    # -- payload arithmetic -------------------------------------------------
    def coerce(self, value: Any) -> Any:
        """Turn an int/Fraction/str/complex/RingElement into a canonical payload."""
        if isinstance(value, RingElement):
            if value.ring != self:
                raise RingMismatch(f"{value.ring} element used in {self}")
            return value.value
        k = self.kind
        if k is RingKind.RATIONAL:
            if isinstance(value, (bool, np.bool_)):
                value = int(value)
            if isinstance(value, (int, np.integer)):
                return Fraction(int(value))
            if isinstance(value, (Fraction, str)):
                return Fraction(value)
            raise RingError(f"cannot coerce {value!r} into {self}")
        if self.is_modular:
            if isinstance(value, (int, np.integer)):
                return int(value) % self.modulus
            if isinstance(value, Fraction):
                num = value.numerator % self.modulus
                return num * self.invert(value.denominator % self.modulus) % self.modulus
            if isinstance(value, str):
                return self.coerce(Fraction(value))
            raise RingError(f"cannot coerce {value!r} into {self}")
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        return complex(value)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        r = a + b
        return r % self.modulus if self.is_modular else r

    def sub(self, a, b):
        r = a - b
        return r % self.modulus if self.is_modular else r

    def mul(self, a, b):
        r = a * b
        return r % self.modulus if self.is_modular else r

    def neg(self, a):
        return (-a) % self.modulus if self.is_modular else -a

    def is_zero(self, a) -> bool:
        if self.kind is RingKind.COMPLEX:
            return abs(a.real) <= self.tolerance and abs(a.imag) <= self.tolerance
        return a == 0

    def equal(self, a, b) -> bool:
        if self.kind is RingKind.COMPLEX:
            return abs(a.real - b.real) <= self.tolerance and abs(a.imag - b.imag) <= self.tolerance
        return a == b

    def is_unit(self, a) -> bool:
        if self.is_modular:
            return math.gcd(a, self.modulus) == 1
        return not self.is_zero(a)

    def invert(self, a):
        if not self.is_unit(a):
            raise NonUnit(self.format(a), self)
        if self.is_modular:
            return pow(a, -1, self.modulus)
        if self.kind is RingKind.RATIONAL:
            return 1 / Fraction(a)
        return 1 / a

    def power(self, a, s: int):
        if s < 0:
            return self.power(self.invert(a), -s)
        if self.is_modular:
            return pow(a, s, self.modulus)
        return a**s

    def abs_value(self, a) -> Any:
        """Magnitude used in residual reports (exact for rationals)."""
        if self.kind is RingKind.RATIONAL:
            return abs(Fraction(a))
        if self.is_modular:
            return a
        return abs(a)

    # -- serialization ----------------------------------------------------------
    def format(self, a) -> Any:
        if self.kind is RingKind.RATIONAL:
            f = Fraction(a)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        if self.is_modular:
            return int(a)
        return [a.real, a.imag]

    def parse(self, raw: Any):
        if self.kind is RingKind.COMPLEX and isinstance(raw, (list, tuple)):
            return complex(raw[0], raw[1])
        return self.coerce(raw)

    def to_json(self) -> dict:
        if self.kind is RingKind.RATIONAL:
            return {"ring": "rational"}
        if self.kind is RingKind.MOD:
            return {"ring": "mod", "modulus": self.modulus}
        if self.kind is RingKind.PRIME_FIELD:
            return {"ring": "prime_field", "p": self.modulus}
        return {"ring": "complex", "tolerance": self.tolerance}

    @classmethod
    def from_json(cls, obj: dict) -> "RingDescriptor":
        try:
            tag = obj["ring"]
            if tag == "rational":
                return Rational()
            if tag == "mod":
                return ModRing(int(obj["modulus"]))
            if tag == "prime_field":
                return PrimeField(int(obj["p"]))
            if tag == "complex":
                return ComplexFloat(float(obj["tolerance"]))
        except (KeyError, TypeError) as exc:
            raise RingError(f"malformed ring descriptor {obj!r}") from exc
        raise RingError(f"unknown ring tag {tag!r}")

    def element(self, value: Any) -> "RingElement":
        return RingElement(self, self.coerce(value))

    # -- array helpers (object arrays of payloads) ---------------------------------
    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            flat[i] = self.coerce(v)
        return arr

    def reduce_array(self, arr: np.ndarray) -> np.ndarray:
        if self.is_modular:
            return arr % self.modulus
        return arr

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(self.zero)
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def array_is_zero(self, arr: np.ndarray) -> bool:
        if arr.size == 0:
            return True
        if self.kind is RingKind.COMPLEX:
            c = arr.astype(complex)
            return bool(np.all(np.abs(c.real) <= self.tolerance) and np.all(np.abs(c.imag) <= self.tolerance))
        return not np.any(arr != 0)

    def array_nonzero_mask(self, arr: np.ndarray) -> np.ndarray:
        if self.kind is RingKind.COMPLEX:
            c = arr.astype(complex)
            return (np.abs(c.real) > self.tolerance) | (np.abs(c.imag) > self.tolerance)
        return (arr != 0).astype(bool)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact matrix product of two object arrays of payloads."""
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        if self.kind is RingKind.COMPLEX:
            return (a.astype(complex) @ b.astype(complex)).astype(object)
        if self.is_modular:
            m = self.modulus
            if m * m * a.shape[1] < _INT64_SAFE:
                prod = a.astype(np.int64) @ b.astype(np.int64)
                return (prod % m).astype(object)
            return (a.dot(b)) % m
        return _rational_matmul(a, b)


def _common_denominator(arr: np.ndarray) -> int:
    dens = {x.denominator for x in arr.flat if x.denominator != 1}
    return math.lcm(*dens) if dens else 1


def _scaled_integers(arr: np.ndarray, den: int) -> np.ndarray:
    if den == 1:
        return np.frompyfunc(int, 1, 1)(arr)
    return np.frompyfunc(lambda x: x.numerator * (den // x.denominator), 1, 1)(arr)


def _max_abs(arr: np.ndarray) -> int:
    return max((abs(int(v)) for v in arr.flat), default=0)


def _rational_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    da, db = _common_denominator(a), _common_denominator(b)
    ia, ib = _scaled_integers(a, da), _scaled_integers(b, db)
    bound = _max_abs(ia) * _max_abs(ib) * a.shape[1]
    if bound < _INT64_SAFE:
        prod = (ia.astype(np.int64) @ ib.astype(np.int64)).astype(object)
    else:
        prod = ia.dot(ib)
    den = da * db
    if den == 1:
        return np.frompyfunc(Fraction, 1, 1)(prod)
    return np.frompyfunc(lambda v: Fraction(v, den), 1, 1)(prod)


def Rational() -> RingDescriptor:
    return RingDescriptor(RingKind.RATIONAL)


def ModRing(modulus: int) -> RingDescriptor:
    return RingDescriptor(RingKind.MOD, modulus=modulus)


def PrimeField(p: int) -> RingDescriptor:
    return RingDescriptor(RingKind.PRIME_FIELD, modulus=p)


def ComplexFloat(tolerance: float = 1e-9) -> RingDescriptor:
    return RingDescriptor(RingKind.COMPLEX, tolerance=tolerance)


QQ = Rational()


@dataclass(frozen=True, eq=False)
class RingElement:
    """An immutable scalar tagged with its ring."""

    ring: RingDescriptor
    value: Any

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.coerce(self.value))

    def _other(self, other) -> Any:
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingMismatch(f"cannot combine {self.ring} and {other.ring}")
            return other.value
        return self.ring.coerce(other)

    def __add__(self, other):
        return RingElement(self.ring, self.ring.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.ring, self.ring.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return RingElement(self.ring, self.ring.sub(self._other(other), self.value))

    def __mul__(self, other):
        return RingElement(self.ring, self.ring.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def __truediv__(self, other):
        return self * RingElement(self.ring, self._other(other)).invert()

    def __rtruediv__(self, other):
        return RingElement(self.ring, self._other(other)) * self.invert()

    def __pow__(self, s: int):
        return RingElement(self.ring, self.ring.power(self.value, int(s)))

    def invert(self) -> "RingElement":
        return RingElement(self.ring, self.ring.invert(self.value))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def __eq__(self, other):
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingMismatch(f"cannot compare {self.ring} and {other.ring}")
            return self.ring.equal(self.value, other.value)
        try:
            return self.ring.equal(self.value, self.ring.coerce(other))
        except RingError:
            return NotImplemented

    def __hash__(self):
        if not self.ring.is_exact:
            raise TypeError("complex float elements are unhashable")
        return hash((self.ring, self.value))

    def __repr__(self):
        return f"RingElement({self.ring}, {self.ring.format(self.value)!r})"

    def __str__(self):
        return str(self.ring.format(self.value))

    def to_json(self):
        return self.ring.format(self.value)
