"""Verification reports shared by every checker."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .tensorspace import TensorOperator, _digits


@dataclass
class VerificationReport:
    check: str
    params: dict = field(default_factory=dict)
    passed: bool = True
    witness: Any = None
    residual: Any = "0"
    elapsed: float = 0.0
    parts: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "identity": self.check,
            "params": self.params,
            "pass": self.passed,
            "witness": self.witness,
            "max_abs_residual": self.residual,
        }
        out.update(self.extra)
        if self.parts:
            out["parts"] = [p.to_json(timing) for p in self.parts]
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out

    def failures(self) -> list:
        if not self.parts:
            return [] if self.passed else [self]
        return [f for p in self.parts for f in p.failures()]


def combine(check: str, params: dict, parts: list, **extra) -> VerificationReport:
    """A report that passes iff every part passes."""
    failed = [p for p in parts if not p.passed]
    witness = None
    residual = "0"
    if failed:
        witness = {"part": failed[0].check, "witness": failed[0].witness}
        residual = failed[0].residual
    else:
        nonexact = [p.residual for p in parts if not isinstance(p.residual, str)]
        if nonexact:
            residual = max(nonexact)
    return VerificationReport(
        check,
        params,
        passed=not failed,
        witness=witness,
        residual=residual,
        elapsed=sum(p.elapsed for p in parts),
        parts=parts,
        extra=extra,
    )


def _column(op: TensorOperator, i: int, limit: int = 8) -> list:
    fmt = op.ring.format
    if op.is_monomial:
        c = op.coef[i]
        return [] if op.ring.is_zero(c) else [[int(op.perm[i]), fmt(c)]]
    col = op.matrix[:, i]
    nz = np.flatnonzero(op.ring.array_nonzero_mask(col))[:limit]
    return [[int(j), fmt(col[j])] for j in nz]


def _format_residual(op: TensorOperator, value) -> Any:
    if op.ring.is_exact:
        return str(op.ring.format(value))
    return float(value)


def compare_operators(check: str, params: dict, lhs: TensorOperator, rhs: TensorOperator, **extra) -> VerificationReport:
    """Report whether two operators are equal, with a basis-vector witness if not."""
    start = time.perf_counter()
    bad = lhs.differing_inputs(rhs)
    if len(bad) == 0:
        residual = "0" if lhs.ring.is_exact else float(lhs.residual(rhs))
        return VerificationReport(check, params, True, None, residual, time.perf_counter() - start, extra=extra)
    i = int(bad[0])
    witness = {
        "input_index": i,
        "input_digits": [int(x) for x in _digits(lhs.n, lhs.dim)[i]],
        "lhs_image": _column(lhs, i),
        "rhs_image": _column(rhs, i),
        "differing_inputs": int(len(bad)),
    }
    residual = _format_residual(lhs, lhs.residual(rhs))
    return VerificationReport(check, params, False, witness, residual, time.perf_counter() - start, extra=extra)


def check_zero(check: str, params: dict, op: TensorOperator, **extra) -> VerificationReport:
    zero = TensorOperator(op.shape, op.ring, perm=np.arange(op.size), coef=op.ring.zeros(op.size))
    return compare_operators(check, params, op, zero, **extra)
