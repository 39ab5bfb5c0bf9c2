"""Command-line front end.

Every subcommand builds a parameter dict and runs one entry of ``CHECKS``;
a campaign file is a JSON array of ``{"check": name, "params": {...}}`` run
through the same table.  Reports go to stdout as newline-delimited JSON.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on
malformed input.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import chain1d, layer2d, lattice3d
from .cocycle import Cocycle3, check_cocycle, lift_to_matrix, trivial_cocycle
from .report import VerificationReport, combine, compare_operators
from .scalars import QQ, RingDescriptor, RingError
from .settheoretic import (
    ReductionSpec,
    SetSolution3,
    build_reduction,
    check_fte_electric,
    check_stte,
)
from .tensorspace import BudgetExceeded, NotInvertible, TensorOperator, set_dense_budget, transposition

__all__ = ["FleetEntry", "builtin_fleet", "CHECKS", "run_check", "run_campaign", "main"]


class InputError(ValueError):
    """Malformed parameters or input files (exit code 2)."""


@dataclass(frozen=True)
class FleetEntry:
    name: str
    solution: SetSolution3
    cocycle: Cocycle3
    s_values: tuple = (0, 1)
    description: str = ""


_FLEET_SPECS = {
    "identity": None,
    "electric-2-2": ReductionSpec(2, 2, 1),
    "electric-2-3": ReductionSpec(2, 3, 1),
    "electric-5-2": ReductionSpec(5, 2, 2),
}


def builtin_fleet() -> list:
    """Named reproducible solutions, each with the trivial cocycle and ``s`` in ``{0, 1}``."""
    out = []
    for name, spec in _FLEET_SPECS.items():
        if spec is None:
            sol, desc = SetSolution3.identity(2), "identity map on |X|=2"
        else:
            sol, colors = build_reduction(spec)
            desc = f"electric map on residues {colors} mod {spec.modulus}"
        out.append(FleetEntry(name, sol, trivial_cocycle(sol.set_size), (0, 1), desc))
    return out


def _fleet_entry(name: str) -> FleetEntry:
    for entry in builtin_fleet():
        if entry.name == name:
            return entry
    raise InputError(f"unknown fleet member {name!r}; known: {', '.join(_FLEET_SPECS)}")


# -- parameter resolution -----------------------------------------------------------------


def _load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _maybe_file(obj):
    if isinstance(obj, dict) and set(obj) == {"file"}:
        return _load_json(obj["file"])
    return obj


def _ring(params) -> RingDescriptor:
    raw = _maybe_file(params.get("ring"))
    if raw is None:
        return QQ
    try:
        return RingDescriptor.from_json(raw)
    except RingError as exc:
        raise InputError(str(exc)) from None


def _solution(params) -> SetSolution3:
    raw = _maybe_file(params.get("solution", "electric-2-2"))
    if isinstance(raw, str):
        return _fleet_entry(raw).solution
    try:
        return SetSolution3.from_json(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed solution: {exc}") from None


def _cocycle(params, sol: SetSolution3) -> Cocycle3:
    raw = _maybe_file(params.get("cocycle"))
    if raw is None or raw == "trivial":
        return trivial_cocycle(sol.set_size, _ring(params))
    try:
        return Cocycle3.from_json(raw)
    except (KeyError, TypeError, ValueError, RingError) as exc:
        raise InputError(f"malformed cocycle: {exc}") from None


def _operator(params, key="operator") -> TensorOperator | None:
    raw = _maybe_file(params.get(key))
    if raw is None:
        return None
    try:
        return TensorOperator.from_json(raw)
    except (KeyError, TypeError, ValueError, RingError) as exc:
        raise InputError(f"malformed operator: {exc}") from None


def _int(params, key, default):
    value = params.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"parameter {key!r} must be an integer, got {value!r}")
    return value


def _node_operator(params) -> TensorOperator:
    """The matrix solution: an explicit operator, or the lift of solution + cocycle."""
    op = _operator(params)
    if op is not None:
        return op
    sol = _solution(params)
    c = _cocycle(params, sol)
    return lift_to_matrix(sol, c, _int(params, "s", 1), validate=False)


def _lax_data(params) -> tuple:
    """``(r, lax, label)`` for the one-dimensional checks."""
    source = params.get("source", "sl2-chain")
    if source == "sl2-chain":
        r = chain1d.sl2_r_matrix(params.get("q", 2))
        swap = transposition(2)
        flipped_inv = swap @ r.inverse() @ swap
        return chain1d.from_braid(r), chain1d.lax_from_word([r, flipped_inv, r]), source
    if source == "sl2":
        r = chain1d.sl2_r_matrix(params.get("q", 2))
        return chain1d.from_braid(r), chain1d.lax_from_r(r, _int(params, "q_factors", 2)), source
    if source == "derived":
        phi = _node_operator(params)
        shape = layer2d.LayerShape(_int(params, "K", 1), _int(params, "M", 1), phi.dim)
        r = layer2d.derive_R(phi, shape.M).twisted
        return r, layer2d.derive_L(phi, shape), source
    raise InputError(f"unknown one-dimensional source {source!r}")


# -- checks ---------------------------------------------------------------------------------


def _chk_stte(params):
    return check_stte(_solution(params))


def _chk_fte(params):
    domain = params.get("domain")
    return check_fte_electric(_ring(params), _int(params, "samples", 100), _int(params, "seed", 0), domain)


def _chk_reduction(params):
    try:
        spec = ReductionSpec(_int(params, "p", 2), _int(params, "k", 2), _int(params, "epsilon", 1))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sol, colors = build_reduction(spec)
    rep = check_stte(sol)
    rep.check = "reduction"
    rep.params = dict(spec.to_json(), colors=colors)
    return rep


def _chk_cocycle(params):
    sol = _solution(params)
    return check_cocycle(sol, _cocycle(params, sol))


def _chk_te(params):
    return layer2d.check_te(_node_operator(params))


def _chk_identities(params):
    phi = _node_operator(params)
    shape = layer2d.LayerShape(_int(params, "K", 1), _int(params, "M", 1), phi.dim)
    parts = [layer2d.check_twisted_identities(phi), layer2d.check_lemma5(phi, shape)]
    return combine("identities", {"K": shape.K, "M": shape.M, "dim": phi.dim}, parts)


def _chk_ybe(params):
    r = _operator(params)
    if r is None:
        phi = _node_operator(params)
        r = layer2d.derive_R(phi, _int(params, "m", 1)).plain
    parts = [chain1d.check_ybe_matrix(r), chain1d.check_ybe_braid(chain1d.to_braid(r))]
    return combine("ybe", {"dim": r.dim, "factors": r.n}, parts)


def _chk_rll(params):
    r, lax, source = _lax_data(params)
    return chain1d.check_rll(r, lax)


def _commuting(check, params, ops: dict) -> VerificationReport:
    parts = [compare_operators(f"[{a},{b}]", params, ops[a] @ ops[b], ops[b] @ ops[a]) for a, b in itertools.combinations(ops, 2)]
    return combine(check, params, parts)


def _chk_commute_1d(params):
    r, lax, source = _lax_data(params)
    kmax = _int(params, "kmax", 3)
    N = _int(params, "N", 3)
    base = {"source": source, "kmax": kmax, "N": N}
    ik = {f"I_{k}": chain1d.build_Ik(lax, r, k) for k in range(1, kmax + 1)}
    coeffs = {f"c_{j}": c for j, c in enumerate(chain1d.build_Q(lax, r, N))}
    parts = [chain1d.check_rll(r, lax), _commuting("family", base, ik), _commuting("q_coefficients", base, coeffs)]
    invertible = r.is_invertible()
    if r.n == 2 and invertible:
        for k in range(3, kmax + 2):
            parts += [chain1d.check_lemma3(r, k, m) for m in range(1, k - 1)]
            parts.append(chain1d.check_lemma4(r, k))
        for k, l in ((1, 1), (2, 1), (1, 2), (2, 2)):
            parts.append(chain1d.check_conjugator(lax, r, k, l))
    return combine("commute_1d", base, parts, braid_invertible=invertible)


def _chk_lemma3(params):
    r = _operator(params) or chain1d.from_braid(chain1d.sl2_r_matrix(params.get("q", 2)))
    return chain1d.check_lemma3(r, _int(params, "k", 4), _int(params, "m", 1))


def _chk_lemma4(params):
    r = _operator(params) or chain1d.from_braid(chain1d.sl2_r_matrix(params.get("q", 2)))
    return chain1d.check_lemma4(r, _int(params, "k", 4))


def _chk_commute_2d(params):
    phi = _node_operator(params)
    shape = layer2d.LayerShape(_int(params, "K", 1), _int(params, "M", 1), phi.dim)
    kmax = _int(params, "kmax", 3)
    base = {"K": shape.K, "M": shape.M, "kmax": kmax, "dim": phi.dim}
    parts = []
    for side, fmt in ((layer2d.Side.ROW, "I_0,{}"), (layer2d.Side.COLUMN, "I_{},0")):
        fam = {fmt.format(k): layer2d.build_family(layer2d.FamilySpec(phi, shape, k, side)) for k in range(1, kmax + 1)}
        parts.append(_commuting(f"{side.value}_family", base, fam))
    return combine("commute_2d", base, parts)


def _chk_theorem(params):
    phi = _node_operator(params)
    shape = layer2d.LayerShape(_int(params, "K", 1), _int(params, "M", 1), phi.dim)
    return layer2d.check_theorem(phi, shape, _int(params, "k", 2), _int(params, "n", 2))


def _chk_genericity(params):
    return layer2d.check_genericity(_node_operator(params), _int(params, "k", 2), _int(params, "l", 2))


def _chk_proof_lemmas(params):
    return layer2d.check_proof_lemmas(_node_operator(params), _int(params, "k", 2), _int(params, "l", 2))


def _chk_lattice(params):
    sol = _solution(params)
    c = _cocycle(params, sol)
    spec = lattice3d.LatticeSpec(_int(params, "K", 1), _int(params, "L", 1), _int(params, "M", 1), sol.set_size, _int(params, "s", 1))
    z_brute, count = lattice3d.partition_bruteforce(sol, c, spec, _int(params, "budget", lattice3d.ENUMERATION_BUDGET))
    z_transfer = lattice3d.partition_via_transfer(lift_to_matrix(sol, c, spec.s, validate=False), spec)
    equal = z_brute == z_transfer
    extra = {
        "Z_bruteforce": str(z_brute.to_json()),
        "Z_transfer": str(z_transfer.to_json()),
        "equal": equal,
        "admissible_count": count,
    }
    witness = None if equal else {"Z_bruteforce": extra["Z_bruteforce"], "Z_transfer": extra["Z_transfer"]}
    return VerificationReport("lattice", spec.to_json(), equal, witness, "0" if equal else "nonzero", extra=extra)


def _chk_probe(params):
    phi = _node_operator(params)
    shape = layer2d.LayerShape(_int(params, "K", 1), _int(params, "M", 1), phi.dim)
    orders = list(range(1, _int(params, "kmax", 2) + 1))
    found = layer2d.probe_joint_family(phi, shape, orders)
    # informational: never fails
    return VerificationReport("probe", {"K": shape.K, "M": shape.M, "orders": orders}, True, extra={"commuting": found})


CHECKS = {
    "stte": _chk_stte,
    "fte_electric": _chk_fte,
    "reduction": _chk_reduction,
    "cocycle": _chk_cocycle,
    "te": _chk_te,
    "identities": _chk_identities,
    "ybe": _chk_ybe,
    "rll": _chk_rll,
    "commute_1d": _chk_commute_1d,
    "lemma3": _chk_lemma3,
    "lemma4": _chk_lemma4,
    "commute_2d": _chk_commute_2d,
    "theorem": _chk_theorem,
    "genericity": _chk_genericity,
    "proof_lemmas": _chk_proof_lemmas,
    "lattice": _chk_lattice,
    "probe": _chk_probe,
}


def run_check(name: str, params: dict) -> VerificationReport:
    if name not in CHECKS:
        raise InputError(f"unknown check {name!r}")
    if not isinstance(params, dict):
        raise InputError(f"params of {name!r} must be an object")
    return CHECKS[name](params)


def _parse_campaign(obj) -> list:
    if not isinstance(obj, list):
        raise InputError("a campaign is a JSON array of {check, params} objects")
    steps = []
    for i, item in enumerate(obj):
        if not isinstance(item, dict) or "check" not in item:
            raise InputError(f"campaign entry {i} needs a 'check' field")
        if item["check"] not in CHECKS:
            raise InputError(f"campaign entry {i}: unknown check {item['check']!r}")
        steps.append((item["check"], item.get("params", {})))
    return steps


def run_campaign(obj, seed: int | None = None) -> list:
    """Run every entry in order; ``seed`` fills in entries without their own."""
    reports = []
    for name, params in _parse_campaign(obj):
        if seed is not None and "seed" not in params:
            params = dict(params, seed=seed)
        reports.append(run_check(name, params))
    return reports


# -- argument parsing -----------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--ring", metavar="FILE", help="ring descriptor JSON")
    parser.add_argument("--solution", metavar="FILE", help="set-theoretic solution JSON")
    parser.add_argument("--cocycle", metavar="FILE", help="cocycle JSON")
    parser.add_argument("--operator", metavar="FILE", help="operator JSON (overrides solution + cocycle)")
    parser.add_argument("--fleet", metavar="NAME", help="built-in solution by name")
    parser.add_argument("--s", type=int, default=1, help="cocycle exponent")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, help="dense operator budget in entries")
    out = parser.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="one JSON object per line (default)")
    out.add_argument("--pretty", action="store_true", help="indented JSON")
    parser.add_argument("--timing", action="store_true", help="include elapsed seconds in reports")


_SUBCOMMANDS = {
    "check-ybe": ("ybe", "Yang-Baxter checks of an operator or of the derived R", ["m"]),
    "check-te": ("te", "matrix tetrahedral equation", []),
    "check-identities": ("identities", "twisted identities and the layer consequences", ["K", "M"]),
    "electric": (None, "functional equation over a ring, or a finite reduction", []),
    "lift": (None, "print the matrix lift of a solution", []),
    "commute-1d": ("commute_1d", "one-dimensional commuting family and chain lemmas", ["kmax", "N", "K", "M"]),
    "commute-2d": ("commute_2d", "row and column families of a layer", ["K", "M", "kmax"]),
    "theorem": ("theorem", "commutator of row and column family members", ["K", "M", "k", "n"]),
    "genericity": ("genericity", "the genericity condition at orders (k, l)", ["k", "l"]),
    "proof-lemmas": ("proof_lemmas", "exchange lemmas of the commutativity argument", ["k", "l"]),
    "lattice": ("lattice", "partition function two ways", ["K", "L", "M"]),
    "probe": ("probe", "commutators across both families, reported only", ["K", "M", "kmax"]),
    "fleet": (None, "list the built-in solutions", []),
    "campaign": (None, "run a campaign file", []),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tetrakit", description="Exact checks for tetrahedral solutions and their commuting families.")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, (_, help_text, ints) in _SUBCOMMANDS.items():
        p = sub.add_parser(cmd, help=help_text)
        _common(p)
        for key in ints:
            p.add_argument(f"--{key}", type=int, dest=f"opt_{key}")
        if cmd == "electric":
            p.add_argument("--samples", type=int, default=100)
            p.add_argument("--reduce", nargs=3, type=int, metavar=("P", "K", "EPS"), help="build and check the reduction mod P^K")
            p.add_argument("--out", metavar="FILE", help="write the reduced solution here")
        if cmd == "lift":
            p.add_argument("--out", metavar="FILE", help="write the operator here instead of stdout")
        if cmd in ("commute-1d",):
            p.add_argument("--source", choices=["sl2-chain", "sl2", "derived"], default="sl2-chain")
        if cmd == "lattice":
            p.add_argument("--lattice", metavar="FILE", help='JSON {"K":..,"L":..,"M":..,"s":..}')
        if cmd == "campaign":
            p.add_argument("file", help="campaign JSON file")
    return parser


def _params_from_args(args) -> dict:
    params = {"s": args.s, "seed": args.seed}
    if args.ring:
        params["ring"] = _load_json(args.ring)
    if args.fleet:
        params["solution"] = args.fleet
    if args.solution:
        params["solution"] = _load_json(args.solution)
    if args.cocycle:
        params["cocycle"] = _load_json(args.cocycle)
    if args.operator:
        params["operator"] = _load_json(args.operator)
    for key, value in vars(args).items():
        if key.startswith("opt_") and value is not None:
            params[key[4:]] = value
    if getattr(args, "source", None):
        params["source"] = args.source
    return params


def _emit(objs, args, out):
    for obj in objs:
        if args.pretty:
            out.write(json.dumps(obj, indent=2) + "\n")
        else:
            out.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _dispatch(args, out) -> int:
    params = _params_from_args(args)
    if args.budget is not None:
        params["budget"] = args.budget
    cmd = args.command
    if cmd == "fleet":
        rows = []
        for e in builtin_fleet():
            rows.append(
                {
                    "name": e.name,
                    "set_size": e.solution.set_size,
                    "bijective": e.solution.is_bijective,
                    "s_values": list(e.s_values),
                    "description": e.description,
                }
            )
        _emit(rows, args, out)
        return 0
    if cmd == "lift":
        op = _node_operator(params)
        if args.out:
            Path(args.out).write_text(json.dumps(op.to_json()))
        else:
            _emit([op.to_json()], args, out)
        return 0
    if cmd == "campaign":
        reports = run_campaign(_load_json(args.file), seed=args.seed)
    elif cmd == "electric":
        if args.reduce:
            p, k, eps = args.reduce
            rep = run_check("reduction", {"p": p, "k": k, "epsilon": eps})
            if args.out:
                sol, _ = build_reduction(ReductionSpec(p, k, eps))
                Path(args.out).write_text(json.dumps(sol.to_json()))
        else:
            rep = run_check("fte_electric", dict(params, samples=args.samples))
        reports = [rep]
    elif cmd == "lattice":
        if args.lattice:
            spec = _load_json(args.lattice)
            if not isinstance(spec, dict):
                raise InputError("lattice file must be a JSON object")
            params.update(spec)
        reports = [run_check("lattice", params)]
    else:
        reports = [run_check(_SUBCOMMANDS[cmd][0], params)]
    _emit([r.to_json(timing=args.timing) for r in reports], args, out)
    return 0 if all(r.passed for r in reports) else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    previous = set_dense_budget(args.budget) if args.budget is not None else None
    try:
        return _dispatch(args, out)
    except (InputError, RingError, BudgetExceeded, NotInvertible, ValueError) as exc:
        print(f"tetrakit: error: {exc}", file=sys.stderr)
        return 2
    finally:
        if previous is not None:
            set_dense_budget(previous)


if __name__ == "__main__":
    sys.exit(main())
