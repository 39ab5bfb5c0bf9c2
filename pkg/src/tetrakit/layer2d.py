"""Layer products of a tetrahedral solution and the two commuting families.

A solution ``Phi`` on ``V^{(x)3}`` is placed on named factors.  One layer of a
``K x M`` lattice uses horizontal lines ``i_1..i_K`` and ``j_1..j_M`` and
quantum sites ``l_st``:

    Phi_{(i)*(j)} = prod_{s asc} prod_{t asc} Phi_{i_s l_st j_t}

(leftmost factor written first; the rightmost acts first on vectors).
Stacking layers with twisted links between consecutive ``(j)`` lines gives
the row family ``I_{0,k}``; links between ``(i)`` lines give the column family
``I_{n,0}``.  Every member is a trace over all horizontal and link factors,
leaving an operator on the ``K*M`` quantum sites.

Twisted solutions::

    L:       P_12 Phi      Ltilde:  P_23 Phi
    R:       Phi P_23      Rtilde:  Phi P_12

Double products in the commutativity argument follow one convention: the
outer index runs as written first, the inner index second, e.g.
``alpha ascending, beta descending`` for the left conjugator.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

from .chain1d import LaxOperator
from .report import VerificationReport, combine, compare_operators
from .tensorspace import (
    NotInvertible,
    ShapeMismatch,
    TensorOperator,
    commutator,
    factor_permutation,
    ordered_product,
    partial_trace,
)

__all__ = [
    "LayerShape",
    "TwistKind",
    "Side",
    "FamilySpec",
    "DerivedR",
    "Sites",
    "TWISTED_IDENTITIES",
    "twist",
    "check_te",
    "check_word_identity",
    "check_twisted_identities",
    "build_layer",
    "layer_labels",
    "check_lemma5",
    "derive_R",
    "derive_L",
    "build_family",
    "check_genericity",
    "check_theorem",
    "check_proof_lemmas",
    "proof_objects",
    "probe_joint_family",
]


@dataclass(frozen=True)
class LayerShape:
    K: int
    M: int
    dim: int

    def __post_init__(self):
        if self.K < 1 or self.M < 1 or self.dim < 1:
            raise ValueError(f"layer sizes must be positive, got K={self.K}, M={self.M}, dim={self.dim}")

    @property
    def sites(self) -> int:
        return self.K * self.M


class TwistKind(enum.Enum):
    NONE = "none"
    L = "L"
    LTILDE = "Ltilde"
    R = "R"
    RTILDE = "Rtilde"


class Side(enum.Enum):
    ROW = "row"  # I_{0,k}: links s_m between consecutive (j) lines
    COLUMN = "column"  # I_{n,0}: links t_m between consecutive (i) lines


def _swap(dim, a, b, ring):
    sigma = [0, 1, 2]
    sigma[a], sigma[b] = sigma[b], sigma[a]
    return factor_permutation(dim, sigma, ring)


def twist(phi: TensorOperator, kind: TwistKind) -> TensorOperator:
    if phi.n != 3:
        raise ShapeMismatch(f"twists need an operator on three factors, got {phi.n}")
    kind = TwistKind(kind)
    d, ring = phi.dim, phi.ring
    if kind is TwistKind.NONE:
        return phi
    if kind is TwistKind.L:
        return _swap(d, 0, 1, ring) @ phi
    if kind is TwistKind.LTILDE:
        return _swap(d, 1, 2, ring) @ phi
    if kind is TwistKind.R:
        return phi @ _swap(d, 1, 2, ring)
    return phi @ _swap(d, 0, 1, ring)


class Sites:
    """Named tensor factors, all of dimension ``dim``, in a fixed order."""

    def __init__(self, labels: Sequence, dim: int, ring):
        self.labels = list(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate site labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.dim = dim
        self.ring = ring

    @property
    def n(self) -> int:
        return len(self.labels)

    def product(self, word: Sequence) -> TensorOperator:
        """``word`` is a list of ``(op, labels)``; the first entry is leftmost."""
        placed = [(op, tuple(self.index[lab] for lab in labs)) for op, labs in word]
        return ordered_product(self.n, placed, dim=self.dim, ring=self.ring)

    def trace(self, op: TensorOperator, keep: Sequence) -> TensorOperator:
        """Trace out every factor not in ``keep``; the result is ordered as ``keep``."""
        keep = list(keep)
        over = [i for i, lab in enumerate(self.labels) if lab not in keep]
        out = partial_trace(op, over)
        remaining = [lab for lab in self.labels if lab in keep]
        if remaining == keep:
            return out
        sigma = [keep.index(lab) for lab in remaining]
        perm = factor_permutation(self.dim, sigma, self.ring)
        return perm @ out @ perm.inverse()


# -- tetrahedral and twisted identities ---------------------------------------------------

_TE_LHS = [("none", (0, 1, 2)), ("none", (0, 3, 4)), ("none", (1, 3, 5)), ("none", (2, 4, 5))]
_TE_RHS = list(reversed(_TE_LHS))

# Each identity is (lhs, rhs); a word lists (twist, slots) left to right on V^{(x)6}.
# For LR-- the six slots are alpha, beta, gamma, 1, 2, 3 in that order.
TWISTED_IDENTITIES = {
    "L--R": (
        [("L", (0, 1, 2)), ("none", (0, 3, 4)), ("none", (1, 3, 5)), ("R", (2, 4, 5))],
        [("R", (2, 4, 5)), ("none", (0, 3, 4)), ("none", (1, 3, 5)), ("L", (0, 1, 2))],
    ),
    "LR--": (
        [("Ltilde", (0, 1, 2)), ("R", (0, 3, 4)), ("none", (1, 4, 5)), ("none", (2, 3, 5))],
        [("none", (1, 4, 5)), ("none", (2, 3, 5)), ("R", (0, 3, 4)), ("Ltilde", (0, 1, 2))],
    ),
    "RRLL": (
        [("R", (0, 3, 4)), ("R", (0, 1, 2)), ("L", (2, 4, 5)), ("L", (1, 3, 5))],
        [("L", (2, 4, 5)), ("L", (1, 3, 5)), ("R", (0, 3, 4)), ("R", (0, 1, 2))],
    ),
    "tRRLL": (
        [("Ltilde", (0, 1, 2)), ("Ltilde", (0, 3, 4)), ("Rtilde", (1, 3, 5)), ("Rtilde", (2, 4, 5))],
        [("Rtilde", (1, 3, 5)), ("Rtilde", (2, 4, 5)), ("Ltilde", (0, 1, 2)), ("Ltilde", (0, 3, 4))],
    ),
}


def _word_op(phi: TensorOperator, word) -> TensorOperator:
    cache = {}
    placed = []
    for kind, slots in word:
        if kind not in cache:
            cache[kind] = twist(phi, TwistKind(kind))
        placed.append((cache[kind], slots))
    return ordered_product(6, placed)


def check_word_identity(phi: TensorOperator, name: str, lhs, rhs) -> VerificationReport:
    """Compare two words of (possibly twisted) copies of ``phi`` on ``V^{(x)6}``."""
    if phi.n != 3:
        raise ShapeMismatch(f"expected an operator on three factors, got {phi.n}")
    return compare_operators(name, {"dim": phi.dim}, _word_op(phi, lhs), _word_op(phi, rhs))


def check_te(phi: TensorOperator) -> VerificationReport:
    """``Phi_123 Phi_145 Phi_246 Phi_356 = Phi_356 Phi_246 Phi_145 Phi_123`` on ``V^{(x)6}``."""
    return check_word_identity(phi, "te", _TE_LHS, _TE_RHS)


def check_twisted_identities(phi: TensorOperator) -> VerificationReport:
    parts = [check_word_identity(phi, name, lhs, rhs) for name, (lhs, rhs) in TWISTED_IDENTITIES.items()]
    return combine("twisted_identities", {"dim": phi.dim}, parts)


# -- layers --------------------------------------------------------------------------------


def _line(prefix, copy, count):
    return [(prefix, copy, a) for a in range(count)]


def _qsites(layer: LayerShape):
    return [("l", s, t) for s in range(layer.K) for t in range(layer.M)]


def _layer_word(phi, layer: LayerShape, ilab, jlab):
    return [(phi, (ilab[s], ("l", s, t), jlab[t])) for s in range(layer.K) for t in range(layer.M)]


def layer_labels(layer: LayerShape) -> list:
    """Factor order of :func:`build_layer`: ``(i)``, then ``l`` row-major, then ``(j)``."""
    return _line("i", 0, layer.K) + _qsites(layer) + _line("j", 0, layer.M)


def build_layer(phi: TensorOperator, layer: LayerShape) -> TensorOperator:
    """``Phi_{(i)*(j)}`` on the factors listed by :func:`layer_labels`."""
    _check_layer(phi, layer)
    sites = Sites(layer_labels(layer), phi.dim, phi.ring)
    return sites.product(_layer_word(phi, layer, _line("i", 0, layer.K), _line("j", 0, layer.M)))


def _check_layer(phi, layer):
    if phi.n != 3:
        raise ShapeMismatch(f"expected an operator on three factors, got {phi.n}")
    if phi.dim != layer.dim:
        raise ShapeMismatch(f"operator has dim {phi.dim}, layer expects {layer.dim}")


def _first_slot(phi, a, fam_i, fam_j):
    """``Phi_{a (i)(j)} = prod_s Phi_{a i_s j_s}``."""
    return [(phi, (a, x, y)) for x, y in zip(fam_i, fam_j)]


def _last_slot(phi, fam_i, fam_j, a):
    """``Phi_{(i)(j) a} = prod_s Phi_{i_s j_s a}``."""
    return [(phi, (x, y, a)) for x, y in zip(fam_i, fam_j)]


def check_lemma5(phi: TensorOperator, layer: LayerShape, length: int | None = None) -> VerificationReport:
    """The three layer-level consequences of the tetrahedral equation.

    The first two use index families of ``length`` factors (default ``K``);
    the third uses two layers of shape ``K x M`` sharing their quantum sites.
    """
    _check_layer(phi, layer)
    d, ring = phi.dim, phi.ring
    n = layer.K if length is None else length
    fi, fj, fl = _line("i", 0, n), _line("j", 0, n), _line("l", 0, n)
    sites = Sites(["1", "2", "3"] + fi + fj + fl, d, ring)
    params = {"length": n, "K": layer.K, "M": layer.M, "dim": d}

    a1 = _first_slot(phi, "1", fi, fj)
    a2 = _first_slot(phi, "2", fi, fl)
    a3 = _first_slot(phi, "3", fj, fl)
    top = [(phi, ("1", "2", "3"))]
    cons = compare_operators("cons", params, sites.product(top + a1 + a2 + a3), sites.product(a3 + a2 + a1 + top))

    b1 = _last_slot(phi, fi, fj, "1")
    b2 = _last_slot(phi, fi, fl, "2")
    b3 = _last_slot(phi, fj, fl, "3")
    cons2 = compare_operators("cons2", params, sites.product(b1 + b2 + b3 + top), sites.product(top + b3 + b2 + b1))

    K, M = layer.K, layer.M
    i0, i1 = _line("i", 0, K), _line("i", 1, K)
    j0, j1 = _line("j", 0, M), _line("j", 1, M)
    sites3 = Sites(["0"] + i0 + i1 + j0 + j1 + _qsites(layer), d, ring)
    ii = _last_slot(phi, i0, i1, "0")
    jj = _first_slot(phi, "0", j0, j1)
    lay0 = _layer_word(phi, layer, i0, j0)
    lay1 = _layer_word(phi, layer, i1, j1)
    cons3 = compare_operators("cons3", params, sites3.product(ii + lay0 + lay1 + jj), sites3.product(jj + lay1 + lay0 + ii))
    return combine("lemma5", params, [cons, cons2, cons3])


# -- derived Yang-Baxter data -------------------------------------------------------------


@dataclass(frozen=True)
class DerivedR:
    plain: TensorOperator  # Tr_1 Phi_{1(i)(j)}, a Yang-Baxter solution on blocks (i), (j)
    twisted: TensorOperator  # Tr_1 Phi^R_{1(i)(j)} = plain composed with the block flip


def derive_R(phi: TensorOperator, m: int = 1) -> DerivedR:
    if phi.n != 3:
        raise ShapeMismatch(f"expected an operator on three factors, got {phi.n}")
    fi, fj = _line("i", 0, m), _line("j", 0, m)
    sites = Sites(["a"] + fi + fj, phi.dim, phi.ring)
    keep = fi + fj
    plain = sites.trace(sites.product(_first_slot(phi, "a", fi, fj)), keep)
    twisted = sites.trace(sites.product(_first_slot(twist(phi, TwistKind.R), "a", fi, fj)), keep)
    return DerivedR(plain, twisted)


def derive_L(phi: TensorOperator, layer: LayerShape) -> LaxOperator:
    """``Tr_{(i)} Phi_{(i)*(j)}`` with auxiliary space ``(j)`` and quantum space the sites."""
    _check_layer(phi, layer)
    sites = Sites(layer_labels(layer), phi.dim, phi.ring)
    op = sites.product(_layer_word(phi, layer, _line("i", 0, layer.K), _line("j", 0, layer.M)))
    return LaxOperator(sites.trace(op, _line("j", 0, layer.M) + _qsites(layer)), layer.M)


# -- the two families ------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    phi: TensorOperator
    layer: LayerShape
    k: int
    side: Side = Side.ROW

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"family order must be >= 1, got {self.k}")
        _check_layer(self.phi, self.layer)


def build_family(spec: FamilySpec) -> TensorOperator:
    """``I_{0,k}`` (row side) or ``I_{k,0}`` (column side) on the quantum sites."""
    phi, layer, k = spec.phi, spec.layer, spec.k
    K, M = layer.K, layer.M
    ilines = [_line("i", m, K) for m in range(k)]
    jlines = [_line("j", m, M) for m in range(k)]
    links = [("link", m) for m in range(k - 1)]
    labels = [lab for m in range(k) for lab in ilines[m] + jlines[m]] + links + _qsites(layer)
    sites = Sites(labels, phi.dim, phi.ring)
    word = [f for m in range(k) for f in _layer_word(phi, layer, ilines[m], jlines[m])]
    if spec.side is Side.ROW:
        phi_r = twist(phi, TwistKind.R)
        for m in range(k - 1):
            word += _first_slot(phi_r, links[m], jlines[m], jlines[m + 1])
    else:
        phi_l = twist(phi, TwistKind.L)
        for m in range(k - 1):
            word += _last_slot(phi_l, ilines[m], ilines[m + 1], links[m])
    return sites.trace(sites.product(word), _qsites(layer))


# -- the commutativity argument ------------------------------------------------------------


def proof_objects(phi: TensorOperator, k: int, l: int) -> tuple:
    """Sites and factor words of the commutativity argument at orders ``(k, l)``.

    The layer is minimal (``K = M = 1``): first-family lines ``iA_a, jA_a``
    (``a < k``), second-family lines ``iB_b, jB_b`` (``b < l``), one quantum
    site ``q``, links ``s_a`` (``a < k-1``) and ``t_b`` (``b < l-1``), and
    accessory factors ``p_ab``.  Returns ``(sites, words)`` where ``words``
    maps each object name to its factor list.
    """
    if k < 1 or l < 1:
        raise ValueError("orders must be >= 1")
    iA = [("iA", a) for a in range(k)]
    jA = [("jA", a) for a in range(k)]
    iB = [("iB", b) for b in range(l)]
    jB = [("jB", b) for b in range(l)]
    s = [("s", a) for a in range(k - 1)]
    t = [("t", b) for b in range(l - 1)]
    p = {(a, b): ("p", a, b) for a in range(k) for b in range(l)}
    labels = iA + jA + iB + jB + ["q"] + s + t + list(p.values())
    sites = Sites(labels, phi.dim, phi.ring)

    phi_l, phi_r = twist(phi, TwistKind.L), twist(phi, TwistKind.R)
    phi_lt, phi_rt = twist(phi, TwistKind.LTILDE), twist(phi, TwistKind.RTILDE)
    words = {
        "B_k": [(phi, (iA[a], "q", jA[a])) for a in range(k)],
        "B_l": [(phi, (iB[b], "q", jB[b])) for b in range(l)],
        "R_k": [(phi_r, (s[a], jA[a], jA[a + 1])) for a in range(k - 1)],
        "L_l": [(phi_l, (iB[b], iB[b + 1], t[b])) for b in range(l - 1)],
        # alpha ascending outside, beta descending inside
        "A_L": [(phi, (iA[a], iB[b], p[a, b])) for a in range(k) for b in reversed(range(l))],
        # beta ascending outside, alpha descending inside
        "A_R": [(phi, (p[a, b], jA[a], jB[b])) for b in range(l) for a in reversed(range(k))],
        # a factor whose p-index leaves the grid is dropped
        "Phi_p": [(phi_lt, (s[a], p[a + 1, b], p[a, b])) for a in range(k - 1) for b in reversed(range(l))],
        "Phi_p*": [(phi_rt, (p[a, b + 1], p[a, b], t[b])) for b in range(l - 1) for a in reversed(range(k))],
    }
    return sites, words


def _w(words, *names):
    return [f for name in names for f in words[name]]


def check_proof_lemmas(phi: TensorOperator, k: int, l: int) -> VerificationReport:
    """The four exchange lemmas, the end-to-end exchange chain, and the building-block identity."""
    if phi.n != 3:
        raise ShapeMismatch(f"expected an operator on three factors, got {phi.n}")
    sites, w = proof_objects(phi, k, l)
    params = {"k": k, "l": l, "dim": phi.dim}

    def cmp(name, lhs, rhs):
        return compare_operators(name, params, sites.product(_w(w, *lhs)), sites.product(_w(w, *rhs)))

    parts = [
        cmp("l1", ("Phi_p", "R_k", "A_R"), ("A_R", "R_k", "Phi_p")),
        cmp("l2", ("A_L", "B_k", "B_l", "A_R"), ("A_R", "B_l", "B_k", "A_L")),
        cmp("l3", ("Phi_p", "Phi_p*"), ("Phi_p*", "Phi_p")),
        cmp("l4", ("A_L", "L_l", "Phi_p*"), ("Phi_p*", "L_l", "A_L")),
        cmp(
            "chain",
            ("A_L", "Phi_p", "B_k", "B_l", "R_k", "L_l", "A_R", "Phi_p*"),
            ("A_R", "Phi_p*", "B_l", "B_k", "R_k", "L_l", "A_L", "Phi_p"),
        ),
        check_exchange_identity(phi, 1),
    ]
    return combine("proof_lemmas", params, parts)


def check_exchange_identity(phi: TensorOperator, length: int = 1) -> VerificationReport:
    """``Ltilde_{abc} R_{a(i)(j)} Phi_{b(j)(k)} Phi_{c(i)(k)}`` against the reversed word."""
    fi, fj, fk = _line("i", 0, length), _line("j", 0, length), _line("k", 0, length)
    sites = Sites(["a", "b", "c"] + fi + fj + fk, phi.dim, phi.ring)
    top = [(twist(phi, TwistKind.LTILDE), ("a", "b", "c"))]
    ar = _first_slot(twist(phi, TwistKind.R), "a", fi, fj)
    bj = _first_slot(phi, "b", fj, fk)
    ci = _first_slot(phi, "c", fi, fk)
    return compare_operators(
        "exchange", {"length": length, "dim": phi.dim}, sites.product(top + ar + bj + ci), sites.product(bj + ci + ar + top)
    )


def genericity_operator(phi: TensorOperator, k: int, l: int) -> TensorOperator:
    """``Tr_p (A_R Phi_p*)`` on the factors ``jA..., jB..., t...``."""
    sites, w = proof_objects(phi, k, l)
    keep = [("jA", a) for a in range(k)] + [("jB", b) for b in range(l)] + [("t", b) for b in range(l - 1)]
    # Only p, jA, jB, t are touched; build on that sub-space to keep it small.
    sub = Sites([lab for lab in sites.labels if lab[0] in ("p", "jA", "jB", "t")], phi.dim, phi.ring)
    return sub.trace(sub.product(_w(w, "A_R", "Phi_p*")), keep)


def check_genericity(phi: TensorOperator, k: int, l: int) -> VerificationReport:
    """Invertibility of ``phi`` and of ``Tr_p (A_R Phi_p*)`` at orders ``(k, l)``."""
    phi_ok = phi.is_invertible()
    g = genericity_operator(phi, k, l)
    try:
        g.inverse()
        g_ok = True
    except NotInvertible:
        g_ok = False
    params = {"k": k, "l": l, "dim": phi.dim}
    witness = None if phi_ok and g_ok else {"phi_invertible": phi_ok, "trace_invertible": g_ok}
    return VerificationReport(
        "genericity",
        params,
        phi_ok and g_ok,
        witness,
        extra={"generic": phi_ok and g_ok, "phi_invertible": phi_ok, "trace_invertible": g_ok},
    )


def check_theorem(phi: TensorOperator, layer: LayerShape, k: int, n: int) -> VerificationReport:
    """``[I_{0,k}, I_{n,0}] = 0``; genericity at ``(k, n)`` is reported alongside."""
    row = build_family(FamilySpec(phi, layer, k, Side.ROW))
    col = build_family(FamilySpec(phi, layer, n, Side.COLUMN))
    params = {"k": k, "n": n, "K": layer.K, "M": layer.M, "dim": phi.dim}
    generic = check_genericity(phi, k, n).extra["generic"]
    extra = {"k": k, "n": n, "K": layer.K, "M": layer.M, "generic": generic}
    if not generic:
        extra["note"] = "outside theorem hypotheses"
    return compare_operators("theorem", params, row @ col, col @ row, **extra)


def probe_joint_family(phi: TensorOperator, layer: LayerShape, orders: Sequence[int]) -> dict:
    """Commutators among row and column members up to the given orders; nothing is asserted."""
    members = {}
    for k in orders:
        members[f"I_0,{k}"] = build_family(FamilySpec(phi, layer, k, Side.ROW))
        members[f"I_{k},0"] = build_family(FamilySpec(phi, layer, k, Side.COLUMN))
    out = {}
    for a, b in itertools.combinations(members, 2):
        out[f"[{a}, {b}]"] = commutator(members[a], members[b]).is_zero()
    return out
