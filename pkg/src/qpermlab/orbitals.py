"""Orbit, orbital and k-orbital relations of a magic unitary.

Tuples ``(i_k, ..., i_1)`` and ``(j_k, ..., j_1)`` are related when the
monomial ``u_{i_k j_k} ... u_{i_1 j_1}`` is nonzero on the carrier; the
test is operator-norm based with a hard zero/nonzero gap at desk scale.
The relation is an equivalence for k <= 2 (checked numerically, never
assumed) while k = 3 admits transitivity failures that the report scan
collects as witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotEquivalence, TooLarge
from .hopf import HopfData

ZERO_TOL = 1e-9
SUSPICIOUS_LOW = 1e-12
SUSPICIOUS_HIGH = 1e-6
MAX_SCAN_K = 4
MAX_SCAN_SYMBOLS = 6


def monomial_norm(group: HopfData, top: tuple[int, ...], bottom: tuple[int, ...]) -> float:
    """Operator norm of u_{top_1 bottom_1} ... u_{top_k bottom_k}.

    Tuples are given leftmost factor first, i.e. ``top = (i_k, ..., i_1)``
    pairs with ``bottom = (j_k, ..., j_1)`` to form the product as written.
    """
    entries = group.magic.entries
    prod = entries[top[0], bottom[0]]
    for i, j in zip(top[1:], bottom[1:]):
        prod = prod @ entries[i, j]
    return float(np.linalg.norm(prod, 2))


def related(group: HopfData, top, bottom, tol: float = ZERO_TOL) -> tuple[bool, float]:
    """Whether two k-tuples are k-orbital related, with the witness norm."""
    top = tuple(int(x) for x in top)
    bottom = tuple(int(x) for x in bottom)
    if len(top) != len(bottom) or not top:
        raise ValueError("tuples must be nonempty and of equal length")
    if not all(0 <= x < group.n for x in top + bottom):
        raise ValueError(f"tuple entries must lie in 0..{group.n - 1}")
    norm = monomial_norm(group, top, bottom)
    return norm > tol, norm


def _batched_op_norms(mats: np.ndarray) -> np.ndarray:
    return np.linalg.svd(mats, compute_uv=False)[..., 0]


def _all_monomial_norms(group: HopfData, k: int) -> np.ndarray:
    """Norms of every degree-k monomial, indexed by (top tuple, bottom tuple).

    The left factor is applied chunk-wise so memory stays at one
    (n^2)^(k-1)-batch of carrier-sized matrices.
    """
    n, d = group.n, group.ambient_dim
    entries = np.asarray(group.magic.entries)
    flat = entries.reshape(n * n, d, d)
    if k == 1:
        norms = _batched_op_norms(flat)
    else:
        tails = flat
        for _ in range(k - 2):
            tails = np.einsum("aij,bjk->abik", tails.reshape(-1, d, d), flat).reshape(-1, d, d)
        norms = np.empty((n * n, tails.shape[0]))
        for a in range(n * n):
            norms[a] = _batched_op_norms(np.einsum("ij,bjk->bik", flat[a], tails))
        norms = norms.reshape(-1)
    # Axis order along the chain: (i_k, j_k, i_{k-1}, j_{k-1}, ..., i_1, j_1).
    norms = norms.reshape((n, n) * k)
    top_axes = tuple(range(0, 2 * k, 2))
    bottom_axes = tuple(range(1, 2 * k, 2))
    return norms.transpose(top_axes + bottom_axes).reshape(n ** k, n ** k)


def _check_norm_gap(norms: np.ndarray) -> list[float]:
    flagged = norms[(norms > SUSPICIOUS_LOW) & (norms < SUSPICIOUS_HIGH)]
    return sorted(float(x) for x in flagged)


@dataclass(frozen=True, eq=False)
class OrbitalRelation:
    """The full k-orbital relation on tuples, with classes when applicable."""

    k: int
    n: int
    related: np.ndarray          # boolean (n^k, n^k), tuple index = base-n digits
    norms: np.ndarray
    classes: tuple[tuple[tuple[int, ...], ...], ...]
    suspicious_norms: tuple[float, ...]

    def tuple_of_index(self, idx: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.k):
            digits.append(idx % self.n)
            idx //= self.n
        return tuple(reversed(digits))

    def index_of_tuple(self, tup) -> int:
        idx = 0
        for x in tup:
            idx = idx * self.n + int(x)
        return idx


def orbit_classes(group: HopfData, k: int, tol: float = ZERO_TOL) -> OrbitalRelation:
    """Equivalence classes of the k-orbital relation for k in {1, 2}.

    Verifies reflexivity, symmetry and transitivity numerically; a failed
    transitivity check at k <= 2 indicates a tolerance bug and raises
    :class:`NotEquivalence` with the violating triple.
    """
    if k not in (1, 2):
        raise ValueError("classes are computed for k in {1, 2}")
    norms = _all_monomial_norms(group, k)
    rel = norms > tol
    size = rel.shape[0]
    def as_tuple(idx):
        digits = []
        for _ in range(k):
            digits.append(idx % group.n)
            idx //= group.n
        return tuple(reversed(digits))
    for a in range(size):
        if not rel[a, a]:
            raise NotEquivalence(f"relation not reflexive at {as_tuple(a)}",
                                 witness=(as_tuple(a),))
    if not np.array_equal(rel, rel.T):
        a, b = map(int, np.argwhere(rel != rel.T)[0])
        raise NotEquivalence(f"relation not symmetric at {as_tuple(a)}, {as_tuple(b)}",
                             witness=(as_tuple(a), as_tuple(b)))
    composed = (rel.astype(float) @ rel.astype(float)) > 0.5
    broken = composed & ~rel
    if np.any(broken):
        a, c = map(int, np.argwhere(broken)[0])
        b = int(np.argmax(rel[a] & rel[:, c]))
        raise NotEquivalence(
            f"relation not transitive: {as_tuple(a)} ~ {as_tuple(b)} ~ {as_tuple(c)}",
            witness=(as_tuple(a), as_tuple(b), as_tuple(c)))
    # Connected components of an equivalence relation are its classes.
    remaining = set(range(size))
    classes = []
    while remaining:
        seed = min(remaining)
        members = set(np.flatnonzero(rel[seed]).tolist())
        classes.append(tuple(sorted(as_tuple(m) for m in members)))
        remaining -= members
    return OrbitalRelation(k=k, n=group.n, related=rel, norms=norms,
                           classes=tuple(classes),
                           suspicious_norms=tuple(_check_norm_gap(norms)))


@dataclass(frozen=True, eq=False)
class TransitivityReport:
    """Scan result for transitivity of the 3-orbital relation."""

    n: int
    total_tuples: int
    related_pairs: int
    witnesses: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...]
    suspicious_norms: tuple[float, ...]

    @property
    def transitive(self) -> bool:
        return not self.witnesses

    def render(self) -> str:
        lines = [f"3-orbital transitivity scan on {self.total_tuples} tuples "
                 f"({self.related_pairs} related pairs)"]
        if self.transitive:
            lines.append("relation is transitive: no witnesses found")
        else:
            lines.append(f"NOT transitive: {len(self.witnesses)} witness triples, e.g.")
            for a, b, c in self.witnesses[:5]:
                one = lambda t: "(" + ",".join(str(x + 1) for x in t) + ")"
                lines.append(f"  {one(a)} ~ {one(b)} ~ {one(c)} but {one(a)} !~ {one(c)}")
        if self.suspicious_norms:
            lines.append(f"suspicious norms in the zero-test gap: {self.suspicious_norms[:10]}")
        return "\n".join(lines)


def three_orbital_transitivity_report(group: HopfData, tol: float = ZERO_TOL,
                                      allow_large: bool = False) -> TransitivityReport:
    """Exhaustive scan for 3-orbital transitivity failures.

    The N^6 pair scan is bounded to N <= 6 unless ``allow_large`` is set
    (the quaternion dual at N = 8 is the main oversized case of interest).
    """
    if group.n > MAX_SCAN_SYMBOLS and not allow_large:
        raise TooLarge(f"scan bounded to N <= {MAX_SCAN_SYMBOLS}; pass allow_large=True to override")
    norms = _all_monomial_norms(group, 3)
    rel = norms > tol
    composed = (rel.astype(float) @ rel.astype(float)) > 0.5
    broken = np.argwhere(composed & ~rel)
    n = group.n

    def as_tuple(idx):
        digits = []
        for _ in range(3):
            digits.append(idx % n)
            idx //= n
        return tuple(reversed(digits))

    witnesses = []
    for a, c in broken:
        mids = np.flatnonzero(rel[a] & rel[:, c])
        witnesses.append((as_tuple(int(a)), as_tuple(int(mids[0])), as_tuple(int(c))))
    return TransitivityReport(
        n=n,
        total_tuples=n ** 3,
        related_pairs=int(rel.sum()),
        witnesses=tuple(witnesses),
        suspicious_norms=tuple(_check_norm_gap(norms)),
    )
