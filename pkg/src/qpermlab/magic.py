"""Concrete magic unitaries and the groups they represent.

A magic unitary is an N x N array of projections acting on a common
finite-dimensional carrier space, with every row and column summing to the
identity.  This module builds the stock examples: the classical symmetric
group acting on itself, duals of finite groups via circulant generator
blocks, the eight-dimensional Kac-Paljutkin quantum group, and block
compositions of existing unitaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidTable, NotGenerating, TooLarge
from .linalg import DEFAULT_TOL, dagger, frozen, op_norm

MAX_GROUP_ORDER = 5040  # 7!, the closure bound for permutation generators
MAX_SYMBOLS = 6


# ---------------------------------------------------------------------------
# permutations (tuples of 0-based images: sigma[j] = image of j)
# ---------------------------------------------------------------------------

def all_permutations(n: int) -> list[tuple[int, ...]]:
    return [tuple(p) for p in itertools.permutations(range(n))]


def perm_compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """(a o b)(j) = a(b(j))."""
    return tuple(a[b[j]] for j in range(len(a)))


def perm_inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(a)
    for j, i in enumerate(a):
        out[i] = j
    return tuple(out)


def perm_matrix(a: tuple[int, ...]) -> np.ndarray:
    n = len(a)
    m = np.zeros((n, n))
    for j, i in enumerate(a):
        m[i, j] = 1.0
    return m


def perm_from_cycles(n: int, cycles) -> tuple[int, ...]:
    """Build a permutation of range(n) from 1-based cycles like [(1, 2)]."""
    out = list(range(n))
    for cycle in cycles:
        zero_based = [c - 1 for c in cycle]
        for k, j in enumerate(zero_based):
            out[j] = zero_based[(k + 1) % len(zero_based)]
    return tuple(out)


# ---------------------------------------------------------------------------
# finite group tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupTable:
    """Cayley table of a finite group with a chosen generating set."""

    order: int
    table: np.ndarray           # table[g, h] = g * h
    identity: int
    generators: tuple[int, ...]
    element_orders: tuple[int, ...]
    elements: tuple | None = None   # permutation tuples when built by closure

    @staticmethod
    def from_table(table, identity: int, generators, elements=None) -> "GroupTable":
        tbl = np.asarray(table, dtype=int)
        n = tbl.shape[0]
        if tbl.shape != (n, n):
            raise InvalidTable(f"table must be square, got {tbl.shape}")
        if np.any(tbl < 0) or np.any(tbl >= n):
            raise InvalidTable("table entries out of range")
        if not (np.all(tbl[identity, :] == np.arange(n)) and np.all(tbl[:, identity] == np.arange(n))):
            raise InvalidTable(f"element {identity} is not an identity")
        # Associativity, exhaustively at desk scale via fancy indexing:
        # lhs[g, h, k] = (g h) k, rhs[g, h, k] = g (h k).
        if not np.array_equal(tbl[tbl], tbl[:, tbl]):
            raise InvalidTable("table is not associative")
        for g in range(n):
            if identity not in tbl[g]:
                raise InvalidTable(f"element {g} has no inverse")
        orders = []
        for g in range(n):
            k, acc = 1, g
            while acc != identity:
                acc = tbl[acc, g]
                k += 1
                if k > n:
                    raise InvalidTable("element order exceeds group order")
            orders.append(k)
        gens = tuple(int(g) for g in generators)
        for g in gens:
            if not 0 <= g < n:
                raise InvalidTable(f"generator {g} out of range")
        frozen_tbl = np.array(tbl)
        frozen_tbl.setflags(write=False)
        return GroupTable(n, frozen_tbl, int(identity), gens, tuple(orders),
                          None if elements is None else tuple(elements))

    @staticmethod
    def from_permutations(generators: list[tuple[int, ...]]) -> "GroupTable":
        """Close a set of permutations into a full Cayley table."""
        if not generators:
            raise InvalidTable("need at least one generator")
        degree = len(generators[0])
        identity = tuple(range(degree))
        elements = [identity]
        index = {identity: 0}
        frontier = [identity]
        while frontier:
            new_frontier = []
            for g in frontier:
                for s in generators:
                    h = perm_compose(s, g)
                    if h not in index:
                        if len(elements) >= MAX_GROUP_ORDER:
                            raise TooLarge(f"closure exceeds order {MAX_GROUP_ORDER}")
                        index[h] = len(elements)
                        elements.append(h)
                        new_frontier.append(h)
            frontier = new_frontier
        n = len(elements)
        table = np.zeros((n, n), dtype=int)
        for a, pa in enumerate(elements):
            for b, pb in enumerate(elements):
                table[a, b] = index[perm_compose(pa, pb)]
        gen_indices = [index[g] for g in generators]
        return GroupTable.from_table(table, 0, gen_indices, elements=elements)

    def generated_subgroup(self, gens) -> set[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    k = int(self.table[g, h])
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
            frontier = nxt
        return seen

    def inverse(self, g: int) -> int:
        return int(np.where(self.table[g] == self.identity)[0][0])

    def regular_representation(self, g: int) -> np.ndarray:
        """Left regular representation: e_h -> e_{g h}."""
        mat = np.zeros((self.order, self.order), dtype=complex)
        for h in range(self.order):
            mat[self.table[g, h], h] = 1.0
        return mat


def symmetric_group_table(n: int, generators: list[tuple[int, ...]] | None = None) -> GroupTable:
    if generators is None:
        generators = [perm_from_cycles(n, [(1, 2)]), perm_from_cycles(n, [tuple(range(1, n + 1))])]
    return GroupTable.from_permutations(generators)


def quaternion_table() -> GroupTable:
    """Order-8 quaternion group with generators i and j."""
    # Elements ordered e, -e, i, -i, j, -j, k, -k.
    names = ["e", "-e", "i", "-i", "j", "-j", "k", "-k"]
    sign = {g: (1 if not g.startswith("-") else -1) for g in names}
    base = {g: g.lstrip("-") for g in names}
    mul_base = {
        ("e", "e"): (1, "e"), ("e", "i"): (1, "i"), ("e", "j"): (1, "j"), ("e", "k"): (1, "k"),
        ("i", "e"): (1, "i"), ("j", "e"): (1, "j"), ("k", "e"): (1, "k"),
        ("i", "i"): (-1, "e"), ("j", "j"): (-1, "e"), ("k", "k"): (-1, "e"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    }
    idx = {g: k for k, g in enumerate(names)}
    table = np.zeros((8, 8), dtype=int)
    for a in names:
        for b in names:
            s, c = mul_base[(base[a], base[b])]
            s *= sign[a] * sign[b]
            table[idx[a], idx[b]] = idx[c if s == 1 else "-" + c]
    return GroupTable.from_table(table, idx["e"], [idx["i"], idx["j"]])


# ---------------------------------------------------------------------------
# magic unitaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MagicUnitary:
    """N x N array of projections on a shared carrier, rows/columns summing to 1."""

    n: int
    ambient_dim: int
    entries: np.ndarray          # complex, shape (n, n, ambient_dim, ambient_dim)
    label: str = ""
    carrier_id: object = field(default_factory=object, repr=False, compare=False)
    group_table: GroupTable | None = field(default=None, repr=False, compare=False)

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.entries[i, j]

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex)


def _make_unitary(entries: np.ndarray, label: str, carrier_id=None,
                  group_table: GroupTable | None = None) -> MagicUnitary:
    ent = frozen(entries)
    kwargs = {} if carrier_id is None else {"carrier_id": carrier_id}
    return MagicUnitary(n=ent.shape[0], ambient_dim=ent.shape[2], entries=ent,
                        label=label, group_table=group_table, **kwargs)


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Per-entry and per-row/column defects of a claimed magic unitary."""

    n: int
    projection_defects: np.ndarray   # (n, n) max of ||p^2 - p|| and ||p - p*||
    row_defects: np.ndarray
    col_defects: np.ndarray
    tol: float

    @property
    def passes(self) -> bool:
        return (
            float(self.projection_defects.max()) <= self.tol
            and float(self.row_defects.max()) <= self.tol
            and float(self.col_defects.max()) <= self.tol
        )

    @property
    def worst(self) -> float:
        return float(max(self.projection_defects.max(), self.row_defects.max(), self.col_defects.max()))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "passes": self.passes,
            "worstDefect": self.worst,
            "projectionDefects": self.projection_defects.tolist(),
            "rowDefects": self.row_defects.tolist(),
            "colDefects": self.col_defects.tolist(),
        }

    def render(self) -> str:
        lines = [f"magic unitary check (n={self.n}, tol={self.tol:g}): "
                 f"{'PASS' if self.passes else 'FAIL'}"]
        lines.append(f"  worst defect: {self.worst:.3e}")
        if not self.passes:
            bad = np.argwhere(self.projection_defects > self.tol)
            for i, j in bad:
                lines.append(f"  entry ({i + 1},{j + 1}): projection defect "
                             f"{self.projection_defects[i, j]:.3e}")
        return "\n".join(lines)


def validate_magic(u: MagicUnitary, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Report projection and row/column-sum defects of every entry of u."""
    n, dim = u.n, u.ambient_dim
    eye = np.eye(dim, dtype=complex)
    proj = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            p = u.entries[i, j]
            proj[i, j] = max(op_norm(p @ p - p), op_norm(p - dagger(p)))
    rows = np.array([op_norm(u.entries[i].sum(axis=0) - eye) for i in range(n)])
    cols = np.array([op_norm(u.entries[:, j].sum(axis=0) - eye) for j in range(n)])
    return ValidationReport(n=n, projection_defects=proj, row_defects=rows, col_defects=cols, tol=tol)


def symmetric_group(n: int, table: GroupTable | None = None) -> MagicUnitary:
    """Classical S_n as a magic unitary of 0/1 diagonal matrices on C^{n!}.

    Coordinate sigma of the carrier corresponds to the permutation sigma in
    lexicographic order; entry (i, j) is the indicator of sigma(j) = i.
    """
    if n > MAX_SYMBOLS:
        raise TooLarge(f"symmetric_group supports n <= {MAX_SYMBOLS}, got {n}")
    if n < 2:
        raise TooLarge("need n >= 2")
    perms = all_permutations(n)
    dim = len(perms)
    entries = np.zeros((n, n, dim, dim), dtype=complex)
    for k, sigma in enumerate(perms):
        for j in range(n):
            entries[sigma[j], j, k, k] = 1.0
    return _make_unitary(entries, f"S_{n}")


def dual_group(group: GroupTable, label: str = "") -> MagicUnitary:
    """Dual of a finite group as a block-circulant magic unitary.

    Each generator gamma of order m contributes an m x m circulant block
    with entries (1/m) sum_l w^{(i-j) l} gamma^l acting in the left regular
    representation; distinct generator blocks sit on the block diagonal.
    """
    gens = group.generators
    if not gens:
        raise NotGenerating("no generators supplied")
    if group.generated_subgroup(gens) != set(range(group.order)):
        raise NotGenerating("generators do not generate the group")
    orders = [group.element_orders[g] for g in gens]
    for g, m in zip(gens, orders):
        if m < 2:
            raise NotGenerating(f"generator {g} has order {m} < 2")
    n = sum(orders)
    dim = group.order
    entries = np.zeros((n, n, dim, dim), dtype=complex)
    offset = 0
    for g, m in zip(gens, orders):
        omega = np.exp(2j * np.pi / m)
        powers = []            # powers[l-1] = gamma^l for l = 1..m (gamma^m = e)
        acc = g
        for _ in range(m):
            powers.append(group.regular_representation(acc))
            acc = int(group.table[g, acc])
        for i in range(m):
            for j in range(m):
                block = sum(omega ** ((i - j) * ell) * powers[ell - 1] for ell in range(1, m + 1))
                entries[offset + i, offset + j] = block / m
        offset += m
    name = label or f"dual(order {group.order})"
    return _make_unitary(entries, name, group_table=group)


def kac_paljutkin() -> MagicUnitary:
    """The Kac-Paljutkin quantum group of order eight inside S_4^+.

    Carrier is C^4 (+) C^2 in the ordering (f1, f2, f3, f4, M2 block); the
    off-diagonal phase of the M2 projection is exp(i pi / 4).
    """
    dim = 6

    def ones(*positions):
        m = np.zeros((dim, dim), dtype=complex)
        for k in positions:
            m[k, k] = 1.0
        return m

    zeta = np.exp(1j * np.pi / 4)
    p2 = 0.5 * np.array([[1.0, np.conj(zeta)], [zeta, 1.0]])

    def m2(block):
        m = np.zeros((dim, dim), dtype=complex)
        m[4:6, 4:6] = block
        return m

    eye2 = np.eye(2)
    p, q = m2(p2), m2(eye2 - p2)
    pt, qt = m2(p2.T), m2(eye2 - p2.T)
    f12, f34, f13, f24 = ones(0, 1), ones(2, 3), ones(0, 2), ones(1, 3)
    entries = np.array([
        [f12, f34, p, q],
        [f34, f12, q, p],
        [pt, qt, f13, f24],
        [qt, pt, f24, f13],
    ])
    return _make_unitary(entries, "Kac-Paljutkin")


def direct_sum(parts: list[MagicUnitary], label: str = "") -> MagicUnitary:
    """Block-diagonal sum of magic unitaries.

    Parts on one carrier are concatenated directly; parts on distinct
    carriers are first embedded a -> 1 (x) ... (x) a (x) ... (x) 1 so the
    result again acts on one common carrier.
    """
    if not parts:
        raise ValueError("direct_sum of zero parts")
    if len(parts) == 1:
        return parts[0]
    shared = all(p.carrier_id is parts[0].carrier_id for p in parts)
    n = sum(p.n for p in parts)
    if shared:
        dim = parts[0].ambient_dim
        entries = np.zeros((n, n, dim, dim), dtype=complex)
        offset = 0
        for part in parts:
            entries[offset:offset + part.n, offset:offset + part.n] = part.entries
            offset += part.n
        name = label or " (+) ".join(p.label for p in parts)
        tables = {id(p.group_table) for p in parts}
        shared_table = parts[0].group_table if len(tables) == 1 else None
        return _make_unitary(entries, name, carrier_id=parts[0].carrier_id,
                             group_table=shared_table)
    dims = [p.ambient_dim for p in parts]
    dim = int(np.prod(dims))
    entries = np.zeros((n, n, dim, dim), dtype=complex)
    offset = 0
    for k, part in enumerate(parts):
        left = int(np.prod(dims[:k])) if k else 1
        right = int(np.prod(dims[k + 1:])) if k + 1 < len(parts) else 1
        eye_l, eye_r = np.eye(left, dtype=complex), np.eye(right, dtype=complex)
        for i in range(part.n):
            for j in range(part.n):
                entries[offset + i, offset + j] = np.kron(np.kron(eye_l, part.entries[i, j]), eye_r)
        offset += part.n
    name = label or " (+) ".join(p.label for p in parts)
    return _make_unitary(entries, name)


def repeat_embed(u: MagicUnitary, times: int) -> MagicUnitary:
    """diag(u, u, ..., u) on the carrier of u; same group, more symbols."""
    if times < 1:
        raise ValueError("times must be >= 1")
    if times == 1:
        return u
    out = direct_sum([u] * times, label=f"{u.label} x{times}")
    return out
