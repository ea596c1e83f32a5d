"""Bounded rewriting prover for universal magic-unitary identities.

Expressions are exact-rational linear combinations of words in abstract
generators ``u[i,j]`` of a fixed size N.  Local reductions apply the
projection and row/column orthogonality relations; the prover searches over
single-occurrence substitutions by row or column sum complements, meeting
in the middle, and therefore never reports a false identity: every move is
an equality in the universal algebra.  ``Unknown`` is an honest answer; for
N >= 4 the universal algebra is infinite-dimensional and no finite rule
set is complete.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexOutOfRange, RewriteSyntaxError

Word = tuple[tuple[int, int], ...]      # 1-based generator indices
Terms = dict[Word, Fraction]

DEFAULT_DEPTH = 6
MAX_VISITED = 200_000


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

def _reduce_word(word: Word):
    """Apply adjacent projection/orthogonality reductions to a fixpoint.

    Returns the reduced word, or None when an orthogonal adjacency
    annihilates the whole monomial.
    """
    factors = list(word)
    changed = True
    while changed:
        changed = False
        k = 0
        while k + 1 < len(factors):
            (i1, j1), (i2, j2) = factors[k], factors[k + 1]
            if i1 == i2 and j1 == j2:
                del factors[k + 1]
                changed = True
                continue
            if i1 == i2 or j1 == j2:
                return None
            k += 1
    return tuple(factors)


class MagicExpr:
    """Canonically reduced formal combination of generator words."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Terms):
        self.n = n
        reduced: Terms = {}
        for word, coeff in terms.items():
            if not coeff:
                continue
            wr = _reduce_word(word)
            if wr is None:
                continue
            new = reduced.get(wr, Fraction(0)) + coeff
            if new:
                reduced[wr] = new
            else:
                reduced.pop(wr, None)
        self.terms = reduced

    # words ordered by degree then lexicographically
    def key(self):
        return tuple(sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])))

    def __eq__(self, other):
        return isinstance(other, MagicExpr) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.key()))

    def is_zero(self) -> bool:
        return not self.terms

    def __sub__(self, other: "MagicExpr") -> "MagicExpr":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) - c
        return MagicExpr(self.n, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for word, coeff in self.key():
            body = "".join(f"u[{i},{j}]" for i, j in word) or "1"
            if coeff == 1:
                text = body
            elif coeff == -1:
                text = f"-{body}"
            else:
                text = f"{coeff} {body}"
            if parts and not text.startswith("-"):
                parts.append("+ " + text)
            elif parts:
                parts.append("- " + text[1:])
            else:
                parts.append(text)
        return " ".join(parts)


def expr_from_word(n: int, word, coeff=1) -> MagicExpr:
    return MagicExpr(n, {tuple(word): Fraction(coeff)})


def evaluate_in(expr: MagicExpr, magic) -> "np.ndarray":
    """Evaluate the expression in a concrete magic unitary of the same size.

    Used to soundness-check proofs: a universal identity must vanish in
    every representation.
    """
    import numpy as np

    if magic.n != expr.n:
        raise IndexOutOfRange(f"expression size {expr.n} != unitary size {magic.n}")
    dim = magic.ambient_dim
    out = np.zeros((dim, dim), dtype=complex)
    for word, coeff in expr.terms.items():
        acc = np.eye(dim, dtype=complex)
        for i, j in word:
            acc = acc @ magic.entries[i - 1, j - 1]
        out += float(coeff) * acc
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        ch = src[pos]
        if ch.isspace() or ch == "*":
            pos += 1
            continue
        if ch in "+-[],/u":
            tokens.append((ch if ch != "u" else "u", pos))
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < len(src) and src[pos].isdigit():
                pos += 1
            tokens.append((int(src[start:pos]), start))
            continue
        raise RewriteSyntaxError(f"unexpected character {ch!r}", position=pos)
    return tokens


def parse(src: str, n: int) -> MagicExpr:
    """Parse ``expr := term (('+'|'-') term)*`` over generators u[i,j] of size n.

    A term is an optional rational coefficient followed by factors, each
    either ``u[i,j]`` or the unit ``1``; a bare coefficient denotes a
    multiple of the unit.  Indices outside 1..n raise IndexOutOfRange.
    """
    if n < 2:
        raise IndexOutOfRange("n must be >= 2")
    tokens = _tokenize(src)
    cursor = 0

    def peek():
        return tokens[cursor][0] if cursor < len(tokens) else None

    def take(expected=None):
        nonlocal cursor
        if cursor >= len(tokens):
            raise RewriteSyntaxError("unexpected end of input", position=len(src))
        tok, pos = tokens[cursor]
        if expected is not None and tok != expected:
            raise RewriteSyntaxError(f"expected {expected!r}, got {tok!r}", position=pos)
        cursor += 1
        return tok, pos

    def parse_factor():
        tok, pos = take()
        if tok == "u":
            take("[")
            i, ipos = take()
            if not isinstance(i, int):
                raise RewriteSyntaxError("expected row index", position=ipos)
            take(",")
            j, jpos = take()
            if not isinstance(j, int):
                raise RewriteSyntaxError("expected column index", position=jpos)
            take("]")
            if not (1 <= i <= n and 1 <= j <= n):
                raise IndexOutOfRange(f"u[{i},{j}] outside 1..{n}")
            return (i, j)
        if tok == 1:
            return None                  # unit factor
        raise RewriteSyntaxError(f"expected factor, got {tok!r}", position=pos)

    def parse_term():
        # A leading integer is a coefficient (rational when followed by '/');
        # a bare coefficient denotes that multiple of the unit.
        coeff = Fraction(1)
        has_coeff = False
        if isinstance(peek(), int):
            num, _ = take()
            if peek() == "/":
                take("/")
                den, dpos = take()
                if not isinstance(den, int) or den == 0:
                    raise RewriteSyntaxError("expected nonzero denominator", position=dpos)
                coeff = Fraction(num, den)
            else:
                coeff = Fraction(num)
            has_coeff = True
        word: list[tuple[int, int]] = []
        factors = 0
        while peek() == "u" or peek() == 1:
            factor = parse_factor()
            factors += 1
            if factor is not None:
                word.append(factor)
        if factors == 0 and not has_coeff:
            tok, pos = tokens[cursor] if cursor < len(tokens) else (None, len(src))
            raise RewriteSyntaxError(f"expected term, got {tok!r}", position=pos)
        return tuple(word), coeff

    terms: Terms = {}
    sign = Fraction(1)
    if peek() == "-":
        take("-")
        sign = Fraction(-1)
    elif peek() == "+":
        take("+")
    while True:
        word, coeff = parse_term()
        terms[word] = terms.get(word, Fraction(0)) + sign * coeff
        if cursor >= len(tokens):
            break
        tok, pos = take()
        if tok == "+":
            sign = Fraction(1)
        elif tok == "-":
            sign = Fraction(-1)
        else:
            raise RewriteSyntaxError(f"expected + or -, got {tok!r}", position=pos)
    return MagicExpr(n, terms)


# ---------------------------------------------------------------------------
# normalization: eliminate last-index generators
# ---------------------------------------------------------------------------

def _substitute(expr: MagicExpr, word: Word, pos: int, replacement: list[tuple[Word, Fraction]]) -> MagicExpr:
    """Replace the factor at ``pos`` of ``word`` by a sum of words."""
    coeff = expr.terms[word]
    out = dict(expr.terms)
    del out[word]
    prefix, suffix = word[:pos], word[pos + 1:]
    for mid, c in replacement:
        new_word = prefix + mid + suffix
        out[new_word] = out.get(new_word, Fraction(0)) + coeff * c
    return MagicExpr(expr.n, out)


def _row_complement(n: int, i: int, j: int) -> list[tuple[Word, Fraction]]:
    """u[i,j] = 1 - sum_{k != j} u[i,k]."""
    repl = [((), Fraction(1))]
    repl += [((((i, k)),), Fraction(-1)) for k in range(1, n + 1) if k != j]
    return repl


def _col_complement(n: int, i: int, j: int) -> list[tuple[Word, Fraction]]:
    """u[i,j] = 1 - sum_{k != i} u[k,j]."""
    repl = [((), Fraction(1))]
    repl += [((((k, j)),), Fraction(-1)) for k in range(1, n + 1) if k != i]
    return repl


def normalize(expr: MagicExpr) -> MagicExpr:
    """Deterministic normal form with no index-N generators.

    Local reductions run to a fixpoint (inside MagicExpr); then the leftmost
    index-N occurrence of the least word is eliminated through its row or
    column sum relation, which strictly reduces the count of N-indices per
    monomial, so the loop terminates.
    """
    n = expr.n
    current = expr
    while True:
        target = None
        for word, _ in current.key():
            for pos, (i, j) in enumerate(word):
                if i == n or j == n:
                    target = (word, pos, i, j)
                    break
            if target:
                break
        if target is None:
            return current
        word, pos, i, j = target
        if i == n:
            current = _substitute(current, word, pos, _col_complement(n, i, j))
        else:
            current = _substitute(current, word, pos, _row_complement(n, i, j))


# ---------------------------------------------------------------------------
# prover
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProofResult:
    status: str                      # "proved" | "unknown"
    trace: tuple[str, ...]
    explored: int
    meeting_point: str | None = None

    @property
    def proved(self) -> bool:
        return self.status == "proved"


def _moves(expr: MagicExpr):
    """All single-occurrence complement substitutions of an expression."""
    n = expr.n
    for word, _ in expr.key():
        for pos, (i, j) in enumerate(word):
            yield (expr, word, pos, "row",
                   _substitute(expr, word, pos, _row_complement(n, i, j)))
            yield (expr, word, pos, "col",
                   _substitute(expr, word, pos, _col_complement(n, i, j)))


def _describe(word: Word, pos: int, mode: str) -> str:
    i, j = word[pos]
    body = "".join(f"u[{a},{b}]" for a, b in word)
    kind = "row" if mode == "row" else "column"
    return f"expand u[{i},{j}] (factor {pos + 1} of {body}) by its {kind} sum complement"


def _reconstruct(parents, end):
    steps = []
    state = end
    while parents[state] is not None:
        prev, desc = parents[state]
        steps.append((prev, desc, state))
        state = prev
    steps.reverse()
    return steps


def prove_equal(a: MagicExpr, b: MagicExpr, depth: int = DEFAULT_DEPTH,
                max_visited: int = MAX_VISITED) -> ProofResult:
    """Bidirectional bounded search for a rewrite path from a to b.

    Returns a proof trace when the canonical forms meet within ``depth``
    total moves; every move is an identity in the universal algebra, so a
    "proved" verdict is sound.  Exhausting the bound (or the visited-state
    budget) yields "unknown".
    """
    if a.n != b.n:
        raise IndexOutOfRange("expressions have different N")
    start_a, start_b = a, b
    if start_a == start_b:
        return ProofResult("proved", (), 0, meeting_point=str(start_a))

    sides = {
        "lhs": {"start": start_a, "parents": {start_a: None}, "frontier": deque([start_a]), "depth": 0},
        "rhs": {"start": start_b, "parents": {start_b: None}, "frontier": deque([start_b]), "depth": 0},
    }
    explored = 0

    def finish(meet) -> ProofResult:
        trace = []
        for prev, desc, new in _reconstruct(sides["lhs"]["parents"], meet):
            trace.append(f"{len(trace) + 1}. [lhs] {desc}: {prev} = {new}")
        for prev, desc, new in _reconstruct(sides["rhs"]["parents"], meet):
            trace.append(f"{len(trace) + 1}. [rhs] {desc}: {prev} = {new}")
        trace.append(f"both sides reach: {meet}")
        return ProofResult("proved", tuple(trace), explored, meeting_point=str(meet))

    while True:
        expandable = [name for name, s in sides.items()
                      if sides["lhs"]["depth"] + sides["rhs"]["depth"] < depth and s["frontier"]]
        if not expandable:
            return ProofResult("unknown", (), explored)
        # Expand the smaller frontier first; classic bidirectional heuristic.
        name = min(expandable, key=lambda nm: len(sides[nm]["frontier"]))
        side, other = sides[name], sides["rhs" if name == "lhs" else "lhs"]
        next_frontier = deque()
        parents = side["parents"]
        while side["frontier"]:
            state = side["frontier"].popleft()
            for _, word, pos, mode, successor in _moves(state):
                if successor in parents:
                    continue
                parents[successor] = (state, _describe(word, pos, mode))
                explored += 1
                if explored > max_visited:
                    return ProofResult("unknown", (), explored)
                next_frontier.append(successor)
                if successor in other["parents"]:
                    return finish(successor)
        side["frontier"] = next_frontier
        side["depth"] += 1
