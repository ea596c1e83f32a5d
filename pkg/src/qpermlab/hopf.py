"""Hopf structure tensors of the *-algebra generated by a magic unitary.

From a concrete magic unitary this module produces an orthonormal basis of
the generated algebra together with every structure tensor needed to work
in coordinates: multiplication and involution, comultiplication over the
tensor-square carrier, counit, antipode, Haar functional, and the block
(multi-matrix) decomposition.  All maps are verified against their defining
identities at build time and the finished bundle is immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DegenerateCentralElement,
    InconsistentComultiplication,
    NoAntipode,
    NoCounit,
    NoHaar,
    NonUniqueHaar,
    Truncated,
)
from .linalg import DEFAULT_TOL, dagger, frozen
from .magic import MagicUnitary

MAX_WORD_LEN = 12
NEW_DIRECTION_TOL = 1e-7   # Gram-Schmidt residual separating directions from noise
WEDDERBURN_SEED = 20260401
WEDDERBURN_RETRIES = 8

Word = tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class Block:
    """One Wedderburn block: matrix size and its minimal central projection."""

    dim: int
    projection_coords: np.ndarray
    projection_ambient: np.ndarray


@dataclass(frozen=True, eq=False)
class HopfData:
    """Structure tensors of the algebra generated by a magic unitary.

    Coordinates always refer to ``basis``, which is Hilbert-Schmidt
    orthonormal with ``basis[0]`` proportional to the identity.  The tensors
    follow these conventions:

    - ``mult[i, j, r]``: coefficient of ``basis[r]`` in ``basis[i] basis[j]``
    - ``star[i, a]``: coefficient of ``basis[a]`` in ``basis[i]*``
    - ``comult[r, s, t]``: coefficient of ``basis[s] (x) basis[t]`` in the
      comultiplication of ``basis[r]``
    - ``antipode_mat[:, r]``: coordinates of the antipode of ``basis[r]``
    - ``counit_vec[r]`` / ``haar_vec[r]``: functional values on ``basis[r]``
    """

    magic: MagicUnitary
    dim: int
    basis: np.ndarray                # (dim, D, D)
    words: tuple[Word, ...]
    word_coords: np.ndarray          # (dim, dim); row r = coords of the word monomial
    mult: np.ndarray                 # (dim, dim, dim)
    star: np.ndarray                 # (dim, dim)
    comult: np.ndarray               # (dim, dim, dim)
    counit_vec: np.ndarray           # (dim,)
    antipode_mat: np.ndarray         # (dim, dim)
    haar_vec: np.ndarray             # (dim,)
    blocks: tuple[Block, ...]
    gen_coords: np.ndarray           # (n, n, dim); coordinates of u_ij
    unit_coords: np.ndarray          # (dim,); coordinates of the identity
    gram_tensor: np.ndarray          # (dim, dim, dim); coords of basis[i]* basis[j]
    tol: float

    @property
    def n(self) -> int:
        return self.magic.n

    @property
    def ambient_dim(self) -> int:
        return self.magic.ambient_dim

    def coords(self, a) -> tuple[np.ndarray, float]:
        """Coordinates of an ambient matrix over the basis, with residual."""
        a = np.asarray(a, dtype=complex)
        c = np.einsum("rij,ij->r", self.basis.conj(), a)
        recon = np.einsum("r,rij->ij", c, self.basis)
        return c, float(np.linalg.norm(a - recon))

    def from_coords(self, c) -> np.ndarray:
        return np.einsum("r,rij->ij", np.asarray(c, dtype=complex), self.basis)

    def multiply_coords(self, x, y) -> np.ndarray:
        """Coordinates of the product of two coordinate vectors."""
        return np.einsum("i,j,ijr->r", x, y, self.mult)

    def star_coords(self, x) -> np.ndarray:
        """Coordinates of the involution applied to a coordinate vector."""
        return np.conj(np.asarray(x)) @ self.star

    def gram_matrix(self, phi) -> np.ndarray:
        """Gram matrix [phi(basis_i* basis_j)] of a functional coordinate vector."""
        return np.einsum("ijr,r->ij", self.gram_tensor, np.asarray(phi, dtype=complex))

    def one_dim_block_projections(self) -> list[Block]:
        return [b for b in self.blocks if b.dim == 1]

    def block_dims(self) -> list[int]:
        return [b.dim for b in self.blocks]


# ---------------------------------------------------------------------------
# basis generation
# ---------------------------------------------------------------------------

def generate_basis(u: MagicUnitary, tol: float = DEFAULT_TOL,
                   max_word_len: int = MAX_WORD_LEN,
                   new_direction_tol: float = NEW_DIRECTION_TOL):
    """Breadth-first closure of words in the generators under Gram-Schmidt.

    Returns ``(basis, words, word_coords, parents)`` where ``basis`` is the
    stacked orthonormal family, ``words[r]`` the generator word whose
    monomial introduced direction ``r``, ``word_coords[r]`` that monomial's
    coordinates, and ``parents[r]`` the ``(parent index, generator)`` pair
    that extends the representative words prefix-closed.

    Raises :class:`Truncated` when a new direction appears beyond
    ``max_word_len``, which signals a concrete algebra that does not close
    at desk scale.
    """
    dim_ambient = u.ambient_dim
    eye = np.eye(dim_ambient, dtype=complex)
    basis = [eye / np.sqrt(dim_ambient)]
    words: list[Word] = [()]
    parents: list[tuple[int, tuple[int, int]] | None] = [None]
    monomials = [eye]
    coord_rows = [[np.sqrt(dim_ambient)]]

    gens = [(i, j) for i in range(u.n) for j in range(u.n)]
    head = 0
    while head < len(words):
        w_idx = head
        head += 1
        for gen in gens:
            candidate = monomials[w_idx] @ u.entries[gen]
            stack = np.stack(basis)
            c = np.einsum("rij,ij->r", stack.conj(), candidate)
            resid = candidate - np.einsum("r,rij->ij", c, stack)
            # One re-orthogonalization pass keeps the family numerically tight.
            c2 = np.einsum("rij,ij->r", stack.conj(), resid)
            resid = resid - np.einsum("r,rij->ij", c2, stack)
            c = c + c2
            norm = float(np.linalg.norm(resid))
            if norm > new_direction_tol:
                word = words[w_idx] + (gen,)
                if len(word) > max_word_len:
                    raise Truncated(
                        f"algebra did not close below word length {max_word_len}")
                basis.append(resid / norm)
                words.append(word)
                parents.append((w_idx, gen))
                monomials.append(candidate)
                coord_rows.append(list(c) + [norm])
    dim = len(basis)
    word_coords = np.zeros((dim, dim), dtype=complex)
    for r, row in enumerate(coord_rows):
        word_coords[r, :len(row)] = row
    return np.stack(basis), tuple(words), word_coords, tuple(parents)


# ---------------------------------------------------------------------------
# structure tensors
# ---------------------------------------------------------------------------

def _mult_tensor(basis: np.ndarray) -> np.ndarray:
    products = np.einsum("iab,jbc->ijac", basis, basis)
    return np.einsum("rac,ijac->ijr", basis.conj(), products)

def _star_matrix(basis: np.ndarray) -> np.ndarray:
    adjoints = basis.conj().transpose(0, 2, 1)
    return np.einsum("aij,kij->ka", basis.conj(), adjoints)


def _tensor_coords(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Coordinates of a D^2 x D^2 matrix over basis (x) basis."""
    d = basis.shape[1]
    t4 = x.reshape(d, d, d, d)           # t4[a, c, b, e] = x[(a, c), (b, e)]
    y = np.einsum("acbe,sab->sce", t4, basis.conj())
    return np.einsum("sce,tce->st", y, basis.conj())


def build_comultiplication(u: MagicUnitary, basis, words, word_coords, parents,
                           tol: float = DEFAULT_TOL) -> np.ndarray:
    """Comultiplication tensor from the tensor-square carrier.

    Each generator maps to the row-times-column sum on the doubled carrier;
    representative words multiply these out, the result is expressed over
    basis (x) basis, and both the expansion residual and the homomorphism
    identity on structure constants are verified.
    """
    dim = len(words)
    delta_gen: dict[tuple[int, int], np.ndarray] = {}
    for i in range(u.n):
        for j in range(u.n):
            acc = np.zeros((u.ambient_dim ** 2, u.ambient_dim ** 2), dtype=complex)
            for k in range(u.n):
                acc += np.kron(u.entries[i, k], u.entries[k, j])
            delta_gen[(i, j)] = acc

    eye2 = np.eye(u.ambient_dim ** 2, dtype=complex)
    word_delta: list[np.ndarray] = [eye2]
    word_delta_coords = np.zeros((dim, dim, dim), dtype=complex)
    word_delta_coords[0] = _tensor_coords(eye2, basis)
    for r in range(1, dim):
        parent, gen = parents[r]
        mat = word_delta[parent] @ delta_gen[gen]
        word_delta.append(mat)
        coords = _tensor_coords(mat, basis)
        recon_norm_sq = float(np.sum(np.abs(coords) ** 2))
        full_norm_sq = float(np.linalg.norm(mat) ** 2)
        if full_norm_sq - recon_norm_sq > (10 * tol) ** 2 + 1e-12 * full_norm_sq:
            raise InconsistentComultiplication(
                f"comultiplication of word {words[r]} leaves the tensor-square span "
                f"(defect {np.sqrt(max(full_norm_sq - recon_norm_sq, 0.0)):.3e})")
        word_delta_coords[r] = coords
    del word_delta

    comult = np.linalg.solve(word_coords, word_delta_coords.reshape(dim, dim * dim))
    comult = comult.reshape(dim, dim, dim)

    mult = _mult_tensor(basis)
    lhs = np.einsum("ijr,rab->ijab", mult, comult)
    rhs = np.einsum("ist,spa,jpq,tqb->ijab", comult, mult, comult, mult, optimize=True)
    defect = float(np.max(np.abs(lhs - rhs)))
    if defect > 100 * tol:
        raise InconsistentComultiplication(
            f"comultiplication is not multiplicative on structure constants "
            f"(defect {defect:.3e})")
    coass = float(np.max(np.abs(np.einsum("xrc,rab->xabc", comult, comult)
                                - np.einsum("xar,rbc->xabc", comult, comult))))
    if coass > 100 * tol:
        raise InconsistentComultiplication(
            f"comultiplication is not coassociative (defect {coass:.3e})")
    return comult


def build_counit(words, word_coords, mult, gen_coords, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Counit vector: 1 on diagonal-index words, 0 otherwise, extended linearly."""
    values = np.array([1.0 if all(i == j for i, j in w) else 0.0 for w in words],
                      dtype=complex)
    eps = np.linalg.solve(word_coords, values)
    on_pairs = np.einsum("ijr,r->ij", mult, eps)
    defect = float(np.max(np.abs(on_pairs - np.outer(eps, eps))))
    if defect > 100 * tol:
        raise NoCounit(f"counit is not multiplicative (defect {defect:.3e})")
    n = gen_coords.shape[0]
    gen_values = np.einsum("ijr,r->ij", gen_coords, eps)
    if float(np.max(np.abs(gen_values - np.eye(n)))) > 100 * tol:
        raise NoCounit("counit does not send u_ij to delta_ij")
    return eps


def build_antipode(u: MagicUnitary, basis, words, word_coords, parents, mult,
                   tol: float = DEFAULT_TOL) -> np.ndarray:
    """Antipode matrix from reversed index-flipped words, verified anti-multiplicative."""
    dim = len(words)
    flipped = [np.eye(u.ambient_dim, dtype=complex)]
    flipped_coords = np.zeros((dim, dim), dtype=complex)
    flipped_coords[0, 0] = np.sqrt(u.ambient_dim)
    for r in range(1, dim):
        parent, (i, j) = parents[r]
        mat = u.entries[j, i] @ flipped[parent]       # S(w g) = S(g) S(w)
        flipped.append(mat)
        c = np.einsum("rij,ij->r", basis.conj(), mat)
        recon = np.einsum("r,rij->ij", c, basis)
        if float(np.linalg.norm(mat - recon)) > 100 * tol:
            raise NoAntipode(f"antipode image of word {words[r]} leaves the algebra")
        flipped_coords[r] = c
    smat = np.linalg.solve(word_coords, flipped_coords).T

    lhs = np.einsum("ijr,ar->ija", mult, smat)
    rhs = np.einsum("pj,qi,pqa->ija", smat, smat, mult, optimize=True)
    defect = float(np.max(np.abs(lhs - rhs)))
    if defect > 100 * tol:
        raise NoAntipode(f"antipode not anti-multiplicative (defect {defect:.3e})")
    s2_defect = float(np.max(np.abs(smat @ smat - np.eye(dim))))
    if s2_defect > 100 * tol:
        raise NoAntipode(f"antipode squared is not the identity (defect {s2_defect:.3e})")
    return smat


def build_haar(comult, unit_coords, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Haar vector: one-dimensional joint null space of both invariance maps."""
    dim = comult.shape[0]
    eye = np.eye(dim)
    # (h (x) id) comult(b_r) = h(b_r) 1  and  (id (x) h) comult(b_r) = h(b_r) 1
    left = comult.transpose(0, 2, 1).reshape(dim * dim, dim) \
        - np.einsum("t,rs->rts", unit_coords, eye).reshape(dim * dim, dim)
    right = comult.reshape(dim * dim, dim) \
        - np.einsum("s,rt->rst", unit_coords, eye).reshape(dim * dim, dim)
    system = np.vstack([left, right])
    _, svals, vh = np.linalg.svd(system)
    scale = max(svals[0], 1.0)
    null_count = int(np.sum(svals <= 1000 * tol * scale))
    if null_count == 0:
        raise NoHaar(f"no invariant functional (smallest singular value {svals[-1]:.3e})")
    if null_count > 1:
        raise NonUniqueHaar(f"invariance null space has dimension {null_count}")
    h = vh[-1].conj()
    normalization = np.dot(unit_coords, h)
    if abs(normalization) < tol:
        raise NoHaar("invariant functional vanishes on the identity")
    return h / normalization


def wedderburn_decompose(basis, mult, tol: float = DEFAULT_TOL,
                         seed: int = WEDDERBURN_SEED) -> tuple[Block, ...]:
    """Minimal central projections and block sizes of the algebra.

    The center is the null space of all commutator constraints; a random
    self-adjoint central element with simple spectrum splits it into the
    minimal central projections.  Block sizes come from the dimension of
    each corner z A, which is a full matrix algebra.
    """
    dim = mult.shape[0]
    commutators = (mult - mult.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(dim * dim, dim)
    _, svals, vh = np.linalg.svd(commutators)
    scale = max(svals[0], 1.0) if len(svals) else 1.0
    center_dim = int(np.sum(svals <= 1000 * tol * scale)) + max(0, dim - len(svals))
    if center_dim == 0:
        raise DegenerateCentralElement("algebra has trivial center; no unit found")
    center_coords = vh[dim - center_dim:].conj()
    center_mats = np.einsum("ki,iab->kab", center_coords, basis)

    rng = np.random.default_rng(seed)
    for _ in range(WEDDERBURN_RETRIES):
        coeffs = rng.standard_normal(center_dim)
        z = np.einsum("k,kab->ab", coeffs, center_mats)
        z = (z + dagger(z)) / 2
        values, projections = linalg.hermitian_eigen(z, tol=1e-6)
        if len(values) != center_dim:
            continue
        blocks = []
        for proj in projections:
            c = np.einsum("rij,ij->r", basis.conj(), proj)
            recon = np.einsum("r,rij->ij", c, basis)
            if float(np.linalg.norm(proj - recon)) > 100 * tol:
                raise DegenerateCentralElement("central projection leaves the algebra")
            corner = np.einsum("r,rsk->sk", c, mult)      # coords of z b_s over k
            rank = int(np.linalg.matrix_rank(corner, tol=1e-7))
            d = int(round(np.sqrt(rank)))
            if d * d != rank:
                raise DegenerateCentralElement(
                    f"corner dimension {rank} is not a perfect square")
            blocks.append(Block(dim=d, projection_coords=frozen(c.reshape(1, -1))[0],
                                projection_ambient=frozen(proj)))
        if sum(b.dim ** 2 for b in blocks) != dim:
            raise DegenerateCentralElement("block dimensions do not sum to the algebra dimension")
        blocks.sort(key=lambda b: (b.dim, round(float(np.real(np.trace(b.projection_ambient))), 6),
                                   np.argmax(np.abs(b.projection_coords) > 1e-9)))
        return tuple(blocks)
    raise DegenerateCentralElement(
        f"no central element with simple spectrum after {WEDDERBURN_RETRIES} draws")


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def build_hopf(u: MagicUnitary, tol: float = DEFAULT_TOL,
               max_word_len: int = MAX_WORD_LEN) -> HopfData:
    """Run the full pipeline from magic unitary to verified HopfData."""
    basis, words, word_coords, parents = generate_basis(u, tol, max_word_len)
    dim = len(words)
    mult = _mult_tensor(basis)
    star = _star_matrix(basis)
    gen_coords = np.einsum("rab,ijab->ijr", basis.conj(), u.entries)
    gen_recon = np.einsum("ijr,rab->ijab", gen_coords, basis)
    if float(np.max(np.abs(gen_recon - u.entries))) > 100 * tol:
        raise InconsistentComultiplication("generators do not lie in the generated span")
    unit_coords = np.zeros(dim, dtype=complex)
    unit_coords[0] = np.sqrt(u.ambient_dim)

    comult = build_comultiplication(u, basis, words, word_coords, parents, tol)
    counit_vec = build_counit(words, word_coords, mult, gen_coords, tol)
    antipode_mat = build_antipode(u, basis, words, word_coords, parents, mult, tol)
    haar_vec = build_haar(comult, unit_coords, tol)
    blocks = wedderburn_decompose(basis, mult, tol)
    gram_tensor = np.einsum("ia,ajr->ijr", star, mult)

    haar_gram = np.einsum("ijr,r->ij", gram_tensor, haar_vec)
    min_eig = float(np.min(np.linalg.eigvalsh((haar_gram + dagger(haar_gram)) / 2)))
    if min_eig < -100 * tol:
        raise NoHaar(f"invariant functional is not positive (eigenvalue {min_eig:.3e})")

    return HopfData(
        magic=u,
        dim=dim,
        basis=frozen(basis),
        words=words,
        word_coords=frozen(word_coords),
        mult=frozen(mult),
        star=frozen(star),
        comult=frozen(comult),
        counit_vec=frozen(counit_vec.reshape(1, -1))[0],
        antipode_mat=frozen(antipode_mat),
        haar_vec=frozen(haar_vec.reshape(1, -1))[0],
        blocks=blocks,
        gen_coords=frozen(gen_coords),
        unit_coords=frozen(unit_coords.reshape(1, -1))[0],
        gram_tensor=frozen(gram_tensor),
        tol=tol,
    )


# ---------------------------------------------------------------------------
# serialization (exact round trip through JSON text)
# ---------------------------------------------------------------------------

def _encode_array(a: np.ndarray):
    """Nested lists of [re, im] pairs; exact for float64 via repr round trip."""
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_encode_array(x) for x in a]


def _decode_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    out = np.empty(arr.shape[:-1], dtype=complex)
    out.real = arr[..., 0]        # assigning parts keeps signed zeros exact
    out.imag = arr[..., 1]
    return out


def _encode_tensor(a: np.ndarray):
    """Index-value list of the nonzero entries, preserving shape."""
    idx = np.argwhere(a != 0)
    values = a[tuple(idx.T)]
    return {
        "shape": list(a.shape),
        "entries": [[*map(int, ix), float(v.real), float(v.imag)]
                    for ix, v in zip(idx, values)],
    }


def _decode_tensor(data) -> np.ndarray:
    out = np.zeros(tuple(data["shape"]), dtype=complex)
    for row in data["entries"]:
        *ix, re, im = row
        out[tuple(int(k) for k in ix)] = complex(re, im)
    return out


def hopf_to_json(h: HopfData) -> str:
    payload = {
        "magic": {
            "n": h.magic.n,
            "ambient_dim": h.magic.ambient_dim,
            "label": h.magic.label,
            "entries": _encode_array(np.asarray(h.magic.entries)),
        },
        "dim": h.dim,
        "basis": _encode_array(np.asarray(h.basis)),
        "words": [[list(pair) for pair in w] for w in h.words],
        "word_coords": _encode_array(np.asarray(h.word_coords)),
        "mult": _encode_tensor(np.asarray(h.mult)),
        "star": _encode_tensor(np.asarray(h.star)),
        "comult": _encode_tensor(np.asarray(h.comult)),
        "counit": _encode_array(np.asarray(h.counit_vec)),
        "antipode": _encode_tensor(np.asarray(h.antipode_mat)),
        "haar": _encode_array(np.asarray(h.haar_vec)),
        "blocks": [
            {
                "dim": b.dim,
                "coords": _encode_array(np.asarray(b.projection_coords)),
                "ambient": _encode_array(np.asarray(b.projection_ambient)),
            }
            for b in h.blocks
        ],
        "gen_coords": _encode_array(np.asarray(h.gen_coords)),
        "tol": h.tol,
    }
    return json.dumps(payload)


def hopf_from_json(text: str) -> HopfData:
    data = json.loads(text)
    m = data["magic"]
    magic = MagicUnitary(n=m["n"], ambient_dim=m["ambient_dim"],
                         entries=frozen(_decode_array(m["entries"])), label=m["label"])
    dim = data["dim"]
    unit_coords = np.zeros(dim, dtype=complex)
    unit_coords[0] = np.sqrt(magic.ambient_dim)
    star = _decode_tensor(data["star"])
    mult = _decode_tensor(data["mult"])
    return HopfData(
        magic=magic,
        dim=dim,
        basis=frozen(_decode_array(data["basis"])),
        words=tuple(tuple(tuple(p) for p in w) for w in data["words"]),
        word_coords=frozen(_decode_array(data["word_coords"])),
        mult=frozen(mult),
        star=frozen(star),
        comult=frozen(_decode_tensor(data["comult"])),
        counit_vec=frozen(_decode_array(data["counit"])),
        antipode_mat=frozen(_decode_tensor(data["antipode"])),
        haar_vec=frozen(_decode_array(data["haar"])),
        blocks=tuple(
            Block(dim=b["dim"], projection_coords=frozen(_decode_array(b["coords"])),
                  projection_ambient=frozen(_decode_array(b["ambient"])))
            for b in data["blocks"]
        ),
        gen_coords=frozen(_decode_array(data["gen_coords"])),
        unit_coords=frozen(unit_coords.reshape(1, -1))[0],
        gram_tensor=frozen(np.einsum("ia,ajr->ijr", star, mult)),
        tol=data["tol"],
    )
