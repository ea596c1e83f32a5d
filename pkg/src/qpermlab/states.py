"""Quantum permutations as states of a magic-unitary algebra.

A state is stored as the vector of its values on the orthonormal algebra
basis of a :class:`~qpermlab.hopf.HopfData`; conditioning, convolution and
sequential measurement are then exact multilinear operations on those
coordinates.  This module covers construction (densities, positive-definite
functions on dual groups, characters), Birkhoff slices, wave-function
collapse, the convolution calculus (powers, Cesaro averages, idempotents,
supports, quasi-subgroups), fixed-point spectra, and the central Chebyshev
evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GroupMismatch,
    NotAState,
    NotDensity,
    NotIdempotent,
    NotInGroup,
    NotPositiveDefinite,
    NullEvent,
)
from .hopf import HopfData
from .linalg import DEFAULT_TOL, dagger, frozen, hermitian_eigen, range_projection
from .magic import all_permutations, perm_inverse, perm_matrix

IDEMPOTENT_TOL = 1e-8
FIXED_POINT_TOL = 1e-8
CESARO_SUP_TOL = 1e-9
CESARO_MAX_ITER = 10_000


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumPermutation:
    """A positive normalized functional on the algebra, in basis coordinates."""

    group: HopfData
    coords: np.ndarray
    label: str = ""

    def __call__(self, element_coords) -> complex:
        """Value of the state on an algebra element given by coordinates."""
        return complex(np.dot(np.asarray(element_coords, dtype=complex), self.coords))

    def prob(self, i: int, j: int) -> float:
        """P[state(j) = i] with 0-based indices."""
        return float(np.real(self(self.group.gen_coords[i, j])))


def validate_state(group: HopfData, coords, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Check normalization, hermiticity and Gram positivity; return the coords."""
    c = np.asarray(coords, dtype=complex).reshape(-1)
    if c.shape != (group.dim,):
        raise NotAState(f"expected {group.dim} coordinates, got {c.shape}")
    unit_value = np.dot(group.unit_coords, c)
    if abs(unit_value - 1.0) > 100 * tol:
        raise NotAState(f"state value on the unit is {unit_value:.6g}, not 1")
    herm = group.star @ c - np.conj(c)
    if float(np.max(np.abs(herm))) > 100 * tol:
        raise NotAState("functional is not hermitian")
    gram = group.gram_matrix(c)
    min_eig = float(np.min(np.linalg.eigvalsh((gram + dagger(gram)) / 2)))
    if min_eig < -100 * tol:
        raise NotAState(f"Gram matrix has negative eigenvalue {min_eig:.3e}")
    return c


def state(group: HopfData, coords, label: str = "", tol: float = DEFAULT_TOL) -> QuantumPermutation:
    return QuantumPermutation(group, frozen(validate_state(group, coords, tol).reshape(1, -1))[0], label)


def haar_state(group: HopfData) -> QuantumPermutation:
    return state(group, group.haar_vec, label="haar")


def counit_state(group: HopfData) -> QuantumPermutation:
    return state(group, group.counit_vec, label="counit")


def state_from_density(group: HopfData, rho, tol: float = DEFAULT_TOL) -> QuantumPermutation:
    """State f -> Tr(rho f) of a density matrix on the ambient carrier."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (group.ambient_dim, group.ambient_dim):
        raise NotDensity(f"density must be {group.ambient_dim} x {group.ambient_dim}")
    if abs(np.trace(rho) - 1.0) > 100 * tol:
        raise NotDensity(f"trace is {np.trace(rho):.6g}, not 1")
    eigs = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if float(np.max(np.abs(rho - dagger(rho)))) > 100 * tol or eigs[0] < -100 * tol:
        raise NotDensity("density matrix is not PSD")
    coords = np.einsum("rij,ji->r", group.basis, rho)
    return state(group, coords, label="density", tol=tol)


def state_from_vector(group: HopfData, xi, label: str = "vector") -> QuantumPermutation:
    """Vector state of a unit vector on the ambient carrier."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(xi)
    if norm < 1e-12:
        raise NotDensity("zero vector")
    xi = xi / norm
    out = state_from_density(group, np.outer(xi, xi.conj()))
    return QuantumPermutation(out.group, out.coords, label)


def mix(states: list[QuantumPermutation], weights) -> QuantumPermutation:
    ws = np.asarray(weights, dtype=float)
    if len(states) != len(ws) or abs(ws.sum() - 1.0) > 1e-9 or np.any(ws < 0):
        raise NotAState("mixture weights must be a probability vector matching the states")
    group = states[0].group
    coords = sum(w * s.coords for w, s in zip(ws, states))
    return state(group, coords, label="mixture")


def _group_element_coords(group: HopfData) -> np.ndarray:
    """Coordinates of each group element's regular-representation matrix."""
    table = group.magic.group_table
    if table is None:
        raise NotInGroup("this group was not built from a discrete group table")
    if table.order != group.dim:
        raise NotInGroup("algebra dimension does not match the group order")
    mats = np.stack([table.regular_representation(g) for g in range(table.order)])
    return np.einsum("rij,gij->gr", group.basis.conj(), mats)


def state_from_function(group: HopfData, values, tol: float = DEFAULT_TOL) -> QuantumPermutation:
    """State of a dual group from a positive-definite function on the group.

    ``values`` maps group-element index -> complex value (missing entries are
    zero); the identity must map to 1.  Functions whose Gram matrix is not
    PSD are rejected with :class:`NotPositiveDefinite`.
    """
    table = group.magic.group_table
    if table is None:
        raise NotInGroup("this group was not built from a discrete group table")
    vec = np.zeros(table.order, dtype=complex)
    for key, val in values.items():
        vec[int(key)] = complex(val)
    if abs(vec[table.identity] - 1.0) > tol:
        raise NotPositiveDefinite("function must take value 1 at the identity")
    m = _group_element_coords(group)
    coords = np.linalg.solve(m, vec)
    try:
        return state(group, coords, label="pdf", tol=tol)
    except NotAState as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def state_to_function(phi: QuantumPermutation) -> np.ndarray:
    """Values of a dual-group state on the group elements."""
    m = _group_element_coords(phi.group)
    return m @ phi.coords


def character_state(group: HopfData, sigma, tol: float = DEFAULT_TOL) -> QuantumPermutation:
    """The deterministic permutation ev_sigma, when sigma lies in the group.

    The functional is pinned on representative words by the product of index
    indicators and extended linearly; failure of multiplicativity on the
    structure constants means sigma is not in the group.
    """
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(group.n)):
        raise NotInGroup(f"not a permutation of 0..{group.n - 1}: {sigma}")
    values = np.array(
        [1.0 if all(sigma[j] == i for i, j in w) else 0.0 for w in group.words],
        dtype=complex)
    coords = np.linalg.solve(group.word_coords, values)
    on_pairs = np.einsum("ijr,r->ij", group.mult, coords)
    defect = float(np.max(np.abs(on_pairs - np.outer(coords, coords))))
    if defect > 1e-6:
        raise NotInGroup(f"ev_sigma is not multiplicative for sigma={sigma} "
                         f"(defect {defect:.3e})")
    gen_values = np.einsum("ijr,r->ij", group.gen_coords, coords)
    if float(np.max(np.abs(np.real(gen_values) - perm_matrix(sigma)))) > 1e-6:
        raise NotInGroup(f"slice of ev_sigma is not the permutation matrix of {sigma}")
    try:
        out = state(group, coords, tol=tol)
    except NotAState as exc:
        raise NotInGroup(str(exc)) from exc
    return QuantumPermutation(out.group, out.coords, label=f"ev_{sigma}")


def deterministic_enumerate(group: HopfData, tol: float = DEFAULT_TOL):
    """All deterministic permutations, as (sigma, state) pairs.

    The result is verified to be closed under convolution: the product of
    two character slices is again a character slice of the set.
    """
    found = []
    for sigma in all_permutations(group.n):
        try:
            found.append((sigma, character_state(group, sigma, tol)))
        except NotInGroup:
            continue
    perms = {sigma for sigma, _ in found}
    for a in perms:
        if perm_inverse(a) not in perms:
            raise NotInGroup(f"deterministic set is not closed under inversion: {a}")
        for b in perms:
            composed = tuple(a[b[j]] for j in range(len(a)))
            if composed not in perms:
                raise NotInGroup("deterministic set is not closed under composition")
    return found


# ---------------------------------------------------------------------------
# Birkhoff slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BirkhoffSlice:
    """Doubly stochastic matrix of one-step probabilities phi(u_ij)."""

    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def is_permutation(self, tol: float = 1e-8):
        """The permutation (0-based images) when the slice is 0/1, else None."""
        m = self.matrix
        images = m.argmax(axis=0)
        perm = tuple(int(i) for i in images)
        if sorted(perm) != list(range(self.n)):
            return None
        if float(np.max(np.abs(m - perm_matrix(perm)))) > tol:
            return None
        return perm


def birkhoff_slice(phi: QuantumPermutation, tol: float = DEFAULT_TOL) -> BirkhoffSlice:
    values = np.einsum("ijr,r->ij", phi.group.gen_coords, phi.coords)
    if float(np.max(np.abs(values.imag))) > 100 * tol:
        raise NotAState("slice has imaginary entries")
    m = values.real
    if m.min() < -100 * tol or m.max() > 1 + 100 * tol:
        raise NotAState("slice entries leave [0, 1]")
    if float(np.max(np.abs(m.sum(axis=0) - 1))) > 100 * tol \
            or float(np.max(np.abs(m.sum(axis=1) - 1))) > 100 * tol:
        raise NotAState("slice is not doubly stochastic")
    return BirkhoffSlice(frozen(m.astype(complex)).real)


# ---------------------------------------------------------------------------
# collapse and sequential measurement
# ---------------------------------------------------------------------------

def generator_projection(group: HopfData, i: int, j: int) -> np.ndarray:
    """Coordinates of u_ij (0-based indices)."""
    return np.asarray(group.gen_coords[i, j])


def _event_coords(group: HopfData, event) -> np.ndarray:
    if isinstance(event, tuple) and len(event) == 2 and all(isinstance(k, (int, np.integer)) for k in event):
        return generator_projection(group, event[0], event[1])
    return np.asarray(event, dtype=complex)


def condition(phi: QuantumPermutation, projection, tol: float = DEFAULT_TOL) -> QuantumPermutation:
    """Wave-function collapse phi -> phi(p . p) / phi(p).

    ``projection`` is an (i, j) generator pair or a coordinate vector of a
    projection in the algebra.  Conditioning on an event of probability
    below tol raises :class:`NullEvent`.
    """
    p = _event_coords(phi.group, projection)
    weight = np.real(phi(p))
    if weight <= tol:
        raise NullEvent(f"event has probability {weight:.3e}")
    left = np.einsum("a,ars->rs", p, phi.group.mult)
    right = np.einsum("sbt,b->st", phi.group.mult, p)
    new_coords = left @ (right @ phi.coords) / weight
    return state(phi.group, new_coords, label=f"{phi.label}|cond")


def sequential_probability(phi: QuantumPermutation, events, tol: float = DEFAULT_TOL) -> float:
    """Probability of an ordered chain of projection events.

    ``events`` lists projections in measurement order (first measured
    first); the value is the state applied to |p_n ... p_1|^2, expanded as
    p_1 ... p_n ... p_1 through the multiplication tensor.
    """
    if not events:
        return 1.0
    coords = [_event_coords(phi.group, e) for e in events]
    prod = coords[0]
    for p in coords[1:]:
        prod = phi.group.multiply_coords(p, prod)
    square = phi.group.multiply_coords(phi.group.star_coords(prod), prod)
    value = phi(square)
    if abs(value.imag) > 100 * tol:
        raise NotAState(f"sequential probability has imaginary part {value.imag:.3e}")
    return float(value.real)


# ---------------------------------------------------------------------------
# convolution calculus
# ---------------------------------------------------------------------------

def convolve(phi: QuantumPermutation, psi: QuantumPermutation) -> QuantumPermutation:
    """Quantum group law: (phi * psi)(f) = (phi (x) psi) of the comultiplication."""
    if phi.group is not psi.group:
        raise GroupMismatch("states live on different groups")
    coords = np.einsum("rst,s,t->r", phi.group.comult, phi.coords, psi.coords)
    return state(phi.group, coords, label=f"{phi.label}*{psi.label}")


def reverse_state(phi: QuantumPermutation) -> QuantumPermutation:
    """Precomposition with the antipode; inverts deterministic permutations."""
    coords = phi.group.antipode_mat.T @ phi.coords
    return state(phi.group, coords, label=f"reverse({phi.label})")


def convolution_power(phi: QuantumPermutation, k: int) -> QuantumPermutation:
    if k < 1:
        raise ValueError("power must be >= 1")
    result = phi
    for _ in range(k - 1):
        result = convolve(result, phi)
    return result


@dataclass(frozen=True)
class CesaroReport:
    iterations: int
    sup_change: float
    converged: bool


def cesaro(phi: QuantumPermutation, n: int | None = None,
           sup_tol: float = CESARO_SUP_TOL, max_iter: int = CESARO_MAX_ITER):
    """Running Cesaro average of convolution powers with a convergence probe.

    Returns ``(average_state, report)``; when ``n`` is given exactly n terms
    are averaged, otherwise iteration stops once the sup-coordinate change
    of the average drops below ``sup_tol`` (capped at ``max_iter``).
    """
    limit = n if n is not None else max_iter
    power = phi.coords.copy()
    total = phi.coords.copy()
    average = total.copy()
    sup_change = np.inf
    iterations = 1
    for k in range(2, limit + 1):
        power = np.einsum("rst,s,t->r", phi.group.comult, power, phi.coords)
        total = total + power
        new_average = total / k
        sup_change = float(np.max(np.abs(new_average - average)))
        average = new_average
        iterations = k
        if n is None and sup_change < sup_tol:
            break
    return (state(phi.group, average, label=f"cesaro({phi.label})"),
            CesaroReport(iterations=iterations, sup_change=float(sup_change),
                         converged=sup_change < sup_tol))


def is_idempotent(phi: QuantumPermutation, tol: float = IDEMPOTENT_TOL) -> bool:
    squared = convolve(phi, phi)
    return float(np.max(np.abs(squared.coords - phi.coords))) <= tol


def support_projection(phi: QuantumPermutation, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Coordinates of the smallest projection with phi-value one.

    The null ideal {g : phi(g* g) = 0} is read from the kernel of the Gram
    matrix, realized as a left ideal A q via the range projection of the sum
    of g* g over a kernel basis; the support is 1 - q.
    """
    gram = phi.group.gram_matrix(phi.coords)
    eigvals, eigvecs = np.linalg.eigh((gram + dagger(gram)) / 2)
    scale = max(float(eigvals[-1]), 1.0)
    kernel = [eigvecs[:, k] for k in range(len(eigvals)) if eigvals[k] <= 100 * tol * scale]
    if not kernel:
        support = phi.group.unit_coords.copy()
    else:
        h_coords = np.zeros(phi.group.dim, dtype=complex)
        for c in kernel:
            h_coords += phi.group.multiply_coords(phi.group.star_coords(c), c)
        h_ambient = phi.group.from_coords(h_coords)
        q_ambient = range_projection(h_ambient, tol)
        q_coords, residual = phi.group.coords(q_ambient)
        if residual > 100 * tol:
            raise NotAState(f"support projection leaves the algebra (residual {residual:.3e})")
        support = phi.group.unit_coords - q_coords
    value = np.real(phi(support))
    if abs(value - 1.0) > 1e-7:
        raise NotAState(f"support has phi-value {value:.6g}, not 1")
    return support


def classify_idempotent(phi: QuantumPermutation, tol: float = IDEMPOTENT_TOL) -> str:
    """'haar-idempotent' | 'non-haar-idempotent' | 'not-idempotent'.

    A Haar idempotent is one whose null ideal is two-sided, equivalently
    whose complementary support projection commutes with every generator.
    """
    if not is_idempotent(phi, tol):
        return "not-idempotent"
    q = phi.group.unit_coords - support_projection(phi)
    worst = 0.0
    for i in range(phi.group.n):
        for j in range(phi.group.n):
            g = phi.group.gen_coords[i, j]
            comm = phi.group.multiply_coords(q, g) - phi.group.multiply_coords(g, q)
            worst = max(worst, float(np.max(np.abs(comm))))
    return "haar-idempotent" if worst <= 1e-7 else "non-haar-idempotent"


def quasi_subgroup_membership(phi: QuantumPermutation, idempotent: QuantumPermutation,
                              tol: float = IDEMPOTENT_TOL) -> bool:
    """Whether phi gives full weight to the support of an idempotent state."""
    if not is_idempotent(idempotent, tol):
        raise NotIdempotent("reference state is not idempotent")
    support = support_projection(idempotent)
    return float(np.real(phi(support))) >= 1.0 - tol


def truly_quantum_check(phi: QuantumPermutation, tol: float = DEFAULT_TOL) -> bool:
    """True when phi vanishes on every one-dimensional block."""
    blocks = phi.group.one_dim_block_projections()
    if not blocks:
        return True
    p_c = sum(b.projection_coords for b in blocks)
    return float(np.real(phi(p_c))) <= 100 * tol


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FixSpectrum:
    """Spectral data of the number-of-fixed-points observable sum_j u_jj."""

    values: tuple[float, ...]
    projections: tuple[np.ndarray, ...]     # coordinates of each p_lambda


def fix_spectrum(group: HopfData, tol: float = DEFAULT_TOL) -> FixSpectrum:
    fix_ambient = np.einsum("jjab->ab", np.asarray(group.magic.entries))
    values, projections = hermitian_eigen(fix_ambient, tol)
    coords = []
    for proj in projections:
        c, residual = group.coords(proj)
        if residual > 100 * tol:
            from .errors import ProjectionOutsideAlgebra
            raise ProjectionOutsideAlgebra(
                f"spectral projection residual {residual:.3e}; carrier mismatch")
        coords.append(frozen(c.reshape(1, -1))[0])
    return FixSpectrum(values=tuple(values), projections=tuple(coords))


def fixed_points_of(phi: QuantumPermutation, tol: float = FIXED_POINT_TOL,
                    spectrum: FixSpectrum | None = None):
    """Distribution of phi over the fixed-point spectrum, plus a sharp value.

    Returns ``(lam, distribution)`` where ``lam`` is the spectral value
    carrying weight >= 1 - tol (or None) and ``distribution`` maps each
    spectral value to its probability.  The mean of the distribution always
    matches the trace of the Birkhoff slice.
    """
    spec = spectrum if spectrum is not None else fix_spectrum(phi.group)
    dist = {}
    for lam, proj in zip(spec.values, spec.projections):
        weight = float(np.real(phi(proj)))
        dist[lam] = weight
    mean = sum(lam * w for lam, w in dist.items())
    trace = birkhoff_slice(phi).trace()
    if abs(mean - trace) > 1e-7:
        raise NotAState(f"fixed-point mean {mean:.6g} disagrees with slice trace {trace:.6g}")
    sharp = [lam for lam, w in dist.items() if w >= 1.0 - tol]
    return (sharp[0] if sharp else None), dist


def central_character_eval(n: int, t: float) -> float:
    """Value of the n-th character of the universal central algebra at t.

    Computed as the Chebyshev polynomial of the second kind of degree 2n
    evaluated at sqrt(t)/2; the central quantum-transposition value is the
    case t = N - 2.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    x = np.sqrt(t) / 2.0
    u_prev, u_curr = 1.0, 2.0 * x       # U_0, U_1
    if n == 0:
        return 1.0
    for _ in range(2 * n - 1):
        u_prev, u_curr = u_curr, 2.0 * x * u_curr - u_prev
    return float(u_curr)


def twisted_conjugate(phi: QuantumPermutation, sigma, tau) -> QuantumPermutation:
    """ev_{sigma^{-1}} * phi * ev_tau for deterministic sigma, tau."""
    group = phi.group
    ev_sigma_inv = character_state(group, perm_inverse(tuple(sigma)))
    ev_tau = character_state(group, tuple(tau))
    return convolve(convolve(ev_sigma_inv, phi), ev_tau)
