"""Dense complex linear-algebra kernel.

Everything downstream (magic unitaries, Hopf structure tensors, states)
runs through the handful of primitives in this module: Hermitian
eigendecomposition with eigenvalue clustering, Kronecker products, range
projections, PSD tests, Hilbert-Schmidt inner products and least-squares
solves.  Matrices are plain ``numpy`` complex arrays treated as immutable
values; every operation returns a fresh array.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPSD, ShapeMismatch

DEFAULT_TOL = 1e-9
CLUSTER_TOL = 1e-8


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d complex array and reject non-finite entries."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def op_norm(a: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermiticity_defect(a: np.ndarray) -> float:
    return op_norm(a - dagger(a))


def cluster_values(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted values into clusters whose consecutive gaps are <= tol."""
    order = np.argsort(values)
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and values[idx] - values[clusters[-1][-1]] <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [np.array(c) for c in clusters]


def hermitian_eigen(a, tol: float = DEFAULT_TOL, cluster_tol: float = CLUSTER_TOL):
    """Spectral decomposition of a Hermitian matrix with clustered eigenvalues.

    Returns ``(values, projections)`` where values are strictly increasing
    after merging eigenvalues closer than ``cluster_tol`` and each
    projection is the Hermitian idempotent onto the merged eigenspace.
    Raises :class:`NotHermitian` when ``||a - a*|| > tol``.
    """
    a = as_cmatrix(a)
    n, m = a.shape
    if n != m:
        raise ShapeMismatch(f"expected square matrix, got {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds tol {tol:.3e}")
    try:
        eigvals, eigvecs = np.linalg.eigh((a + dagger(a)) / 2)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    values = []
    projections = []
    for cluster in cluster_values(eigvals, cluster_tol):
        vecs = eigvecs[:, cluster]
        values.append(float(np.mean(eigvals[cluster])))
        projections.append(vecs @ dagger(vecs))
    return values, projections


def kron(a, b) -> np.ndarray:
    """Kronecker product with row-major index flattening."""
    return np.kron(as_cmatrix(a, "a"), as_cmatrix(b, "b"))


def psd_check(a, tol: float = DEFAULT_TOL) -> bool:
    """True iff the minimum clustered eigenvalue is >= -tol."""
    values, _ = hermitian_eigen(a, tol)
    return values[0] >= -tol


def range_projection(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the span of eigenvectors with eigenvalue > tol.

    The input must be Hermitian PSD within tol; a clustered eigenvalue below
    ``-tol`` raises :class:`NotPSD`.
    """
    values, projections = hermitian_eigen(h, tol)
    if values[0] < -tol:
        raise NotPSD(f"negative eigenvalue {values[0]:.3e} below -tol")
    out = np.zeros_like(as_cmatrix(h))
    for lam, proj in zip(values, projections):
        if lam > tol:
            out = out + proj
    return out


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a* b)."""
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def lstsq(a, y, tol: float = DEFAULT_TOL):
    """Least-squares solve min ||a x - y||; returns (solution, residual).

    The residual is reported rather than thresholded: callers decide what
    counts as membership.
    """
    a = as_cmatrix(a, "a")
    y = np.asarray(y, dtype=complex)
    x, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    residual = float(np.linalg.norm(a @ x - y))
    return x, residual
