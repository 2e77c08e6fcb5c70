"""Dense linear algebra helpers and the global tolerance policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotSquare


@dataclass(frozen=True)
class Tolerance:
    eq_tol: float = 1e-9
    psd_tol: float = 1e-10
    stat_tol: float = 2e-2

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "stat_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerance()


def _require_square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def stable_descending_order(values) -> np.ndarray:
    """Indices sorting ``values`` descending; ties keep their original order."""
    values = np.asarray(values, dtype=float)
    return np.argsort(-values, kind="stable")


def hermitian_eigendecomposition(m, tol: Tolerance = DEFAULT_TOL):
    """Eigenvalues (descending) and eigenvector columns of a Hermitian matrix.

    Raises NotHermitian when ``max|M - M^dagger|`` exceeds ``tol.eq_tol``.
    """
    m = _require_square(m).astype(complex)
    if m.size and np.max(np.abs(m - m.conj().T)) > tol.eq_tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    herm = (m + m.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    # eigh returns ascending; reversing keeps degenerate blocks contiguous
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    order = stable_descending_order(vals)
    return vals[order].real.copy(), vecs[:, order].copy()


def haar_random_unitary(d: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.

    The R diagonal phases are absorbed into Q so the distribution is exactly
    uniform. Pass either ``seed`` (deterministic) or an existing ``rng``.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    return haar_random_unitaries(d, 1, rng)[0]


def haar_random_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` independent Haar unitaries, shape (n, d, d)."""
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def is_doubly_stochastic(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = _require_square(np.asarray(m, dtype=float))
    if m.size == 0:
        return False
    return bool(
        np.all(m >= -tol.eq_tol)
        and np.all(np.abs(m.sum(axis=0) - 1) <= tol.eq_tol)
        and np.all(np.abs(m.sum(axis=1) - 1) <= tol.eq_tol)
    )


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0))


def clamp_spectrum(values, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Zero out eigenvalues below ``psd_tol`` and renormalise to total 1."""
    values = np.asarray(values, dtype=float).copy()
    values[values < tol.psd_tol] = 0.0
    total = values.sum()
    if total <= 0:
        raise ValueError("spectrum has no positive mass")
    return values / total


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def trace_distance(a, b) -> float:
    """Half the trace norm of a Hermitian difference."""
    diff = np.asarray(a) - np.asarray(b)
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def ket_to_projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def partial_trace(rho, dims, keep: int) -> np.ndarray:
    """Partial trace of a bipartite operator on ``dims = (dA, dB)``; keep 0 (A) or 1 (B)."""
    da, db = dims
    r = np.asarray(rho).reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)
