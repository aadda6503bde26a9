"""Symmetric eigendecomposition, Laplacian energy and heat-kernel diffusion distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

ASYMMETRY_TOL = 1e-10
MAX_JACOBI_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors in the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.size


def _symmetrized(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size:
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > ASYMMETRY_TOL * scale:
            raise ValueError("matrix is not symmetric")
    return 0.5 * (m + m.T)


def jacobi_eigh(m: np.ndarray, tol: float = 1e-14, max_sweeps: int = MAX_JACOBI_SWEEPS) -> Spectrum:
    """Cyclic Jacobi eigenvalue iteration.

    Sweeps all ``(p, q)`` pairs in row order, annihilating ``a[p, q]`` with a
    plane rotation, until the off-diagonal Frobenius norm drops below
    ``tol * ||a||_F``.
    """
    a = _symmetrized(m).copy()
    n = a.shape[0]
    v = np.eye(n)
    total = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * total or n < 2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NumericError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], v[:, order])


def eigh(m: np.ndarray, method: str = "lapack") -> Spectrum:
    """Eigendecomposition of a symmetric matrix.

    ``method="lapack"`` calls the LAPACK divide-and-conquer driver through
    numpy; ``method="jacobi"`` runs :func:`jacobi_eigh`.
    """
    if method == "jacobi":
        return jacobi_eigh(m)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    a = _symmetrized(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(str(exc)) from exc
    return Spectrum(w, v)


def laplacian_energy(m: np.ndarray, method: str = "frobenius") -> float:
    """Sum of squared eigenvalues; for a symmetric matrix this is the squared Frobenius norm."""
    m = np.asarray(m, dtype=np.float64)
    if method == "frobenius":
        return float(np.sum(m * m))
    if method == "eigen":
        if m.size == 0:
            return 0.0
        lam = eigh(m).eigenvalues
        return float(np.sum(lam * lam))
    raise ValueError(f"unknown energy method {method!r}")


def heat_kernel(s: Spectrum, t: float) -> np.ndarray:
    """``sum_k exp(-2 lambda_k t) phi_k phi_k^T``, the kernel behind the squared diffusion distance."""
    if t <= 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    phi = s.eigenvectors
    return (phi * np.exp(-2.0 * s.eigenvalues * t)) @ phi.T


def diffusion_distance_sq(s: Spectrum, i: int, j: int, t: float) -> float:
    if t <= 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    diff = s.eigenvectors[i] - s.eigenvectors[j]
    return float(np.sum(np.exp(-2.0 * s.eigenvalues * t) * diff * diff))


def diffusion_distance_matrix(s: Spectrum, t: float) -> np.ndarray:
    """All pairwise ``d_t^2(i, j)`` via ``H_ii + H_jj - 2 H_ij`` with ``H`` the heat kernel."""
    h = heat_kernel(s, t)
    diag = np.diag(h)
    d = diag[:, None] + diag[None, :] - 2.0 * h
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)
