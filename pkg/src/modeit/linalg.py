"""Small dense complex-matrix kernel.

Everything here works on plain ``numpy`` arrays of shape ``(n, n)`` with
``n`` at most 9 (3x3 state-space operators, 9x9 superoperators).  The
Hermitian eigensolver is a cyclic complex Jacobi iteration; the general
exponential is scaling-and-squaring around a truncated Taylor series.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "NotHermitianError",
    "as_matrix",
    "check_hermitian",
    "hermitian_eig",
    "expm_hermitian",
    "expm_general",
    "commutator",
    "anticommutator",
]

HERMITIAN_RTOL = 1e-10
_TAYLOR_ORDER = 18  # 1/19! < 1e-17 for unit-norm argument
_MAX_SWEEPS = 50


class NotHermitianError(ValueError):
    """Raised when an operator required to be Hermitian is not."""


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a square complex array, rejecting anything else."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def check_hermitian(M, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    A = as_matrix(M)
    scale = np.linalg.norm(A)
    violation = np.linalg.norm(A - A.conj().T)
    if violation > rtol * max(scale, 1.0):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||M - M^H|| = {violation:.3e} "
            f"(||M|| = {scale:.3e}, rtol = {rtol:g})"
        )
    return A


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def hermitian_eig(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(w, V)`` with ``w`` real and ascending and ``V`` unitary, so
    that ``M = V @ diag(w) @ V^H``.  Within degenerate blocks the choice of
    eigenvectors is arbitrary.
    """
    A = check_hermitian(M).copy()
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)

    negligible = 1e-18 * scale
    for _ in range(_MAX_SWEEPS):
        if _off_norm(A) <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= negligible:
                    A[p, q] = A[q, p] = 0.0
                    continue
                # Phase rotation makes the pivot real, then a real Jacobi rotation kills it.
                phase = apq / r
                theta = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                G = np.eye(n, dtype=complex)
                G[p, p] = c
                G[q, q] = c * phase.conjugate()
                G[p, q] = s
                G[q, p] = -s * phase.conjugate()
                A = G.conj().T @ A @ G
                A[p, q] = A[q, p] = 0.0
                V = V @ G
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def expm_hermitian(H, t: float) -> np.ndarray:
    """Unitary propagator ``exp(-i H t)`` built from the eigendecomposition of ``H``."""
    w, V = hermitian_eig(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def expm_general(M) -> np.ndarray:
    """Matrix exponential of an arbitrary square matrix.

    The argument is scaled by ``2**-s`` with ``s = max(0, ceil(log2 ||M||_1))``,
    exponentiated by an order-18 Taylor polynomial (Horner form) and squared
    back ``s`` times.
    """
    A = as_matrix(M)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    norm1 = float(np.max(np.sum(np.abs(A), axis=0))) if n else 0.0
    s = max(0, math.ceil(math.log2(norm1))) if norm1 > 0 else 0
    X = A / (2.0**s)

    eye = np.eye(n, dtype=complex)
    E = eye.copy()
    for k in range(_TAYLOR_ORDER, 0, -1):
        E = eye + (X @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def commutator(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def anticommutator(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B + B @ A
