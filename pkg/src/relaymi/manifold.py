"""Descent machinery on the group of unitary matrices."""

from __future__ import annotations

import numpy as np

__all__ = ["require_unitary", "project_to_stiefel", "stiefel_gradient"]


def require_unitary(v_mat: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Validate that v_mat is square unitary within tol (Frobenius)."""
    v_mat = np.asarray(v_mat, dtype=np.complex128)
    if v_mat.ndim != 2 or v_mat.shape[0] != v_mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {v_mat.shape}")
    defect = np.linalg.norm(v_mat.conj().T @ v_mat - np.eye(v_mat.shape[0]))
    if not np.isfinite(defect) or defect > tol:
        raise ValueError(f"matrix is not unitary: |V^H V - I|_F = {defect:.3e} > {tol:.1e}")
    return v_mat


def project_to_stiefel(w_mat: np.ndarray) -> np.ndarray:
    """Nearest unitary matrix to w_mat in Frobenius norm.

    With the SVD W = U diag(s) Vh, the minimizer of |W - Q|_F over unitary Q
    is U @ Vh; it is unique iff W has full rank.  Idempotent on unitary input.

    Raises numpy.linalg.LinAlgError when W is numerically rank deficient
    (the projection would not be unique).
    """
    w_mat = np.asarray(w_mat, dtype=np.complex128)
    if w_mat.ndim != 2 or w_mat.shape[0] != w_mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {w_mat.shape}")
    if not np.all(np.isfinite(w_mat.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    u_mat, s, vh_mat = np.linalg.svd(w_mat)
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise np.linalg.LinAlgError(
            f"projection target is rank deficient (singular values {s.min():.3e}..{s.max():.3e})"
        )
    return u_mat @ vh_mat


def stiefel_gradient(
    sigma: np.ndarray, lam: np.ndarray, v_mat: np.ndarray, e_mat: np.ndarray
) -> np.ndarray:
    """Manifold gradient of g(V) = -I(V) for the diagonalized channel model.

    With A = diag(sigma^2 * lambda), E the current MMSE matrix, and d the
    block dimension,

        grad = (-A V E + V E V^H A V) / d

    which is tangent at unitary V (V^H grad is skew-Hermitian, being the
    commutator of the Hermitian matrices E and V^H A V).  The 1/d scale makes
    this the Riemannian gradient of the per-channel-use MI in nats under the
    real-trace metric Re tr(X^H Y) — so Re<grad, D> matches directional
    finite differences of g along any tangent D.  The negated value is the
    line-search descent direction.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    v_mat = np.asarray(v_mat, dtype=np.complex128)
    e_mat = np.asarray(e_mat, dtype=np.complex128)
    d = v_mat.shape[0]
    if sigma.shape != (d,) or lam.shape != (d,):
        raise ValueError(
            f"sigma and lambda must have shape ({d},), got {sigma.shape} and {lam.shape}"
        )
    if e_mat.shape != (d, d):
        raise ValueError(f"E must be {d}x{d}, got {e_mat.shape}")
    if np.any(lam < 0):
        raise ValueError("lambda entries must be nonnegative")
    weights = (sigma**2 * lam)[:, None]  # A as a column for cheap row scaling
    ve = v_mat @ e_mat
    return (-weights * ve + ve @ v_mat.conj().T @ (weights * v_mat)) / d
