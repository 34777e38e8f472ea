"""Small complex-matrix kernels and a closed-form 2x2 singular value decomposition.

Matrices are plain ``numpy.ndarray`` values with ``complex128`` entries.
Every function here is pure: inputs are never mutated and results are
freshly allocated, so concurrent use needs no locking.  The SVD is fully
deterministic (a fixed phase convention removes the usual sign/phase
freedom), which the quantized-feedback path relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError

__all__ = [
    "SvdFactorization",
    "as_matrix",
    "mat_mul",
    "conj_transpose",
    "mat_inv",
    "fro_norm",
    "svd2x2",
    "orthonormal_complement",
]

# Pivots and determinants below _SINGULAR_TOL * ||a||_F count as singular.
_SINGULAR_TOL = 1e-14
# Below lambda2 <= _RANK_TOL * lambda1 the second left singular vector is
# completed by orthogonality instead of the (numerically useless) h @ v / s.
_RANK_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (no copy if already one)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def mat_mul(a, b) -> np.ndarray:
    """Matrix product a @ b with an explicit dimension check."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def conj_transpose(a) -> np.ndarray:
    """Conjugate transpose, returned as a fresh array."""
    return as_matrix(a).conj().T.copy()


def fro_norm(a) -> float:
    """Frobenius norm sqrt(sum |a_ij|^2)."""
    return float(np.linalg.norm(as_matrix(a)))


def mat_inv(a) -> np.ndarray:
    """Invert a square complex matrix.

    2x2 inputs go through the adjugate/determinant formula; larger ones
    through Gauss-Jordan elimination with partial pivoting.  Raises
    :class:`SingularMatrixError` when the determinant (2x2) or a pivot
    falls at or below ``1e-14 * ||a||_F``.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {a.shape}")
    scale = float(np.linalg.norm(a))
    tol = _SINGULAR_TOL * scale
    if n == 2:
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det) <= tol:
            raise SingularMatrixError(
                f"2x2 determinant {abs(det):.3e} below tolerance {tol:.3e}"
            )
        return np.array(
            [[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]], dtype=np.complex128
        ) / det

    aug = np.concatenate([a.astype(np.complex128, copy=True), np.eye(n, dtype=np.complex128)], axis=1)
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[pivot_row, col]
        if abs(pivot) <= tol:
            raise SingularMatrixError(
                f"pivot {abs(pivot):.3e} in column {col} below tolerance {tol:.3e}"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:].copy()


def orthonormal_complement(v: np.ndarray) -> np.ndarray:
    """Unit 2-vector orthogonal to ``v``: [-conj(v1), conj(v0)].

    The inner product with ``v`` cancels exactly even in floating point.
    No unit-norm check is done here; see
    :func:`gmud.decomposition.complete_orthonormal` for the checked variant.
    """
    return np.array([-np.conj(v[1]), np.conj(v[0])], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class SvdFactorization:
    """h = u @ diag(lambda1, lambda2) @ v^H with lambda1 >= lambda2 >= 0.

    ``u`` and ``v`` are 2x2 unitary; in each column of ``v`` the entry of
    largest magnitude is real and nonnegative (largest-row-index wins ties),
    which makes the factorization a deterministic function of ``h``.
    """

    u: np.ndarray
    lambda1: float
    lambda2: float
    v: np.ndarray

    @property
    def principal_vector(self) -> np.ndarray:
        """First column of v (right singular vector of lambda1)."""
        return self.v[:, 0].copy()

    def reconstruct(self) -> np.ndarray:
        return (self.u * np.array([self.lambda1, self.lambda2])) @ self.v.conj().T


def _fix_column_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real nonnegative."""
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = 0 if abs(col[0]) >= abs(col[1]) else 1
        mag = abs(col[i])
        if mag > 0.0:
            out[:, j] = col * (np.conj(col[i]) / mag)
            # force the pivot exactly real (its imaginary part is already 0
            # up to rounding of conj(z)*z, which is exact)
            out[i, j] = out[i, j].real
    return out


def svd2x2(h) -> SvdFactorization:
    """Closed-form SVD of a 2x2 complex matrix.

    Eigen-decomposes w = h^H h: the large eigenvalue comes from the
    quadratic formula with the cancellation-free discriminant
    (w00-w11)^2 + 4|w01|^2, the small one from mu2 = det(w)/mu1 so that
    lambda1*lambda2 matches |det h| to full precision.  Left vectors are
    h @ v_i / lambda_i, re-orthonormalized; when lambda2 <= 1e-12*lambda1
    the second left vector is completed by orthogonality instead.  The
    zero matrix yields lambda1 = lambda2 = 0 with u = v = I.
    """
    h = as_matrix(h)
    if h.shape != (2, 2):
        raise ValueError(f"svd2x2 requires a 2x2 matrix, got {h.shape}")
    if not np.any(h):
        eye = np.eye(2, dtype=np.complex128)
        return SvdFactorization(eye, 0.0, 0.0, eye.copy())

    w = h.conj().T @ h
    w00 = w[0, 0].real
    w11 = w[1, 1].real
    w01 = w[0, 1]
    disc = (w00 - w11) ** 2 + 4.0 * (w01.real**2 + w01.imag**2)
    mu1 = 0.5 * ((w00 + w11) + np.sqrt(disc))
    det_h = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    det_w = det_h.real**2 + det_h.imag**2
    mu2 = min(det_w / mu1, mu1)

    # two closed-form eigenvector candidates for mu1; take the better-scaled one
    cand1 = np.array([w01, mu1 - w00], dtype=np.complex128)
    cand2 = np.array([mu1 - w11, np.conj(w01)], dtype=np.complex128)
    n1 = np.linalg.norm(cand1)
    n2 = np.linalg.norm(cand2)
    if max(n1, n2) == 0.0:
        # w is a multiple of the identity; any orthonormal basis works
        v = np.eye(2, dtype=np.complex128)
    else:
        v1 = (cand1 / n1) if n1 >= n2 else (cand2 / n2)
        v = np.column_stack([v1, orthonormal_complement(v1)])
    v = _fix_column_phases(v)

    lambda1 = float(np.sqrt(mu1))
    lambda2 = float(np.sqrt(mu2))

    u1 = (h @ v[:, 0]) / lambda1
    u1 = u1 / np.linalg.norm(u1)
    if lambda2 <= _RANK_TOL * lambda1:
        u2 = orthonormal_complement(u1)
    else:
        u2 = (h @ v[:, 1]) / lambda2
        u2 = u2 - (u1.conj() @ u2) * u1
        u2 = u2 / np.linalg.norm(u2)
    u = np.column_stack([u1, u2])
    return SvdFactorization(u, lambda1, lambda2, v)
