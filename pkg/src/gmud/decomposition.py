"""Multi-unitary decomposition of 2x2 complex matrices.

A matrix h with singular values lambda1 >= lambda2 factors as

    h = p @ R @ q^H,    R = [[r, 0], [z1, z2]],

for any prescribed r in [lambda2, lambda1].  A pair of real Givens
rotations turns diag(lambda1, lambda2) into R, and a diagonal phase
matrix M = diag(e^{i*theta1}, e^{i*theta2}) commutes with the singular
value matrix, so every phase pair yields a different unitary pair
(p, q) while R stays fixed.  The first column of q is a transmission
beam that keeps a constant angle arccos(c) to the principal right
singular vector as the phases sweep, tracing a cone whose aperture
shrinks to zero as r grows toward lambda1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg import SvdFactorization, as_matrix, orthonormal_complement, svd2x2

__all__ = [
    "GmudRotation",
    "SpecialR",
    "PhasePair",
    "GmudFactorization",
    "solve_rotations",
    "build_special_r",
    "phase_matrix",
    "gmud",
    "complete_orthonormal",
    "beam_from_feedback",
    "steered_beams",
    "beam_alignment",
]

TWO_PI = 2.0 * np.pi

# r may overshoot [lambda2, lambda1] by this relative amount (quantization
# round-off from the feedback path); it is clamped back onto the interval.
_R_EDGE_TOL = 1e-9
# lambda1 - lambda2 <= _DEGENERATE_TOL * lambda1 collapses the admissible
# interval to a point and the rotations to the identity.
_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class GmudRotation:
    """Real rotation coefficients with a^2 + b^2 = 1 and c^2 + s^2 = 1."""

    a: float
    b: float
    c: float
    s: float


@dataclass(frozen=True)
class SpecialR:
    """Lower-triangular factor [[r, 0], [z1, z2]]; r * z2 equals lambda1*lambda2."""

    r: float
    z1: float
    z2: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.r, 0.0], [self.z1, self.z2]], dtype=np.complex128)


@dataclass
class PhasePair:
    """Phases (theta1, theta2), normalized into [0, 2*pi)."""

    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        self.theta1 = float(self.theta1) % TWO_PI
        self.theta2 = float(self.theta2) % TWO_PI


@dataclass(eq=False)
class GmudFactorization:
    """One member of the unitary family: h = p @ rmat @ q^H."""

    p: np.ndarray
    rmat: SpecialR
    q: np.ndarray
    r: float
    phases: PhasePair
    source_svd: SvdFactorization = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        return self.p @ self.rmat.as_matrix() @ self.q.conj().T


def _checked_r(lambda1: float, lambda2: float, r: float) -> float:
    """Validate lambda2 <= r <= lambda1 (1e-9 relative slack) and clamp."""
    if not np.isfinite(r) or r <= 0.0:
        raise DomainError(f"r must be a positive real, got {r}")
    slack = _R_EDGE_TOL * lambda1
    if r < lambda2 - slack or r > lambda1 + slack:
        raise DomainError(
            f"r={r:.12g} outside singular-value interval "
            f"[{lambda2:.12g}, {lambda1:.12g}]"
        )
    return min(max(r, lambda2), lambda1)


def _rotation_factors(lambda1, lambda2, r):
    """Elementwise (a, b, c, s); ``r`` may be a scalar or an array.

    Shared by the scalar API and the vectorized beam-grid path so both
    produce bit-identical values.  Assumes r already lies in
    [lambda2, lambda1] and lambda1 > lambda2.
    """
    span = lambda1**2 - lambda2**2
    a = np.sqrt(np.maximum(r**2 - lambda2**2, 0.0) / span)
    b = np.sqrt(np.maximum(lambda1**2 - r**2, 0.0) / span)
    c = (lambda1 / r) * a
    s = (lambda2 / r) * b
    return a, b, c, s


def _is_degenerate(lambda1: float, lambda2: float) -> bool:
    return lambda1 - lambda2 <= _DEGENERATE_TOL * lambda1


def solve_rotations(lambda1: float, lambda2: float, r: float) -> GmudRotation:
    """Rotation coefficients placing r at the (1,1) entry of the triangular factor.

    Closed form: a = sqrt((r^2-lambda2^2)/(lambda1^2-lambda2^2)),
    b = sqrt(1-a^2), c = (lambda1/r)*a, s = (lambda2/r)*b.  These satisfy
    a*c*lambda1 + b*s*lambda2 = r and a*s*lambda1 - b*c*lambda2 = 0.
    Equal singular values collapse to the identity rotation (1, 0, 1, 0).

    Raises :class:`DomainError` when r falls outside [lambda2, lambda1]
    (with 1e-9 relative slack at the endpoints).
    """
    if lambda1 <= 0.0:
        raise DomainError("lambda1 must be positive")
    r = _checked_r(lambda1, lambda2, r)
    if _is_degenerate(lambda1, lambda2):
        return GmudRotation(1.0, 0.0, 1.0, 0.0)
    a, b, c, s = _rotation_factors(lambda1, lambda2, r)
    return GmudRotation(float(a), float(b), float(c), float(s))


def build_special_r(lambda1: float, lambda2: float, r: float) -> SpecialR:
    """Triangular factor entries z1 = b*c*lambda1 - a*s*lambda2, z2 = b*s*lambda1 + a*c*lambda2."""
    rot = solve_rotations(lambda1, lambda2, r)
    r = _checked_r(lambda1, lambda2, r)
    z1 = rot.b * rot.c * lambda1 - rot.a * rot.s * lambda2
    z2 = rot.b * rot.s * lambda1 + rot.a * rot.c * lambda2
    return SpecialR(r, float(z1), float(z2))


def phase_matrix(pp: PhasePair) -> np.ndarray:
    """diag(e^{i*theta1}, e^{i*theta2}); unitary by construction."""
    return np.diag(np.exp(1j * np.array([pp.theta1, pp.theta2])))


def gmud(h, r: float, pp: PhasePair | None = None) -> GmudFactorization:
    """Decompose a 2x2 complex matrix as p @ [[r,0],[z1,z2]] @ q^H.

    Parameters
    ----------
    h : array_like
        2x2 complex matrix.
    r : float
        Prescribed (1,1) entry, lambda2 <= r <= lambda1.
    pp : PhasePair, optional
        Phase parameters selecting the member of the unitary family;
        defaults to (0, 0).  The triangular factor is bit-identical for
        every phase choice.

    Returns
    -------
    GmudFactorization
        p = u @ M @ u0 and q = v @ M @ v0 with u0 = [[a,b],[-b,a]],
        v0 = [[c,s],[-s,c]] from :func:`solve_rotations` and
        M = :func:`phase_matrix`.
    """
    if pp is None:
        pp = PhasePair()
    svd = svd2x2(h)
    if svd.lambda1 <= 0.0:
        raise DomainError("zero matrix admits no positive r")
    rot = solve_rotations(svd.lambda1, svd.lambda2, r)
    r = _checked_r(svd.lambda1, svd.lambda2, r)
    z1 = rot.b * rot.c * svd.lambda1 - rot.a * rot.s * svd.lambda2
    z2 = rot.b * rot.s * svd.lambda1 + rot.a * rot.c * svd.lambda2
    rmat = SpecialR(r, float(z1), float(z2))

    u0 = np.array([[rot.a, rot.b], [-rot.b, rot.a]], dtype=np.complex128)
    v0 = np.array([[rot.c, rot.s], [-rot.s, rot.c]], dtype=np.complex128)
    m = phase_matrix(pp)
    p = svd.u @ m @ u0
    q = svd.v @ m @ v0
    return GmudFactorization(p, rmat, q, r, pp, svd)


def complete_orthonormal(v1) -> np.ndarray:
    """Unit 2-vector orthogonal to the unit vector ``v1``.

    Returns [-conj(v1[1]), conj(v1[0])]; the inner product with v1
    cancels exactly.  Raises :class:`DomainError` if ``v1`` is not unit
    norm to 1e-9.
    """
    v1 = np.asarray(v1, dtype=np.complex128)
    if v1.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {v1.shape}")
    nrm = np.linalg.norm(v1)
    if abs(nrm - 1.0) > 1e-9:
        raise DomainError(f"input must be unit norm, got ||v1|| = {nrm:.12g}")
    return orthonormal_complement(v1)


def steered_beams(lambda1: float, lambda2: float, v1, r, theta) -> np.ndarray:
    """Beam q1 = c * e^{i*theta} * v1 - s * v2 for broadcastable r, theta.

    ``r`` and ``theta`` may be scalars or arrays; the result has shape
    broadcast(r, theta) + (2,).  No domain checking: callers guarantee
    r in [lambda2, lambda1].  Scalar and grid evaluations share the same
    elementwise operations, so a grid entry is bit-identical to the
    corresponding scalar call.
    """
    v1 = np.asarray(v1, dtype=np.complex128)
    v2 = orthonormal_complement(v1)
    if _is_degenerate(lambda1, lambda2):
        c = np.ones(np.broadcast(np.asarray(r), np.asarray(theta)).shape)
        s = np.zeros_like(c)
    else:
        _, _, c, s = _rotation_factors(lambda1, lambda2, np.asarray(r, dtype=np.float64))
        c, s = np.broadcast_arrays(c, s)
    weight = c * np.exp(1j * np.asarray(theta, dtype=np.float64))
    weight, s = np.broadcast_arrays(weight, s)
    return weight[..., None] * v1 - s[..., None] * v2


def beam_from_feedback(lambda1: float, lambda2: float, v1, r: float, theta: float) -> np.ndarray:
    """Transmission beam built from reported (lambda1, lambda2, v1).

    Completes v1 with an arbitrary orthogonal second vector and returns
    the first column of V @ M(theta, 0) @ V0, i.e.
    c * e^{i*theta} * v1 - s * v2 (unit norm).  The alignment
    |v1^H q1| equals c for every theta.
    """
    if lambda1 <= 0.0:
        raise DomainError("lambda1 must be positive")
    v1 = np.asarray(v1, dtype=np.complex128)
    nrm = np.linalg.norm(v1)
    if abs(nrm - 1.0) > 1e-9:
        raise DomainError(f"v1 must be unit norm, got ||v1|| = {nrm:.12g}")
    r = _checked_r(lambda1, lambda2, r)
    return steered_beams(lambda1, lambda2, v1, r, float(theta))


def beam_alignment(lambda1: float, lambda2: float, r: float) -> float:
    """Cosine of the cone half-angle between the beam and the principal vector.

    Equals the rotation coefficient c; strictly increasing in r with
    c(lambda1) = 1.
    """
    return solve_rotations(lambda1, lambda2, r).c
