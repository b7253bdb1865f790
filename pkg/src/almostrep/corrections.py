"""Snapping almost-unitaries, almost-involutions and almost-roots of unity.

Each correction returns the corrected matrix together with a
:class:`BoundCertificate` recording the inequality that the correction is
supposed to satisfy, measured in the requested norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotInvolution, NotUnitary, NonzeroProjectionRequired
from .linalg import (
    IndexLike,
    SchattenIndex,
    as_index,
    as_matrix,
    norm,
    spectral_normal,
    svd,
    unitarity_residual,
)

__all__ = [
    "BoundCertificate",
    "Projection",
    "certify",
    "nearest_unitary",
    "nearest_involution",
    "nearest_kth_root",
    "negative_eigenprojection",
    "CERT_TOL",
]

CERT_TOL = 1e-8
UNITARY_TOL = 1e-6
INVOLUTION_TOL = 1e-6


@dataclass(frozen=True)
class BoundCertificate:
    """One instance ``lhs <= rhs`` of an inequality, measured in norm ``idx``."""

    lhs: float
    rhs: float
    idx: SchattenIndex
    satisfied: bool
    anchor: str = ""

    @property
    def ratio(self) -> float:
        """``lhs / rhs``; 0 when both sides are negligible, inf when only rhs is."""
        if self.rhs > CERT_TOL:
            return self.lhs / self.rhs
        return 0.0 if self.lhs <= CERT_TOL else math.inf

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "norm": self.idx.label,
            "satisfied": self.satisfied,
            "anchor": self.anchor,
        }


def certify(lhs: float, rhs: float, idx: IndexLike, anchor: str = "",
            tol: float = CERT_TOL) -> BoundCertificate:
    lhs, rhs = float(lhs), float(rhs)
    return BoundCertificate(lhs, rhs, as_index(idx), bool(lhs <= rhs + tol), anchor)


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection with its rank.

    ``basis`` holds an orthonormal basis of the range as columns, so that
    ``matrix == basis @ basis.conj().T``.
    """

    matrix: np.ndarray
    rank: int
    basis: np.ndarray

    @classmethod
    def from_matrix(cls, P, tol: float = 1e-8) -> "Projection":
        """Validate ``P`` as a Hermitian idempotent and extract its range.

        The range basis consists of the eigenvectors with eigenvalue above
        1/2.
        """
        P = as_matrix(P)
        herm = norm(P - P.conj().T, "op")
        idem = norm(P @ P - P, "op")
        if herm > tol or idem > tol:
            raise ValueError(
                f"not a projection: hermiticity {herm:.2e}, idempotence {idem:.2e}"
            )
        n = P.shape[0]
        if norm(P - np.eye(n), "op") <= tol:
            return cls(P, n, np.eye(n, dtype=np.complex128))
        w, V = np.linalg.eigh((P + P.conj().T) / 2)
        basis = _canonical_basis(V[:, w > 0.5])
        return cls(P, basis.shape[1], basis)

    @classmethod
    def from_basis(cls, basis) -> "Projection":
        basis = _canonical_basis(np.asarray(basis, dtype=np.complex128))
        return cls(basis @ basis.conj().T, basis.shape[1], basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def require_nonzero(self) -> None:
        if self.rank == 0:
            raise NonzeroProjectionRequired("projection has rank 0")


def _canonical_basis(V: np.ndarray) -> np.ndarray:
    """Order columns by the row of their largest-modulus entry and make that entry positive.

    Coordinate subspaces then come out as the standard basis vectors in order.
    """
    if V.shape[1] == 0:
        return V
    rows = np.argmax(np.abs(V) - 1e-9 * np.arange(V.shape[0])[:, None], axis=0)
    pivots = V[rows, np.arange(V.shape[1])]
    V = V * (np.abs(pivots) / pivots)
    return V[:, np.argsort(rows, kind="stable")]


def _check_unitary(A, tol: float) -> np.ndarray:
    A = as_matrix(A)
    res = unitarity_residual(A)
    if res > tol:
        raise NotUnitary(f"unitarity residual {res:.3e} exceeds {tol:.1e}")
    return A


def nearest_unitary(M, idx: IndexLike = "fro") -> tuple[np.ndarray, BoundCertificate]:
    """Unitary polar factor ``R = S V*`` of ``M = S diag(s) V*``.

    The certificate records ``||M - R|| <= ||M* M - 1||``, which holds in
    every unitarily invariant norm because ``|s - 1| <= |s^2 - 1|`` for each
    singular value ``s >= 0``.
    """
    M = as_matrix(M)
    S, _, V = svd(M)
    R = S @ V.conj().T
    n = M.shape[0]
    cert = certify(
        norm(M - R, idx),
        norm(M.conj().T @ M - np.eye(n), idx),
        idx,
        "almost-unitary: ||M - R|| <= ||M*M - 1||",
    )
    return R, cert


def _reassemble(basis: np.ndarray, values: np.ndarray) -> np.ndarray:
    return (basis * values) @ basis.conj().T


def nearest_involution(A, idx: IndexLike = "fro",
                       tol: float = UNITARY_TOL) -> tuple[np.ndarray, BoundCertificate]:
    """Round each eigenvalue of the unitary ``A`` to the sign of its real part.

    Eigenvalues on the imaginary axis go to +1. The result ``B`` is a
    Hermitian unitary with ``B^2 = 1``, and since ``B - A`` and ``1 - A^2``
    are diagonal in the same basis with entrywise dominated moduli,
    ``||B - A|| <= ||1 - A^2||`` for every unitarily invariant norm.
    """
    A = _check_unitary(A, tol)
    basis, eig = spectral_normal(A)
    signs = np.where(eig.real >= 0, 1.0, -1.0)
    B = _reassemble(basis, signs)
    B = (B + B.conj().T) / 2
    n = A.shape[0]
    cert = certify(
        norm(B - A, idx),
        norm(np.eye(n) - A @ A, idx),
        idx,
        "almost-involution: ||B - A|| <= ||1 - A^2||",
    )
    return B, cert


def _round_to_root(theta: float, k: int) -> int:
    """Index ``m`` of the k-th root ``exp(2 pi i m / k)`` nearest to angle ``theta``.

    Ties go to the root whose argument in (-pi, pi] is smaller in absolute
    value, then to the positive argument. For k = 2 this reproduces the
    sign-of-real-part rule with ties to +1.
    """
    t = theta * k / (2 * math.pi)
    lo = math.floor(t)
    d_lo, d_hi = t - lo, lo + 1 - t
    if abs(d_lo - d_hi) > 1e-12:
        return (lo if d_lo < d_hi else lo + 1) % k

    def key(m):
        ang = math.remainder(2 * math.pi * m / k, 2 * math.pi)
        return (round(abs(ang), 12), -ang)

    return min((lo, lo + 1), key=key) % k


def nearest_kth_root(A, k: int, idx: IndexLike = "fro",
                     tol: float = UNITARY_TOL) -> tuple[np.ndarray, BoundCertificate]:
    """Round each eigenvalue of the unitary ``A`` to the nearest k-th root of unity.

    The returned ``B`` satisfies ``B^k = 1``. The certificate compares
    ``||B - A||`` with ``||1 - A^k||``; it is guaranteed only for ``k <= 2``
    and merely reported otherwise.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    A = _check_unitary(A, tol)
    basis, eig = spectral_normal(A)
    if k == 2:
        roots = np.where(eig.real >= 0, 1.0 + 0j, -1.0 + 0j)
    else:
        ms = [_round_to_root(math.atan2(z.imag, z.real), k) for z in eig]
        roots = np.exp(2j * np.pi * np.array(ms, dtype=float) / k)
    B = _reassemble(basis, roots)
    if k <= 2:
        B = (B + B.conj().T) / 2
    n = A.shape[0]
    cert = certify(
        norm(B - A, idx),
        norm(np.eye(n) - np.linalg.matrix_power(A, k), idx),
        idx,
        f"almost-root (k={k}): ||B - A|| <= ||1 - A^k||",
    )
    return B, cert


def negative_eigenprojection(B, tol: float = INVOLUTION_TOL) -> Projection:
    """Orthogonal projection onto the -1 eigenspace of the involution ``B``.

    Equals ``(1 - B) / 2`` up to the involution slack of ``B``; it is built
    from the eigenvectors of the Hermitian part so the output is an exact
    projection.
    """
    B = as_matrix(B)
    n = B.shape[0]
    slack = norm(B @ B - np.eye(n), "op")
    if slack > tol:
        raise NotInvolution(f"||B^2 - 1||_op = {slack:.3e} exceeds {tol:.1e}")
    w, V = np.linalg.eigh((B + B.conj().T) / 2)
    return Projection.from_basis(V[:, w < 0])
