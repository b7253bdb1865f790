"""Dense complex matrix helpers and the unitarily invariant norm family.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Every
public function accepts anything ``numpy.asarray`` understands and validates
that it is a finite square matrix.

Norm selectors are :class:`SchattenIndex` values::

    >>> import numpy as np
    >>> norm(np.diag([3.0, -4.0]), SchattenIndex.schatten(2))
    5.0
    >>> norm(np.diag([3.0, -4.0]), "op")
    4.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidMatrix, NonNormalMatrix

__all__ = [
    "SchattenIndex",
    "SvdResult",
    "SpectralResult",
    "as_index",
    "as_matrix",
    "norm",
    "abs_matrix",
    "svd",
    "spectral_normal",
    "commutator",
    "unitarity_residual",
    "is_unitary",
    "dominates",
    "gaussian_matrix",
    "haar_unitary",
    "random_psd",
    "matrix_to_json",
    "matrix_from_json",
    "SV_ZERO",
]

# singular values below this are treated as exact zeros
SV_ZERO = 1e-12


@dataclass(frozen=True)
class SchattenIndex:
    """Selects one of the unitarily invariant norms.

    ``kind`` is one of ``"schatten"``, ``"op"``, ``"fro"`` and ``"hs"``;
    ``p`` is only meaningful for ``"schatten"``. Use the constructors
    rather than building instances by hand, they normalise ``p = inf`` to
    the operator norm.
    """

    kind: str
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("schatten", "op", "fro", "hs"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "schatten" and not (self.p >= 1):
            raise ValueError(f"Schatten exponent must satisfy p >= 1, got {self.p}")

    @classmethod
    def schatten(cls, p: float) -> "SchattenIndex":
        p = float(p)
        if math.isinf(p) and p > 0:
            return cls("op", math.inf)
        return cls("schatten", p)

    @classmethod
    def op(cls) -> "SchattenIndex":
        return cls("op", math.inf)

    @classmethod
    def frobenius(cls) -> "SchattenIndex":
        return cls("fro", 2.0)

    @classmethod
    def hs(cls) -> "SchattenIndex":
        return cls("hs", 2.0)

    @property
    def exponent(self) -> float | None:
        """Schatten exponent of the norm, ``None`` for the normalised HS norm."""
        if self.kind == "op":
            return math.inf
        if self.kind == "hs":
            return None
        return self.p

    @property
    def label(self) -> str:
        if self.kind == "schatten":
            return f"schatten-{self.p:g}"
        return self.kind

    def __str__(self) -> str:
        return self.label


IndexLike = Union[SchattenIndex, str, int, float]


def as_index(idx: IndexLike) -> SchattenIndex:
    """Coerce ``idx`` into a :class:`SchattenIndex`.

    Accepts an existing index, a number (the Schatten exponent, ``inf`` for
    the operator norm) or one of the strings ``"op"``, ``"operator"``,
    ``"inf"``, ``"fro"``, ``"frobenius"``, ``"hs"``, ``"schatten-<p>"``.
    """
    if isinstance(idx, SchattenIndex):
        return idx
    if isinstance(idx, (int, float)) and not isinstance(idx, bool):
        return SchattenIndex.schatten(idx)
    if isinstance(idx, str):
        key = idx.strip().lower()
        if key in ("op", "operator", "inf", "infinity", "∞"):
            return SchattenIndex.op()
        if key in ("fro", "frobenius"):
            return SchattenIndex.frobenius()
        if key in ("hs", "normalized-hs", "normalizedhs"):
            return SchattenIndex.hs()
        if key.startswith("schatten-"):
            key = key[len("schatten-"):]
        try:
            return SchattenIndex.schatten(float(key))
        except ValueError:
            pass
    raise ValueError(f"cannot interpret {idx!r} as a norm selector")


def dominates(idx_p: IndexLike, idx_q: IndexLike) -> bool:
    """True when ``norm(A, idx_q) <= norm(A, idx_p)`` for every square ``A``.

    Schatten norms decrease in the exponent, and the normalised HS norm is
    below the operator norm, hence below every Schatten norm.
    """
    idx_p, idx_q = as_index(idx_p), as_index(idx_q)
    if idx_q.kind == "hs":
        return True
    if idx_p.kind == "hs":
        return False
    return idx_p.exponent <= idx_q.exponent


class SvdResult(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


class SpectralResult(NamedTuple):
    basis: np.ndarray
    eigenvalues: np.ndarray


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    return A


def _singular_values(A: np.ndarray) -> np.ndarray:
    return np.linalg.svd(A, compute_uv=False)


def _schatten_from_sv(s: np.ndarray, p: float) -> float:
    top = float(s[0]) if s.size else 0.0
    if top == 0.0:
        return 0.0
    # scale by the largest singular value so large p cannot overflow
    return top * float(np.sum((s / top) ** p)) ** (1.0 / p)


def norm(A, idx: IndexLike = "fro") -> float:
    """Unitarily invariant norm of ``A``, computed from its singular values."""
    A = as_matrix(A)
    idx = as_index(idx)
    s = _singular_values(A)
    if idx.kind == "op":
        return float(s[0])
    if idx.kind == "fro":
        return float(np.sqrt(np.sum(s**2)))
    if idx.kind == "hs":
        return float(np.sqrt(np.sum(s**2) / A.shape[0]))
    return _schatten_from_sv(s, idx.p)


def svd(M) -> SvdResult:
    """``M = left @ diag(singular_values) @ right.conj().T``.

    Singular values are nonincreasing; values below ``SV_ZERO`` are
    reported as exact zeros.
    """
    M = as_matrix(M)
    U, s, Vh = np.linalg.svd(M)
    s = np.where(s < SV_ZERO, 0.0, s)
    return SvdResult(U, s, Vh.conj().T)


def abs_matrix(A) -> np.ndarray:
    """The positive square root ``|A| = sqrt(A* A)``."""
    A = as_matrix(A)
    _, s, Vh = np.linalg.svd(A)
    V = Vh.conj().T
    out = (V * s) @ Vh
    return (out + out.conj().T) / 2


def spectral_normal(A, tol: float = 1e-6) -> SpectralResult:
    """Unitary diagonalisation of a normal matrix.

    Uses the complex Schur form, which is diagonal for normal input and
    always comes with a unitary basis, even for repeated eigenvalues.
    Eigenvalues are ordered by descending real part, then descending
    imaginary part.

    Raises
    ------
    NonNormalMatrix
        If ``||A A* - A* A||_op > tol * (1 + ||A||_op^2)``.
    """
    A = as_matrix(A)
    scale = float(_singular_values(A)[0])
    residual = float(_singular_values(A @ A.conj().T - A.conj().T @ A)[0])
    if residual > tol * (1.0 + scale**2):
        raise NonNormalMatrix(f"normality residual {residual:.3e} exceeds tolerance")
    T, Z = scipy.linalg.schur(A, output="complex")
    eig = np.diag(T).copy()
    order = np.lexsort((-eig.imag, -eig.real))
    return SpectralResult(Z[:, order], eig[order])


def commutator(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot commute shapes {A.shape} and {B.shape}")
    return A @ B - B @ A


def unitarity_residual(U) -> float:
    """``||U* U - 1||_op``."""
    U = as_matrix(U)
    return float(_singular_values(U.conj().T @ U - np.eye(U.shape[0]))[0])


def is_unitary(U, tol: float = 1e-8) -> bool:
    return unitarity_residual(U) <= tol


def gaussian_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Matrix with i.i.d. standard complex Gaussian entries."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction of Mezzadri."""
    Q, R = np.linalg.qr(gaussian_matrix(n, rng))
    d = np.diag(R)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return Q * phases


def random_psd(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    G = gaussian_matrix(n, rng)
    if rank is not None:
        G = G[:, :rank]
    return G @ G.conj().T


def matrix_to_json(A) -> dict:
    """``{"dim": n, "entries": [[re, im], ...]}`` in row-major order."""
    A = as_matrix(A)
    return {
        "dim": int(A.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"malformed matrix payload: {exc}") from None
    if dim < 1 or len(entries) != dim * dim:
        raise InvalidMatrix(
            f"payload is not square: dim={dim} but {len(entries)} entries"
        )
    try:
        flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"entries must be [re, im] pairs: {exc}") from None
    return as_matrix(flat.reshape(dim, dim))
