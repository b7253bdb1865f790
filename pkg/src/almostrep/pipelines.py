"""Compression to almost-invariant subspaces and the correction pipelines built on it.

All quantities in the reports are measured on the ambient space ``C^d`` of
the input almost-representation: a matrix ``X`` acting on ``Im P`` is
measured as ``Q X Q*``. For Schatten and operator norms this is the same as
measuring ``X`` itself; for the normalised HS norm it fixes the
normalisation at ``1/sqrt(d)`` so that every inequality chain compares like
with like.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corrections import (
    BoundCertificate,
    Projection,
    certify,
    nearest_involution,
    nearest_kth_root,
    nearest_unitary,
    negative_eigenprojection,
)
from .errors import (
    DimensionMismatch,
    NoCentralMarking,
    NoNegativeEigenspace,
    NoSeparatingCharacter,
    NormPairNotDominated,
    NotCentral,
    OrderViolation,
    SeparationBelowDelta,
)
from .groups import (
    AlmostRep,
    Character,
    Presentation,
    Word,
    evaluate_word,
    isotypic_projection,
    separation,
    tracked_letters,
)
from .linalg import IndexLike, SchattenIndex, as_index, dominates, matrix_to_json, norm

__all__ = [
    "TrackedWord",
    "CompressionReport",
    "DeligneReport",
    "compress",
    "deligne_pipeline",
    "cross_norm_pipeline",
    "central_separation_pipeline",
    "ambient_norm",
]


def ambient_norm(X, idx: IndexLike, ambient_dim: int) -> float:
    """Norm of ``X`` (acting on a subspace) viewed as an operator on ``C^ambient_dim``."""
    idx = as_index(idx)
    if idx.kind == "hs":
        return norm(X, "fro") / np.sqrt(ambient_dim)
    return norm(X, idx)


@dataclass
class TrackedWord:
    """A word whose image is compressed and re-unitarised directly."""

    word: Word
    commutator: float
    slack: float
    image: np.ndarray

    def to_dict(self) -> dict:
        return {
            "word": self.word.to_json(),
            "commutator": self.commutator,
            "unitarization_slack": self.slack,
            "image": matrix_to_json(self.image),
        }


@dataclass
class CompressionReport:
    idx: SchattenIndex
    rank: int
    per_generator_commutator: list[float]
    per_relator_before: list[float]
    per_relator_after: list[float]
    unitarization_slack: list[float]
    inequality_certificates: list[BoundCertificate]
    tracked: list[TrackedWord] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return all(c.satisfied for c in self.inequality_certificates)

    def to_dict(self) -> dict:
        return {
            "norm": self.idx.label,
            "rank": self.rank,
            "per_generator_commutator": self.per_generator_commutator,
            "per_relator_before": self.per_relator_before,
            "per_relator_after": self.per_relator_after,
            "unitarization_slack": self.unitarization_slack,
            "inequality_certificates": [c.to_dict() for c in self.inequality_certificates],
            "tracked": [t.to_dict() for t in self.tracked],
            "notes": self.notes,
        }


@dataclass
class DeligneReport:
    idx: SchattenIndex
    separation: float
    delta: float
    involution_distance: float
    involution_bound: float
    projection_rank: int
    final_J_distance: float
    evaluated_J_distance: float
    chain_certificates: list[BoundCertificate]
    compression: CompressionReport
    # filled in by cross_norm_pipeline
    idx_q: SchattenIndex | None = None
    p_relator_defects: list[float] = field(default_factory=list)
    q_relator_defects: list[float] = field(default_factory=list)
    q_final_J_distance: float | None = None
    transfer_certificates: list[BoundCertificate] = field(default_factory=list)

    @property
    def certificates(self) -> list[BoundCertificate]:
        return (self.chain_certificates + self.compression.inequality_certificates
                + self.transfer_certificates)

    @property
    def satisfied(self) -> bool:
        return all(c.satisfied for c in self.certificates)

    def to_dict(self) -> dict:
        out = {
            "norm": self.idx.label,
            "separation": self.separation,
            "delta": self.delta,
            "involution_distance": self.involution_distance,
            "involution_bound": self.involution_bound,
            "projection_rank": self.projection_rank,
            "final_J_distance": self.final_J_distance,
            "evaluated_J_distance": self.evaluated_J_distance,
            "chain_certificates": [c.to_dict() for c in self.chain_certificates],
            "compression": self.compression.to_dict(),
        }
        if self.idx_q is not None:
            out.update({
                "norm_q": self.idx_q.label,
                "p_relator_defects": self.p_relator_defects,
                "q_relator_defects": self.q_relator_defects,
                "q_final_J_distance": self.q_final_J_distance,
                "transfer_certificates": [c.to_dict() for c in self.transfer_certificates],
            })
        return out


def _letter(images: Sequence[np.ndarray], letter: tuple[int, int]) -> np.ndarray:
    g, e = letter
    return images[g] if e == 1 else images[g].conj().T


def _product(mats: Sequence[np.ndarray], n: int) -> np.ndarray:
    out = np.eye(n, dtype=np.complex128)
    for M in mats:
        out = out @ M
    return out


def compress(rep: AlmostRep, P, pres: Presentation, idx: IndexLike = "fro",
             tracked: Sequence[Word] = ()) -> tuple[AlmostRep, CompressionReport]:
    """Restrict ``rep`` to the range of ``P`` and re-unitarise.

    With ``Q`` an orthonormal basis of ``Im P`` the compressed images are
    ``Q* phi(g) Q``, and ``psi(g)`` is their unitary polar factor. Words in
    ``tracked`` are compressed and re-unitarised directly from ``phi(w)``
    instead of being multiplied out from generator images.

    The report certifies, in the norm ``idx``:

    * for cyclically adjacent letters ``x, y`` of relators and tracked words,
      ``||Pphi(x)P phi(y)P - P phi(xy) P|| <= ||phi(x)phi(y) - phi(xy)|| + ||[phi(x), P]||``;
    * for each relator ``r = x_1 ... x_m``, the telescoped form
      ``||prod P phi(x_i) P - P|| <= ||phi(r) - 1|| + sum_{i<m} ||[phi(x_i), P]||``
      and ``||psi(r) - 1|| <= ||prod P phi(x_i) P - P|| + sum_i ||psi(x_i) - Q* phi(x_i) Q||``;
    * ``||Q*phi(g)*P phi(g)Q - 1|| <= ||[phi(g), P]||`` (unitarisation slack);
    * ``||psi(g) - Q* phi(g) Q|| <= ||Q*phi(g)*P phi(g)Q - 1||`` (almost-unitary step).
    """
    idx = as_index(idx)
    if not isinstance(P, Projection):
        P = Projection.from_matrix(P)
    P.require_nonzero()
    d = rep.dim
    if P.dim != d:
        raise DimensionMismatch(f"projection has dim {P.dim}, rep has dim {d}")
    if rep.num_generators != pres.num_generators:
        raise DimensionMismatch("rep and presentation disagree on the generator count")

    Q, Pm, r = P.basis, P.matrix, P.rank
    Qh = Q.conj().T
    eye_r = np.eye(r)
    eye_d = np.eye(d)

    def amb(X):
        return ambient_norm(X, idx, d)

    certs: list[BoundCertificate] = []
    comm = [norm(U @ Pm - Pm @ U, idx) for U in rep.images]
    tilde = [Qh @ U @ Q for U in rep.images]
    slack, psi_images, unit_gap = [], [], []
    for g, T in enumerate(tilde):
        s = amb(T.conj().T @ T - eye_r)
        R, _ = nearest_unitary(T)
        gap = amb(R - T)
        slack.append(s)
        psi_images.append(R)
        unit_gap.append(gap)
        certs.append(certify(s, comm[g], idx, f"unitarization slack <= commutator (generator {g})"))
        certs.append(certify(gap, s, idx, f"almost-unitary on Im P (generator {g})"))

    for x, y in tracked_letters(list(pres.relators) + list(tracked)):
        phx, phy = _letter(rep.images, x), _letter(rep.images, y)
        phxy = evaluate_word(rep, Word((x, y)))
        lhs = amb(_letter(tilde, x) @ _letter(tilde, y) - Qh @ phxy @ Q)
        rhs = norm(phx @ phy - phxy, idx) + comm[x[0]]
        certs.append(certify(lhs, rhs, idx, f"compression inequality for letters {x}, {y}"))

    before, after = [], []
    for i, rel in enumerate(pres.relators):
        letters = rel.letters
        b = norm(evaluate_word(rep, rel) - eye_d, idx)
        t_prod = _product([_letter(tilde, x) for x in letters], r)
        t_def = amb(t_prod - eye_r)
        p_prod = _product([_letter(psi_images, x) for x in letters], r)
        a = amb(p_prod - eye_r)
        before.append(b)
        after.append(a)
        certs.append(certify(
            t_def, b + sum(comm[x[0]] for x in letters[:-1]), idx,
            f"telescoped compression bound (relator {i})"))
        certs.append(certify(
            a, t_def + sum(unit_gap[x[0]] for x in letters), idx,
            f"re-unitarised relator bound (relator {i})"))

    tracked_out = []
    for w in tracked:
        W = evaluate_word(rep, w)
        c = norm(W @ Pm - Pm @ W, idx)
        T = Qh @ W @ Q
        s = amb(T.conj().T @ T - eye_r)
        R, _ = nearest_unitary(T)
        certs.append(certify(s, c, idx, f"unitarization slack <= commutator (word {w.to_json()})"))
        certs.append(certify(amb(R - T), s, idx, f"almost-unitary on Im P (word {w.to_json()})"))
        tracked_out.append(TrackedWord(w, c, s, R))

    report = CompressionReport(idx, r, comm, before, after, slack, certs, tracked_out)
    return AlmostRep(tuple(psi_images)), report


def deligne_pipeline(rep: AlmostRep, pres: Presentation, idx: IndexLike = "schatten-1",
                     delta: float = 1e-6) -> tuple[AlmostRep, DeligneReport]:
    """Snap the image of the central involution J and compress onto its -1 eigenspace.

    Steps: ``A = phi(J)``; ``U`` = nearest involution to ``A``; ``P`` = the
    -1 spectral projection of ``U``; ``psi`` = compression of ``phi`` to
    ``Im P`` with J tracked. The chain certificates check

        ||psi(J) + 1|| <= ||psi(J) - Q*AQ|| + ||Q*(U - A)Q||
                       <= slack(J) + ||U - A||.

    Raises
    ------
    NoCentralMarking
        ``pres`` has no J.
    NoNegativeEigenspace
        ``A`` rounds to the identity (checked first).
    SeparationBelowDelta
        ``||phi(J) - 1|| < delta``.
    """
    idx = as_index(idx)
    J = pres.central_marking
    if J is None:
        raise NoCentralMarking("presentation has no central marking J")
    if delta <= 0:
        raise ValueError("delta must be positive")

    d = rep.dim
    A = evaluate_word(rep, J)
    U, inv_cert = nearest_involution(A, idx)
    P = negative_eigenprojection(U)
    if P.rank == 0:
        raise NoNegativeEigenspace("phi(J) rounds to the identity involution")
    sep = separation(rep, J, idx)
    if sep < delta:
        raise SeparationBelowDelta(f"||phi(J) - 1|| = {sep:.3e} < delta = {delta:.3e}")
    psi, crep = compress(rep, P, pres, idx, tracked=(J,))

    def amb(X):
        return ambient_norm(X, idx, d)

    Q = P.basis
    Qh = Q.conj().T
    eye_r = np.eye(P.rank)
    tJ = crep.tracked[0]
    final = amb(tJ.image + eye_r)
    t1 = amb(tJ.image - Qh @ A @ Q)
    t2 = amb(Qh @ (U - A) @ Q)
    inv_dist = inv_cert.lhs
    chain = [
        inv_cert,
        certify(amb(Qh @ U @ Q + eye_r), 0.0, idx, "U acts as -1 on Im P"),
        certify(final, t1 + t2, idx, "triangle: ||psi(J)+1|| <= ||psi(J)-PAP|| + ||P(U-A)P||"),
        certify(t1, tJ.slack, idx, "almost-unitary step for J"),
        certify(t2, inv_dist, idx, "compression contracts: ||P(U-A)P|| <= ||U-A||"),
        certify(final, tJ.slack + inv_dist, idx, "chain: ||psi(J)+1|| <= slack(J) + ||U-A||"),
    ]
    report = DeligneReport(
        idx=idx,
        separation=sep,
        delta=float(delta),
        involution_distance=inv_dist,
        involution_bound=inv_cert.rhs,
        projection_rank=P.rank,
        final_J_distance=final,
        evaluated_J_distance=amb(evaluate_word(psi, J) + eye_r),
        chain_certificates=chain,
        compression=crep,
    )
    return psi, report


def cross_norm_pipeline(rep: AlmostRep, pres: Presentation, idx_p: IndexLike,
                        idx_q: IndexLike, delta: float = 1e-6) -> DeligneReport:
    """Run :func:`deligne_pipeline` in norm ``idx_p`` and re-measure its output in ``idx_q``.

    ``idx_q`` must be dominated by ``idx_p``. Every re-measured relator
    defect of ``psi`` and the tracked ``||psi(J) + 1||`` are certified to
    be at most their ``idx_p`` counterparts.
    """
    idx_p, idx_q = as_index(idx_p), as_index(idx_q)
    if not dominates(idx_p, idx_q):
        raise NormPairNotDominated(f"{idx_q.label} is not dominated by {idx_p.label}")
    psi, report = deligne_pipeline(rep, pres, idx_p, delta)
    d = rep.dim
    eye_r = np.eye(psi.dim)
    q_defects = [ambient_norm(evaluate_word(psi, r) - eye_r, idx_q, d) for r in pres.relators]
    q_final = ambient_norm(report.compression.tracked[0].image + eye_r, idx_q, d)
    p_defects = list(report.compression.per_relator_after)
    transfer = [
        certify(q, p, idx_q, f"norm transfer {idx_p.label} -> {idx_q.label} (relator {i})")
        for i, (q, p) in enumerate(zip(q_defects, p_defects))
    ]
    transfer.append(certify(q_final, report.final_J_distance, idx_q,
                            f"norm transfer {idx_p.label} -> {idx_q.label} (||psi(J)+1||)"))
    report.idx_q = idx_q
    report.p_relator_defects = p_defects
    report.q_relator_defects = q_defects
    report.q_final_J_distance = q_final
    report.transfer_certificates = transfer
    return report


def _power_of(g0: Word, base: Word, k: int) -> int:
    target = g0.free_reduce()
    for m in sorted(range(-2 * k, 2 * k + 1), key=lambda m: (abs(m), -m)):
        if (base**m).free_reduce() == target:
            return m
    raise ValueError(f"g0 {g0.to_json()} is not a power of {base.to_json()}")


def central_separation_pipeline(rep: AlmostRep, pres: Presentation, N_order: int,
                                N_generator: Word, g0: Word, idx: IndexLike = "schatten-1",
                                order_tol: float = 1.0):
    """Separate ``g0`` inside a central cyclic subgroup by compressing to an isotypic component.

    The image of the generator of ``N = Z/k`` is snapped to an exact k-th
    root ``alpha``; the first character ``chi`` (in exponent order) with
    ``chi(g0) != 1`` and a nonzero isotypic component of ``alpha`` is
    selected and ``rep`` is compressed onto that component, tracking
    ``g0``. Returns ``(psi, report, separation)`` with
    ``separation = ||psi(g0) - 1||``; on an exact input ``psi(g0)`` is the
    scalar ``chi(g0)``.

    ``report.notes`` records the chosen character, the expected separation
    ``|chi(g0) - 1| * ||1_{Im P}||`` and a certified bound on the deviation
    from it.
    """
    idx = as_index(idx)
    k = int(N_order)
    if k < 1:
        raise ValueError("N_order must be positive")
    if not (pres.has_central(N_generator) or pres.central_marking == N_generator):
        raise NotCentral(f"presentation lacks centrality relators for {N_generator.to_json()}")
    m = _power_of(g0, N_generator, k) % k
    if m == 0:
        raise ValueError("g0 is trivial in Z/k; nothing to separate")

    d = rep.dim
    N_img = evaluate_word(rep, N_generator)
    order_gap = norm(np.linalg.matrix_power(N_img, k) - np.eye(d), "op")
    if order_gap > order_tol:
        raise OrderViolation(f"||phi(N)^{k} - 1||_op = {order_gap:.3e} exceeds {order_tol}")
    alpha, snap_cert = nearest_kth_root(N_img, k, idx)

    for e in range(k):
        chi = Character(k, e)
        if abs(chi(m) - 1) < 1e-12:
            continue
        P = isotypic_projection(alpha, chi)
        if P.rank >= 1:
            break
    else:
        raise NoSeparatingCharacter(
            "every character separating g0 has an empty isotypic component"
        )

    psi, report = compress(rep, P, pres, idx, tracked=(g0,))
    eye_r = np.eye(P.rank)
    tg = report.tracked[0]
    sep = ambient_norm(tg.image - eye_r, idx, d)
    value = chi(m)
    expected = ambient_norm((value - 1) * eye_r, idx, d)
    drift = norm(evaluate_word(rep, g0) - np.linalg.matrix_power(alpha, m), idx)
    bound = tg.slack + drift
    report.inequality_certificates.append(certify(
        abs(sep - expected), bound, idx,
        "|sep - |chi(g0)-1| ||1_P||| <= slack(g0) + ||phi(g0) - alpha^m||"))
    report.notes.update({
        "character_exponent": e,
        "character_order": k,
        "chi_g0": [value.real, value.imag],
        "g0_power": m,
        "expected_separation": expected,
        "deviation_bound": bound,
        "snap_certificate": snap_cert.to_dict(),
    })
    return psi, report, sep
