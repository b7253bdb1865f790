"""Acceptance suite; each test appends one pass/fail line to the terminal summary."""

import math

import numpy as np
import pytest

from almostrep import (
    ExperimentConfig,
    Word,
    catalog_rep,
    central_separation_pipeline,
    cross_norm_pipeline,
    deligne_pipeline,
    emit,
    nearest_involution,
    nearest_unitary,
    norm,
    perturb,
    run,
)
from almostrep.linalg import SchattenIndex, abs_matrix, gaussian_matrix, haar_unitary, random_psd

from conftest import ACCEPTANCE_LINES

TOL = 1e-8
DIMS = (1, 2, 4, 8, 16)
NORMS = [SchattenIndex.schatten(p) for p in (1, 1.5, 2, 3, math.inf)]


def _record(number: int, summary: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] criterion {number}: {summary}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _rngs(seed: int, count_per_dim: int):
    for dim in DIMS:
        for t in range(count_per_dim):
            yield dim, np.random.default_rng([seed, dim, t])


def test_criterion_1_nearest_unitary():
    worst, count = -math.inf, 0
    for dim, rng in _rngs(1, 200):
        M = gaussian_matrix(dim, rng)
        for idx in NORMS:
            _, cert = nearest_unitary(M, idx)
            worst = max(worst, cert.lhs - cert.rhs)
            count += 1
    _record(1, "||M - R|| <= ||M*M - 1|| + 1e-8 on 1000 Gaussian matrices x 5 norms",
            worst <= TOL and count == 5000, f"max lhs - rhs = {worst:.2e}")


def test_criterion_2_nearest_involution():
    worst, worst_sq, count = -math.inf, 0.0, 0
    for dim, rng in _rngs(2, 200):
        A = haar_unitary(dim, rng)
        for idx in NORMS:
            B, cert = nearest_involution(A, idx)
            worst = max(worst, cert.lhs - cert.rhs)
            worst_sq = max(worst_sq, norm(B @ B - np.eye(dim), "op"))
            count += 1
    ok = worst <= TOL and worst_sq <= 1e-7 and count == 5000
    _record(2, "||B - A|| <= ||1 - A^2|| + 1e-8 and ||B^2 - 1||_op <= 1e-7 on 1000 Haar unitaries",
            ok, f"max lhs - rhs = {worst:.2e}, max ||B^2-1|| = {worst_sq:.2e}")


def test_criterion_3_norm_properties():
    worst = {"sandwich": -math.inf, "adjoint/abs": 0.0, "psd order": -math.inf,
             "monotone": -math.inf, "hs<=op": -math.inf}
    for dim, rng in _rngs(3, 200):
        A, B, C = (gaussian_matrix(dim, rng) for _ in range(3))
        Pa = random_psd(dim, rng)
        Pb = Pa + random_psd(dim, rng)
        absB = abs_matrix(B)
        for idx in NORMS:
            nb = norm(B, idx)
            worst["sandwich"] = max(worst["sandwich"],
                                    norm(A @ B @ C, idx) - norm(A, "op") * nb * norm(C, "op"))
            worst["adjoint/abs"] = max(worst["adjoint/abs"], abs(nb - norm(B.conj().T, idx)),
                                       abs(nb - norm(absB, idx)))
            worst["psd order"] = max(worst["psd order"], norm(Pa, idx) - norm(Pb, idx))
        ps = sorted(rng.uniform(1, 6, size=2))
        worst["monotone"] = max(worst["monotone"], norm(A, ps[1]) - norm(A, ps[0]),
                                norm(A, "op") - norm(A, ps[1]))
        worst["hs<=op"] = max(worst["hs<=op"], norm(A, "hs") - norm(A, "op"))
    ok = all(v <= TOL for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    _record(3, "sandwich, adjoint/abs, PSD order, monotonicity, HS <= op on 1000 draws each", ok, detail)


C4_GROUPS = [
    "quaternion8_irrep",
    "quaternion8_irrep+quaternion8_irrep_plus_trivial",
    "dihedral(3)",
    "dihedral(4)",
    "cyclic(5,2)+cyclic(5,3)",
]
C4_KINDS = ("compression inequality", "unitarization slack", "almost-unitary on Im P")


def test_criterion_4_compression():
    instances, bad, kinds = 0, [], set()
    for g in C4_GROUPS:
        report = run(ExperimentConfig("compress", seed=4, group=g, eps_grid=[1e-3, 1e-2], trials=10))
        assert not report.errors
        instances += len(report.records)
        for rec in report.records:
            for c in rec.certificates:
                kinds.update(k for k in C4_KINDS if c.anchor.startswith(k))
        bad.extend(report.failures)
    ok = instances == 500 and not bad and kinds == set(C4_KINDS)
    _record(4, "compression, slack and almost-unitary certificates on 500 block compressions",
            ok, f"{instances} instances, {len(bad)} failures")


def test_criterion_5_deligne_exact():
    pres, rep = catalog_rep("quaternion8_irrep_plus_trivial")
    _, report = deligne_pipeline(rep, pres, "schatten-1")
    ok = (abs(report.involution_distance) <= 1e-9 and report.projection_rank == 2
          and abs(report.final_J_distance) <= 1e-9)
    _record(5, "exact Deligne pipeline has zero distances and rank 2", ok,
            f"involution {report.involution_distance:.1e}, rank {report.projection_rank}, "
            f"final {report.final_J_distance:.1e}")


C6_CONFIG = dict(scenario="deligne", seed=6, group="quaternion8_irrep_plus_trivial",
                 norms=["schatten-1"], eps_grid=[1e-2], trials=100)


def test_criterion_6_deligne_perturbed():
    report = run(ExperimentConfig(**C6_CONFIG))
    eps = 1e-2
    chain_gap = max(r.measured["final_J_distance"]
                    - r.measured["unitarization_slack_J"] - r.measured["involution_distance"]
                    for r in report.records)
    worst = max(r.measured["final_J_distance"] for r in report.records)
    ok = (len(report.records) == 100 and not report.errors and not report.failures
          and chain_gap <= TOL and worst <= 10 * eps)
    _record(6, "perturbed Deligne chain holds and ||psi(J)+1|| <= 10 eps over 100 seeds", ok,
            f"max chain gap {chain_gap:.1e}, max final {worst:.3e}")


def test_criterion_7_cross_norm():
    pres, base = catalog_rep("quaternion8_irrep_plus_trivial")
    pairs = [("schatten-1", "schatten-2"), ("schatten-1", "op"), ("schatten-2", "op"), ("op", "hs")]
    worst = -math.inf
    for p, q in pairs:
        for seed in range(100):
            rep = perturb(base, 1e-2, seed)
            r = cross_norm_pipeline(rep, pres, p, q)
            worst = max(worst, r.q_final_J_distance - r.final_J_distance,
                        *(b - a for a, b in zip(r.p_relator_defects, r.q_relator_defects)))
    _record(7, "q-measured defects and J distance never exceed p-measured ones", worst <= TOL,
            f"max excess {worst:.1e}")


def test_criterion_8_central_separation():
    pres, rep = catalog_rep("quaternion8_irrep")
    a2 = Word.gen(0, 2)
    _, _, sep = central_separation_pipeline(rep, pres, 2, a2, a2, "schatten-1")
    _record(8, "central separation of a^2 on the Q8 irrep equals 4", abs(sep - 4) <= 1e-9,
            f"separation {sep!r}")


def test_criterion_9_determinism():
    first = emit(run(ExperimentConfig(**C6_CONFIG)), "json")
    second = emit(run(ExperimentConfig(**C6_CONFIG)), "json")
    _record(9, "criterion 6 sweep reruns to byte-identical JSON", first == second,
            f"{len(first)} bytes")
