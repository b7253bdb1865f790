"""Randomised sweeps over the lemmas and pipelines, and report emission.

A sweep is described by an :class:`ExperimentConfig` and produces a
:class:`SweepReport`. Every trial draws from its own random stream derived
from ``(seed, dim, norm index, eps index, trial index)``, so reports do not
depend on execution order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .corrections import (
    BoundCertificate,
    certify,
    nearest_involution,
    nearest_unitary,
)
from .errors import AlmostRepError, ConfigError
from .groups import AlmostRep, catalog_rep, direct_sum, perturb
from .linalg import (
    SchattenIndex,
    abs_matrix,
    as_index,
    dominates,
    gaussian_matrix,
    haar_unitary,
    norm,
    random_psd,
)
from .pipelines import (
    central_separation_pipeline,
    compress,
    cross_norm_pipeline,
    deligne_pipeline,
)

__all__ = [
    "SCENARIOS",
    "ExperimentConfig",
    "TrialRecord",
    "SweepReport",
    "run",
    "emit",
    "CSV_COLUMNS",
]

SCENARIOS = ("verify-lemmas", "compress", "deligne", "central-separation", "cross-norm")
DEFAULT_NORMS = ["schatten-1", "schatten-1.5", "schatten-2", "schatten-3", "op"]
DEFAULT_GROUPS = {
    "compress": "quaternion8_irrep",
    "deligne": "quaternion8_irrep_plus_trivial",
    "central-separation": "quaternion8_irrep",
    "cross-norm": "quaternion8_irrep_plus_trivial",
}
CSV_COLUMNS = ["scenario", "dim", "norm", "eps", "trial", "lhs", "rhs", "ratio", "satisfied"]


@dataclass
class ExperimentConfig:
    """Sweep description; see the README for the JSON layout.

    ``dims`` only affects ``verify-lemmas``; the catalog scenarios run at
    the dimension of their catalog representation. ``norm_pairs`` is only
    read by ``cross-norm``; when omitted, every dominated ordered pair of
    distinct entries of ``norms`` is used.
    """

    scenario: str
    seed: int = 0
    dims: list[int] = field(default_factory=lambda: [4])
    norms: list[str] = field(default_factory=lambda: list(DEFAULT_NORMS))
    trials: int = 10
    eps_grid: list[float] = field(default_factory=lambda: [0.0])
    group: str | None = None
    tolerance: float = 1e-8
    delta: float = 1e-6
    norm_pairs: list[list[str]] | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario: must be one of {', '.join(SCENARIOS)}, got {self.scenario!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed: must be an integer")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials: must be an integer >= 1")
        if not self.dims:
            raise ConfigError("dims: must be non-empty")
        for i, d in enumerate(self.dims):
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise ConfigError(f"dims[{i}]: must be an integer >= 1")
        if not self.norms:
            raise ConfigError("norms: must be non-empty")
        for i, n in enumerate(self.norms):
            try:
                as_index(n)
            except ValueError as exc:
                raise ConfigError(f"norms[{i}]: {exc}") from None
        if not self.eps_grid:
            raise ConfigError("eps_grid: must be non-empty")
        for i, e in enumerate(self.eps_grid):
            if not isinstance(e, (int, float)) or isinstance(e, bool) or not e >= 0:
                raise ConfigError(f"eps_grid[{i}]: must be a nonnegative number")
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise ConfigError("tolerance: must be positive")
        if not (isinstance(self.delta, (int, float)) and self.delta > 0):
            raise ConfigError("delta: must be positive")
        if self.norm_pairs is not None:
            for i, pair in enumerate(self.norm_pairs):
                if len(pair) != 2:
                    raise ConfigError(f"norm_pairs[{i}]: must have two entries")
                try:
                    p, q = as_index(pair[0]), as_index(pair[1])
                except ValueError as exc:
                    raise ConfigError(f"norm_pairs[{i}]: {exc}") from None
                if not dominates(p, q):
                    raise ConfigError(f"norm_pairs[{i}]: {q.label} is not dominated by {p.label}")

    @classmethod
    def from_dict(cls, obj: dict, **overrides) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("<root>: config must be a JSON object")
        data = dict(obj)
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        for key in data:
            if key not in known:
                raise ConfigError(f"{key}: unknown field")
        if "scenario" not in data:
            raise ConfigError("scenario: missing")
        if "eps_grid" in data and isinstance(data["eps_grid"], list):
            data["eps_grid"] = [float(e) if isinstance(e, int) and not isinstance(e, bool) else e
                                for e in data["eps_grid"]]
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrialRecord:
    scenario: str
    dim: int
    norm: str
    eps: float
    trial: int
    inputs_hash: str
    certificates: list[BoundCertificate] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "dim": self.dim,
            "norm": self.norm,
            "eps": self.eps,
            "trial": self.trial,
            "inputs_hash": self.inputs_hash,
            "certificates": [c.to_dict() for c in self.certificates],
            "measured": self.measured,
            "error": self.error,
        }


@dataclass
class SweepReport:
    config: ExperimentConfig
    records: list[TrialRecord]

    @property
    def failures(self) -> list[dict]:
        out = []
        for r in self.records:
            for c in r.certificates:
                if not c.satisfied:
                    out.append({
                        "scenario": r.scenario, "dim": r.dim, "norm": r.norm,
                        "eps": r.eps, "trial": r.trial, "anchor": c.anchor,
                        "lhs": c.lhs, "rhs": c.rhs,
                    })
        return out

    @property
    def errors(self) -> list[dict]:
        return [
            {"scenario": r.scenario, "dim": r.dim, "norm": r.norm, "eps": r.eps,
             "trial": r.trial, "error": r.error}
            for r in self.records if r.error is not None
        ]

    @property
    def aggregate(self) -> dict:
        """Max lhs/rhs ratio per ``scenario|norm|dim``, skipping errored trials."""
        agg: dict[str, dict] = {}
        for r in self.records:
            if r.error is not None:
                continue
            key = f"{r.scenario}|{r.norm}|{r.dim}"
            slot = agg.setdefault(key, {"max_ratio": 0.0, "certificates": 0})
            for c in r.certificates:
                slot["max_ratio"] = max(slot["max_ratio"], c.ratio)
                slot["certificates"] += 1
        return agg

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "aggregate": self.aggregate,
            "failures": self.failures,
            "errors": self.errors,
        }


def _trial_rng(*coords: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([abs(int(c)) for c in coords]))


def _trial_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def _hash_arrays(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=np.complex128)).tobytes())
    return h.hexdigest()[:16]


def _hash_rep(rep: AlmostRep) -> str:
    return _hash_arrays(*rep.images)


def _verify_lemmas(rng, dim: int, idx: SchattenIndex, eps: float, tol: float):
    """One draw for every lemma-level inequality."""
    certs = []
    n = dim
    eye = np.eye(n)

    # almost-unitary correction; eps > 0 draws near-unitary inputs
    if eps > 0:
        M = haar_unitary(n, rng) + eps * gaussian_matrix(n, rng)
    else:
        M = gaussian_matrix(n, rng)
    _, c = nearest_unitary(M, idx)
    certs.append(c)

    # almost-involution correction
    if eps > 0:
        G = gaussian_matrix(n, rng)
        K = (G - G.conj().T) / 2
        V = haar_unitary(n, rng)
        base = V @ np.diag(rng.choice([-1.0, 1.0], size=n)) @ V.conj().T
        A = scipy.linalg.expm(eps * K / norm(K, "op")) @ base
    else:
        A = haar_unitary(n, rng)
    B, c = nearest_involution(A, idx)
    certs.append(c)
    certs.append(certify(norm(B @ B - eye, "op"), 1e-7, "op", "involution: ||B^2 - 1||_op <= 1e-7", tol))

    # norm properties
    X, Y, Z = (gaussian_matrix(n, rng) for _ in range(3))
    certs.append(certify(norm(X @ Y @ Z, idx), norm(X, "op") * norm(Y, idx) * norm(Z, "op"),
                         idx, "||ABC|| <= ||A||_op ||B|| ||C||_op", tol))
    nx = norm(X, idx)
    certs.append(certify(abs(nx - norm(X.conj().T, idx)), 0.0, idx, "||A|| = ||A*||", tol))
    certs.append(certify(abs(nx - norm(abs_matrix(X), idx)), 0.0, idx, "||A|| = |||A|||", tol))
    Pa = random_psd(n, rng)
    Pb = Pa + random_psd(n, rng, rank=max(1, n // 2))
    certs.append(certify(norm(Pa, idx), norm(Pb, idx), idx, "0 <= A <= B implies ||A|| <= ||B||", tol))
    U, W = haar_unitary(n, rng), haar_unitary(n, rng)
    certs.append(certify(abs(norm(U @ X @ W, idx) - nx), 1e-8 * nx, idx, "unitary invariance", tol))

    # monotonicity in the exponent and HS <= op
    p = idx.exponent
    if p is not None and math.isfinite(p):
        for q in (p + 0.5, 2 * p, math.inf):
            qi = SchattenIndex.schatten(q)
            certs.append(certify(norm(X, qi), nx, qi, f"Schatten monotonicity {idx.label} -> {qi.label}", tol))
    certs.append(certify(norm(X, "hs"), norm(X, "op"), "hs", "||A||_HS <= ||A||_op", tol))
    certs.append(certify(norm(X + Y, idx), nx + norm(Y, idx), idx, "triangle inequality", tol))
    return certs, {}, _hash_arrays(M, A, X, Y, Z)


def _split_group(name: str):
    parts = [p.strip() for p in name.split("+")]
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ConfigError("group: compress expects 'A' or 'A+B'")
    (pa, ra), (pb, rb) = catalog_rep(parts[0]), catalog_rep(parts[1])
    if pa.relators != pb.relators or pa.num_generators != pb.num_generators:
        raise ConfigError("group: the two summands must share a presentation")
    return pa, ra, rb


def _compress_trial(rng, group, idx, eps, tol):
    pres, ra, rb = group
    rep = perturb(direct_sum(ra, rb), eps, _trial_seed(rng))
    P = np.zeros((rep.dim, rep.dim))
    P[: ra.dim, : ra.dim] = np.eye(ra.dim)
    _, report = compress(rep, P, pres, idx)
    measured = {
        "max_commutator": max(report.per_generator_commutator),
        "defect_before": max(report.per_relator_before),
        "defect_after": max(report.per_relator_after),
        "max_slack": max(report.unitarization_slack),
    }
    return report.inequality_certificates, measured, _hash_rep(rep)


def _deligne_trial(rng, group, idx, eps, tol, delta):
    pres, base = group
    rep = perturb(base, eps, _trial_seed(rng))
    _, report = deligne_pipeline(rep, pres, idx, delta)
    measured = {
        "separation": report.separation,
        "involution_distance": report.involution_distance,
        "involution_bound": report.involution_bound,
        "projection_rank": report.projection_rank,
        "final_J_distance": report.final_J_distance,
        "unitarization_slack_J": report.compression.tracked[0].slack,
    }
    return report.chain_certificates + report.compression.inequality_certificates, measured, _hash_rep(rep)


def _central_trial(rng, group, idx, eps, tol):
    pres, base = group
    J = pres.central_marking
    if J is None:
        raise ConfigError("group: central-separation needs a catalog group with a central J")
    rep = perturb(base, eps, _trial_seed(rng))
    _, report, sep = central_separation_pipeline(rep, pres, 2, J, J, idx)
    measured = {
        "separation": sep,
        "expected_separation": report.notes["expected_separation"],
        "deviation_bound": report.notes["deviation_bound"],
        "character_exponent": report.notes["character_exponent"],
    }
    return report.inequality_certificates, measured, _hash_rep(rep)


def _cross_trial(rng, group, pair, eps, tol, delta):
    pres, base = group
    rep = perturb(base, eps, _trial_seed(rng))
    report = cross_norm_pipeline(rep, pres, pair[0], pair[1], delta)
    measured = {
        "p_final_J_distance": report.final_J_distance,
        "q_final_J_distance": report.q_final_J_distance,
        "p_defect": max(report.p_relator_defects),
        "q_defect": max(report.q_relator_defects),
    }
    return report.certificates, measured, _hash_rep(rep)


def _norm_pairs(config: ExperimentConfig) -> list[tuple[SchattenIndex, SchattenIndex]]:
    if config.norm_pairs is not None:
        return [(as_index(p), as_index(q)) for p, q in config.norm_pairs]
    idxs = [as_index(n) for n in config.norms]
    return [(p, q) for p in idxs for q in idxs if p != q and dominates(p, q)]


def _grid(config: ExperimentConfig):
    """Yield ``(dim, norm_index, norm_label, runner_args)`` cells in grid order."""
    sc = config.scenario
    if sc == "verify-lemmas":
        for d in config.dims:
            for ni, n in enumerate(config.norms):
                yield d, ni, as_index(n)
        return
    if sc == "cross-norm":
        for ni, pair in enumerate(_norm_pairs(config)):
            yield None, ni, pair
        return
    for ni, n in enumerate(config.norms):
        yield None, ni, as_index(n)


def _make_runner(config: ExperimentConfig) -> tuple[Callable, int | None]:
    sc, tol, delta = config.scenario, config.tolerance, config.delta
    if sc == "verify-lemmas":
        return (lambda rng, d, idx, eps: _verify_lemmas(rng, d, idx, eps, tol)), None
    name = config.group or DEFAULT_GROUPS[sc]
    try:
        if sc == "compress":
            group = _split_group(name)
            dim = group[1].dim + group[2].dim
            return (lambda rng, d, idx, eps: _compress_trial(rng, group, idx, eps, tol)), dim
        group = catalog_rep(name)
    except AlmostRepError as exc:
        raise ConfigError(f"group: {exc}") from None
    dim = group[1].dim
    if sc == "deligne":
        return (lambda rng, d, idx, eps: _deligne_trial(rng, group, idx, eps, tol, delta)), dim
    if sc == "central-separation":
        return (lambda rng, d, idx, eps: _central_trial(rng, group, idx, eps, tol)), dim
    return (lambda rng, d, pair, eps: _cross_trial(rng, group, pair, eps, tol, delta)), dim


def run(config: ExperimentConfig, workers: int = 1) -> SweepReport:
    """Execute the sweep ``dims x norms x eps_grid x trials`` and collect the records.

    Trial-level :class:`~almostrep.errors.AlmostRepError` exceptions are
    recorded on the trial and excluded from the aggregates. With
    ``workers > 1`` trials run on a thread pool; the report is identical.
    """
    config.validate()
    runner, fixed_dim = _make_runner(config)
    jobs = []
    for d, ni, idx in _grid(config):
        dim = fixed_dim if d is None else d
        label = idx.label if isinstance(idx, SchattenIndex) else f"{idx[0].label}->{idx[1].label}"
        for ei, eps in enumerate(config.eps_grid):
            for t in range(config.trials):
                jobs.append((dim, ni, label, idx, ei, float(eps), t))

    def one(job) -> TrialRecord:
        dim, ni, label, idx, ei, eps, t = job
        rng = _trial_rng(config.seed, dim, ni, ei, t)
        rec = TrialRecord(config.scenario, dim, label, eps, t, "")
        try:
            certs, measured, h = runner(rng, dim, idx, eps)
        except AlmostRepError as exc:
            if isinstance(exc, ConfigError):
                raise
            rec.error = f"{type(exc).__name__}: {exc}"
            return rec
        rec.certificates = [
            certify(c.lhs, c.rhs, c.idx, c.anchor, config.tolerance) for c in certs
        ]
        rec.measured = measured
        rec.inputs_hash = h
        return rec

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(j) for j in jobs]
    return SweepReport(config, records)


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def emit(report: SweepReport, format: str = "json") -> bytes:
    """Serialise a report. CSV has one row per certificate with columns ``CSV_COLUMNS``."""
    if format == "json":
        text = json.dumps(_json_safe(report.to_dict()), indent=2, sort_keys=True)
        return (text + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in report.records:
            for c in r.certificates:
                writer.writerow([
                    r.scenario, r.dim, r.norm, repr(r.eps), r.trial,
                    repr(c.lhs), repr(c.rhs), repr(c.ratio), str(c.satisfied).lower(),
                ])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {format!r}; expected 'json' or 'csv'")
