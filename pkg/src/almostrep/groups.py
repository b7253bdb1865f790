"""Finitely presented groups and their almost-representations.

A :class:`Word` is a tuple of ``(generator, exponent)`` letters with
exponent ``+1`` or ``-1``. An :class:`AlmostRep` assigns a unitary to each
generator; words are evaluated by multiplying images and their adjoints.
How far the images are from a genuine representation is measured on the
relators of a :class:`Presentation`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .corrections import Projection
from .errors import DimensionMismatch, NotUnitary, OrderViolation, UnknownGroup
from .linalg import (
    IndexLike,
    as_matrix,
    gaussian_matrix,
    matrix_from_json,
    matrix_to_json,
    norm,
    unitarity_residual,
)

__all__ = [
    "Word",
    "Presentation",
    "AlmostRep",
    "Character",
    "evaluate_word",
    "defect",
    "relator_defects",
    "pair_defect",
    "reduced_words",
    "dehn_reduce",
    "separation",
    "direct_sum",
    "isotypic_projection",
    "catalog_rep",
    "CATALOG_NAMES",
    "perturb",
    "tracked_letters",
]


@dataclass(frozen=True)
class Word:
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(e)) for g, e in self.letters)
        for g, e in letters:
            if g < 0 or e not in (1, -1):
                raise ValueError(f"bad letter ({g}, {e})")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def gen(cls, g: int, exp: int = 1) -> "Word":
        """``g ** exp`` written out letter by letter."""
        sign = 1 if exp >= 0 else -1
        return cls(((g, sign),) * abs(exp))

    @classmethod
    def parse(cls, text: str, alphabet: str = "abcdefghijklmnopqrstuvwxyz") -> "Word":
        """Lowercase letters are generators, uppercase their inverses: ``"abAB"``."""
        letters = []
        for ch in text.replace(" ", ""):
            if ch.lower() not in alphabet:
                raise ValueError(f"unknown letter {ch!r}")
            letters.append((alphabet.index(ch.lower()), 1 if ch.islower() else -1))
        return cls(tuple(letters))

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def free_reduce(self) -> "Word":
        out: list[tuple[int, int]] = []
        for g, e in self.letters:
            if out and out[-1] == (g, -e):
                out.pop()
            else:
                out.append((g, e))
        return Word(tuple(out))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def to_json(self) -> list:
        return [[g, e] for g, e in self.letters]

    @classmethod
    def from_json(cls, obj) -> "Word":
        return cls(tuple((g, e) for g, e in obj))


def _commutator_word(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class Presentation:
    """Generators ``0 .. num_generators - 1`` subject to ``relators``.

    When ``central_marking`` (the word J) is given, the relators
    ``J g J^-1 g^-1`` for every generator and ``J J`` are appended unless
    already present.
    """

    num_generators: int
    relators: tuple[Word, ...] = ()
    central_marking: Word | None = None

    def __post_init__(self):
        if self.num_generators < 1:
            raise ValueError("a presentation needs at least one generator")
        rels = list(self.relators)
        J = self.central_marking
        if J is not None:
            extra = [_commutator_word(J, Word.gen(g)) for g in range(self.num_generators)]
            extra.append(J * J)
            rels.extend(r for r in extra if r not in rels)
        for r in rels:
            if r.max_generator() >= self.num_generators:
                raise ValueError(f"relator {r.letters} uses an unknown generator")
        object.__setattr__(self, "relators", tuple(rels))

    def has_central(self, w: Word) -> bool:
        """Whether the centrality relators for ``w`` are part of the presentation."""
        needed = [_commutator_word(w, Word.gen(g)) for g in range(self.num_generators)]
        return all(r in self.relators or not r.free_reduce() for r in needed)

    def to_json(self) -> dict:
        return {
            "generators": self.num_generators,
            "relators": [r.to_json() for r in self.relators],
            "central_J": None if self.central_marking is None else self.central_marking.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Presentation":
        J = obj.get("central_J")
        return cls(
            int(obj["generators"]),
            tuple(Word.from_json(r) for r in obj["relators"]),
            None if J is None else Word.from_json(J),
        )


@dataclass(frozen=True)
class AlmostRep:
    """One unitary image per generator, all of dimension ``dim``."""

    images: tuple[np.ndarray, ...]
    tol: float = field(default=1e-8, compare=False)

    def __post_init__(self):
        images = tuple(as_matrix(U) for U in self.images)
        if not images:
            raise ValueError("an almost-representation needs at least one image")
        dims = {U.shape[0] for U in images}
        if len(dims) != 1:
            raise DimensionMismatch(f"images have differing dimensions {sorted(dims)}")
        for i, U in enumerate(images):
            res = unitarity_residual(U)
            if res > self.tol:
                raise NotUnitary(f"image {i} has unitarity residual {res:.3e}")
        for U in images:
            U.setflags(write=False)
        object.__setattr__(self, "images", images)

    @property
    def dim(self) -> int:
        return self.images[0].shape[0]

    @property
    def num_generators(self) -> int:
        return len(self.images)

    def to_json(self) -> dict:
        return {"dim": self.dim, "images": [matrix_to_json(U) for U in self.images]}

    @classmethod
    def from_json(cls, obj: dict) -> "AlmostRep":
        rep = cls(tuple(matrix_from_json(m) for m in obj["images"]))
        if rep.dim != int(obj["dim"]):
            raise DimensionMismatch(f"declared dim {obj['dim']} but images have dim {rep.dim}")
        return rep


def _check_indices(rep: AlmostRep, w: Word) -> None:
    if w.max_generator() >= rep.num_generators:
        raise IndexError(
            f"word uses generator {w.max_generator()} but rep has {rep.num_generators}"
        )


def evaluate_word(rep: AlmostRep, w: Word) -> np.ndarray:
    """Ordered product of the images along ``w``; the empty word gives the identity."""
    _check_indices(rep, w)
    out = np.eye(rep.dim, dtype=np.complex128)
    for g, e in w:
        U = rep.images[g]
        out = out @ (U if e == 1 else U.conj().T)
    return out


def relator_defects(rep: AlmostRep, pres: Presentation, idx: IndexLike = "fro") -> list[float]:
    if rep.num_generators != pres.num_generators:
        raise DimensionMismatch(
            f"rep has {rep.num_generators} images, presentation {pres.num_generators} generators"
        )
    one = np.eye(rep.dim)
    return [norm(evaluate_word(rep, r) - one, idx) for r in pres.relators]


def defect(rep: AlmostRep, pres: Presentation, idx: IndexLike = "fro") -> float:
    """Largest relator violation ``max_r ||phi(r) - 1||``."""
    if not pres.relators:
        raise ValueError("defect is undefined for a presentation without relators")
    return max(relator_defects(rep, pres, idx))


def reduced_words(num_generators: int, max_len: int) -> list[Word]:
    """All freely reduced words of length ``0 .. max_len``, shortlex ordered."""
    letters = [(g, e) for g in range(num_generators) for e in (1, -1)]
    out = [Word()]
    frontier = [Word()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g, e in letters:
                if w.letters and w.letters[-1] == (g, -e):
                    continue
                nxt.append(Word(w.letters + ((g, e),)))
        out.extend(nxt)
        frontier = nxt
    return out


def _relator_patterns(pres: Presentation) -> list[tuple[tuple[int, int], ...]]:
    """Cyclic conjugates of the freely reduced relators and their inverses, longest first."""
    pats = set()
    for r in pres.relators:
        for base in (r.free_reduce(), r.free_reduce().inverse()):
            L = base.letters
            for i in range(len(L)):
                pats.add(L[i:] + L[:i])
    pats.discard(())
    return sorted(pats, key=lambda p: (-len(p), p))


def dehn_reduce(w: Word, pres: Presentation) -> Word:
    """Free reduction plus deletion of relator subwords, iterated to a fixed point.

    This is a cheap partial normal form, not a solution of the word problem:
    two words representing the same element may reduce differently.
    """
    pats = _relator_patterns(pres)
    cur = w.free_reduce().letters
    changed = True
    while changed:
        changed = False
        for pat in pats:
            n = len(pat)
            for i in range(len(cur) - n + 1):
                if cur[i:i + n] == pat:
                    cur = Word(cur[:i] + cur[i + n:]).free_reduce().letters
                    changed = True
                    break
            if changed:
                break
    return Word(cur)


def pair_defect(rep: AlmostRep, pres: Presentation, radius: int,
                idx: IndexLike = "fro") -> float:
    """Multiplicativity gap over the ball of the given radius.

    For reduced words ``g, h`` of length at most ``radius`` the element
    ``gh`` is represented by ``dehn_reduce(g h)``; returns the maximum of
    ``||phi(dehn_reduce(g h)) - phi(g) phi(h)||``.
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    if radius > 3:
        raise ValueError("radius is capped at 3")
    if rep.num_generators != pres.num_generators:
        raise DimensionMismatch("rep and presentation disagree on the generator count")
    ball = reduced_words(pres.num_generators, radius)
    images = {w: evaluate_word(rep, w) for w in ball}
    cache: dict[Word, np.ndarray] = {}
    worst = 0.0
    for g, h in itertools.product(ball, repeat=2):
        gh = dehn_reduce(g * h, pres)
        if gh not in cache:
            cache[gh] = evaluate_word(rep, gh)
        worst = max(worst, norm(cache[gh] - images[g] @ images[h], idx))
    return worst


def separation(rep: AlmostRep, w: Word, idx: IndexLike = "fro") -> float:
    """``||phi(w) - 1||``: how far the image of ``w`` is from the identity."""
    return norm(evaluate_word(rep, w) - np.eye(rep.dim), idx)


def direct_sum(a: AlmostRep, b: AlmostRep) -> AlmostRep:
    if a.num_generators != b.num_generators:
        raise DimensionMismatch(
            f"generator counts differ: {a.num_generators} vs {b.num_generators}"
        )
    return AlmostRep(tuple(scipy.linalg.block_diag(x, y) for x, y in zip(a.images, b.images)))


@dataclass(frozen=True)
class Character:
    """Character of the cyclic group of order ``order`` sending the generator to ``exp(2 pi i exponent / order)``."""

    order: int
    exponent: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if not 0 <= self.exponent < self.order:
            raise ValueError(f"exponent must lie in [0, {self.order})")

    @property
    def value(self) -> complex:
        return complex(np.exp(2j * np.pi * self.exponent / self.order))

    def __call__(self, m: int) -> complex:
        """Value on the m-th power of the generator."""
        return complex(np.exp(2j * np.pi * ((self.exponent * m) % self.order) / self.order))


def isotypic_projection(alpha, chi: Character, tol: float = 1e-6) -> Projection:
    """Averaging projection ``(1/k) sum_m conj(chi)^m alpha^m``.

    ``alpha`` must be the image of the generator of Z/k under a genuine
    representation, i.e. ``alpha^k = 1`` up to ``tol``.
    """
    alpha = as_matrix(alpha)
    n, k = alpha.shape[0], chi.order
    one = np.eye(n)
    slack = norm(np.linalg.matrix_power(alpha, k) - one, "op")
    if slack > tol:
        raise OrderViolation(f"||alpha^{k} - 1||_op = {slack:.3e} exceeds {tol:.1e}")
    P = np.zeros((n, n), dtype=np.complex128)
    power = one.astype(np.complex128)
    for m in range(k):
        P += np.conj(chi(m)) * power
        power = power @ alpha
    P = P / k
    P = (P + P.conj().T) / 2
    return Projection.from_matrix(P, tol=max(tol, 1e-8))


def _cyclic(k: int, e: int):
    if k < 1 or not 0 <= e < k:
        raise UnknownGroup(f"cyclic({k}, {e}) needs k >= 1 and 0 <= e < k")
    pres = Presentation(1, (Word.gen(0, k),))
    return pres, AlmostRep((np.array([[np.exp(2j * np.pi * e / k)]]),))


def _dihedral(k: int):
    """Two-dimensional rep r -> diag(w, conj w), s -> swap; J = r^(k/2) when k is even."""
    if k < 2:
        raise UnknownGroup(f"dihedral({k}) needs k >= 2")
    r, s = Word.gen(0), Word.gen(1)
    rels = (r**k, s * s, s * r * s.inverse() * r)
    J = r ** (k // 2) if k % 2 == 0 else None
    w = np.exp(2j * np.pi / k)
    images = (np.diag([w, np.conj(w)]), np.array([[0, 1], [1, 0]], dtype=np.complex128))
    return Presentation(2, rels, J), AlmostRep(images)


def _quaternion8(trivial: bool):
    a, b = Word.gen(0), Word.gen(1)
    rels = (a**4, a * a * b.inverse() * b.inverse(), b * a * b.inverse() * a)
    pres = Presentation(2, rels, a * a)
    A = np.diag([1j, -1j])
    B = np.array([[0, -1], [1, 0]], dtype=np.complex128)
    if trivial:
        A, B = scipy.linalg.block_diag(A, 1), scipy.linalg.block_diag(B, 1)
    return pres, AlmostRep((A, B))


CATALOG_NAMES = (
    "cyclic(k, chi_exponent)",
    "dihedral(k)",
    "quaternion8_irrep",
    "quaternion8_irrep_plus_trivial",
)


def catalog_rep(name: str) -> tuple[Presentation, AlmostRep]:
    """Exact representation of a small finite group.

    ``name`` is one of ``"cyclic(k, e)"`` (Z/k with generator -> exp(2 pi i e/k)),
    ``"dihedral(k)"``, ``"quaternion8_irrep"`` or
    ``"quaternion8_irrep_plus_trivial"``. The quaternion and even dihedral
    presentations carry a central marking J of order 2 that maps to ``-1``
    on the irreducible block.
    """
    key = name.replace(" ", "").lower()
    if key == "quaternion8_irrep":
        return _quaternion8(False)
    if key == "quaternion8_irrep_plus_trivial":
        return _quaternion8(True)
    m = re.fullmatch(r"cyclic\((\d+),(\d+)\)", key)
    if m:
        return _cyclic(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"dihedral\((\d+)\)", key)
    if m:
        return _dihedral(int(m.group(1)))
    raise UnknownGroup(f"unknown catalog group {name!r}; known: {', '.join(CATALOG_NAMES)}")


def perturb(rep: AlmostRep, eps: float, seed: int) -> AlmostRep:
    """Left-multiply every image by ``exp(eps K)``, ``K`` skew-Hermitian with ``||K||_op = 1``.

    Each generator draws ``K`` from its own stream seeded by ``(seed, index)``.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return AlmostRep(tuple(np.array(U) for U in rep.images))
    out = []
    for i, U in enumerate(rep.images):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, i])
        G = gaussian_matrix(rep.dim, rng)
        K = (G - G.conj().T) / 2
        K = K / norm(K, "op")
        out.append(scipy.linalg.expm(eps * K) @ U)
    return AlmostRep(tuple(out))


def tracked_letters(words: Sequence[Word]) -> Iterable[tuple[tuple[int, int], tuple[int, int]]]:
    """Cyclically adjacent letter pairs occurring in ``words``, without repeats."""
    seen = set()
    for w in words:
        L = w.letters
        for i in range(len(L)):
            pair = (L[i], L[(i + 1) % len(L)])
            if pair not in seen:
                seen.add(pair)
                yield pair
