import itertools
import math

import numpy as np
import pytest

from almostrep.errors import DimensionMismatch, NotUnitary, OrderViolation, UnknownGroup
from almostrep.groups import (
    AlmostRep,
    Character,
    Presentation,
    Word,
    catalog_rep,
    dehn_reduce,
    defect,
    direct_sum,
    evaluate_word,
    isotypic_projection,
    pair_defect,
    perturb,
    reduced_words,
    relator_defects,
    separation,
)
from almostrep.linalg import haar_unitary, norm
from almostrep.corrections import nearest_kth_root

CATALOG = [
    "quaternion8_irrep",
    "quaternion8_irrep_plus_trivial",
    "cyclic(1, 0)",
    "cyclic(5, 2)",
    "dihedral(3)",
    "dihedral(4)",
    "dihedral(6)",
]


@pytest.fixture
def q8():
    return catalog_rep("quaternion8_irrep")


class TestWord:
    def test_parse_and_inverse(self):
        w = Word.parse("abA")
        assert w.letters == ((0, 1), (1, 1), (0, -1))
        assert w.inverse() == Word.parse("aBA")

    def test_power_and_concat(self):
        a = Word.gen(0)
        assert a**3 == Word.parse("aaa")
        assert a**-2 == Word.parse("AA")
        assert Word.parse("ab") * Word.parse("B") == Word.parse("abB")

    def test_free_reduce(self):
        assert Word.parse("abBAc").free_reduce() == Word.parse("c")

    def test_bad_letter(self):
        with pytest.raises(ValueError):
            Word(((0, 2),))

    def test_json(self):
        w = Word.parse("aB")
        assert Word.from_json(w.to_json()) == w


class TestPresentation:
    def test_central_relators_appended(self, q8):
        pres, _ = q8
        J = Word.parse("aa")
        assert pres.central_marking == J
        assert J * J in pres.relators
        assert pres.has_central(J)
        # J*J = a^4 is already a relator, so only the two commutators are new
        assert len(pres.relators) == 3 + 2

    def test_no_duplicates_on_round_trip(self, q8):
        pres, _ = q8
        again = Presentation.from_json(pres.to_json())
        assert again == pres

    def test_rejects_unknown_generator(self):
        with pytest.raises(ValueError):
            Presentation(1, (Word.parse("ab"),))


class TestEvaluateWord:
    def test_empty(self, q8):
        _, rep = q8
        np.testing.assert_array_equal(evaluate_word(rep, Word()), np.eye(2))

    def test_a_squared(self, q8):
        _, rep = q8
        np.testing.assert_allclose(evaluate_word(rep, Word.parse("aa")), -np.eye(2), atol=1e-15)

    def test_cancel(self, rng):
        rep = AlmostRep((haar_unitary(3, rng),))
        assert norm(evaluate_word(rep, Word.parse("aA")) - np.eye(3), "op") <= 1e-8

    def test_multiplicative(self, rng):
        rep = AlmostRep((haar_unitary(4, rng), haar_unitary(4, rng)))
        w1, w2 = Word.parse("abBaB"), Word.parse("Aab")
        np.testing.assert_allclose(
            evaluate_word(rep, w1 * w2), evaluate_word(rep, w1) @ evaluate_word(rep, w2), atol=1e-13
        )

    def test_index_out_of_range(self, q8):
        _, rep = q8
        with pytest.raises(IndexError):
            evaluate_word(rep, Word.parse("c"))


class TestCatalog:
    @pytest.mark.parametrize("name", CATALOG)
    def test_exact(self, name):
        pres, rep = catalog_rep(name)
        assert defect(rep, pres, "schatten-1") <= 1e-8
        assert pair_defect(rep, pres, 2, "op") <= 1e-7

    def test_q8_relators_by_hand(self, q8):
        pres, rep = q8
        a, b = rep.images
        np.testing.assert_allclose(np.linalg.matrix_power(a, 4), np.eye(2))
        np.testing.assert_allclose(a @ a @ np.linalg.inv(b) @ np.linalg.inv(b), np.eye(2))
        np.testing.assert_allclose(b @ a @ np.linalg.inv(b) @ a, np.eye(2))
        for r in pres.relators:
            np.testing.assert_allclose(evaluate_word(rep, r), np.eye(2), atol=1e-14)

    def test_q8_plus_trivial(self):
        pres, rep = catalog_rep("quaternion8_irrep_plus_trivial")
        assert rep.dim == 3
        np.testing.assert_allclose(evaluate_word(rep, pres.central_marking), np.diag([-1, -1, 1]), atol=1e-15)

    def test_trivial_cyclic(self):
        pres, rep = catalog_rep("cyclic(1,0)")
        np.testing.assert_array_equal(rep.images[0], [[1]])

    def test_dihedral_marking(self):
        assert catalog_rep("dihedral(3)")[0].central_marking is None
        pres, rep = catalog_rep("dihedral(6)")
        np.testing.assert_allclose(evaluate_word(rep, pres.central_marking), -np.eye(2), atol=1e-14)

    def test_unknown(self):
        with pytest.raises(UnknownGroup):
            catalog_rep("monster")
        with pytest.raises(UnknownGroup):
            catalog_rep("cyclic(3, 3)")


class TestDefect:
    def test_identity_rep(self, q8):
        pres, _ = q8
        rep = AlmostRep((np.eye(4), np.eye(4)))
        assert defect(rep, pres, 1) == 0

    def test_empty_relators(self):
        with pytest.raises(ValueError):
            defect(AlmostRep((np.eye(2),)), Presentation(1), 1)

    def test_generator_mismatch(self, q8):
        pres, _ = q8
        with pytest.raises(DimensionMismatch):
            relator_defects(AlmostRep((np.eye(2),)), pres)

    @pytest.mark.parametrize("name", ["quaternion8_irrep", "dihedral(4)", "cyclic(5, 2)"])
    @pytest.mark.parametrize("eps", [1e-3, 1e-2])
    def test_perturbed_linear_bound(self, name, eps):
        pres, rep = catalog_rep(name)
        L = max(len(r) for r in pres.relators)
        for seed in range(5):
            d = defect(perturb(rep, eps, seed), pres, "op")
            assert 0 < d <= L * eps + 1e-12

    def test_first_order_slope(self, q8):
        # the defect is asymptotically linear in eps
        pres, rep = q8
        d1 = defect(perturb(rep, 1e-3, 4), pres, "op")
        d2 = defect(perturb(rep, 1e-4, 4), pres, "op")
        assert d1 / d2 == pytest.approx(10, rel=0.05)

    def test_norm_monotone(self, q8):
        pres, rep = q8
        pr = perturb(rep, 0.05, 2)
        assert defect(pr, pres, 3) <= defect(pr, pres, 1.5) + 1e-8
        assert defect(pr, pres, "op") <= defect(pr, pres, 2) + 1e-8


def _oracle_pair_defect(rep, relators, radius, idx):
    """Brute force over strings: 'a'/'A' = generator 0 and its inverse, etc."""
    gens = "abcdefgh"[: rep.num_generators]
    alphabet = gens + gens.upper()

    def inv(s):
        return s[::-1].swapcase()

    def free(s):
        out = ""
        for ch in s:
            if out and out[-1] == ch.swapcase():
                out = out[:-1]
            else:
                out += ch
        return out

    pats = set()
    for r in relators:
        s = free("".join(gens[g] if e == 1 else gens[g].upper() for g, e in r.letters))
        for base in (s, inv(s)):
            for i in range(len(base)):
                pats.add(base[i:] + base[:i])
    pats.discard("")

    def key(p):
        return (-len(p), tuple((gens.index(c.lower()), 1 if c.islower() else -1) for c in p))

    pats = sorted(pats, key=key)

    def reduce(s):
        s = free(s)
        while True:
            for p in pats:
                i = s.find(p)
                if i >= 0:
                    s = free(s[:i] + s[i + len(p):])
                    break
            else:
                return s

    def image(s):
        M = np.eye(rep.dim, dtype=complex)
        for ch in s:
            U = rep.images[gens.index(ch.lower())]
            M = M @ (U if ch.islower() else U.conj().T)
        return M

    words = [""]
    for n in range(1, radius + 1):
        words += ["".join(t) for t in itertools.product(alphabet, repeat=n) if free("".join(t)) == "".join(t)]
    return max(norm(image(reduce(g + h)) - image(g) @ image(h), idx) for g in words for h in words)


class TestPairDefect:
    def test_exact_is_zero(self, q8):
        pres, rep = q8
        assert pair_defect(rep, pres, 3, 1) <= 1e-7

    def test_free_presentation(self, rng):
        rep = AlmostRep((haar_unitary(3, rng), haar_unitary(3, rng)))
        assert pair_defect(rep, Presentation(2), 1, 1) <= 1e-12

    @pytest.mark.parametrize("name,radius", [("quaternion8_irrep", 2), ("dihedral(3)", 2), ("cyclic(3, 1)", 3)])
    def test_matches_brute_force(self, name, radius):
        pres, rep = catalog_rep(name)
        pr = perturb(rep, 0.03, 11)
        got = pair_defect(pr, pres, radius, "schatten-1")
        want = _oracle_pair_defect(pr, pres.relators, radius, "schatten-1")
        assert got == pytest.approx(want, rel=1e-12)
        assert got > 0

    def test_controlled_by_relator_defect(self, q8):
        pres, rep = q8
        pr = perturb(rep, 0.01, 3)
        # every deleted relator costs at most its own defect
        assert pair_defect(pr, pres, 2, "op") <= 3 * defect(pr, pres, "op") + 1e-12

    def test_radius_guard(self, q8):
        pres, rep = q8
        with pytest.raises(ValueError):
            pair_defect(rep, pres, 0)
        with pytest.raises(ValueError):
            pair_defect(rep, pres, 4)

    def test_reduced_words_count(self):
        # 1 + 2m + 2m(2m-1) + 2m(2m-1)^2 for m generators
        assert len(reduced_words(2, 3)) == 1 + 4 + 12 + 36

    def test_dehn_reduce(self, q8):
        pres, _ = q8
        assert dehn_reduce(Word.parse("aaaab"), pres) == Word.parse("b")
        assert dehn_reduce(Word.parse("ab"), pres) == Word.parse("ab")


class TestSeparation:
    def test_identity_word(self, q8):
        _, rep = q8
        assert separation(rep, Word(), 1) == 0

    @pytest.mark.parametrize("idx,value", [("schatten-1", 4), ("schatten-2", 2 * math.sqrt(2)), ("op", 2)])
    def test_q8_center(self, q8, idx, value):
        _, rep = q8
        assert separation(rep, Word.parse("aa"), idx) == pytest.approx(value)


class TestDirectSum:
    def test_exact(self, q8):
        pres, rep = q8
        s = direct_sum(rep, catalog_rep("quaternion8_irrep_plus_trivial")[1])
        assert s.dim == 5
        assert defect(s, pres, 1) <= 1e-8

    def test_mismatch(self, q8):
        with pytest.raises(DimensionMismatch):
            direct_sum(q8[1], AlmostRep((np.eye(2),)))

    @pytest.mark.parametrize("p", [1, 1.5, 2, 3, math.inf])
    def test_defect_bound(self, q8, p):
        pres, rep = q8
        a, b = perturb(rep, 0.02, 1), perturb(rep, 0.05, 2)
        da, db = defect(a, pres, p), defect(b, pres, p)
        combined = defect(direct_sum(a, b), pres, p)
        bound = max(da, db) if math.isinf(p) else (da**p + db**p) ** (1 / p)
        assert combined <= bound + 1e-12

    def test_single_relator_equality(self):
        pres, rep = catalog_rep("cyclic(5, 1)")
        _, rep2 = catalog_rep("cyclic(5, 2)")
        a, b = perturb(rep, 0.02, 1), perturb(rep2, 0.04, 2)
        assert defect(direct_sum(a, b), pres, 1) == pytest.approx(defect(a, pres, 1) + defect(b, pres, 1))


class TestIsotypic:
    def test_sign_character(self):
        P = isotypic_projection(np.diag([1, -1, -1]), Character(2, 1))
        np.testing.assert_allclose(P.matrix, np.diag([0, 1, 1]), atol=1e-14)
        assert P.rank == 2

    def test_trivial_character(self):
        P = isotypic_projection(np.eye(3), Character(2, 0))
        np.testing.assert_allclose(P.matrix, np.eye(3))

    def test_empty_component(self):
        P = isotypic_projection(np.eye(2), Character(2, 1))
        assert P.rank == 0

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_resolution_of_identity(self, rng, k):
        alpha, _ = nearest_kth_root(haar_unitary(8, rng), k)
        projs = [isotypic_projection(alpha, Character(k, e)) for e in range(k)]
        total = sum(P.matrix for P in projs)
        assert norm(total - np.eye(8), "op") <= 1e-6
        for i, j in itertools.combinations(range(k), 2):
            assert norm(projs[i].matrix @ projs[j].matrix, "op") <= 1e-6
        for e, P in enumerate(projs):
            assert norm(alpha @ P.matrix - Character(k, e).value * P.matrix, "op") <= 1e-6

    def test_order_violation(self, rng):
        with pytest.raises(OrderViolation):
            isotypic_projection(haar_unitary(3, rng), Character(2, 1))

    def test_character_validation(self):
        with pytest.raises(ValueError):
            Character(3, 3)
        assert Character(4, 1)(2) == pytest.approx(-1)


class TestPerturb:
    def test_zero(self, q8):
        _, rep = q8
        out = perturb(rep, 0.0, 5)
        for x, y in zip(rep.images, out.images):
            np.testing.assert_array_equal(x, y)

    def test_deterministic(self, q8):
        _, rep = q8
        a, b = perturb(rep, 0.01, 9), perturb(rep, 0.01, 9)
        for x, y in zip(a.images, b.images):
            np.testing.assert_array_equal(x, y)
        c = perturb(rep, 0.01, 10)
        assert norm(a.images[0] - c.images[0], "op") > 0

    def test_distance_is_eps(self, q8):
        _, rep = q8
        out = perturb(rep, 0.01, 1)
        for x, y in zip(rep.images, out.images):
            # ||exp(eps K) - 1||_op = 2 sin(eps/2) for ||K||_op = 1
            assert norm(y - x, "op") == pytest.approx(2 * math.sin(0.005), rel=1e-9)

    def test_negative_eps(self, q8):
        with pytest.raises(ValueError):
            perturb(q8[1], -1.0, 0)


class TestAlmostRep:
    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitary):
            AlmostRep((2 * np.eye(2),))

    def test_rejects_mixed_dims(self):
        with pytest.raises(DimensionMismatch):
            AlmostRep((np.eye(2), np.eye(3)))

    def test_json_round_trip(self, q8):
        _, rep = q8
        pr = perturb(rep, 0.1, 1)
        back = AlmostRep.from_json(pr.to_json())
        for x, y in zip(pr.images, back.images):
            np.testing.assert_array_equal(x, y)
