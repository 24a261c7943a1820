"""Itineraries, the separating condition, residue images, Cuntz-Krieger checks."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collatzlab import (
    CKMatrix,
    CKViolation,
    NotPeriodic,
    NotResidueRepresentable,
    ResidueSet,
    SeparatingResult,
    WitnessTable,
    ck_for_section,
    collatz,
    cuntz_krieger_condition,
    derive_witnesses,
    identity_map,
    is_aperiodic,
    itinerary,
    mersenne,
    preset_section,
    qx1,
    residue_image,
    residue_image_exceptions,
    section_collatz,
    separating_condition,
    three_x_d,
)
from collatzlab.families import COLLATZ_WITNESSES


# --- itineraries and aperiodicity ------------------------------------------------


def test_itinerary_collatz():
    w = itinerary(collatz(), 1, 6)
    assert tuple(w) == (1, 2, 2, 1, 2, 2)


def test_is_aperiodic():
    assert is_aperiodic((1, 2, 2))
    assert not is_aperiodic((1, 2, 1, 2))
    assert is_aperiodic((1,))
    assert not is_aperiodic((2, 2))


@given(st.lists(st.integers(1, 2), min_size=1, max_size=10))
def test_is_aperiodic_matches_rotation_bruteforce(word):
    w = tuple(word)
    brute = all(w != w[r:] + w[:r] for r in range(1, len(w)))
    assert is_aperiodic(w) == brute


# --- separating condition ----------------------------------------------------------


def test_separating_tuples_match_expected():
    cases = [
        (collatz(), 1, (1, 2, 2)),
        (qx1(5), 1, (1, 2, 1, 2, 2, 2, 2)),
        (mersenne(3), 1, (1, 2, 2, 2)),
        (mersenne(4), 1, (1, 2, 2, 2, 2)),
        (mersenne(5), 1, (1, 2, 2, 2, 2, 2)),
        (three_x_d(1), 1, (1, 2, 2)),
        (three_x_d(3), 3, (1, 2, 2)),
        (three_x_d(5), 5, (1, 2, 2)),
        (three_x_d(9), 9, (1, 2, 2)),
    ]
    for gcmap, x, expected in cases:
        res = separating_condition(gcmap, x, 1000)
        assert isinstance(res, SeparatingResult)
        assert res.period == len(expected)
        assert tuple(res.word) == expected
        assert res.aperiodic and res.holds


def test_separating_not_periodic():
    res = separating_condition(collatz(), 3, 1000)  # 3 is not periodic
    assert isinstance(res, NotPeriodic) and not res.holds


def test_separating_identity_word_is_trivially_periodic():
    res = separating_condition(identity_map(), 7, 10)
    assert isinstance(res, SeparatingResult)
    assert res.period == 1 and res.aperiodic


# --- residue images ---------------------------------------------------------------


def test_residue_image_collatz_odds():
    img = residue_image(collatz(), ResidueSet.of(2, [1]))
    assert img.modulus == 6 and img.residues == frozenset({4})


def test_residue_image_collatz_evens_is_everything():
    img = residue_image(collatz(), ResidueSet.of(2, [0]))
    assert img.modulus == 1


def test_residue_image_n1_gives_n2():
    img = residue_image(collatz(), ResidueSet.of(6, [1, 5]))
    assert img.same_set(ResidueSet.of(18, [4, 16]))


def test_residue_image_exceptions_3x5():
    # f(N1) for 3x+5 misses the value 2 of its residue classes
    classes, removed = residue_image_exceptions(three_x_d(5), ResidueSet.of(6, [1, 5]))
    assert classes.same_set(ResidueSet.of(18, [2, 8]))
    assert removed == (2,)
    with pytest.raises(NotResidueRepresentable):
        residue_image(three_x_d(5), ResidueSet.of(6, [1, 5]))


@given(st.integers(1, 3000))
@settings(max_examples=80)
def test_residue_image_soundness_and_completeness(n):
    m = qx1(5)
    odds = ResidueSet.of(2, [1])
    img = residue_image(m, odds)
    # soundness: every image value is in img; completeness on a window:
    # membership in img implies an odd preimage exists
    if n % 2 == 1:
        assert m.apply(n) in img
    if n in img:
        assert any(m.apply(p) == n for p in m.preimage(n))


# --- Cuntz-Krieger, partition level ---------------------------------------------------


def test_ck_matrix_validation():
    with pytest.raises(ValueError):
        CKMatrix(((0, 0), (1, 1)))  # zero row
    with pytest.raises(ValueError):
        CKMatrix(((2,),))  # not 0/1
    a = CKMatrix(((0, 1), (1, 1)))
    assert a.k == 2 and a.is_irreducible()


def test_ck_partition_collatz_fails_with_witness():
    ok, detail = cuntz_krieger_condition(collatz())
    assert not ok
    assert isinstance(detail, CKViolation)
    assert detail.branch == 1 and detail.witness == 2


def test_ck_partition_identity():
    ok, matrix = cuntz_krieger_condition(identity_map())
    assert ok and matrix.as_lists() == [[1]]


# --- Cuntz-Krieger for sections ---------------------------------------------------------


@pytest.mark.parametrize(
    "ref",
    ["collatz", "qx1:5", "mersenne:3", "mersenne:4", "mersenne:5", "3xd:1", "3xd:3", "3xd:5", "3xd:9"],
)
def test_ck_for_section_presets(ref):
    sec = preset_section(ref)
    rep = ck_for_section(
        sec.map, sec.n1, sec.n2, sec.witnesses, 2000, 10**5, removed=sec.n2_removed
    )
    assert rep.passed, rep.detail
    assert rep.matrix.as_lists() == [[0, 1], [1, 1]]
    assert rep.verdict_kind == "witnessed"


def test_collatz_witnesses_match_derived():
    sec = section_collatz()
    derived = derive_witnesses(sec.n1, sec.n2)
    assert derived.modulus == COLLATZ_WITNESSES.modulus
    assert derived.exponents == COLLATZ_WITNESSES.exponents


def test_ck_for_section_rejects_nonminimal_witness():
    sec = section_collatz()
    bad = dict(COLLATZ_WITNESSES.exponents)
    bad[11] = 2  # 2n already lands in N2 for n ≡ 11 (mod 18); 4n is not minimal
    rep = ck_for_section(
        sec.map, sec.n1, sec.n2, WitnessTable(18, bad), 2000, 10**5
    )
    assert not rep.passed


def test_ck_for_section_rejects_wrong_n2():
    sec = section_collatz()
    wrong = ResidueSet.of(18, [4, 10])
    rep = ck_for_section(sec.map, sec.n1, wrong, sec.witnesses, 2000, 10**5)
    assert not rep.passed


def test_derive_witnesses_minimality():
    sec = preset_section("qx1:5")
    table = derive_witnesses(sec.n1, sec.n2)
    mw = table.modulus
    n2r = sec.n2.at_modulus(mw).residues
    for r, kappa in table.exponents.items():
        assert (r * pow(2, kappa)) % mw in n2r
        for j in range(1, kappa):
            assert (r * pow(2, j)) % mw not in n2r
