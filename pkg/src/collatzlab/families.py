"""Preset map families, their first-return sections, and modular identities.

The section data (N1, N2, power-of-two witnesses) is what makes the
first-return systems checkable: N2 is always computed as the exact residue
image f(N1), and the witnesses give, per residue class of the section, the
minimal doubling exponent landing back in N2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conditions import WitnessTable, derive_witnesses, residue_image_exceptions
from .gcmap import (
    AffineBranch,
    CheckResult,
    GCMap,
    PuncturedResidueSet,
    ResidueSet,
    plain_or_punctured,
)


# --- map families -----------------------------------------------------------


def collatz() -> GCMap:
    """n -> 3n+1 on odds (branch 1), n -> n/2 on evens (branch 2)."""
    return qx1(3)


def qx1(q: int) -> GCMap:
    """n -> qn+1 on odds, n -> n/2 on evens; q odd >= 3."""
    if q < 3 or q % 2 == 0:
        raise ValueError("q must be an odd integer >= 3")
    return GCMap(
        2,
        (
            AffineBranch(1, ResidueSet.of(2, [1]), q, 1, 1),
            AffineBranch(2, ResidueSet.of(2, [0]), 1, 0, 2),
        ),
    )


def three_x_d(d: int) -> GCMap:
    """n -> 3n+d on odds, n -> n/2 on evens; d odd >= 1."""
    if d < 1 or d % 2 == 0:
        raise ValueError("d must be an odd integer >= 1")
    return GCMap(
        2,
        (
            AffineBranch(1, ResidueSet.of(2, [1]), 3, d, 1),
            AffineBranch(2, ResidueSet.of(2, [0]), 1, 0, 2),
        ),
    )


def mersenne(k: int) -> GCMap:
    """The qx+1 map at q = 2^k - 1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return qx1(2**k - 1)


def identity_map() -> GCMap:
    return GCMap(1, (AffineBranch(1, ResidueSet.full(), 1, 0, 1),))


# --- sections ----------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """A first-return section N1 ∪ N2 with its doubling witnesses.

    ``n2`` gives the residue classes of N2 = f(N1); ``n2_removed`` lists the
    finitely many class members that f(N1) misses when N2 is a shifted set
    (e.g. the value 2 for the 3x+5 map).
    """

    name: str
    map: GCMap
    n1: ResidueSet
    n2: ResidueSet
    witnesses: WitnessTable
    n2_removed: frozenset[int] = frozenset()

    @property
    def n2_set(self) -> ResidueSet | PuncturedResidueSet:
        return plain_or_punctured(self.n2, self.n2_removed)

    @property
    def sigma(self) -> ResidueSet | PuncturedResidueSet:
        classes = self.n1.union(self.n2)
        return plain_or_punctured(classes, (e for e in self.n2_removed if e not in self.n1))


def _make_section(name: str, gcmap: GCMap, n1: ResidueSet, witnesses=None) -> Section:
    n2, removed = residue_image_exceptions(gcmap, n1)
    if witnesses is None:
        witnesses = derive_witnesses(n1, n2)
    return Section(name, gcmap, n1, n2, witnesses, frozenset(removed))


#: minimal doubling exponents per section residue mod 18 for the 3x+1 section;
#: 4n for n ≡ 1,4,13, 8n for n ≡ 5, 16n for n ≡ 7,16, 2n for n ≡ 11,17.
COLLATZ_WITNESSES = WitnessTable(
    18, {1: 2, 4: 2, 13: 2, 5: 3, 7: 4, 16: 4, 11: 1, 17: 1}
)


def section_collatz() -> Section:
    """N1 = odds coprime to 3, N2 = {4, 16} (mod 18)."""
    return _make_section("collatz", collatz(), ResidueSet.of(6, [1, 5]), COLLATZ_WITNESSES)


def section_qx1(q: int) -> Section:
    """For q = 5: N1 = odds coprime to 5 (mod 10); other q need their own theory."""
    if q != 5:
        raise ValueError("a first-return section is only provided for q = 5")
    return _make_section("qx1:5", qx1(5), ResidueSet.of(10, [1, 3, 7, 9]))


def section_mersenne(k: int) -> Section:
    """For q = 2^k - 1, k > 2: N1 = odd classes n (mod 2q^2) with 2n a power of 2."""
    if k <= 2:
        raise ValueError("the Mersenne section needs k > 2")
    q = 2**k - 1
    m = 2 * q * q
    powers = set()
    v = 1
    while True:
        v = (2 * v) % m
        if v in powers:
            break
        powers.add(v)
    n1 = ResidueSet.of(m, [r for r in range(1, m, 2) if (2 * r) % m in powers])
    return _make_section(f"mersenne:{k}", mersenne(k), n1)


def section_3xd(d: int) -> Section:
    """For d odd with 3-adic valuation k: N1 = {3^k, 5*3^k} (mod 6*3^k)."""
    if d < 1 or d % 2 == 0:
        raise ValueError("d must be an odd integer >= 1")
    k = 0
    dd = d
    while dd % 3 == 0:
        dd //= 3
        k += 1
    p = 3**k
    return _make_section(f"3xd:{d}", three_x_d(d), ResidueSet.of(6 * p, [p, 5 * p]))


# --- preset references ---------------------------------------------------------


def preset_map(ref: str) -> GCMap:
    """Resolve a preset name (collatz, identity, qx1:<q>, 3xd:<d>, mersenne:<k>)."""
    if ref == "collatz":
        return collatz()
    if ref == "identity":
        return identity_map()
    kind, _, arg = ref.partition(":")
    if arg:
        n = int(arg)
        if kind == "qx1":
            return qx1(n)
        if kind == "3xd":
            return three_x_d(n)
        if kind == "mersenne":
            return mersenne(n)
    raise KeyError(f"unknown map preset {ref!r}")


def preset_section(ref: str) -> Section:
    if ref == "collatz":
        return section_collatz()
    kind, _, arg = ref.partition(":")
    if arg:
        n = int(arg)
        if kind == "qx1":
            return section_qx1(n)
        if kind == "3xd":
            return section_3xd(n)
        if kind == "mersenne":
            return section_mersenne(n)
    raise KeyError(f"no section preset for {ref!r}")


# --- modular identities behind the Mersenne sections ------------------------------


@dataclass(frozen=True)
class ModularReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def verify_mersenne_identities(k: int) -> ModularReport:
    """The arithmetic mod 2q^2 (q = 2^k - 1) that organizes the Mersenne section:

    - (1+q)^(1+q) ≡ 1+q,
    - (1+q)^l pairwise distinct for 1 <= l <= q,
    - {(1+q)^l : 1 <= l <= q} = {1 + (2j-1)q : 1 <= j <= q},
    - 2(1+q)^(2m) ≡ 2 + 4mq for all m (checked over two full periods).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    q = 2**k - 1
    m = 2 * q * q
    u = (1 + q) % m
    checks = []

    lhs = pow(u, 1 + q, m)
    checks.append(
        CheckResult("(1+q)^(1+q) = 1+q mod 2q^2", lhs == u, f"got {lhs}, expected {u}")
    )

    powers = [pow(u, l, m) for l in range(1, q + 1)]
    checks.append(
        CheckResult(
            "(1+q)^l distinct for 1<=l<=q",
            len(set(powers)) == q,
            f"{len(set(powers))} distinct of {q}",
        )
    )

    odd_multiples = {(1 + (2 * j - 1) * q) % m for j in range(1, q + 1)}
    checks.append(
        CheckResult(
            "{(1+q)^l} = {1+(2j-1)q} mod 2q^2",
            set(powers) == odd_multiples,
            "",
        )
    )

    bad = [
        t for t in range(0, 2 * q + 1) if (2 * pow(u, 2 * t, m)) % m != (2 + 4 * t * q) % m
    ]
    checks.append(
        CheckResult(
            "2(1+q)^(2m) = 2+4mq mod 2q^2",
            not bad,
            f"failing m: {bad[:5]}" if bad else "",
        )
    )
    return ModularReport(tuple(checks))


def verify_q5_group() -> ModularReport:
    """The group facts behind the q = 5 section: 2 has order 20 mod 25, and its
    powers mod 50 sweep exactly the classes n with gcd(n, 10) = 2."""
    target = {n for n in range(50) if math.gcd(n, 10) == 2}
    powers = {pow(2, kappa, 50) for kappa in range(1, 21)}
    order = next(t for t in range(1, 21) if pow(2, t, 25) == 1)
    return ModularReport(
        (
            CheckResult(
                "{2^kappa mod 50 : 1<=kappa<=20} = {n : gcd(n,10)=2}",
                powers == target,
                f"powers {sorted(powers)}" if powers != target else "",
            ),
            CheckResult("ord(2 mod 25) = 20", order == 20, f"got {order}"),
        )
    )
