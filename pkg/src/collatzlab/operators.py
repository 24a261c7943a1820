"""Exact finite truncations of the map-induced Hilbert-space operators.

Operators are sparse integer matrices over a finite basis window, indexed by
the integer basis labels themselves (not positions).  Every relation check is
an integer equality with zero tolerance.  Truncating a genuine isometry is
not isometric at the window boundary, so each operator carries exactness
masks: a column (row) is exact when it coincides with the corresponding
column (row) of the untruncated operator.  Exactness propagates through
products and adjoints, and identities are asserted only on columns certified
exact on both sides.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .conditions import separating_condition, SeparatingResult
from .dynamics import ClassesReport, Inconclusive, classes, first_return_map
from .gcmap import DomainError, GCMap, ResidueSet, plain_or_punctured


@dataclass(frozen=True)
class BasisWindow:
    """An ordered finite set of basis labels e_n."""

    elements: tuple[int, ...]
    position: dict[int, int] = field(compare=False, repr=False, default=None)

    def __post_init__(self) -> None:
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "position", {n: i for i, n in enumerate(elems)})

    @classmethod
    def range(cls, lo: int, hi: int) -> "BasisWindow":
        return cls(tuple(range(lo, hi + 1)))

    @classmethod
    def section(cls, sigma, hi: int) -> "BasisWindow":
        if hasattr(sigma, "members"):
            return cls(tuple(sigma.members(1, hi)))
        return cls(tuple(sorted(n for n in sigma if n <= hi)))

    def __contains__(self, n: int) -> bool:
        return n in self.position

    def __len__(self) -> int:
        return len(self.elements)


Column = dict[int, int]


@dataclass(frozen=True)
class TruncatedOperator:
    """Sparse integer matrix over a window, with exactness masks.

    ``cols[n]`` maps row labels to integer entries of the column at basis
    label n.  ``exact_cols`` / ``exact_rows`` list labels where the truncated
    column / row equals that of the infinite operator.
    """

    window: BasisWindow
    cols: dict[int, Column]
    exact_cols: frozenset[int]
    exact_rows: frozenset[int]

    def __post_init__(self) -> None:
        clean = {
            n: {r: v for r, v in col.items() if v != 0}
            for n, col in self.cols.items()
            if any(v != 0 for v in col.values())
        }
        object.__setattr__(self, "cols", clean)

    # --- structure ---------------------------------------------------------

    def column(self, n: int) -> Column:
        return dict(self.cols.get(n, {}))

    def entry(self, row: int, col: int) -> int:
        return self.cols.get(col, {}).get(row, 0)

    def rows(self) -> dict[int, Column]:
        out: dict[int, Column] = {}
        for n, col in self.cols.items():
            for r, v in col.items():
                out.setdefault(r, {})[n] = v
        return out

    @property
    def interior(self) -> frozenset[int]:
        """Labels whose column and row are both exact."""
        return self.exact_cols & self.exact_rows

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    # --- algebra -------------------------------------------------------------

    def adjoint(self) -> "TruncatedOperator":
        """Exact transpose; an involution.  Exact columns and rows swap roles."""
        return TruncatedOperator(self.window, self.rows(), self.exact_rows, self.exact_cols)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.window != other.window:
            raise ValueError("operators must share a window")
        cols: dict[int, Column] = {}
        exact_cols = set()
        for n in other.window.elements:
            bcol = other.cols.get(n, {})
            acc: Column = {}
            for m, bv in bcol.items():
                for r, av in self.cols.get(m, {}).items():
                    acc[r] = acc.get(r, 0) + av * bv
            if acc:
                cols[n] = acc
            if n in other.exact_cols and all(m in self.exact_cols for m in bcol):
                exact_cols.add(n)
        my_rows = self.rows()
        exact_rows = set()
        for r in self.window.elements:
            if r in self.exact_rows and all(m in other.exact_rows for m in my_rows.get(r, {})):
                exact_rows.add(r)
        return TruncatedOperator(self.window, cols, frozenset(exact_cols), frozenset(exact_rows))

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.window != other.window:
            raise ValueError("operators must share a window")
        cols: dict[int, Column] = {}
        for n in set(self.cols) | set(other.cols):
            acc = dict(self.cols.get(n, {}))
            for r, v in other.cols.get(n, {}).items():
                acc[r] = acc.get(r, 0) + v
            cols[n] = acc
        return TruncatedOperator(
            self.window,
            cols,
            self.exact_cols & other.exact_cols,
            self.exact_rows & other.exact_rows,
        )

    def with_entry(self, row: int, col: int, value: int) -> "TruncatedOperator":
        """Copy with one entry overwritten (fault injection for tests)."""
        cols = {n: dict(c) for n, c in self.cols.items()}
        cols.setdefault(col, {})[row] = value
        return TruncatedOperator(self.window, cols, self.exact_cols, self.exact_rows)

    def apply_vector(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for n, x in vec.items():
            for r, v in self.cols.get(n, {}).items():
                out[r] = out.get(r, Fraction(0)) + v * x
        return {r: v for r, v in out.items() if v != 0}


def identity_operator(window: BasisWindow) -> TruncatedOperator:
    labels = frozenset(window.elements)
    return TruncatedOperator(window, {n: {n: 1} for n in window.elements}, labels, labels)


def projection_operator(window: BasisWindow, onto: Iterable[int]) -> TruncatedOperator:
    onto = set(onto)
    labels = frozenset(window.elements)
    return TruncatedOperator(
        window, {n: {n: 1} for n in window.elements if n in onto}, labels, labels
    )


def zero_operator(window: BasisWindow) -> TruncatedOperator:
    labels = frozenset(window.elements)
    return TruncatedOperator(window, {}, labels, labels)


# --- map-induced operators ------------------------------------------------------


def build_T(gcmap: GCMap, window: BasisWindow) -> TruncatedOperator:
    """T e_n = e_{f(n)}, truncated to the window."""
    cols: dict[int, Column] = {}
    exact_cols = set()
    exact_rows = set()
    for n in window.elements:
        v = gcmap.apply(n)
        if v in window:
            cols[n] = {v: 1}
            exact_cols.add(n)
        if all(m in window for m in gcmap.preimage(n)):
            exact_rows.add(n)
    return TruncatedOperator(window, cols, frozenset(exact_cols), frozenset(exact_rows))


def build_branch_ops(gcmap: GCMap, window: BasisWindow) -> list[TruncatedOperator]:
    """T_i e_n = e_{f(n)} for n in X_i, 0 elsewhere; sum over i recovers T entrywise."""
    ops = []
    for br in gcmap.branches:
        cols: dict[int, Column] = {}
        exact_cols = set()
        exact_rows = set()
        for n in window.elements:
            if br.applies_to(n):
                v = gcmap.apply(n)
                if v in window:
                    cols[n] = {v: 1}
                    exact_cols.add(n)
            else:
                exact_cols.add(n)  # zero column is exact
        for n in window.elements:
            if br.a >= 1:
                m = br.preimage_of(n)
                if m is None or m in window:
                    exact_rows.add(n)
        ops.append(TruncatedOperator(window, cols, frozenset(exact_cols), frozenset(exact_rows)))
    return ops


# --- section operators -----------------------------------------------------------


class _PreimageSearch:
    """Exact enumeration of first-return preimages {m in sigma : P(m) = r}.

    Walks the f-preimage tree of r, stopping branches at section members.
    Doubling chains through non-section values are pruned once their residue
    state cycles without a possible section hit or affine spawn; anything not
    resolvable within the caps returns None (the row is then conservatively
    marked non-exact).
    """

    def __init__(
        self, gcmap: GCMap, sigma: ResidueSet, removed: frozenset[int] = frozenset(),
        depth_cap: int = 8,
    ) -> None:
        self.map = gcmap
        self.sigma = sigma
        self.removed = removed
        self.depth_cap = depth_cap
        self._class_cache: dict[int, bool] = {}
        self.affine = [br for br in gcmap.branches if not (br.a, br.b, br.c) == (1, 0, 2)]
        self.halving = [br for br in gcmap.branches if (br.a, br.b, br.c) == (1, 0, 2)]
        z = math.lcm(gcmap.modulus, sigma.modulus)
        for br in self.affine:
            if br.c != 1 or br.a < 1:
                raise ValueError("section preimage search needs branches n -> a*n+b and n -> n/2")
        if not self.halving:
            raise ValueError("section preimage search needs an n/2 branch")
        z = math.lcm(z, *(br.a * math.lcm(gcmap.modulus, sigma.modulus) for br in self.affine))
        self.state_mod = z

    def _in_sigma(self, v: int) -> bool:
        # class membership minus the finitely many punctures of a shifted N2
        return v % self.sigma.modulus in self.sigma.residues and v not in self.removed

    def _class_reaches_sigma(self, c0: int) -> bool:
        """Can any value in class c0 (mod state_mod) have a section member in its
        f-preimage tree?  Overapproximated by a residue-level backward closure:
        a False answer is a proof, a True answer just means "not pruned"."""
        cached = self._class_cache.get(c0)
        if cached is not None:
            return cached
        z = self.state_mod
        seen: set[int] = set()
        stack = [c0]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            if c % self.sigma.modulus in self.sigma.residues:
                self._class_cache[c0] = True
                return True
            stack.append((2 * c) % z)
            for br in self.affine:
                g = math.gcd(br.a, z)
                if (c - br.b) % g:
                    continue
                zg = z // g
                m0 = ((c - br.b) // g * pow(br.a // g, -1, zg)) % zg
                for t in range(g):
                    m = m0 + t * zg
                    if m % self.map.modulus in br.guard.residues:
                        stack.append(m)
        for c in seen:
            # the closure from any member of a section-free closure is section-free
            self._class_cache[c] = False
        return False

    def preimages(self, r: int) -> set[int] | None:
        result: set[int] = set()
        ok = self._explore(r, self.depth_cap, result)
        return result if ok else None

    def _explore(self, u: int, depth: int, result: set[int]) -> bool:
        """Collect section members whose forward path reaches u outside the section."""
        if depth < 0:
            return False
        # affine preimages (one odd step back)
        for br in self.affine:
            m = br.preimage_of(u)
            if m is not None:
                if self._in_sigma(m):
                    result.add(m)
                elif self._class_reaches_sigma(m % self.state_mod):
                    if not self._explore(m, depth - 1, result):
                        return False
        # doubling chain: 2u, 4u, ... until a section hit or a clean residue cycle
        hb = self.halving[0]
        seen_states: dict[int, int] = {}
        spawn_steps: list[int] = []
        v = u
        step = 0
        while True:
            nxt = hb.preimage_of(v)
            if nxt is None:
                return True  # no even preimage: the chain ends here
            v = nxt
            step += 1
            state = v % self.state_mod
            if self._in_sigma(v):
                result.add(v)
                return True
            first = seen_states.get(state)
            if first is not None and v > max(self.removed, default=0):
                # a full residue cycle with no section hit, at values beyond all
                # punctures; safe iff no spawns happened inside the cycle
                return all(s < first for s in spawn_steps)
            if first is None:
                seen_states[state] = step
            spawned = False
            for br in self.affine:
                m = br.preimage_of(v)
                if m is not None:
                    if self._in_sigma(m):
                        result.add(m)
                        spawned = True
                    elif self._class_reaches_sigma(m % self.state_mod):
                        spawned = True
                        if not self._explore(m, depth - 1, result):
                            return False
                    # class-pruned spawns contribute nothing, in this pass or any later one
            if spawned:
                spawn_steps.append(step)


@dataclass(frozen=True)
class SectionOperators:
    """T1, T2 (first-return branch operators on N1, N2) and S1 = T1*T2*, S2 = T2*."""

    window: BasisWindow
    n1: ResidueSet
    n2: ResidueSet
    t1: TruncatedOperator
    t2: TruncatedOperator
    s1: TruncatedOperator
    s2: TruncatedOperator
    inconclusive_columns: frozenset[int]


def build_section_ops(
    gcmap: GCMap,
    n1: ResidueSet,
    n2: ResidueSet,
    window: BasisWindow,
    fuel: int,
    n2_removed: frozenset[int] = frozenset(),
) -> SectionOperators:
    """Build the section operators on a window contained in N1 ∪ N2."""
    sigma = n1.union(n2)
    sigma_removed = frozenset(e for e in n2_removed if e not in n1)
    sigma_set = plain_or_punctured(sigma, sigma_removed)
    for n in window.elements:
        if n not in sigma_set:
            raise DomainError(f"window element {n} is not in N1 ∪ N2")
    P = first_return_map(gcmap, sigma_set)
    search = _PreimageSearch(gcmap, sigma, sigma_removed)

    cols1: dict[int, Column] = {}
    cols2: dict[int, Column] = {}
    exact_cols1, exact_cols2 = set(), set()
    inconclusive = set()
    for n in window.elements:
        in_n1 = n in n1
        v = P.apply(n, fuel)
        if isinstance(v, Inconclusive):
            inconclusive.add(n)
            # unknown column: not exact for the branch that owns n
            if in_n1:
                exact_cols2.add(n)
            else:
                exact_cols1.add(n)
            continue
        if in_n1:
            exact_cols2.add(n)  # T2 column at N1 labels is genuinely zero
            if v in window:
                cols1[n] = {v: 1}
                exact_cols1.add(n)
        else:
            exact_cols1.add(n)
            if v in window:
                cols2[n] = {v: 1}
                exact_cols2.add(n)

    exact_rows1, exact_rows2 = set(), set()
    for r in window.elements:
        pre = search.preimages(r)
        if pre is None:
            continue
        if all(m in window for m in pre if m in n1):
            exact_rows1.add(r)
        if all(m in window for m in pre if m in n2):
            exact_rows2.add(r)

    t1 = TruncatedOperator(window, cols1, frozenset(exact_cols1), frozenset(exact_rows1))
    t2 = TruncatedOperator(window, cols2, frozenset(exact_cols2), frozenset(exact_rows2))
    s2 = t2.adjoint()
    s1 = t1.adjoint() @ t2.adjoint()
    return SectionOperators(window, n1, n2, t1, t2, s1, s2, frozenset(inconclusive))


# --- relation batteries ------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    holds: bool
    columns_checked: int
    witness: tuple[int, int, int, int] | None = None  # (row, col, lhs, rhs)


@dataclass(frozen=True)
class RelationReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.holds]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {
                    "name": c.name,
                    "holds": c.holds,
                    "columns_checked": c.columns_checked,
                    "witness": list(c.witness) if c.witness else None,
                }
                for c in self.checks
            ],
        }


def compare_certified(name: str, lhs: TruncatedOperator, rhs: TruncatedOperator) -> IdentityCheck:
    """Entrywise integer equality on columns certified exact on both sides."""
    certified = lhs.exact_cols & rhs.exact_cols
    for n in sorted(certified):
        a, b = lhs.cols.get(n, {}), rhs.cols.get(n, {})
        if a != b:
            rows = set(a) | set(b)
            r = min(r for r in rows if a.get(r, 0) != b.get(r, 0))
            return IdentityCheck(name, False, len(certified), (r, n, a.get(r, 0), b.get(r, 0)))
    return IdentityCheck(name, True, len(certified))


def verify_branch_relations(gcmap: GCMap, window: BasisWindow) -> RelationReport:
    """Partial-isometry structure of the branch operators: T_i*T_i = proj(X_i), sums to I."""
    ops = build_branch_ops(gcmap, window)
    t = build_T(gcmap, window)
    eye = identity_operator(window)
    checks = []
    total = None
    sum_t = None
    for br, op in zip(gcmap.branches, ops):
        proj = projection_operator(window, (n for n in window.elements if br.applies_to(n)))
        checks.append(compare_certified(f"T{br.index}*T{br.index} = proj(X{br.index})", op.adjoint() @ op, proj))
        total = op.adjoint() @ op if total is None else total + (op.adjoint() @ op)
        sum_t = op if sum_t is None else sum_t + op
    checks.append(compare_certified("sum_i Ti*Ti = I", total, eye))
    checks.append(compare_certified("sum_i Ti = T", sum_t, t))
    return RelationReport(tuple(checks))


def verify_section_relations(ops: SectionOperators) -> RelationReport:
    """The Cuntz relation battery for S1, S2 and the descent identity T2*T2T1 = T1."""
    w = ops.window
    eye = identity_operator(w)
    proj1 = projection_operator(w, (n for n in w.elements if n in ops.n1))
    proj2 = projection_operator(w, (n for n in w.elements if n in ops.n2))
    zero = zero_operator(w)
    s1, s2, t1, t2 = ops.s1, ops.s2, ops.t1, ops.t2
    checks = (
        compare_certified("S1*S1 = I", s1.adjoint() @ s1, eye),
        compare_certified("S2*S2 = I", s2.adjoint() @ s2, eye),
        compare_certified("S1S1* = proj(N1)", s1 @ s1.adjoint(), proj1),
        compare_certified("S2S2* = proj(N2)", s2 @ s2.adjoint(), proj2),
        compare_certified("S1S1* + S2S2* = I", (s1 @ s1.adjoint()) + (s2 @ s2.adjoint()), eye),
        compare_certified("S1*S2 = 0", s1.adjoint() @ s2, zero),
        compare_certified("S2*S1 = 0", s2.adjoint() @ s1, zero),
        compare_certified("T2*T2T1 = T1", t2.adjoint() @ t2 @ t1, t1),
    )
    return RelationReport(checks)


# --- reachable spans vs equivalence classes ------------------------------------------


def reachable_span(
    ops: Sequence[TruncatedOperator], start: int, depth: int | None
) -> frozenset[int]:
    """Closure of {start} under the operators and their adjoints, up to word length depth.

    On 0/1 functional operators this is a breadth-first walk of the index
    graph (n -> f(n), n -> each preimage), which agrees with materializing
    matrix products but is exponentially cheaper.
    """
    window = ops[0].window
    if start not in window:
        raise DomainError(f"start {start} not in window")
    adj: dict[int, set[int]] = {}
    for op in ops:
        for n, col in op.cols.items():
            for r in col:
                adj.setdefault(n, set()).add(r)
                adj.setdefault(r, set()).add(n)
    seen = {start}
    frontier = [start]
    d = 0
    while frontier and (depth is None or d < depth):
        nxt = []
        for n in frontier:
            for m in adj.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    nxt.append(m)
        frontier = nxt
        d += 1
    return frozenset(seen)


@dataclass(frozen=True)
class SpanClassEntry:
    start: int
    span_size: int
    class_size: int
    span_subset_of_class: bool
    span_equals_certified: bool
    boundary_members: int  # class members connected only through out-of-window excursions


@dataclass(frozen=True)
class SpanClassReport:
    entries: tuple[SpanClassEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.span_subset_of_class and e.span_equals_certified for e in self.entries)


def span_vs_class(
    gcmap: GCMap,
    window: BasisWindow,
    fuel: int,
    depth: int | None = None,
    starts: Iterable[int] | None = None,
) -> SpanClassReport:
    """Compare operator-reachable spans with orbit-equivalence classes.

    span(start) must always be contained in the class of start; it must equal
    the class restricted to members whose connecting orbits stay inside the
    window (the certified sub-window).  Members connected only through
    out-of-window excursions are reported as boundary effects, not failures.
    """
    hi = window.elements[-1]
    if window.elements != tuple(range(1, hi + 1)):
        raise ValueError("span_vs_class expects a contiguous window [1, hi]")
    full = classes(gcmap, hi, fuel)
    certified = classes(gcmap, hi, fuel, interior_only=True)
    t = build_T(gcmap, window)
    if starts is None:
        starts = window.elements
    span_cache: dict[int, frozenset[int]] = {}
    cert_classes = certified.classes()
    full_classes = full.classes()
    entries = []
    for s in starts:
        rep = certified.class_of(s)
        if rep not in span_cache:
            span_cache[rep] = reachable_span([t], s, depth)
        span = span_cache[rep]
        cert_set = set(cert_classes[rep])
        full_set = set(full_classes[full.class_of(s)])
        entries.append(
            SpanClassEntry(
                start=s,
                span_size=len(span),
                class_size=len(full_set),
                span_subset_of_class=span <= full_set,
                span_equals_certified=span == cert_set,
                boundary_members=len(full_set - cert_set),
            )
        )
    return SpanClassReport(tuple(entries))


# --- finitistic cores of the commutant lemmas -----------------------------------------


@dataclass(frozen=True)
class DescentReport:
    """Finitistic core of the projection-descent argument, exhaustively checked.

    The infinite-dimensional commutant statement is out of reach; what is
    verified is its proof mechanism: the fixed vector T2^2 T1 e_1 = e_1 and
    the strict descent (3n+1)/4 < n on every odd n ≡ 1 (mod 4) above 1.
    """

    limit: int
    checked: int
    counterexamples: tuple[int, ...]
    fixed_vector_ok: bool

    @property
    def ok(self) -> bool:
        return not self.counterexamples and self.fixed_vector_ok


def descent_check(limit: int) -> DescentReport:
    if limit < 5:
        raise ValueError("limit must be >= 5")
    bad = []
    checked = 0
    for n in range(5, limit + 1, 4):  # odd n ≡ 1 (mod 4), n > 1
        checked += 1
        if (3 * n + 1) % 4 != 0 or (3 * n + 1) // 4 >= n:
            bad.append(n)

    from .families import collatz

    window = BasisWindow.range(1, 4)
    t1, t2 = build_branch_ops(collatz(), window)
    word = t2 @ t2 @ t1
    fixed_ok = word.column(1) == {1: 1}
    return DescentReport(limit, checked, tuple(bad), fixed_ok)


@dataclass(frozen=True)
class WordCheckReport:
    period: int
    word: tuple[int, ...]
    fixed_vector_ok: bool
    annihilations_ok: bool
    contraction_failures: tuple[int, ...]
    contraction_inconclusive: tuple[int, ...]
    sampled: int

    @property
    def ok(self) -> bool:
        return self.fixed_vector_ok and self.annihilations_ok and not self.contraction_failures


def _word_step(gcmap: GCMap, word: Sequence[int], y: int) -> int | None:
    """Index-level T_I application: e_y -> e_{f^n(y)} if the itinerary matches, else 0."""
    v = y
    for letter in word:
        br = gcmap.branch_of(v)
        if br.index != letter:
            return None
        v = br.image(v)
    return v


def separating_word_check(
    gcmap: GCMap, x: int, window: BasisWindow, fuel: int, samples: int = 20
) -> WordCheckReport:
    """Verify the contraction mechanism of the separating-condition word T_I.

    Builds T_I = T_{i_n} ... T_{i_1} on the window and checks T_I e_x = e_x
    and T_I e_{f^j(x)} = 0 for 1 <= j < n by exact matrix products; then, for
    sampled y ~ x, checks T_I^m e_y dies (or forces y = x) by index-level
    iteration, which needs no truncation: annihilation happens through guard
    mismatch, independent of any window.
    """
    sep = separating_condition(gcmap, x, fuel)
    if not isinstance(sep, SeparatingResult) or not sep.aperiodic:
        raise ValueError(f"map does not satisfy the separating condition for {x}: {sep}")
    word = tuple(sep.word)
    n = sep.period

    ops = dict(zip((br.index for br in gcmap.branches), build_branch_ops(gcmap, window)))
    t_word = None
    for letter in word:  # rightmost factor T_{i_1} acts first
        op = ops[letter]
        t_word = op if t_word is None else op @ t_word
    fixed_ok = t_word.column(x) == {x: 1}
    annihilations_ok = True
    v = x
    for _ in range(1, n):
        v = gcmap.apply(v)
        if t_word.column(v):
            annihilations_ok = False

    # contraction on sampled equivalent y: T_I^m e_y must reach 0, never e_x
    failures: list[int] = []
    inconclusive: list[int] = []
    orb = gcmap.orbit(x, fuel)
    candidates = [y for y in orb.prefix if y != x]
    extra = [y for y in window.elements if y != x and y not in orb.values()]
    for y in (candidates + extra)[:samples]:
        cur: int | None = y
        for _ in range(fuel):
            if cur is None or cur == x:
                break
            cur = _word_step(gcmap, word, cur)
        if cur == x and y != x:
            failures.append(y)
        elif cur is not None:
            inconclusive.append(y)
    return WordCheckReport(
        n, word, fixed_ok, annihilations_ok, tuple(failures), tuple(inconclusive),
        len((candidates + extra)[:samples]),
    )


# --- norm bound -------------------------------------------------------------------


@dataclass(frozen=True)
class NormBoundReport:
    trials: int
    k: int
    max_ratio: Fraction
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.max_ratio <= self.k


def norm_bound_check(
    gcmap: GCMap, window: BasisWindow, trials: int, seed: int = 0
) -> NormBoundReport:
    """Check ||T v||^2 <= k ||v||^2 on seeded pseudo-random rational vectors.

    Vectors are supported on columns whose image stays inside the window, so
    the truncated action agrees with the infinite operator; all arithmetic is
    exact rational.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t = build_T(gcmap, window)
    support_pool = sorted(t.exact_cols & set(t.cols))
    rng = random.Random(seed)
    k = gcmap.k
    max_ratio = Fraction(0)
    violations = 0
    for _ in range(trials):
        size = rng.randint(1, min(12, len(support_pool)))
        support = rng.sample(support_pool, size)
        vec = {
            n: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9)) for n in support
        }
        out = t.apply_vector(vec)
        num = sum(v * v for v in out.values())
        den = sum(v * v for v in vec.values())
        ratio = Fraction(num, den)
        if ratio > max_ratio:
            max_ratio = ratio
        if ratio > k:
            violations += 1
    return NormBoundReport(trials, k, max_ratio, violations)


# --- sparse triplet dumps ------------------------------------------------------------


def dump_triplets(op: TruncatedOperator) -> str:
    """Sparse triplet text: one ``row col value`` line per entry, labels not positions."""
    lines = ["# row col value"]
    for n in sorted(op.cols):
        for r in sorted(op.cols[n]):
            lines.append(f"{r} {n} {op.cols[n][r]}")
    return "\n".join(lines) + "\n"
