"""Substitute/complement detection and the conditions built on top of it.

All searches are exhaustive over the subset lattice and walk subsets in
ascending bitmask order, so the first witness found is deterministic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import ChoiceFunction, Market, indicator, members, submasks

SUBSTITUTE = "substitute"
COMPLEMENT = "complement"
KINDS = (SUBSTITUTE, COMPLEMENT)


@dataclass(frozen=True)
class RelationWitness:
    """``w`` is a ``kind`` to ``w2``, shown by the available set ``subset``."""

    w: int
    w2: int
    kind: str
    subset: int
    firm: Optional[int] = None

    def replays(self, cf: ChoiceFunction) -> bool:
        return _relation_holds(cf, self.w, self.w2, self.kind, self.subset)


def _relation_holds(cf: ChoiceFunction, w: int, w2: int, kind: str, x: int) -> bool:
    both = (1 << w) | (1 << w2)
    if x & both != both:
        return False
    without = cf(x & ~(1 << w)) >> w2 & 1
    with_w = cf(x) >> w2 & 1
    if kind == SUBSTITUTE:
        return bool(without and not with_w)
    if kind == COMPLEMENT:
        return bool(with_w and not without)
    raise ValueError(f"unknown relation kind {kind!r}")


def find_relation(cf: ChoiceFunction, w: int, w2: int, kind: str) -> Optional[RelationWitness]:
    if w == w2:
        raise ValueError("relation needs two distinct workers")
    table = cf.table()
    both = (1 << w) | (1 << w2)
    rest = ((1 << cf.n_workers) - 1) & ~both
    bw, bw2 = 1 << w, 1 << w2
    for extra in submasks(rest):
        x = extra | both
        without = table[x & ~bw] & bw2
        with_w = table[x] & bw2
        if kind == SUBSTITUTE and without and not with_w:
            return RelationWitness(w, w2, kind, x)
        if kind == COMPLEMENT and with_w and not without:
            return RelationWitness(w, w2, kind, x)
    return None


def is_substitute(cf: ChoiceFunction, w: int, w2: int) -> tuple[bool, Optional[RelationWitness]]:
    """Is ``w`` a substitute to ``w2``?  Returns the verdict and a witness."""
    wit = find_relation(cf, w, w2, SUBSTITUTE)
    return wit is not None, wit


def is_complement(cf: ChoiceFunction, w: int, w2: int) -> tuple[bool, Optional[RelationWitness]]:
    """Is ``w`` a complement to ``w2``?  Returns the verdict and a witness."""
    wit = find_relation(cf, w, w2, COMPLEMENT)
    return wit is not None, wit


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[RelationWitness] = None
    clause: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


def _scan(cf: ChoiceFunction, pairs: Iterable[tuple[int, int, str, str]]) -> Verdict:
    for w, w2, kind, clause in pairs:
        wit = find_relation(cf, w, w2, kind)
        if wit is not None:
            return Verdict(False, wit, clause)
    return Verdict(True)


def _within(groups: Sequence[int]):
    for g in groups:
        ws = members(g)
        for w in ws:
            for w2 in ws:
                if w != w2:
                    yield w, w2, COMPLEMENT, "(i) within-group complement"


def satisfies_substitutes(cf: ChoiceFunction) -> Verdict:
    """No worker is a complement to any other worker."""
    n = cf.n_workers
    return _scan(
        cf,
        ((w, w2, COMPLEMENT, "complement") for w in range(n) for w2 in range(n) if w != w2),
    )


def satisfies_substitutes_classical(cf: ChoiceFunction) -> Verdict:
    """Classical form: ``w2 in Ch(X)`` implies ``w2 in Ch(X - {w})`` for ``w, w2 in X``.

    Deliberately written as its own scan (over all X first) so it can serve
    as a cross-check for :func:`satisfies_substitutes`.
    """
    table = cf.table()
    for x in range(1 << cf.n_workers):
        chosen = table[x]
        for w in members(x):
            for w2 in members(chosen):
                if w2 != w and not table[x & ~(1 << w)] >> w2 & 1:
                    return Verdict(False, RelationWitness(w, w2, COMPLEMENT, x), "complement")
    return Verdict(True)


def satisfies_usc(cf: ChoiceFunction, groups: Sequence[int]) -> Verdict:
    """Unidirectional substitutes and complements over an ordered partition.

    (i) no complements inside any group; (ii) for every earlier group ``j``
    and later group ``k``, no worker of ``k`` is a substitute or complement
    to a worker of ``j``.  With two groups this is the skilled/unskilled
    condition; with one group it is the substitutes condition.
    """

    def cross():
        for j, k in itertools.combinations(range(len(groups)), 2):
            for s in members(groups[j]):
                for u in members(groups[k]):
                    yield u, s, SUBSTITUTE, "(ii) later group substitutes earlier"
                    yield u, s, COMPLEMENT, "(ii) later group complements earlier"

    return _scan(cf, itertools.chain(_within(groups), cross()))


def satisfies_sscc(cf: ChoiceFunction, groups: Sequence[int]) -> Verdict:
    """Same-side substitutability and cross-side complementarity (two groups)."""
    if len(groups) != 2:
        raise ValueError(f"SSCC needs exactly two groups, got {len(groups)}")
    s_group, u_group = groups

    def cross():
        for s in members(s_group):
            for u in members(u_group):
                yield u, s, SUBSTITUTE, "(ii) cross-side substitute"
                yield s, u, SUBSTITUTE, "(ii) cross-side substitute"

    return _scan(cf, itertools.chain(_within(groups), cross()))


@dataclass
class FirmReport:
    firm: str
    substitutes: Verdict
    usc: Verdict
    sscc: Optional[Verdict]
    demand_type: frozenset = field(default_factory=frozenset)


@dataclass
class ConditionReport:
    firms: list[FirmReport]
    demand_type: frozenset
    determinant_witness: Optional[tuple[tuple[tuple[int, ...], ...], int]]

    @property
    def all_usc(self) -> bool:
        return all(r.usc.holds for r in self.firms)


def condition_report(market: Market) -> ConditionReport:
    rows = []
    union: set = set()
    for f, cf in enumerate(market.choices):
        verdicts = []
        for v in (
            satisfies_substitutes(cf),
            satisfies_usc(cf, market.groups),
            satisfies_sscc(cf, market.groups) if len(market.groups) == 2 else None,
        ):
            if v is not None and v.witness is not None:
                v = Verdict(v.holds, _with_firm(v.witness, f), v.clause)
            verdicts.append(v)
        dt = demand_type(cf)
        union |= dt
        rows.append(FirmReport(market.firms[f], *verdicts, demand_type=dt))
    exceeds, vecs, det = max_minor_determinant_exceeds_unit(union, market.n_workers)
    return ConditionReport(rows, frozenset(union), (vecs, det) if exceeds else None)


def _with_firm(wit: RelationWitness, f: int) -> RelationWitness:
    return RelationWitness(wit.w, wit.w2, wit.kind, wit.subset, f)


def demand_type(cf: ChoiceFunction) -> frozenset[tuple[int, ...]]:
    """Indicator differences ``1[Ch(X')] - 1[Ch(X)]`` over all ``X < X'``, zero dropped."""
    n = cf.n_workers
    table = cf.table()
    ind = [indicator(c, n) for c in table]
    out = set()
    for big in range(1 << n):
        cb = table[big]
        for small in submasks(big):
            if small == big:
                continue
            if table[small] != cb:
                out.add(tuple(a - b for a, b in zip(ind[big], ind[small])))
    return frozenset(out)


def integer_determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix by rational elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            if factor:
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


def max_minor_determinant_exceeds_unit(
    vectors: Iterable[Sequence[int]], n: Optional[int] = None
) -> tuple[bool, tuple[tuple[int, ...], ...], int]:
    """Look for ``n`` vectors whose determinant lies outside {-1, 0, 1}.

    Vectors are tried in descending lexicographic order, so the witness and
    the sign of its determinant are reproducible.  Returns
    ``(found, witness, det)``; ``witness`` is empty when nothing is found.
    """
    vecs = sorted({tuple(v) for v in vectors}, reverse=True)
    if n is None:
        if not vecs:
            return False, (), 0
        n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise ValueError("vectors must share a common length")
    for combo in itertools.combinations(vecs, n):
        det = integer_determinant(combo)
        if abs(det) > 1:
            return True, combo, det
    return False, (), 0
