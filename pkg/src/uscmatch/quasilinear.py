"""Demand correspondences of a firm with a quasi-linear valuation.

Everything is exact.  Valuations and salaries are :class:`fractions.Fraction`;
the vectorized relation scan rescales all candidate prices to a common
integer denominator so numpy works on ``int64`` without rounding.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .conditions import COMPLEMENT, KINDS, SUBSTITUTE
from .core import check_enumerable, members

logger = logging.getLogger(__name__)

Number = Union[int, str, Fraction]
Salaries = tuple[Fraction, ...]

# product grids above this many points are scanned in chunks
_CHUNK = 1 << 16


class Valuation:
    """A total map from worker subsets (bitmasks) to exact values."""

    def __init__(self, values: Sequence[Number], names: Optional[Sequence[str]] = None):
        n = (len(values) - 1).bit_length()
        if len(values) != 1 << n:
            raise ValueError(f"need a value for all 2^n subsets, got {len(values)} values")
        check_enumerable(n)
        self.n_workers = n
        self.values = tuple(Fraction(x) for x in values)
        self.names = tuple(names) if names is not None else tuple(f"w{i}" for i in range(n))
        if len(self.names) != n:
            raise ValueError(f"{len(self.names)} names for {n} workers")
        self._scans: dict = {}

    @classmethod
    def from_mapping(cls, workers: Sequence[str], table: Mapping[str, Number]) -> "Valuation":
        """Build from keys like ``"s,u"`` (``""`` is the empty set); must be total."""
        idx = {w: i for i, w in enumerate(workers)}
        values: list[Optional[Fraction]] = [None] * (1 << len(workers))
        for key, val in table.items():
            mask = 0
            for name in filter(None, (k.strip() for k in key.split(","))):
                if name not in idx:
                    raise ValueError(f"valuation key {key!r}: unknown worker {name!r}")
                mask |= 1 << idx[name]
            if values[mask] is not None:
                raise ValueError(f"valuation key {key!r}: subset given twice")
            values[mask] = Fraction(val)
        missing = [m for m, v in enumerate(values) if v is None]
        if missing:
            keys = [",".join(workers[i] for i in members(m)) for m in missing]
            raise ValueError(f"valuation is missing subsets: {keys}")
        return cls(values, workers)

    def key(self, mask: int) -> str:
        return ",".join(self.names[i] for i in members(mask))

    def to_mapping(self) -> dict[str, str]:
        return {self.key(m): str(v) for m, v in enumerate(self.values)}

    def shifted(self, c: Number) -> "Valuation":
        c = Fraction(c)
        return Valuation([x + c for x in self.values], self.names)

    def __call__(self, mask: int) -> Fraction:
        return self.values[mask]

    def __repr__(self) -> str:
        return f"Valuation({self.to_mapping()!r})"


def salaries(*values: Number) -> Salaries:
    return tuple(Fraction(x) for x in values)


def cost(mask: int, p: Sequence[Fraction]) -> Fraction:
    return sum((p[i] for i in members(mask)), Fraction(0))


@dataclass(frozen=True)
class DemandResult:
    bundles: tuple[int, ...]
    surplus: Fraction

    def __contains__(self, mask: int) -> bool:
        return mask in self.bundles


def demand(v: Valuation, p: Sequence[Number]) -> DemandResult:
    """All surplus-maximizing subsets at salaries ``p``, ascending by bitmask."""
    p = salaries(*p)
    if len(p) != v.n_workers:
        raise ValueError(f"salary vector has {len(p)} entries, expected {v.n_workers}")
    best: Optional[Fraction] = None
    bundles: list[int] = []
    for mask in range(1 << v.n_workers):
        s = v(mask) - cost(mask, p)
        if best is None or s > best:
            best, bundles = s, [mask]
        elif s == best:
            bundles.append(mask)
    return DemandResult(tuple(bundles), best)


def is_demanded(v: Valuation, p: Sequence[Number], w: int) -> bool:
    return any(b >> w & 1 for b in demand(v, p).bundles)


@dataclass(frozen=True)
class DemandProfile:
    """Demand as a function of one worker's salary ``t``, others held fixed.

    ``below`` is demanded for ``t < critical``, ``above`` for
    ``t > critical``, and their union exactly at ``critical``.
    """

    worker: int
    critical: Fraction
    below: tuple[int, ...]
    above: tuple[int, ...]

    @property
    def at(self) -> tuple[int, ...]:
        return tuple(sorted(self.below + self.above))

    def family_at(self, t: Number) -> tuple[int, ...]:
        t = Fraction(t)
        if t < self.critical:
            return self.below
        if t > self.critical:
            return self.above
        return self.at


def demanded_profile(v: Valuation, p: Sequence[Number], w: int) -> DemandProfile:
    """Critical salary for ``w`` given the other salaries in ``p`` (``p[w]`` is ignored)."""
    p = list(salaries(*p))
    p[w] = Fraction(0)
    best_in: Optional[Fraction] = None
    best_out: Optional[Fraction] = None
    fam_in: list[int] = []
    fam_out: list[int] = []
    for mask in range(1 << v.n_workers):
        s = v(mask) - cost(mask, p)
        if mask >> w & 1:
            if best_in is None or s > best_in:
                best_in, fam_in = s, [mask]
            elif s == best_in:
                fam_in.append(mask)
        else:
            if best_out is None or s > best_out:
                best_out, fam_out = s, [mask]
            elif s == best_out:
                fam_out.append(mask)
    return DemandProfile(w, best_in - best_out, tuple(fam_in), tuple(fam_out))


@dataclass(frozen=True)
class PriceWitness:
    """Salary vectors differing only in ``w``'s salary, ``high[w] > low[w]``.

    For a substitute, ``w2`` is demanded at ``high`` but not at ``low``; for
    a complement it is the other way round.
    """

    w: int
    w2: int
    kind: str
    high: Salaries
    low: Salaries

    def verify(self, v: Valuation) -> bool:
        others_equal = all(
            a == b for i, (a, b) in enumerate(zip(self.high, self.low)) if i != self.w
        )
        if not others_equal or not self.high[self.w] > self.low[self.w]:
            return False
        at_high = is_demanded(v, self.high, self.w2)
        at_low = is_demanded(v, self.low, self.w2)
        if self.kind == SUBSTITUTE:
            return at_high and not at_low
        return at_low and not at_high


def candidate_grid(v: Valuation) -> list[Fraction]:
    """Valuation differences, midpoints between neighbours, and one value past each end."""
    diffs = sorted({a - b for a in v.values for b in v.values})
    mids = [(a + b) / 2 for a, b in zip(diffs, diffs[1:])]
    return sorted(set(diffs) | set(mids) | {diffs[0] - 1, diffs[-1] + 1})


def dense_grid(v: Valuation, refine: int = 4) -> list[Fraction]:
    """:func:`candidate_grid` with every gap split ``refine`` ways and wider sentinels."""
    base = candidate_grid(v)
    pts = set(base)
    for a, b in zip(base, base[1:]):
        for j in range(1, refine):
            pts.add(a + (b - a) * Fraction(j, refine))
    pts |= {base[0] - 2, base[-1] + 2}
    return sorted(pts)


def _grid_for(v: Valuation, method: str) -> list[Fraction]:
    if method == "grid":
        return candidate_grid(v)
    if method == "dense":
        return dense_grid(v)
    raise ValueError(f"unknown method {method!r}")


def _lcm_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for x in values:
        out = math.lcm(out, x.denominator)
    return out


def _point_chunks(n_coords: int, n_vals: int):
    """Yield index arrays of shape (rows, n_coords) covering the product grid in order."""
    if n_coords == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    tail = min(n_coords, 2)
    head = n_coords - tail
    tail_idx = np.array(list(itertools.product(range(n_vals), repeat=tail)), dtype=np.int64)
    for prefix in itertools.product(range(n_vals), repeat=head):
        block = np.empty((len(tail_idx), n_coords), dtype=np.int64)
        block[:, :head] = prefix
        block[:, head:] = tail_idx
        for start in range(0, len(block), _CHUNK):
            yield block[start:start + _CHUNK]


def _scan_worker(v: Valuation, w: int, grid: list[Fraction]) -> dict[tuple[int, str], PriceWitness]:
    """Scan salary profiles of everyone but ``w`` for witnesses ``w -> w2``."""
    n = v.n_workers
    others = [i for i in range(n) if i != w]
    scale = _lcm_denominator(list(grid) + list(v.values))
    grid_int = np.array([int(g * scale) for g in grid], dtype=np.int64)
    vals = np.array([int(x * scale) for x in v.values], dtype=np.int64)
    subsets = np.arange(1 << n)
    member = np.array(
        [[(m >> i) & 1 for m in subsets] for i in others], dtype=np.int64
    ).reshape(len(others), 1 << n)
    fam_a = (subsets >> w) & 1 == 1
    fam_b = ~fam_a
    has = {w2: ((subsets >> w2) & 1 == 1) for w2 in others}

    found: dict[tuple[int, str], PriceWitness] = {}
    wanted = {(w2, kind) for w2 in others for kind in KINDS}
    for idx in _point_chunks(len(others), len(grid_int)):
        prices = grid_int[idx]
        surplus = vals[None, :] - prices @ member
        sa, sb = surplus[:, fam_a], surplus[:, fam_b]
        a, b = sa.max(axis=1), sb.max(axis=1)
        top_a = sa == a[:, None]
        top_b = sb == b[:, None]
        for w2 in others:
            below = (top_a & has[w2][fam_a]).any(axis=1)
            above = (top_b & has[w2][fam_b]).any(axis=1)
            for kind, hit in ((SUBSTITUTE, above & ~below), (COMPLEMENT, below & ~above)):
                if (w2, kind) in found or not hit.any():
                    continue
                r = int(np.argmax(hit))
                base = [Fraction(0)] * n
                for col, i in enumerate(others):
                    base[i] = Fraction(int(prices[r, col]), scale)
                t = Fraction(int(a[r] - b[r]), scale)
                hi, lo = (t, t - 1) if kind == SUBSTITUTE else (t + 1, t)
                wit = PriceWitness(
                    w, w2, kind,
                    tuple(base[:w] + [hi] + base[w + 1:]),
                    tuple(base[:w] + [lo] + base[w + 1:]),
                )
                if not wit.verify(v):
                    raise AssertionError(f"scan produced a witness that does not verify: {wit}")
                found[(w2, kind)] = wit
        if wanted <= found.keys():
            break
    return found


def _scan(v: Valuation, w: int, method: str) -> dict[tuple[int, str], PriceWitness]:
    key = (w, method)
    if key not in v._scans:
        v._scans[key] = _scan_worker(v, w, _grid_for(v, method))
    return v._scans[key]


def detect_ql_relation(
    v: Valuation, w: int, w2: int, kind: str, method: str = "grid"
) -> tuple[bool, Optional[PriceWitness]]:
    """Is ``w`` a substitute/complement to ``w2``?  Sound; complete on the grid.

    Salaries of the workers other than ``w`` range over the candidate grid
    (``method="grid"``) or its refinement (``method="dense"``).  For each
    profile the demanded status of ``w2`` on either side of ``w``'s critical
    salary decides the relation.  Returned witnesses are re-checked exactly.
    """
    if w == w2:
        raise ValueError("relation needs two distinct workers")
    if kind not in KINDS:
        raise ValueError(f"unknown relation kind {kind!r}")
    wit = _scan(v, w, method).get((w2, kind))
    return wit is not None, wit


@dataclass
class RelationTable:
    n_workers: int
    cells: dict[tuple[int, int, str], Optional[PriceWitness]] = field(default_factory=dict)

    def holds(self, w: int, w2: int, kind: str) -> bool:
        return self.cells[(w, w2, kind)] is not None

    def asymmetries(self) -> list[tuple[int, int, str]]:
        return [
            (w, w2, kind)
            for (w, w2, kind) in self.cells
            if self.holds(w, w2, kind) != self.holds(w2, w, kind)
        ]

    @property
    def symmetric(self) -> bool:
        return not self.asymmetries()


def relation_table(v: Valuation, method: str = "grid") -> RelationTable:
    table = RelationTable(v.n_workers)
    for w in range(v.n_workers):
        for w2 in range(v.n_workers):
            if w == w2:
                continue
            for kind in KINDS:
                table.cells[(w, w2, kind)] = detect_ql_relation(v, w, w2, kind, method)[1]
    return table


def verify_theorem3(v: Valuation, method: str = "grid") -> tuple[bool, RelationTable]:
    """Whether substitute and complement relations are symmetric for ``v``."""
    table = relation_table(v, method)
    bad = table.asymmetries()
    for w, w2, kind in bad:
        logger.error(
            "asymmetric %s relation: %s -> %s holds=%s, witness=%s",
            kind, v.names[w], v.names[w2], table.holds(w, w2, kind), table.cells[(w, w2, kind)],
        )
    return not bad, table


def cross_effect_free(v: Valuation, w: int, w2: int, method: str = "grid") -> bool:
    """``w2`` is neither a substitute nor a complement to ``w``."""
    return not any(detect_ql_relation(v, w2, w, kind, method)[0] for kind in KINDS)
