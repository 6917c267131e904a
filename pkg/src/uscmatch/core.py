"""Shared vocabulary: worker subsets, choice functions, markets and matchings.

Worker subsets are plain ``int`` bitmasks over the dense worker index (bit
``i`` set means worker ``i`` is a member).  Firms are indexed ``0..m-1`` and
:data:`NULL` stands for the null firm, i.e. being unmatched.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

NULL = -1

DEFAULT_MAX_WORKERS = 20
_CAP_ENV = "USCMATCH_MAX_WORKERS"


class EnumerationLimitError(ValueError):
    """Raised when an exhaustive subset search would exceed the size cap."""


def max_workers() -> int:
    """Enumeration cap on ``|W|``; override with ``USCMATCH_MAX_WORKERS``."""
    raw = os.environ.get(_CAP_ENV)
    return int(raw) if raw else DEFAULT_MAX_WORKERS


def check_enumerable(n: int, limit: Optional[int] = None) -> None:
    limit = max_workers() if limit is None else limit
    if n > limit:
        raise EnumerationLimitError(
            f"{n} workers exceeds the enumeration cap of {limit} "
            f"(set {_CAP_ENV} to raise it)"
        )


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def submasks(mask: int) -> Iterable[int]:
    """All submasks of ``mask`` in ascending order."""
    # walk downward with the standard (s - 1) & mask trick, then reverse
    subs = []
    s = mask
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return reversed(subs)


def indicator(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))


class ChoiceFunction:
    """A total, deterministic map from worker subsets to chosen subsets.

    Subclasses implement :meth:`_choose`.  Calls are memoized per subset,
    which is safe because choice is deterministic.
    """

    def __init__(self, n_workers: int):
        self.n_workers = n_workers
        self._cache: dict[int, int] = {}
        self._table: Optional[list[int]] = None

    def _choose(self, available: int) -> int:
        raise NotImplementedError

    def __call__(self, available: int) -> int:
        try:
            return self._cache[available]
        except KeyError:
            chosen = self._choose(available) if available else 0
            self._cache[available] = chosen
            return chosen

    def table(self) -> list[int]:
        """Choices for every subset, indexed by bitmask."""
        if self._table is None:
            check_enumerable(self.n_workers)
            self._table = [self(x) for x in range(1 << self.n_workers)]
        return self._table

    def prefers(self, x: int, y: int) -> bool:
        """Strict preference of ``x`` over ``y``.

        Without an explicit ranking we fall back on revealed preference:
        ``x`` beats ``y`` when it is chosen from ``x | y``.
        """
        return x != y and self(x | y) == x


class RankedChoice(ChoiceFunction):
    """Choice induced by a strict ranking of acceptable subsets.

    ``ranked`` lists subsets best first; the empty set is implicitly next,
    and every unlisted nonempty subset ranks below the empty set.  The list
    is stored as given so that :func:`validate_instance` can report
    duplicates.
    """

    def __init__(self, ranked: Sequence[int], n_workers: int):
        super().__init__(n_workers)
        self.ranked = tuple(ranked)
        self._rank: dict[int, int] = {}
        for i, s in enumerate(self.ranked):
            self._rank.setdefault(s, i)
        self._rank.setdefault(0, len(self.ranked))

    def _choose(self, available: int) -> int:
        for s in self.ranked:
            if s & ~available == 0:
                return s
        return 0

    def rank(self, subset: int) -> Optional[int]:
        """Position in the ranking (0 is best); ``None`` if below the empty set."""
        return self._rank.get(subset)

    def prefers(self, x: int, y: int) -> bool:
        rx, ry = self.rank(x), self.rank(y)
        if rx is None:
            return False
        return ry is None or rx < ry

    def __repr__(self) -> str:
        return f"RankedChoice({list(self.ranked)!r}, n_workers={self.n_workers})"


def choose(cf: ChoiceFunction, available: int) -> int:
    return cf(available)


@dataclass(frozen=True)
class Matching:
    """Worker-to-firm assignment; ``assignment[w]`` is a firm index or NULL."""

    assignment: tuple[int, ...]
    n_firms: int

    @classmethod
    def from_holdings(cls, holdings: Sequence[int], n_workers: int) -> "Matching":
        assignment = [NULL] * n_workers
        for f, mask in enumerate(holdings):
            for w in members(mask):
                if assignment[w] != NULL:
                    raise ValueError(f"worker {w} assigned to firms {assignment[w]} and {f}")
                assignment[w] = f
        return cls(tuple(assignment), len(holdings))

    @classmethod
    def empty(cls, n_workers: int, n_firms: int) -> "Matching":
        return cls((NULL,) * n_workers, n_firms)

    def holdings(self) -> tuple[int, ...]:
        out = [0] * self.n_firms
        for w, f in enumerate(self.assignment):
            if f != NULL:
                out[f] |= 1 << w
        return tuple(out)

    def __getitem__(self, f: int) -> int:
        """Workers held by firm ``f`` (or the unmatched set for NULL)."""
        mask = 0
        for w, g in enumerate(self.assignment):
            if g == f:
                mask |= 1 << w
        return mask

    def firm_of(self, w: int) -> int:
        return self.assignment[w]

    @property
    def unmatched(self) -> int:
        return self[NULL]


@dataclass(frozen=True, eq=False)
class Market:
    """A two-sided many-to-one market.

    ``groups`` is the ordered worker partition as bitmasks, earliest group
    first.  ``worker_prefs[w]`` lists acceptable firms best first; firms not
    listed rank below the null firm.
    """

    firms: tuple[str, ...]
    workers: tuple[str, ...]
    groups: tuple[int, ...]
    worker_prefs: tuple[tuple[int, ...], ...]
    choices: tuple[ChoiceFunction, ...]

    @property
    def n_workers(self) -> int:
        return len(self.workers)

    @property
    def n_firms(self) -> int:
        return len(self.firms)

    @property
    def all_workers(self) -> int:
        return (1 << self.n_workers) - 1

    def worker_rank(self, w: int, f: int) -> Optional[int]:
        try:
            return self.worker_prefs[w].index(f)
        except ValueError:
            return None

    def weakly_prefers(self, w: int, f: int, g: int) -> bool:
        """Whether worker ``w`` weakly prefers ``f`` to ``g`` (either may be NULL)."""
        if f == g:
            return True
        rf = None if f == NULL else self.worker_rank(w, f)
        if rf is None:
            # f is NULL or unacceptable; beats g only if g is unacceptable
            return f == NULL and g != NULL and self.worker_rank(w, g) is None
        rg = None if g == NULL else self.worker_rank(w, g)
        return rg is None or rf < rg

    def group_of(self, w: int) -> int:
        for k, g in enumerate(self.groups):
            if g >> w & 1:
                return k
        raise ValueError(f"worker {w} is in no group")

    def names(self, mask: int) -> list[str]:
        return [self.workers[i] for i in members(mask)]

    def firm_name(self, f: int) -> str:
        return "null" if f == NULL else self.firms[f]

    def worker_index(self, name: str) -> int:
        return self.workers.index(name)

    def firm_index(self, name: str) -> int:
        return self.firms.index(name)

    def mask(self, names: Iterable[str]) -> int:
        return mask_of(self.worker_index(n) for n in names)

    def matching(self, holdings: Mapping[str, Iterable[str]]) -> Matching:
        """Build a matching from firm name -> worker names; others unmatched."""
        sets = [0] * self.n_firms
        for fname, wnames in holdings.items():
            sets[self.firm_index(fname)] = self.mask(wnames)
        return Matching.from_holdings(sets, self.n_workers)

    def describe(self, matching: Matching) -> dict[str, list[str]]:
        out = {f: self.names(matching[i]) for i, f in enumerate(self.firms)}
        out["null"] = self.names(matching.unmatched)
        return out

    @classmethod
    def from_names(
        cls,
        firms: Sequence[str],
        workers: Sequence[str],
        groups: Sequence[Sequence[str]],
        worker_prefs: Mapping[str, Sequence[str]],
        firm_prefs: Optional[Mapping[str, Sequence[Sequence[str]]]] = None,
        choices: Optional[Mapping[str, ChoiceFunction]] = None,
    ) -> "Market":
        """Convenience constructor from names.

        Each firm takes its choice function from ``choices`` if present,
        otherwise a :class:`RankedChoice` built from ``firm_prefs``.
        """
        widx = {w: i for i, w in enumerate(workers)}
        fidx = {f: i for i, f in enumerate(firms)}
        n = len(workers)
        firm_prefs = firm_prefs or {}
        choices = choices or {}
        cfs = []
        for f in firms:
            if f in choices:
                cfs.append(choices[f])
            else:
                ranked = [mask_of(widx[w] for w in subset) for subset in firm_prefs.get(f, [])]
                cfs.append(RankedChoice(ranked, n))
        return cls(
            firms=tuple(firms),
            workers=tuple(workers),
            groups=tuple(mask_of(widx[w] for w in g) for g in groups),
            worker_prefs=tuple(
                tuple(fidx[f] for f in worker_prefs.get(w, [])) for w in workers
            ),
            choices=tuple(cfs),
        )


def available_set(
    market: Market, matching: Matching, f: int, restrict: Optional[int] = None
) -> int:
    """Workers who weakly prefer firm ``f`` to their assignment under ``matching``."""
    out = 0
    for w in range(market.n_workers):
        if market.weakly_prefers(w, f, matching.assignment[w]):
            out |= 1 << w
    if restrict is not None:
        out &= restrict
    return out


def validate_instance(market: Market) -> list[str]:
    """Check the structural invariants of a market; returns violation messages."""
    problems: list[str] = []
    n, m = market.n_workers, market.n_firms
    everyone = market.all_workers

    seen = 0
    for k, g in enumerate(market.groups):
        if g & seen:
            problems.append(f"groups[{k}]: overlaps an earlier group ({market.names(g & seen)})")
        if g & ~everyone:
            problems.append(f"groups[{k}]: contains unknown worker ids")
        seen |= g
    if seen & everyone != everyone:
        problems.append(
            f"groups: partition does not cover W (missing {market.names(everyone & ~seen)})"
        )

    if len(market.worker_prefs) != n:
        problems.append(f"worker_prefs: expected {n} entries, got {len(market.worker_prefs)}")
    for w, prefs in enumerate(market.worker_prefs):
        where = f"worker_prefs[{market.workers[w] if w < n else w}]"
        if len(set(prefs)) != len(prefs):
            problems.append(f"{where}: duplicate firm in ranking")
        for f in prefs:
            if not 0 <= f < m:
                problems.append(f"{where}: unknown firm id {f}")

    if len(market.choices) != m:
        problems.append(f"choices: expected {m} choice functions, got {len(market.choices)}")
    for f, cf in enumerate(market.choices):
        where = f"firm_prefs[{market.firms[f] if f < m else f}]"
        if cf.n_workers != n:
            problems.append(f"{where}: choice function built for {cf.n_workers} workers, market has {n}")
        if isinstance(cf, RankedChoice):
            if len(set(cf.ranked)) != len(cf.ranked):
                problems.append(f"{where}: duplicate ranked subset")
            if 0 in cf.ranked and cf.ranked.index(0) != len(cf.ranked) - 1:
                problems.append(f"{where}: empty set listed before other subsets")
            if any(s & ~everyone for s in cf.ranked):
                problems.append(f"{where}: ranked subset contains unknown workers")
        else:
            validate = getattr(cf, "validate", None)
            if validate is not None:
                problems.extend(f"school[{market.firms[f]}]: {msg}" for msg in validate(market.groups))
    return problems
