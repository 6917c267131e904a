"""Individual rationality, blocking coalitions and stable-matching enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import (
    NULL,
    EnumerationLimitError,
    Market,
    Matching,
    available_set,
    check_enumerable,
    submasks,
)

DEFAULT_MAX_ENUM_WORKERS = 10
DEFAULT_MAX_ENUM_FIRMS = 6


@dataclass(frozen=True)
class BlockingCoalition:
    firm: int
    workers: int


def is_individually_rational(market: Market, matching: Matching) -> tuple[bool, Optional[str]]:
    """Workers only hold acceptable jobs and no firm wants to drop anyone."""
    for w, f in enumerate(matching.assignment):
        if f != NULL and market.worker_rank(w, f) is None:
            return False, f"{market.workers[w]} finds {market.firms[f]} unacceptable"
    for f, held in enumerate(matching.holdings()):
        kept = market.choices[f](held)
        if kept != held:
            return False, (
                f"{market.firms[f]} would drop {market.names(held & ~kept)}"
            )
    return True, None


def blocks(market: Market, matching: Matching, coalition: BlockingCoalition) -> bool:
    f, x = coalition.firm, coalition.workers
    if x & ~available_set(market, matching, f):
        return False
    return market.choices[f].prefers(x, matching.holdings()[f])


def find_blocking_coalition(
    market: Market, matching: Matching, method: str = "choice"
) -> Optional[BlockingCoalition]:
    """First blocking coalition, firms in index order.

    ``method="choice"`` tests only ``Ch_f(A_f)`` per firm, which is the
    best coalition ``f`` can form.  ``method="brute"`` tries every subset of
    every available set and exists to cross-check the first.
    """
    held = matching.holdings()
    for f, cf in enumerate(market.choices):
        avail = available_set(market, matching, f)
        if method == "choice":
            x = cf(avail)
            if x != held[f] and cf.prefers(x, held[f]):
                return BlockingCoalition(f, x)
        elif method == "brute":
            check_enumerable(avail.bit_count())
            for x in submasks(avail):
                if cf.prefers(x, held[f]):
                    return BlockingCoalition(f, x)
        else:
            raise ValueError(f"unknown method {method!r}")
    return None


def is_stable(market: Market, matching: Matching) -> bool:
    ok, _ = is_individually_rational(market, matching)
    return ok and find_blocking_coalition(market, matching) is None


def enumerate_stable_matchings(
    market: Market,
    max_workers: int = DEFAULT_MAX_ENUM_WORKERS,
    max_firms: int = DEFAULT_MAX_ENUM_FIRMS,
) -> list[Matching]:
    """Every stable matching, in lexicographic order of assignment vectors.

    Only acceptable firms (and NULL) are tried for each worker; anything
    else fails individual rationality anyway.
    """
    if market.n_workers > max_workers or market.n_firms > max_firms:
        raise EnumerationLimitError(
            f"enumeration capped at {max_workers} workers and {max_firms} firms; "
            f"market has {market.n_workers} and {market.n_firms}"
        )
    options = [sorted((NULL,) + prefs) for prefs in market.worker_prefs]
    found = []
    for assignment in itertools.product(*options):
        matching = Matching(tuple(assignment), market.n_firms)
        if is_stable(market, matching):
            found.append(matching)
    return found
