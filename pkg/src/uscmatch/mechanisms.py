"""Worker-proposing deferred acceptance, one stage or one stage per group."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import NULL, Market, Matching, members

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Round:
    """One round of proposals.

    Per-firm tuples are indexed by firm.  ``considered`` is the pool the
    firm chose from (new applicants plus what it held before) and is zero
    for firms that received no new applicants this round.
    """

    stage: int
    index: int
    applicants: tuple[int, ...]
    considered: tuple[int, ...]
    held: tuple[int, ...]
    rejected: tuple[int, ...]
    exited: int


@dataclass(frozen=True)
class LateRejection:
    stage: int
    round: int
    worker: int
    firm: int


@dataclass(frozen=True)
class MechanismTrace:
    rounds: tuple[Round, ...]
    stages: tuple[int, ...]
    matching: Matching
    late_rejections: tuple[LateRejection, ...] = ()

    def stage_rounds(self, stage: int) -> list[Round]:
        return [r for r in self.rounds if r.stage == stage]

    def replay(self) -> Matching:
        """Rebuild the final matching from the last holdings in the trace."""
        n = len(self.matching.assignment)
        if not self.rounds:
            return Matching.empty(n, self.matching.n_firms)
        return Matching.from_holdings(self.rounds[-1].held, n)

    def to_records(self, market: Market) -> list[dict]:
        recs = []
        for r in self.rounds:
            recs.append({
                "stage": r.stage,
                "round": r.index,
                "firms": {
                    market.firms[f]: {
                        "applicants": market.names(r.applicants[f]),
                        "considered": market.names(r.considered[f]),
                        "held": market.names(r.held[f]),
                        "rejected": market.names(r.rejected[f]),
                    }
                    for f in range(market.n_firms)
                },
                "exited": market.names(r.exited),
            })
        return recs


def _next_pointer(market: Market, w: int, firm: int) -> int:
    rank = market.worker_rank(w, firm)
    return len(market.worker_prefs[w]) if rank is None else rank + 1


def _run(
    market: Market,
    proposers: int,
    held: list[int],
    pointer: list[int],
    stage: int,
    earlier: int,
) -> tuple[list[Round], list[LateRejection]]:
    m = market.n_firms
    rounds: list[Round] = []
    late: list[LateRejection] = []
    pending = proposers
    k = 0
    while pending:
        k += 1
        applicants = [0] * m
        exited = 0
        for w in members(pending):
            prefs = market.worker_prefs[w]
            if pointer[w] >= len(prefs):
                exited |= 1 << w
            else:
                applicants[prefs[pointer[w]]] |= 1 << w
        considered = [0] * m
        rejected = [0] * m
        pending = 0
        for f in range(m):
            if not applicants[f]:
                continue
            considered[f] = held[f] | applicants[f]
            held[f] = market.choices[f](considered[f])
            rejected[f] = considered[f] & ~held[f]
            for w in members(rejected[f]):
                pointer[w] = _next_pointer(market, w, f)
                if earlier >> w & 1:
                    late.append(LateRejection(stage, k, w, f))
                    logger.warning(
                        "stage %d round %d: %s (earlier group) rejected by %s; "
                        "firm preferences are not USC",
                        stage, k, market.workers[w], market.firms[f],
                    )
            pending |= rejected[f]
        rounds.append(Round(stage, k, tuple(applicants), tuple(considered),
                            tuple(held), tuple(rejected), exited))
    return rounds, late


def worker_proposing_da(
    market: Market,
    proposers: Optional[int] = None,
    seed_held: Optional[Sequence[int]] = None,
) -> tuple[Matching, MechanismTrace]:
    """Run worker-proposing DA for ``proposers`` (default: every worker).

    ``seed_held`` gives workers already tentatively held by each firm; they
    are pooled with the first applicants and, if rejected, continue down
    their lists after the firm that held them.
    """
    if proposers is None:
        proposers = market.all_workers
    held = list(seed_held) if seed_held is not None else [0] * market.n_firms
    seeded = 0
    for mask in held:
        if mask & seeded or mask & proposers:
            raise ValueError("seed holdings must be disjoint from each other and from proposers")
        seeded |= mask
    pointer = [0] * market.n_workers
    for f, mask in enumerate(held):
        for w in members(mask):
            pointer[w] = _next_pointer(market, w, f)
    rounds, _ = _run(market, proposers, held, pointer, 1, 0)
    matching = Matching.from_holdings(held, market.n_workers)
    return matching, MechanismTrace(tuple(rounds), (proposers,), matching)


def multi_stage_da(
    market: Market, groups: Optional[Sequence[int]] = None
) -> tuple[Matching, MechanismTrace]:
    """Group-by-group DA: stage ``k`` lets group ``k`` propose, carrying holdings.

    With a single group this is plain worker-proposing DA.  Rejections of
    workers from an earlier group during a later stage are logged and
    recorded in ``trace.late_rejections``; they cannot happen when every
    firm satisfies the USC condition.
    """
    groups = tuple(market.groups if groups is None else groups)
    held = [0] * market.n_firms
    pointer = [0] * market.n_workers
    rounds: list[Round] = []
    late: list[LateRejection] = []
    earlier = 0
    for k, group in enumerate(groups, start=1):
        stage_rounds, stage_late = _run(market, group, held, pointer, k, earlier)
        rounds.extend(stage_rounds)
        late.extend(stage_late)
        earlier |= group
    matching = Matching.from_holdings(held, market.n_workers)
    return matching, MechanismTrace(tuple(rounds), groups, matching, tuple(late))


def one_stage_da(market: Market) -> tuple[Matching, MechanismTrace]:
    return worker_proposing_da(market)


def coarsen(groups: Sequence[int], stages: int) -> tuple[int, ...]:
    """Keep the first ``stages - 1`` groups and merge the rest into the last stage."""
    if not 1 <= stages <= len(groups):
        raise ValueError(f"stages must be between 1 and {len(groups)}")
    head = tuple(groups[: stages - 1])
    tail = 0
    for g in groups[stages - 1:]:
        tail |= g
    return head + (tail,)


def _cell(market: Market, mask: int, boxed: int) -> str:
    return " ".join(
        f"[{market.workers[w]}]" if boxed >> w & 1 else market.workers[w]
        for w in members(mask)
    )


def render_trace(market: Market, trace: MechanismTrace) -> str:
    """Fixed-width tables, one per stage; held workers appear as ``[name]``.

    Each row is a round.  A firm's cell lists the pool it chose from that
    round (blank when it had no new applicants, except that the opening
    row of a later stage shows carried holdings); the null column lists
    workers whose lists ran out.  The closing row shows final holdings.
    """
    header = list(market.firms) + ["null"]
    out = []
    n_stages = len(trace.stages)
    for stage in range(1, n_stages + 1):
        rows = []
        for k, r in enumerate(trace.stage_rounds(stage)):
            # opening row of a later stage also shows holdings carried in
            shown = [
                r.held[f] if k == 0 and stage > 1 and not r.considered[f] else r.considered[f]
                for f in range(market.n_firms)
            ]
            cells = [_cell(market, shown[f], r.held[f]) for f in range(market.n_firms)]
            cells.append(_cell(market, r.exited, r.exited))
            rows.append(cells)
        rounds = trace.stage_rounds(stage)
        if rounds:
            final_held = rounds[-1].held
        else:
            final_held = _held_before(trace, stage, market.n_firms)
        gone = 0
        for r in trace.rounds:
            if r.stage <= stage:
                gone |= r.exited
        final = [_cell(market, h, h) for h in final_held] + [_cell(market, gone, gone)]
        widths = [max(len(c) for c in col) for col in zip(header, *rows, final)]
        fmt = " | ".join(f"{{:<{wd}}}" for wd in widths)
        rule = "-+-".join("-" * wd for wd in widths)
        title = f"Stage {stage}" if n_stages > 1 else "Deferred acceptance"
        lines = [title, fmt.format(*header).rstrip(), rule]
        lines += [fmt.format(*row).rstrip() for row in rows]
        lines += [rule, fmt.format(*final).rstrip()]
        out.append("\n".join(lines))
    return "\n\n".join(out)


def _held_before(trace: MechanismTrace, stage: int, m: int) -> tuple[int, ...]:
    prior = [r for r in trace.rounds if r.stage < stage]
    return prior[-1].held if prior else (0,) * m
