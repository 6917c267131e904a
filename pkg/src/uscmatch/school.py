"""Controlled school choice with a ceiling on the share of cross-district students."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

from .conditions import COMPLEMENT, SUBSTITUTE, Verdict, find_relation, satisfies_usc
from .core import ChoiceFunction, members


class SchoolRule(ChoiceFunction):
    """Priority, capacity and proportionality ceiling for one school.

    ``within`` is the bitmask of within-district students; everyone else is
    cross-district.  A within-district student is admitted when fewer than
    ``capacity`` applicants outrank her.  A cross-district student also
    needs ``1 - |X & within| / (k + 1) <= ceiling`` where ``k`` is the number
    of applicants that outrank her.  Both counts range over all of ``X``,
    admitted or not.
    """

    def __init__(
        self,
        priority: Sequence[int],
        capacity: int,
        ceiling: Union[Fraction, int, str],
        within: int,
    ):
        super().__init__(len(priority))
        self.priority = tuple(priority)
        self.capacity = capacity
        self.ceiling = Fraction(ceiling)
        self.within = within

    def _choose(self, available: int) -> int:
        n_within = (available & self.within).bit_count()
        chosen = 0
        ahead = 0
        for w in self.priority:
            if not available >> w & 1:
                continue
            if ahead < self.capacity:
                if self.within >> w & 1:
                    chosen |= 1 << w
                elif 1 - Fraction(n_within, ahead + 1) <= self.ceiling:
                    chosen |= 1 << w
            ahead += 1
        return chosen

    @property
    def groups(self) -> tuple[int, int]:
        everyone = (1 << self.n_workers) - 1
        return self.within, everyone & ~self.within

    def validate(self, groups: Sequence[int] = ()) -> list[str]:
        problems = []
        n = self.n_workers
        if sorted(self.priority) != list(range(n)):
            problems.append("priority is not an ordering of all students")
        if self.capacity < 1:
            problems.append(f"capacity must be at least 1, got {self.capacity}")
        if not 0 <= self.ceiling <= 1:
            problems.append(f"ceiling must lie in [0, 1], got {self.ceiling}")
        seen_cross = False
        for w in self.priority:
            if self.within >> w & 1:
                if seen_cross:
                    problems.append("a cross-district student outranks a within-district student")
                    break
            else:
                seen_cross = True
        if groups and groups[0] != self.within:
            problems.append("within-district set differs from the first worker group")
        return problems

    def __repr__(self) -> str:
        return (f"SchoolRule(priority={list(self.priority)}, capacity={self.capacity}, "
                f"ceiling={self.ceiling}, within={self.within:#b})")


def school_choose(rule: SchoolRule, available: int) -> int:
    return rule(available)


def verify_theorem2(rule: SchoolRule) -> Verdict:
    """The rule's choice function satisfies USC with within-district students first."""
    return satisfies_usc(rule, rule.groups)


def proof_clauses(rule: SchoolRule) -> dict[str, Verdict]:
    """Check each piece of the USC argument for school rules on its own."""
    s_group, u_group = rule.groups
    ss, us = members(s_group), members(u_group)

    def scan(pairs, kind):
        for a, b in pairs:
            wit = find_relation(rule, a, b, kind)
            if wit is not None:
                return Verdict(False, wit)
        return Verdict(True)

    return {
        "within S: no complements": scan(((a, b) for a in ss for b in ss if a != b), COMPLEMENT),
        "within U: no complements": scan(((a, b) for a in us for b in us if a != b), COMPLEMENT),
        "no u substitutes an s": scan(((u, s) for u in us for s in ss), SUBSTITUTE),
        "no u complements an s": scan(((u, s) for u in us for s in ss), COMPLEMENT),
    }
