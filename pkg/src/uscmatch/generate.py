"""Seeded random instances for the property suites.

Ranked-subset firms are drawn by rejection sampling and kept only when the
condition requested by the family verifies; school rules and valuations are
drawn directly.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .conditions import satisfies_substitutes, satisfies_usc
from .core import Market, RankedChoice, mask_of
from .instance import InstanceDocument, QuasilinearBlock
from .quasilinear import Valuation
from .school import SchoolRule, verify_theorem2

FAMILIES = ("random-usc", "random-substitutes", "random-school-rule", "random-valuation")
CEILINGS = ("0", "1/4", "1/3", "1/2", "2/3", "1")


class SamplingBudgetExhausted(RuntimeError):
    def __init__(self, tried: int, accepted: int, wanted: int):
        super().__init__(
            f"accepted {accepted} of {wanted} firms after {tried} draws "
            f"(acceptance rate {accepted / max(tried, 1):.4f})"
        )
        self.tried, self.accepted = tried, accepted


@dataclass
class GeneratorConfig:
    family: str = "random-usc"
    n_firms: int = 2
    group_sizes: tuple[int, ...] = (2, 2)
    seed: int = 0
    max_subsets: int = 4
    max_subset_size: int = 3
    capacity_range: tuple[int, int] = (1, 4)
    ceilings: tuple[str, ...] = CEILINGS
    value_range: tuple[int, int] = (-5, 10)
    budget: int = 20000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        self.group_sizes = tuple(self.group_sizes)
        self.capacity_range = tuple(self.capacity_range)
        self.ceilings = tuple(self.ceilings)
        self.value_range = tuple(self.value_range)
        if self.n_firms < 1 or any(s < 0 for s in self.group_sizes) or not sum(self.group_sizes):
            raise ValueError("need at least one firm and one worker")

    @classmethod
    def from_json(cls, text: str) -> "GeneratorConfig":
        return cls(**json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _worker_names(sizes: tuple[int, ...]) -> tuple[list[str], list[list[str]]]:
    prefixes = ["s", "u"] if len(sizes) == 2 else [f"g{k + 1}w" for k in range(len(sizes))]
    groups = [[f"{prefixes[k]}{i + 1}" for i in range(size)] for k, size in enumerate(sizes)]
    return [w for g in groups for w in g], groups


def _random_worker_prefs(rng: np.random.Generator, n: int, m: int) -> list[tuple[int, ...]]:
    prefs = []
    for _ in range(n):
        k = int(rng.integers(1, m + 1))
        prefs.append(tuple(int(f) for f in rng.permutation(m)[:k]))
    return prefs


def _random_ranking(rng: np.random.Generator, n: int, cfg: GeneratorConfig) -> list[int]:
    largest = min(cfg.max_subset_size, n)
    pool = sum(math.comb(n, i) for i in range(1, largest + 1))
    k = int(rng.integers(1, min(cfg.max_subsets, pool) + 1))
    ranked: list[int] = []
    while len(ranked) < k:
        size = int(rng.integers(1, largest + 1))
        s = mask_of(int(i) for i in rng.choice(n, size=size, replace=False))
        if s not in ranked:
            ranked.append(s)
    return ranked


def _roster(cfg: GeneratorConfig):
    names, groups = _worker_names(cfg.group_sizes)
    n, m = len(names), cfg.n_firms
    firms = [f"f{j + 1}" for j in range(m)]
    widx = {w: i for i, w in enumerate(names)}
    group_masks = tuple(mask_of(widx[w] for w in g) for g in groups)
    return names, firms, group_masks, n, m


def generate_usc_instance(cfg: GeneratorConfig) -> InstanceDocument:
    """Draw one instance of ``cfg.family``; the same config always gives the same instance."""
    rng = np.random.default_rng(cfg.seed)
    names, firms, groups, n, m = _roster(cfg)

    if cfg.family == "random-valuation":
        lo, hi = cfg.value_range
        blocks = []
        for f in firms:
            values = [int(x) for x in rng.integers(lo, hi + 1, size=1 << n)]
            blocks.append(QuasilinearBlock(Valuation(values, names), name=f))
        return InstanceDocument(quasilinear=blocks)

    choices = []
    if cfg.family == "random-school-rule":
        s_group = groups[0]
        s_ids = [i for i in range(n) if s_group >> i & 1]
        u_ids = [i for i in range(n) if not s_group >> i & 1]
        for _ in range(m):
            priority = [s_ids[i] for i in rng.permutation(len(s_ids))]
            priority += [u_ids[i] for i in rng.permutation(len(u_ids))]
            capacity = int(rng.integers(cfg.capacity_range[0], cfg.capacity_range[1] + 1))
            ceiling = Fraction(cfg.ceilings[int(rng.integers(len(cfg.ceilings)))])
            rule = SchoolRule(priority, capacity, ceiling, s_group)
            verdict = verify_theorem2(rule)
            if not verdict.holds:
                raise AssertionError(f"school rule violates USC: {rule} {verdict}")
            choices.append(rule)
    else:
        def accept(cf: RankedChoice) -> bool:
            if cfg.family == "random-substitutes":
                return satisfies_substitutes(cf).holds
            return satisfies_usc(cf, groups).holds

        tried = 0
        while len(choices) < m:
            if tried >= cfg.budget:
                raise SamplingBudgetExhausted(tried, len(choices), m)
            tried += 1
            cf = RankedChoice(_random_ranking(rng, n, cfg), n)
            if accept(cf):
                choices.append(cf)

    market = Market(
        tuple(firms), tuple(names), groups,
        tuple(_random_worker_prefs(rng, n, m)), tuple(choices),
    )
    return InstanceDocument(market=market)


def random_instances(cfg: GeneratorConfig, count: int, seed: Optional[int] = None):
    """``count`` instances with consecutive seeds starting at ``seed`` (or ``cfg.seed``)."""
    start = cfg.seed if seed is None else seed
    for k in range(count):
        yield generate_usc_instance(GeneratorConfig(**{**asdict(cfg), "seed": start + k}))
