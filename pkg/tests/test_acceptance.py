"""Acceptance gate: eleven criteria, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or ``python -m tests.test_acceptance``.
"""
import functools
import itertools
from fractions import Fraction

import numpy as np

from uscmatch import (
    COMPLEMENT,
    NULL,
    SUBSTITUTE,
    GeneratorConfig,
    Matching,
    RankedChoice,
    Valuation,
    cross_effect_free,
    demand,
    demand_type,
    detect_ql_relation,
    enumerate_stable_matchings,
    find_blocking_coalition,
    generate_usc_instance,
    is_complement,
    is_substitute,
    is_stable,
    load_fixture,
    mask_of,
    max_minor_determinant_exceeds_unit,
    multi_stage_da,
    one_stage_da,
    proof_clauses,
    relation_table,
    satisfies_sscc,
    satisfies_usc,
    verify_theorem2,
    verify_theorem3,
)
from uscmatch.core import members

from . import oracles

RESULTS: dict[int, tuple[bool, str]] = {}
MARKET_FIXTURES = ("example1.json", "one_way_pair.json", "paired_roles.json", "no_stable_a.json", "no_stable_b.json",
                   "three_workers.json", "school_sec4.json")
QL_FIXTURES = ("example_sec5.json", "pair_value_6.json", "pair_value_8.json", "pair_value_10.json")


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except BaseException as exc:
                RESULTS[number] = (False, f"{title}: {type(exc).__name__}: {exc}")
                raise
            RESULTS[number] = (True, title)
        return run
    return wrap


def summary_lines():
    return [
        f"{'PASS' if ok else 'FAIL'}  criterion {k:2d}  {text}"
        for k, (ok, text) in sorted(RESULTS.items())
    ]


def described(market, matching):
    return {f: ws for f, ws in market.describe(matching).items() if ws}


def oracle_stable(market, matching):
    choosers = [
        (lambda x, cf=cf: frozenset(members(cf(mask_of(x))))) for cf in market.choices
    ]
    rankings = [
        [frozenset(members(s)) for s in cf.ranked] if isinstance(cf, RankedChoice) else None
        for cf in market.choices
    ]
    revealed = oracles.revealed(choosers)

    def prefers(f, x, y):
        if rankings[f] is None:
            return revealed(f, x, y)
        return oracles.ranked_prefers(rankings[f], x, y)

    combo = tuple(None if f == NULL else f for f in matching.assignment)
    return oracles.is_stable(combo, market.worker_prefs, choosers, prefers)


@criterion(1, "Example 1: one-stage outcome, its blocking coalition, two-stage outcome, stable set")
def test_criterion_01_example1():
    market = load_fixture("example1.json").market
    one, _ = one_stage_da(market)
    assert described(market, one) == {"f1": ["s1"], "f2": ["s3"], "f3": ["s2"],
                                      "null": ["u1", "u2"]}
    for method in ("choice", "brute"):
        bc = find_blocking_coalition(market, one, method)
        assert (market.firms[bc.firm], market.names(bc.workers)) == ("f2", ["s3", "u1"])
    eta1 = market.matching({"f1": ["s1"], "f2": ["s3", "u1"], "f3": ["s2"]})
    eta2 = market.matching({"f1": ["s2", "u2"], "f2": ["s3", "u1"], "f3": ["s1"]})
    two, _ = multi_stage_da(market)
    assert two == eta1
    assert {m.assignment for m in enumerate_stable_matchings(market)} == {
        eta1.assignment, eta2.assignment}


@criterion(2, "markets with mutual complements across groups have no stable matching")
def test_criterion_02_nonexistence():
    for name in ("no_stable_a.json", "no_stable_b.json"):
        market = load_fixture(name).market
        assert enumerate_stable_matchings(market) == [], name
        every = itertools.product(*[(NULL,) + p for p in market.worker_prefs])
        assert not any(oracle_stable(market, Matching(a, market.n_firms)) for a in every), name


@criterion(3, "condition verdicts and replaying witnesses")
def test_criterion_03_conditions():
    one_way = load_fixture("one_way_pair.json").market
    s, u = one_way.worker_index("s"), one_way.worker_index("u")
    assert all(satisfies_usc(cf, one_way.groups).holds for cf in one_way.choices)
    v = satisfies_sscc(one_way.choices[1], one_way.groups)
    assert not v.holds
    assert (v.witness.w, v.witness.w2, v.witness.kind) == (s, u, SUBSTITUTE)
    assert v.witness.replays(one_way.choices[1])
    assert is_substitute(one_way.choices[1], s, u)[0] and not is_substitute(one_way.choices[1], u, s)[0]

    ex1 = load_fixture("example1.json").market
    f2 = ex1.choices[ex1.firm_index("f2")]
    v = satisfies_sscc(f2, ex1.groups)
    assert not v.holds
    assert set(ex1.names(v.witness.subset)) == {"s1", "s3", "u1"}
    assert ex1.workers[v.witness.w] == "s1" and ex1.workers[v.witness.w2] == "u1"
    assert v.witness.replays(f2)
    assert all(satisfies_usc(cf, ex1.groups).holds for cf in ex1.choices)

    no_stable = load_fixture("no_stable_a.json").market
    v = satisfies_usc(no_stable.choices[0], no_stable.groups)
    assert not v.holds and v.clause.startswith("(ii)")
    assert v.witness.replays(no_stable.choices[0])
    assert is_complement(no_stable.choices[0], v.witness.w, v.witness.w2)[0]


@criterion(4, "demand types of the two-firm example and the non-unimodular union")
def test_criterion_04_demand_types():
    one_way = load_fixture("one_way_pair.json").market
    t1, t2 = (demand_type(cf) for cf in one_way.choices)
    assert t1 == {(0, 1), (1, 0), (1, 1)}
    assert t2 == {(0, 1), (1, 0), (1, -1)}
    exceeds, vecs, det = max_minor_determinant_exceeds_unit(t1 | t2, 2)
    assert exceeds and set(vecs) == {(1, 1), (1, -1)} and det == -2


@criterion(5, "school example: one-stage outcome, ceiling rejection, blocking coalition, two-stage outcome")
def test_criterion_05_school():
    market = load_fixture("school_sec4.json").market
    one, trace = one_stage_da(market)
    assert described(market, one) == {"f1": ["s1", "u2"], "f2": ["s2"], "null": ["u1"]}
    f1 = market.firm_index("f1")
    first = trace.rounds[0]
    assert market.names(first.rejected[f1]) == ["u1"]
    # capacity 2 was not binding, so the ceiling did it
    assert first.considered[f1] == market.mask(["u1"]) and market.choices[f1].capacity == 2
    bc = find_blocking_coalition(market, one)
    assert (market.firms[bc.firm], market.names(bc.workers)) == ("f1", ["s1", "u1"])
    two, _ = multi_stage_da(market)
    assert described(market, two) == {"f1": ["s1", "u1"], "f2": ["s2"], "null": ["u2"]}


@criterion(6, "200 random school rules satisfy USC, every proof clause on its own")
def test_criterion_06_school_rules():
    count = 0
    for seed in range(200):
        n_s = 1 + seed % 3
        n_u = 1 + (seed // 3) % 3
        cfg = GeneratorConfig(family="random-school-rule", n_firms=1,
                              group_sizes=(n_s, n_u), seed=seed)
        (rule,) = generate_usc_instance(cfg).school_rules.values()
        assert rule.n_workers <= 6
        assert verify_theorem2(rule).holds, rule
        for clause, verdict in proof_clauses(rule).items():
            assert verdict.holds, (clause, rule)
        count += 1
    assert count == 200


@criterion(7, "200 random USC markets: two-stage outcome stable, no late rejections")
def test_criterion_07_staged_da_stable():
    for seed in range(200):
        cfg = GeneratorConfig(n_firms=1 + seed % 3,
                              group_sizes=(1 + seed % 3, (seed // 3) % 4),
                              seed=seed, max_subsets=6)
        market = generate_usc_instance(cfg).market
        assert market.n_workers <= 6 and market.n_firms <= 3
        assert all(satisfies_usc(cf, market.groups).holds for cf in market.choices)
        matching, trace = multi_stage_da(market)
        assert trace.late_rejections == (), seed
        assert oracle_stable(market, matching), seed
        assert is_stable(market, matching), seed


@criterion(8, "choice monotonicity without complements or substitutes, 1000 draws")
def test_criterion_08_choice_monotonicity():
    rng = np.random.default_rng(8)
    checked = [0, 0]
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, 7))
        ranked = list(dict.fromkeys(int(x) for x in rng.integers(1, 1 << n, size=k)))
        cf = RankedChoice(ranked, n)
        w = int(rng.integers(n))
        x = int(rng.integers(1 << n)) | (1 << w)
        x_extra = int(rng.integers(1 << n)) & ~x
        extra = members(x_extra)
        if not any(is_complement(cf, a, w)[0] for a in extra):
            checked[0] += 1
            if cf(x | x_extra) >> w & 1:
                assert cf(x) >> w & 1
        if not any(is_substitute(cf, a, w)[0] for a in extra):
            checked[1] += 1
            if cf(x) >> w & 1:
                assert cf(x | x_extra) >> w & 1
    assert min(checked) > 100, checked


@criterion(9, "quasi-linear example: demand sets, relation directions, cross effects")
def test_criterion_09_quasilinear():
    doc = load_fixture("example_sec5.json")
    v1, v2 = doc.valuation("f1"), doc.valuation("f2")
    s, u, su = 0b01, 0b10, 0b11
    expected = {
        (v1, (7, 2)): (0,), (v1, (5, 2)): (su,), (v1, (6, 2)): (0, su),
        (v2, (3, 1)): (u,), (v2, (1, 1)): (s,), (v2, (2, 1)): (s, u),
    }
    for (v, p), bundles in expected.items():
        assert demand(v, [Fraction(x) for x in p]).bundles == bundles, p
    for a, b in ((0, 1), (1, 0)):
        assert detect_ql_relation(v1, a, b, COMPLEMENT)[0]
        assert not detect_ql_relation(v1, a, b, SUBSTITUTE)[0]
        assert detect_ql_relation(v2, a, b, SUBSTITUTE)[0]
        assert not detect_ql_relation(v2, a, b, COMPLEMENT)[0]
    assert verify_theorem3(v1)[0] and verify_theorem3(v2)[0]
    for x in (6, 8, 10):
        v = load_fixture(f"pair_value_{x}.json").valuation()
        assert cross_effect_free(v, 0, 1) is (x == 8), x


@criterion(10, "100 random three-worker valuations symmetric; demand monotonicity, 1000 draws")
def test_criterion_10_ql_symmetry():
    rng = np.random.default_rng(10)
    asym = []
    for _ in range(100):
        v = Valuation([int(x) for x in rng.integers(-5, 11, size=8)], ["a", "b", "c"])
        ok, table = verify_theorem3(v)
        if not ok:
            asym.append((v, [(k, table.cells[k]) for k in table.asymmetries()]))
    assert not asym, asym
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        v = Valuation([int(x) for x in rng.integers(-5, 11, size=1 << n)])
        p = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-12, 13, n), rng.integers(1, 4, n))]
        w = int(rng.integers(n))
        high = list(p)
        high[w] += Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 4)))
        d_low, d_high = demand(v, p).bundles, demand(v, high).bundles
        for x in d_low:
            if not x >> w & 1:
                assert x in d_high
        for x in d_high:
            if x >> w & 1:
                assert x in d_low


@criterion(11, "blocking search agrees with brute force; grid agrees with dense refinement")
def test_criterion_11_cross_validation():
    for name in MARKET_FIXTURES:
        market = load_fixture(name).market
        for a in itertools.product(*[(NULL,) + p for p in market.worker_prefs]):
            m = Matching(a, market.n_firms)
            fast = find_blocking_coalition(market, m, "choice") is None
            slow = find_blocking_coalition(market, m, "brute") is None
            assert fast == slow, (name, a)
    for name in QL_FIXTURES:
        for block in load_fixture(name).quasilinear:
            v = block.valuation
            assert v.n_workers <= 3
            grid, dense = relation_table(v, "grid"), relation_table(v, "dense")
            assert {k: c is not None for k, c in grid.cells.items()} == {
                k: c is not None for k, c in dense.cells.items()}, name


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                pass
    print("\n".join(summary_lines()))
