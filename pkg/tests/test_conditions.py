import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from uscmatch import (
    COMPLEMENT,
    SUBSTITUTE,
    RankedChoice,
    condition_report,
    demand_type,
    find_relation,
    integer_determinant,
    is_complement,
    is_substitute,
    load_fixture,
    mask_of,
    max_minor_determinant_exceeds_unit,
    satisfies_sscc,
    satisfies_substitutes,
    satisfies_substitutes_classical,
    satisfies_usc,
)
from uscmatch.core import ChoiceFunction, members

from . import oracles

firms = st.integers(2, 5).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.integers(1, (1 << n) - 1), max_size=7, unique=True),
        st.integers(1, n - 1),
    )
)


def reference_choose(cf):
    return lambda x: frozenset(members(cf(mask_of(x))))


def test_one_way_f2_relations(one_way):
    s, u = one_way.worker_index("s"), one_way.worker_index("u")
    f2 = one_way.choices[1]
    assert is_substitute(f2, s, u)[0]
    assert not is_substitute(f2, u, s)[0]


def test_three_worker_firm_is_both():
    market = load_fixture("three_workers.json").market
    cf = market.choices[0]
    ok_sub, wit_sub = is_substitute(cf, 0, 1)
    ok_comp, wit_comp = is_complement(cf, 0, 1)
    assert ok_sub and ok_comp
    assert set(market.names(wit_sub.subset)) == {"w1", "w2", "w3"}
    assert set(market.names(wit_comp.subset)) == {"w1", "w2"}
    assert wit_sub.replays(cf) and wit_comp.replays(cf)


def test_complement_examples(one_way):
    assert is_complement(one_way.choices[0], 0, 1)[0]
    paired = load_fixture("paired_roles.json").market
    m1, a1 = paired.worker_index("m1"), paired.worker_index("a1")
    assert is_complement(paired.choices[0], m1, a1)[0]


def test_substitutes_condition_examples(one_way):
    assert satisfies_substitutes(one_way.choices[1]).holds
    v = satisfies_substitutes(one_way.choices[0])
    assert not v.holds
    assert (v.witness.w, v.witness.w2, v.witness.kind) == (0, 1, COMPLEMENT)
    assert satisfies_substitutes(RankedChoice([0b01, 0b10], 2)).holds


def test_usc_examples(one_way):
    for cf in one_way.choices:
        assert satisfies_usc(cf, one_way.groups).holds
    no_stable = load_fixture("no_stable_a.json").market
    v = satisfies_usc(no_stable.choices[0], no_stable.groups)
    assert not v.holds and v.clause.startswith("(ii)")
    assert v.witness.replays(no_stable.choices[0])


def test_usc_with_empty_second_group_is_substitutes():
    cf = RankedChoice([0b011, 0b100, 0b001], 3)
    assert satisfies_usc(cf, (0b111, 0)).holds == satisfies_substitutes(cf).holds


def test_sscc_examples(one_way, example1):
    v = satisfies_sscc(one_way.choices[1], one_way.groups)
    assert not v.holds
    assert one_way.workers[v.witness.w] == "s" and v.witness.kind == SUBSTITUTE
    v = satisfies_sscc(example1.choices[1], example1.groups)
    assert not v.holds
    assert set(example1.names(v.witness.subset)) == {"s1", "s3", "u1"}
    assert example1.workers[v.witness.w2] == "u1"
    assert satisfies_sscc(RankedChoice([0b11], 2), (0b01, 0b10)).holds


def test_example1_all_usc(example1):
    assert condition_report(example1).all_usc


@settings(max_examples=120, deadline=None)
@given(firms)
def test_relations_match_reference(data):
    n, ranked, _ = data
    cf = RankedChoice(ranked, n)
    ref = reference_choose(cf)
    for w, w2 in itertools.permutations(range(n), 2):
        for kind in (SUBSTITUTE, COMPLEMENT):
            wit = find_relation(cf, w, w2, kind)
            assert (wit is not None) == oracles.relation(ref, range(n), w, w2, kind)
            if wit is not None:
                assert wit.replays(cf)


@settings(max_examples=120, deadline=None)
@given(firms)
def test_substitutes_agrees_with_classical_form(data):
    n, ranked, _ = data
    cf = RankedChoice(ranked, n)
    assert satisfies_substitutes(cf).holds == satisfies_substitutes_classical(cf).holds


@settings(max_examples=120, deadline=None)
@given(firms)
def test_usc_and_sscc_against_pair_scan(data):
    n, ranked, split = data
    cf = RankedChoice(ranked, n)
    ref = reference_choose(cf)
    s_ids, u_ids = range(split), range(split, n)
    groups = (mask_of(s_ids), mask_of(u_ids))

    def rel(a, b, kind):
        return oracles.relation(ref, range(n), a, b, kind)

    within = any(
        rel(a, b, COMPLEMENT)
        for g in (s_ids, u_ids) for a, b in itertools.permutations(g, 2)
    )
    u_on_s = any(rel(u, s, k) for u in u_ids for s in s_ids for k in (SUBSTITUTE, COMPLEMENT))
    cross_sub = any(
        rel(a, b, SUBSTITUTE)
        for a in range(n) for b in range(n)
        if a != b and (a < split) != (b < split)
    )
    usc, sscc = satisfies_usc(cf, groups), satisfies_sscc(cf, groups)
    assert usc.holds == (not within and not u_on_s)
    assert sscc.holds == (not within and not cross_sub)
    for v in (usc, sscc):
        if not v.holds:
            assert v.witness.replays(cf)
    if usc.holds and sscc.holds:
        # both together rule out every cross-group substitute, and complements from U to S
        assert not cross_sub and not u_on_s


def test_demand_types_of_one_way_pair(one_way):
    assert demand_type(one_way.choices[0]) == {(0, 1), (1, 0), (1, 1)}
    assert demand_type(one_way.choices[1]) == {(0, 1), (1, 0), (1, -1)}


def test_constant_empty_choice_has_empty_demand_type():
    class Nothing(ChoiceFunction):
        def _choose(self, available):
            return 0

    assert demand_type(Nothing(3)) == frozenset()


@settings(max_examples=60, deadline=None)
@given(firms)
def test_demand_type_matches_reference(data):
    n, ranked, _ = data
    cf = RankedChoice(ranked, n)
    assert demand_type(cf) == oracles.demand_vectors(reference_choose(cf), range(n))


def test_union_of_one_way_pair_not_unimodular(one_way):
    union = demand_type(one_way.choices[0]) | demand_type(one_way.choices[1])
    exceeds, vecs, det = max_minor_determinant_exceeds_unit(union)
    assert exceeds and set(vecs) == {(1, 1), (1, -1)} and det == -2


def test_identity_basis_is_unimodular():
    assert not max_minor_determinant_exceeds_unit({(1, 0), (0, 1)})[0]


def test_single_worker_demand_type():
    cf = RankedChoice([0b1], 1)
    assert not max_minor_determinant_exceeds_unit(demand_type(cf), 1)[0]


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_integer_determinant_against_expansion(rows):
    (a, b, c), (d, e, f), (g, h, i) = rows
    expected = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    assert integer_determinant(rows) == expected
