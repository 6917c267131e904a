"""Schools that cap the share of cross-district students.

The cap makes a cross-district applicant acceptable only next to enough
within-district students, so cross-district students complement local
ones.  Admitting locals first keeps the outcome stable anyway.
"""
import numpy as np

from uscmatch import (
    SchoolRule,
    find_blocking_coalition,
    load_fixture,
    multi_stage_da,
    one_stage_da,
    render_trace,
    verify_theorem2,
)

market = load_fixture("school_sec4.json").market
f1 = market.choices[0]
print("f1 from {u1}:", market.names(f1(market.mask(["u1"]))))
print("f1 from {s1,u1,u2}:", market.names(f1(market.mask(["s1", "u1", "u2"]))))

for label, run in (("one stage", one_stage_da), ("two stages", multi_stage_da)):
    matching, trace = run(market)
    print()
    print(label)
    print(render_trace(market, trace))
    print("blocking coalition:", find_blocking_coalition(market, matching))

# a quick sweep of random rules
rng = np.random.default_rng(1)
passed = 0
for _ in range(300):
    n_s, n_u = rng.integers(0, 4, size=2)
    priority = list(rng.permutation(n_s)) + list(n_s + rng.permutation(n_u))
    rule = SchoolRule([int(w) for w in priority], int(rng.integers(1, 5)),
                      str(rng.choice(["0", "1/3", "1/2", "1"])), (1 << int(n_s)) - 1)
    passed += verify_theorem2(rule).holds
print()
print(passed, "of 300 random rules satisfy the condition")
