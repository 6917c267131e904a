"""Three firms, three skilled and two unskilled workers.

Plain deferred acceptance leaves f2 with s3 alone, although f2 would rather
have s3 and u1 together.  Letting the skilled workers propose first and the
unskilled workers second fixes that.
"""
from uscmatch import (
    enumerate_stable_matchings,
    find_blocking_coalition,
    load_fixture,
    multi_stage_da,
    one_stage_da,
    render_trace,
)

market = load_fixture("example1.json").market

matching, trace = one_stage_da(market)
print(render_trace(market, trace))
bc = find_blocking_coalition(market, matching)
print("blocked by", market.firms[bc.firm], "with", market.names(bc.workers))
print()

matching, trace = multi_stage_da(market)
print(render_trace(market, trace))
print("blocking coalition:", find_blocking_coalition(market, matching))
print()

# the stable set has two members and neither side agrees on which is better
for m in enumerate_stable_matchings(market):
    print(market.describe(m))
