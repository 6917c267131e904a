"""Which preference conditions hold, and why they differ from unimodularity."""
from uscmatch import condition_report, demand_type, load_fixture, max_minor_determinant_exceeds_unit

market = load_fixture("one_way_pair.json").market
report = condition_report(market)
for row in report.firms:
    print(row.firm, "substitutes:", row.substitutes.holds, "USC:", row.usc.holds,
          "SSCC:", row.sscc.holds)
    if not row.sscc.holds:
        wit = row.sscc.witness
        print("   ", market.workers[wit.w], "is a", wit.kind, "to", market.workers[wit.w2],
              "from", market.names(wit.subset))

types = [demand_type(cf) for cf in market.choices]
for f, t in zip(market.firms, types):
    print(f, sorted(t))

# each firm alone is fine, the union is not unimodular
print(max_minor_determinant_exceeds_unit(types[0] | types[1], 2))

# mutual complements across the groups break USC and stability together
no_stable = load_fixture("no_stable_a.json").market
for row in condition_report(no_stable).firms:
    print(row.firm, "USC:", row.usc.holds, row.usc.clause or "")
