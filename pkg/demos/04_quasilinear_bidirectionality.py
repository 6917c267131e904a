"""With money, substitutes and complements run both ways.

Each firm values subsets of workers and pays salaries.  Raising one
worker's salary and watching whether another is still demanded gives the
relation; every valuation tested here gives a symmetric table.
"""
import numpy as np

from uscmatch import Valuation, cross_effect_free, demand, demanded_profile, load_fixture, verify_theorem3

doc = load_fixture("example_sec5.json")
for block in doc.quasilinear:
    v = block.valuation
    print(block.name, v.to_mapping())
    for p in block.queries:
        bundles = [v.key(b) or "{}" for b in demand(v, p).bundles]
        print("   D", tuple(str(x) for x in p), "=", bundles)
    ok, table = verify_theorem3(v)
    held = [(v.names[w], v.names[w2], kind) for (w, w2, kind), wit in table.cells.items() if wit]
    print("   relations:", held, "symmetric:", ok)

prof = demanded_profile(doc.valuation("f1"), (0, 2), 0)
print("f1 is indifferent when s costs", prof.critical)

# complementarity between s and u disappears only when the pair is worth exactly the sum
for x in (6, 8, 10):
    v = load_fixture(f"pair_value_{x}.json").valuation()
    print("v(s,u) =", x, "cross-effect free:", cross_effect_free(v, 0, 1))

rng = np.random.default_rng(0)
asymmetric = 0
for _ in range(50):
    v = Valuation([int(x) for x in rng.integers(-5, 11, size=8)])
    asymmetric += not verify_theorem3(v)[0]
print("asymmetric tables among 50 random valuations:", asymmetric)
