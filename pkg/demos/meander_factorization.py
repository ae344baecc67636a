"""Open meanders and the winding-function factorization.

An open meander of size m is a self-avoiding loop through infinity that
crosses the real line at 1..2m-1.  Splitting along the line gives a pair of
noncrossing arc diagrams, and the loop's winding function theta labels each
crossing with a cumulative half-turn count.  The punchline: within a fixed
winding class the upper and lower diagrams vary independently, so each
class has exactly |A+| x |A-| meanders.
"""

import math

from quiltlab import meander as me

print("meander counts by size (pair filter vs transfer matrix):")
for m in range(1, 6):
    brute = len(me.enumerate_meanders(m))
    fast = me.count_meanders_transfer_matrix(m)
    print(f"  m={m}: {brute} (oracle) / {fast} (transfer matrix)")

print("\nthe size-4 meander visiting the line at (3,2,1,4,7,6,5):")
(mnd,) = [
    x for x in me.enumerate_meanders(4) if x.crossing_order == (3, 2, 1, 4, 7, 6, 5)
]
wf = me.winding_function(mnd)
print("  winding labels (units of pi):", wf.theta)

a_plus = me.admissible_diagrams(wf, me.UPPER)
a_minus = me.admissible_diagrams(wf, me.LOWER)
print(f"  admissible upper diagrams: {len(a_plus)}")
print(f"  admissible lower diagrams: {len(a_minus)}")
print(f"  meanders in this class: {len(a_plus) * len(a_minus)}")

print("\nfull factorization check at m = 4:")
report = me.verify_factorization(4)
for cls in report.classes:
    assert cls.meander_count == cls.upper_count * cls.lower_count
print(f"  {report.total_meanders} meanders split into {len(report.classes)}"
      " classes, every class a perfect product")
