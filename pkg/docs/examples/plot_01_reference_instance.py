"""
The reference instance
======================

Eight periods of 1080 s, two cycles through the four temperature/voltage
conditions, ten test cases.
"""

from altplan import paper_instance, priority_partition

inst = paper_instance()
print(inst.n_cases, "cases,", inst.n_periods, "periods")

# failures per case (rows) and period (columns)
print(inst.failures)

# originally each period ran every case back to back
print("original seconds per period:", inst.run_seconds.sum(axis=0))

# the conditions cycle LTLV, HTLV, LTHV, HTHV
for p in inst.periods:
    print(p.index, p.condition, p.start)

# a case is effective in a period when it failed there; the rest fall into
# the preferred, secondary and remainder tiers
for tier, cases in zip(("effective", "preferred", "secondary", "remainder"),
                       priority_partition(inst, 1).tiers()):
    print(f"period 1 {tier:10s}", sorted(cases))
