"""
Ordering one period
===================

Selected cases become jobs.  Weighted jobs should finish close to their
original finish time; the index is a weighted mean deviation in percent.
"""

from altplan import check_milp_constraints, expand_jobs, paper_instance, solve_sequencing
from altplan.evaluation import baseline_sequence
from altplan.fixture import PUBLISHED_SELECTION
from altplan.selection import SelectionPlan

inst = paper_instance()
plan = SelectionPlan.from_counts(inst, PUBLISHED_SELECTION)

jobs = expand_jobs(inst, plan, 1)
print(jobs.labels)   # "TC8-" is the second run of TC8

best = solve_sequencing(jobs)
naive = baseline_sequence(jobs)
print("optimised", best.labels, f"{best.objective:.4f}")
print("naive    ", naive.labels, f"{naive.objective:.4f}")

# the order also satisfies the big-M ordering model
report = check_milp_constraints(jobs, best)
print("M =", report.big_m, "violations:", len(report.violations))
