"""
Choosing what to run
====================

Each period must fit its time limit, every case that failed there runs once
or twice, and every case runs at least once under each condition.
"""

from altplan import check_selection, paper_instance, selection_objective, solve_selection
from altplan.fixture import PUBLISHED_SELECTION
from altplan.formatting import text_table

inst = paper_instance()
plan = solve_selection(inst)

header = ["Test Case"] + [f"Period{j}" for j in plan.period_ids]
print(text_table(header, plan.to_rows()))
print("objective", plan.objective_exact)

# a hand-made plan can be checked and scored the same way
print("reference plan feasible:", check_selection(inst, PUBLISHED_SELECTION).feasible)
print("reference plan objective:", selection_objective(inst, PUBLISHED_SELECTION, exact=True))

# violations name the constraint, period and case
broken = [list(row) for row in PUBLISHED_SELECTION]
broken[0][0] = 0
for v in check_selection(inst, broken):
    print(v)
