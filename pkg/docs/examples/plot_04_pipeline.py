"""
End to end on a custom instance
===============================

Build a small instance from a JSON document, select, sequence and compare
with the naive order.
"""

from altplan import load_instance, run_pipeline

doc = {
    "periods": [
        {"condition": "LTLV", "time_limit_s": 150},
        {"condition": "HTLV", "time_limit_s": 150},
        {"condition": "LTHV", "time_limit_s": 150},
        {"condition": "HTHV", "time_limit_s": 150},
    ],
    "test_cases": [{"id": 1, "name": "boot"}, {"id": 2, "name": "flash"}, {"id": 3, "name": "io"}],
    "failures": [[3, 0, 1, 0], [0, 0, 0, 2], [1, 1, 0, 0]],
    "run_seconds": [[40, 40, 40, 40], [30, 30, 30, 30], [35, 35, 35, 35]],
    "original_finish_s": [[40, 160, 280, 400], [105, 225, 345, 430], [75, 190, 310, 465]],
    "precedence": [{"period": "all", "before": 1, "after": 3}],
    "priority_sets": {"all": {"B": [2], "Gamma": []}},
}

inst = load_instance(doc)
report = run_pipeline(inst)
print(report.to_text())
