"""
Evaluation metrics
==================

UA is macro-averaged recall, WA is overall accuracy and macro-F1 averages
per-class F1.  Missing or unrecognised answers fall into an invalid column
that counts against recall.
"""
import numpy as np

from emolab import LabelSet, MetricsReport, accumulate, compare_runs, evaluate, report
from emolab.metrics import format_comparison

ab = LabelSet.from_names(["a", "b"], angles={"a": 0, "b": 90})
rep = evaluate([("a", "a"), ("a", "a"), ("b", "a"), ("b", "b")], ab)
print(rep.pretty())

# imbalance pulls UA and WA apart
skewed = [("a", "a")] * 90 + [("b", "a")] * 10
r = evaluate(skewed, ab)
print(f"\nalways-a on 90/10 data: WA={r.wa:.2f} UA={r.ua:.2f}")

# shards can be counted separately and merged
rng = np.random.default_rng(0)
recs = [(("a", "b")[g], (None, "a", "b")[p]) for g, p in zip(rng.integers(0, 2, 1000), rng.integers(0, 3, 1000))]
merged = accumulate(recs[:400], ab) + accumulate(recs[400:], ab)
print("merged == whole:", report(merged) == report(accumulate(recs, ab)), " invalid:", merged.invalid)

runs = {"baseline": MetricsReport(0.30, 0.35, 0.28, 1000), "ours": MetricsReport(0.39, 0.40, 0.33, 1000)}
print()
print(format_comparison(compare_runs(runs, "baseline"), "baseline"))
