"""Path-complexity metrics and the per-stage timing harness.

Path metrics describe how hard path finding can get on a model: the longest
simple path, how many alternative paths a journey has on average, and how
many nodes a path visits on average. The timing harness reruns the
rewriting stages over two structurally identical query groups whose only
difference is journey length; path finding is the stage that feels it.
"""

from onco_rewriter import path_metrics
from onco_rewriter.metrics import render_metrics_table, render_timing_table, stage_timings
from onco_rewriter.synthetic import benchmark_model

model, thesaurus, group_one, group_two = benchmark_model()

print(f"synthetic benchmark model: {len(model.classes)} classes, "
      f"{len(model.associations)} associations")
print()
print(render_metrics_table(path_metrics(model, max_nodes=16)))

print("per-stage timings, five queries per journey length (microseconds):")
report = stage_timings(group_one + group_two, model, thesaurus, repetitions=5)
print(render_timing_table(report))
