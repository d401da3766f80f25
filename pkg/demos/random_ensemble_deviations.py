# Worst-case disagreement between numerical and closed-form values over
# small seeded random ensembles.  The CLI's bench command does the same at
# larger sizes and writes per-state CSV.
from geomeasures.experiments import format_summary, run_bench

for kind, count in (("qubit-coherence", 500), ("qutrit-bounds", 200), ("two-qubit-gme", 200)):
    report = run_bench(kind, count, seed=0)
    print(f"== {kind} ({count} states)")
    print(format_summary(report.summary))
    print()
