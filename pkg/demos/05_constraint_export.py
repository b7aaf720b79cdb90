"""Export the polynomial feasibility system of an election.

Every continuous notion turns into polynomial equalities over the ballot
variables, so a solution is exactly a feasible point of a small QCQP.
The export is plain s-expression text a solver front end can ingest, and
it doubles as an independent checker for numeric solutions.
"""

import numpy as np

from liquidballots import (
    Notion,
    SolverConfig,
    export_qcqp,
    fixtures,
    solve,
)


def main():
    instance = fixtures.high_confidence(Notion.WCC, 0.015)
    export = export_qcqp(instance)
    print(export.text)

    report = solve(instance, SolverConfig(tolerance=1e-12), strategy="iterate")
    print("solved ballot matrix:\n", np.round(report.solution, 6))
    print("satisfies every exported constraint at 1e-6:",
          export.satisfied_by(report.solution, tol=1e-6))

    drifted = report.solution.copy()
    drifted[0, 0] += 0.05
    drifted[0, 1] -= 0.05
    print("\nafter shifting 0.05 of support between members:")
    for line in export.violations(drifted, tol=1e-6):
        print("  violated", line)

    try:
        export_qcqp(fixtures.crossed_thresholds(Notion.EP_T))
    except ValueError as exc:
        print("\nhard-threshold bundles are refused:", exc)


if __name__ == "__main__":
    main()
