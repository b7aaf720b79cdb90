"""Hunt for structural counterexamples with seeded random search.

Three familiar conjectures about the best-response map fail, and all
three failures show up in random elections at desk scale:

* the map is not a contraction (an application can increase residuals),
* the residual operator is not pseudo-monotone relative to solutions,
* solutions need not be unique once defaults have empty support.

Every search is deterministic in its seed, so findings replay exactly.
"""

import numpy as np

from liquidballots import (
    check_nonuniqueness,
    search_violation,
)


def main():
    finding = search_violation("contraction-violation", n=10, m=5, seed=0, budget=200)
    print(f"contraction violated at attempt {finding.attempt}:")
    print(f"  residual after one application: {finding.certificate['lhs']:.6f}")
    print(f"  residual before:                {finding.certificate['rhs']:.6f}")

    finding = search_violation("pseudo-mono-violation", n=4, m=5, seed=0, budget=200)
    print(f"\npseudo-monotonicity violated at attempt {finding.attempt}:")
    print(f"  <y - f(y), y - x*> = {finding.certificate['value']:.6f} < 0")

    # distinct solutions require sparse defaults: with every default entry
    # positive, each bundle response is a positively shifted affine map
    # followed by normalization, which contracts projectively and forces
    # a unique fixed point
    finding = search_violation(
        "non-uniqueness", n=10, m=5, default_mode="random", seed=1, budget=200
    )
    x1, x2 = finding.witnesses["x1"], finding.witnesses["x2"]
    ok, distance = check_nonuniqueness(finding.instance, x1, x2)
    print(f"\ntwo solutions of one election found at attempt {finding.attempt}:")
    print(f"  l1 distance {distance:.4f} (certified: {ok})")
    print(f"  largest single-ballot difference: {np.abs(x1 - x2).max():.4f}")


if __name__ == "__main__":
    main()
