"""Compare the four resolution notions on one delegation.

A voter hands a whole bundle to a delegate who barely supports it.  How
the bundle resolves depends on the notion: exact proportionality follows
the delegate blindly, thresholded variants fall back to the default, and
the weighted combination blends the two.
"""

import numpy as np

from liquidballots import Notion, best_response, fixtures, initial_point


def resolved_row(notion, support):
    instance = fixtures.high_confidence(notion, support)
    x = initial_point(instance, "defaults")
    # iterate to the resolved ballot (one step settles this instance)
    for _ in range(100):
        x = best_response(x, instance)
    return x[0]


def main():
    print("delegating voter's bundle {c1, c2}, weight 100, default [0, 1]")
    print("the delegate's own ballot puts `support` on c1 and nothing on c2\n")
    header = f"{'support':>8} | " + " | ".join(
        f"{n.value:^22}" for n in (Notion.EP, Notion.EP_T, Notion.EP_TI, Notion.WCC)
    )
    print(header)
    print("-" * len(header))
    for support in (0.02, 0.015, 0.01, 0.005, 0.0):
        cells = []
        for notion in (Notion.EP, Notion.EP_T, Notion.EP_TI, Notion.WCC):
            row = resolved_row(notion, support)
            cells.append(np.array2string(row[:2], precision=3, suppress_small=True))
        print(f"{support:>8} | " + " | ".join(f"{c:^22}" for c in cells))

    print()
    print("EP     copies the delegate ratios whenever any support exists")
    print("EP-T   snaps to the default once support drops below 1/weight = 0.01")
    print("EP-TI  blends toward the default continuously below the threshold")
    print("WCC    always blends, weighting the delegate slice by the confidence")


if __name__ == "__main__":
    main()
