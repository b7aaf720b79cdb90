"""Built-in instances for the classic worked examples.

These are the small elections every notion's behaviour is usually
explained with.  They double as CLI ``reproduce`` targets and as test
fixtures.
"""

from __future__ import annotations

from .model import Bundle, ElectionInstance, Notion


def _direct_row(voter, candidates, values):
    """A voter's whole ballot as DIRECT singleton bundles."""
    return tuple(
        Bundle(members=(c,), budget=b, delegate=voter, notion=Notion.DIRECT)
        for c, b in zip(candidates, values)
    )


def example_ep() -> ElectionInstance:
    """Two voters, three candidates, one EP delegation.

    Voter ``v`` delegates {c1, c2} with her whole budget to ``u``; ``u``
    votes directly [0.001, 0, 0.999].  The tiny positive support on c1
    forces v's only satisfying ballot to be [1, 0, 0].
    """
    candidates = ("c1", "c2", "c3")
    v_bundles = (
        Bundle(members=("c1", "c2"), budget=1.0, delegate="u", notion=Notion.EP),
        Bundle(members=("c3",), budget=0.0, delegate="v", notion=Notion.DIRECT),
    )
    u_bundles = _direct_row("u", candidates, (0.001, 0.0, 0.999))
    return ElectionInstance(candidates, ("v", "u"), (v_bundles, u_bundles))


def crossed_thresholds(notion=Notion.EP_T) -> ElectionInstance:
    """Two voters delegating to each other across crossed bundle pairs.

    Voter ``v`` splits {c1, c2} and {c3, c4} (budget 0.5 each, both
    delegated to ``u``, confidence threshold 0.8, defaults on the first
    member); ``u`` splits {c1, c4} and {c2, c3} (delegated to ``v``,
    thresholds 0.7 and 0.4, defaults on the second member).  Under EP-T
    the hard threshold switches make the instance unsolvable; under EP-TI
    a solution exists.
    """
    notion = Notion(notion)
    candidates = ("c1", "c2", "c3", "c4")
    v_bundles = (
        Bundle(
            members=("c1", "c2"), budget=0.5, delegate="u", notion=notion,
            weight=1.25, default=(0.5, 0.0),
        ),
        Bundle(
            members=("c3", "c4"), budget=0.5, delegate="u", notion=notion,
            weight=1.25, default=(0.5, 0.0),
        ),
    )
    u_bundles = (
        Bundle(
            members=("c1", "c4"), budget=0.5, delegate="v", notion=notion,
            weight=1.0 / 0.7, default=(0.0, 0.5),
        ),
        Bundle(
            members=("c2", "c3"), budget=0.5, delegate="v", notion=notion,
            weight=2.5, default=(0.0, 0.5),
        ),
    )
    return ElectionInstance(candidates, ("v", "u"), (v_bundles, u_bundles))


#: Solution of the crossed-thresholds instance under EP-TI, rows v then u.
CROSSED_EPTI_SOLUTION = (
    (0.5, 0.0, 0.423, 0.077),
    (0.39154, 0.0, 0.5, 0.10846),
)


def high_confidence(notion, u_first, weight=100.0) -> ElectionInstance:
    """One high-confidence delegation to a nearly-abstaining delegate.

    Voter ``v`` delegates {c1, c2} with budget 1 to ``u`` (weight 100, so
    the confidence threshold is 0.01) and falls back to default [0, 1];
    ``u`` votes directly [u_first, 0, 1 - u_first].  Varying ``u_first``
    around the threshold shows how sharply each notion reacts.
    """
    candidates = ("c1", "c2", "c3")
    v_bundles = (
        Bundle(
            members=("c1", "c2"), budget=1.0, delegate="u", notion=notion,
            weight=weight, default=(0.0, 1.0),
        ),
        Bundle(members=("c3",), budget=0.0, delegate="v", notion=Notion.DIRECT),
    )
    u_bundles = _direct_row("u", candidates, (u_first, 0.0, 1.0 - u_first))
    return ElectionInstance(candidates, ("v", "u"), (v_bundles, u_bundles))


#: Delegate supports used in the threshold-sensitivity walkthroughs.
SENSITIVITY_SUPPORTS = (0.015, 0.01, 0.005)

#: Resolved v-ballots of ``high_confidence(EP_TI, s)`` for each support.
EPTI_SENSITIVITY_SOLUTIONS = {
    0.015: (1.0, 0.0, 0.0),
    0.01: (1.0, 0.0, 0.0),
    0.005: (0.5, 0.5, 0.0),
}

#: Resolved v-ballots of ``high_confidence(WCC, s)`` for each support.
WCC_SENSITIVITY_SOLUTIONS = {
    0.015: (0.6, 0.4, 0.0),
    0.01: (0.5, 0.5, 0.0),
    0.005: (1.0 / 3.0, 2.0 / 3.0, 0.0),
}
