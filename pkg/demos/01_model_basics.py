"""Build an election by hand and poke at the core model.

Voters split one unit of support across a partition of the candidates
into bundles.  Each bundle either carries a fixed DIRECT value or is
delegated to another voter under a resolution notion.
"""

import numpy as np

from liquidballots import (
    Bundle,
    ElectionInstance,
    Notion,
    initial_point,
    is_feasible,
    project_to_feasible,
    serialize_instance,
    validate_instance,
)


def main():
    alice = (
        Bundle(members=("parks", "roads"), budget=0.6, delegate="bob",
               notion=Notion.WCC, weight=4.0, default=(0.6, 0.0)),
        Bundle(members=("schools",), budget=0.4, delegate="alice",
               notion=Notion.DIRECT),
    )
    bob = (
        Bundle(members=("parks",), budget=0.5, delegate="bob", notion=Notion.DIRECT),
        Bundle(members=("roads",), budget=0.2, delegate="bob", notion=Notion.DIRECT),
        Bundle(members=("schools",), budget=0.3, delegate="bob", notion=Notion.DIRECT),
    )
    election = ElectionInstance(
        candidates=("parks", "roads", "schools"),
        voters=("alice", "bob"),
        delegations=(alice, bob),
    )

    print("validation:", validate_instance(election))
    print("free dimensions:", election.free_dimensions)

    x0 = initial_point(election, "defaults")
    print("default start:\n", x0)
    print("feasible:", is_feasible(election, x0))

    # any matrix can be repaired onto the feasible polytope
    y = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
    x = project_to_feasible(election, y)
    print("projected from all-ones row:\n", x)
    print("row sums:", x.sum(axis=1))

    print("\nserialized instance:")
    print(serialize_instance(election))


if __name__ == "__main__":
    main()
