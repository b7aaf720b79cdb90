"""Fixed-point solvers: iteration, descent, grid scan, dispatching."""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from liquidballots import (
    Notion,
    SolverConfig,
    best_response,
    fixtures,
    grid_oracle,
    initial_point,
    residual_descent,
    simple_iteration,
    solve,
)
from liquidballots.model import Bundle, ElectionInstance

EPTI = fixtures.crossed_thresholds(Notion.EP_TI)
EPT = fixtures.crossed_thresholds(Notion.EP_T)

EPTI_SOLUTION = np.array(
    [
        [0.5, 0.0, 0.42299457, 0.07700543],
        [0.39154101, 0.0, 0.5, 0.10845899],
    ]
)


def test_config_validation():
    with pytest.raises(ValueError, match="tolerance"):
        SolverConfig(tolerance=0.0)
    with pytest.raises(ValueError, match="divide 1"):
        SolverConfig(grid_resolution=0.03)
    with pytest.raises(ValueError, match="shrink"):
        SolverConfig(shrink=1.0)
    SolverConfig(grid_resolution=0.02)  # 50 steps, fine


def test_iteration_converges_on_tiny_ep():
    inst = fixtures.example_ep()
    rep = simple_iteration(inst, initial_point(inst, "defaults"))
    assert rep.status == "converged"
    assert rep.iterations == 1
    assert rep.trajectory == ((1.0, 0.5), (0.0, 0.0))
    assert_array_equal(rep.solution, [[1.0, 0.0, 0.0], [0.001, 0.0, 0.999]])


def test_iteration_zero_steps_when_started_at_fixed_point():
    inst = fixtures.example_ep()
    x = np.array([[1.0, 0.0, 0.0], [0.001, 0.0, 0.999]])
    rep = simple_iteration(inst, x)
    assert rep.status == "converged"
    assert rep.iterations == 0
    assert len(rep.trajectory) == 1


def test_iteration_cycles_on_hard_thresholds():
    rep = simple_iteration(
        EPT, initial_point(EPT, "defaults"), SolverConfig(tolerance=1e-3, max_iterations=200)
    )
    assert rep.status == "max-iterations"
    assert rep.iterations == 200
    assert rep.residual_linf == 0.25
    assert rep.residual_l1 == 0.5
    # the trajectory settles into a two-cycle
    assert set(rep.trajectory[-6:]) == {
        (0.5, 0.25),
        (0.6666666666666667, 0.33333333333333337),
    }


def test_iteration_solves_interpolated_thresholds_tightly():
    rep = simple_iteration(
        EPTI, initial_point(EPTI, "defaults"), SolverConfig(tolerance=1e-12, max_iterations=500)
    )
    assert rep.status == "converged"
    assert rep.iterations == 34
    assert rep.residual_linf <= 1e-12
    assert_allclose(rep.solution, EPTI_SOLUTION, atol=1e-8)


def test_descent_refuses_discontinuous_notions():
    with pytest.raises(ValueError, match="EP-T"):
        residual_descent(EPT, initial_point(EPT, "defaults"))


def test_descent_zero_steps_at_fixed_point():
    inst = fixtures.example_ep()
    x = np.array([[1.0, 0.0, 0.0], [0.001, 0.0, 0.999]])
    rep = residual_descent(inst, x)
    assert rep.status == "converged"
    assert rep.iterations == 0


def test_descent_from_corner_reaches_blended_point():
    inst = fixtures.high_confidence(Notion.WCC, 0.015)
    x0 = initial_point(inst, "defaults")
    x0[0] = [1.0, 0.0, 0.0]
    rep = residual_descent(inst, x0, SolverConfig(tolerance=1e-6, max_iterations=5000))
    assert rep.status == "converged"
    assert rep.residual_linf <= 1e-6
    assert_allclose(rep.solution[0], [0.6, 0.4, 0.0], atol=1e-5)


def test_descent_handles_interpolated_thresholds():
    rep = residual_descent(
        EPTI, initial_point(EPTI, "defaults"), SolverConfig(tolerance=1e-3, max_iterations=5000)
    )
    assert rep.status == "converged"
    assert rep.residual_linf <= 1e-3


def symmetric_ep_pair():
    """v and u delegate {c1, c2} to each other under EP."""
    def row(voter, other):
        return (
            Bundle(("c1", "c2"), 1.0, other, Notion.EP),
            Bundle(("c3",), 0.0, voter, Notion.DIRECT),
        )

    return ElectionInstance(
        ("c1", "c2", "c3"), ("v", "u"), (row("v", "u"), row("u", "v"))
    )


def test_grid_finds_all_fixed_points_in_scan_order():
    inst = symmetric_ep_pair()
    result = grid_oracle(inst, SolverConfig(tolerance=1e-9, grid_resolution=0.5))
    assert result.points == 9
    assert len(result.hits) == 3
    matrices = [hit[0] for hit in result.hits]
    assert_array_equal(matrices[0], [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    assert_array_equal(matrices[1], [[0.5, 0.5, 0.0], [0.5, 0.5, 0.0]])
    assert_array_equal(matrices[2], [[0.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    assert all(residual == 0.0 for _, residual in result.hits)
    # ties on the minimum residual resolve to the lexicographically
    # smallest flattened matrix
    assert result.best_residual == 0.0
    assert_array_equal(result.best, [[0.0, 1.0, 0.0], [0.0, 1.0, 0.0]])


def test_grid_scan_is_complete_against_independent_enumeration():
    res = 0.05
    slices = []
    for vi, bundles in enumerate(EPT.delegations):
        for b in bundles:
            cols = [EPT.candidate_index[c] for c in b.members]
            units = round(b.budget / res)
            slices.append(
                (vi, cols, [np.array([a, units - a]) * res for a in range(units + 1)])
            )
    expected_hits = []
    expected_min = np.inf
    count = 0
    # reversed per-slice order: a genuinely different enumeration order
    for combo in itertools.product(*[values for _, _, values in slices]):
        x = np.zeros((2, 4))
        for (vi, cols, _), val in zip(slices, combo):
            x[vi, cols] = val
        r = float(np.abs(best_response(x, EPT) - x).max())
        count += 1
        if r <= 0.05:
            expected_hits.append((x.copy(), r))
        expected_min = min(expected_min, r)

    result = grid_oracle(EPT, SolverConfig(tolerance=0.05, grid_resolution=0.05))
    assert result.points == count == 14641
    assert result.best_residual == expected_min == 0.05
    assert len(result.hits) == len(expected_hits) == 1
    assert_array_equal(result.hits[0][0], expected_hits[0][0])
    assert_allclose(
        result.best, [[0.45, 0.05, 0.3, 0.2], [0.05, 0.0, 0.5, 0.45]], atol=1e-15
    )


def test_grid_certifies_absence_at_tighter_tolerance():
    result = grid_oracle(EPT, SolverConfig(tolerance=0.01, grid_resolution=0.05))
    assert result.hits == ()
    assert result.best_residual == 0.05


def test_grid_refuses_large_or_fine_problems():
    wide = ElectionInstance(
        tuple(f"c{i}" for i in range(10)),
        ("v", "u"),
        (
            (
                Bundle(tuple(f"c{i}" for i in range(10)), 1.0, "u", Notion.EP),
            ),
            tuple(
                Bundle((f"c{i}",), 1.0 if i == 0 else 0.0, "u", Notion.DIRECT)
                for i in range(10)
            ),
        ),
    )
    with pytest.raises(ValueError, match="free dimensions"):
        grid_oracle(wide)
    with pytest.raises(ValueError, match="finer"):
        grid_oracle(EPT, SolverConfig(grid_resolution=0.005))


def test_solve_dispatch_and_unknown_strategy():
    with pytest.raises(ValueError, match="strategy"):
        solve(EPTI, strategy="newton")
    rep = solve(EPTI, SolverConfig(tolerance=1e-12, max_iterations=500), strategy="iterate")
    assert rep.status == "converged"
    assert_allclose(rep.solution, EPTI_SOLUTION, atol=1e-8)


def test_solve_grid_reports_oracle_exhaustion():
    rep = solve(
        EPT,
        SolverConfig(tolerance=0.01, grid_resolution=0.05),
        strategy="grid",
    )
    assert rep.status == "oracle-exhausted-no-point"
    assert rep.residual_linf == 0.05
    assert rep.iterations == 14641


def test_solve_chains_iteration_into_descent():
    cfg = SolverConfig(tolerance=1e-12, max_iterations=5)
    rep = solve(EPTI, cfg, strategy="iterate-then-descent")
    assert rep.status == "max-iterations"
    assert rep.iterations == 10  # five replacement steps, then five descent steps
    assert len(rep.trajectory) == 12

    # with EP-T present the descent leg is skipped entirely
    rep = solve(EPT, SolverConfig(tolerance=1e-3, max_iterations=5))
    assert rep.status == "max-iterations"
    assert rep.iterations == 5


def test_solve_runs_are_bit_reproducible():
    cfg = SolverConfig(tolerance=1e-12, max_iterations=500)
    a = solve(EPTI, cfg, strategy="iterate")
    b = solve(EPTI, cfg, strategy="iterate")
    assert a.status == b.status and a.iterations == b.iterations
    assert_array_equal(a.solution, b.solution)
    assert a.trajectory == b.trajectory
