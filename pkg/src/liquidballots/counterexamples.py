"""Checks and randomized searches for structural counterexamples.

The combined-ballot response map looks innocent but is neither a
contraction, nor the gradient field of a pseudo-monotone variational
inequality, nor single-valued in its fixed points.  This module holds
the certificates for all three phenomena:

* :func:`check_contraction_violation` - one step of the map expands the
  distance between successive iterates;
* :func:`check_pseudomono_violation` - the residual operator points the
  wrong way relative to a known solution;
* :func:`check_nonuniqueness` - two well separated exact solutions.

:func:`search_violation` hunts for instances witnessing each phenomenon
with a seeded random search, so that findings can be reproduced from
(kind, parameters, seed) alone and frozen as JSON fixtures via
:func:`save_finding` / :func:`load_finding`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .io import InstanceSyntaxError, _format_number, instance_from_doc, instance_to_doc
from .model import Bundle, ElectionInstance, Notion
from .response import best_response, residual_norms

SEARCH_KINDS = ("contraction-violation", "pseudo-mono-violation", "non-uniqueness")

#: Probes evaluated per instance while searching.
_POINT_PROBES = 256
_STARTS = 24


def check_contraction_violation(instance, x):
    """Compare the residual before and after one application of the map.

    Returns ``(violated, lhs, rhs)`` where ``lhs = ||f(x) - f(f(x))||_1``
    and ``rhs = ||x - f(x)||_1``.  A contraction would force
    ``lhs < rhs`` whenever ``rhs > 0``; ``violated`` reports ``lhs > rhs``.
    """
    x = np.asarray(x, dtype=float)
    fx = best_response(x, instance)
    ffx = best_response(fx, instance)
    rhs = float(np.abs(x - fx).sum())
    lhs = float(np.abs(fx - ffx).sum())
    return lhs > rhs, lhs, rhs


def check_pseudomono_violation(instance, x, y):
    """Inner product ``<y - f(y), y - x>`` for a solution ``x`` and probe ``y``.

    Pseudo-monotonicity of the residual operator relative to the solution
    set would make this non-negative for every feasible ``y``; a strictly
    negative value is a counterexample.  Raises ``ValueError`` when ``x``
    is not a solution to within 1e-6.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _, linf = residual_norms(x, instance)
    if linf > 1e-6:
        raise ValueError(f"x is not a fixed point: residual {linf!r} exceeds 1e-06")
    fy = best_response(y, instance)
    return float(((y - fy) * (y - x)).sum())


def check_nonuniqueness(instance, x1, x2, residual_tol=1e-6, separation=0.1):
    """Whether ``x1`` and ``x2`` are distinct solutions of one instance.

    Returns ``(distinct, distance)``: both matrices must have best-response
    residual at most ``residual_tol`` and lie more than ``separation``
    apart in the entrywise l1 distance.  That distance never exceeds
    ``2 * n`` since each row difference has l1-norm at most 2.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    _, r1 = residual_norms(x1, instance)
    _, r2 = residual_norms(x2, instance)
    distance = float(np.abs(x1 - x2).sum())
    ok = r1 <= residual_tol and r2 <= residual_tol and distance > separation
    return ok, distance


def _rational_budgets(rng, parts, units=20):
    """Positive budgets on a denominator-``units`` grid summing to one."""
    cuts = rng.choice(np.arange(1, units), size=parts - 1, replace=False)
    edges = [0, *sorted(int(c) for c in cuts), units]
    return [Fraction(edges[i + 1] - edges[i], units) for i in range(parts)]


def random_wcc_instance(rng, n, m, weight=10.0, default_mode="even-split"):
    """Random instance where every bundle resolves by combined rescaling.

    Each voter partitions the candidates into a random number of bundles,
    assigns each bundle a positive rational budget (denominator 20) and
    delegates it to a uniformly random other voter.  ``default_mode``
    picks the fallback ballots: ``"even-split"`` spreads each budget
    evenly over the bundle, ``"random"`` puts a Dirichlet draw on a
    random nonempty subset of the members.  Random defaults may carry
    zeros on purpose: with every default entry strictly positive each
    bundle response is a positively shifted affine map followed by
    normalization, which contracts so strongly that multiple fixed
    points never showed up in any experiment.  All worked examples use
    sparse defaults, and only sparse defaults exhibit non-uniqueness.
    A single voter has nobody to delegate to and votes directly.
    """
    candidates = tuple(f"c{i + 1}" for i in range(m))
    voters = tuple(f"v{i + 1}" for i in range(n))
    if n == 1:
        budgets = _rational_budgets(rng, m) if m > 1 else [Fraction(1)]
        row = tuple(
            Bundle(members=(c,), budget=float(b), delegate=voters[0], notion=Notion.DIRECT)
            for c, b in zip(candidates, budgets)
        )
        return ElectionInstance(candidates, voters, (row,))
    delegations = []
    for voter in voters:
        parts = int(rng.integers(1, min(m, 19) + 1))
        cuts = []
        if parts > 1:
            cuts = sorted(rng.choice(np.arange(1, m), size=parts - 1, replace=False))
        order = rng.permutation(m)
        groups = np.split(order, [int(c) for c in cuts])
        budgets = _rational_budgets(rng, parts)
        bundles = []
        for group, b in zip(groups, budgets):
            members = tuple(candidates[ci] for ci in sorted(int(g) for g in group))
            others = [v for v in voters if v != voter]
            delegate = others[int(rng.integers(len(others)))]
            b = float(b)
            if default_mode == "even-split":
                default = tuple([b / len(members)] * len(members))
            elif default_mode == "random":
                k = len(members)
                support = rng.choice(k, size=int(rng.integers(1, k + 1)), replace=False)
                d = np.zeros(k)
                d[support] = rng.dirichlet(np.ones(len(support))) * b
                default = tuple(d)
            else:
                raise ValueError(f"unknown default mode {default_mode!r}")
            bundles.append(
                Bundle(
                    members=members,
                    budget=b,
                    delegate=delegate,
                    notion=Notion.WCC,
                    weight=weight,
                    default=default,
                )
            )
        delegations.append(tuple(bundles))
    return ElectionInstance(candidates, voters, tuple(delegations))


def random_feasible_point(rng, instance):
    """Uniform-ish feasible matrix: a flat Dirichlet draw per bundle."""
    x = np.zeros((instance.n, instance.m))
    for cell in instance._plan:
        k = len(cell.cols)
        if cell.budget <= 0.0:
            continue
        if k == 1:
            x[cell.voter, cell.cols[0]] = cell.budget
        else:
            x[cell.voter, list(cell.cols)] = cell.budget * rng.dirichlet(np.ones(k))
    return x


def _iterate_batch(instance, xs, tol=1e-9, iterations=3000):
    """Run fixed-point iteration on a stack of starts; returns (xs, residuals)."""
    for _ in range(iterations):
        fx = best_response(xs, instance)
        done = np.max(np.abs(fx - xs), axis=(-2, -1)) <= tol
        xs = fx
        if done.all():
            break
    fx = best_response(xs, instance)
    return xs, np.max(np.abs(fx - xs), axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class SearchFinding:
    """A witnessed counterexample: the instance, matrices and margins."""

    kind: str
    instance: ElectionInstance
    witnesses: dict[str, np.ndarray]
    certificate: dict[str, float]
    seed: int
    attempt: int


def _default_start(instance):
    x = np.zeros((instance.n, instance.m))
    for cell in instance._plan:
        if cell.default is not None:
            x[cell.voter, list(cell.cols)] = cell.default
        elif cell.budget > 0.0:
            x[cell.voter, list(cell.cols)] = cell.budget / len(cell.cols)
    return x


def _search_contraction(rng, instance, attempt, seed):
    xs = np.stack(
        [_default_start(instance)]
        + [random_feasible_point(rng, instance) for _ in range(_POINT_PROBES)]
    )
    fx = best_response(xs, instance)
    ffx = best_response(fx, instance)
    rhs = np.abs(xs - fx).sum(axis=(-2, -1))
    lhs = np.abs(fx - ffx).sum(axis=(-2, -1))
    margin = lhs - rhs
    best = int(np.argmax(margin))
    if margin[best] >= 1e-6:
        return SearchFinding(
            kind="contraction-violation",
            instance=instance,
            witnesses={"x": xs[best]},
            certificate={
                "lhs": float(lhs[best]),
                "rhs": float(rhs[best]),
                "margin": float(margin[best]),
            },
            seed=seed,
            attempt=attempt,
        )
    return None


def _distinct_fixed_points(rng, instance, tol=1e-6):
    """Multi-start iteration; returns converged points sorted by spread."""
    starts = np.stack(
        [_default_start(instance)]
        + [random_feasible_point(rng, instance) for _ in range(_STARTS)]
    )
    xs, res = _iterate_batch(instance, starts, tol=1e-10)
    return xs[res <= tol]


def _search_nonuniqueness(rng, instance, attempt, seed, separation):
    points = _distinct_fixed_points(rng, instance)
    if len(points) < 2:
        return None
    diffs = np.max(np.abs(points[:, None] - points[None, :]), axis=(-2, -1))
    i, j = np.unravel_index(int(np.argmax(diffs)), diffs.shape)
    ok, distance = check_nonuniqueness(
        instance, points[i], points[j], separation=separation
    )
    if not ok:
        return None
    _, r1 = residual_norms(points[i], instance)
    _, r2 = residual_norms(points[j], instance)
    return SearchFinding(
        kind="non-uniqueness",
        instance=instance,
        witnesses={"x1": points[i], "x2": points[j]},
        certificate={
            "distance": distance,
            "residual_x1": float(r1),
            "residual_x2": float(r2),
        },
        seed=seed,
        attempt=attempt,
    )


def _search_pseudomono(rng, instance, attempt, seed):
    points = _distinct_fixed_points(rng, instance)
    if len(points) == 0:
        return None
    x = points[0]
    probes = [random_feasible_point(rng, instance) for _ in range(_POINT_PROBES)]
    # other fixed points, nudged, are the most promising probes
    for other in points[1:]:
        probes.append(other)
        for _ in range(8):
            blend = rng.uniform(0.8, 1.0)
            probes.append(blend * other + (1.0 - blend) * random_feasible_point(rng, instance))
    ys = np.stack(probes)
    fys = best_response(ys, instance)
    values = ((ys - fys) * (ys - x)).sum(axis=(-2, -1))
    best = int(np.argmin(values))
    if values[best] <= -1e-6:
        return SearchFinding(
            kind="pseudo-mono-violation",
            instance=instance,
            witnesses={"x": x, "y": ys[best]},
            certificate={"value": float(values[best])},
            seed=seed,
            attempt=attempt,
        )
    return None


def search_violation(
    kind,
    *,
    n=10,
    m=5,
    weight=10.0,
    default_mode="even-split",
    seed=0,
    budget=200,
    separation=0.1,
):
    """Randomized search for one counterexample kind.

    Draws up to ``budget`` random instances from
    :func:`random_wcc_instance` and probes each; deterministic for fixed
    arguments.  Returns a :class:`SearchFinding` or ``None``.
    """
    if kind not in SEARCH_KINDS:
        raise ValueError(f"unknown search kind {kind!r}; expected one of {SEARCH_KINDS}")
    rng = np.random.default_rng(seed)
    for attempt in range(budget):
        instance = random_wcc_instance(rng, n, m, weight=weight, default_mode=default_mode)
        if kind == "contraction-violation":
            finding = _search_contraction(rng, instance, attempt, seed)
        elif kind == "non-uniqueness":
            finding = _search_nonuniqueness(rng, instance, attempt, seed, separation)
        else:
            finding = _search_pseudomono(rng, instance, attempt, seed)
        if finding is not None:
            return finding
    return None


def _matrix_doc(x):
    return [[_format_number(v) for v in row] for row in np.asarray(x, dtype=float)]


def _matrix_from_doc(doc):
    return np.array([[float(Fraction(v)) for v in row] for row in doc])


def finding_to_doc(finding) -> dict:
    return {
        "schema_version": 1,
        "kind": finding.kind,
        "seed": finding.seed,
        "attempt": finding.attempt,
        "instance": instance_to_doc(finding.instance),
        "witnesses": {k: _matrix_doc(v) for k, v in finding.witnesses.items()},
        "certificate": {k: _format_number(v) for k, v in finding.certificate.items()},
    }


def finding_from_doc(doc) -> SearchFinding:
    try:
        return SearchFinding(
            kind=str(doc["kind"]),
            instance=instance_from_doc(doc["instance"]),
            witnesses={k: _matrix_from_doc(v) for k, v in doc["witnesses"].items()},
            certificate={k: float(Fraction(v)) for k, v in doc["certificate"].items()},
            seed=int(doc["seed"]),
            attempt=int(doc["attempt"]),
        )
    except KeyError as exc:
        raise InstanceSyntaxError(f"finding document misses key {exc}") from None


def save_finding(finding, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(finding_to_doc(finding), handle, indent=2)
        handle.write("\n")


def load_finding(path) -> SearchFinding:
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    return finding_from_doc(doc)
