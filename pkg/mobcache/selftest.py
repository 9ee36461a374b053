"""
Module containing the oracle suites run by ``mobcache selftest``: small
random instances on which the solvers are checked against exhaustive or
closed-form answers.
"""
from __future__ import absolute_import, division, print_function
import collections
import itertools
import logging

import numpy as np

from . import bs_place, ut_place
from .mobility import random_contact_model, random_transition_model, \
    sample_paths
from .model import Capacities, DiscretePlacement, zipf_pmf


logger = logging.getLogger(__name__)


# Objective and projection tolerances of the oracle comparisons.
EXACT_TOLERANCE = 1e-12
PROJECTION_TOLERANCE = 1e-9
GRID_RESOLUTION = 1e-3
LP_TOLERANCE = 1e-3
SUPERGRADIENT_TOLERANCE = 1e-2


SuiteResult = collections.namedtuple(
    "SuiteResult", ["name", "cases", "violations", "detail"])


def random_ut_instance(rng, max_users=4, max_files=4, capacity=1):
    num_users = int(rng.integers(2, max_users + 1))
    num_files = int(rng.integers(2, max_files + 1))
    contacts = random_contact_model(num_users, rng.uniform(0.1, 2.0), rng)
    return ut_place.UtInstance(contacts,
                               zipf_pmf(num_files, rng.uniform(0.0, 2.0)),
                               1.0, Capacities.uniform(capacity, num_users))


def random_bs_instance(rng, num_bs, num_files, caps=None, num_paths=6):
    model = random_transition_model(num_bs, 1.0, rng)
    paths = sample_paths(model, rng.uniform(0.5, 3.0), num_paths, rng)
    if caps is None:
        caps = Capacities.uniform(1, num_bs)
    return bs_place.BsInstance(paths, zipf_pmf(num_files,
                                               rng.uniform(0.0, 2.0)),
                               rng.uniform(0.2, 1.0), caps)


def greedy_guarantee(instances=200, seed=0):
    """
    Greedy against brute force on K <= 4, F <= 4, unit capacities: the
    greedy ratio must reach half the optimum.
    """
    rng = np.random.default_rng(seed)
    ratios, violations = [], 0
    for _ in range(instances):
        inst = random_ut_instance(rng)
        greedy = ut_place.offloading_ratio(ut_place.greedy_placement(inst),
                                           inst)
        best = ut_place.offloading_ratio(ut_place.brute_force_placement(inst),
                                         inst)
        if greedy < 0.5 * best - EXACT_TOLERANCE or \
                greedy > best + EXACT_TOLERANCE:
            violations += 1
        ratios.append(greedy / best if best > 0 else 1.0)
    return SuiteResult("greedy_guarantee", instances, violations,
                       "mean greedy/optimum %.6f, min %.6f"
                       % (np.mean(ratios), np.min(ratios)))


def _random_subsets(rng, num_users, num_files):
    """
    Returns ``(A, B, e)`` with A a subset of B and e outside B, as sets of
    ``(user, file)`` elements.
    """
    ground = list(itertools.product(range(num_users), range(num_files)))
    order = rng.permutation(len(ground))
    size_b = int(rng.integers(0, len(ground)))
    size_a = int(rng.integers(0, size_b + 1))
    b = [ground[i] for i in order[:size_b]]
    return set(b[:size_a]), set(b), ground[order[size_b]]


def submodularity(triples=1000, seed=0):
    """
    Diminishing returns and monotonicity of the offloading ratio over
    random ``A <= B``, ``e not in B`` triples.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(triples):
        inst = random_ut_instance(rng)
        a, b, e = _random_subsets(rng, inst.num_users, inst.num_files)

        def ratio(items):
            return ut_place.offloading_ratio(DiscretePlacement.from_items(
                inst.num_users, inst.num_files, items), inst)

        f_a, f_b = ratio(a), ratio(b)
        gain_a = ratio(a | set([e])) - f_a
        gain_b = ratio(b | set([e])) - f_b
        if gain_a < gain_b - EXACT_TOLERANCE or \
                f_b < f_a - EXACT_TOLERANCE or gain_b < -EXACT_TOLERANCE:
            violations += 1
    return SuiteResult("submodularity", triples, violations,
                       "diminishing returns and monotonicity")


def _grid_search_2x2(inst, metric="served"):
    """
    Best served fraction (``metric="served"``) or lowest failure probability
    (``metric="failure"``) of a 2-BS, 2-file instance over a grid of step
    ``GRID_RESOLUTION``. Both improve with every share, so each BS fills
    its capacity.
    """
    steps = int(round(1 / GRID_RESOLUTION))
    grids = []
    for cap in inst.caps.per_node:
        first = np.linspace(0.0, 1.0, steps + 1)
        first = first[(first >= cap - 1 - 1e-12) & (first <= cap + 1e-12)]
        grids.append(np.column_stack([first,
                                      np.clip(cap - first, 0.0, 1.0)]))
    x0 = grids[0][:, None, :]
    x1 = grids[1][None, :, :]
    budget = inst.budget
    total = np.zeros((len(grids[0]), len(grids[1])))
    for s, weight in enumerate(inst.weights):
        collected = np.minimum(x0, budget[s, 0]) + \
            np.minimum(x1, budget[s, 1])
        if metric == "served":
            total += weight * np.minimum(collected, 1.0).dot(
                inst.popularity.pmf)
        else:
            failed = collected < 1 - bs_place.FAILURE_TOLERANCE
            total += weight * failed.dot(inst.popularity.pmf)
    return float(total.max() if metric == "served" else total.min())


def coded_optimality(instances=50, seed=0, iterations=5000):
    """
    Coded solvers on random 2-BS, 2-file instances against a grid search:
    the linear program within ``LP_TOLERANCE``, supergradient ascent within
    ``SUPERGRADIENT_TOLERANCE``.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    worst_lp, worst_sg = 0.0, 0.0
    for _ in range(instances):
        inst = random_bs_instance(rng, 2, 2,
                                  Capacities(rng.uniform(0.3, 1.7, 2)))
        grid = _grid_search_2x2(inst)
        lp = bs_place.served_fraction_objective(
            bs_place.optimize_coded_lp(inst), inst)
        sg = bs_place.served_fraction_objective(
            bs_place.optimize_coded(inst, iterations=iterations,
                                    seed=int(rng.integers(2 ** 31))), inst)
        worst_lp = max(worst_lp, abs(lp - grid))
        worst_sg = max(worst_sg, grid - sg)
        if abs(lp - grid) > LP_TOLERANCE or \
                grid - sg > SUPERGRADIENT_TOLERANCE:
            violations += 1
    return SuiteResult("coded_optimality", instances, violations,
                       "worst |lp - grid| %.2e, worst grid - supergradient "
                       "%.2e" % (worst_lp, worst_sg))

def coded_failure(instances=50, seed=0):
    """
    Failure minimizing coded solve on random 2-BS, 2-file, unit capacity
    instances: never above the exhaustive uncoded optimum nor above a grid
    search over coded placements.
    """
    rng = np.random.default_rng(seed)
    violations, strict = 0, 0
    for _ in range(instances):
        inst = random_bs_instance(rng, 2, 2)
        coded = bs_place.failure_probability(
            bs_place.optimize_coded_failure(inst), inst)
        uncoded = bs_place.failure_probability(
            bs_place.exhaustive_uncoded(inst), inst)
        grid = _grid_search_2x2(inst, metric="failure")
        if coded > uncoded + EXACT_TOLERANCE or \
                coded > grid + EXACT_TOLERANCE:
            violations += 1
        if coded < uncoded - EXACT_TOLERANCE:
            strict += 1
    return SuiteResult("coded_failure", instances, violations,
                       "coded strictly below uncoded on %d instances"
                       % strict)



def projection_oracle(v, cap):
    """
    Euclidean projection onto ``{0 <= x <= 1, sum x <= cap}`` by trying
    every split of the coordinates into those at 0, at 1 and free.
    """
    v = np.asarray(v, dtype=float)
    candidates = [np.clip(v, 0.0, 1.0)]
    for labels in itertools.product((0, 1, 2), repeat=len(v)):
        labels = np.array(labels)
        free = labels == 2
        if not free.any():
            candidates.append(labels.astype(float))
            continue
        shift = (v[free].sum() + (labels == 1).sum() - cap) / free.sum()
        x = np.where(free, v - shift, labels.astype(float))
        candidates.append(x)
    best, best_distance = None, None
    for x in candidates:
        if np.any(x < -1e-12) or np.any(x > 1 + 1e-12) or \
                x.sum() > cap + 1e-12:
            continue
        distance = ((x - v) ** 2).sum()
        if best is None or distance < best_distance:
            best, best_distance = x, distance
    return best


def projection(cases=1000, seed=0):
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(cases):
        size = int(rng.integers(1, 5))
        v = rng.uniform(-1.0, 2.0, size)
        cap = rng.uniform(0.0, size + 0.5)
        error = np.abs(bs_place.project_capped_simplex(v, cap) -
                       projection_oracle(v, cap)).max()
        worst = max(worst, error)
        if error > PROJECTION_TOLERANCE:
            violations += 1
    return SuiteResult("projection", cases, violations,
                       "worst deviation %.2e" % worst)


def uncoded_exactness(instances=200, seed=0):
    """
    Branch and bound against plain enumeration on N <= 3, F <= 4.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(instances):
        inst = random_bs_instance(rng, int(rng.integers(1, 4)),
                                  int(rng.integers(1, 5)))
        exact = bs_place.failure_probability(
            bs_place.optimize_uncoded(inst, mode="exact"), inst)
        enumerated = bs_place.failure_probability(
            bs_place.exhaustive_uncoded(inst), inst)
        if abs(exact - enumerated) > EXACT_TOLERANCE:
            violations += 1
    return SuiteResult("uncoded_exactness", instances, violations,
                       "branch and bound against enumeration")


def run_selftest(scale=1.0, seed=0):
    """
    Runs every suite with case counts multiplied by ``scale``.

    :rtype: list of :py:class:`SuiteResult`
    """
    def count(n):
        return max(1, int(round(n * scale)))

    results = [
        greedy_guarantee(count(200), seed),
        submodularity(count(1000), seed),
        coded_optimality(count(50), seed),
        coded_failure(count(50), seed),
        projection(count(1000), seed),
        uncoded_exactness(count(200), seed),
    ]
    for r in results:
        logger.info("%s: %d cases, %d violations (%s)", r.name, r.cases,
                    r.violations, r.detail)
    return results
