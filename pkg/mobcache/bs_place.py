"""
Module containing cache placement at base stations (BSs) driven by cell
sojourn times.

A user requesting file f while moving along a path collects, from every BS
n it passes, at most the share ``x[n][f]`` stored there and at most
``rate * sojourn[n]``. With fountain coding the shares are additive and the
file is recovered once the collected total reaches 1; anything less is a
cache failure.
"""
from __future__ import absolute_import, division, print_function
import itertools
import logging
import math

import numpy as np
from scipy import optimize, sparse

from .model import (Capacities, CodedPlacement, DiscretePlacement,
                    InstanceTooLarge, InvalidParameter, check_capacity,
                    check_shape, make_rng, mpc_placement)


logger = logging.getLogger(__name__)


# Collected fractions within this of 1 count as a recovered file.
FAILURE_TOLERANCE = 1e-9

# Largest search space optimize_uncoded(mode="exact") will take on.
MAX_EXACT_PLACEMENTS = 10 ** 7

DEFAULT_ITERATIONS = 5000

# HiGHS time limit of the coded failure minimization.
MILP_TIME_LIMIT_S = 60.0


class BsInstance(object):
    """
    Base station placement problem.

    :param PathScenarioSet scenarios: weighted per-cell sojourn vectors
    :param ZipfPopularity popularity: request law
    :param float rate: downlink rate in files per second, equal at all BSs
    :param Capacities caps: per-BS capacity in files
    :param int num_bs: number of BSs, defaults to the scenarios' cell count
    """

    def __init__(self, scenarios, popularity, rate, caps, num_bs=None):
        if num_bs is None:
            num_bs = scenarios.num_cells
        if not rate > 0:
            raise InvalidParameter("rate must be positive, got %r" % (rate,))
        if scenarios.num_cells != num_bs:
            raise InvalidParameter("scenarios cover %d cells, instance has "
                                   "%d BSs" % (scenarios.num_cells, num_bs))
        if len(caps) != num_bs:
            raise InvalidParameter("%d capacities for %d BSs"
                                   % (len(caps), num_bs))
        self.scenarios = scenarios
        self.popularity = popularity
        self.rate = float(rate)
        self.caps = caps
        self.num_bs = int(num_bs)
        # Most each scenario can download from each BS.
        self.budget = self.rate * scenarios.sojourn
        self.budget.setflags(write=False)

    @property
    def num_files(self):
        return self.popularity.num_files

    @property
    def weights(self):
        return self.scenarios.weights

    def __repr__(self):
        return "BsInstance(%d BSs, %d files, %d scenarios)" % (
            self.num_bs, self.num_files, self.scenarios.num_scenarios)


def downloaded_fraction(column, sojourn, rate):
    """
    Fraction of one file a user collects along a path.

    :param column: per-BS stored share of the file
    :param sojourn: per-BS total sojourn time of the path
    :param float rate: downlink rate
    :returns: ``min(1, sum_n min(column[n], rate * sojourn[n]))``
    """
    column = np.asarray(column, dtype=float)
    sojourn = np.asarray(sojourn, dtype=float)
    return float(min(1.0, np.minimum(column, rate * sojourn).sum()))


def sequential_download(visits, column, rate):
    """
    Walks ordered ``(bs, seconds)`` visits, downloading on each visit the
    not yet collected part of the share stored at that BS, limited by
    ``rate * seconds``. Returns the collected fraction, capped at 1.
    """
    column = np.asarray(column, dtype=float)
    got = np.zeros_like(column)
    for bs, seconds in visits:
        got[bs] += min(column[bs] - got[bs], rate * seconds)
    return float(min(1.0, got.sum()))


def _collected(fractions, inst):
    """
    Scenario by file matrix of collected fractions (uncapped).
    """
    collected = np.zeros((inst.scenarios.num_scenarios, fractions.shape[1]))
    for bs in range(inst.num_bs):
        collected += np.minimum(fractions[bs][None, :],
                                inst.budget[:, bs][:, None])
    return collected


def _failure_from_collected(collected, inst):
    failed = collected < 1 - FAILURE_TOLERANCE
    return float(inst.weights.dot(failed.dot(inst.popularity.pmf)))


def _served_from_collected(collected, inst):
    served = np.minimum(collected, 1.0)
    return float(inst.weights.dot(served.dot(inst.popularity.pmf)))


def failure_probability(placement, inst):
    """
    Probability that a request cannot be completed from the BS caches along
    the requesting user's path.

    :param placement: :py:class:`CodedPlacement` or
                      :py:class:`DiscretePlacement`
    :param BsInstance inst: problem instance
    :rtype: float
    """
    check_shape(placement, inst.num_bs, inst.num_files)
    return _failure_from_collected(_collected(placement.fractions(), inst),
                                   inst)


def served_fraction_objective(placement, inst):
    """
    Expected collected fraction of the requested file, a concave function
    of the stored shares; the coded solvers maximize it.
    """
    check_shape(placement, inst.num_bs, inst.num_files)
    return _served_from_collected(_collected(placement.fractions(), inst),
                                  inst)


def project_capped_simplex(v, cap):
    """
    Euclidean projection of ``v`` onto ``{u : 0 <= u <= 1, sum(u) <= cap}``.

    When clipping to the box already satisfies the budget that is the
    answer; otherwise the projection is ``clip(v - theta, 0, 1)`` for the
    ``theta > 0`` making the sum equal to ``cap``. The clipped sum is
    piecewise linear in theta with breakpoints at ``v`` and ``v - 1``, so
    theta is found exactly by interpolating between two breakpoints.

    :param v: vector to project
    :param float cap: nonnegative budget
    :rtype: numpy.ndarray
    """
    v = np.asarray(v, dtype=float)
    if cap <= 0:
        return np.zeros_like(v)
    clipped = np.clip(v, 0.0, 1.0)
    if clipped.sum() <= cap:
        return clipped

    breaks = np.unique(np.concatenate([v - 1.0, v]))
    breaks = breaks[breaks > 0]
    totals = np.clip(v[None, :] - breaks[:, None], 0.0, 1.0).sum(axis=1)
    k = int(np.argmax(totals <= cap))
    if k == 0:
        lower, lower_total = 0.0, clipped.sum()
    else:
        lower, lower_total = breaks[k - 1], totals[k - 1]
    upper, upper_total = breaks[k], totals[k]
    theta = lower + (lower_total - cap) * (upper - lower) / \
        (lower_total - upper_total)
    return np.clip(v - theta, 0.0, 1.0)


def _project_rows(x, caps):
    return np.array([project_capped_simplex(row, cap)
                     for row, cap in zip(x, caps.per_node)])


def _supergradient(x, collected, inst):
    unserved = inst.weights[:, None] * (collected < 1.0)
    grad = np.empty_like(x)
    for bs in range(inst.num_bs):
        below = x[bs][None, :] < inst.budget[:, bs][:, None]
        grad[bs] = (unserved * below).sum(axis=0)
    return grad * inst.popularity.pmf[None, :]


def optimize_coded(inst, iterations=DEFAULT_ITERATIONS, seed=0, step0=1.0,
                   eval_every=10):
    """
    Maximizes :py:func:`served_fraction_objective` over coded placements
    by projected supergradient ascent with steps ``step0 / sqrt(t)``.

    The start point is a random feasible placement drawn from ``seed``.
    Every iterate is scored, as is the average of the iterates of the
    second half of the run (every ``eval_every`` iterations and at the
    end); the best scored placement is returned, so the reported
    objective never decreases with more iterations.

    :param BsInstance inst: problem instance
    :param int iterations: number of ascent steps
    :param int seed: seed of the start point
    :rtype: CodedPlacement
    """
    rng = make_rng(seed)
    x = _project_rows(rng.uniform(0.0, 1.0, (inst.num_bs, inst.num_files)),
                      inst.caps)
    average = np.zeros_like(x)
    averaged = 0
    tail_start = iterations // 2

    best_x, best_value = x, -1.0
    for t in range(1, iterations + 1):
        collected = _collected(x, inst)
        value = _served_from_collected(collected, inst)
        if value > best_value:
            best_x, best_value = x, value

        x = _project_rows(x + step0 / math.sqrt(t) *
                          _supergradient(x, collected, inst), inst.caps)
        if t > tail_start:
            averaged += 1
            average += (x - average) / averaged
            if averaged % eval_every == 0 or t == iterations:
                value = _served_from_collected(_collected(average, inst),
                                               inst)
                if value > best_value:
                    best_x, best_value = average.copy(), value

    value = _served_from_collected(_collected(x, inst), inst)
    if value > best_value:
        best_x, best_value = x, value
    logger.debug("supergradient ascent: %d iterations, objective %.9f",
                 iterations, best_value)
    return CodedPlacement(_feasible(best_x, inst), inst.caps)


def _feasible(x, inst):
    """
    Removes solver noise: snaps shares within 1e-9 of 0 or 1 and projects
    rows that exceed their capacity.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    x[x < 1e-9] = 0.0
    x[x > 1 - 1e-9] = 1.0
    over = x.sum(axis=1) > inst.caps.per_node
    if over.any():
        x[over] = _project_rows(x[over],
                                Capacities(inst.caps.per_node[over]))
    return x


def optimize_coded_lp(inst):
    """
    Solves the coded placement exactly through the linear program

        maximize    sum_s w_s sum_f p_f z[s, f]
        subject to  z[s, f] <= sum_n y[s, n, f],  z <= 1
                    y[s, n, f] <= x[n, f],  y[s, n, f] <= rate * sojourn[s, n]
                    sum_f x[n, f] <= cap[n],  0 <= x <= 1

    whose optimum equals the maximum of
    :py:func:`served_fraction_objective`. Solved with HiGHS.

    :rtype: CodedPlacement
    """
    num_s, num_n, num_f = (inst.scenarios.num_scenarios, inst.num_bs,
                           inst.num_files)
    n_x = num_n * num_f
    reach = np.argwhere(inst.budget > 0)  # (scenario, bs) pairs with a budget
    n_y = len(reach) * num_f
    n_z = num_s * num_f

    objective = np.zeros(n_x + n_y + n_z)
    objective[n_x + n_y:] = -np.outer(inst.weights,
                                      inst.popularity.pmf).ravel()

    files = np.arange(num_f)
    rows, cols, vals = [], [], []
    row = 0
    # y[s, n, f] - x[n, f] <= 0
    for k, (s, n) in enumerate(reach):
        y_cols = n_x + k * num_f + files
        rows.extend([row + files, row + files])
        cols.extend([y_cols, n * num_f + files])
        vals.extend([np.ones(num_f), -np.ones(num_f)])
        row += num_f
    # z[s, f] - sum_n y[s, n, f] <= 0
    for s in range(num_s):
        rows.append(row + files)
        cols.append(n_x + n_y + s * num_f + files)
        vals.append(np.ones(num_f))
        for k in np.flatnonzero(reach[:, 0] == s):
            rows.append(row + files)
            cols.append(n_x + k * num_f + files)
            vals.append(-np.ones(num_f))
        row += num_f
    # sum_f x[n, f] <= cap[n]
    for n in range(num_n):
        rows.append(np.full(num_f, row))
        cols.append(n * num_f + files)
        vals.append(np.ones(num_f))
        row += 1

    a_ub = sparse.coo_matrix((np.concatenate(vals),
                              (np.concatenate(rows), np.concatenate(cols))),
                             shape=(row, len(objective))).tocsr()
    b_ub = np.concatenate([np.zeros(row - num_n), inst.caps.per_node])
    upper = np.concatenate([
        np.ones(n_x),
        np.repeat(np.minimum(inst.budget[reach[:, 0], reach[:, 1]], 1.0),
                  num_f) if len(reach) else np.zeros(0),
        np.ones(n_z)])
    bounds = np.column_stack([np.zeros(len(objective)), upper])

    result = optimize.linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds,
                              method="highs")
    if not result.success:
        raise RuntimeError("coded placement LP failed: %s" % result.message)
    logger.debug("coded placement LP: objective %.9f", -result.fun)
    x = result.x[:n_x].reshape(num_n, num_f)
    return CodedPlacement(_feasible(x, inst), inst.caps)


def _head_files(inst):
    """
    Number of most popular files a failure minimizer has to consider.
    Recovering a file takes stored shares summing to at least 1, so at most
    ``floor(sum(caps))`` files are ever recovered, and moving a recovered
    column onto a more popular unrecovered file never hurts.
    """
    return min(inst.num_files,
               int(math.floor(inst.caps.per_node.sum() + 1e-9)))


def optimize_coded_failure(inst, time_limit_s=MILP_TIME_LIMIT_S):
    """
    Minimizes :py:func:`failure_probability` over coded placements through
    the mixed integer program

        maximize    sum_s w_s sum_f p_f z[s, f]
        subject to  z[s, f] <= sum_n y[s, n, f],  z[s, f] in {0, 1}
                    y[s, n, f] <= x[n, f],  y[s, n, f] <= rate * sojourn[s, n]
                    sum_f x[n, f] <= cap[n],  0 <= x <= 1
                    sum_s w_s z[s, f] >= sum_s w_s z[s, f + 1]

    restricted to the ``floor(sum(caps))`` most popular files (the rest are
    not stored) and to the scenarios able to collect a whole file. The last
    constraint orders the files' recovery weights by popularity, which
    removes symmetric solutions. Solved with HiGHS.

    Every uncoded placement is feasible, so the optimum is never worse than
    the best uncoded placement. A solve stopped by ``time_limit_s`` returns
    the best placement found, with a warning.

    :param BsInstance inst: problem instance
    :param float time_limit_s: HiGHS time limit
    :rtype: CodedPlacement
    """
    num_n = inst.num_bs
    num_m = _head_files(inst)
    full = np.zeros((num_n, inst.num_files))
    budget = np.minimum(inst.budget, 1.0)
    scenarios = np.flatnonzero(budget.sum(axis=1) >= 1 - FAILURE_TOLERANCE)
    if num_m == 0 or not len(scenarios):
        return CodedPlacement(full, inst.caps)

    weights = inst.weights[scenarios]
    budget = budget[scenarios]
    num_s = len(scenarios)
    files = np.arange(num_m)
    reach = np.argwhere(budget > 0)
    n_x = num_n * num_m
    n_y = len(reach) * num_m
    n_z = num_s * num_m
    z0 = n_x + n_y

    objective = np.zeros(n_x + n_y + n_z)
    objective[z0:] = -np.outer(weights, inst.popularity.pmf[:num_m]).ravel()

    rows, cols, vals = [], [], []
    row = 0
    # y[s, n, f] - x[n, f] <= 0
    for k, (s, n) in enumerate(reach):
        rows.extend([row + files, row + files])
        cols.extend([n_x + k * num_m + files, n * num_m + files])
        vals.extend([np.ones(num_m), -np.ones(num_m)])
        row += num_m
    # z[s, f] - sum_n y[s, n, f] <= 0
    for s in range(num_s):
        rows.append(row + files)
        cols.append(z0 + s * num_m + files)
        vals.append(np.ones(num_m))
        for k in np.flatnonzero(reach[:, 0] == s):
            rows.append(row + files)
            cols.append(n_x + k * num_m + files)
            vals.append(-np.ones(num_m))
        row += num_m
    # sum_s w_s (z[s, f + 1] - z[s, f]) <= 0
    z_cols = z0 + np.arange(num_s) * num_m
    for f in range(num_m - 1):
        rows.extend([np.full(num_s, row), np.full(num_s, row)])
        cols.extend([z_cols + f + 1, z_cols + f])
        vals.extend([weights, -weights])
        row += 1
    ordering_end = row
    # sum_f x[n, f] <= cap[n]
    for n in range(num_n):
        rows.append(np.full(num_m, row))
        cols.append(n * num_m + files)
        vals.append(np.ones(num_m))
        row += 1

    a_ub = sparse.coo_matrix((np.concatenate(vals),
                              (np.concatenate(rows), np.concatenate(cols))),
                             shape=(row, len(objective))).tocsr()
    b_ub = np.concatenate([np.zeros(ordering_end), inst.caps.per_node])
    upper = np.concatenate([
        np.ones(n_x),
        np.repeat(budget[reach[:, 0], reach[:, 1]], num_m),
        np.ones(n_z)])
    integrality = np.zeros(len(objective))
    integrality[z0:] = 1

    result = optimize.milp(
        objective,
        constraints=optimize.LinearConstraint(a_ub, -np.inf, b_ub),
        integrality=integrality,
        bounds=optimize.Bounds(np.zeros(len(objective)), upper),
        options={"time_limit": float(time_limit_s)})
    if result.x is None:
        logger.warning("coded placement MILP found no solution: %s",
                       result.message)
        return CodedPlacement(full, inst.caps)
    if result.status != 0:
        logger.warning("coded placement MILP stopped early (%s), gap %s",
                       result.message, getattr(result, "mip_gap", None))
    full[:, :num_m] = result.x[:n_x].reshape(num_n, num_m)
    placement = CodedPlacement(_feasible(full, inst), inst.caps)
    logger.debug("coded placement MILP: %d files, %d scenarios, "
                 "failure %.9f", num_m, num_s,
                 failure_probability(placement, inst))
    return placement


def coded_strategy(inst, iterations=DEFAULT_ITERATIONS, seed=0,
                   solver="milp", incumbents=(),
                   time_limit_s=MILP_TIME_LIMIT_S):
    """
    Coded placement as compared against uncoded strategies.

    ``milp`` minimizes the failure probability exactly with
    :py:func:`optimize_coded_failure`. Its optimum is at most the failure of
    any uncoded placement, so an incumbent from ``incumbents`` (uncoded
    placements of the same instance) only wins when the solve was cut
    short; that incumbent is then returned with a warning.
    ``supergradient`` and ``linprog`` maximize the served fraction and are
    returned as they are.

    :param str solver: ``"milp"``, ``"supergradient"`` or ``"linprog"``
    :param incumbents: uncoded placements of the same instance
    :rtype: CodedPlacement
    """
    if solver == "supergradient":
        return optimize_coded(inst, iterations=iterations, seed=seed)
    if solver == "linprog":
        return optimize_coded_lp(inst)
    if solver != "milp":
        raise InvalidParameter("unknown coded solver %r" % (solver,))
    best = optimize_coded_failure(inst, time_limit_s=time_limit_s)
    best_failure = failure_probability(best, inst)
    for incumbent in incumbents:
        failure = failure_probability(incumbent, inst)
        if failure < best_failure - 1e-12:
            logger.warning("coded solve at failure %.9f beaten by an "
                           "uncoded placement at %.9f", best_failure,
                           failure)
            best = CodedPlacement(incumbent.fractions(), inst.caps)
            best_failure = failure
    return best


def _download_caps(inst):
    # What a full copy at each BS yields per scenario.
    return np.minimum(inst.budget, 1.0)


def _search_space(inst, caps):
    size = 1
    for cap in caps:
        size *= math.comb(inst.num_files, min(cap, inst.num_files))
    return size


def exhaustive_uncoded(inst):
    """
    Enumerates every full uncoded placement and returns the first (in
    lexicographic order of per-BS file sets) minimizing the failure
    probability.

    :rtype: DiscretePlacement
    """
    caps = inst.caps.as_int()
    if _search_space(inst, caps) > MAX_EXACT_PLACEMENTS:
        raise InstanceTooLarge("%d placements exceed the enumeration guard"
                               % _search_space(inst, caps))
    per_bs = [list(itertools.combinations(range(inst.num_files),
                                          min(cap, inst.num_files)))
              for cap in caps]
    best, best_failure = None, None
    for choice in itertools.product(*per_bs):
        placement = DiscretePlacement.from_items(
            inst.num_bs, inst.num_files,
            [(bs, f) for bs, files in enumerate(choice) for f in files])
        failure = failure_probability(placement, inst)
        if best is None or failure < best_failure - 1e-12:
            best, best_failure = placement, failure
    return best


def _branch_and_bound(inst, caps):
    if _search_space(inst, caps) > MAX_EXACT_PLACEMENTS:
        raise InstanceTooLarge("%d placements exceed the exact search guard"
                               % _search_space(inst, caps))
    full = _download_caps(inst)
    # Optimistic completion: every undecided BS caches every file.
    remaining = np.zeros((inst.scenarios.num_scenarios, inst.num_bs + 1))
    remaining[:, :inst.num_bs] = np.cumsum(full[:, ::-1], axis=1)[:, ::-1]
    per_bs = [list(itertools.combinations(range(inst.num_files),
                                          min(cap, inst.num_files)))
              for cap in caps]
    best = {"failure": float("inf"), "choice": None}
    explored = [0]

    def search(bs, collected, chosen):
        explored[0] += 1
        if bs == inst.num_bs:
            failure = _failure_from_collected(collected, inst)
            if failure < best["failure"] - 1e-12:
                best["failure"], best["choice"] = failure, list(chosen)
            return
        for files in per_bs[bs]:
            child = collected.copy()
            child[:, list(files)] += full[:, bs][:, None]
            bound = _failure_from_collected(
                child + remaining[:, bs + 1][:, None], inst)
            if bound >= best["failure"] - 1e-12:
                continue
            chosen.append(files)
            search(bs + 1, child, chosen)
            chosen.pop()

    search(0, np.zeros((inst.scenarios.num_scenarios, inst.num_files)), [])
    logger.debug("branch and bound explored %d nodes, failure %.9f",
                 explored[0], best["failure"])
    return DiscretePlacement.from_items(
        inst.num_bs, inst.num_files,
        [(bs, f) for bs, files in enumerate(best["choice"]) for f in files])


def _local_search(inst, stored):
    full = _download_caps(inst)
    pmf = inst.popularity.pmf
    weights = inst.weights
    stored = stored.copy()
    moves = 0
    while True:
        collected = _collected(stored.astype(float), inst)
        failing = collected < 1 - FAILURE_TOLERANCE
        best_delta, best_move = 1e-12, None
        for bs in range(inst.num_bs):
            here = stored[bs]
            if here.all() or not here.any():
                continue
            added = collected + full[:, bs][:, None] < 1 - FAILURE_TOLERANCE
            removed = collected - full[:, bs][:, None] < \
                1 - FAILURE_TOLERANCE
            gain = weights.dot(failing & ~added) * pmf
            loss = weights.dot(removed & ~failing) * pmf
            f_in = int(np.argmax(np.where(here, -np.inf, gain)))
            f_out = int(np.argmin(np.where(here, loss, np.inf)))
            delta = gain[f_in] - loss[f_out]
            if delta > best_delta:
                best_delta, best_move = delta, (bs, f_out, f_in)
        if best_move is None:
            return stored, moves
        bs, f_out, f_in = best_move
        stored[bs, f_out], stored[bs, f_in] = False, True
        moves += 1


def optimize_uncoded(inst, mode="exact", seed=0, restarts=4):
    """
    Minimizes the failure probability over uncoded placements.

    ``exact`` runs a depth-first branch and bound over per-BS file sets,
    bounding each partial placement by letting every undecided BS cache
    every file; it returns a global minimizer and refuses search spaces
    above ``MAX_EXACT_PLACEMENTS``. ``local_search`` runs steepest-descent
    single-file swaps from the MPC placement and from ``restarts`` random
    full placements drawn from ``seed``, keeping the best.

    :param BsInstance inst: problem instance with integer capacities
    :param str mode: ``"exact"`` or ``"local_search"``
    :rtype: DiscretePlacement
    """
    caps = inst.caps.as_int()
    if mode == "exact":
        return _branch_and_bound(inst, caps)
    if mode != "local_search":
        raise InvalidParameter("unknown uncoded mode %r" % (mode,))

    rng = make_rng(seed)
    starts = [mpc_placement(inst.popularity, inst.caps, inst.num_bs).stored]
    for _ in range(restarts):
        stored = np.zeros((inst.num_bs, inst.num_files), dtype=bool)
        for bs, cap in enumerate(caps):
            stored[bs, rng.choice(inst.num_files, min(cap, inst.num_files),
                                  replace=False)] = True
        starts.append(stored)

    best, best_failure = None, None
    for start in starts:
        stored, moves = _local_search(inst, start)
        placement = DiscretePlacement(stored)
        failure = failure_probability(placement, inst)
        logger.debug("local search: %d swaps, failure %.9f", moves, failure)
        if best is None or failure < best_failure - 1e-12:
            best, best_failure = placement, failure
    check_capacity(best, inst.caps)
    return best
