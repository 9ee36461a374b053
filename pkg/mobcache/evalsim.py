"""
Module containing Monte Carlo replay of placements against mobility, used
to check the analytic metrics of :py:mod:`mobcache.bs_place` and
:py:mod:`mobcache.ut_place`.

Trials run in blocks of ``TRIAL_BLOCK``; block b draws from a generator
seeded with ``(seed, b)``, so results do not depend on how blocks are
scheduled.
"""
from __future__ import absolute_import, division, print_function
import collections
import logging
import math

import numpy as np

from .bs_place import FAILURE_TOLERANCE, BsInstance, failure_probability
from .mobility import AssociationTrace, ContactModel, ContactTrace, \
    paths_from_trace
from .model import Capacities, sample_requests
from .ut_place import UtInstance, offloading_ratio


logger = logging.getLogger(__name__)


TRIAL_BLOCK = 4096


class ReplayError(ValueError):
    """
    Exception class for replay inputs which do not fit together.
    """
    pass


ReplayReport = collections.namedtuple(
    "ReplayReport", ["metric_name", "analytic_value", "empirical_value",
                     "trials", "std_error", "seed"])


def _trial_blocks(trials, seed):
    """
    Iterator yielding ``(block size, generator)`` covering ``trials``.
    """
    for block, start in enumerate(range(0, trials, TRIAL_BLOCK)):
        yield (min(TRIAL_BLOCK, trials - start),
               np.random.default_rng([seed, block]))


def _report(metric, analytic, hits, trials, seed):
    frequency = hits / trials
    return ReplayReport(metric, analytic, frequency, trials,
                        math.sqrt(frequency * (1 - frequency) / trials), seed)


def _sequential_collected(visits, fractions, rate):
    """
    Fraction of every file collected walking ``visits`` in order, each
    visit downloading what is left of the share at that BS up to
    ``rate * seconds``.
    """
    got = np.zeros_like(fractions)
    for bs, seconds in visits:
        got[bs] += np.minimum(fractions[bs] - got[bs], rate * seconds)
    return got.sum(axis=0)


def simulate_bs_replay(trace_or_paths, placement, pop, rate, trials, seed,
                       horizon_s=None):
    """
    Replays BS downloads: each trial samples a scenario (by weight) and a
    request, walks the scenario's ordered visits downloading from each BS,
    and fails when less than the whole file was collected.

    :param trace_or_paths: :py:class:`AssociationTrace` (chopped into
                           ``horizon_s`` windows) or
                           :py:class:`PathScenarioSet`; scenario sets
                           without ordered visits are walked in cell order
    :param placement: coded or discrete BS placement
    :param ZipfPopularity pop: request law
    :param float rate: downlink rate in files per second
    :param int trials: number of requests to replay
    :param int seed: seed of the trial streams
    :returns: empirical failure frequency and the analytic failure
              probability of the same scenario set
    :rtype: ReplayReport
    """
    if trials < 1:
        raise ReplayError("at least one trial required")
    if isinstance(trace_or_paths, AssociationTrace):
        if horizon_s is None:
            raise ReplayError("replaying a trace needs horizon_s")
        if trace_or_paths.num_cells > placement.num_nodes:
            raise ReplayError("trace visits %d cells, placement has %d BSs"
                              % (trace_or_paths.num_cells,
                                 placement.num_nodes))
        paths = paths_from_trace(trace_or_paths, horizon_s,
                                 num_cells=placement.num_nodes)
    else:
        paths = trace_or_paths
    if paths.num_cells != placement.num_nodes or \
            placement.num_files != pop.num_files:
        raise ReplayError("placement is %dx%d for %d cells and %d files"
                          % (placement.num_nodes, placement.num_files,
                             paths.num_cells, pop.num_files))

    if paths.visits is not None:
        visits = paths.visits
    else:
        visits = [[(bs, t) for bs, t in enumerate(row) if t > 0]
                  for row in paths.sojourn]
    fractions = placement.fractions()
    collected = {}
    weight_cdf = np.cumsum(paths.weights)

    failures = 0
    for size, rng in _trial_blocks(trials, seed):
        scenarios = np.minimum(
            np.searchsorted(weight_cdf, rng.random(size), side="right"),
            paths.num_scenarios - 1)
        files = sample_requests(pop, size, rng)
        for s in np.unique(scenarios):
            if s not in collected:
                collected[s] = _sequential_collected(visits[s], fractions,
                                                     rate)
        got = np.array([collected[s][f] for s, f in zip(scenarios, files)])
        failures += int(np.count_nonzero(got < 1 - FAILURE_TOLERANCE))

    inst = BsInstance(paths, pop, rate, Capacities(fractions.sum(axis=1)))
    report = _report("failure_prob", failure_probability(placement, inst),
                     failures, trials, seed)
    logger.debug("BS replay: %s", report)
    return report


def simulate_ut_replay(contacts, placement, pop, delay_threshold_s, trials,
                       seed):
    """
    Replays UT requests: each trial samples a requesting user, a request
    time and a file; the request is served when the user caches the file
    or a user caching it is met within ``delay_threshold_s``.

    With a :py:class:`ContactModel` the contacts after the request are
    synthesized per trial (first contact with each helper is exponential
    with the pair's rate) and the analytic offloading ratio is reported
    alongside. With a :py:class:`ContactTrace` request times are uniform
    over the trace span less the threshold, delays are measured to the next
    contact start in the trace, and no analytic value is reported.

    :rtype: ReplayReport
    """
    if trials < 1:
        raise ReplayError("at least one trial required")
    if not delay_threshold_s > 0:
        raise ReplayError("delay threshold must be positive")
    if placement.num_files != pop.num_files:
        raise ReplayError("placement has %d files, popularity %d"
                          % (placement.num_files, pop.num_files))
    if isinstance(contacts, ContactModel):
        return _replay_contact_model(contacts, placement, pop,
                                     delay_threshold_s, trials, seed)
    if isinstance(contacts, ContactTrace):
        return _replay_contact_trace(contacts, placement, pop,
                                     delay_threshold_s, trials, seed)
    raise ReplayError("cannot replay contacts of type %s"
                      % type(contacts).__name__)


def _replay_contact_model(model, placement, pop, delay_threshold_s, trials,
                          seed):
    if model.num_users != placement.num_nodes:
        raise ReplayError("%d users in the contact model, %d in the "
                          "placement" % (model.num_users,
                                         placement.num_nodes))
    stored = placement.stored
    served = 0
    for size, rng in _trial_blocks(trials, seed):
        users = rng.integers(model.num_users, size=size)
        files = sample_requests(pop, size, rng)
        rates = model.rate[users] * stored[:, files].T
        arrivals = rng.exponential(1.0, size=rates.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            waits = np.where(rates > 0, arrivals / rates, np.inf)
        delay = waits.min(axis=1)
        served += int(np.count_nonzero(stored[users, files] |
                                       (delay <= delay_threshold_s)))

    inst = UtInstance(model, pop, delay_threshold_s,
                      Capacities(stored.sum(axis=1)))
    report = _report("offloading_ratio", offloading_ratio(placement, inst),
                     served, trials, seed)
    logger.debug("UT replay on contact model: %s", report)
    return report


def _replay_contact_trace(trace, placement, pop, delay_threshold_s, trials,
                          seed):
    if trace.num_users > placement.num_nodes:
        raise ReplayError("trace has %d users, placement %d"
                          % (trace.num_users, placement.num_nodes))
    first, last = trace.span
    if last - first < delay_threshold_s:
        raise ReplayError("trace spans %gs, shorter than the %gs delay "
                          "threshold" % (last - first, delay_threshold_s))

    partners = collections.defaultdict(dict)
    for (a, b), starts in trace.pair_starts().items():
        partners[a][b] = starts
        partners[b][a] = starts
    stored = placement.stored
    helpers = [np.flatnonzero(stored[:, f]) for f in range(pop.num_files)]

    served = 0
    for size, rng in _trial_blocks(trials, seed):
        users = rng.integers(placement.num_nodes, size=size)
        times = rng.uniform(first, last - delay_threshold_s, size)
        files = sample_requests(pop, size, rng)
        for user, now, f in zip(users, times, files):
            if stored[user, f]:
                served += 1
                continue
            met = partners.get(user, {})
            delay = np.inf
            for helper in helpers[f]:
                starts = met.get(helper)
                if starts is None:
                    continue
                k = np.searchsorted(starts, now, side="left")
                if k < len(starts):
                    delay = min(delay, starts[k] - now)
            if delay <= delay_threshold_s:
                served += 1

    report = _report("offloading_ratio", None, served, trials, seed)
    logger.debug("UT replay on contact trace: %s", report)
    return report
