"""
Module containing cache placement at user terminals (UTs) driven by
pairwise Poisson contact rates.

A user requesting file f is served through device-to-device links when it
caches f itself or when it meets a user caching f within the delay
threshold. Contacts of each pair form independent Poisson processes, so the
wait for the first helper is exponential with the summed helper rates.
"""
from __future__ import absolute_import, division, print_function
import itertools
import logging
import math

import numpy as np

from .model import (DiscretePlacement, InstanceTooLarge, InvalidParameter,
                    check_shape, make_rng, zipf_pmf)


logger = logging.getLogger(__name__)


# Largest search space brute_force_placement will take on.
MAX_BRUTE_FORCE_PLACEMENTS = 10 ** 6


class UtInstance(object):
    """
    User terminal placement problem.

    :param ContactModel contacts: pairwise contact intensities
    :param ZipfPopularity popularity: request law
    :param float delay_threshold_s: longest wait for a D2D helper
    :param Capacities caps: integer capacity per UT
    """

    def __init__(self, contacts, popularity, delay_threshold_s, caps):
        if not delay_threshold_s > 0:
            raise InvalidParameter("delay threshold must be positive, got %r"
                                   % (delay_threshold_s,))
        if len(caps) != contacts.num_users:
            raise InvalidParameter("%d capacities for %d users"
                                   % (len(caps), contacts.num_users))
        self.contacts = contacts
        self.popularity = popularity
        self.delay_threshold_s = float(delay_threshold_s)
        self.caps = caps
        self.int_caps = caps.as_int()

    @property
    def num_users(self):
        return self.contacts.num_users

    @property
    def num_files(self):
        return self.popularity.num_files

    def __repr__(self):
        return "UtInstance(%d users, %d files, threshold %gs)" % (
            self.num_users, self.num_files, self.delay_threshold_s)


def offload_probability(user, f, placement, inst):
    """
    Probability that ``user``'s request for file ``f`` is served within the
    delay threshold: 1 when cached locally, otherwise the probability that
    the first contact with any user caching ``f`` comes within the
    threshold.
    """
    stored = placement.stored
    if stored[user, f]:
        return 1.0
    helpers = stored[:, f].copy()
    helpers[user] = False
    helper_rate = inst.contacts.rate[user, helpers].sum()
    return float(-math.expm1(-inst.delay_threshold_s * helper_rate))


def _offload_matrix(stored, inst):
    helper_rate = inst.contacts.rate.dot(stored.astype(float))
    return np.where(stored, 1.0,
                    -np.expm1(-inst.delay_threshold_s * helper_rate))


def offloading_ratio(placement, inst):
    """
    Expected fraction of requests served from UT caches:
    ``(1/K) sum_i sum_f pmf[f] * offload_probability(i, f)``.

    :param DiscretePlacement placement: UT by file placement
    :param UtInstance inst: problem instance
    :rtype: float
    """
    check_shape(placement, inst.num_users, inst.num_files)
    # Averaging over users first keeps the MPC value independent of K.
    per_file = _offload_matrix(placement.stored, inst).mean(axis=0)
    return float(per_file.dot(inst.popularity.pmf))


def marginal_gain(placement, user, f, inst):
    """
    Increase of :py:func:`offloading_ratio` from caching ``f`` at ``user``,
    computed from scratch.
    """
    return offloading_ratio(placement.with_item(user, f), inst) - \
        offloading_ratio(placement, inst)


class GreedyState(object):
    """
    Incremental marginal gains of the greedy placement.

    With ``miss[i, f]`` the probability that user i's request for f is not
    offloaded (0 when i caches f) and ``reach[i, u] = 1 - exp(-tau r[i, u])``,
    caching f at u gains

        pmf[f] / K * (miss[u, f] + sum_i reach[i, u] * miss[i, f]).

    The sum (``spill``) is set up in O(K^2 F); caching f only changes column
    f, which is refreshed in O(K^2).
    """

    def __init__(self, inst):
        self.inst = inst
        num_users, num_files = inst.num_users, inst.num_files
        self.stored = np.zeros((num_users, num_files), dtype=bool)
        self.residual = inst.int_caps.copy()
        self.helper_rate = np.zeros((num_users, num_files))
        self.reach = -np.expm1(-inst.delay_threshold_s * inst.contacts.rate)
        self.miss = np.ones((num_users, num_files))
        self.spill = self.reach.T.dot(self.miss)

    def gains(self):
        """
        Returns the K by F matrix of marginal gains, ``-inf`` for elements
        already cached or at users without residual capacity.
        """
        inst = self.inst
        gains = (self.miss + self.spill) * \
            (inst.popularity.pmf / inst.num_users)[None, :]
        blocked = self.stored | (self.residual <= 0)[:, None]
        return np.where(blocked, -np.inf, gains)

    def add(self, user, f):
        if self.stored[user, f] or self.residual[user] <= 0:
            raise InvalidParameter("user %d cannot cache file %d"
                                   % (user, f))
        self.stored[user, f] = True
        self.residual[user] -= 1
        self.helper_rate[:, f] += self.inst.contacts.rate[:, user]
        self.miss[:, f] = np.where(
            self.stored[:, f], 0.0,
            np.exp(-self.inst.delay_threshold_s * self.helper_rate[:, f]))
        self.spill[:, f] = self.reach.T.dot(self.miss[:, f])

    def placement(self):
        return DiscretePlacement(self.stored.copy())


def greedy_placement(inst):
    """
    Greedy maximization of :py:func:`offloading_ratio` over the per-UT
    capacity (partition) matroid: starting empty, repeatedly caches the
    ``(user, file)`` element with the largest marginal gain, ties going to
    the lower user then the lower file, until capacity runs out or no
    element gains anything.

    :param UtInstance inst: problem instance
    :rtype: DiscretePlacement
    """
    state = GreedyState(inst)
    steps = 0
    while True:
        gains = state.gains()
        best = int(np.argmax(gains))
        user, f = divmod(best, inst.num_files)
        if not gains[user, f] > 0:
            break
        state.add(user, f)
        steps += 1
    logger.debug("greedy placement: %d elements", steps)
    return state.placement()


def random_zipf_placement(inst, gamma_c, seed):
    """
    Random caching baseline: each UT independently caches ``caps[i]``
    distinct files drawn one after another without replacement from
    Zipf(``gamma_c``).

    Successive sampling is done with Gumbel top-k keys on log
    probabilities, which is equivalent and stays exact for skews where the
    probabilities underflow.

    :rtype: DiscretePlacement
    """
    caps = inst.int_caps
    if np.any(caps > inst.num_files):
        raise InvalidParameter("a UT cannot cache more than %d distinct files"
                               % inst.num_files)
    log_pmf = zipf_pmf(inst.num_files, gamma_c).log_pmf()
    rng = make_rng(seed)
    keys = log_pmf[None, :] + rng.gumbel(size=(inst.num_users,
                                               inst.num_files))
    order = np.argsort(-keys, axis=1, kind="stable")
    stored = np.zeros((inst.num_users, inst.num_files), dtype=bool)
    for user, cap in enumerate(caps):
        stored[user, order[user, :cap]] = True
    return DiscretePlacement(stored)


def line_search_gamma(inst, grid, trials, seed):
    """
    Picks the random caching skew maximizing the expected offloading ratio.
    Each grid value is scored by the mean ratio of ``trials`` random
    placements; trial t uses the same random stream for every grid value.

    :returns: ``(gamma_c, mean ratio)``, ties going to the smaller gamma
    """
    grid = sorted(float(g) for g in grid)
    if not grid:
        raise InvalidParameter("gamma grid is empty")
    if trials < 1:
        raise InvalidParameter("at least one trial required")
    streams = np.random.SeedSequence(seed).spawn(int(trials))

    best_gamma, best_mean = None, None
    for gamma in grid:
        mean = float(np.mean([
            offloading_ratio(random_zipf_placement(inst, gamma, stream), inst)
            for stream in streams]))
        logger.debug("random caching gamma_c=%g: mean ratio %.6f", gamma,
                     mean)
        if best_mean is None or mean > best_mean:
            best_gamma, best_mean = gamma, mean
    return best_gamma, best_mean


def brute_force_placement(inst):
    """
    Exhaustive maximizer of :py:func:`offloading_ratio`; the first in
    lexicographic order among ties.

    :raises InstanceTooLarge: beyond ``MAX_BRUTE_FORCE_PLACEMENTS``
    """
    per_user = [list(itertools.combinations(range(inst.num_files),
                                            min(cap, inst.num_files)))
                for cap in inst.int_caps]
    size = 1
    for choices in per_user:
        size *= len(choices)
    if size > MAX_BRUTE_FORCE_PLACEMENTS:
        raise InstanceTooLarge("%d placements exceed the brute force guard"
                               % size)

    best, best_ratio = None, None
    for choice in itertools.product(*per_user):
        stored = np.zeros((inst.num_users, inst.num_files), dtype=bool)
        for user, files in enumerate(choice):
            stored[user, list(files)] = True
        placement = DiscretePlacement(stored)
        ratio = offloading_ratio(placement, inst)
        if best is None or ratio > best_ratio:
            best, best_ratio = placement, ratio
    return best
