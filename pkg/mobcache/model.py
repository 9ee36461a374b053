"""
Module containing the core domain types shared by base station and user
terminal caching: the file library's Zipf popularity, node capacities,
coded and uncoded placements, and the most-popular-content baseline.

File sizes are normalized to 1, so capacities are counted in files. File
index 0 is the most popular file (Zipf rank 1).
"""
from __future__ import absolute_import, division, print_function
import math
import numbers

import numpy as np


# Slack allowed on "sum of stored fractions <= capacity".
CAPACITY_TOLERANCE = 1e-9


class InvalidParameter(ValueError):
    """
    Exception class for parameters outside of an operation's domain, and for
    placements whose dimensions do not match the instance they are used with.
    """
    pass


class InstanceTooLarge(ValueError):
    """
    Exception class for instances whose search space exceeds a solver's
    guard.
    """
    pass


def make_rng(seed):
    """
    Returns a :py:class:`numpy.random.Generator` for the passed seed.

    Integers, sequences of integers and :py:class:`numpy.random.SeedSequence`
    objects are seeded deterministically. An existing generator is returned
    as is so callers can thread one stream through several draws.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _frozen(array):
    array.setflags(write=False)
    return array


class ZipfPopularity(object):
    """
    File request probability law. ``pmf[f]`` is proportional to
    ``(f + 1) ** -gamma``.

    Instances are immutable; build them with :py:func:`zipf_pmf`.
    """

    def __init__(self, num_files, gamma, pmf):
        self.num_files = num_files
        self.gamma = gamma
        self.pmf = _frozen(np.array(pmf, dtype=float))
        self.cdf = _frozen(np.cumsum(self.pmf))

    def __repr__(self):
        return "ZipfPopularity(num_files=%d, gamma=%g)" % (self.num_files,
                                                           self.gamma)

    def log_pmf(self):
        """
        Log probabilities computed from ranks directly, which stay finite
        for skews where ``pmf`` underflows to zero.
        """
        ranks = np.arange(1, self.num_files + 1, dtype=float)
        logits = -self.gamma * np.log(ranks)
        top = logits.max()
        return logits - (top + math.log(np.exp(logits - top).sum()))


def zipf_pmf(num_files, gamma):
    """
    Returns the Zipf popularity of a library of ``num_files`` files.

    :param int num_files: library size F, at least 1
    :param float gamma: nonnegative, finite skew exponent
    :returns: normalized popularity
    :rtype: ZipfPopularity
    """
    if not isinstance(num_files, numbers.Integral) or num_files < 1:
        raise InvalidParameter("num_files must be a positive integer, got %r"
                               % (num_files,))
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0:
        raise InvalidParameter("gamma must be finite and nonnegative, got %r"
                               % (gamma,))

    weights = np.arange(1, num_files + 1, dtype=float) ** -gamma
    return ZipfPopularity(int(num_files), gamma, weights / weights.sum())


def head_mass(pop, capacity):
    """
    Probability mass of the ``capacity`` most popular files.
    """
    return float(pop.pmf[:int(capacity)].sum())


def sample_request(pop, rng_seed):
    """
    Draws one requested file index from ``pop``.

    :param ZipfPopularity pop: request law
    :param rng_seed: integer seed or :py:class:`numpy.random.Generator`
    :returns: file index
    :rtype: int
    """
    return int(sample_requests(pop, 1, make_rng(rng_seed))[0])


def sample_requests(pop, size, rng):
    """
    Draws ``size`` independent requests by inverting the popularity CDF.
    """
    draws = make_rng(rng).random(size)
    index = np.searchsorted(pop.cdf, draws, side="right")
    # Rounding can leave cdf[-1] a hair under 1.
    return np.minimum(index, pop.num_files - 1)


class Capacities(object):
    """
    Per-node cache capacity in units of whole files.
    """

    def __init__(self, per_node):
        per_node = np.array(per_node, dtype=float).reshape(-1)
        if not np.all(np.isfinite(per_node)) or np.any(per_node < 0):
            raise InvalidParameter("capacities must be finite and "
                                   "nonnegative, got %s" % per_node)
        self.per_node = _frozen(per_node)

    @classmethod
    def uniform(cls, capacity, num_nodes):
        return cls(np.full(int(num_nodes), float(capacity)))

    def __len__(self):
        return len(self.per_node)

    def __repr__(self):
        return "Capacities(%s)" % self.per_node.tolist()

    @property
    def is_integral(self):
        return bool(np.all(self.per_node == np.floor(self.per_node)))

    def as_int(self):
        """
        Returns the capacities as integers, refusing fractional values.
        """
        if not self.is_integral:
            raise InvalidParameter("integer capacities required, got %s"
                                   % self.per_node.tolist())
        return self.per_node.astype(int)


class CodedPlacement(object):
    """
    Fractional placement under fountain coding: ``x[n][f]`` is the share of
    file f's coded symbols stored at node n.

    :param x: N by F array of fractions in [0, 1]
    :param Capacities caps: optional capacities to validate against
    """

    def __init__(self, x, caps=None):
        x = np.array(x, dtype=float)
        if x.ndim != 2:
            raise InvalidParameter("placement must be a node by file matrix")
        if np.any(x < -CAPACITY_TOLERANCE) or \
                np.any(x > 1 + CAPACITY_TOLERANCE):
            raise InvalidParameter("stored fractions must lie in [0, 1]")
        self.x = _frozen(np.clip(x, 0.0, 1.0))
        if caps is not None:
            check_capacity(self, caps)

    @classmethod
    def from_discrete(cls, placement):
        return cls(placement.fractions())

    @property
    def num_nodes(self):
        return self.x.shape[0]

    @property
    def num_files(self):
        return self.x.shape[1]

    def fractions(self):
        return self.x

    def __repr__(self):
        return "CodedPlacement(%d nodes, %d files)" % self.x.shape


class DiscretePlacement(object):
    """
    Uncoded placement: ``stored[n][f]`` is True when node n holds all of
    file f.

    :param stored: N by F boolean array
    :param Capacities caps: optional capacities to validate against
    """

    def __init__(self, stored, caps=None):
        stored = np.array(stored, dtype=bool)
        if stored.ndim != 2:
            raise InvalidParameter("placement must be a node by file matrix")
        self.stored = _frozen(stored)
        if caps is not None:
            check_capacity(self, caps)

    @classmethod
    def empty(cls, num_nodes, num_files):
        return cls(np.zeros((num_nodes, num_files), dtype=bool))

    @classmethod
    def from_items(cls, num_nodes, num_files, items):
        """
        Builds a placement from ``(node, file)`` pairs.
        """
        stored = np.zeros((num_nodes, num_files), dtype=bool)
        for node, f in items:
            stored[node, f] = True
        return cls(stored)

    @property
    def num_nodes(self):
        return self.stored.shape[0]

    @property
    def num_files(self):
        return self.stored.shape[1]

    def fractions(self):
        return self.stored.astype(float)

    def items(self):
        """
        Returns the stored ``(node, file)`` pairs in row-major order.
        """
        return [tuple(int(i) for i in pair)
                for pair in np.argwhere(self.stored)]

    def with_item(self, node, f):
        stored = self.stored.copy()
        stored[node, f] = True
        return DiscretePlacement(stored)

    def __eq__(self, other):
        return isinstance(other, DiscretePlacement) and \
            np.array_equal(self.stored, other.stored)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.stored.tobytes())

    def __repr__(self):
        return "DiscretePlacement(%s)" % self.items()


def check_shape(placement, num_nodes, num_files):
    """
    Raises :py:class:`InvalidParameter` unless ``placement`` is
    ``num_nodes`` by ``num_files``.
    """
    shape = (placement.num_nodes, placement.num_files)
    if shape != (num_nodes, num_files):
        raise InvalidParameter("placement is %dx%d, instance expects %dx%d"
                               % (shape + (num_nodes, num_files)))


def check_capacity(placement, caps):
    """
    Raises :py:class:`InvalidParameter` if any node stores more than its
    capacity.
    """
    if len(caps) != placement.num_nodes:
        raise InvalidParameter("%d capacities for %d nodes"
                               % (len(caps), placement.num_nodes))
    load = placement.fractions().sum(axis=1)
    over = np.flatnonzero(load > caps.per_node + CAPACITY_TOLERANCE)
    if len(over):
        node = over[0]
        raise InvalidParameter("node %d stores %g files, capacity %g"
                               % (node, load[node], caps.per_node[node]))


def mpc_placement(pop, caps, num_nodes):
    """
    Most-popular-content baseline: every node stores its top
    ``caps[n]`` files, ties going to the lower file index.

    :param ZipfPopularity pop: request law
    :param Capacities caps: integer capacities, one per node
    :param int num_nodes: number of nodes N
    :rtype: DiscretePlacement
    """
    if len(caps) != num_nodes:
        raise InvalidParameter("%d capacities for %d nodes"
                               % (len(caps), num_nodes))
    per_node = caps.as_int()
    ranking = np.argsort(-pop.pmf, kind="stable")
    stored = np.zeros((num_nodes, pop.num_files), dtype=bool)
    for node, capacity in enumerate(per_node):
        stored[node, ranking[:min(capacity, pop.num_files)]] = True
    return DiscretePlacement(stored)
