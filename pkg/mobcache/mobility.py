"""
Module supporting mobility traces and the mobility models estimated from
them.

Two trace kinds are handled:

  * association traces, ``user_id,cell_id,enter_s,exit_s`` lines giving the
    periods each user was served by each cell, and
  * contact traces, ``user_a,user_b,start_s,end_s`` lines giving the
    periods two users were within transmission range of each other.

From these the module estimates a Markov cell transition model with mean
cell sojourn times and a pairwise Poisson contact model, and generates
synthetic traces from either model or from random waypoint walkers.
"""
from __future__ import absolute_import, division, print_function
import collections
import csv
import logging
import math

import numpy as np
import six

from .model import InvalidParameter, make_rng


logger = logging.getLogger(__name__)


# Nominal length given to synthesized contact events.
DEFAULT_CONTACT_LENGTH_S = 1.0

# Mean sojourn reported for cells nobody visited.
DEFAULT_SOJOURN_S = 1.0

TIME_TOLERANCE = 1e-9


class TraceParseError(ValueError):
    """
    Exception class for trace text which is not in the expected format. The
    offending (1-based) line number is kept in ``line``.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = "%s at line %d" % (message, line)
        super(TraceParseError, self).__init__(message)
        self.line = line


class InvalidTrace(ValueError):
    """
    Exception class for traces which cannot be used for an operation, for
    example an estimator given an empty trace.
    """
    pass


Association = collections.namedtuple(
    "Association", ["user_id", "cell_id", "enter_s", "exit_s"])

Contact = collections.namedtuple(
    "Contact", ["user_a", "user_b", "start_s", "end_s"])


def _association_order(record):
    return (record.user_id, record.enter_s, record.exit_s, record.cell_id)


class AssociationTrace(object):
    """
    User-to-cell association records sorted by ``(user_id, enter_s)``.

    :param records: iterable of :py:class:`Association` (or 4-tuples)
    """

    def __init__(self, records=()):
        records = sorted((Association(int(r[0]), int(r[1]), float(r[2]),
                                      float(r[3])) for r in records),
                         key=_association_order)
        previous = None
        for r in records:
            if r.exit_s <= r.enter_s:
                raise InvalidTrace("record %s exits before it enters" % (r,))
            if previous is not None and previous.user_id == r.user_id and \
                    r.enter_s < previous.exit_s - TIME_TOLERANCE:
                raise InvalidTrace("records %s and %s overlap"
                                   % (previous, r))
            previous = r
        self.records = tuple(records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __repr__(self):
        return "AssociationTrace(%d records)" % len(self.records)

    @property
    def users(self):
        return sorted(set(r.user_id for r in self.records))

    @property
    def num_cells(self):
        if not self.records:
            return 0
        return max(r.cell_id for r in self.records) + 1

    @property
    def span(self):
        """
        ``(first enter, last exit)`` over all records.
        """
        if not self.records:
            return (0.0, 0.0)
        return (min(r.enter_s for r in self.records),
                max(r.exit_s for r in self.records))

    def by_user(self):
        """
        Returns an ordered mapping of user id to that user's records.
        """
        grouped = collections.OrderedDict()
        for r in self.records:
            grouped.setdefault(r.user_id, []).append(r)
        return grouped


class ContactTrace(object):
    """
    Pairwise contact records with ``user_a < user_b``, sorted by
    ``start_s``. Overlapping records of the same pair are allowed.

    :param records: iterable of :py:class:`Contact` (or 4-tuples)
    :param int num_users: optional user count, defaults to max id + 1
    """

    def __init__(self, records=(), num_users=None):
        normalized = []
        for r in records:
            a, b, start, end = int(r[0]), int(r[1]), float(r[2]), float(r[3])
            if a == b:
                raise InvalidTrace("self-contact of user %d" % a)
            if end <= start:
                raise InvalidTrace("contact of users %d and %d ends before "
                                   "it starts" % (a, b))
            normalized.append(Contact(min(a, b), max(a, b), start, end))
        normalized.sort(key=lambda c: (c.start_s, c.user_a, c.user_b, c.end_s))
        self.records = tuple(normalized)

        inferred = max([c.user_b for c in self.records] or [-1]) + 1
        if num_users is not None and num_users < inferred:
            raise InvalidTrace("trace mentions user %d but num_users is %d"
                               % (inferred - 1, num_users))
        self.num_users = inferred if num_users is None else int(num_users)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __repr__(self):
        return "ContactTrace(%d records, %d users)" % (len(self.records),
                                                       self.num_users)

    @property
    def span(self):
        if not self.records:
            return (0.0, 0.0)
        return (self.records[0].start_s, max(c.end_s for c in self.records))

    def pair_starts(self):
        """
        Returns a dict mapping ``(user_a, user_b)`` to the sorted array of
        that pair's contact start times.
        """
        starts = collections.defaultdict(list)
        for c in self.records:
            starts[(c.user_a, c.user_b)].append(c.start_s)
        return dict((pair, np.array(times)) for pair, times in starts.items())


class CellTransitionModel(object):
    """
    Markov chain over serving cells with mean cell sojourn times.

    :param transition: N by N row-stochastic matrix
    :param initial: length-N distribution of the first serving cell
    :param mean_sojourn: length-N positive mean sojourn times in seconds
    """

    def __init__(self, transition, initial, mean_sojourn):
        transition = np.array(transition, dtype=float)
        initial = np.array(initial, dtype=float)
        mean_sojourn = np.array(mean_sojourn, dtype=float)
        n = len(initial)
        if transition.shape != (n, n) or mean_sojourn.shape != (n,):
            raise InvalidParameter("transition model dimensions disagree")
        if np.any(transition < 0) or \
                np.any(np.abs(transition.sum(axis=1) - 1) > 1e-9):
            raise InvalidParameter("transition rows must be distributions")
        if np.any(initial < 0) or abs(initial.sum() - 1) > 1e-9:
            raise InvalidParameter("initial must be a distribution")
        if np.any(mean_sojourn <= 0):
            raise InvalidParameter("mean sojourn times must be positive")
        self.transition = transition
        self.initial = initial
        self.mean_sojourn = mean_sojourn
        for array in (self.transition, self.initial, self.mean_sojourn):
            array.setflags(write=False)

    @property
    def num_cells(self):
        return len(self.initial)

    def __repr__(self):
        return "CellTransitionModel(%d cells)" % self.num_cells


class ContactModel(object):
    """
    Pairwise Poisson contact intensities in contacts per second.

    :param rate: K by K symmetric, nonnegative matrix with zero diagonal
    """

    def __init__(self, rate):
        rate = np.array(rate, dtype=float)
        if rate.ndim != 2 or rate.shape[0] != rate.shape[1]:
            raise InvalidParameter("rate must be a square matrix")
        if np.any(rate < 0) or not np.all(np.isfinite(rate)):
            raise InvalidParameter("rates must be finite and nonnegative")
        if not np.array_equal(rate, rate.T):
            raise InvalidParameter("rate matrix must be symmetric")
        if np.any(np.diag(rate) != 0):
            raise InvalidParameter("users cannot contact themselves")
        rate.setflags(write=False)
        self.rate = rate

    @property
    def num_users(self):
        return self.rate.shape[0]

    def scaled(self, factor):
        """
        Returns the model with every intensity multiplied by ``factor``.
        """
        if factor < 0:
            raise InvalidParameter("rate scale must be nonnegative")
        return ContactModel(self.rate * float(factor))

    def __repr__(self):
        return "ContactModel(%d users)" % self.num_users


class PathScenarioSet(object):
    """
    Weighted user paths reduced to per-cell total sojourn times.

    :param sojourn: S by N matrix, row s is scenario s's time in each cell
    :param weights: length-S positive weights summing to 1
    :param visits: optional ordered ``[(cell, seconds), ...]`` per scenario
    """

    def __init__(self, sojourn, weights, visits=None):
        sojourn = np.array(sojourn, dtype=float)
        weights = np.array(weights, dtype=float)
        if sojourn.ndim != 2 or sojourn.shape[0] != len(weights):
            raise InvalidParameter("one weight per scenario required")
        if len(weights) == 0:
            raise InvalidParameter("scenario set is empty")
        if np.any(sojourn < 0):
            raise InvalidParameter("sojourn times must be nonnegative")
        if np.any(weights <= 0) or abs(weights.sum() - 1) > 1e-9:
            raise InvalidParameter("weights must be positive and sum to 1")
        if visits is not None and len(visits) != len(weights):
            raise InvalidParameter("one visit list per scenario required")
        self.sojourn = sojourn
        self.weights = weights
        self.visits = None if visits is None else tuple(
            tuple(v) for v in visits)
        for array in (self.sojourn, self.weights):
            array.setflags(write=False)

    @classmethod
    def from_visits(cls, visit_lists, num_cells):
        """
        Equal-weight scenarios accumulating ordered ``(cell, seconds)``
        visits.
        """
        sojourn = np.zeros((len(visit_lists), num_cells))
        for s, visits in enumerate(visit_lists):
            for cell, seconds in visits:
                sojourn[s, cell] += seconds
        weights = np.full(len(visit_lists), 1.0 / max(len(visit_lists), 1))
        return cls(sojourn, weights, visit_lists)

    @property
    def num_scenarios(self):
        return self.sojourn.shape[0]

    @property
    def num_cells(self):
        return self.sojourn.shape[1]

    def __len__(self):
        return self.num_scenarios

    def __iter__(self):
        return iter(zip(self.sojourn, self.weights))

    def __repr__(self):
        return "PathScenarioSet(%d scenarios, %d cells)" % self.sojourn.shape


def _iter_rows(text, header_fields):
    """
    Iterator yielding ``(line number, fields)`` for the data rows of a
    comma-separated trace, skipping blanks, ``#`` comments and a header
    line (detected by a non-numeric first field on the first data row).
    """
    stream = six.StringIO(text) if isinstance(text, six.string_types) \
        else text
    first = True
    for lineno, line in enumerate(stream, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if first:
            first = False
            if not _is_number(fields[0]):
                continue
        if len(fields) != header_fields:
            raise TraceParseError("expected %d fields, got %d"
                                  % (header_fields, len(fields)), lineno)
        yield lineno, fields


def _is_number(field):
    try:
        float(field)
    except ValueError:
        return False
    return True


def _parse_fields(fields, lineno):
    try:
        ids = int(fields[0]), int(fields[1])
        times = float(fields[2]), float(fields[3])
    except ValueError:
        raise TraceParseError("non-numeric field", lineno)
    if not all(math.isfinite(t) for t in times):
        raise TraceParseError("non-finite time", lineno)
    if ids[0] < 0 or ids[1] < 0:
        raise TraceParseError("negative id", lineno)
    return ids + times


def parse_association_trace(text):
    """
    Parses ``user_id,cell_id,enter_s,exit_s`` lines.

    :param text: trace text or a file-like object yielding lines
    :returns: validated, sorted trace
    :rtype: AssociationTrace
    :raises TraceParseError: naming the first offending line
    """
    rows = []
    for lineno, fields in _iter_rows(text, 4):
        user, cell, enter, exit_ = _parse_fields(fields, lineno)
        if exit_ <= enter:
            raise TraceParseError("exit before enter", lineno)
        rows.append((Association(user, cell, enter, exit_), lineno))

    rows.sort(key=lambda row: _association_order(row[0]))
    for (previous, _), (record, lineno) in zip(rows, rows[1:]):
        if previous.user_id == record.user_id and \
                record.enter_s < previous.exit_s - TIME_TOLERANCE:
            raise TraceParseError("overlapping records for user %d"
                                  % record.user_id, lineno)
    return AssociationTrace(r for r, _ in rows)


def parse_contact_trace(text, num_users=None):
    """
    Parses ``user_a,user_b,start_s,end_s`` lines. Pairs are normalized so
    that ``user_a < user_b``.

    :param text: trace text or a file-like object yielding lines
    :param int num_users: optional user count (for users never in contact)
    :rtype: ContactTrace
    :raises TraceParseError: naming the first offending line
    """
    records = []
    for lineno, fields in _iter_rows(text, 4):
        a, b, start, end = _parse_fields(fields, lineno)
        if a == b:
            raise TraceParseError("self-contact", lineno)
        if end <= start:
            raise TraceParseError("end before start", lineno)
        records.append(Contact(min(a, b), max(a, b), start, end))
    return ContactTrace(records, num_users=num_users)


def format_association_trace(trace):
    """
    Returns the trace as text accepted by :py:func:`parse_association_trace`.
    """
    out = six.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(Association._fields)
    for r in trace:
        writer.writerow([r.user_id, r.cell_id, repr(r.enter_s),
                         repr(r.exit_s)])
    return out.getvalue()


def format_contact_trace(trace):
    """
    Returns the trace as text accepted by :py:func:`parse_contact_trace`.
    """
    out = six.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(Contact._fields)
    for c in trace:
        writer.writerow([c.user_a, c.user_b, repr(c.start_s), repr(c.end_s)])
    return out.getvalue()


def estimate_transition_model(trace, user_filter=None, num_cells=None):
    """
    Estimates the Markov cell transition model of ``trace``.

    Transition probabilities are consecutive-record transition counts over
    departures; cells never departed from get a uniform row. The initial
    distribution is the empirical distribution of each user's first cell
    and mean sojourn times are averaged over visits (1 s for unvisited
    cells).

    :param AssociationTrace trace: training trace
    :param user_filter: optional collection of user ids to estimate from,
                        giving per-user or per-group models
    :param int num_cells: optional number of cells, at least max cell + 1
    :rtype: CellTransitionModel
    """
    grouped = trace.by_user()
    if user_filter is not None:
        wanted = set(user_filter)
        grouped = collections.OrderedDict(
            (u, rs) for u, rs in grouped.items() if u in wanted)
    if not grouped:
        raise InvalidTrace("cannot estimate a transition model from an "
                           "empty trace")

    inferred = max(r.cell_id for rs in grouped.values() for r in rs) + 1
    if num_cells is None:
        num_cells = inferred
    elif num_cells < inferred:
        raise InvalidParameter("trace has %d cells, num_cells is %d"
                               % (inferred, num_cells))

    counts = np.zeros((num_cells, num_cells))
    firsts = np.zeros(num_cells)
    durations = np.zeros(num_cells)
    visits = np.zeros(num_cells)
    for records in grouped.values():
        firsts[records[0].cell_id] += 1
        for r in records:
            durations[r.cell_id] += r.exit_s - r.enter_s
            visits[r.cell_id] += 1
        for before, after in zip(records, records[1:]):
            counts[before.cell_id, after.cell_id] += 1

    departures = counts.sum(axis=1)
    transition = np.full((num_cells, num_cells), 1.0 / num_cells)
    departed = departures > 0
    transition[departed] = counts[departed] / departures[departed, None]

    mean_sojourn = np.full(num_cells, DEFAULT_SOJOURN_S)
    visited = visits > 0
    mean_sojourn[visited] = durations[visited] / visits[visited]

    logger.debug("estimated %d-cell transition model from %d users, "
                 "%d transitions", num_cells, len(grouped),
                 int(departures.sum()))
    return CellTransitionModel(transition, firsts / firsts.sum(),
                               mean_sojourn)


def estimate_contact_model(trace, observation_window_s, num_users=None):
    """
    Estimates pairwise Poisson contact intensities as the number of contact
    events of each pair divided by the observation window.

    :param ContactTrace trace: training trace
    :param float observation_window_s: positive window length in seconds
    :param int num_users: optional user count, defaults to the trace's
    :rtype: ContactModel
    """
    if not observation_window_s > 0:
        raise InvalidParameter("observation window must be positive, got %r"
                               % (observation_window_s,))
    first, last = trace.span
    if trace.records and last - first > observation_window_s:
        logger.warning("contact trace spans %gs, longer than the %gs "
                       "observation window", last - first,
                       observation_window_s)

    if num_users is None:
        num_users = trace.num_users
    rate = np.zeros((num_users, num_users))
    for c in trace:
        rate[c.user_a, c.user_b] += 1
    rate = (rate + rate.T) / float(observation_window_s)
    return ContactModel(rate)


def sample_visits(model, horizon_s, num_paths, rng_seed):
    """
    Samples ``num_paths`` ordered ``[(cell, seconds), ...]`` visit lists
    from ``model``. Sojourns are exponential with the cell's mean and the
    last one is truncated at ``horizon_s``.
    """
    if not horizon_s > 0:
        raise InvalidParameter("horizon must be positive")
    if num_paths < 1:
        raise InvalidParameter("at least one path required")
    rng = make_rng(rng_seed)
    initial_cdf = np.cumsum(model.initial)
    transition_cdf = np.cumsum(model.transition, axis=1)
    last = model.num_cells - 1

    paths = []
    for _ in range(int(num_paths)):
        cell = min(int(np.searchsorted(initial_cdf, rng.random(),
                                       side="right")), last)
        elapsed = 0.0
        visits = []
        while True:
            stay = rng.exponential(model.mean_sojourn[cell])
            if elapsed + stay >= horizon_s:
                visits.append((cell, horizon_s - elapsed))
                break
            visits.append((cell, stay))
            elapsed += stay
            cell = min(int(np.searchsorted(transition_cdf[cell], rng.random(),
                                           side="right")), last)
        paths.append(visits)
    return paths


def sample_paths(model, horizon_s, num_paths, rng_seed):
    """
    Samples equally weighted path scenarios from ``model``. Each scenario
    starts in a cell drawn from ``model.initial`` and alternates exponential
    sojourns with Markov transitions until ``horizon_s``.

    :param CellTransitionModel model: mobility model
    :param float horizon_s: positive path duration
    :param int num_paths: number of scenarios
    :param rng_seed: integer seed or generator
    :rtype: PathScenarioSet
    """
    visits = sample_visits(model, horizon_s, num_paths, rng_seed)
    return PathScenarioSet.from_visits(visits, model.num_cells)


def trace_from_visits(visit_lists, start_s=0.0):
    """
    Lays visit lists end to end as an association trace, one user per list.
    Zero-length visits are dropped.
    """
    records = []
    for user, visits in enumerate(visit_lists):
        clock = start_s
        for cell, seconds in visits:
            if seconds > 0:
                records.append(Association(user, cell, clock,
                                           clock + seconds))
            clock += seconds
    return AssociationTrace(records)


def paths_from_trace(trace, horizon_s, num_cells=None):
    """
    Chops each user's records into consecutive ``horizon_s`` windows
    starting at the user's first record; each nonempty window becomes an
    equally weighted scenario. Records crossing a window boundary are
    split between the windows.

    :param AssociationTrace trace: nonempty trace
    :param float horizon_s: positive window length
    :param int num_cells: optional number of cells, at least max cell + 1
    :rtype: PathScenarioSet
    """
    if not len(trace):
        raise InvalidTrace("cannot build path scenarios from an empty trace")
    if not horizon_s > 0:
        raise InvalidParameter("horizon must be positive")
    if num_cells is None:
        num_cells = trace.num_cells
    elif num_cells < trace.num_cells:
        raise InvalidParameter("trace has %d cells, num_cells is %d"
                               % (trace.num_cells, num_cells))

    windows = []
    for records in trace.by_user().values():
        origin = records[0].enter_s
        per_window = collections.OrderedDict()
        for r in records:
            clock = r.enter_s
            while clock < r.exit_s:
                index = int((clock - origin) // horizon_s)
                boundary = origin + (index + 1) * horizon_s
                if boundary <= clock:
                    index += 1
                    boundary += horizon_s
                end = min(r.exit_s, boundary)
                per_window.setdefault(index, []).append((r.cell_id,
                                                         end - clock))
                clock = end
        windows.extend(per_window.values())
    return PathScenarioSet.from_visits(windows, num_cells)


def sample_contacts(model, duration_s, rng_seed,
                    contact_length_s=DEFAULT_CONTACT_LENGTH_S):
    """
    Samples a contact trace from ``model``: every pair with a positive rate
    gets an independent Poisson process of contact starts over
    ``[0, duration_s)``; each contact lasts ``contact_length_s`` truncated at
    ``duration_s``.

    :param ContactModel model: pairwise intensities
    :param float duration_s: positive trace duration
    :param rng_seed: integer seed or generator
    :rtype: ContactTrace
    """
    if not duration_s > 0:
        raise InvalidParameter("duration must be positive")
    rng = make_rng(rng_seed)
    records = []
    rows, cols = np.triu_indices(model.num_users, k=1)
    for a, b in zip(rows, cols):
        rate = model.rate[a, b]
        if rate <= 0:
            continue
        count = rng.poisson(rate * duration_s)
        starts = np.sort(rng.uniform(0.0, duration_s, count))
        ends = np.minimum(starts + contact_length_s, duration_s)
        records.extend(Contact(int(a), int(b), s, e)
                       for s, e in zip(starts, ends) if e > s)
    return ContactTrace(records, num_users=model.num_users)


def random_transition_model(num_cells, mean_sojourn_s, rng_seed,
                            self_loops=False, concentration=1.0):
    """
    Returns a random cell transition model: rows drawn from a symmetric
    Dirichlet (no self transitions unless ``self_loops``), a uniform initial
    distribution and mean sojourns uniform in
    ``[0.5, 1.5] * mean_sojourn_s``.
    """
    if num_cells < 1 or not mean_sojourn_s > 0:
        raise InvalidParameter("need at least one cell and a positive "
                               "mean sojourn")
    rng = make_rng(rng_seed)
    transition = np.zeros((num_cells, num_cells))
    for cell in range(num_cells):
        if num_cells == 1:
            transition[cell, cell] = 1.0
            continue
        targets = [c for c in range(num_cells) if self_loops or c != cell]
        transition[cell, targets] = rng.dirichlet(
            np.full(len(targets), concentration))
    sojourn = mean_sojourn_s * rng.uniform(0.5, 1.5, num_cells)
    return CellTransitionModel(transition,
                               np.full(num_cells, 1.0 / num_cells), sojourn)


def random_contact_model(num_users, mean_rate, rng_seed):
    """
    Returns pairwise intensities drawn independently from an exponential
    distribution with mean ``mean_rate`` contacts per second.
    """
    if num_users < 1 or mean_rate < 0:
        raise InvalidParameter("need at least one user and a nonnegative "
                               "mean rate")
    rng = make_rng(rng_seed)
    upper = np.triu(rng.exponential(mean_rate, (num_users, num_users)), k=1)
    return ContactModel(upper + upper.T)


def slice_trace(trace, start_s, end_s):
    """
    Restricts a trace to ``[start_s, end_s)``. Association records are
    clipped to the window; contacts are kept when they start inside it and
    clipped at ``end_s``.

    :param trace: :py:class:`AssociationTrace` or :py:class:`ContactTrace`
    """
    if not end_s > start_s:
        raise InvalidParameter("empty time window")
    if isinstance(trace, ContactTrace):
        return ContactTrace(
            [c._replace(end_s=min(c.end_s, end_s)) for c in trace
             if start_s <= c.start_s < end_s],
            num_users=trace.num_users)
    return AssociationTrace(
        r._replace(enter_s=max(r.enter_s, start_s),
                   exit_s=min(r.exit_s, end_s))
        for r in trace if r.exit_s > start_s and r.enter_s < end_s)


def _pair_contacts(trace, user_a, user_b):
    a, b = min(user_a, user_b), max(user_a, user_b)
    return [c for c in trace if c.user_a == a and c.user_b == b]


def inter_contact_times(trace, user_a, user_b):
    """
    Gaps between the end of one contact of a pair and the start of the
    next. Overlapping contacts give a gap of 0.
    """
    contacts = _pair_contacts(trace, user_a, user_b)
    return np.array([max(0.0, after.start_s - before.end_s)
                     for before, after in zip(contacts, contacts[1:])])


def contact_durations(trace, user_a, user_b):
    return np.array([c.end_s - c.start_s
                     for c in _pair_contacts(trace, user_a, user_b)])


def mean_sojourn_by_user(trace):
    """
    Returns ``{user: {cell: mean sojourn seconds}}``.
    """
    result = collections.OrderedDict()
    for user, records in trace.by_user().items():
        totals = collections.defaultdict(list)
        for r in records:
            totals[r.cell_id].append(r.exit_s - r.enter_s)
        result[user] = dict((cell, float(np.mean(d)))
                            for cell, d in sorted(totals.items()))
    return result


def _check_waypoint_args(area_m, speed_mps, pause_s, duration_s, num_users):
    width, height = (float(v) for v in area_m)
    if not (width > 0 and height > 0):
        raise InvalidParameter("area must have positive width and height")
    low, high = speed_mps
    if not (0 < low <= high):
        raise InvalidParameter("speed range needs a positive minimum")
    if not (0 <= pause_s[0] <= pause_s[1]):
        raise InvalidParameter("invalid pause range")
    if not duration_s > 0 or num_users < 1:
        raise InvalidParameter("need a positive duration and users")
    return width, height


def _waypoint_path(rng, width, height, speed_mps, pause_s, duration_s):
    """
    Breakpoints ``(times, xs, ys)`` of one random waypoint walker. The
    walker pauses at its uniformly drawn start, then repeatedly moves in a
    straight line to a uniform waypoint and pauses there. Starting with a
    pause lets a pause range longer than ``duration_s`` model a user who
    stays in one place for the whole walk.
    """
    x, y = rng.uniform(0, width), rng.uniform(0, height)
    times, xs, ys = [0.0], [x], [y]
    clock = 0.0
    while clock < duration_s:
        clock += rng.uniform(*pause_s)
        times.append(clock)
        xs.append(x)
        ys.append(y)
        if clock >= duration_s:
            break
        nx_, ny_ = rng.uniform(0, width), rng.uniform(0, height)
        clock += math.hypot(nx_ - x, ny_ - y) / rng.uniform(*speed_mps)
        x, y = nx_, ny_
        times.append(clock)
        xs.append(x)
        ys.append(y)
    return np.array(times), np.array(xs), np.array(ys)


def _walkers(rng_seed, num_users):
    return [np.random.default_rng(child) for child in
            np.random.SeedSequence(rng_seed).spawn(int(num_users))]


def random_waypoint_trace(area_m, num_cells_xy, speed_mps, pause_s,
                          duration_s, num_users, rng_seed):
    """
    Generates an association trace of random waypoint walkers on a regular
    grid of cells. Each position is served by the nearest cell center, i.e.
    the grid rectangle containing it; cell ids are row-major,
    ``iy * nx + ix``. Cell crossings are computed exactly along each leg.

    :param area_m: ``(width, height)`` in meters
    :param num_cells_xy: ``(nx, ny)`` grid dimensions
    :param speed_mps: ``(min, max)`` speed, positive minimum
    :param pause_s: ``(min, max)`` pause at each waypoint
    :param float duration_s: trace duration
    :param int num_users: number of walkers
    :param int rng_seed: seed; the same seed gives the same walkers as
                         :py:func:`random_waypoint_contacts`
    :rtype: AssociationTrace
    """
    width, height = _check_waypoint_args(area_m, speed_mps, pause_s,
                                         duration_s, num_users)
    nx_, ny_ = (int(v) for v in num_cells_xy)
    if nx_ < 1 or ny_ < 1:
        raise InvalidParameter("grid needs at least one cell")
    cell_w, cell_h = width / nx_, height / ny_

    def cell_of(px, py):
        ix = min(max(int(px // cell_w), 0), nx_ - 1)
        iy = min(max(int(py // cell_h), 0), ny_ - 1)
        return iy * nx_ + ix

    def crossings(p0, p1, size, count):
        # Fractions along the leg where a grid line is crossed.
        lo, hi = sorted((p0, p1))
        if hi == lo:
            return []
        lines = np.arange(math.floor(lo / size) + 1,
                          math.ceil(hi / size)) * size
        lines = lines[(lines > 0) & (lines < count * size)]
        return list((lines - p0) / (p1 - p0))

    records = []
    for user, rng in enumerate(_walkers(rng_seed, num_users)):
        times, xs, ys = _waypoint_path(rng, width, height, speed_mps,
                                       pause_s, duration_s)
        intervals = []
        for k in range(len(times) - 1):
            t0, t1 = times[k], min(times[k + 1], duration_s)
            if t1 <= t0:
                continue
            cuts = sorted(set([0.0, 1.0] +
                              crossings(xs[k], xs[k + 1], cell_w, nx_) +
                              crossings(ys[k], ys[k + 1], cell_h, ny_)))
            span = times[k + 1] - t0
            for u0, u1 in zip(cuts, cuts[1:]):
                mid = (u0 + u1) / 2
                cell = cell_of(xs[k] + (xs[k + 1] - xs[k]) * mid,
                               ys[k] + (ys[k + 1] - ys[k]) * mid)
                start, end = t0 + u0 * span, min(t0 + u1 * span, t1)
                if end <= start:
                    continue
                if intervals and intervals[-1][0] == cell:
                    intervals[-1][2] = end
                else:
                    intervals.append([cell, start, end])
        records.extend(Association(user, cell, start, end)
                       for cell, start, end in intervals)
    logger.debug("random waypoint trace: %d users, %d records", num_users,
                 len(records))
    return AssociationTrace(records)


def random_waypoint_contacts(area_m, speed_mps, pause_s, duration_s,
                             num_users, range_m, rng_seed, step_s=1.0):
    """
    Generates the contact trace of random waypoint walkers: a pair is in
    contact while their distance is at most ``range_m``, checked every
    ``step_s`` seconds.

    :rtype: ContactTrace
    """
    width, height = _check_waypoint_args(area_m, speed_mps, pause_s,
                                         duration_s, num_users)
    if not (range_m > 0 and step_s > 0):
        raise InvalidParameter("range and step must be positive")
    ticks = np.arange(0.0, duration_s, step_s)
    positions = []
    for rng in _walkers(rng_seed, num_users):
        times, xs, ys = _waypoint_path(rng, width, height, speed_mps,
                                       pause_s, duration_s)
        positions.append((np.interp(ticks, times, xs),
                          np.interp(ticks, times, ys)))
    px = np.array([p[0] for p in positions])
    py = np.array([p[1] for p in positions])

    records = []
    for a in range(num_users - 1):
        close = np.hypot(px[a + 1:] - px[a], py[a + 1:] - py[a]) <= range_m
        for offset, row in enumerate(close):
            # Pad so every run of True has a rising and a falling edge.
            edges = np.flatnonzero(np.diff(np.concatenate(
                ([False], row, [False])).astype(int)))
            for begin, finish in zip(edges[::2], edges[1::2]):
                end = min(ticks[finish - 1] + step_s, duration_s)
                records.append(Contact(a, a + 1 + offset, ticks[begin], end))
    return ContactTrace(records, num_users=num_users)
