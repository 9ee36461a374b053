"""
Module containing the experiment runner: strategy sweeps over a parameter
grid, the CSV result table and its SVG line charts.
"""
from __future__ import absolute_import, division, print_function
import collections
import csv
import io
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
import numpy as np
import six

from . import bs_place, ut_place
from .config import ConfigError
from .evalsim import simulate_bs_replay, simulate_ut_replay
from .ingest import load_association_trace, load_contact_trace
from .mobility import (ContactTrace, TraceParseError,
                       estimate_contact_model, paths_from_trace,
                       random_contact_model, random_transition_model,
                       random_waypoint_contacts, random_waypoint_trace,
                       sample_paths, slice_trace)
from .model import Capacities, InstanceTooLarge, mpc_placement, zipf_pmf


logger = logging.getLogger(__name__)


ResultRow = collections.namedtuple(
    "ResultRow", ["grid_param", "grid_value", "strategy", "metric", "value",
                  "std_error", "seed"])

CSV_HEADER = ResultRow._fields

METRICS = {
    "bs": ("failure_prob", "served_fraction"),
    "ut": ("offloading_ratio",),
}

REPLAY_METRICS = {"bs": "failure_prob_replay", "ut": "offloading_ratio_replay"}


def metric_names(config):
    """
    Metrics reported per strategy for ``config``, in row order.
    """
    names = list(METRICS[config.kind])
    if config.trials > 0:
        names.append(REPLAY_METRICS[config.kind])
    return names


def _format_float(value):
    return "%.9g" % value


def _seeds(seed):
    """
    Independent child seeds for the mobility model, the sampled paths or
    contacts, the solvers and the replay.
    """
    return [int(s.generate_state(1)[0])
            for s in np.random.SeedSequence(seed).spawn(4)]


def _load(field, loader, path):
    try:
        trace = loader(path)
    except (IOError, TraceParseError) as e:
        raise ConfigError(field, str(e))
    if not len(trace):
        raise ConfigError(field, "%s holds no records" % path)
    return trace


def _halves(trace):
    first, last = trace.span
    middle = first + (last - first) / 2.0
    return slice_trace(trace, first, middle), \
        slice_trace(trace, middle, last + 1.0)


def _bs_setup(config, grid_value, seed):
    """
    Returns ``(training instance, evaluation instance)`` of one replicate.
    """
    s = config.bs
    grid_param = config.grid_param
    gamma = grid_value if grid_param == "gamma" else s.gamma
    rate = grid_value if grid_param == "rate" else s.rate
    capacity = grid_value if grid_param == "capacity" else s.capacity
    pop = zipf_pmf(s.num_files, gamma)
    caps = Capacities.uniform(capacity, s.num_bs)
    model_seed, path_seed, _, _ = _seeds(seed)

    if s.source == "markov":
        model = random_transition_model(s.num_bs, s.mean_sojourn_s,
                                        model_seed)
        paths = sample_paths(model, s.horizon_s, s.num_paths, path_seed)
        inst = bs_place.BsInstance(paths, pop, rate, caps)
        return inst, inst

    if s.source == "trace":
        trace = _load("bs.association_trace", load_association_trace,
                      s.association_trace)
    else:
        trace = random_waypoint_trace(
            s.area_m, tuple(int(c) for c in s.grid_xy), s.speed_mps,
            s.pause_s, s.duration_s, s.num_walkers, model_seed)
    if trace.num_cells > s.num_bs:
        raise ConfigError("bs.num_bs", "trace visits %d cells"
                          % trace.num_cells)
    if s.trace_mode == "split":
        train, evaluate = _halves(trace)
    else:
        train = evaluate = trace
    insts = [bs_place.BsInstance(
        paths_from_trace(t, s.horizon_s, num_cells=s.num_bs), pop, rate,
        caps) for t in (train, evaluate)]
    return insts[0], insts[1]


def bs_placements(config, inst, seed):
    """
    Computes the placement of every BS strategy in ``config.strategies``.
    The failure minimizing coded solve falls back on the MPC and uncoded
    placements only when it is cut short.

    :returns: ordered ``{strategy: placement}``
    """
    s = config.bs
    placements = collections.OrderedDict()
    incumbents = []
    if inst.caps.is_integral:
        mpc = mpc_placement(inst.popularity, inst.caps, inst.num_bs)
        incumbents.append(mpc)
        if "mpc" in config.strategies:
            placements["mpc"] = mpc
    for strategy, mode in (("uncoded_local", "local_search"),
                           ("uncoded_exact", "exact")):
        if strategy not in config.strategies:
            continue
        try:
            placement = bs_place.optimize_uncoded(inst, mode=mode, seed=seed,
                                                  restarts=s.restarts)
        except InstanceTooLarge as e:
            raise ConfigError("experiment.strategies", "%s: %s"
                              % (strategy, e))
        placements[strategy] = placement
        incumbents.append(placement)
    if "coded" in config.strategies:
        placements["coded"] = bs_place.coded_strategy(
            inst, iterations=s.coded_iterations, seed=seed,
            solver=s.coded_solver, incumbents=incumbents,
            time_limit_s=s.milp_time_limit_s)
    if "coded_lp" in config.strategies:
        placements["coded_lp"] = bs_place.optimize_coded_lp(inst)
    return placements


def _bs_replicate(config, grid_value, seed):
    train, evaluate = _bs_setup(config, grid_value, seed)
    _, _, solver_seed, replay_seed = _seeds(seed)
    results = {}
    for strategy, placement in bs_placements(config, train,
                                             solver_seed).items():
        metrics = {
            "failure_prob": (bs_place.failure_probability(placement,
                                                          evaluate), None),
            "served_fraction": (bs_place.served_fraction_objective(
                placement, evaluate), None),
        }
        if config.trials > 0:
            report = simulate_bs_replay(evaluate.scenarios, placement,
                                        evaluate.popularity, evaluate.rate,
                                        config.trials, replay_seed)
            metrics["failure_prob_replay"] = (report.empirical_value,
                                              report.std_error)
        results[strategy] = metrics
    return results


def _ut_setup(config, grid_value, seed):
    """
    Returns ``(instance, replay target)`` of one replicate. The replay
    target is the contact model itself for Poisson contacts, and the second
    half of the trace otherwise (the model is estimated from the first).
    """
    s = config.ut
    grid_param = config.grid_param
    gamma = grid_value if grid_param == "gamma" else s.gamma
    num_users = int(grid_value) if grid_param == "num_users" else s.num_users
    rate_scale = grid_value if grid_param == "rate_scale" else s.rate_scale
    threshold = grid_value if grid_param == "delay_threshold" \
        else s.delay_threshold_s
    capacity = int(grid_value) if grid_param == "capacity" else s.capacity
    pop = zipf_pmf(s.num_files, gamma)
    model_seed, contact_seed, _, _ = _seeds(seed)

    if s.source == "poisson":
        contacts = random_contact_model(num_users, s.mean_rate,
                                        model_seed).scaled(rate_scale)
        target = contacts
    else:
        if s.source == "trace":
            trace = _load("ut.contact_trace", load_contact_trace,
                          s.contact_trace)
        else:
            trace = random_waypoint_contacts(
                s.area_m, s.speed_mps, s.pause_s, s.duration_s, num_users,
                s.range_m, contact_seed, step_s=s.step_s)
        if trace.num_users > num_users:
            raise ConfigError("ut.num_users", "trace has %d users"
                              % trace.num_users)
        trace = ContactTrace(trace.records, num_users=num_users)
        train, target = _halves(trace)
        first, last = train.span
        window = s.observation_window_s or (last - first) or 1.0
        contacts = estimate_contact_model(train, window,
                                          num_users=num_users) \
            .scaled(rate_scale)
    inst = ut_place.UtInstance(contacts, pop, threshold,
                               Capacities.uniform(capacity, num_users))
    return inst, target


def ut_placement(config, inst, strategy, seed):
    """
    Computes one UT strategy's placement.

    :returns: ``(placement, expected offloading ratio)``; random caching is
              scored by its mean ratio over the line search's placements
    """
    if strategy == "greedy":
        placement = ut_place.greedy_placement(inst)
    elif strategy == "mpc":
        placement = mpc_placement(inst.popularity, inst.caps, inst.num_users)
    elif strategy == "random_zipf":
        gamma_c, expected = ut_place.line_search_gamma(
            inst, config.ut.gamma_c_grid, config.ut.line_search_trials, seed)
        logger.debug("random caching skew %g", gamma_c)
        return ut_place.random_zipf_placement(inst, gamma_c, seed), expected
    else:
        raise ConfigError("experiment.strategies", "unknown UT strategy %r"
                          % strategy)
    return placement, ut_place.offloading_ratio(placement, inst)


def _ut_replicate(config, grid_value, seed):
    inst, target = _ut_setup(config, grid_value, seed)
    _, _, solver_seed, replay_seed = _seeds(seed)
    results = {}
    for strategy in config.strategies:
        placement, expected = ut_placement(config, inst, strategy,
                                           solver_seed)
        metrics = {"offloading_ratio": (expected, None)}
        if config.trials > 0:
            report = simulate_ut_replay(target, placement, inst.popularity,
                                        inst.delay_threshold_s,
                                        config.trials, replay_seed)
            metrics["offloading_ratio_replay"] = (report.empirical_value,
                                                  report.std_error)
        results[strategy] = metrics
    return results


def run_grid_point(config, grid_value):
    """
    Computes the rows of one grid point: every strategy's metrics averaged
    over ``config.replicates`` seeds.

    The value of an analytic metric is the replicate mean with its standard
    error; a replay metric's standard error combines the replicates' replay
    standard errors.

    :rtype: list of :py:class:`ResultRow`
    """
    replicate = _bs_replicate if config.kind == "bs" else _ut_replicate
    per_seed = [replicate(config, grid_value, config.seed + r)
                for r in range(config.replicates)]
    rows = []
    for strategy in config.strategies:
        for metric in metric_names(config):
            samples = [results[strategy][metric] for results in per_seed]
            values = np.array([v for v, _ in samples])
            if samples[0][1] is not None:
                errors = np.array([e for _, e in samples])
                std_error = math.sqrt((errors ** 2).sum()) / len(errors)
            elif len(values) > 1:
                std_error = values.std(ddof=1) / math.sqrt(len(values))
            else:
                std_error = 0.0
            rows.append(ResultRow(config.grid_param, float(grid_value),
                                  strategy, metric, float(values.mean()),
                                  float(std_error), config.seed))
    return rows


def sort_rows(rows):
    return sorted(rows, key=lambda r: (r.grid_value, r.strategy))


class ExperimentRunner(object):
    """
    Runs an experiment's grid points, in parallel when ``config.jobs`` is
    above 1, and collects the rows in ``(grid_value, strategy)`` order.
    """

    def __init__(self, config, verbose=True):
        self.config = config
        self._verbose = verbose

    def print(self, s, *args, **kwargs):
        """
        Will print the string (same API as built-in :py:func:`print`) if
        the runner was created with ``verbose`` set, then flush stdout.
        """
        if self._verbose:
            res = print(s, *args, **kwargs)
            sys.stdout.flush()
            return res

    def run(self):
        config = self.config
        self.print("Running %s experiment: %s over %s=%s, %d replicate(s)"
                   % (config.kind, ",".join(config.strategies),
                      config.grid_param,
                      ",".join(_format_float(v) for v in config.grid),
                      config.replicates))
        start = time.time()
        rows = []
        if config.jobs > 1 and len(config.grid) > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as executor:
                futures = dict(
                    (executor.submit(run_grid_point, config, value), value)
                    for value in config.grid)
                for future in as_completed(futures):
                    rows.extend(future.result())
                    self.print("    %s=%s done" % (
                        config.grid_param, _format_float(futures[future])))
        else:
            for value in config.grid:
                rows.extend(run_grid_point(config, value))
                self.print("    %s=%s done" % (config.grid_param,
                                               _format_float(value)))
        self.print("Experiment done in %.1fs" % (time.time() - start))
        return sort_rows(rows)


def run_experiment(config, verbose=False):
    """
    Runs every grid point and strategy of ``config``. The result is the
    same for a given configuration whatever ``config.jobs`` is.

    :param ExperimentConfig config: validated configuration
    :returns: rows sorted by ``(grid_value, strategy)``
    :rtype: list of :py:class:`ResultRow`
    """
    return ExperimentRunner(config, verbose=verbose).run()


def format_rows(rows):
    """
    Returns the CSV text of ``rows`` with floats at 9 significant digits.
    """
    out = six.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.grid_param, _format_float(r.grid_value),
                         r.strategy, r.metric, _format_float(r.value),
                         _format_float(r.std_error), r.seed])
    return out.getvalue()


def chart(rows, metric):
    """
    Returns a :py:class:`matplotlib.figure.Figure` plotting ``metric``
    against the grid value, one line per strategy with the strategy as the
    line's SVG id.
    """
    figure = Figure(figsize=(6, 4))
    FigureCanvasSVG(figure)
    axes = figure.add_subplot(1, 1, 1)
    series = collections.OrderedDict()
    grid_param = None
    for r in rows:
        if r.metric == metric:
            series.setdefault(r.strategy, []).append((r.grid_value, r.value))
            grid_param = r.grid_param
    for strategy, points in series.items():
        x, y = zip(*sorted(points))
        axes.plot(x, y, marker="o", label=strategy, gid=strategy)
    axes.set_xlabel(grid_param or "")
    axes.set_ylabel(metric)
    axes.grid(True, alpha=0.3)
    if series:
        axes.legend()
    figure.tight_layout()
    return figure


def emit_report(rows, out_dir, draw_chart=True, name="results"):
    """
    Writes ``<name>.csv`` and, when ``draw_chart`` is set, one
    ``<name>_<metric>.svg`` chart per metric to ``out_dir``.

    :returns: paths written
    :raises IOError: naming the path which could not be written
    """
    try:
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
    except OSError as e:
        raise IOError("cannot create %s: %s" % (out_dir, e.strerror or e))

    written = []
    csv_path = os.path.join(out_dir, "%s.csv" % name)
    try:
        with io.open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_rows(rows))
    except (IOError, OSError) as e:
        raise IOError("cannot write %s: %s" % (csv_path, e.strerror or e))
    written.append(csv_path)

    if draw_chart:
        metrics = []
        for r in rows:
            if r.metric not in metrics:
                metrics.append(r.metric)
        for metric in metrics:
            svg_path = os.path.join(out_dir, "%s_%s.svg" % (name, metric))
            with matplotlib.rc_context({"svg.fonttype": "none",
                                        "svg.hashsalt": "mobcache"}):
                try:
                    chart(rows, metric).savefig(svg_path, format="svg",
                                                metadata={"Date": None})
                except (IOError, OSError) as e:
                    raise IOError("cannot write %s: %s"
                                  % (svg_path, e.strerror or e))
            written.append(svg_path)
    logger.info("wrote %s", ", ".join(written))
    return written
