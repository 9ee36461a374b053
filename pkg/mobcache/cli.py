"""
Module containing the command-line interface (CLI).
"""
from __future__ import absolute_import, print_function
import os
import sys

import begin

from . import bs_place, ut_place
from .config import CONFIG_PATH, STRATEGIES, ConfigError, \
    describe_experiment, load_experiment
from .evalsim import simulate_bs_replay, simulate_ut_replay
from .ingest import load_association_trace, load_contact_trace, \
    read_contact_model, read_placement, read_transition_model, \
    write_contact_model, write_placement, write_transition_model
from .mobility import estimate_contact_model, estimate_transition_model, \
    sample_paths
from .model import Capacities, zipf_pmf
from .runner import bs_placements, emit_report, run_experiment, ut_placement
from .selftest import run_selftest


def _error(field, message):
    """
    Writes the one-line, machine-parsable error report and returns the
    exit code.
    """
    print("error: field=%s message=%s"
          % (field, " ".join(str(message).split())), file=sys.stderr)
    return 1


def _guarded(command):
    """
    Runs ``command``, turning configuration, input and I/O failures into
    an error line and exit code 1.
    """
    try:
        return command()
    except ConfigError as e:
        return _error(e.field, e.message)
    except (ValueError, IOError, OSError, RuntimeError) as e:
        return _error("-", e)


def _experiment(config, seed=-1, jobs=0, overrides=None):
    overrides = dict(overrides or {})
    if seed >= 0:
        overrides["experiment.seed"] = seed
    if jobs > 0:
        overrides["experiment.jobs"] = jobs
    return load_experiment(config or None, overrides=overrides,
                           user_config=CONFIG_PATH)


def _kind_for(strategy):
    """
    Scenario kind of a strategy, None for strategies of both kinds.
    """
    kinds = [kind for kind, names in STRATEGIES.items() if strategy in names]
    return kinds[0] if len(kinds) == 1 else None


def _bs_instance(experiment, model, seed):
    s = experiment.bs
    paths = sample_paths(model, s.horizon_s, s.num_paths, seed)
    return bs_place.BsInstance(paths, zipf_pmf(s.num_files, s.gamma), s.rate,
                               Capacities.uniform(s.capacity,
                                                  model.num_cells))


def _ut_instance(experiment, model):
    s = experiment.ut
    return ut_place.UtInstance(model.scaled(s.rate_scale),
                               zipf_pmf(s.num_files, s.gamma),
                               s.delay_threshold_s,
                               Capacities.uniform(s.capacity,
                                                  model.num_users))


@begin.subcommand
@begin.convert(_automatic=True)
def estimate(source, kind="bs", out="model.csv", window=0.0, num_users=0):
    """
    Estimate a mobility model from a trace: a cell transition model from an
    association trace (kind bs) or pairwise contact rates from a contact
    trace (kind ut, over the given observation window, default the trace's
    span).
    """
    def command():
        if not os.path.exists(source):
            raise ConfigError("source", "path '%s' does not exist" % source)
        if kind == "bs":
            model = estimate_transition_model(load_association_trace(source))
            write_transition_model(model, out)
        elif kind == "ut":
            trace = load_contact_trace(source, num_users=num_users or None)
            first, last = trace.span
            model = estimate_contact_model(trace, window or (last - first))
            write_contact_model(model, out)
        else:
            raise ConfigError("kind", "must be 'bs' or 'ut', got %r"
                              % kind)
        print("Model written to %s." % out)

    return _guarded(command)


@begin.subcommand
@begin.convert(_automatic=True)
def optimize(model, strategy="coded", out="placement.csv", config="",
             seed=-1):
    """
    Compute a placement from a model file with one strategy. Instance
    parameters (library, skew, capacities, rate or delay threshold) are read
    from the configuration.
    """
    def command():
        kind = _kind_for(strategy)
        overrides = {"experiment.strategies": strategy}
        if kind is not None:
            overrides["experiment.kind"] = kind
        experiment = _experiment(config, seed, overrides=overrides)
        if experiment.kind == "bs":
            inst = _bs_instance(experiment, read_transition_model(model),
                                experiment.seed)
            placement = bs_placements(experiment, inst,
                                      experiment.seed)[strategy]
        else:
            inst = _ut_instance(experiment, read_contact_model(model))
            placement, _ = ut_placement(experiment, inst, strategy,
                                        experiment.seed)
        write_placement(placement, out)
        print("Placement written to %s." % out)

    return _guarded(command)


@begin.subcommand
@begin.convert(_automatic=True)
def evaluate(placement, model, kind="bs", config="", trials=0, seed=-1):
    """
    Print the analytic metrics of a placement file under a model file and,
    with trials, the Monte Carlo replay estimate.
    """
    def command():
        if kind not in STRATEGIES:
            raise ConfigError("kind", "must be 'bs' or 'ut', got %r"
                              % kind)
        experiment = _experiment(config, seed,
                                 overrides={"experiment.kind": kind,
                                            "experiment.strategies": "mpc"})
        chosen = read_placement(placement)
        if kind == "bs":
            inst = _bs_instance(experiment, read_transition_model(model),
                                experiment.seed)
            print("failure_prob %.9g"
                  % bs_place.failure_probability(chosen, inst))
            print("served_fraction %.9g"
                  % bs_place.served_fraction_objective(chosen, inst))
            if trials > 0:
                report = simulate_bs_replay(inst.scenarios, chosen,
                                            inst.popularity, inst.rate,
                                            trials, experiment.seed)
        else:
            inst = _ut_instance(experiment, read_contact_model(model))
            print("offloading_ratio %.9g"
                  % ut_place.offloading_ratio(chosen, inst))
            if trials > 0:
                report = simulate_ut_replay(inst.contacts, chosen,
                                            inst.popularity,
                                            inst.delay_threshold_s, trials,
                                            experiment.seed)
        if trials > 0:
            print("%s_replay %.9g std_error %.9g"
                  % (report.metric_name, report.empirical_value,
                     report.std_error))

    return _guarded(command)


@begin.subcommand
@begin.convert(_automatic=True)
def sweep(config="", out="results", seed=-1, jobs=0):
    """
    Run every strategy over the configured grid and write the CSV table
    and SVG charts to the output directory.
    """
    def command():
        experiment = _experiment(config, seed, jobs)
        rows = run_experiment(experiment, verbose=True)
        for path in emit_report(rows, out, draw_chart=experiment.chart):
            print("Wrote %s" % path)

    return _guarded(command)


@begin.subcommand
@begin.convert(_automatic=True)
def describe(config=""):
    """
    Print the effective configuration, every key with its value and
    meaning, after layering the experiment file over the defaults.
    """
    def command():
        experiment = _experiment(config)
        for name, value, description in describe_experiment(experiment):
            print("%-28s = %-24s # %s" % (name, value, description))

    return _guarded(command)


@begin.subcommand
@begin.convert(_automatic=True)
def selftest(scale=1.0, seed=0):
    """
    Run the solver oracle suites; exits nonzero on any violation.
    """
    results = run_selftest(scale=scale, seed=seed)
    header = "%-20s %8s %10s" % ("suite", "cases", "violations")
    print("%s\n%s" % (header, len(header) * "-"))
    for r in results:
        print("%-20s %8d %10d  %s" % (r.name, r.cases, r.violations,
                                      r.detail))
    if any(r.violations for r in results):
        return _error("-", "selftest found violations")
    return 0


@begin.start
@begin.logging
def main():
    """
    Mobility-aware cache placement at base stations and user terminals:
    estimate mobility models, optimize placements, evaluate them and sweep
    experiments.
    """
    pass
