"""
Module containing the experiment configuration: the layered INI files and
their validation into an :py:class:`ExperimentConfig`.

Values are looked up in the experiment file passed on the command line,
then in ``~/.mobcache.cfg`` when present, then in the package's
``default_config.cfg``. Errors name the offending key as a dotted
``section.key`` path.
"""
from __future__ import absolute_import, division, print_function
import collections
import math
import os

from six.moves import configparser


# Default path for the user configuration file.
CONFIG_PATH = os.path.join(os.path.expanduser("~"), ".mobcache.cfg")
DEFAULT_CONFIG_PATH = \
    os.path.join(os.path.dirname(__file__), "default_config.cfg")
DEFAULT_CONFIG = configparser.ConfigParser()
DEFAULT_CONFIG.read(DEFAULT_CONFIG_PATH)

# Canonical experiment configs shipped with the package.
EXAMPLE_CONFIG_DIR = os.path.join(os.path.dirname(__file__), "configs")


BS_STRATEGIES = ("coded", "coded_lp", "uncoded_exact", "uncoded_local", "mpc")
UT_STRATEGIES = ("greedy", "random_zipf", "mpc")
STRATEGIES = {"bs": BS_STRATEGIES, "ut": UT_STRATEGIES}

GRID_PARAMS = {
    "bs": ("gamma", "rate", "capacity"),
    "ut": ("gamma", "num_users", "rate_scale", "delay_threshold", "capacity"),
}

BS_SOURCES = ("markov", "trace", "waypoint")
UT_SOURCES = ("poisson", "trace", "waypoint")

CODED_SOLVERS = ("milp", "supergradient", "linprog")


class ConfigError(ValueError):
    """
    Exception class for configuration values which are missing, malformed or
    inconsistent. ``field`` holds the dotted path of the offending key.
    """

    def __init__(self, field, message):
        super(ConfigError, self).__init__("%s: %s" % (field, message))
        self.field = field
        self.message = message

    def __reduce__(self):
        return (ConfigError, (self.field, self.message))


# Keys read into the configuration, consisting of (section, field, getter,
# description) tuples. Getters are ConfigParser methods or one of the list
# readers below.
CONFIG_KEYORDER = [
    ("experiment", "kind", "get", "Scenario kind, 'bs' or 'ut'"),
    ("experiment", "strategies", "getlist", "Strategies to compare"),
    ("experiment", "grid_param", "get", "Parameter swept over the grid"),
    ("experiment", "grid", "getfloats", "Grid values"),
    ("experiment", "seed", "getint", "Base random seed"),
    ("experiment", "replicates", "getint",
     "Seeds averaged per grid point (seed, seed + 1, ...)"),
    ("experiment", "trials", "getint",
     "Replay trials per placement, 0 for analytic metrics only"),
    ("experiment", "jobs", "getint", "Grid points computed in parallel"),
    ("experiment", "chart", "getboolean", "Write an SVG line chart"),

    ("bs", "num_bs", "getint", "Number of base stations"),
    ("bs", "num_files", "getint", "Library size"),
    ("bs", "capacity", "getfloat", "Cache capacity per BS in files"),
    ("bs", "rate", "getfloat", "Downlink rate in files per second"),
    ("bs", "gamma", "getfloat", "Request skew"),
    ("bs", "horizon_s", "getfloat", "Request-to-deadline path horizon"),
    ("bs", "num_paths", "getint", "Sampled path scenarios"),
    ("bs", "source", "get", "Mobility source, markov, trace or waypoint"),
    ("bs", "mean_sojourn_s", "getfloat", "Mean cell sojourn (markov)"),
    ("bs", "association_trace", "get", "Association trace file (trace)"),
    ("bs", "trace_mode", "get",
     "'windows' to optimize and evaluate on the whole trace, 'split' to "
     "optimize on the first half and evaluate on the second"),
    ("bs", "coded_solver", "get",
     "'milp' to minimize the failure probability, 'supergradient' or "
     "'linprog' to maximize the served fraction"),
    ("bs", "milp_time_limit_s", "getfloat",
     "Time limit of the failure minimizing solve"),
    ("bs", "coded_iterations", "getint", "Supergradient iterations"),
    ("bs", "restarts", "getint", "Random restarts of the local search"),
    ("bs", "area_m", "getpair", "Walk area width, height (waypoint)"),
    ("bs", "grid_xy", "getpair", "Cells along x, y (waypoint)"),
    ("bs", "speed_mps", "getpair", "Speed range (waypoint)"),
    ("bs", "pause_s", "getpair", "Pause range (waypoint)"),
    ("bs", "num_walkers", "getint", "Walkers (waypoint)"),
    ("bs", "duration_s", "getfloat", "Walk duration (waypoint)"),

    ("ut", "num_users", "getint", "Number of user terminals"),
    ("ut", "num_files", "getint", "Library size"),
    ("ut", "capacity", "getint", "Cache capacity per UT in files"),
    ("ut", "delay_threshold_s", "getfloat", "Longest D2D wait"),
    ("ut", "gamma", "getfloat", "Request skew"),
    ("ut", "source", "get", "Contact source, poisson, trace or waypoint"),
    ("ut", "mean_rate", "getfloat", "Mean pairwise contact rate (poisson)"),
    ("ut", "rate_scale", "getfloat", "Global contact rate multiplier"),
    ("ut", "contact_trace", "get", "Contact trace file (trace)"),
    ("ut", "observation_window_s", "getfloat",
     "Window the first half of the trace is estimated over, 0 for its "
     "span (trace)"),
    ("ut", "gamma_c_grid", "getfloats", "Random caching skews searched"),
    ("ut", "line_search_trials", "getint",
     "Random placements scored per skew"),
    ("ut", "area_m", "getpair", "Walk area width, height (waypoint)"),
    ("ut", "speed_mps", "getpair", "Speed range (waypoint)"),
    ("ut", "pause_s", "getpair", "Pause range (waypoint)"),
    ("ut", "duration_s", "getfloat", "Walk duration (waypoint)"),
    ("ut", "range_m", "getfloat", "Transmission range (waypoint)"),
    ("ut", "step_s", "getfloat", "Position sampling step (waypoint)"),
]


BsSettings = collections.namedtuple(
    "BsSettings", [f for s, f, _, _ in CONFIG_KEYORDER if s == "bs"])

UtSettings = collections.namedtuple(
    "UtSettings", [f for s, f, _, _ in CONFIG_KEYORDER if s == "ut"])


class ExperimentConfig(collections.namedtuple("ExperimentConfig", [
        "kind", "strategies", "grid_param", "grid", "seed", "replicates",
        "trials", "jobs", "chart", "bs", "ut", "path"])):
    """
    Validated, immutable experiment description. ``bs`` and ``ut`` hold the
    :py:class:`BsSettings` and :py:class:`UtSettings` of the two scenario
    kinds; only the one named by ``kind`` is used.
    """


def _split(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _read(parser, section, field, getter):
    name = "%s.%s" % (section, field)
    try:
        if getter == "getlist":
            return tuple(_split(parser.get(section, field)))
        if getter in ("getfloats", "getpair"):
            values = tuple(float(v) for v in
                           _split(parser.get(section, field)))
            if getter == "getpair" and len(values) != 2:
                raise ConfigError(name, "expected two comma separated values")
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(name, "values must be finite")
            return values
        value = getattr(parser, getter)(section, field)
        if getter == "getfloat" and not math.isfinite(value):
            raise ConfigError(name, "value must be finite")
        return value
    except (configparser.NoSectionError, configparser.NoOptionError):
        raise ConfigError(name, "missing")
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(name, "malformed value %r"
                          % parser.get(section, field))


def _relative_to(value, config_path):
    """
    Resolves a relative file name against the directory of the experiment
    file naming it, when a file exists there.
    """
    if not value or config_path is None or os.path.isabs(value):
        return value
    candidate = os.path.join(os.path.dirname(config_path), value)
    return candidate if os.path.exists(candidate) else value


def _positive(name, value, strict=True):
    if value < 0 or (strict and value == 0):
        raise ConfigError(name, "must be %s, got %r"
                          % ("positive" if strict else "nonnegative", value))


def _validate(values):
    kind = values["experiment.kind"]
    if kind not in STRATEGIES:
        raise ConfigError("experiment.kind", "must be 'bs' or 'ut', got %r"
                          % kind)
    strategies = values["experiment.strategies"]
    if not strategies:
        raise ConfigError("experiment.strategies", "empty strategy list")
    for strategy in strategies:
        if strategy in STRATEGIES[kind]:
            continue
        if any(strategy in known for known in STRATEGIES.values()):
            raise ConfigError("experiment.strategies",
                              "strategy %r does not apply to %s scenarios"
                              % (strategy, kind))
        raise ConfigError("experiment.strategies", "unknown strategy %r"
                          % strategy)
    if len(set(strategies)) != len(strategies):
        raise ConfigError("experiment.strategies", "duplicate strategy")
    if values["experiment.grid_param"] not in GRID_PARAMS[kind]:
        raise ConfigError("experiment.grid_param",
                          "must be one of %s for %s scenarios"
                          % (", ".join(GRID_PARAMS[kind]), kind))
    if not values["experiment.grid"]:
        raise ConfigError("experiment.grid", "empty grid")
    for field in ("replicates", "jobs"):
        _positive("experiment." + field, values["experiment." + field])
    _positive("experiment.trials", values["experiment.trials"], strict=False)
    if kind == "bs":
        _validate_bs(values)
    else:
        _validate_ut(values)


def _validate_bs(values):
    for field in ("num_bs", "num_files", "rate", "horizon_s", "num_paths",
                  "mean_sojourn_s", "coded_iterations",
                  "milp_time_limit_s"):
        _positive("bs." + field, values["bs." + field])
    for field in ("capacity", "gamma", "restarts"):
        _positive("bs." + field, values["bs." + field], strict=False)
    if values["bs.source"] not in BS_SOURCES:
        raise ConfigError("bs.source", "must be one of %s"
                          % ", ".join(BS_SOURCES))
    if values["bs.trace_mode"] not in ("windows", "split"):
        raise ConfigError("bs.trace_mode", "must be 'windows' or 'split'")
    if values["bs.coded_solver"] not in CODED_SOLVERS:
        raise ConfigError("bs.coded_solver", "must be one of %s"
                          % ", ".join(CODED_SOLVERS))
    if values["bs.source"] == "trace" and \
            not os.path.isfile(values["bs.association_trace"]):
        raise ConfigError("bs.association_trace", "cannot read %r"
                          % values["bs.association_trace"])
    if values["bs.source"] == "waypoint":
        cells_x, cells_y = values["bs.grid_xy"]
        if cells_x < 1 or cells_y < 1 or cells_x * cells_y != \
                values["bs.num_bs"]:
            raise ConfigError("bs.grid_xy", "grid must have num_bs cells")
    uncoded = set(values["experiment.strategies"]) & \
        set(("uncoded_exact", "uncoded_local", "mpc"))
    capacities = [values["bs.capacity"]]
    if values["experiment.grid_param"] == "capacity":
        capacities.extend(values["experiment.grid"])
    if uncoded and any(c != math.floor(c) or c < 0 for c in capacities):
        raise ConfigError("bs.capacity", "uncoded strategies need whole "
                          "file capacities")


def _validate_ut(values):
    for field in ("num_users", "num_files", "delay_threshold_s",
                  "rate_scale", "line_search_trials", "range_m", "step_s"):
        _positive("ut." + field, values["ut." + field])
    for field in ("capacity", "gamma", "mean_rate", "observation_window_s"):
        _positive("ut." + field, values["ut." + field], strict=False)
    if values["ut.source"] not in UT_SOURCES:
        raise ConfigError("ut.source", "must be one of %s"
                          % ", ".join(UT_SOURCES))
    if values["ut.source"] == "trace" and \
            not os.path.isfile(values["ut.contact_trace"]):
        raise ConfigError("ut.contact_trace", "cannot read %r"
                          % values["ut.contact_trace"])
    if not values["ut.gamma_c_grid"]:
        raise ConfigError("ut.gamma_c_grid", "empty grid")
    if any(g < 0 for g in values["ut.gamma_c_grid"]):
        raise ConfigError("ut.gamma_c_grid", "skews must be nonnegative")
    grid_param, grid = values["experiment.grid_param"], \
        values["experiment.grid"]
    if grid_param in ("num_users", "capacity") and \
            any(v != math.floor(v) or v < (1 if grid_param == "num_users"
                                           else 0) for v in grid):
        raise ConfigError("experiment.grid", "%s values must be whole "
                          "numbers" % grid_param)
    if grid_param in ("rate_scale", "delay_threshold") and \
            any(v <= 0 for v in grid):
        raise ConfigError("experiment.grid", "%s values must be positive"
                          % grid_param)


def load_experiment(path=None, overrides=None, user_config=CONFIG_PATH):
    """
    Reads and validates an experiment configuration.

    :param str path: experiment file, layered over the user and default
                     configuration
    :param dict overrides: ``{"section.key": value}`` applied last
    :param str user_config: user configuration file, used when it exists
    :rtype: ExperimentConfig
    :raises ConfigError: naming the offending key
    """
    parser = configparser.ConfigParser()
    parser.read_dict(dict((s, dict(DEFAULT_CONFIG.items(s)))
                          for s in DEFAULT_CONFIG.sections()))
    if user_config and os.path.exists(user_config):
        parser.read(user_config)
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh, source=path)
        except (IOError, OSError) as e:
            raise ConfigError("-", "cannot read %s: %s"
                              % (path, e.strerror or e))
        except configparser.Error as e:
            raise ConfigError("-", "cannot parse %s: %s"
                              % (path, str(e).splitlines()[0]))
    for name, value in (overrides or {}).items():
        section, field = name.split(".", 1)
        if not parser.has_section(section):
            raise ConfigError(name, "unknown section")
        parser.set(section, field, str(value))

    known = set("%s.%s" % (s, f) for s, f, _, _ in CONFIG_KEYORDER)
    for section in parser.sections():
        for field in parser.options(section):
            if "%s.%s" % (section, field) not in known:
                raise ConfigError("%s.%s" % (section, field), "unknown key")

    values = collections.OrderedDict(
        ("%s.%s" % (s, f), _read(parser, s, f, g))
        for s, f, g, _ in CONFIG_KEYORDER)
    for name in ("bs.association_trace", "ut.contact_trace"):
        values[name] = _relative_to(values[name], path)
    _validate(values)

    def section(cls, name):
        return cls(*[values["%s.%s" % (name, f)] for f in cls._fields])

    return ExperimentConfig(
        kind=values["experiment.kind"],
        strategies=values["experiment.strategies"],
        grid_param=values["experiment.grid_param"],
        grid=values["experiment.grid"],
        seed=values["experiment.seed"],
        replicates=values["experiment.replicates"],
        trials=values["experiment.trials"],
        jobs=values["experiment.jobs"],
        chart=values["experiment.chart"],
        bs=section(BsSettings, "bs"),
        ut=section(UtSettings, "ut"),
        path=path)


def describe_experiment(config):
    """
    Lists the effective configuration of the sections ``config`` uses.

    :param ExperimentConfig config: validated configuration
    :returns: ``(section.key, value, description)`` tuples in key order
    """
    rows = []
    for section, field, _, description in CONFIG_KEYORDER:
        if section == "experiment":
            value = getattr(config, field)
        elif section == config.kind:
            value = getattr(getattr(config, section), field)
        else:
            continue
        if isinstance(value, tuple):
            value = ", ".join("%g" % v if isinstance(v, float) else str(v)
                              for v in value)
        rows.append(("%s.%s" % (section, field), value, description))
    return rows
