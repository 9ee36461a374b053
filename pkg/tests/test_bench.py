"""
Tests of the experiment configuration, file formats, sweep runner and the
command line.
"""
from __future__ import absolute_import, division, print_function

import io
import os
import pickle
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from mobcache import cli
from mobcache.config import (CONFIG_KEYORDER, EXAMPLE_CONFIG_DIR, ConfigError,
                             ExperimentConfig, load_experiment)
from mobcache.ingest import (InvalidModelFile, read_contact_model,
                             read_placement, read_text,
                             read_transition_model, write_contact_model,
                             write_placement, write_text,
                             write_transition_model, load_association_trace,
                             load_contact_trace)
from mobcache.mobility import (ContactModel, estimate_contact_model,
                               estimate_transition_model)
from mobcache.model import (CodedPlacement, DiscretePlacement, head_mass,
                            zipf_pmf)
from mobcache.runner import (CSV_HEADER, ResultRow, chart, emit_report,
                             format_rows, metric_names, run_experiment)


TEST_DATA_BASE = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(TEST_DATA_BASE, name)


class TestConfig(unittest.TestCase):

    def load(self, path=None, **overrides):
        return load_experiment(path, overrides=overrides, user_config=None)

    def assertConfigError(self, field, message=None, path=None, **overrides):
        with self.assertRaises(ConfigError) as ctx:
            self.load(path, **overrides)
        self.assertEqual(ctx.exception.field, field)
        if message is not None:
            self.assertIn(message, ctx.exception.message)

    def test_defaults(self):
        config = self.load()
        self.assertIsInstance(config, ExperimentConfig)
        self.assertEqual(config.kind, "bs")
        self.assertEqual(config.strategies, ("coded", "uncoded_local", "mpc"))
        self.assertEqual(config.grid, (0.4, 0.7, 1.0, 1.3, 1.6))
        self.assertEqual((config.bs.num_bs, config.bs.num_files), (6, 100))
        self.assertEqual((config.ut.num_users, config.ut.num_files),
                         (78, 1000))
        self.assertEqual(config.ut.gamma_c_grid[-1], 10.0)
        self.assertEqual((config.bs.coded_solver, config.bs.milp_time_limit_s),
                         ("milp", 60.0))
        self.assertEqual(config.ut.mean_rate, 0.0002)
        self.assertIsNone(config.path)

    def test_shipped_configs_load(self):
        bs = self.load(os.path.join(EXAMPLE_CONFIG_DIR, "bs_campus.cfg"))
        self.assertEqual((bs.kind, bs.bs.num_bs, bs.bs.num_files),
                         ("bs", 6, 100))
        self.assertNotIn("uncoded_exact", bs.strategies)
        ut = self.load(os.path.join(EXAMPLE_CONFIG_DIR, "ut_campus.cfg"))
        self.assertEqual((ut.kind, ut.ut.num_users, ut.ut.num_files),
                         ("ut", 78, 1000))
        self.assertEqual(ut.ut.delay_threshold_s, 3600.0)

    def test_experiment_file_is_layered_over_defaults(self):
        config = self.load(data_path("small_bs.cfg"))
        self.assertEqual(config.grid, (1.0, 0.5))
        self.assertEqual(config.bs.num_files, 5)
        self.assertEqual(config.bs.coded_solver, "milp")
        self.assertEqual(config.path, data_path("small_bs.cfg"))

    def test_user_config_sits_between(self):
        tmp = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, tmp)
        user = os.path.join(tmp, "user.cfg")
        write_text(user, u"[experiment]\nseed = 42\njobs = 3\n")
        config = load_experiment(data_path("small_bs.cfg"), user_config=user)
        self.assertEqual((config.seed, config.jobs), (3, 3))
        self.assertEqual(load_experiment(user_config=user).seed, 42)

    def test_overrides_win(self):
        config = self.load(data_path("small_bs.cfg"), **{"experiment.seed": 9})
        self.assertEqual(config.seed, 9)

    def test_relative_trace_path(self):
        config = self.load(data_path("trace_bs.cfg"))
        self.assertEqual(config.bs.association_trace, data_path("cells.csv"))

    def test_strategy_errors(self):
        self.assertConfigError("experiment.strategies", "empty strategy list",
                               **{"experiment.strategies": ""})
        self.assertConfigError("experiment.strategies", "does not apply",
                               **{"experiment.strategies": "greedy"})
        self.assertConfigError("experiment.strategies", "unknown strategy",
                               **{"experiment.strategies": "coded,fastest"})
        self.assertConfigError("experiment.strategies", "duplicate",
                               **{"experiment.strategies": "mpc,mpc"})

    def test_value_errors(self):
        self.assertConfigError("experiment.kind", **{"experiment.kind": "x"})
        self.assertConfigError("experiment.grid_param",
                               **{"experiment.grid_param": "num_users"})
        self.assertConfigError("experiment.grid", "empty grid",
                               **{"experiment.grid": ""})
        self.assertConfigError("experiment.replicates",
                               **{"experiment.replicates": 0})
        self.assertConfigError("experiment.seed", "malformed",
                               **{"experiment.seed": "abc"})
        self.assertConfigError("bs.rate", **{"bs.rate": "nan"})
        self.assertConfigError("bs.area_m", "two comma",
                               **{"bs.area_m": "1, 2, 3"})
        self.assertConfigError("bs.capacity", "whole file",
                               **{"bs.capacity": 0.5})
        self.assertConfigError("bs.coded_solver", "milp",
                               **{"bs.coded_solver": "newton"})
        self.assertConfigError("bs.milp_time_limit_s",
                               **{"bs.milp_time_limit_s": 0})
        self.assertConfigError("ut.num_users", **{"experiment.kind": "ut",
                                                  "experiment.strategies":
                                                  "greedy",
                                                  "ut.num_users": 0})
        self.assertConfigError("experiment.grid", "whole numbers",
                               **{"experiment.kind": "ut",
                                  "experiment.strategies": "greedy",
                                  "experiment.grid_param": "capacity",
                                  "experiment.grid": "1, 1.5"})

    def test_fractional_capacity_for_coded_only(self):
        config = self.load(**{"experiment.strategies": "coded, coded_lp",
                              "bs.capacity": 0.5})
        self.assertEqual(config.bs.capacity, 0.5)

    def test_unknown_keys(self):
        self.assertConfigError("bs.colour", "unknown key",
                               **{"bs.colour": "red"})
        self.assertConfigError("plot.size", "unknown section",
                               **{"plot.size": 3})

    def test_source_errors(self):
        self.assertConfigError("bs.association_trace",
                               **{"bs.source": "trace",
                                  "bs.association_trace": "/nonexistent"})
        self.assertConfigError("bs.grid_xy", **{"bs.source": "waypoint",
                                                "bs.grid_xy": "2, 2"})
        self.assertConfigError("bs.source", **{"bs.source": "gps"})

    def test_unreadable_file(self):
        self.assertConfigError("-", "cannot read",
                               path=data_path("missing.cfg"))

    def test_every_key_has_a_default(self):
        config = self.load()
        for section, field, _, description in CONFIG_KEYORDER:
            self.assertTrue(description)
            if section != "experiment":
                self.assertIn(field, getattr(config, section)._fields)

    def test_error_pickles(self):
        error = pickle.loads(pickle.dumps(ConfigError("bs.rate", "bad")))
        self.assertEqual((error.field, error.message), ("bs.rate", "bad"))


class TestIngest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_placements(self):
        discrete = DiscretePlacement.from_items(2, 4, [(0, 1), (1, 3)])
        write_placement(discrete, self.path("discrete.csv"))
        self.assertEqual(read_placement(self.path("discrete.csv")), discrete)
        self.assertIn("# nodes=2 files=4",
                      read_text(self.path("discrete.csv")))

        coded = CodedPlacement([[0.25, 0.75, 0], [0, 0.5, 0.5]])
        write_placement(coded, self.path("coded.csv"))
        again = read_placement(self.path("coded.csv"))
        self.assertIsInstance(again, CodedPlacement)
        np.testing.assert_allclose(again.x, coded.x)

    def test_models(self):
        transitions = estimate_transition_model(
            load_association_trace(data_path("cells.csv")))
        write_transition_model(transitions, self.path("transitions.csv"))
        again = read_transition_model(self.path("transitions.csv"))
        np.testing.assert_array_equal(again.transition,
                                      transitions.transition)
        np.testing.assert_array_equal(again.mean_sojourn,
                                      transitions.mean_sojourn)

        contacts = estimate_contact_model(
            load_contact_trace(data_path("contacts.csv")), 1000.0,
            num_users=4)
        write_contact_model(contacts, self.path("contacts.csv"))
        again = read_contact_model(self.path("contacts.csv"))
        self.assertEqual(again.num_users, 4)
        np.testing.assert_array_equal(again.rate, contacts.rate)

    def test_bad_files(self):
        cases = {
            "no_header.csv": u"# nodes=1 files=2\n0,1,1\n",
            "no_shape.csv": u"node,file,fraction\n0,1,1\n",
            "outside.csv": u"# nodes=1 files=2\nnode,file,fraction\n3,1,1\n",
            "short.csv": u"# nodes=1 files=2\nnode,file,fraction\n0,1\n",
            "negative_node.csv":
                u"# nodes=2 files=2\nnode,file,fraction\n-1,1,1\n",
            "negative_file.csv":
                u"# nodes=2 files=2\nnode,file,fraction\n0,-2,1\n",
        }
        for name, text in cases.items():
            write_text(self.path(name), text)
            with self.assertRaises(InvalidModelFile):
                read_placement(self.path(name))
        write_text(self.path("kinds.csv"),
                   u"kind,i,j,value\nteleport,0,0,1\n")
        with self.assertRaises(InvalidModelFile):
            read_transition_model(self.path("kinds.csv"))

    def test_missing_file_names_path(self):
        with self.assertRaises(IOError) as ctx:
            read_text(self.path("absent.csv"))
        self.assertIn("absent.csv", str(ctx.exception))
        model = ContactModel([[0, 1], [1, 0]])
        with self.assertRaises(IOError):
            write_contact_model(model, os.path.join(self.tmp, "no", "x.csv"))


class TestExperiment(unittest.TestCase):
    """
    Runs the small base station experiment; subclasses swap the
    configuration.
    """

    CONFIG_NAME = "small_bs.cfg"

    STRATEGY_ORDER = ("coded", "uncoded_exact", "uncoded_local", "mpc")

    def setUp(self):
        self.config = load_experiment(data_path(self.CONFIG_NAME),
                                      user_config=None)
        self.out_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.out_dir)

    def rows_for(self, rows, grid_value, metric):
        return dict((r.strategy, r) for r in rows
                    if r.grid_value == grid_value and r.metric == metric)

    def test_rows(self):
        rows = run_experiment(self.config)
        self.assertEqual(len(rows), len(self.config.grid) *
                         len(self.config.strategies) *
                         len(metric_names(self.config)))
        self.assertEqual(rows, sorted(rows, key=lambda r: (r.grid_value,
                                                           r.strategy)))
        self.assertEqual(set(r.seed for r in rows), set([self.config.seed]))
        self.assertEqual(set(r.grid_param for r in rows),
                         set([self.config.grid_param]))
        self.assertTrue(all(0 <= r.value <= 1 for r in rows))

    def test_strategy_order(self):
        rows = run_experiment(self.config)
        for value in self.config.grid:
            by_strategy = self.rows_for(rows, value, "failure_prob")
            failures = [by_strategy[s].value for s in self.STRATEGY_ORDER]
            for better, worse in zip(failures, failures[1:]):
                self.assertLessEqual(better, worse + 1e-12)

    def test_deterministic_and_parallel(self):
        rows = run_experiment(self.config)
        self.assertEqual(rows, run_experiment(self.config))
        self.assertEqual(rows, run_experiment(self.config._replace(jobs=2)))

    def test_replicates_change_the_seed(self):
        single = run_experiment(self.config._replace(replicates=1))
        shifted = run_experiment(self.config._replace(
            replicates=1, seed=self.config.seed + 1))
        self.assertNotEqual([r.value for r in single],
                            [r.value for r in shifted])
        self.assertTrue(all(r.std_error == 0 for r in single))

    def test_report(self):
        rows = run_experiment(self.config)
        written = emit_report(rows, self.out_dir,
                              draw_chart=self.config.chart)
        csv_path = os.path.join(self.out_dir, "results.csv")
        self.assertEqual(written[0], csv_path)
        lines = read_text(csv_path).splitlines()
        self.assertEqual(lines[0], ",".join(CSV_HEADER))
        self.assertEqual(len(lines), len(rows) + 1)

        metrics = metric_names(self.config)
        if self.config.chart:
            self.assertEqual(written[1:], [
                os.path.join(self.out_dir, "results_%s.svg" % m)
                for m in metrics])
            svg = read_text(written[1])
            for strategy in self.config.strategies:
                self.assertIn('id="%s"' % strategy, svg)
        else:
            self.assertEqual(written, [csv_path])

        again = os.path.join(self.out_dir, "again")
        for first, second in zip(written, emit_report(
                rows, again, draw_chart=self.config.chart)):
            with open(first, "rb") as a, open(second, "rb") as b:
                self.assertEqual(a.read(), b.read())


class TestUtExperiment(TestExperiment):

    CONFIG_NAME = "small_ut.cfg"

    def test_strategy_order(self):
        # MPC serves only the cached head of the library, whatever K is.
        rows = run_experiment(self.config)
        for value in self.config.grid:
            mpc = self.rows_for(rows, value, "offloading_ratio")["mpc"]
            self.assertAlmostEqual(
                mpc.value, head_mass(zipf_pmf(self.config.ut.num_files,
                                              value), 1), places=15)
            self.assertEqual(mpc.std_error, 0.0)

    def test_trace_source(self):
        config = load_experiment(None, user_config=None, overrides={
            "experiment.kind": "ut",
            "experiment.strategies": "greedy, random_zipf, mpc",
            "experiment.grid": "1.0",
            "ut.source": "trace",
            "ut.contact_trace": data_path("contacts.csv"),
            "ut.num_users": 4,
            "ut.num_files": 4,
            "ut.delay_threshold_s": 50,
            "ut.gamma_c_grid": "0, 1",
        })
        rows = run_experiment(config)
        self.assertEqual([r.strategy for r in rows],
                         ["greedy", "mpc", "random_zipf"])
        with self.assertRaises(ConfigError) as ctx:
            run_experiment(config._replace(ut=config.ut._replace(
                num_users=2)))
        self.assertEqual(ctx.exception.field, "ut.num_users")


class TestUtTrends(unittest.TestCase):
    """
    Offloading ratios of the default Poisson contact setting: greedy ahead
    of random caching ahead of MPC, and greedy improving with more users
    and faster contacts.
    """

    TOLERANCE = 0.005

    def run_ut(self, **overrides):
        settings = {
            "experiment.kind": "ut",
            "experiment.strategies": "greedy, random_zipf, mpc",
            "experiment.grid": "0.4, 1.0, 1.6",
            "experiment.replicates": 2,
            "experiment.chart": "false",
            "ut.gamma_c_grid": "0, 0.4, 1, 10",
            "ut.line_search_trials": 3,
        }
        settings.update(overrides)
        rows = run_experiment(load_experiment(None, user_config=None,
                                              overrides=settings))
        return dict(((r.grid_value, r.strategy), r.value) for r in rows)

    def test_greedy_random_mpc_order(self):
        for num_users, num_files in ((20, 100), (78, 1000)):
            values = self.run_ut(**{"ut.num_users": num_users,
                                    "ut.num_files": num_files})
            for gamma in (0.4, 1.0, 1.6):
                greedy = values[gamma, "greedy"]
                random_zipf = values[gamma, "random_zipf"]
                mpc = values[gamma, "mpc"]
                self.assertGreaterEqual(greedy - mpc, 0.02,
                                        (num_users, gamma))
                self.assertGreaterEqual(greedy, random_zipf - self.TOLERANCE)
                self.assertGreaterEqual(random_zipf, mpc - self.TOLERANCE)

    def assertNondecreasing(self, values):
        for before, after in zip(values, values[1:]):
            self.assertGreaterEqual(after, before - self.TOLERANCE, values)

    def test_greedy_grows_with_users(self):
        values = self.run_ut(**{"experiment.strategies": "greedy",
                                "experiment.grid_param": "num_users",
                                "experiment.grid": "5, 20, 78",
                                "ut.num_files": 100})
        self.assertNondecreasing([values[k, "greedy"]
                                  for k in (5.0, 20.0, 78.0)])

    def test_greedy_grows_with_contact_rates(self):
        values = self.run_ut(**{"experiment.strategies": "greedy",
                                "experiment.grid_param": "rate_scale",
                                "experiment.grid": "0.5, 1, 2",
                                "ut.num_users": 20,
                                "ut.num_files": 100})
        self.assertNondecreasing([values[scale, "greedy"]
                                  for scale in (0.5, 1.0, 2.0)])


class TestBsGap(unittest.TestCase):
    """
    Failure probabilities of the default base station setting: coded
    caching strictly ahead of the uncoded placement, with its lead over
    MPC growing with the request skew.
    """

    def test_coded_lead_grows_with_skew(self):
        grid = (0.4, 0.7, 1.0, 1.3, 1.6)
        config = load_experiment(None, user_config=None, overrides={
            "experiment.strategies": "coded, uncoded_local, mpc",
            "experiment.replicates": 2,
            "experiment.chart": "false",
            "bs.num_paths": 60,
            "bs.restarts": 2,
            "bs.milp_time_limit_s": 30,
        })
        self.assertEqual(config.grid, grid)
        values = dict(((r.grid_value, r.strategy), r.value)
                      for r in run_experiment(config)
                      if r.metric == "failure_prob")
        for gamma in grid:
            self.assertLess(values[gamma, "coded"],
                            values[gamma, "uncoded_local"] - 0.005, gamma)
        gaps = [values[gamma, "mpc"] - values[gamma, "coded"]
                for gamma in grid]
        drops = [before - after for before, after in zip(gaps, gaps[1:])
                 if after < before]
        self.assertLessEqual(len(drops), 1, gaps)
        self.assertTrue(all(drop <= 0.005 for drop in drops), gaps)


class TestReplayExperiment(unittest.TestCase):

    def test_replay_rows_track_analytic_rows(self):
        config = load_experiment(data_path("small_bs.cfg"), user_config=None,
                                 overrides={"experiment.trials": 4000,
                                            "experiment.grid": "1.0"})
        rows = run_experiment(config)
        self.assertIn("failure_prob_replay", metric_names(config))
        analytic = dict((r.strategy, r) for r in rows
                        if r.metric == "failure_prob")
        for r in rows:
            if r.metric != "failure_prob_replay":
                continue
            self.assertGreater(r.std_error, 0.0)
            self.assertLessEqual(abs(r.value - analytic[r.strategy].value),
                                 max(0.02, 4 * r.std_error))

    def test_trace_experiment(self):
        config = load_experiment(data_path("trace_bs.cfg"), user_config=None)
        rows = run_experiment(config)
        self.assertEqual(len(rows), 2 * 2 * 2)
        for rate in (0.05, 0.1):
            failures = dict((r.strategy, r.value) for r in rows
                            if r.grid_value == rate and
                            r.metric == "failure_prob")
            self.assertLessEqual(failures["coded"], failures["mpc"] + 1e-12)


class TestCharts(unittest.TestCase):

    def test_chart_lines(self):
        rows = [ResultRow("gamma", g, s, "failure_prob", v, 0.0, 0)
                for g, s, v in [(1.0, "mpc", 0.5), (0.5, "mpc", 0.7),
                                (0.5, "coded", 0.4), (1.0, "coded", 0.2)]]
        figure = chart(rows, "failure_prob")
        lines = figure.axes[0].get_lines()
        self.assertEqual([line.get_gid() for line in lines], ["mpc", "coded"])
        self.assertEqual(list(lines[0].get_xdata()), [0.5, 1.0])
        self.assertEqual(figure.axes[0].get_xlabel(), "gamma")

    def test_format_rows(self):
        rows = [ResultRow("rate", 0.1, "coded", "failure_prob",
                          1.0 / 3, 0.0, 7)]
        self.assertEqual(format_rows(rows).splitlines()[1],
                         "rate,0.1,coded,failure_prob,0.333333333,0,7")


class TestCli(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        patcher = mock.patch("sys.stdout", new_callable=io.StringIO)
        self.stdout = patcher.start()
        self.addCleanup(patcher.stop)
        patcher = mock.patch("sys.stderr", new_callable=io.StringIO)
        self.stderr = patcher.start()
        self.addCleanup(patcher.stop)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_error_line(self):
        self.assertEqual(cli._error("bs.rate", "must be\npositive"), 1)
        self.assertEqual(self.stderr.getvalue(),
                         "error: field=bs.rate message=must be positive\n")

    def test_guarded(self):
        def broken():
            raise ConfigError("experiment.grid", "empty grid")
        self.assertEqual(cli._guarded(broken), 1)
        self.assertEqual(cli._guarded(lambda: None), None)
        self.assertIn("field=experiment.grid", self.stderr.getvalue())

    def test_sweep_reports_config_errors(self):
        bad = self.path("bad.cfg")
        write_text(bad, u"[experiment]\nstrategies =\n")
        self.assertEqual(cli.sweep(config=bad, out=self.path("out")), 1)
        self.assertEqual(self.stderr.getvalue(),
                         "error: field=experiment.strategies "
                         "message=empty strategy list\n")
        self.assertFalse(os.path.exists(self.path("out")))

    def test_sweep(self):
        out = self.path("out")
        self.assertIsNone(cli.sweep(config=data_path("small_ut.cfg"),
                                    out=out, seed=5))
        lines = read_text(os.path.join(out, "results.csv")).splitlines()
        self.assertTrue(all(line.endswith(",5") for line in lines[1:]))
        self.assertIn("Wrote %s" % os.path.join(out, "results.csv"),
                      self.stdout.getvalue())

    def test_estimate_optimize_evaluate(self):
        model = self.path("transitions.csv")
        placement = self.path("placement.csv")
        self.assertIsNone(cli.estimate(source=data_path("cells.csv"),
                                       kind="bs", out=model))
        self.assertIsNone(cli.optimize(model=model, strategy="coded",
                                       out=placement,
                                       config=data_path("small_bs.cfg")))
        chosen = read_placement(placement)
        self.assertEqual((chosen.num_nodes, chosen.num_files), (3, 5))
        self.assertIsNone(cli.evaluate(placement=placement, model=model,
                                       kind="bs",
                                       config=data_path("small_bs.cfg"),
                                       trials=500))
        output = self.stdout.getvalue()
        for name in ("failure_prob ", "served_fraction ",
                     "failure_prob_replay "):
            self.assertIn(name, output)

    def test_estimate_contacts(self):
        model = self.path("contacts.csv")
        self.assertIsNone(cli.estimate(source=data_path("contacts.csv"),
                                       kind="ut", out=model, window=1000.0,
                                       num_users=4))
        self.assertEqual(read_contact_model(model).num_users, 4)

    def test_estimate_errors(self):
        self.assertEqual(cli.estimate(source=self.path("absent.csv")), 1)
        self.assertIn("field=source", self.stderr.getvalue())
        self.assertEqual(cli.estimate(source=data_path("cells.csv"),
                                      kind="car"), 1)
        self.assertIn("field=kind", self.stderr.getvalue())

    def test_describe(self):
        self.assertIsNone(cli.describe(config=data_path("small_ut.cfg")))
        lines = self.stdout.getvalue().splitlines()
        self.assertTrue(lines[0].startswith("experiment.kind "))
        self.assertTrue(any(line.startswith("ut.num_users ") and
                            "= 6 " in line and
                            "# Number of user terminals" in line
                            for line in lines))
        self.assertFalse(any(line.startswith("bs.") for line in lines))
        self.assertEqual(cli.describe(config=self.path("absent.cfg")), 1)
        self.assertIn("cannot read", self.stderr.getvalue())

    def test_selftest(self):
        self.assertEqual(cli.selftest(scale=0.02, seed=1), 0)
        output = self.stdout.getvalue()
        for suite in ("greedy_guarantee", "submodularity", "coded_optimality",
                      "coded_failure", "projection", "uncoded_exactness"):
            self.assertIn(suite, output)


if __name__ == "__main__":
    unittest.main()
