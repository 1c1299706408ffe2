# -*- coding: utf-8 -*-
"""
Tests utilities

"""
import json
import math
import os
from unittest import mock, TestCase

import numpy as np

from .conftest import TEST_BASEDIR

PATH_CONFIG_UPDATE = str(TEST_BASEDIR.parent / "test_run_config_update.json")


class TestsTorusUtils(TestCase):
    """Unit Tests for configuration, JSON helpers and errors."""

    def test_load_run_config(self):
        """Test the run config loading with JSON files/dicts/names."""
        from torusvekua.util import DEFAULT_RUN_CONFIG_FILE, load_config

        default_config = load_config()
        self.assertEqual(default_config["scan"]["xi_max"], 50)
        self.assertEqual(
            default_config["tolerances"]["tol_zero_classify"], 1e-30
        )

        # Passing dict vs JSON path:
        config_2 = load_config(DEFAULT_RUN_CONFIG_FILE)
        with open(DEFAULT_RUN_CONFIG_FILE) as f:
            config_3 = load_config(json.load(f))
        self.assertEqual(config_2, config_3)
        self.assertEqual(default_config, config_2)

        # Update config:
        config_custom = load_config(PATH_CONFIG_UPDATE)
        self.assertNotEqual(default_config, config_custom)
        self.assertEqual(config_custom["scan"]["xi_max"], 12)
        self.assertEqual(config_custom["scan"]["eps_list"], [1.0])
        self.assertEqual(config_custom["scan"]["tau_max"], 20)
        self.assertEqual(config_custom["grid"]["N"], 16)
        self.assertEqual(config_custom["grid"]["Nt"], 256)
        self.assertNotIn("test_fake_param", config_custom)

        # Named presets:
        self.assertEqual(load_config("default"), default_config)
        quick = load_config("quick")
        self.assertEqual(quick["scan"]["xi_max"], 16)
        self.assertEqual(quick["scan"]["drop_tol"], 6.9)
        thorough = load_config("thorough")
        self.assertEqual(thorough["tolerances"]["residual_varcoef"], 1e-4)
        self.assertEqual(thorough["tolerances"]["residual"], 1e-10)

    def test_bad_run_config(self):
        """Unknown config names and types are domain errors."""
        from torusvekua.util import DomainError, load_config

        with self.assertRaises(DomainError):
            load_config("not-a-preset")
        with self.assertRaises(DomainError):
            load_config(["quick"])

    def test_merge_run_config(self):
        """Sections take new keys, unknown sections are dropped."""
        from torusvekua.util import _merge_run_config, SpecFormatError

        old = {"weights": "gevrey:2", "scan": {"xi_max": 50}}
        new = {"weights": "gevrey:3", "scan": {"tau_max": 9}, "plot": 5}
        with self.assertLogs(level="WARNING") as logs:
            merged = _merge_run_config(old, new)
        self.assertIn("plot", logs.output[0])
        self.assertDictEqual(
            merged,
            {"weights": "gevrey:3", "scan": {"xi_max": 50, "tau_max": 9}},
        )
        self.assertDictEqual(_merge_run_config(None, new), new)

        tols = _merge_run_config(
            {"tolerances": {"tol_zero": 1e-10}},
            {"tolerances": {"tol_zero": 0, "residual": 1e-8}},
        )["tolerances"]
        self.assertIsInstance(tols["tol_zero"], float)
        self.assertEqual(tols["residual"], 1e-8)
        for bad in ("small", True, None):
            with self.assertRaises(SpecFormatError) as ctx:
                _merge_run_config(
                    {"tolerances": {}}, {"tolerances": {"residual": bad}}
                )
            self.assertEqual(ctx.exception.field, "tolerances.residual")
        with self.assertRaises(SpecFormatError):
            _merge_run_config(
                {"scan": {"a": {"b": {}}}}, {"scan": {"a": {"b": {"c": 1}}}}
            )

    def test_max_workers(self):
        """Thread cap from the environment."""
        from torusvekua.util import ENV_THREADS, max_workers

        with mock.patch.dict(os.environ, {ENV_THREADS: "3"}):
            self.assertEqual(max_workers(), 3)
        with mock.patch.dict(os.environ, {ENV_THREADS: "0"}):
            self.assertEqual(max_workers(), 1)
        with mock.patch.dict(os.environ, {ENV_THREADS: "many"}):
            self.assertEqual(max_workers(), 1)
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertGreaterEqual(max_workers(), 1)

    def test_json_helpers(self):
        """Numpy, complex and non-finite values in deterministic JSON."""
        from torusvekua.util import dump_json, to_jsonable

        data = {
            "b": np.array([1.5, np.inf]),
            "a": complex(1, -2),
            "c": (np.int64(3), np.float64(-math.inf), math.nan),
            "d": np.bool_(True),
        }
        clean = to_jsonable(data)
        self.assertDictEqual(
            clean,
            {
                "b": [1.5, "inf"],
                "a": {"re": 1.0, "im": -2.0},
                "c": [3, "-inf", "nan"],
                "d": True,
            },
        )
        path = TEST_BASEDIR / "dump.json"
        text = dump_json(data, path)
        self.assertEqual(text, dump_json(data))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        with open(path) as f:
            self.assertDictEqual(json.load(f), clean)

        # shortest round trip, never more than 17 significant digits
        self.assertEqual(dump_json(1 / 3), "0.3333333333333333")
        self.assertEqual(dump_json(0.1), "0.1")

    def test_parse_complex(self):
        """Complex numbers from numbers or {re, im} mappings."""
        from torusvekua.util import parse_complex, SpecFormatError

        self.assertEqual(parse_complex(2, "A"), 2 + 0j)
        self.assertEqual(parse_complex({"im": 3}, "A"), 3j)
        self.assertEqual(parse_complex({"re": 1, "im": -1}, "A"), 1 - 1j)
        self.assertEqual(parse_complex(2 - 1j, "A"), 2 - 1j)
        for bad in ("1+2j", True, {"x": 1}, {"re": "a"}):
            with self.assertRaises(SpecFormatError) as ctx:
                parse_complex(bad, "alpha")
            self.assertEqual(ctx.exception.field, "alpha")

    def test_errors(self):
        """Exception payloads."""
        from torusvekua.util import (
            ConditionError,
            IncompatibleDataError,
            SmallDivisorError,
        )

        exc = SmallDivisorError(np.array([2, -1]), 1e-15)
        self.assertEqual(exc.xi, (2, -1))
        self.assertIsInstance(exc, ArithmeticError)
        self.assertIn("(2, -1)", str(exc))

        exc = IncompatibleDataError([{"xi": [3]}, {"xi": [-3]}])
        self.assertEqual(len(exc.certificates), 2)
        self.assertIn("(3,)", str(exc))

        self.assertDictEqual(ConditionError("nope").report, {})
        self.assertDictEqual(
            ConditionError("nope", {"a": 1}).report, {"a": 1}
        )

    def test_timeit(self):
        """The timing decorator keeps name, docs and result."""
        from torusvekua.util import reset_timings, timeit, timings_summary

        @timeit("adding")
        def add(a, b):
            """Add."""
            return a + b

        @timeit("failing")
        def fail():
            raise ValueError("boom")

        reset_timings()
        with self.assertLogs(level="INFO") as logs:
            self.assertEqual(add(1, b=2), 3)
            self.assertEqual(add(2, b=2), 4)
            with self.assertRaises(ValueError):
                fail()
        self.assertEqual(add.__name__, "add")
        self.assertEqual(add.__doc__, "Add.")
        self.assertIn("adding took", logs.output[0])
        summary = timings_summary()
        self.assertEqual(list(summary), ["adding", "failing"])
        self.assertEqual(summary["adding"]["calls"], 2)
        self.assertEqual(summary["failing"]["calls"], 1)
        reset_timings()
        self.assertDictEqual(timings_summary(), {})
