# -*- coding: utf-8 -*-
"""
Tests for weight sequences, associated functions and the Delta(k) calculus

"""
import json
import math
from unittest import TestCase

import numpy as np

from torusvekua.util import DomainError, ScanLimitError, SpecFormatError
from torusvekua.weightseq import (
    DeltaIndex,
    delta_sum_identity,
    enumerate_delta,
    gevrey_bounds_check,
    lemma_suite,
    log_assoc_inf,
    log_assoc_inf_array,
    make_gevrey,
    make_table,
    parse_weights,
    partition_number,
    product_bound_check,
    sup_squared_check,
    validate,
    WeightSequence,
)

from .conftest import write_json

LOG2 = math.log(2.0)


class TestsWeightSequence(TestCase):
    """Unit Tests for weight sequences."""

    def test_make_gevrey(self):
        """Gevrey sequences m_j = (j!)^(s-1) and their constant H."""
        analytic = make_gevrey(1)
        self.assertEqual(analytic.log_m(7), 0.0)
        self.assertEqual(analytic.H, 1.0)

        ws = make_gevrey(2)
        self.assertAlmostEqual(ws.log_m(3), math.log(6), places=12)
        self.assertEqual(ws.H, 2.0)
        self.assertEqual(str(ws), "<WeightSequence gevrey s=2.0 H=2>")

        self.assertAlmostEqual(
            make_gevrey(3).log_m(4), 6.3561, places=4
        )
        np.testing.assert_allclose(
            ws.log_m(np.arange(5)),
            [math.lgamma(j + 1) for j in range(5)],
            atol=1e-12,
        )
        with self.assertRaises(DomainError):
            make_gevrey(0.5)

    def test_table_sequence(self):
        """Table sequences extend with the last increment."""
        ws = make_table([0.0, 0.0, 0.5, 1.5])
        self.assertEqual(ws.log_m(3), 1.5)
        self.assertEqual(ws.log_m(5), 3.5)
        np.testing.assert_allclose(
            ws.log_m(np.array([0, 2, 4, 6])), [0.0, 0.5, 2.5, 4.5]
        )
        with self.assertRaises(DomainError):
            WeightSequence(kind="table", table=(0.0,))
        with self.assertRaises(DomainError):
            WeightSequence(kind="beurling")

    def test_validate(self):
        """Properties i-iii and the H estimate."""
        report = validate(make_gevrey(2), 32)
        self.assertTrue(report.passed)
        self.assertTrue(math.isfinite(report.H_estimate))
        self.assertLessEqual(report.H_estimate, 2.0)

        constant = validate(make_table([0.0, 0.0, 0.0]), 16)
        self.assertTrue(constant.passed)
        self.assertAlmostEqual(constant.H_estimate, 1.0)

        # m_1 = 2 breaks property i only
        bad = validate(make_table([0.0, LOG2, 2 * LOG2, 3 * LOG2]), 16)
        self.assertFalse(bad.passed)
        self.assertFalse(bad.normalized)
        self.assertTrue(bad.log_convex)
        self.assertTrue(bad.stable)
        self.assertTrue(bad.failures[0].startswith("property i:"))

        nonconvex = validate(make_table([0.0, 0.0, 2.0, 2.5], H=100.0), 8)
        self.assertFalse(nonconvex.log_convex)

        with self.assertRaises(DomainError):
            validate(make_gevrey(2), 1)

    def test_serialization(self):
        """JSON export and import of weight sequences."""
        ws = make_gevrey(1.5)
        ws_js = WeightSequence.from_json(ws.to_json())
        self.assertEqual(ws, ws_js)
        self.assertDictEqual(
            json.loads(ws.to_json()), {"kind": "gevrey", "s": 1.5, "H": 2.0}
        )

        table = make_table([0.0, 0.0, 1.0], H=3.0, label="custom")
        table_js = WeightSequence.from_json(table.to_json())
        self.assertEqual(table, table_js)
        self.assertIn("custom", repr(table_js))

        with self.assertRaises(SpecFormatError) as ctx:
            WeightSequence.from_dict({"kind": "gevrey"})
        self.assertEqual(ctx.exception.field, "s")
        with self.assertRaises(SpecFormatError):
            WeightSequence.from_dict({"kind": "other"})

    def test_parse_weights(self):
        """Descriptors "gevrey:S", dicts and JSON files."""
        self.assertEqual(parse_weights("gevrey:2"), make_gevrey(2))
        self.assertEqual(
            parse_weights({"kind": "gevrey", "s": 3}), make_gevrey(3)
        )
        path = write_json(
            "weights_table.json", {"kind": "table", "log_m": [0, 0, 1, 3]}
        )
        self.assertEqual(parse_weights(path).table, (0, 0, 1, 3))
        ws = make_gevrey(2)
        self.assertIs(parse_weights(ws), ws)
        for bad in ("gevrey:x", "missing.json", "table"):
            with self.assertRaises(SpecFormatError):
                parse_weights(bad)


class TestsAssociatedFunction(TestCase):
    """Unit Tests for the log inf_j m_j j!/(eps t)^j scan."""

    def test_known_values(self):
        """Direct scan oracles."""
        for ws in (make_gevrey(1), make_gevrey(2), make_gevrey(3)):
            self.assertEqual(log_assoc_inf(ws, 1.0, 1.0), 0.0)
            self.assertEqual(log_assoc_inf(ws, 0.5, 1.0), 0.0)

        # inf_j (j!)^2 / 100^j, attained at j = 9, 10
        self.assertAlmostEqual(
            log_assoc_inf(make_gevrey(2), 1.0, 100.0), -15.8429, places=3
        )
        # inf_j j! / 10^j, attained at j = 9, 10
        self.assertAlmostEqual(
            log_assoc_inf(make_gevrey(1), 1.0, 10.0), -7.92144, places=4
        )

    def test_array_matches_scalar(self):
        """The vectorized scan agrees with the scalar one."""
        ws = make_gevrey(1.5)
        t = np.array([1.0, 2.0, 10.0, 57.5, 1000.0])
        expected = [log_assoc_inf(ws, 0.3, v) for v in t]
        np.testing.assert_allclose(
            log_assoc_inf_array(ws, 0.3, t), expected, atol=1e-12
        )
        grid = log_assoc_inf_array(ws, 0.3, t.reshape(5, 1))
        self.assertEqual(grid.shape, (5, 1))

    def test_monotonicity(self):
        """Nonincreasing in t and in eps."""
        ws = make_gevrey(2)
        t = np.linspace(1.0, 500.0, 200)
        for eps in (0.1, 1.0, 10.0):
            values = log_assoc_inf_array(ws, eps, t)
            self.assertTrue(np.all(np.diff(values) <= 1e-12))
            self.assertTrue(np.all(values <= 0.0))
        by_eps = [log_assoc_inf(ws, eps, 20.0) for eps in (0.1, 1, 10)]
        self.assertTrue(by_eps[0] >= by_eps[1] >= by_eps[2])

    def test_errors(self):
        """Domain and resource errors."""
        ws = make_gevrey(1)
        with self.assertRaises(DomainError):
            log_assoc_inf(ws, 0.0, 2.0)
        with self.assertRaises(DomainError):
            log_assoc_inf(ws, 1.0, 0.5)
        with self.assertRaises(DomainError):
            log_assoc_inf_array(ws, 1.0, [0.5, 2.0])
        with self.assertRaises(ScanLimitError):
            log_assoc_inf(ws, 1e6, 1.0)
        with self.assertRaises(ScanLimitError):
            log_assoc_inf_array(ws, 1e6, [1.0])


class TestsDeltaCalculus(TestCase):
    """Unit Tests for Delta(k) and its summation identities."""

    def test_enumerate_delta(self):
        """Delta(k) enumeration and its cardinality."""
        self.assertEqual(enumerate_delta(0), [DeltaIndex(())])
        self.assertListEqual(
            [d.gamma for d in enumerate_delta(2)], [(0, 1), (2, 0)]
        )
        self.assertEqual(len(enumerate_delta(5)), 7)
        for k in range(21):
            self.assertEqual(len(enumerate_delta(k)), partition_number(k))
        self.assertEqual(partition_number(10), 42)
        self.assertEqual(partition_number(20), 627)

        gammas = [d.gamma for d in enumerate_delta(6)]
        self.assertListEqual(gammas, sorted(gammas))
        self.assertEqual(len(set(gammas)), len(gammas))

        with self.assertRaises(DomainError):
            enumerate_delta(-1)
        with self.assertRaises(ScanLimitError):
            enumerate_delta(41)

    def test_delta_index(self):
        """|gamma| and gamma!."""
        d = DeltaIndex((2, 0))
        self.assertEqual((d.k, d.order, d.factorial), (2, 2, 2))
        d = DeltaIndex((1, 0, 1, 0))
        self.assertEqual((d.order, d.factorial), (2, 1))
        with self.assertRaises(DomainError):
            DeltaIndex((1, 1))

    def test_sum_identity(self):
        """sum |gamma|!/gamma! R^|gamma| = R (1+R)^(k-1)."""
        self.assertEqual(delta_sum_identity(1, 3.0), (3.0, 3.0))
        self.assertEqual(delta_sum_identity(2, 1.0), (2.0, 2.0))
        lhs, rhs = delta_sum_identity(6, 0.5)
        self.assertAlmostEqual(lhs, 3.796875, places=12)
        self.assertAlmostEqual(rhs, 3.796875, places=12)
        for k in range(1, 13):
            for r_val in (0.25, 0.5, 1.0, 2.0, 4.0):
                lhs, rhs = delta_sum_identity(k, r_val)
                self.assertLessEqual(abs(lhs - rhs), 1e-9 * rhs)
        with self.assertRaises(DomainError):
            delta_sum_identity(0, 1.0)
        with self.assertRaises(DomainError):
            delta_sum_identity(3, -1.0)

    def test_product_bound(self):
        """m_|gamma| prod m_l^gamma_l <= m_k over Delta(k)."""
        for s in (1.0, 1.5, 2.0, 3.0):
            ws = make_gevrey(s)
            for k in range(1, 13):
                self.assertLessEqual(product_bound_check(ws, k), 1e-9)

    def test_sup_squared(self):
        """(sup rho^j/(m_j j!))^2 <= sup (2H rho)^j/(m_j j!)."""
        for s in (1.5, 2.0, 3.0):
            ws = make_gevrey(s)
            for rho in (1.0, 10.0, 1e3, 1e6):
                lhs, rhs = sup_squared_check(ws, rho)
                self.assertLessEqual(lhs, rhs + 1e-9)

    def test_gevrey_bounds(self):
        """Sandwich of sup_j t^j/(j!)^s."""
        lower, mid, upper = gevrey_bounds_check(2.0, 100.0)
        self.assertAlmostEqual(lower, 10 - 2 * LOG2, places=12)
        self.assertAlmostEqual(mid, 15.8429, places=3)
        self.assertAlmostEqual(upper, 20.0, places=12)

        lower, mid, upper = gevrey_bounds_check(2.0, 1.0)
        self.assertEqual(mid, 0.0)
        self.assertAlmostEqual(lower, 1 - 2 * LOG2, places=12)
        self.assertAlmostEqual(upper, 2.0, places=12)

        lower, mid, upper = gevrey_bounds_check(3.0, 1e6)
        self.assertAlmostEqual(upper, 300.0, places=9)
        self.assertTrue(lower <= mid <= upper)

        for s in (1.5, 2.0, 3.0):
            for t in (1.0, 10.0, 1e3, 1e6):
                lower, mid, upper = gevrey_bounds_check(s, t)
                self.assertTrue(lower - 1e-9 <= mid <= upper + 1e-9)

        with self.assertRaises(DomainError):
            gevrey_bounds_check(1.0, 10.0)

    def test_lemma_suite(self):
        """All checks pass for Gevrey sequences, not for m_1 = 2."""
        for s in (1.5, 2.0, 3.0):
            report = lemma_suite(make_gevrey(s))
            self.assertTrue(report["passed"])
            self.assertEqual(len(report["delta_cardinality"]), 21)
            self.assertEqual(len(report["gevrey_bounds"]), 4)
            self.assertEqual(len(report["sum_identity"]), 60)

        bad = lemma_suite(make_table([0.0, LOG2, 2 * LOG2]))
        self.assertFalse(bad["passed"])
        self.assertFalse(bad["validation"]["normalized"])
        self.assertNotIn("gevrey_bounds", bad)
