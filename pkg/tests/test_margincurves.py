# -*- coding: utf-8 -*-
"""
Tests objects to handle margin curves and lattice margin scans

"""
import json
import math
from unittest import TestCase

import numpy as np

from torusvekua.agg import MarginCurve, MarginCurves, save_margins
from torusvekua.margincurves import (
    DEGENERATE,
    FAIL,
    margin_scan,
    PASS,
    shell_minima,
)
from torusvekua.spectral import lattice
from torusvekua.util import DomainError
from torusvekua.weightseq import make_gevrey

from .conftest import TEST_BASEDIR


class TestsMarginCurves(TestCase):
    """Unit Tests for the margin curve containers."""

    def test_curve(self):
        """Test the MarginCurve object."""
        radii = np.arange(1, 11)
        values = np.linspace(2.0, -1.0, 10)
        style = {"color": "k", "linewidth": 0.5, "linestyle": "-"}

        empty_curve = MarginCurve()
        self.assertDictEqual(empty_curve.to_dict(), {})
        self.assertEqual(
            str(empty_curve), "<Empty MarginCurve (label: None)>"
        )
        if empty_curve:  # Existence test
            raise AssertionError()

        curve = MarginCurve(radii, values, eps=0.5, style=style, label="c")
        self.assertEqual(
            str(curve), "<MarginCurve 10 shells (eps: 0.5, label: c)>"
        )
        curve_d = MarginCurve(**curve.to_dict())
        self.assertListEqual(curve.radii.tolist(), curve_d.radii.tolist())
        self.assertDictEqual(curve.to_dict(), curve_d.to_dict())

        curve_js = MarginCurve().from_json(curve.to_json())
        if not curve_js:  # Existence test
            raise AssertionError()
        self.assertDictEqual(
            json.loads(curve.to_json()), json.loads(curve_js.to_json())
        )
        self.assertListEqual(
            curve.running_min.tolist(), values.tolist()
        )

        # infinite margins survive the JSON export as strings
        inf_curve = MarginCurve([1, 2], [0.5, -math.inf], eps=1.0)
        self.assertListEqual(inf_curve.to_dict()["values"], [0.5, "-inf"])
        inf_back = MarginCurve().from_json(inf_curve.to_json())
        self.assertEqual(inf_back.values[1], -math.inf)

        rows = curve.to_csv_rows()
        self.assertEqual(len(rows), 10)
        self.assertEqual(rows[0], "c,0.5,1,2")

    def test_curves_family(self):
        """Family of curves, CSV export and off-screen plot."""
        import matplotlib.pyplot as plt

        radii = np.arange(0, 20)
        curves = MarginCurves(
            [
                MarginCurve(
                    radii, np.sqrt(radii + eps), eps=eps, label=f"{eps}"
                )
                for eps in (0.1, 1.0, 10.0)
            ]
            + [MarginCurve([1], [math.inf], eps=2.0, label="empty")],
            family_label="test family",
        )
        self.assertEqual(str(curves), "<4 MarginCurves (label: test family)>")
        self.assertEqual(curves[1].eps, 1.0)

        text = curves.to_csv()
        lines = text.splitlines()
        self.assertEqual(lines[0], "curve,eps,shell_radius,min_log_margin")
        self.assertEqual(len(lines), 1 + 3 * 20 + 1)

        fig, ax = plt.subplots(figsize=(8, 6))
        ax = curves.plot(ax)
        self.assertEqual(ax.get_title(), "test family")
        self.assertEqual(len(ax.lines), 3)
        plt.close(fig)

        path = save_margins(curves, TEST_BASEDIR / "margin_curves.png")
        self.assertTrue(path.exists())

    def test_shell_minima(self):
        """Per-shell minimum with empty shells at +inf."""
        out = shell_minima(
            np.array([1, 1, 3]), np.array([2.0, 1.0, 5.0]), 1, 3
        )
        self.assertListEqual(out.tolist(), [1.0, math.inf, 5.0])


class TestsMarginScan(TestCase):
    """Unit Tests for the lattice margin scan and its verdicts."""

    def test_pass_on_range(self):
        """A constant quantity against the analytic envelope passes."""
        points = lattice(1, 50, floor=1)
        result = margin_scan(
            points, np.zeros(len(points)), make_gevrey(1), [1.0], 1, 50
        )
        self.assertEqual(result.verdict, PASS)
        self.assertIsNone(result.witness)
        scan = result.scans[0]
        self.assertAlmostEqual(scan.log_c, math.log(2.0), places=12)
        self.assertAlmostEqual(scan.c_eps, 2.0, places=12)
        self.assertEqual(scan.drop, 0.0)
        self.assertEqual(result.curves.size, 1)
        self.assertEqual(len(scan.curve.radii), 50)
        self.assertEqual(result.to_dict()["verdict"], PASS)

    def test_fail_witness(self):
        """Exponentially small quantities fail with a witness."""
        points = lattice(1, 50, floor=1)
        norms = np.abs(points[:, 0]).astype(float)
        result = margin_scan(
            points, -norms, make_gevrey(1), [0.1, 1.0], 1, 50, label="decay"
        )
        self.assertEqual(result.verdict, FAIL)
        first = result.scans[0]
        self.assertEqual(first.verdict, FAIL)
        self.assertGreater(first.drop, 6.9)
        # ties in the norm resolve lexicographically
        self.assertEqual(first.witness, (-50,))
        self.assertEqual(result.witness, (-50,))
        self.assertEqual(result.to_dict()["witness"], [-50])
        self.assertTrue(first.curve._label.startswith("decay eps="))

    def test_zero_points(self):
        """Zeros of the quantity override the margin verdict."""
        points = lattice(1, 10, floor=1)
        zero_mask = points[:, 0] == 3
        result = margin_scan(
            points,
            np.zeros(len(points)),
            make_gevrey(2),
            [1.0],
            1,
            10,
            zero_mask=zero_mask,
        )
        self.assertEqual(result.verdict, DEGENERATE)
        self.assertListEqual(result.zeros, [(3,)])
        self.assertEqual(result.witness, (3,))
        self.assertEqual(result.scans[0].c_eps, 0.0)

        result = margin_scan(
            points,
            np.zeros(len(points)),
            make_gevrey(2),
            [1.0],
            1,
            10,
            zero_mask=zero_mask,
            zero_verdict=FAIL,
        )
        self.assertEqual(result.verdict, FAIL)

    def test_bad_ranges(self):
        """Invalid scan ranges raise DomainError."""
        ws = make_gevrey(2)
        points = lattice(2, 3)
        values = np.zeros(len(points))
        with self.assertRaises(DomainError):
            margin_scan(points, values, ws, [1.0], 0.5, 3)
        with self.assertRaises(DomainError):
            margin_scan(points, values, ws, [1.0], 4, 3)
        with self.assertRaises(DomainError):
            margin_scan(points, values, ws, [], 1, 3)
        with self.assertRaises(DomainError):
            margin_scan(np.array([[10, 10]]), [0.0], ws, [1.0], 1, 3)
