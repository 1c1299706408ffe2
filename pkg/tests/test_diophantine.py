# -*- coding: utf-8 -*-
"""
Tests for continued-fraction surrogates of irrational numbers

"""
import math
from unittest import TestCase

from torusvekua.diophantine import (
    cf_surrogate,
    convergent_witnesses,
    DiophantineNumber,
    irrationality_profile,
    is_liouville_like,
    parse_number,
)
from torusvekua.util import DomainError, ScanLimitError, SpecFormatError


class TestsDiophantine(TestCase):
    """Unit Tests for continued fractions and their convergents."""

    def test_convergents(self):
        """Exact convergents of the surrogates."""
        sqrt2 = cf_surrogate("sqrt2", depth=4)
        self.assertEqual(sqrt2.quotients, (1, 2, 2, 2, 2))
        self.assertListEqual(
            sqrt2.convergents(),
            [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)],
        )
        self.assertAlmostEqual(
            cf_surrogate("sqrt2").value, math.sqrt(2.0), places=12
        )
        golden = cf_surrogate("golden", depth=25)
        self.assertAlmostEqual(golden.value, (1 + math.sqrt(5)) / 2, 10)

        liouville = cf_surrogate("liouville_like", b=2, depth=3)
        self.assertEqual(liouville.quotients, (0, 2, 4, 64))
        self.assertEqual(liouville.convergents()[-1], (257, 578))
        self.assertEqual(liouville.label, "liouville_like(2, 3)")
        self.assertEqual(liouville.depth, 3)

    def test_errors(self):
        """Bad quotients, kinds and resource caps."""
        with self.assertRaises(DomainError):
            DiophantineNumber(())
        with self.assertRaises(DomainError):
            DiophantineNumber((1, 0, 2))
        with self.assertRaises(DomainError):
            cf_surrogate("pi")
        with self.assertRaises(DomainError):
            cf_surrogate("golden", depth=31)
        with self.assertRaises(DomainError):
            cf_surrogate("liouville_like", b=1)
        with self.assertRaises(ScanLimitError):
            cf_surrogate("liouville_like", b=2, depth=10)

    def test_from_value(self):
        """Float expansion stops before round-off quotients."""
        number = DiophantineNumber.from_value(math.sqrt(2.0))
        self.assertEqual(number.quotients[0], 1)
        self.assertTrue(all(a == 2 for a in number.quotients[1:]))
        self.assertLessEqual(number.convergents()[-1][1], 10 ** 7)

        exact = DiophantineNumber.from_value(0.75)
        self.assertEqual(exact.quotients, (0, 1, 3))
        self.assertEqual(DiophantineNumber.from_value(3.0).quotients, (3,))
        self.assertEqual(DiophantineNumber.from_value(0.2).quotients, (0, 5))
        self.assertEqual(
            DiophantineNumber.from_value(-0.75).quotients, (-1, 4)
        )
        self.assertEqual(
            DiophantineNumber.from_value(0.2).convergents()[-1], (1, 5)
        )
        with self.assertRaises(DomainError):
            DiophantineNumber.from_value(math.inf)

    def test_serialization(self):
        """JSON round trip and the accepted descriptors."""
        number = cf_surrogate("liouville_like", b=3, depth=2)
        number_js = DiophantineNumber.from_json(number.to_json())
        self.assertEqual(number, number_js)
        self.assertIn("[0; 3, 9]", str(number_js))

        self.assertEqual(parse_number(0.5), 0.5)
        self.assertEqual(parse_number(2), 2.0)
        self.assertEqual(parse_number("sqrt2(5)").quotients, (1,) + (2,) * 5)
        self.assertEqual(parse_number("golden").depth, 20)
        self.assertEqual(
            parse_number("liouville_like(2, 3)").convergents()[-1],
            (257, 578),
        )
        self.assertEqual(parse_number("liouville_like").depth, 6)
        self.assertEqual(
            parse_number({"quotients": [1, 1, 2]}).convergents()[-1], (5, 3)
        )
        for bad in (True, "e", {"q": [1]}, None):
            with self.assertRaises(SpecFormatError):
                parse_number(bad)

    def test_irrationality(self):
        """Liouville-like quotients give huge exponent estimates."""
        profile = irrationality_profile(cf_surrogate("sqrt2"))
        self.assertTrue(all(entry["mu"] < 2.6 for entry in profile))
        self.assertFalse(is_liouville_like(cf_surrogate("sqrt2")))
        self.assertFalse(is_liouville_like(cf_surrogate("golden")))

        liouville = cf_surrogate("liouville_like", b=2, depth=4)
        self.assertTrue(is_liouville_like(liouville))
        mus = [entry["mu"] for entry in irrationality_profile(liouville)]
        self.assertGreater(max(mus), 3.0)

        # too shallow to judge
        self.assertIsNone(is_liouville_like(cf_surrogate("sqrt2", depth=1)))

    def test_convergent_witnesses(self):
        """Convergents inside the scan ball."""
        liouville = cf_surrogate("liouville_like", b=2, depth=3)
        self.assertListEqual(
            convergent_witnesses(liouville, 700.0),
            [(0, 1), (1, 2), (4, 9), (257, 578)],
        )
        self.assertListEqual(
            convergent_witnesses(liouville, 10.0), [(0, 1), (1, 2), (4, 9)]
        )
        self.assertListEqual(convergent_witnesses(liouville, 0.5), [])
