# -*- coding: utf-8 -*-
"""Vekua-type operators on tori in Denjoy-Carleman classes."""
from .constcoef import ConstOperatorSpec
from .diophantine import cf_surrogate, DiophantineNumber
from .margincurves import MarginCurve, MarginCurves
from .spectral import GridFunction, PartialSpectrum, Spectrum
from .util import load_config
from .varcoef import VarOperatorSpec
from .weightseq import make_gevrey, make_table, WeightSequence

__all__ = [
    "cf_surrogate",
    "ConstOperatorSpec",
    "DiophantineNumber",
    "GridFunction",
    "load_config",
    "make_gevrey",
    "make_table",
    "MarginCurve",
    "MarginCurves",
    "PartialSpectrum",
    "Spectrum",
    "VarOperatorSpec",
    "WeightSequence",
]
