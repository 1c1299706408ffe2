# -*- coding: utf-8 -*-
"""
Margin curves of torus scans, plotted off-screen.

Import this module first to set matplotlib to use the Agg backend.
"""
from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

# noinspection PyPep8
import matplotlib.pyplot as plt  # NOQA

# noinspection PyPep8
# noinspection PyUnresolvedReferences
from torusvekua.margincurves import MarginCurve, MarginCurves  # NOQA


def save_margins(
    curves: MarginCurves,
    path: Union[str, Path],
    figsize: Sequence[float] = (8, 6),
    **params,
) -> Path:
    """Plot a family of margin curves in a new figure and save it."""
    fig, ax = plt.subplots(figsize=figsize)
    try:
        curves.plot(ax)
        fig.savefig(str(path), **params)
    finally:
        plt.close(fig)
    return Path(path)
