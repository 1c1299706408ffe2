# -*- coding: utf-8 -*-
"""Margin curves of lattice scans and the shared scan verdict logic."""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import AnyStr, Dict, List, Optional, Sequence, Tuple

import numpy as np
from matplotlib.axes import Axes

from .util import DomainError
from .weightseq import WeightSequence, log_assoc_inf_array

PASS = "pass-on-range"
FAIL = "fail-witness"
DEGENERATE = "degenerate"


class MarginCurve:
    """Per-shell minimum of a log margin, for one scale eps."""

    def __init__(
        self,
        radii: np.ndarray = None,
        values: np.ndarray = None,
        eps: float = None,
        style: dict = None,
        label: str = None,
    ) -> None:
        """Create the MarginCurve object."""
        self.radii = np.array(radii if radii is not None else [], dtype=int)
        self.values = np.array(
            values if values is not None else [], dtype=float
        )
        self.eps = eps
        self.style: dict = style or {}
        self._label = label

    def __bool__(self) -> bool:
        """Return the valid existence of the curve."""
        return len(self.radii) > 0 and len(self.radii) == len(self.values)

    def __repr__(self) -> str:
        """Object string representation."""
        if self:
            return (
                f"<MarginCurve {len(self.radii)} shells "
                f"(eps: {self.eps}, label: {self._label})>"
            )
        return f"<Empty MarginCurve (label: {self._label})>"

    @property
    def running_min(self) -> np.ndarray:
        return np.minimum.accumulate(self.values)

    def to_dict(self) -> Dict:
        """Return the curve as a dict."""
        if not self:
            return {}
        return {
            "radii": self.radii.tolist(),
            "values": [v if math.isfinite(v) else str(v) for v in self.values],
            "eps": self.eps,
            "style": self.style,
            "label": self._label,
        }

    def to_json(self) -> str:
        """Return the curve as a JSON string."""
        return json.dumps(self.to_dict())

    def from_json(self, json_str: AnyStr):
        """Load a curve from a JSON string."""
        data = json.loads(json_str)
        self.radii = np.array(data["radii"], dtype=int)
        self.values = np.array([float(v) for v in data["values"]])
        self.eps = data.get("eps")
        self.style = data.get("style") or {}
        self._label = data.get("label")
        return self

    def to_csv_rows(self) -> List[str]:
        """Rows `label,eps,shell_radius,min_log_margin`."""
        label = self._label or ""
        return [
            f"{label},{self.eps:.17g},{r},{v:.17g}"
            for r, v in zip(self.radii, self.values)
        ]

    def plot(self, ax: Axes) -> Axes:
        """Plot the curve (finite values only)."""
        finite = np.isfinite(self.values)
        if not finite.any():
            logging.info(f"MarginCurve (label:{self._label}) has no data")
            return ax
        ax.plot(
            self.radii[finite],
            self.values[finite],
            label=self._label,
            **self.style,
        )
        return ax


class MarginCurves:
    """Object to store a family of margin curves."""

    def __init__(
        self, curves: List[MarginCurve], family_label: str = None
    ) -> None:
        """Create the MarginCurves array object."""
        self.curves: List[MarginCurve] = curves
        self.size: int = len(self.curves)
        self.family_label: Optional[str] = family_label

    def __getitem__(self, item) -> MarginCurve:
        """Get item from the MarginCurve list."""
        return self.curves[item]

    def __repr__(self) -> str:
        """Object string representation."""
        return f"<{self.size} MarginCurves (label: {self.family_label})>"

    def to_csv(self) -> str:
        """CSV text with a header row, one line per shell and curve."""
        lines = ["curve,eps,shell_radius,min_log_margin"]
        for curve in self.curves:
            lines.extend(curve.to_csv_rows())
        return "\n".join(lines) + "\n"

    def plot(self, ax: Axes) -> Axes:
        """Plot the family curves."""
        [curve.plot(ax) for curve in self.curves]
        ax.set_xlabel("shell radius")
        ax.set_ylabel("min log margin")
        if self.family_label is not None:
            ax.set_title(self.family_label)
        return ax


@dataclass
class EpsScan:
    """Verdict of one margin scan at a fixed eps."""

    eps: float
    verdict: str
    log_c: float
    drop: float
    witness: Optional[Tuple[int, ...]]
    curve: MarginCurve

    @property
    def c_eps(self) -> float:
        return math.exp(self.log_c) if self.log_c > -700 else 0.0

    def to_dict(self) -> Dict:
        return {
            "eps": self.eps,
            "verdict": self.verdict,
            "log_C": self.log_c,
            "C": self.c_eps,
            "drop": self.drop,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass
class ScanResult:
    """Margin scans over several eps, with the combined verdict."""

    verdict: str
    scans: List[EpsScan] = field(default_factory=list)
    zeros: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def witness(self) -> Optional[Tuple[int, ...]]:
        for scan in self.scans:
            if scan.verdict != PASS:
                return scan.witness
        return None

    @property
    def curves(self) -> MarginCurves:
        return MarginCurves([s.curve for s in self.scans])

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "zeros": [list(z) for z in self.zeros],
            "scans": [s.to_dict() for s in self.scans],
        }


def shell_minima(
    shells: np.ndarray, values: np.ndarray, first: int, last: int
) -> np.ndarray:
    """Minimum of `values` per integer shell first..last (+inf if empty)."""
    out = np.full(last - first + 1, np.inf)
    np.minimum.at(out, shells - first, values)
    return out


def margin_scan(
    points: np.ndarray,
    log_quantity: np.ndarray,
    ws: WeightSequence,
    eps_list: Sequence[float],
    gamma_floor: float,
    xi_max: float,
    zero_mask: Optional[np.ndarray] = None,
    zero_verdict: str = DEGENERATE,
    drop_tol: float = 6.9,
    norms: Optional[np.ndarray] = None,
    label: str = "margin",
) -> ScanResult:
    """Scan log(quantity) - log inf_j m_j j!/(eps (1+|xi|))^j over a range.

    Points with gamma_floor <= |xi| <= xi_max take part. Per eps the
    verdict is fail-witness when the running minimum over shells drops by
    more than `drop_tol` across the outer half of the range, else
    pass-on-range with C_eps = exp(min margin). Points flagged by
    `zero_mask` make the whole scan `zero_verdict`.
    """
    if not 1 <= gamma_floor <= xi_max:
        raise DomainError(
            f"Need 1 <= gamma_floor <= xi_max, got {gamma_floor}, {xi_max}"
        )
    if not eps_list:
        raise DomainError("eps_list must not be empty")
    points = np.asarray(points)
    if norms is None:
        norms = np.sqrt((points.astype(float) ** 2).sum(axis=1))
    inside = (norms >= gamma_floor - 1e-12) & (norms <= xi_max + 1e-12)
    points, norms = points[inside], norms[inside]
    log_quantity = np.asarray(log_quantity, dtype=float)[inside]
    zero_mask = (
        np.zeros(len(points), dtype=bool)
        if zero_mask is None
        else np.asarray(zero_mask)[inside]
    )
    if not len(points):
        raise DomainError("No lattice point inside the scan range")

    order = np.lexsort(points.T[::-1])
    order = order[np.argsort(norms[order], kind="stable")]
    zeros = [tuple(int(v) for v in points[i]) for i in order if zero_mask[i]]

    radii_unique, inverse = np.unique(norms, return_inverse=True)
    shells = np.floor(norms).astype(int)
    first, last = int(shells.min()), int(shells.max())
    mid = first + (last - first) // 2
    radii = np.arange(first, last + 1)

    scans = []
    for eps in eps_list:
        log_env = log_assoc_inf_array(ws, eps, 1.0 + radii_unique)[inverse]
        margin = np.where(zero_mask, -np.inf, log_quantity - log_env)
        per_shell = shell_minima(shells, margin, first, last)
        curve = MarginCurve(
            radii, per_shell, eps=eps, label=f"{label} eps={eps:g}"
        )
        running = np.minimum.accumulate(per_shell)
        log_c = float(running[-1])
        if zeros:
            verdict, drop, witness = zero_verdict, math.inf, zeros[0]
        else:
            drop = (
                float(running[mid - first] - running[-1])
                if math.isfinite(log_c)
                else math.inf
            )
            best = order[np.argmin(margin[order])]
            witness = tuple(int(v) for v in points[best])
            if drop > drop_tol:
                verdict = FAIL
            else:
                verdict, witness = PASS, None
        scans.append(EpsScan(eps, verdict, log_c, drop, witness, curve))

    if zeros:
        verdict = zero_verdict
    elif any(s.verdict == FAIL for s in scans):
        verdict = FAIL
    else:
        verdict = PASS
    logging.info(
        f"{label} scan |xi| in [{gamma_floor}, {xi_max}] over "
        f"{len(points)} points: {verdict}"
    )
    return ScanResult(verdict, scans, zeros)
