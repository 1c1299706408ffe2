# -*- coding: utf-8 -*-
"""Weight sequences of Denjoy-Carleman classes and their calculus.

Every quantity is kept in log domain: `log_m(j) = log m_j`, and the
associated function `inf_j m_j j! / (eps t)^j` is returned as its log.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import AnyStr, Dict, Iterator, List, Optional, Sequence, Tuple
from typing import Union

import numpy as np
from scipy.special import gammaln

from .util import DomainError, ScanLimitError, SpecFormatError

# Scan caps
MAX_SCAN_INDEX = 100_000
MAX_DELTA_ORDER = 40
MAX_IDENTITY_ORDER = 20
NUM_INCREASES_STOP = 3
STABILITY_RANGE = 64

LOG_SLACK = 1e-9

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class WeightSequence:
    """Weight sequence `m_j` given by its logs, with stability constant H.

    `kind="gevrey"` uses m_j = (j!)^(s-1). `kind="table"` stores explicit
    values of log m_j; past the end of the table the last increment is
    repeated, which keeps the extension log-convex.
    """

    kind: str
    s: float = 1.0
    table: Tuple[float, ...] = ()
    H: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("gevrey", "table"):
            raise DomainError(f"Unknown weight sequence kind '{self.kind}'")
        if self.kind == "table" and len(self.table) < 2:
            raise DomainError("A table weight sequence needs log_m(0..1)")
        if self.H < 1:
            raise DomainError(f"H must be >= 1, got {self.H}")

    def __repr__(self) -> str:
        """Object string representation."""
        if self.kind == "gevrey":
            return f"<WeightSequence gevrey s={self.s} H={self.H:g}>"
        return (
            f"<WeightSequence table[{len(self.table)}] H={self.H:g} "
            f"(label: {self.label})>"
        )

    def log_m(self, j: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
        """Return log m_j for a nonnegative index or an array of indices."""
        if np.ndim(j) == 0:
            j = int(j)
            if self.kind == "gevrey":
                return (self.s - 1.0) * math.lgamma(j + 1)
            num = len(self.table)
            if j < num:
                return float(self.table[j])
            slope = self.table[-1] - self.table[-2]
            return self.table[-1] + (j - num + 1) * slope

        idx = np.asarray(j)
        if self.kind == "gevrey":
            return (self.s - 1.0) * gammaln(idx + 1.0)
        values = np.asarray(self.table, dtype=float)
        num = len(values)
        slope = values[-1] - values[-2]
        inside = np.clip(idx, 0, num - 1)
        return np.where(
            idx < num, values[inside], values[-1] + (idx - num + 1) * slope
        )

    def to_dict(self) -> Dict:
        """Return the weight sequence as a dict."""
        if self.kind == "gevrey":
            return {"kind": "gevrey", "s": self.s, "H": self.H}
        return {
            "kind": "table",
            "log_m": list(self.table),
            "H": self.H,
            "label": self.label,
        }

    def to_json(self) -> str:
        """Return the weight sequence as a JSON string."""
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict) -> "WeightSequence":
        """Build a weight sequence from its dict form."""
        kind = data.get("kind")
        if kind == "gevrey":
            if "s" not in data:
                raise SpecFormatError("s")
            return make_gevrey(float(data["s"]), H=data.get("H"))
        if kind == "table":
            if "log_m" not in data:
                raise SpecFormatError("log_m")
            return make_table(
                data["log_m"], H=data.get("H"), label=data.get("label", "")
            )
        raise SpecFormatError("kind")

    @classmethod
    def from_json(cls, json_str: AnyStr) -> "WeightSequence":
        """Load a weight sequence from a JSON string."""
        return cls.from_dict(json.loads(json_str))


@dataclass(frozen=True)
class DeltaIndex:
    """Multi-index gamma with sum(l * gamma_l) = k (Faa di Bruno set)."""

    gamma: Tuple[int, ...]

    def __post_init__(self):
        weight = sum((ell + 1) * g for ell, g in enumerate(self.gamma))
        if weight != len(self.gamma) or min(self.gamma, default=0) < 0:
            raise DomainError(f"{self.gamma} is not in Delta({self.k})")

    @property
    def k(self) -> int:
        return len(self.gamma)

    @property
    def order(self) -> int:
        """|gamma| = gamma_1 + ... + gamma_k."""
        return sum(self.gamma)

    @property
    def factorial(self) -> int:
        """gamma! = gamma_1! ... gamma_k!."""
        return math.prod(math.factorial(g) for g in self.gamma)


@dataclass
class ValidationReport:
    """Result of checking properties i-iii of a weight sequence."""

    j_max: int
    normalized: bool
    log_convex: bool
    stable: bool
    H_estimate: float
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.normalized and self.log_convex and self.stable

    def to_dict(self) -> Dict:
        return {
            "j_max": self.j_max,
            "normalized": self.normalized,
            "log_convex": self.log_convex,
            "stable": self.stable,
            "H_estimate": self.H_estimate,
            "failures": self.failures,
            "passed": self.passed,
        }


def _log_stability_sup(log_m: np.ndarray, j_max: int) -> float:
    """sup over 1 <= j+k, j,k <= j_max of log(m_{j+k}/(m_j m_k))/(j+k)."""
    jj, kk = np.meshgrid(np.arange(j_max + 1), np.arange(j_max + 1))
    total = jj + kk
    mask = total > 0
    ratio = (log_m[total] - log_m[jj] - log_m[kk])[mask] / total[mask]
    return float(ratio.max())


def _smallest_power_of_two(log_h: float) -> float:
    power = max(0, math.ceil(log_h / math.log(2.0) - 1e-12))
    return float(2 ** power)


def make_gevrey(s: float, H: Optional[float] = None) -> WeightSequence:
    """Gevrey weight sequence m_j = (j!)^(s-1) for s >= 1.

    Without an explicit H, the smallest power of two passing the stability
    test on j, k <= 64 is used.
    """
    if s < 1:
        raise DomainError(f"Gevrey order must be >= 1, got s={s}")
    if H is None:
        log_m = (s - 1.0) * gammaln(np.arange(2 * STABILITY_RANGE + 1) + 1.0)
        H = _smallest_power_of_two(
            _log_stability_sup(log_m, STABILITY_RANGE)
        )
    return WeightSequence(
        kind="gevrey", s=float(s), H=float(H), label=f"gevrey:{s:g}"
    )


def make_table(
    log_m: Sequence[float], H: Optional[float] = None, label: str = ""
) -> WeightSequence:
    """Weight sequence from explicit values of log m_j."""
    values = tuple(float(v) for v in log_m)
    if H is None:
        candidate = WeightSequence(kind="table", table=values)
        j_max = max(2, len(values) - 1)
        H = max(1.0, validate(candidate, j_max).H_estimate)
    return WeightSequence(kind="table", table=values, H=float(H), label=label)


def validate(ws: WeightSequence, j_max: int) -> ValidationReport:
    """Check properties i-iii on indices <= j_max and estimate H."""
    if j_max < 2:
        raise DomainError(f"j_max must be >= 2, got {j_max}")
    log_m = np.asarray(ws.log_m(np.arange(2 * j_max + 1)), dtype=float)
    failures = []

    normalized = abs(log_m[0]) <= 1e-12 and abs(log_m[1]) <= 1e-12
    if not normalized:
        failures.append(
            f"property i: m_0={math.exp(log_m[0]):g}, "
            f"m_1={math.exp(log_m[1]):g} (must be 1)"
        )

    convexity = log_m[:j_max - 1] + log_m[2:j_max + 1] - 2 * log_m[1:j_max]
    log_convex = bool(np.all(convexity >= -1e-12))
    if not log_convex:
        j_bad = int(np.argmin(convexity)) + 1
        failures.append(f"property ii: m_j^2 > m_(j-1) m_(j+1) at j={j_bad}")

    log_sup = _log_stability_sup(log_m, j_max)
    H_estimate = math.exp(max(log_sup, 0.0))
    stable = log_sup <= math.log(ws.H) + 1e-12
    if not stable:
        failures.append(
            f"property iii: sup ratio {H_estimate:.6g} exceeds H={ws.H:g}"
        )

    return ValidationReport(
        j_max=j_max,
        normalized=normalized,
        log_convex=log_convex,
        stable=stable,
        H_estimate=H_estimate,
        failures=failures,
    )


def log_assoc_inf(ws: WeightSequence, eps: float, t: float) -> float:
    """Return log inf_j m_j j! / (eps t)^j.

    The terms are log-convex in j, so the scan runs upward from j=0 and
    stops after a few consecutive strict increases.
    """
    if eps <= 0 or t < 1:
        raise DomainError(f"Need eps > 0 and t >= 1, got ({eps}, {t})")
    log_x = math.log(eps) + math.log(t)
    prev = best = ws.log_m(0)
    increases = 0
    j = 0
    while increases < NUM_INCREASES_STOP:
        j += 1
        if j > MAX_SCAN_INDEX:
            raise ScanLimitError(
                f"associated function scan exceeded j={MAX_SCAN_INDEX} "
                f"at (eps={eps}, t={t})"
            )
        term = ws.log_m(j) + math.lgamma(j + 1) - j * log_x
        increases = increases + 1 if term > prev else 0
        best = min(best, term)
        prev = term
    return best


def log_assoc_inf_array(
    ws: WeightSequence, eps: float, t: ArrayLike
) -> np.ndarray:
    """Vectorized `log_assoc_inf` over an array of t values."""
    t_arr = np.asarray(t, dtype=float)
    if eps <= 0 or t_arr.size and t_arr.min() < 1:
        raise DomainError(f"Need eps > 0 and t >= 1 (eps={eps})")
    log_x = (math.log(eps) + np.log(t_arr)).ravel()
    best = np.full(log_x.shape, ws.log_m(0))
    prev = best.copy()
    increases = np.zeros(log_x.shape, dtype=int)
    active = np.ones(log_x.shape, dtype=bool)
    j = 0
    while active.any():
        j += 1
        if j > MAX_SCAN_INDEX:
            worst = float(np.exp(log_x[active].max()) / eps)
            raise ScanLimitError(
                f"associated function scan exceeded j={MAX_SCAN_INDEX} "
                f"at (eps={eps}, t={worst})"
            )
        idx = np.nonzero(active)[0]
        term = ws.log_m(j) + math.lgamma(j + 1) - j * log_x[idx]
        rising = term > prev[idx]
        increases[idx] = np.where(rising, increases[idx] + 1, 0)
        best[idx] = np.minimum(best[idx], term)
        prev[idx] = term
        active[idx] = increases[idx] < NUM_INCREASES_STOP
    return best.reshape(t_arr.shape)


def _delta_vectors(remaining: int, ell: int, k: int) -> Iterator[Tuple]:
    if ell == k:
        if remaining % k == 0:
            yield (remaining // k,)
        return
    for g in range(remaining // ell + 1):
        for tail in _delta_vectors(remaining - g * ell, ell + 1, k):
            yield (g,) + tail


def enumerate_delta(k: int) -> List[DeltaIndex]:
    """All gamma with sum(l * gamma_l) = k, in lexicographic order."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > MAX_DELTA_ORDER:
        raise ScanLimitError(
            f"Delta({k}) enumeration above the cap k <= {MAX_DELTA_ORDER}"
        )
    if k == 0:
        return [DeltaIndex(())]
    return [DeltaIndex(g) for g in _delta_vectors(k, 1, k)]


def partition_number(k: int) -> int:
    """Number of integer partitions p(k), by Euler's pentagonal recurrence."""
    p = [1] + [0] * k
    for num in range(1, k + 1):
        total = 0
        m = 1
        while True:
            g1 = m * (3 * m - 1) // 2
            if g1 > num:
                break
            sign = 1 if m % 2 else -1
            total += sign * p[num - g1]
            g2 = m * (3 * m + 1) // 2
            if g2 <= num:
                total += sign * p[num - g2]
            m += 1
        p[num] = total
    return p[k]


def delta_sum_identity(k: int, R: float) -> Tuple[float, float]:
    """Both sides of the identity over Delta(k).

    sum |gamma|!/gamma! R^|gamma| = R (1+R)^(k-1)
    """
    if not 1 <= k <= MAX_IDENTITY_ORDER:
        raise DomainError(f"k must be in [1, {MAX_IDENTITY_ORDER}], got {k}")
    if R <= 0:
        raise DomainError(f"R must be > 0, got {R}")
    lhs = math.fsum(
        math.factorial(d.order) / d.factorial * R ** d.order
        for d in enumerate_delta(k)
    )
    rhs = R * (1.0 + R) ** (k - 1)
    return lhs, rhs


def product_bound_check(ws: WeightSequence, k: int) -> float:
    """Max over Delta(k) of log(m_|gamma| prod m_l^gamma_l) - log m_k.

    Nonpositive (up to round-off) for a log-convex normalized sequence.
    """
    worst = -math.inf
    log_m_k = ws.log_m(k)
    for d in enumerate_delta(k):
        value = ws.log_m(d.order) + sum(
            g * ws.log_m(ell + 1) for ell, g in enumerate(d.gamma) if g
        )
        worst = max(worst, value - log_m_k)
    return worst


def sup_squared_check(ws: WeightSequence, rho: float) -> Tuple[float, float]:
    """Log of both sides of (sup rho^j/(m_j j!))^2 <= sup (2H rho)^j/(m_j j!).

    The scale 2H is the stability constant of m_j j!; with it the bound holds
    for every weight sequence.
    """
    lhs = -2.0 * log_assoc_inf(ws, rho, 1.0)
    rhs = -log_assoc_inf(ws, 2.0 * ws.H * rho, 1.0)
    return lhs, rhs


def gevrey_bounds_check(s: float, t: float) -> Tuple[float, float, float]:
    """Log-domain sandwich of sup_j t^j/(j!)^s.

    t^(1/s) - s log(1/(1-1/s)) <= sup_j log(t^j/(j!)^s) <= s t^(1/s)
    """
    if s <= 1:
        raise DomainError(f"Gevrey sandwich needs s > 1, got s={s}")
    if s < 1.05:
        logging.warning(f"Gevrey sandwich is ill-conditioned near s=1 (s={s})")
    root = t ** (1.0 / s)
    mid = -log_assoc_inf(make_gevrey(s), 1.0, t)
    lower = root - s * math.log(1.0 / (1.0 - 1.0 / s))
    upper = s * root
    return lower, mid, upper


def parse_weights(
    descriptor: Union[str, Dict, WeightSequence]
) -> WeightSequence:
    """Weight sequence from "gevrey:S", a JSON path or a dict."""
    if isinstance(descriptor, WeightSequence):
        return descriptor
    if isinstance(descriptor, dict):
        return WeightSequence.from_dict(descriptor)
    if isinstance(descriptor, str):
        if descriptor.startswith("gevrey:"):
            try:
                s = float(descriptor.split(":", 1)[1])
            except ValueError:
                raise SpecFormatError("weights", f"bad {descriptor!r}")
            return make_gevrey(s)
        path = Path(descriptor)
        if path.suffix == ".json" and path.exists():
            with open(path, encoding="utf-8") as f:
                return WeightSequence.from_dict(json.load(f))
    raise SpecFormatError(
        "weights", f"expected 'gevrey:S' or a JSON file, got {descriptor!r}"
    )


def lemma_suite(
    ws: WeightSequence,
    k_max: int = 12,
    r_values: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0),
    rho_values: Sequence[float] = (1.0, 10.0, 1e3, 1e6),
    t_values: Sequence[float] = (1.0, 10.0, 1e3, 1e6),
    partition_max: int = 20,
) -> Dict:
    """Run the weight-sequence identities and inequalities.

    Returns a JSON-ready dict; `passed` is true iff every check holds.
    """
    report: Dict = {"weights": ws.to_dict()}
    validation = validate(ws, 32)
    report["validation"] = validation.to_dict()
    checks = [validation.passed]

    sup_sq = []
    for rho in rho_values:
        try:
            lhs, rhs = sup_squared_check(ws, rho)
        except ScanLimitError as exc:
            logging.warning(f"sup^2 check skipped at rho={rho}: {exc}")
            sup_sq.append({"rho": rho, "skipped": str(exc)})
            continue
        ok = lhs <= rhs + LOG_SLACK
        sup_sq.append({"rho": rho, "lhs": lhs, "rhs": rhs, "passed": ok})
        checks.append(ok)
    report["sup_squared"] = sup_sq

    counts = []
    for k in range(partition_max + 1):
        size, expected = len(enumerate_delta(k)), partition_number(k)
        counts.append({"k": k, "size": size, "p_k": expected})
        checks.append(size == expected)
    report["delta_cardinality"] = counts

    sums = []
    for k in range(1, k_max + 1):
        for r_val in r_values:
            lhs, rhs = delta_sum_identity(k, r_val)
            ok = abs(lhs - rhs) <= 1e-9 * rhs
            sums.append(
                {"k": k, "R": r_val, "lhs": lhs, "rhs": rhs, "passed": ok}
            )
            checks.append(ok)
    report["sum_identity"] = sums

    products = []
    for k in range(1, k_max + 1):
        excess = product_bound_check(ws, k)
        ok = excess <= LOG_SLACK
        products.append({"k": k, "max_excess": excess, "passed": ok})
        checks.append(ok)
    report["product_bound"] = products

    if ws.kind == "gevrey" and ws.s > 1:
        sandwiches = []
        for t_val in t_values:
            lower, mid, upper = gevrey_bounds_check(ws.s, t_val)
            ok = lower - LOG_SLACK <= mid <= upper + LOG_SLACK
            sandwiches.append(
                {
                    "t": t_val,
                    "lower": lower,
                    "mid": mid,
                    "upper": upper,
                    "passed": ok,
                }
            )
            checks.append(ok)
        report["gevrey_bounds"] = sandwiches

    report["passed"] = bool(all(checks))
    failed = len(checks) - sum(checks)
    logging.info(f"Weight-sequence checks for {ws!r}: {failed} failed checks")
    return report
