# -*- coding: utf-8 -*-
"""
Variable-coefficient Vekua operators on T^(n+1) = T_t x T^n_x.

    Pu = Lu - (s(t) + i delta q(t)) u - alpha q(t) conj(u)
    L = d_t - sum_j (p_j(t) + i lambda_j q(t)) d_xj

The coefficient functions are uniform samples on [0, 2 pi). The operator
is conjugated by T (multiplication of the x-modes by exp(-i m(t).xi)) to
the one with constant p0, whose partial Fourier modes decouple into
pairs {xi, -xi} of first-order ODE systems in t with periodic solutions.
"""
import cmath
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import AnyStr, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import cumulative_trapezoid

from .margincurves import FAIL, margin_scan, MarginCurves, PASS, ScanResult
from .spectral import (
    Freq,
    grid_points,
    GridFunction,
    lattice,
    partial_analyze,
    partial_synthesize,
    PartialSpectrum,
    periodic_primitive,
    shell_radii,
    spectral_derivative,
    trig_interpolate,
)
from .util import (
    ConditionError,
    DomainError,
    max_workers,
    parse_complex,
    SmallDivisorError,
    SpecFormatError,
    TESTING_MODE,
    timeit,
)
from .weightseq import make_gevrey, WeightSequence

SIGN_TOL = 1e-12
BRANCH_TOL = 1e-14
EXACT_TOL = 1e-12
SUPPORT_TOL = 1e-13
GAUSS_ORDER = 8
QUADRATURES = ("gauss", "trapezoid")
PRIMITIVES = ("trapezoid", "spectral")


@dataclass(frozen=True, eq=False)
class VarOperatorSpec:
    """Coefficients of P, sampled on N_t uniform points of [0, 2 pi)."""

    q: np.ndarray
    s: np.ndarray
    p: np.ndarray
    lam: np.ndarray
    alpha: complex
    delta: float
    label: str = ""

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        s = np.asarray(self.s, dtype=float)
        p = np.atleast_2d(np.asarray(self.p, dtype=float))
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        if q.ndim != 1 or q.size < 4:
            raise DomainError("q must be a 1-d array of at least 4 samples")
        if s.shape != q.shape or p.shape[1] != q.size:
            raise DomainError(
                f"Sample counts differ: q {q.shape}, s {s.shape}, p {p.shape}"
            )
        if lam.size != p.shape[0]:
            raise DomainError(
                f"lambda has {lam.size} entries for n={p.shape[0]}"
            )
        if complex(self.alpha) == 0:
            raise DomainError("alpha must be nonzero")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "delta", float(self.delta))

    def __repr__(self) -> str:
        """Object string representation."""
        return (
            f"<VarOperatorSpec {self.label or ''} n={self.n}, Nt={self.Nt}, "
            f"lambda={self.lam.tolist()}, alpha={self.alpha:g}, "
            f"delta={self.delta:g}>"
        )

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def Nt(self) -> int:
        return self.q.size

    @property
    def t(self) -> np.ndarray:
        return grid_points(self.Nt)

    def normalized(self) -> "VarOperatorSpec":
        """Flip the sign of q, lambda, delta and alpha when q <= 0.

        The products lambda q, delta q and alpha q, hence P, are unchanged.
        """
        if self.q.sum() >= 0:
            return self
        return VarOperatorSpec(
            -self.q,
            self.s,
            self.p,
            -self.lam,
            -self.alpha,
            -self.delta,
            self.label,
        )

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "Nt": self.Nt,
            "q": self.q.tolist(),
            "s": self.s.tolist(),
            "p": self.p.tolist(),
            "lambda": self.lam.tolist(),
            "alpha": {"re": self.alpha.real, "im": self.alpha.imag},
            "delta": self.delta,
            "label": self.label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict) -> "VarOperatorSpec":
        """Build from JSON; a number stands for a constant function."""
        for key in ("q", "lambda", "alpha"):
            if key not in data:
                raise SpecFormatError(key)
        lam = np.atleast_1d(np.asarray(data["lambda"], dtype=float))
        n = int(data.get("n", lam.size))
        Nt = data.get("Nt")
        if Nt is None:
            sized = [
                v for v in (data["q"], data.get("s")) if isinstance(v, list)
            ]
            if not sized:
                raise SpecFormatError("Nt")
            Nt = len(sized[0])
        Nt = int(Nt)

        def _samples(value, key: str) -> np.ndarray:
            if isinstance(value, bool):
                raise SpecFormatError(key)
            if isinstance(value, (int, float)):
                return np.full(Nt, float(value))
            try:
                arr = np.asarray(value, dtype=float)
            except (TypeError, ValueError):
                raise SpecFormatError(key)
            if arr.shape != (Nt,):
                raise SpecFormatError(key, f"'{key}' needs {Nt} samples")
            return arr

        p_raw = data.get("p", [0.0] * n)
        if not isinstance(p_raw, list) or len(p_raw) != n:
            raise SpecFormatError("p", f"'p' needs {n} functions")
        try:
            return cls(
                _samples(data["q"], "q"),
                _samples(data.get("s", 0.0), "s"),
                np.array([_samples(pj, "p") for pj in p_raw]),
                lam,
                parse_complex(data["alpha"], "alpha"),
                float(data.get("delta", 0.0)),
                data.get("label", ""),
            )
        except DomainError as exc:
            raise SpecFormatError("spec", str(exc))

    @classmethod
    def from_json(cls, json_str: AnyStr) -> "VarOperatorSpec":
        return cls.from_dict(json.loads(json_str))

    @classmethod
    def from_callables(
        cls,
        q,
        s,
        p: Sequence,
        lam: Sequence[float],
        alpha: complex,
        delta: float,
        Nt: int = 256,
        label: str = "",
    ) -> "VarOperatorSpec":
        """Sample coefficient functions of t (numbers mean constants)."""
        t = grid_points(Nt)

        def _eval(func) -> np.ndarray:
            if callable(func):
                return np.broadcast_to(func(t), t.shape).astype(float)
            return np.full(Nt, float(func))

        return cls(
            _eval(q),
            _eval(s),
            np.array([_eval(pj) for pj in p]),
            lam,
            alpha,
            delta,
            label,
        )


@dataclass(eq=False)
class ReducedData:
    """Means, primitives and constants of the conjugated operator.

    Arrays over t have N_t + 1 entries (the node 2 pi is included).
    """

    t: np.ndarray
    p0: np.ndarray
    m: np.ndarray
    q0: float
    s0: float
    Q: np.ndarray
    Q_tilde: np.ndarray
    S: np.ndarray
    A0: complex
    B0: complex
    C0: np.ndarray
    lam: np.ndarray
    alpha: complex
    delta: float
    q_samples: np.ndarray
    s_samples: np.ndarray
    primitive: str = "trapezoid"

    @property
    def n(self) -> int:
        return self.p0.size

    @property
    def Nt(self) -> int:
        return self.t.size - 1

    def to_dict(self) -> Dict:
        return {
            "p0": self.p0,
            "q0": self.q0,
            "s0": self.s0,
            "A0": self.A0,
            "B0": self.B0,
            "C0": list(self.C0),
            "lambda": self.lam,
            "alpha": self.alpha,
            "delta": self.delta,
            "primitive": self.primitive,
        }


def sign_crossing(q: np.ndarray) -> Optional[Tuple[float, float]]:
    """First grid interval where q changes sign beyond tolerance."""
    q = np.asarray(q, dtype=float)
    scale = np.abs(q).max()
    if scale == 0:
        return None
    tol = SIGN_TOL * scale
    positive, negative = q > tol, q < -tol
    if not (positive.any() and negative.any()):
        return None
    minority = negative if positive.sum() >= negative.sum() else positive
    k = int(np.argmax(minority))
    t = grid_points(q.size)
    return float(t[k - 1]) if k else 0.0, float(t[k])


def validate_condition_p(spec: VarOperatorSpec) -> bool:
    """True when q keeps one sign on the grid."""
    crossing = sign_crossing(spec.q)
    if crossing is None:
        return True
    logging.warning(
        f"q changes sign in [{crossing[0]:.4f}, {crossing[1]:.4f}]: "
        f"condition (P) fails"
    )
    return False


def _primitive(samples: np.ndarray, t_full: np.ndarray, how: str):
    """int_0^t of periodic samples at the N_t + 1 nodes of t_full."""
    if how == "trapezoid":
        closed = np.append(samples, samples[0])
        return cumulative_trapezoid(closed, t_full, initial=0.0)
    if how == "spectral":
        return np.real(periodic_primitive(samples, t_full))
    raise DomainError(f"Unknown primitive '{how}', use one of {PRIMITIVES}")


def reduce(spec: VarOperatorSpec, primitive: str = "trapezoid") -> ReducedData:
    """Means p0, q0, s0, primitives m, Q, S and the constants A0, B0, C0.

    The periodic means use the trapezoid rule, exact for trigonometric
    polynomials resolved by the grid.
    """
    if not validate_condition_p(spec):
        raise ConditionError("q changes sign, condition (P) fails")
    Nt = spec.Nt
    t_full = np.linspace(0.0, 2 * np.pi, Nt + 1)
    q0 = 2 * np.pi * float(spec.q.mean())
    if q0 <= EXACT_TOL * np.abs(spec.q).max() or q0 <= 0:
        raise DomainError(f"Degenerate q: q0 = {q0:.3e}")
    s0 = 2 * np.pi * float(spec.s.mean())
    p0 = spec.p.mean(axis=1)

    Q = _primitive(spec.q, t_full, primitive)
    S = _primitive(spec.s, t_full, primitive)
    m = np.array(
        [
            _primitive(pj, t_full, primitive) - p0j * t_full
            for pj, p0j in zip(spec.p, p0)
        ]
    )
    A0 = complex(s0, spec.delta * q0)
    B0 = spec.alpha * q0
    C0 = 2 * np.pi * p0 + 1j * spec.lam * q0
    return ReducedData(
        t=t_full,
        p0=p0,
        m=m,
        q0=q0,
        s0=s0,
        Q=Q,
        Q_tilde=Q - q0,
        S=S,
        A0=A0,
        B0=B0,
        C0=C0,
        lam=spec.lam,
        alpha=spec.alpha,
        delta=spec.delta,
        q_samples=spec.q,
        s_samples=spec.s,
        primitive=primitive,
    )


def apply_T(
    S: PartialSpectrum, m: np.ndarray, direction: str = "fwd"
) -> PartialSpectrum:
    """Multiply every slice u(t, xi) by exp(-+ i m(t).xi)."""
    sign = {"fwd": -1.0, "inv": 1.0}.get(direction)
    if sign is None:
        raise DomainError(f"direction must be 'fwd' or 'inv', not {direction}")
    m = np.atleast_2d(np.asarray(m, dtype=float))[:, : S.Nt]
    if m.shape != (S.q, S.Nt):
        raise DomainError(f"m of shape {m.shape} for {S!r}")
    slices = {
        xi: values * np.exp(sign * 1j * (np.array(xi, dtype=float) @ m))
        for xi, values in S.slices.items()
    }
    return PartialSpectrum(S.q, S.Nt, slices, S.K)


def rho(xi, lam, delta: float, alpha: complex) -> complex:
    """Root of (lambda.xi - i delta)^2 + |alpha|^2 with Re >= 0.

    On the imaginary axis the root with Im >= 0 is taken.
    """
    b = float(np.dot(np.atleast_1d(lam), np.atleast_1d(xi))) - 1j * delta
    root = cmath.sqrt(b * b + abs(alpha) ** 2)
    if abs(root.real) <= BRANCH_TOL * max(1.0, abs(root)):
        return complex(0.0, abs(root.imag))
    return root


def g_vector(
    xi,
    fplus: np.ndarray,
    fminus_conj: np.ndarray,
    rho_xi: complex,
    lam,
    delta: float,
    alpha: complex,
) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinates of (f(t, xi), conj f(t, -xi)) in the eigenbasis.

    The eigenvectors are (alpha, b + rho) and (alpha, b - rho) with
    b = lambda.xi - i delta, so G = V^-1 (f+, conj f-).
    """
    b = float(np.dot(np.atleast_1d(lam), np.atleast_1d(xi))) - 1j * delta
    scale = -1.0 / (2.0 * alpha * rho_xi)
    fplus = np.asarray(fplus, dtype=complex)
    fminus_conj = np.asarray(fminus_conj, dtype=complex)
    G1 = scale * ((b - rho_xi) * fplus - alpha * fminus_conj)
    G2 = scale * (-(b + rho_xi) * fplus + alpha * fminus_conj)
    return G1, G2


def divisors(
    reduced: ReducedData, points: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """|exp(-rho q0) - kappa| and |1 - exp(-rho q0) kappa| per row xi.

    kappa = exp(s0 + 2 pi i xi.p0).
    """
    points = np.asarray(points).reshape(-1, reduced.n)
    rhos = np.array(
        [rho(xi, reduced.lam, reduced.delta, reduced.alpha) for xi in points]
    )
    kappa = np.exp(reduced.s0 + 2j * np.pi * (points @ reduced.p0))
    decay = np.exp(-rhos * reduced.q0)
    return np.abs(decay - kappa), np.abs(1.0 - decay * kappa)


@dataclass(eq=False)
class TimeQuadrature:
    """Nodes, primitives and interpolation data shared by all modes."""

    kind: str
    t: np.ndarray
    Q: np.ndarray
    S: np.ndarray
    sigma: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    Q_sub: Optional[np.ndarray] = None
    S_sub: Optional[np.ndarray] = None
    basis: Optional[np.ndarray] = None

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0])

    def interpolate(self, samples: np.ndarray) -> np.ndarray:
        """Values of the trigonometric interpolant at the Gauss nodes."""
        return np.tensordot(samples, self.basis, axes=(0, 0))


def time_quadrature(
    reduced: ReducedData, kind: str = "gauss", order: int = GAUSS_ORDER
) -> TimeQuadrature:
    """Quadrature data for `mode_solve`.

    "trapezoid" uses the primitives of `reduced` at the grid nodes.
    "gauss" integrates each grid interval with Gauss-Legendre nodes on
    the trigonometric interpolants, with exact primitives of q and s.
    """
    if kind == "trapezoid":
        return TimeQuadrature(kind, reduced.t, reduced.Q, reduced.S)
    if kind != "gauss":
        raise DomainError(f"Unknown quadrature '{kind}', use {QUADRATURES}")
    t = reduced.t
    h = float(t[1] - t[0])
    x, w = leggauss(order)
    sigma = t[:-1, np.newaxis] + 0.5 * h * (1.0 + x[np.newaxis, :])
    flat = sigma.ravel()
    Q = np.real(periodic_primitive(reduced.q_samples, t))
    S = np.real(periodic_primitive(reduced.s_samples, t))
    Q_sub = np.real(periodic_primitive(reduced.q_samples, flat))
    S_sub = np.real(periodic_primitive(reduced.s_samples, flat))
    basis = trig_interpolate(np.eye(reduced.Nt), sigma)
    return TimeQuadrature(
        kind,
        t,
        Q,
        S,
        sigma=sigma,
        weights=0.5 * h * w,
        Q_sub=Q_sub.reshape(sigma.shape),
        S_sub=S_sub.reshape(sigma.shape),
        basis=basis,
    )


def _interval_integrals(
    rule: TimeQuadrature,
    exponent,
    E: np.ndarray,
    G: np.ndarray,
    anchor: str,
) -> np.ndarray:
    """J_k = int_{t_k}^{t_k+1} exp(E(anchor) - E(sigma)) G(sigma) dsigma."""
    Nt = G.size
    if rule.kind == "gauss":
        E_sub = exponent(rule.sigma, rule.Q_sub, rule.S_sub)
        E_ref = E[1:] if anchor == "right" else E[:-1]
        integrand = np.exp(E_ref[:, np.newaxis] - E_sub) * rule.interpolate(G)
        return integrand @ rule.weights
    G_next = np.roll(G, -1)
    step = np.exp(E[1:] - E[:-1])
    if anchor == "right":
        return 0.5 * rule.h * (step * G + G_next)
    return 0.5 * rule.h * (G + G_next / step)[:Nt]


def mode_solve(
    xi,
    reduced: ReducedData,
    G1: np.ndarray,
    G2: np.ndarray,
    quadrature: str = "gauss",
    tol_small: float = 1e-13,
    rule: Optional[TimeQuadrature] = None,
) -> np.ndarray:
    """Periodic solution u(t, xi) = alpha (z1 + z2) of one mode pair.

    z1' = (i xi.p0 + s + rho q) z1 + G1 is swept backward in t and
    z2' = (i xi.p0 + s - rho q) z2 + G2 forward, so that only decaying
    exponentials are evaluated; periodicity fixes the free constants
    through the two divisors of condition (III).
    """
    xi = tuple(int(v) for v in np.atleast_1d(xi))
    rho_xi = rho(xi, reduced.lam, reduced.delta, reduced.alpha)
    d1, d2 = divisors(reduced, np.array([xi]))
    smallest = float(min(d1[0], d2[0]))
    if smallest < tol_small:
        raise SmallDivisorError(xi, smallest)
    rule = rule or time_quadrature(reduced, quadrature)
    phase = float(np.dot(xi, reduced.p0))
    G1 = np.asarray(G1, dtype=complex)
    G2 = np.asarray(G2, dtype=complex)
    Nt = G1.size

    def exponent_minus(t, Q, S):
        return 1j * phase * t + S - rho_xi * Q

    def exponent_plus(t, Q, S):
        return 1j * phase * t + S + rho_xi * Q

    # z2: forward sweep from z2(0) = 0, then the periodic correction
    E = exponent_minus(rule.t, rule.Q, rule.S)
    J = _interval_integrals(rule, exponent_minus, E, G2, "right")
    step = np.exp(E[1:] - E[:-1])
    z2 = np.zeros(Nt + 1, dtype=complex)
    for k in range(Nt):
        z2[k + 1] = step[k] * z2[k] + J[k]
    z2_0 = z2[-1] / (1.0 - np.exp(E[-1] - E[0]))
    z2 = z2 + np.exp(E - E[0]) * z2_0

    # z1: backward sweep from z1(2 pi) = 0
    E = exponent_plus(rule.t, rule.Q, rule.S)
    J = _interval_integrals(rule, exponent_plus, E, G1, "left")
    back = np.exp(E[:-1] - E[1:])
    z1 = np.zeros(Nt + 1, dtype=complex)
    for k in range(Nt - 1, -1, -1):
        z1[k] = back[k] * z1[k + 1] - J[k]
    z1_end = z1[0] / (1.0 - np.exp(E[0] - E[-1]))
    z1 = z1 + np.exp(E - E[-1]) * z1_end

    return reduced.alpha * (z1[:Nt] + z2[:Nt])


@dataclass
class ConditionReport:
    """Conditions (I)-(III) and, with lambda = 0, the matched case."""

    constants: Dict
    cond_I: bool
    cond_II: bool
    cond_II_method: str
    cond_II_witness: Optional[Tuple[int, ...]] = None
    cond_III: Optional[ScanResult] = None
    case: Optional[int] = None
    dc_prime: Optional[ScanResult] = None
    notes: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.cond_I
            and self.cond_II
            and self.cond_III is not None
            and self.cond_III.verdict == PASS
        )

    @property
    def verdict(self) -> str:
        if self.passed:
            return PASS
        if self.cond_III is not None and self.cond_III.verdict != PASS:
            return self.cond_III.verdict
        return FAIL

    @property
    def curves(self) -> MarginCurves:
        curves = []
        for scan in (self.cond_III, self.dc_prime):
            if scan is not None:
                curves.extend(scan.curves.curves)
        return MarginCurves(curves, family_label="conditions")

    def to_dict(self) -> Dict:
        data = {
            "constants": self.constants,
            "verdict": self.verdict,
            "condition_I": self.cond_I,
            "condition_II": self.cond_II,
            "condition_II_method": self.cond_II_method,
            "condition_II_witness": (
                list(self.cond_II_witness) if self.cond_II_witness else None
            ),
            "condition_III": (
                self.cond_III.to_dict() if self.cond_III else None
            ),
            "notes": self.notes,
        }
        if self.case is not None or self.dc_prime is not None:
            data["case"] = self.case
            data["dc_prime"] = (
                self.dc_prime.to_dict() if self.dc_prime else None
            )
        return data


def _lattice_by_norm(n: int, radius: float, floor: float = 0.0):
    points = lattice(n, radius, floor)
    order = np.argsort(shell_radii(points), kind="stable")
    return points[order]


def condition_ii_scan(
    reduced: ReducedData, xi_max: float, tau_max: int, tol: float = 1e-8
) -> Tuple[bool, str, Optional[Tuple[int, ...]]]:
    """Search (xi, tau) with Re(A0 (2 pi tau + xi.conj C0)) = 0 and
    |2 pi tau + xi.C0|^2 = |A0|^2 - |B0|^2.

    Returns (no solution found, method, witness). When
    |A0| < |B0| the modulus equation has no solution at all.
    """
    A0, B0 = reduced.A0, reduced.B0
    target = abs(A0) ** 2 - abs(B0) ** 2
    if target < -tol * max(1.0, abs(B0) ** 2):
        return True, "analytic", None
    points = _lattice_by_norm(reduced.n, xi_max)
    taus = np.arange(-int(tau_max), int(tau_max) + 1)
    w = 2 * np.pi * taus[np.newaxis, :] + (points @ reduced.C0)[:, None]
    w_bar = 2 * np.pi * taus[np.newaxis, :] + (
        points @ np.conj(reduced.C0)
    )[:, None]
    e1 = np.real(A0 * w_bar)
    e2 = np.abs(w) ** 2 - target
    near = (np.abs(e1) <= tol * np.maximum(1.0, abs(A0) * np.abs(w_bar))) & (
        np.abs(e2)
        <= tol * np.maximum(1.0, np.maximum(np.abs(w) ** 2, abs(target)))
    )
    if not near.any():
        return True, "scan", None
    row, col = np.argwhere(near)[0]
    witness = tuple(int(v) for v in points[row]) + (int(taus[col]),)
    logging.info(f"condition (II) lattice solution (xi, tau) = {witness}")
    return False, "scan", witness


def _theta(reduced: ReducedData, points: np.ndarray) -> np.ndarray:
    root = math.sqrt(reduced.delta ** 2 - abs(reduced.alpha) ** 2)
    return 2 * np.pi * (points @ reduced.p0) - reduced.q0 * root


def dc_prime_quantity(reduced: ReducedData, points: np.ndarray):
    """min_tau |2 pi tau + theta(xi)|: distance of theta to 2 pi Z."""
    theta = _theta(reduced, points)
    return np.abs(theta - 2 * np.pi * np.round(theta / (2 * np.pi)))


def dc_double_prime_quantity(reduced: ReducedData, points: np.ndarray):
    """|exp(i theta(xi)) - 1|."""
    return np.abs(np.exp(1j * _theta(reduced, points)) - 1.0)


def _log_scan(
    quantity: np.ndarray,
    points: np.ndarray,
    ws: WeightSequence,
    eps_list: Sequence[float],
    gamma_floor: float,
    xi_max: float,
    drop_tol: float,
    tol_zero: float,
    label: str,
) -> ScanResult:
    zeros = quantity <= tol_zero
    with np.errstate(divide="ignore"):
        log_quantity = np.log(quantity)
    return margin_scan(
        points,
        log_quantity,
        ws,
        eps_list,
        gamma_floor,
        xi_max,
        zero_mask=zeros,
        zero_verdict=FAIL,
        drop_tol=drop_tol,
        label=label,
    )


@timeit("Condition checks")
def check_conditions(
    spec: VarOperatorSpec,
    ws: WeightSequence,
    eps_list: Sequence[float],
    xi_max: float,
    tau_max: int,
    gamma_floor: float = 1.0,
    drop_tol: float = 6.9,
    tol_lattice: float = 1e-8,
    tol_zero: float = 1e-12,
    reduced: Optional[ReducedData] = None,
) -> ConditionReport:
    """Conditions (I) |alpha| != |delta|, (II) no lattice solution and
    (III) the margin scan of the two periodicity divisors.
    """
    reduced = reduced or reduce(spec.normalized())
    cond_I = abs(abs(reduced.alpha) - abs(reduced.delta)) > EXACT_TOL
    cond_II, method, witness = condition_ii_scan(
        reduced, xi_max, tau_max, tol_lattice
    )
    points = lattice(reduced.n, xi_max, floor=gamma_floor)
    d1, d2 = divisors(reduced, points)
    cond_III = _log_scan(
        np.minimum(d1, d2),
        points,
        ws,
        eps_list,
        gamma_floor,
        xi_max,
        drop_tol,
        tol_zero,
        "condition (III)",
    )
    report = ConditionReport(
        reduced.to_dict(), cond_I, cond_II, method, witness, cond_III
    )
    logging.info(
        f"conditions: (I) {cond_I}, (II) {cond_II} [{method}], "
        f"(III) {cond_III.verdict}"
    )
    return report


def case1_constant(reduced: ReducedData) -> float:
    """Lower bound of both divisors when |B0| > |A0| and lambda = 0."""
    if np.any(reduced.lam != 0) or not abs(reduced.B0) > abs(reduced.A0):
        raise DomainError("Needs lambda = 0 and |B0| > |A0|")
    root = math.sqrt(abs(reduced.alpha) ** 2 - reduced.delta ** 2)
    decay = math.exp(-root * reduced.q0)
    return min(
        abs(decay - math.exp(reduced.s0)),
        abs(1.0 - decay * math.exp(reduced.s0)),
    )


def check_thm2(
    spec: VarOperatorSpec,
    ws: WeightSequence,
    eps_list: Sequence[float],
    xi_max: float,
    tau_max: int,
    gamma_floor: float = 1.0,
    drop_tol: float = 6.9,
    tol_lattice: float = 1e-8,
    tol_zero: float = 1e-12,
) -> ConditionReport:
    """Cases (1)-(4) of the lambda = 0 family.

    (1) |B0| > |A0|; (2) |B0| <= |A0|, |alpha| > |delta| and no lattice
    solution; (3) |alpha| < |delta| and s0 != 0; (4) |alpha| < |delta|,
    s0 = 0, no lattice solution and the DC' scan passes on range.
    """
    spec = spec.normalized()
    if np.any(spec.lam != 0):
        raise DomainError("The lambda = 0 case analysis needs lambda = 0")
    reduced = reduce(spec)
    report = check_conditions(
        spec,
        ws,
        eps_list,
        xi_max,
        tau_max,
        gamma_floor,
        drop_tol,
        tol_lattice,
        tol_zero,
        reduced=reduced,
    )
    abs_A0, abs_B0 = abs(reduced.A0), abs(reduced.B0)
    abs_alpha, abs_delta = abs(reduced.alpha), abs(reduced.delta)
    s0_zero = abs(reduced.s0) <= EXACT_TOL * max(1.0, reduced.q0)

    if abs_alpha < abs_delta:
        points = lattice(reduced.n, xi_max, floor=gamma_floor)
        report.dc_prime = _log_scan(
            dc_prime_quantity(reduced, points),
            points,
            ws,
            eps_list,
            gamma_floor,
            xi_max,
            drop_tol,
            tol_zero,
            "DC'",
        )

    if abs_B0 > abs_A0:
        report.case = 1
        report.notes["case1_constant"] = case1_constant(reduced)
    elif abs_alpha > abs_delta and report.cond_II:
        report.case = 2
    elif abs_alpha < abs_delta and not s0_zero:
        report.case = 3
    elif (
        abs_alpha < abs_delta
        and report.cond_II
        and report.dc_prime.verdict == PASS
    ):
        report.case = 4
    logging.info(f"lambda = 0 case analysis: case {report.case}")
    return report


@dataclass
class EquivalenceReport:
    """DC' and DC'' scans on the same range."""

    dc_prime: ScanResult
    dc_double_prime: ScanResult
    dc_double_prime_rescaled: ScanResult
    sandwich_ok: bool
    drop_tol: float

    @property
    def agree(self) -> bool:
        first, second = self.dc_prime, self.dc_double_prime
        if first.verdict == second.verdict:
            return True
        # pointwise d'' <= d' <= (pi/2) d'', so running minima differ by at
        # most log(pi/2) and drops by twice that
        slack = 2 * math.log(math.pi / 2)
        for a, b in zip(first.scans, second.scans):
            if a.verdict == b.verdict:
                continue
            if not all(
                abs(d - self.drop_tol) <= slack for d in (a.drop, b.drop)
            ):
                return False
        return True

    @property
    def curves(self) -> MarginCurves:
        return MarginCurves(
            self.dc_prime.curves.curves + self.dc_double_prime.curves.curves,
            family_label="DC' vs DC''",
        )

    def to_dict(self) -> Dict:
        return {
            "agree": self.agree,
            "sandwich_ok": self.sandwich_ok,
            "dc_prime": self.dc_prime.to_dict(),
            "dc_double_prime": self.dc_double_prime.to_dict(),
            "dc_double_prime_rescaled": (
                self.dc_double_prime_rescaled.to_dict()
            ),
        }


def dc_equivalence_check(
    p0: Sequence[float],
    q0: float,
    delta: float,
    alpha: complex,
    ws: WeightSequence,
    eps_list: Sequence[float],
    xi_max: float,
    gamma_floor: float = 1.0,
    drop_tol: float = 6.9,
    tol_zero: float = 1e-12,
) -> EquivalenceReport:
    """Run DC' and DC'' on the same range and compare the verdicts.

    Pointwise dist(theta, 2 pi Z) and |exp(i theta) - 1| differ at most
    by the factor pi/2; DC'' is also scanned at eps/H.
    """
    if not abs(alpha) < abs(delta):
        raise DomainError("The DC' / DC'' comparison needs |alpha| < |delta|")
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    reduced = ReducedData(
        t=np.zeros(2),
        p0=p0,
        m=np.zeros((p0.size, 2)),
        q0=float(q0),
        s0=0.0,
        Q=np.zeros(2),
        Q_tilde=np.zeros(2),
        S=np.zeros(2),
        A0=complex(0.0, delta * q0),
        B0=complex(alpha) * q0,
        C0=2 * np.pi * p0 + 0j,
        lam=np.zeros(p0.size),
        alpha=complex(alpha),
        delta=float(delta),
        q_samples=np.zeros(1),
        s_samples=np.zeros(1),
    )
    points = lattice(p0.size, xi_max, floor=gamma_floor)
    d1 = dc_prime_quantity(reduced, points)
    d2 = dc_double_prime_quantity(reduced, points)
    sandwich = bool(
        np.all(d2 <= d1 + 1e-12) and np.all(d1 <= 0.5 * np.pi * d2 + 1e-12)
    )
    args = (points, ws)
    tail = (gamma_floor, xi_max, drop_tol, tol_zero)
    first = _log_scan(d1, *args, eps_list, *tail, "DC'")
    second = _log_scan(d2, *args, eps_list, *tail, "DC''")
    rescaled = _log_scan(
        d2, *args, [e / ws.H for e in eps_list], *tail, "DC'' eps/H"
    )
    report = EquivalenceReport(first, second, rescaled, sandwich, drop_tol)
    if not report.agree:
        logging.warning(
            f"DC' ({first.verdict}) and DC'' ({second.verdict}) disagree"
        )
    return report


def _operator_terms(
    coefs: np.ndarray,
    q: np.ndarray,
    s: np.ndarray,
    delta: float,
    alpha: complex,
    samples: np.ndarray,
) -> np.ndarray:
    """d_t u - sum_j coefs_j d_j u - (s + i delta q) u - alpha q conj(u)."""
    along_t = (-1,) + (1,) * (samples.ndim - 1)
    out = spectral_derivative(samples, 0)
    for j, coef in enumerate(coefs):
        out = out - coef.reshape(along_t) * spectral_derivative(
            samples, j + 1
        )
    q = q.reshape(along_t)
    s = s.reshape(along_t)
    return out - (s + 1j * delta * q) * samples - alpha * q * np.conj(samples)


def _check_grid(u: GridFunction, n: int, Nt: int) -> np.ndarray:
    if u.n != n + 1 or u.shape[0] != Nt:
        raise DomainError(
            f"Grid of shape {u.shape} for an operator on T^{n + 1} "
            f"with Nt={Nt}"
        )
    return np.asarray(u.samples, dtype=complex)


def apply_operator(spec: VarOperatorSpec, u: GridFunction) -> GridFunction:
    """Pu on a (N_t, N, ..., N) grid with spectral derivatives."""
    samples = _check_grid(u, spec.n, spec.Nt)
    coefs = spec.p + 1j * spec.lam[:, np.newaxis] * spec.q[np.newaxis, :]
    return GridFunction(
        _operator_terms(
            coefs, spec.q, spec.s, spec.delta, spec.alpha, samples
        )
    )


def apply_reduced_operator(
    reduced: ReducedData, u: GridFunction
) -> GridFunction:
    """The conjugated operator, with p replaced by its mean p0."""
    samples = _check_grid(u, reduced.n, reduced.Nt)
    q = reduced.q_samples
    coefs = reduced.p0[:, np.newaxis] + 1j * reduced.lam[:, np.newaxis] * q
    return GridFunction(
        _operator_terms(
            coefs,
            q,
            reduced.s_samples,
            reduced.delta,
            reduced.alpha,
            samples,
        )
    )


def _relative_residual(Pu: GridFunction, f: GridFunction) -> float:
    scale = f.norm_sup()
    if scale == 0:
        return 0.0 if Pu.norm_sup() == 0 else math.inf
    return float(np.abs(Pu.samples - f.samples).max() / scale)


@timeit("Variable-coefficient solve")
def solve(
    spec: VarOperatorSpec,
    f: GridFunction,
    ws: Optional[WeightSequence] = None,
    eps_list: Sequence[float] = (0.1, 1.0, 10.0),
    xi_max: Optional[float] = None,
    tau_max: int = 20,
    check: bool = True,
    quadrature: str = "gauss",
    primitive: str = "spectral",
    tol_small: float = 1e-13,
    tol_residual: float = 1e-6,
    workers: Optional[int] = None,
) -> Tuple[GridFunction, Dict]:
    """Solve Pu = f for f sampled on the (N_t, N, ..., N) grid.

    f is conjugated by T, every x-mode is solved by `mode_solve`, and T is
    undone. With `check=True` the conditions are verified first on a scan
    that covers the x-support of f, and a failure raises ConditionError
    carrying the report.
    """
    spec = spec.normalized()
    samples = _check_grid(f, spec.n, spec.Nt)
    reduced = reduce(spec, primitive)
    F = partial_analyze(GridFunction(samples))
    # slices at round-off level count as zero
    floor = SUPPORT_TOL * max(f.norm_sup(), np.finfo(float).tiny)
    support = [
        xi for xi in F.frequencies() if np.abs(F.slices[xi]).max() > floor
    ]
    radius = max(
        (math.sqrt(sum(v * v for v in xi)) for xi in support), default=0.0
    )
    diagnostics: Dict = {
        "modes": len(support),
        "quadrature": quadrature,
        "primitive": primitive,
        "reduced": reduced.to_dict(),
    }

    if check:
        scan_max = max(float(xi_max or 1.0), radius, 1.0)
        report = check_conditions(
            spec,
            ws or make_gevrey(2.0),
            eps_list,
            scan_max,
            tau_max,
            reduced=reduced,
        )
        diagnostics["conditions"] = report.to_dict()
        if not report.passed:
            raise ConditionError(
                f"conditions fail on |xi| <= {scan_max:g}: {report.verdict}",
                report.to_dict(),
            )

    TF = apply_T(F, reduced.m, "fwd")
    rule = time_quadrature(reduced, quadrature)

    def _solve_one(xi: Freq) -> np.ndarray:
        minus = tuple(-v for v in xi)
        rho_xi = rho(xi, reduced.lam, reduced.delta, reduced.alpha)
        G1, G2 = g_vector(
            xi,
            TF[xi],
            np.conj(TF[minus]),
            rho_xi,
            reduced.lam,
            reduced.delta,
            reduced.alpha,
        )
        return mode_solve(xi, reduced, G1, G2, quadrature, tol_small, rule)

    # modes whose partner -xi carries data are solved too
    modes = sorted(set(support) | {tuple(-v for v in xi) for xi in support})
    with ThreadPoolExecutor(max_workers=workers or max_workers()) as pool:
        solved = list(pool.map(_solve_one, modes))
    slices = dict(zip(modes, solved))
    if modes:
        points = np.array(modes)
        d1, d2 = divisors(reduced, points)
        diagnostics["min_divisor"] = float(np.minimum(d1, d2).min())

    U = apply_T(
        PartialSpectrum(spec.n, spec.Nt, slices, F.K), reduced.m, "inv"
    )
    u = partial_synthesize(U, f.shape[1:])
    residual = _relative_residual(apply_operator(spec, u), f)
    diagnostics["rel_residual"] = residual
    if residual > tol_residual:
        msg = f"Relative residual {residual:.3e} > {tol_residual:.1e}"
        logging.error(msg)
        if TESTING_MODE:
            raise AssertionError(msg)
    return u, diagnostics


def random_spec(
    rng: np.random.Generator, Nt: int = 64, n: int = 1
) -> VarOperatorSpec:
    """Random lambda != 0 operator with q >= 0."""
    t = grid_points(Nt)
    a = rng.uniform(0.5, 2.0)
    q = a + rng.uniform(-0.4, 0.4) * a * np.cos(t)
    s = rng.uniform(-0.5, 0.5) + rng.uniform(-0.3, 0.3) * np.sin(t)
    p = np.array(
        [rng.uniform(-1.0, 1.0) + 0.3 * np.cos(t + j) for j in range(n)]
    )
    lam = rng.choice([-1.0, 1.0], size=n) * rng.uniform(0.3, 2.0, size=n)
    alpha = complex(rng.normal(), rng.normal())
    return VarOperatorSpec(q, s, p, lam, alpha, rng.normal(), "random")


def remark_t2_suite(
    seed: int = 0,
    trials: int = 20,
    ws: Optional[WeightSequence] = None,
    eps_list: Sequence[float] = (1.0,),
    xi_max: float = 30,
    tau_max: int = 20,
    Nt: int = 64,
) -> Dict:
    """On T^2 with lambda != 0, (I) and (II) should bring (III) along.

    Random operators are drawn; for every one where (I) and (II) pass the
    (III) scan is run, and any failure is logged as a finding.
    """
    ws = ws or make_gevrey(2.0)
    rng = np.random.default_rng(seed)
    eligible, findings = 0, []
    for trial in range(trials):
        spec = random_spec(rng, Nt)
        report = check_conditions(spec, ws, eps_list, xi_max, tau_max)
        if not (report.cond_I and report.cond_II):
            continue
        eligible += 1
        if report.cond_III.verdict != PASS:
            finding = {
                "trial": trial,
                "spec": spec.to_dict(),
                "verdict": report.cond_III.verdict,
                "witness": report.cond_III.witness,
            }
            findings.append(finding)
            logging.warning(
                f"T^2 remark finding in trial {trial}: (III) "
                f"{report.cond_III.verdict} at {report.cond_III.witness}"
            )
    return {
        "seed": seed,
        "trials": trials,
        "eligible": eligible,
        "findings": findings,
        "passed": not findings,
    }
