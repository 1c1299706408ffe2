# -*- coding: utf-8 -*-
"""
Constant-coefficient operators Pu = Lu - Au - B conj(u) on the torus.

L = sum_{0<|alpha|<=m} c_alpha d^alpha has symbol
sigma(xi) = sum i^|alpha| c_alpha xi^alpha. Frequencies xi and -xi are
coupled by the conjugate term, with discriminant
Delta(xi) = (sigma(xi) - A)(conj sigma(-xi) - conj A) - |B|^2.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import AnyStr, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .diophantine import (
    convergent_witnesses,
    DiophantineNumber,
    irrationality_profile,
    is_liouville_like,
    parse_number,
)
from .margincurves import (
    DEGENERATE,
    FAIL,
    margin_scan,
    MarginCurve,
    MarginCurves,
    PASS,
    ScanResult,
)
from .spectral import (
    Freq,
    GridFunction,
    lattice,
    shell_radii,
    spectral_derivative,
    Spectrum,
    synthesize,
)
from .util import (
    DomainError,
    IncompatibleDataError,
    parse_complex,
    SpecFormatError,
    timeit,
)
from .weightseq import log_assoc_inf_array, WeightSequence

I_POWERS = (1, 1j, -1, -1j)
PRESETS = ("laplace", "heat", "wave", "vector_field")
DEFAULT_TOL_ZERO = 1e-10
# small divisors of the families must survive the zero test
CLASSIFY_TOL_ZERO = 1e-30
ALGEBRAIC_TOL = 1e-12
ELLIPTIC_TOL = 1e-8

Number = Union[float, DiophantineNumber]


@dataclass(frozen=True)
class ConstOperatorSpec:
    """Operator data: dimension, terms {alpha: c_alpha}, A and B."""

    n: int
    terms: Dict[Freq, complex] = field(default_factory=dict)
    A: complex = 0j
    B: complex = 0j
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Dimension must be >= 1, got n={self.n}")
        clean = {}
        for alpha, coef in self.terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or any(a < 0 for a in alpha):
                raise DomainError(
                    f"Multi-index {alpha} is not in N_0^{self.n}"
                )
            if sum(alpha) == 0:
                raise DomainError(
                    "Zero-order terms are not allowed, fold them into A"
                )
            clean[alpha] = complex(coef)
        if not clean:
            raise DomainError("An operator needs at least one term")
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "A", complex(self.A))
        object.__setattr__(self, "B", complex(self.B))

    def __repr__(self) -> str:
        """Object string representation."""
        name = self.label or f"{len(self.terms)} terms"
        return (
            f"<ConstOperatorSpec {name} on T^{self.n}, order {self.order}, "
            f"A={self.A:g}, B={self.B:g}>"
        )

    @property
    def order(self) -> int:
        return max(sum(alpha) for alpha in self.terms)

    def to_dict(self) -> Dict:
        """Return the operator in its JSON form."""
        return {
            "n": self.n,
            "terms": [
                {"alpha": list(alpha), "re": c.real, "im": c.imag}
                for alpha, c in sorted(self.terms.items())
            ],
            "A": {"re": self.A.real, "im": self.A.imag},
            "B": {"re": self.B.real, "im": self.B.imag},
            "label": self.label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict) -> "ConstOperatorSpec":
        """Build from the JSON form or from {"preset": name, ...}."""
        A = parse_complex(data.get("A", 0.0), "A")
        B = parse_complex(data.get("B", 0.0), "B")
        if "preset" in data:
            return preset(
                data["preset"],
                n=int(data.get("n", 1)),
                eta=data.get("eta", 1.0),
                C=data.get("C"),
                A=A,
                B=B,
            )
        if "n" not in data:
            raise SpecFormatError("n")
        if "terms" not in data or not isinstance(data["terms"], list):
            raise SpecFormatError("terms")
        terms = {}
        for row in data["terms"]:
            if not isinstance(row, dict) or "alpha" not in row:
                raise SpecFormatError("alpha")
            coef = parse_complex(
                {k: v for k, v in row.items() if k in ("re", "im")},
                "terms",
            )
            terms[tuple(row["alpha"])] = coef
        try:
            return cls(int(data["n"]), terms, A, B, data.get("label", ""))
        except DomainError as exc:
            raise SpecFormatError("terms", str(exc))

    @classmethod
    def from_json(cls, json_str: AnyStr) -> "ConstOperatorSpec":
        return cls.from_dict(json.loads(json_str))


@dataclass
class ModeSolution:
    """Solution of the coupled system at the pair {xi, -xi}."""

    xi: Freq
    uplus: complex
    uminus: complex
    delta: complex
    status: str  # unique | non-unique | incompatible
    residual: float = 0.0

    @property
    def certificate(self) -> Optional[Dict]:
        if self.status != "incompatible":
            return None
        return {
            "xi": list(self.xi),
            "delta": self.delta,
            "residual": self.residual,
        }

    def to_dict(self) -> Dict:
        return {
            "xi": list(self.xi),
            "u_plus": self.uplus,
            "u_minus": self.uminus,
            "delta": self.delta,
            "status": self.status,
            "residual": self.residual,
        }


@dataclass
class SmoothScan:
    """Power-law scan |Delta| >= (1+|xi|)^-gamma for one gamma."""

    gamma: float
    verdict: str
    min_margin: float
    witness: Optional[Freq]
    curve: MarginCurve

    def to_dict(self) -> Dict:
        return {
            "gamma": self.gamma,
            "verdict": self.verdict,
            "min_log_margin": self.min_margin,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass
class SolvabilityReport:
    """Finite-range verdict of a discriminant scan."""

    kind: str
    xi_max: float
    gamma_floor: float
    zero_set: List[Freq]
    scan: Optional[ScanResult] = None
    smooth: List[SmoothScan] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.scan is not None:
            return self.scan.verdict
        verdicts = [s.verdict for s in self.smooth]
        if PASS in verdicts:
            return PASS
        if verdicts and all(v == DEGENERATE for v in verdicts):
            return DEGENERATE
        return FAIL

    @property
    def witness(self) -> Optional[Freq]:
        if self.scan is not None:
            return self.scan.witness
        if self.verdict == PASS:
            return None
        return next((s.witness for s in self.smooth if s.witness), None)

    @property
    def curves(self) -> MarginCurves:
        if self.scan is not None:
            curves = self.scan.curves
        else:
            curves = MarginCurves([s.curve for s in self.smooth])
        curves.family_label = self.kind
        return curves

    def to_dict(self) -> Dict:
        data = {
            "kind": self.kind,
            "verdict": self.verdict,
            "xi_max": self.xi_max,
            "gamma_floor": self.gamma_floor,
            "witness": list(self.witness) if self.witness else None,
            "zero_set": [list(xi) for xi in self.zero_set],
        }
        if self.scan is not None:
            data["scans"] = [s.to_dict() for s in self.scan.scans]
        else:
            data["scans"] = [s.to_dict() for s in self.smooth]
        return data


@dataclass
class ClassificationReport:
    """Which sufficient condition of an example family applies."""

    kind: str
    matched: Optional[int]
    verdict: str
    details: Dict = field(default_factory=dict)
    scan: Optional[SolvabilityReport] = None

    def to_dict(self) -> Dict:
        data = {
            "kind": self.kind,
            "matched_condition": self.matched,
            "verdict": self.verdict,
            "details": self.details,
        }
        if self.scan is not None:
            data["scan"] = self.scan.to_dict()
        return data


def symbol(spec: ConstOperatorSpec, xi) -> complex:
    """sigma(xi) = sum i^|alpha| c_alpha xi^alpha, with exact monomials."""
    xi = tuple(int(v) for v in np.atleast_1d(xi))
    total = 0j
    for alpha, coef in spec.terms.items():
        monomial = math.prod(v ** a for v, a in zip(xi, alpha))
        total += I_POWERS[sum(alpha) % 4] * coef * monomial
    return total


def symbol_array(spec: ConstOperatorSpec, points: np.ndarray) -> np.ndarray:
    """Symbol at every row of an (M, n) array of frequencies."""
    points = np.asarray(points, dtype=float).reshape(-1, spec.n)
    total = np.zeros(len(points), dtype=complex)
    for alpha, coef in spec.terms.items():
        monomial = np.prod(points ** np.array(alpha), axis=1)
        total += I_POWERS[sum(alpha) % 4] * coef * monomial
    return total


def _expanded_delta(sigma, sigma_conj_minus, A: complex, B: complex):
    # (s - A)(s' - conj A) - |B|^2, exact when |A| = |B|
    return (
        sigma * sigma_conj_minus
        - np.conj(A) * sigma
        - A * sigma_conj_minus
        + (abs(A) ** 2 - abs(B) ** 2)
    )


def discriminant(spec: ConstOperatorSpec, xi) -> complex:
    """Delta(xi); conj(Delta(xi)) = Delta(-xi)."""
    xi = tuple(int(v) for v in np.atleast_1d(xi))
    sigma = symbol(spec, xi)
    sigma_cm = symbol(spec, tuple(-v for v in xi)).conjugate()
    return complex(_expanded_delta(sigma, sigma_cm, spec.A, spec.B))


def discriminant_array(
    spec: ConstOperatorSpec, points: np.ndarray
) -> np.ndarray:
    """Delta at every row of an (M, n) array of frequencies."""
    points = np.asarray(points).reshape(-1, spec.n)
    sigma = symbol_array(spec, points)
    sigma_cm = np.conj(symbol_array(spec, -points))
    return _expanded_delta(sigma, sigma_cm, spec.A, spec.B)


def _zero_threshold(spec: ConstOperatorSpec, norms, tol_zero: float):
    return tol_zero * (1.0 + np.asarray(norms)) ** (2 * spec.order)


def _lstsq_pair(
    matrix: np.ndarray, rhs: np.ndarray, tol: float
) -> Tuple[np.ndarray, float, bool]:
    """Minimal-norm solution and compatibility of a rank-deficient system."""
    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=tol)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    rhs_norm = float(np.linalg.norm(rhs))
    compatible = rhs_norm <= tol or residual <= 1e-8 * rhs_norm
    return solution, residual, compatible


def solve_mode(
    spec: ConstOperatorSpec,
    xi,
    fplus: complex,
    fminus: complex,
    tol_zero: float = DEFAULT_TOL_ZERO,
) -> ModeSolution:
    """Solve the 2x2 system coupling u(xi) and conj u(-xi).

    (sigma - A) u(xi) - B conj u(-xi) = f(xi)
    -conj B u(xi) + (conj sigma(-xi) - conj A) conj u(-xi) = conj f(-xi)

    At xi = 0 both equations coincide up to conjugation and the system is
    solved as a real 2x2 system in (Re u(0), Im u(0)).
    """
    xi = tuple(int(v) for v in np.atleast_1d(xi))
    A, B = spec.A, spec.B
    norm = math.sqrt(sum(v * v for v in xi))
    threshold = float(_zero_threshold(spec, norm, tol_zero))
    delta = discriminant(spec, xi)

    if not any(xi):
        f0 = complex(fplus)
        matrix = -np.array(
            [
                [A.real + B.real, B.imag - A.imag],
                [A.imag + B.imag, A.real - B.real],
            ]
        )
        rhs = np.array([f0.real, f0.imag])
        if abs(delta) > threshold:
            x, y = np.linalg.solve(matrix, rhs)
            u0 = complex(x, y)
            return ModeSolution(xi, u0, u0, delta, "unique")
        (x, y), residual, ok = _lstsq_pair(matrix, rhs, tol_zero)
        u0 = complex(x, y)
        status = "non-unique" if ok else "incompatible"
        return ModeSolution(xi, u0, u0, delta, status, residual)

    sigma = symbol(spec, xi)
    sigma_cm = symbol(spec, tuple(-v for v in xi)).conjugate()
    fplus, fminus_c = complex(fplus), complex(fminus).conjugate()
    if abs(delta) > threshold:
        uplus = ((sigma_cm - A.conjugate()) * fplus + B * fminus_c) / delta
        uminus_c = ((sigma - A) * fminus_c + B.conjugate() * fplus) / delta
        return ModeSolution(
            xi, uplus, uminus_c.conjugate(), delta, "unique"
        )
    matrix = np.array(
        [[sigma - A, -B], [-B.conjugate(), sigma_cm - A.conjugate()]]
    )
    rhs = np.array([fplus, fminus_c])
    (uplus, uminus_c), residual, ok = _lstsq_pair(matrix, rhs, tol_zero)
    status = "non-unique" if ok else "incompatible"
    return ModeSolution(
        xi, complex(uplus), complex(uminus_c).conjugate(), delta, status,
        residual,
    )


def _representatives(freqs: Sequence[Freq]) -> List[Freq]:
    """Lexicographically smallest member of each pair {xi, -xi}."""
    reps = set()
    for xi in freqs:
        minus = tuple(-v for v in xi)
        reps.add(min(xi, minus))
    return sorted(reps)


def apply_operator(
    spec: ConstOperatorSpec, u: GridFunction
) -> GridFunction:
    """Pu on a grid, derivatives taken spectrally."""
    if u.n != spec.n:
        raise DomainError(f"Grid of dimension {u.n} for T^{spec.n} operator")
    samples = np.asarray(u.samples, dtype=complex)
    lu = np.zeros_like(samples)
    for alpha, coef in spec.terms.items():
        term = samples
        for axis, order in enumerate(alpha):
            if order:
                term = spectral_derivative(term, axis, order)
        lu = lu + coef * term
    return GridFunction(lu - spec.A * samples - spec.B * np.conj(samples))


def residual_on_grid(
    spec: ConstOperatorSpec, U: Spectrum, F: Spectrum
) -> float:
    """sup |PU - F| / sup |F| on a grid resolving both spectra."""
    if not F:
        return 0.0 if not U else float("inf")
    N = 2 * max(U.K, F.K) + 2
    u = synthesize(U, N)
    f = synthesize(F, N)
    diff = apply_operator(spec, u).samples - f.samples
    return float(np.abs(diff).max() / f.norm_sup())


@timeit("Constant-coefficient solve")
def solve(
    spec: ConstOperatorSpec,
    F: Spectrum,
    tol_zero: float = DEFAULT_TOL_ZERO,
    tol_residual: float = 1e-10,
) -> Tuple[Spectrum, Dict]:
    """Solve Pu = f mode by mode over the support of F.

    Raises IncompatibleDataError with every incompatibility certificate
    when some pair has no solution. Otherwise returns U and diagnostics
    with the degenerate (non-unique) modes and the relative residual of
    PU - F on a synthesis grid.
    """
    if F.n != spec.n:
        raise DomainError(f"Spectrum on Z^{F.n} for a T^{spec.n} operator")
    entries: Dict[Freq, complex] = {}
    degenerate, certificates = [], []
    for xi in _representatives(F.frequencies()):
        minus = tuple(-v for v in xi)
        mode = solve_mode(spec, xi, F[xi], F[minus], tol_zero)
        if mode.status == "incompatible":
            certificates.append(mode.certificate)
            continue
        if mode.status == "non-unique":
            degenerate.append(list(xi))
        entries[xi] = mode.uplus
        if any(xi):
            entries[minus] = mode.uminus
    if certificates:
        logging.error(
            f"{len(certificates)} incompatible modes, first at "
            f"{certificates[0]['xi']}"
        )
        raise IncompatibleDataError(certificates)
    if degenerate:
        logging.warning(
            f"{len(degenerate)} degenerate modes solved with minimal norm"
        )

    U = Spectrum(spec.n, entries, F.K)
    residual = residual_on_grid(spec, U, F)
    if residual > tol_residual:
        logging.warning(f"Relative residual {residual:.3e} > {tol_residual}")
    diagnostics = {
        "modes": len(entries),
        "degenerate": degenerate,
        "incompatible": [],
        "rel_residual": residual,
    }
    return U, diagnostics


def zero_set(
    spec: ConstOperatorSpec,
    xi_max: float,
    tol_zero: float = DEFAULT_TOL_ZERO,
) -> List[Freq]:
    """Frequencies |xi| <= xi_max with |Delta| <= tol (1+|xi|)^(2m)."""
    points = lattice(spec.n, xi_max)
    norms = shell_radii(points)
    delta = discriminant_array(spec, points)
    mask = np.abs(delta) <= _zero_threshold(spec, norms, tol_zero)
    zeros = points[mask]
    order = np.lexsort(zeros.T[::-1])
    order = order[np.argsort(shell_radii(zeros)[order], kind="stable")]
    return [tuple(int(v) for v in zeros[i]) for i in order]


@timeit("DC_M scan")
def check_dc_m(
    spec: ConstOperatorSpec,
    ws: WeightSequence,
    eps_list: Sequence[float],
    xi_max: float,
    gamma_floor: float = 1.0,
    tol_zero: float = DEFAULT_TOL_ZERO,
    drop_tol: float = 6.9,
    zero_verdict: str = DEGENERATE,
) -> SolvabilityReport:
    """Scan |Delta(xi)| >= C_eps inf_j m_j j!/(eps (1+|xi|))^j.

    The margin log|Delta| - log inf-term is scanned over
    gamma_floor <= |xi| <= xi_max for every eps.
    """
    if not 1 <= gamma_floor <= xi_max:
        raise DomainError(
            f"Need xi_max >= gamma_floor >= 1, got {xi_max}, {gamma_floor}"
        )
    points = lattice(spec.n, xi_max, floor=gamma_floor)
    norms = shell_radii(points)
    delta = discriminant_array(spec, points)
    zero_mask = np.abs(delta) <= _zero_threshold(spec, norms, tol_zero)
    with np.errstate(divide="ignore"):
        log_delta = np.log(np.abs(delta))
    scan = margin_scan(
        points,
        log_delta,
        ws,
        eps_list,
        gamma_floor,
        xi_max,
        zero_mask=zero_mask,
        zero_verdict=zero_verdict,
        drop_tol=drop_tol,
        norms=norms,
        label=spec.label or "DC_M",
    )
    return SolvabilityReport(
        "dc_m",
        xi_max,
        gamma_floor,
        zero_set(spec, xi_max, tol_zero),
        scan=scan,
    )


@timeit("Smooth condition scan")
def check_smooth_dc(
    spec: ConstOperatorSpec,
    gamma_list: Sequence[float],
    xi_max: float,
    gamma_floor: float = 1.0,
    tol_zero: float = DEFAULT_TOL_ZERO,
) -> SolvabilityReport:
    """Scan |Delta(xi)| >= (1+|xi|)^-gamma for |xi| >= max(gamma, floor).

    Holds on range for gamma when every margin
    log|Delta| + gamma log(1+|xi|) is >= 0. The report passes when some
    gamma of the list holds.
    A gamma whose range holds no frequency is inconclusive (degenerate).
    """
    all_points = lattice(spec.n, xi_max)
    all_norms = shell_radii(all_points)
    all_delta = discriminant_array(spec, all_points)
    all_zero = np.abs(all_delta) <= _zero_threshold(
        spec, all_norms, tol_zero
    )
    smooth = []
    for gamma in gamma_list:
        start = max(float(gamma), gamma_floor)
        inside = all_norms >= start - 1e-12
        if not inside.any():
            logging.warning(
                f"smooth scan gamma={gamma}: no frequency with "
                f"{start} <= |xi| <= {xi_max}, inconclusive"
            )
            smooth.append(
                SmoothScan(
                    gamma, DEGENERATE, math.nan, None, MarginCurve(eps=gamma)
                )
            )
            continue
        points, norms = all_points[inside], all_norms[inside]
        zeros = all_zero[inside]
        with np.errstate(divide="ignore"):
            margin = np.log(np.abs(all_delta[inside])) + gamma * np.log1p(
                norms
            )
        margin[zeros] = -np.inf
        shells = np.floor(norms).astype(int)
        radii = np.unique(shells)
        per_shell = np.array([margin[shells == r].min() for r in radii])
        curve = MarginCurve(
            radii, per_shell, eps=gamma, label=f"smooth gamma={gamma:g}"
        )
        order = np.lexsort(points.T[::-1])
        order = order[np.argsort(norms[order], kind="stable")]
        best = order[np.argmin(margin[order])]
        min_margin = float(margin[best])
        witness = tuple(int(v) for v in points[best])
        if zeros.any():
            verdict = DEGENERATE
        elif min_margin >= -1e-12:
            verdict, witness = PASS, None
        else:
            verdict = FAIL
        smooth.append(SmoothScan(gamma, verdict, min_margin, witness, curve))
        logging.info(f"smooth scan gamma={gamma}: {verdict}")
    return SolvabilityReport(
        "smooth",
        xi_max,
        gamma_floor,
        [
            tuple(int(v) for v in p)
            for p in all_points[all_zero]
        ],
        smooth=smooth,
    )


def smooth_implies_m_check(
    spec: ConstOperatorSpec,
    ws: WeightSequence,
    gamma: int,
    eps: float,
    xi_max: float,
) -> bool:
    """Check (1+|xi|)^-gamma >= C_eps inf-term with C_eps = eps^g/(m_g g!).

    This is the estimate turning a smooth solvability bound into the
    ultradifferentiable one; it is checked on every norm of the scan.
    """
    if gamma < 0 or int(gamma) != gamma:
        raise DomainError(f"gamma must be a nonnegative integer, got {gamma}")
    gamma = int(gamma)
    radii = np.unique(shell_radii(lattice(spec.n, xi_max)))
    log_c = gamma * math.log(eps) - float(ws.log_m(gamma)) - gammaln(gamma + 1)
    lhs = -gamma * np.log1p(radii)
    rhs = log_c + log_assoc_inf_array(ws, eps, 1.0 + radii)
    return bool(np.all(lhs >= rhs - 1e-9))


def build_obstruction(
    spec: ConstOperatorSpec, omega0: Sequence, variant: str = "delta"
) -> Spectrum:
    """Right-hand side of the non-solvability construction on omega0.

    variant "delta": f(xi) = Delta(xi); variant "sigma":
    f(xi) = sigma(xi) - A.
    """
    if not len(omega0):
        raise DomainError("The witness set must not be empty")
    entries = {}
    for xi in omega0:
        xi = tuple(int(v) for v in np.atleast_1d(xi))
        if variant == "delta":
            entries[xi] = discriminant(spec, xi)
        elif variant == "sigma":
            entries[xi] = symbol(spec, xi) - spec.A
        else:
            raise DomainError(f"Unknown obstruction variant '{variant}'")
    return Spectrum(spec.n, entries).prune(0.0)


def _eta_value(eta: Number) -> float:
    value = eta.value if isinstance(eta, DiophantineNumber) else float(eta)
    if value <= 0:
        raise DomainError(f"eta must be > 0, got {value}")
    return value


def preset(
    name: str,
    n: int = 1,
    eta: Union[Number, str] = 1.0,
    C: Optional[Sequence] = None,
    A: complex = 0j,
    B: complex = 0j,
) -> ConstOperatorSpec:
    """Classical operators; heat, wave and vector fields put t first.

    laplace(n) on T^n; heat(n, eta) = d_t - eta^2 Lap_x and
    wave(n, eta) = d_t^2 - eta^2 Lap_x on T^(n+1);
    vector_field(C) = d_t + sum C_j d_xj on T^(len(C)+1).
    """
    if isinstance(eta, (str, dict)):
        eta = parse_number(eta)
    if name == "laplace":
        terms = {
            tuple(2 if k == j else 0 for k in range(n)): 1.0
            for j in range(n)
        }
        return ConstOperatorSpec(n, terms, A, B, label=f"laplace({n})")
    if name in ("heat", "wave"):
        eta_v = _eta_value(eta)
        time_order = 1 if name == "heat" else 2
        terms = {(time_order,) + (0,) * n: 1.0}
        for j in range(n):
            alpha = (0,) + tuple(2 if k == j else 0 for k in range(n))
            terms[alpha] = -(eta_v ** 2)
        return ConstOperatorSpec(
            n + 1, terms, A, B, label=f"{name}({n}, eta={eta_v:g})"
        )
    if name == "vector_field":
        if not C:
            raise DomainError("vector_field needs a coefficient vector C")
        coefs = [parse_complex(c, "C") for c in C]
        dim = len(coefs) + 1
        terms = {(1,) + (0,) * len(coefs): 1.0}
        for j, c in enumerate(coefs):
            alpha = tuple(1 if k == j + 1 else 0 for k in range(dim))
            terms[alpha] = c
        return ConstOperatorSpec(dim, terms, A, B, label="vector_field")
    raise DomainError(f"Unknown preset '{name}', use one of {PRESETS}")


def laplace(n: int, A: complex = 0j, B: complex = 0j) -> ConstOperatorSpec:
    return preset("laplace", n=n, A=A, B=B)


def heat(
    n: int, eta: Number, A: complex = 0j, B: complex = 0j
) -> ConstOperatorSpec:
    return preset("heat", n=n, eta=eta, A=A, B=B)


def wave(
    n: int, eta: Number, A: complex = 0j, B: complex = 0j
) -> ConstOperatorSpec:
    return preset("wave", n=n, eta=eta, A=A, B=B)


def vector_field(
    C: Sequence[complex], A: complex = 0j, B: complex = 0j
) -> ConstOperatorSpec:
    return preset("vector_field", C=C, A=A, B=B)


def is_elliptic(spec: ConstOperatorSpec, radius: int = 8) -> bool:
    """Principal symbol bounded away from zero on sampled unit directions."""
    m = spec.order
    principal = ConstOperatorSpec(
        spec.n, {a: c for a, c in spec.terms.items() if sum(a) == m}
    )
    points = lattice(spec.n, radius, floor=1)
    directions = points / shell_radii(points)[:, np.newaxis]
    values = np.abs(symbol_array(principal, directions))
    return bool(values.min() > ELLIPTIC_TOL)


def _as_number(eta: Union[Number, str]) -> DiophantineNumber:
    if isinstance(eta, (str, dict)):
        eta = parse_number(eta)
    if isinstance(eta, DiophantineNumber):
        return eta
    return DiophantineNumber.from_value(float(eta))


def classify_wave(
    A: complex,
    B: complex,
    eta: Union[Number, str],
    ws: WeightSequence,
    xi_max: float,
    eps_list: Sequence[float] = (0.1, 1.0),
    gamma_floor: float = 1.0,
    tol_zero: float = CLASSIFY_TOL_ZERO,
    drop_tol: float = 6.9,
) -> ClassificationReport:
    """Sufficient conditions for the periodic wave operator on T^2.

    (1) |B| < |Im A|; (2) |A| = |B|, Re A = 0 and eta irrational
    non-Liouville, estimated from the convergents on the available depth;
    (3) the DC_M scan passes on range.
    """
    A, B = complex(A), complex(B)
    number = _as_number(eta)
    details: Dict = {"eta": number.value, "quotients": list(number.quotients)}

    cond1 = abs(B) < abs(A.imag)
    details["condition_1"] = cond1
    if cond1:
        logging.info(f"wave A={A}, B={B}: |B| < |Im A|")
        return ClassificationReport("wave", 1, "solvable", details)

    algebraic = (
        abs(abs(A) - abs(B)) <= ALGEBRAIC_TOL * max(1.0, abs(A))
        and abs(A.real) <= ALGEBRAIC_TOL
    )
    liouville = is_liouville_like(number)
    details.update(
        {
            "condition_2_algebraic": algebraic,
            "liouville_like": liouville,
            "irrationality_profile": irrationality_profile(number),
            "convergent_witnesses": [
                list(w) for w in convergent_witnesses(number, xi_max)
            ],
        }
    )
    if algebraic and liouville is False:
        # epistemic: bounded growth of the convergents seen so far
        return ClassificationReport(
            "wave", 2, "solvable (non-Liouville on range)", details
        )

    spec = wave(1, number.value, A, B)
    report = check_dc_m(
        spec, ws, eps_list, xi_max, gamma_floor, tol_zero, drop_tol
    )
    matched = 3 if report.verdict == PASS else None
    verdict = PASS if matched else report.verdict
    return ClassificationReport("wave", matched, verdict, details, report)


def vector_field_discriminant(
    C: Sequence[complex], A: complex, B: complex, points: np.ndarray
) -> np.ndarray:
    """Closed form -|w|^2 + |A|^2 - |B|^2 - 2i Re(A conj w), w = tau + xi.C.

    Rows of `points` are (tau, xi_1, ..., xi_q).
    """
    points = np.asarray(points, dtype=float)
    C = np.array([complex(c) for c in C])
    w = points[:, 0] + points[:, 1:] @ C
    return (
        -np.abs(w) ** 2
        + abs(A) ** 2
        - abs(B) ** 2
        - 2j * np.real(A * np.conj(w))
    )


def classify_vector_field(
    C: Sequence,
    A: complex,
    B: complex,
    ws: WeightSequence,
    xi_max: float,
    eps_list: Sequence[float] = (0.1, 1.0),
    gamma_floor: float = 1.0,
    tol_zero: float = CLASSIFY_TOL_ZERO,
    drop_tol: float = 6.9,
) -> ClassificationReport:
    """Solvability of d_t + sum C_j d_xj - A - B conj on T^(q+1).

    With real C: (1) |B| > |A|; (2) |B| < |A| and Re A != 0;
    (3) the DC_M scan passes on range. Complex C always takes the scan.
    """
    coefs = [parse_complex(c, "C") for c in C]
    A, B = complex(A), complex(B)
    spec = vector_field(coefs, A, B)
    points = lattice(spec.n, xi_max)
    closed = vector_field_discriminant(coefs, A, B, points)
    direct = discriminant_array(spec, points)
    scale = np.maximum(np.abs(direct), 1.0)
    details: Dict = {
        "C": coefs,
        "closed_form_max_rel_diff": float(
            (np.abs(closed - direct) / scale).max()
        ),
    }
    real_c = all(abs(c.imag) <= ALGEBRAIC_TOL for c in coefs)
    details["real_C"] = real_c
    if real_c:
        if abs(B) > abs(A):
            return ClassificationReport(
                "vector_field", 1, "solvable", details
            )
        if abs(B) < abs(A) and abs(A.real) > ALGEBRAIC_TOL:
            return ClassificationReport(
                "vector_field", 2, "solvable", details
            )

    report = check_dc_m(
        spec, ws, eps_list, xi_max, gamma_floor, tol_zero, drop_tol
    )
    matched = 3 if report.verdict == PASS else None
    verdict = PASS if matched else report.verdict
    return ClassificationReport(
        "vector_field", matched, verdict, details, report
    )
