# -*- coding: utf-8 -*-
"""Torus grids and Fourier analysis with the (2 pi)^-n normalization.

Fourier coefficients are discrete approximations of
`f^(xi) = (2 pi)^-n int f(x) exp(-i xi.x) dx` on uniform grids, i.e.
`fftn(samples) / N^n`. On even grids the Nyquist coefficient is split
evenly between +N/2 and -N/2, so real samples give conjugate-symmetric
spectra.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import AnyStr, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .util import DomainError, SpecFormatError
from .weightseq import WeightSequence, log_assoc_inf_array

Freq = Tuple[int, ...]
Shape = Union[int, Sequence[int]]


def _as_shape(N: Shape, n: int) -> Tuple[int, ...]:
    if np.ndim(N) == 0:
        return (int(N),) * n
    shape = tuple(int(v) for v in N)
    if len(shape) != n:
        raise DomainError(f"Grid shape {shape} does not match dimension {n}")
    return shape


def grid_points(N: int) -> np.ndarray:
    """Uniform nodes 2 pi k / N on [0, 2 pi)."""
    return 2 * np.pi * np.arange(N) / N


def box_frequencies(N: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frequencies -K..K (K = N // 2), FFT slots and Nyquist weights."""
    K = N // 2
    freqs = np.arange(-K, K + 1)
    slots = np.mod(freqs, N)
    weights = np.ones(freqs.shape)
    if N % 2 == 0:
        weights[np.abs(freqs) == K] = 0.5
    return freqs, slots, weights


def wavenumbers(N: int) -> np.ndarray:
    """FFT wavenumbers with the Nyquist slot zeroed (odd derivatives)."""
    k = np.fft.fftfreq(N, d=1.0 / N)
    if N % 2 == 0:
        k[N // 2] = 0.0
    return k


@dataclass
class GridFunction:
    """Complex samples of a function on the uniform grid of the n-torus.

    `samples` has one axis per torus variable; axes may differ in size
    (a t axis of N_t points next to x axes of N points).
    """

    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim < 1 or min(self.samples.shape) < 2:
            raise DomainError(
                f"Need at least 2 points per axis, got {self.samples.shape}"
            )

    @property
    def n(self) -> int:
        return self.samples.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.samples.shape

    def __repr__(self) -> str:
        """Object string representation."""
        return f"<GridFunction n={self.n} shape={self.shape}>"

    def points(self, axis: int = 0) -> np.ndarray:
        """Grid nodes along one axis."""
        return grid_points(self.shape[axis])

    def mesh(self) -> List[np.ndarray]:
        """Broadcastable node arrays, one per axis."""
        return np.meshgrid(
            *[grid_points(size) for size in self.shape], indexing="ij"
        )

    def norm_sup(self) -> float:
        return float(np.abs(self.samples).max())

    @classmethod
    def from_callable(cls, func, shape: Sequence[int]) -> "GridFunction":
        """Sample `func(*coords)` on a grid of the given shape."""
        coords = np.meshgrid(
            *[grid_points(size) for size in shape], indexing="ij"
        )
        values = np.broadcast_to(func(*coords), tuple(shape))
        return cls(np.array(values, dtype=complex))

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write `# {json header}` then one `re,im` row per sample."""
        header = json.dumps({"n": self.n, "N": list(self.shape)})
        flat = self.samples.ravel()
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# {header}\n")
            for value in flat:
                f.write(f"{value.real:.17g},{value.imag:.17g}\n")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "GridFunction":
        """Read the CSV format written by `to_csv`."""
        with open(path, encoding="utf-8") as f:
            first = f.readline()
            if not first.startswith("#"):
                raise SpecFormatError("header", "missing '# {n, N}' header")
            header = json.loads(first[1:])
            data = np.loadtxt(f, delimiter=",", ndmin=2)
        if "N" not in header:
            raise SpecFormatError("N")
        shape = _as_shape(header["N"], int(header.get("n", 1)))
        values = data[:, 0] + 1j * data[:, 1]
        if values.size != int(np.prod(shape)):
            raise SpecFormatError("N", "sample count does not match header")
        return cls(values.reshape(shape))


@dataclass
class Spectrum:
    """Finitely supported Fourier coefficients on Z^n.

    `K` is the radius of the box [-K, K]^n holding the support. With
    `real=True` the entries are symmetrized so that
    entry(-xi) = conj(entry(xi)).
    """

    n: int
    entries: Dict[Freq, complex] = field(default_factory=dict)
    K: int = 0
    real: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Spectrum dimension must be >= 1, got {self.n}")
        clean = {}
        for xi, value in self.entries.items():
            key = tuple(int(v) for v in np.atleast_1d(xi))
            if len(key) != self.n:
                raise DomainError(f"Frequency {key} is not in Z^{self.n}")
            clean[key] = complex(value)
        self.entries = clean
        radius = max(
            (max(abs(v) for v in xi) for xi in clean), default=0
        )
        self.K = max(int(self.K), radius)
        if self.real:
            self._symmetrize()

    def _symmetrize(self):
        sym = {}
        for xi in set(self.entries) | {
            tuple(-v for v in xi) for xi in self.entries
        }:
            minus = tuple(-v for v in xi)
            sym[xi] = 0.5 * (self[xi] + np.conj(self[minus]))
        self.entries = sym

    def __getitem__(self, xi) -> complex:
        key = tuple(int(v) for v in np.atleast_1d(xi))
        return self.entries.get(key, 0j)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        """True when some entry is nonzero."""
        return any(abs(v) > 0 for v in self.entries.values())

    def __repr__(self) -> str:
        """Object string representation."""
        return f"<Spectrum n={self.n} K={self.K} {len(self)} entries>"

    def __add__(self, other: "Spectrum") -> "Spectrum":
        if other.n != self.n:
            raise DomainError("Cannot add spectra of different dimension")
        entries = dict(self.entries)
        for xi, value in other.entries.items():
            entries[xi] = entries.get(xi, 0j) + value
        return Spectrum(
            self.n,
            entries,
            max(self.K, other.K),
            real=self.real and other.real,
        )

    def __mul__(self, scale: complex) -> "Spectrum":
        return Spectrum(
            self.n,
            {xi: scale * v for xi, v in self.entries.items()},
            self.K,
            real=self.real and np.imag(scale) == 0,
        )

    __rmul__ = __mul__

    def frequencies(self) -> List[Freq]:
        return sorted(self.entries)

    def norm_sup(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def max_radius(self, tol: float = 0.0) -> int:
        """Largest sup-norm |xi|_inf among entries with |value| > tol."""
        return max(
            (
                max(abs(v) for v in xi)
                for xi, value in self.entries.items()
                if abs(value) > tol
            ),
            default=0,
        )

    def prune(self, tol: float = 0.0) -> "Spectrum":
        """Drop entries with |value| <= tol."""
        return Spectrum(
            self.n,
            {xi: v for xi, v in self.entries.items() if abs(v) > tol},
            self.K,
        )

    def to_dense(self, K: Optional[int] = None) -> np.ndarray:
        """Coefficients on the box [-K, K]^n, index xi + K."""
        K = self.K if K is None else K
        dense = np.zeros((2 * K + 1,) * self.n, dtype=complex)
        for xi, value in self.entries.items():
            if max(abs(v) for v in xi) <= K:
                dense[tuple(v + K for v in xi)] = value
        return dense

    @classmethod
    def from_dense(
        cls, dense: np.ndarray, K: int, real: bool = False
    ) -> "Spectrum":
        """Inverse of `to_dense`."""
        dense = np.asarray(dense, dtype=complex)
        entries = {
            tuple(int(v) - K for v in idx): dense[idx]
            for idx in np.ndindex(*dense.shape)
        }
        return cls(dense.ndim, entries, K, real=real)

    def to_dict(self) -> Dict:
        """Return the spectrum as a dict of JSON rows."""
        return {
            "n": self.n,
            "K": self.K,
            "real": self.real,
            "entries": [
                {
                    "xi": list(xi),
                    "re": self.entries[xi].real,
                    "im": self.entries[xi].imag,
                }
                for xi in self.frequencies()
            ],
        }

    def to_json(self) -> str:
        """Return the spectrum as a JSON string."""
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict) -> "Spectrum":
        """Build a spectrum from its dict form."""
        try:
            rows = data["entries"]
            n = int(data["n"])
        except (KeyError, TypeError, ValueError):
            raise SpecFormatError("entries" if "n" in data else "n")
        entries = {}
        for row in rows:
            if "xi" not in row:
                raise SpecFormatError("xi")
            entries[tuple(row["xi"])] = complex(
                row.get("re", 0.0), row.get("im", 0.0)
            )
        return cls(n, entries, int(data.get("K", 0)), data.get("real", False))

    @classmethod
    def from_json(cls, json_str: AnyStr) -> "Spectrum":
        """Load a spectrum from a JSON string."""
        return cls.from_dict(json.loads(json_str))


@dataclass
class PartialSpectrum:
    """Partial Fourier coefficients f^(t, xi) in the x variables.

    `slices[xi]` holds the samples of t -> f^(t, xi) on the shared t grid.
    """

    q: int
    Nt: int
    slices: Dict[Freq, np.ndarray] = field(default_factory=dict)
    K: int = 0

    def __post_init__(self):
        clean = {}
        for xi, values in self.slices.items():
            key = tuple(int(v) for v in np.atleast_1d(xi))
            values = np.asarray(values, dtype=complex)
            if len(key) != self.q or values.shape != (self.Nt,):
                raise DomainError(f"Bad partial slice at {key}")
            clean[key] = values
        self.slices = clean
        radius = max((max(abs(v) for v in xi) for xi in clean), default=0)
        self.K = max(int(self.K), radius)

    def __getitem__(self, xi) -> np.ndarray:
        key = tuple(int(v) for v in np.atleast_1d(xi))
        if key in self.slices:
            return self.slices[key]
        return np.zeros(self.Nt, dtype=complex)

    def __repr__(self) -> str:
        """Object string representation."""
        return (
            f"<PartialSpectrum q={self.q} Nt={self.Nt} "
            f"{len(self.slices)} slices>"
        )

    @property
    def t_grid(self) -> np.ndarray:
        return grid_points(self.Nt)

    def frequencies(self) -> List[Freq]:
        return sorted(self.slices)


def _box_view(coeffs: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Rearrange FFT output on `axes` into centered boxes -K..K."""
    out = coeffs
    for axis in axes:
        _, slots, weights = box_frequencies(coeffs.shape[axis])
        out = np.take(out, slots, axis=axis)
        shape = [1] * out.ndim
        shape[axis] = weights.size
        out = out * weights.reshape(shape)
    return out


def analyze(f: GridFunction) -> Spectrum:
    """Fourier coefficients of grid samples on the box K = N // 2."""
    samples = f.samples
    coeffs = np.fft.fftn(samples) / samples.size
    dense = _box_view(coeffs, range(f.n))
    centers = [size // 2 for size in f.shape]
    entries = {
        tuple(int(i) - c for i, c in zip(idx, centers)): dense[idx]
        for idx in np.ndindex(*dense.shape)
    }
    is_real = bool(np.all(samples.imag == 0))
    return Spectrum(f.n, entries, max(centers), real=is_real)


def synthesize(S: Spectrum, N: Shape) -> GridFunction:
    """Evaluate sum_xi S(xi) exp(i xi.x) on the uniform grid."""
    shape = _as_shape(N, S.n)
    for axis, size in enumerate(shape):
        radius = max(
            (abs(xi[axis]) for xi, v in S.entries.items() if abs(v) > 0),
            default=0,
        )
        if 2 * radius >= size:
            raise DomainError(
                f"Aliasing: frequency {radius} on axis {axis} needs more "
                f"than {size} points"
            )
    coeffs = np.zeros(shape, dtype=complex)
    for xi, value in S.entries.items():
        coeffs[tuple(v % size for v, size in zip(xi, shape))] += value
    samples = np.fft.ifftn(coeffs) * coeffs.size
    return GridFunction(samples)


def random_spectrum(
    n: int, K: int, seed: int, real: bool = False, decay: float = 0.0
) -> Spectrum:
    """Band-limited random coefficients on [-K, K]^n.

    With `decay > 0` the amplitudes are damped by exp(-decay |xi|).
    """
    rng = np.random.default_rng(seed)
    shape = (2 * K + 1,) * n
    dense = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if decay > 0:
        axes = np.meshgrid(*[np.arange(-K, K + 1)] * n, indexing="ij")
        radius = np.sqrt(sum(a.astype(float) ** 2 for a in axes))
        dense *= np.exp(-decay * radius)
    return Spectrum.from_dense(dense, K, real=real)


def lattice(n: int, radius: float, floor: float = 0.0) -> np.ndarray:
    """Integer points of Z^n with floor <= |xi| <= radius, shape (M, n).

    Rows come in lexicographic order.
    """
    R = int(np.floor(radius))
    axes = np.meshgrid(*[np.arange(-R, R + 1)] * n, indexing="ij")
    points = np.stack([a.ravel() for a in axes], axis=1)
    norms = np.sqrt((points.astype(float) ** 2).sum(axis=1))
    mask = (norms <= radius + 1e-12) & (norms >= floor - 1e-12)
    return points[mask]


def partial_analyze(f: GridFunction) -> PartialSpectrum:
    """Fourier transform in the x axes only (axis 0 is t)."""
    if f.n < 2:
        raise DomainError("partial_analyze needs a t axis and x axes")
    x_axes = list(range(1, f.n))
    x_size = int(np.prod(f.shape[1:]))
    coeffs = np.fft.fftn(f.samples, axes=x_axes) / x_size
    dense = _box_view(coeffs, x_axes)
    centers = [size // 2 for size in f.shape[1:]]
    slices = {}
    for idx in np.ndindex(*dense.shape[1:]):
        xi = tuple(int(i) - c for i, c in zip(idx, centers))
        slices[xi] = dense[(slice(None),) + idx]
    return PartialSpectrum(f.n - 1, f.shape[0], slices, max(centers))


def partial_synthesize(P: PartialSpectrum, N: Shape) -> GridFunction:
    """Inverse of `partial_analyze` on x grids of N points per axis."""
    x_shape = _as_shape(N, P.q)
    for xi, values in P.slices.items():
        if np.any(values != 0) and any(
            2 * abs(v) >= size for v, size in zip(xi, x_shape)
        ):
            raise DomainError(f"Aliasing: slice {xi} needs a finer x grid")
    coeffs = np.zeros((P.Nt,) + x_shape, dtype=complex)
    for xi, values in P.slices.items():
        slot = tuple(v % size for v, size in zip(xi, x_shape))
        coeffs[(slice(None),) + slot] += values
    x_axes = list(range(1, P.q + 1))
    samples = np.fft.ifftn(coeffs, axes=x_axes) * int(np.prod(x_shape))
    return GridFunction(samples)


def trig_coefficients(samples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Frequencies and coefficients of the trigonometric interpolant."""
    samples = np.asarray(samples)
    N = samples.shape[-1]
    freqs, slots, weights = box_frequencies(N)
    coeffs = np.fft.fft(samples, axis=-1) / N
    return freqs, coeffs[..., slots] * weights


def trig_interpolate(samples: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Trigonometric interpolant of periodic samples evaluated at sigma."""
    freqs, coeffs = trig_coefficients(samples)
    basis = np.exp(1j * np.outer(np.ravel(sigma), freqs))
    values = coeffs @ basis.T
    return values.reshape(np.shape(samples)[:-1] + np.shape(sigma))


def periodic_primitive(samples: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Exact primitive int_0^sigma of the trigonometric interpolant."""
    freqs, coeffs = trig_coefficients(samples)
    sigma = np.ravel(sigma)
    mean = coeffs[..., freqs == 0][..., 0]
    nonzero = freqs != 0
    k = freqs[nonzero]
    basis = (np.exp(1j * np.outer(sigma, k)) - 1.0) / (1j * k)
    values = coeffs[..., nonzero] @ basis.T + np.multiply.outer(mean, sigma)
    return values


def spectral_derivative(
    samples: np.ndarray, axis: int, order: int = 1
) -> np.ndarray:
    """Derivative of the trigonometric interpolant along one axis."""
    N = samples.shape[axis]
    k = wavenumbers(N) if order % 2 else np.fft.fftfreq(N, d=1.0 / N)
    shape = [1] * samples.ndim
    shape[axis] = N
    factor = ((1j * k) ** order).reshape(shape)
    return np.fft.ifft(np.fft.fft(samples, axis=axis) * factor, axis=axis)


@dataclass
class DecayReport:
    """Bound-ratio scan of |S(xi)| against a weight-sequence envelope."""

    kind: str
    verdict: str
    log_constants: Dict[float, float]
    slopes: Dict[float, Optional[float]]
    informative: List[float]

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "log_C": {str(k): v for k, v in self.log_constants.items()},
            "slopes": {str(k): v for k, v in self.slopes.items()},
            "informative": self.informative,
        }


def _shell_scan(
    S: Spectrum, ws: WeightSequence, scale: float, sign: float
) -> Tuple[float, Optional[float], bool]:
    """Max log ratio, outer-half slope and informativeness for one scale.

    The outer half of the box is the range of shells [R/2, R] with R the
    largest norm in the box. The slope is None when fewer than two shells
    of that range carry nonzero amplitudes.
    """
    edge = np.sqrt(S.n) * S.K
    rows = [(xi, abs(v)) for xi, v in S.entries.items() if abs(v) > 0]
    norms = np.array([np.sqrt(sum(c * c for c in xi)) for xi, _ in rows])
    log_amp = np.log(np.array([a for _, a in rows]))
    log_env = log_assoc_inf_array(ws, scale, 1.0 + norms)
    log_ratio = log_amp - sign * log_env
    log_c = float(log_ratio.max())

    shells = np.floor(norms).astype(int)
    outer = norms >= edge / 2.0
    radii = np.unique(shells[outer])
    if radii.size < 2:
        return log_c, None, False
    informative = bool(np.any(np.abs(log_env[outer]) > 1e-12))
    shell_max = np.array(
        [log_ratio[outer & (shells == r)].max() for r in radii]
    )
    slope = float(np.polyfit(radii.astype(float), shell_max, 1)[0])
    return log_c, slope, informative


def _classify(
    S: Spectrum,
    ws: WeightSequence,
    scales: Sequence[float],
    sign: float,
    kind: str,
    slope_tol: float,
) -> DecayReport:
    if not S:
        raise DomainError("Cannot classify an empty spectrum")
    log_constants, slopes, informative = {}, {}, []
    for scale in scales:
        log_c, slope, useful = _shell_scan(S, ws, scale, sign)
        log_constants[scale] = log_c
        slopes[scale] = slope
        if useful:
            informative.append(scale)

    if all(slope is None for slope in slopes.values()):
        # nothing nonzero near the edge of the box
        verdict = "consistent"
    elif not informative:
        verdict = "inconclusive"
    else:
        tested = [slopes[scale] <= slope_tol for scale in informative]
        ok = any(tested) if kind == "decay" else all(tested)
        verdict = "consistent" if ok else "not consistent"
    logging.info(f"{kind} classification ({ws!r}, K={S.K}): {verdict}")
    return DecayReport(kind, verdict, log_constants, slopes, informative)


def classify_decay(
    S: Spectrum,
    ws: WeightSequence,
    delta_grid: Sequence[float],
    slope_tol: float = 0.0,
) -> DecayReport:
    """Test |S(xi)| <= C inf_j m_j j!/(delta (1+|xi|))^j on the support.

    For each delta the minimal C is reported (as log C). The verdict is
    "consistent" (on the observed range) when for some informative delta
    the per-shell bound ratio does not grow over the outer half of the
    support. A delta is uninformative when its envelope is 1 there.
    """
    return _classify(S, ws, delta_grid, 1.0, "decay", slope_tol)


def classify_growth(
    S: Spectrum,
    ws: WeightSequence,
    eps_grid: Sequence[float],
    slope_tol: float = 0.0,
) -> DecayReport:
    """Test |S(xi)| <= C_eps sup_j (eps (1+|xi|))^j/(m_j j!) for every eps.

    Growth counterpart of `classify_decay` for ultradistribution
    coefficients.
    """
    return _classify(S, ws, eps_grid, -1.0, "growth", slope_tol)


def shell_radii(points: np.ndarray) -> np.ndarray:
    """Euclidean norms of lattice rows."""
    return np.sqrt((np.asarray(points, dtype=float) ** 2).sum(axis=-1))
