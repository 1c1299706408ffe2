# -*- coding: utf-8 -*-
"""Continued fractions as finite surrogates of irrational numbers."""
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import AnyStr, Dict, List, Optional, Tuple, Union

from mpmath import mp

from .util import DomainError, ScanLimitError, SpecFormatError

MAX_DEPTH = 30
MAX_QUOTIENT_BITS = 1 << 20
DEFAULT_DEPTH = 20
FLOAT_MAX_DENOMINATOR = 10 ** 7
LIOUVILLE_MU = 3.0
PROFILE_MIN_Q = 5


@dataclass(frozen=True)
class DiophantineNumber:
    """Number given by its partial quotients [a_0; a_1, ..., a_d]."""

    quotients: Tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        if not self.quotients:
            raise DomainError("A continued fraction needs at least a_0")
        if any(a < 1 for a in self.quotients[1:]):
            raise DomainError("Partial quotients a_k must be >= 1 for k >= 1")

    def __repr__(self) -> str:
        """Object string representation."""
        head = ", ".join(str(a) for a in self.quotients[1:6])
        more = ", ..." if len(self.quotients) > 6 else ""
        return (
            f"<DiophantineNumber [{self.quotients[0]}; {head}{more}] "
            f"(label: {self.label})>"
        )

    @property
    def depth(self) -> int:
        return len(self.quotients) - 1

    def convergents(self) -> List[Tuple[int, int]]:
        """Exact convergents p_k / q_k, k = 0..depth."""
        p_prev, p = 1, self.quotients[0]
        q_prev, q = 0, 1
        out = [(p, q)]
        for a in self.quotients[1:]:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
            out.append((p, q))
        return out

    def value_mp(self, dps: int = 50):
        """Value of the last convergent in extended precision."""
        p, q = self.convergents()[-1]
        with mp.workdps(dps):
            return mp.mpf(p) / mp.mpf(q)

    @property
    def value(self) -> float:
        return float(self.value_mp())

    def to_dict(self) -> Dict:
        return {"quotients": list(self.quotients), "label": self.label}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, json_str: AnyStr) -> "DiophantineNumber":
        data = json.loads(json_str)
        return cls(
            tuple(int(a) for a in data["quotients"]), data.get("label", "")
        )

    @classmethod
    def from_value(
        cls,
        x: float,
        depth: int = DEFAULT_DEPTH,
        max_denominator: int = FLOAT_MAX_DENOMINATOR,
    ) -> "DiophantineNumber":
        """Expand a float while the convergents stay trustworthy.

        A float is a dyadic rational, so the Euclidean expansion is exact
        and the quotients are canonical (no trailing 1). Expansion stops at
        `depth` quotients or once a denominator passes `max_denominator`
        (past that, quotients reflect float round-off).
        """
        if not math.isfinite(x):
            raise DomainError(f"Cannot expand non-finite value {x!r}")
        exact = Fraction(x)
        num, den = exact.numerator, exact.denominator
        quotients = []
        q_prev, q = 0, 1
        for _ in range(depth + 1):
            a, rem = divmod(num, den)
            if quotients:
                q_next = a * q + q_prev
                if q_next > max_denominator:
                    break
                q, q_prev = q_next, q
            quotients.append(a)
            if rem == 0:
                break
            num, den = den, rem
        if len(quotients) > 1 and quotients[-1] == 1:
            # [..., a, 1] and [..., a + 1] are the same rational
            quotients[-2:] = [quotients[-2] + 1]
        return cls(tuple(quotients), label=f"cf({x!r})")


def cf_surrogate(
    kind: str, b: int = 2, depth: Optional[int] = None
) -> DiophantineNumber:
    """Continued-fraction test numbers: sqrt2, golden, liouville_like(b, d).

    The Liouville-like quotients are a_k = b^(k!), which makes the
    convergents abnormally good rational approximations.
    """
    if kind == "sqrt2":
        depth = DEFAULT_DEPTH if depth is None else depth
        quotients = (1,) + (2,) * depth
    elif kind == "golden":
        depth = DEFAULT_DEPTH if depth is None else depth
        quotients = (1,) * (depth + 1)
    elif kind == "liouville_like":
        depth = 6 if depth is None else depth
        if b < 2:
            raise DomainError(f"Liouville base must be >= 2, got b={b}")
        bits = math.factorial(depth) * math.log2(b)
        if bits > MAX_QUOTIENT_BITS:
            raise ScanLimitError(
                f"liouville_like({b}, {depth}) needs a quotient of "
                f"{bits:.3g} bits"
            )
        quotients = (0,) + tuple(
            b ** math.factorial(k) for k in range(1, depth + 1)
        )
    else:
        raise DomainError(f"Unknown continued-fraction surrogate '{kind}'")
    if not 0 <= depth <= MAX_DEPTH:
        raise DomainError(f"depth must be in [0, {MAX_DEPTH}], got {depth}")
    label = kind if kind != "liouville_like" else f"{kind}({b}, {depth})"
    return DiophantineNumber(quotients, label=label)


_SURROGATE_RE = re.compile(
    r"^(sqrt2|golden|liouville_like)(?:\((\d+)\s*(?:,\s*(\d+))?\))?$"
)


def parse_number(
    value: Union[float, int, str, Dict]
) -> Union[float, DiophantineNumber]:
    """Read a real number or a surrogate descriptor.

    Accepts numbers, "sqrt2", "golden", "liouville_like(b, depth)",
    "sqrt2(depth)" and {"quotients": [...]}.
    """
    if isinstance(value, bool):
        raise SpecFormatError("eta")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, dict):
        if "quotients" not in value:
            raise SpecFormatError("quotients")
        return DiophantineNumber(
            tuple(int(a) for a in value["quotients"]),
            label=value.get("label", ""),
        )
    if isinstance(value, str):
        match = _SURROGATE_RE.match(value.replace(" ", ""))
        if match:
            kind, first, second = match.groups()
            if kind == "liouville_like":
                return cf_surrogate(
                    kind,
                    b=int(first) if first else 2,
                    depth=int(second) if second else None,
                )
            return cf_surrogate(kind, depth=int(first) if first else None)
    raise SpecFormatError("eta", f"cannot read a number from {value!r}")


def irrationality_profile(
    number: DiophantineNumber, q_min: int = PROFILE_MIN_Q
) -> List[Dict]:
    """Exponent estimates mu_k = 1 + log q_(k+1) / log q_k.

    |x - p_k/q_k| is about 1/(q_k q_(k+1)), so mu_k tracks the
    irrationality measure along the convergents with q_k >= q_min.
    """
    convergents = number.convergents()
    profile = []
    for (p, q), (_, q_next) in zip(convergents, convergents[1:]):
        if q < q_min:
            continue
        mu = 1.0 + math.log(q_next) / math.log(q)
        profile.append({"p": p, "q": q, "mu": mu})
    return profile


def is_liouville_like(
    number: DiophantineNumber,
    mu_max: float = LIOUVILLE_MU,
    q_min: int = PROFILE_MIN_Q,
) -> Optional[bool]:
    """True when some convergent approximates better than exponent mu_max.

    None when the expansion has no convergent with q_k >= q_min to judge.
    """
    profile = irrationality_profile(number, q_min)
    if not profile:
        return None
    return any(entry["mu"] > mu_max for entry in profile)


def convergent_witnesses(
    number: DiophantineNumber, xi_max: float
) -> List[Tuple[int, int]]:
    """Convergents (p_k, q_k), q_k >= 1, with |(p_k, q_k)| <= xi_max."""
    return [
        (p, q)
        for p, q in number.convergents()
        if q >= 1 and math.hypot(p, q) <= xi_max
    ]
