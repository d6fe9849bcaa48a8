"""The forward map f(w) = sinh(a w) e^w and its elementary calculus.

Complex numbers are plain Python ``complex`` values; ``w = xi + i*eta`` and
``z = x + i*y`` throughout.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError, RangeError, SingularityError

# |Re w|*(1+a) beyond this overflows e^{(1+a) w}
_EXP_GUARD = math.log(1.7976931348623157e308) - 2.0


class Category(enum.Enum):
    INTEGER_RATIO = "IntegerRatio"  # (1+a)/(1-a) is a natural number
    RATIONAL_GENERIC = "RationalGeneric"
    IRRATIONAL = "Irrational"


@dataclass(frozen=True)
class Parameter:
    """Shape parameter ``a`` in (0, 1).

    Rational values must be built from an integer pair (``Parameter.rational``
    or ``Parameter.parse("p/q")``); a bare float is treated as irrational since
    the category cannot be recovered reliably from a binary64 value.
    """

    value: float
    exact: Optional[Fraction] = None
    category: Category = field(init=False)

    def __post_init__(self):
        if self.exact is not None:
            if not (0 < self.exact < 1):
                raise DomainError(f"a = {self.exact} is not in (0, 1)")
            object.__setattr__(self, "value", self.exact.numerator / self.exact.denominator)
            p, q = self.exact.numerator, self.exact.denominator
            cat = Category.INTEGER_RATIO if (q + p) % (q - p) == 0 else Category.RATIONAL_GENERIC
        else:
            if not (0.0 < self.value < 1.0) or not math.isfinite(self.value):
                raise DomainError(f"a = {self.value!r} is not in (0, 1)")
            cat = Category.IRRATIONAL
        object.__setattr__(self, "category", cat)

    @classmethod
    def rational(cls, p: int, q: int) -> "Parameter":
        return cls(p / q, Fraction(p, q))

    @classmethod
    def irrational(cls, value: float) -> "Parameter":
        return cls(float(value))

    @classmethod
    def parse(cls, text: str) -> "Parameter":
        """Parse ``"p/q"`` as an exact rational and anything else as a float."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            try:
                return cls.rational(int(num), int(den))
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"malformed rational {text!r}") from exc
        try:
            return cls.irrational(float(text))
        except ValueError as exc:
            raise DomainError(f"malformed parameter {text!r}") from exc

    @property
    def pq(self) -> tuple[int, int]:
        if self.exact is None:
            raise DomainError("irrational parameter has no (p, q) representation")
        return self.exact.numerator, self.exact.denominator

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def __str__(self) -> str:
        return str(self.exact) if self.exact is not None else repr(self.value)


def as_parameter(a) -> Parameter:
    if isinstance(a, Parameter):
        return a
    if isinstance(a, Fraction):
        return Parameter.rational(a.numerator, a.denominator)
    if isinstance(a, str):
        return Parameter.parse(a)
    return Parameter.irrational(a)


@dataclass(frozen=True)
class CriticalPoint:
    k: int
    w: complex
    z: complex


def check_finite(z: complex, name: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def _guard(a: Parameter, w: complex) -> None:
    if abs(w.real) * (1.0 + a.value) > _EXP_GUARD:
        raise RangeError(f"Re w = {w.real!r} overflows for a = {a}")


def eval_f(a: Parameter, w: complex) -> complex:
    """sinh(a w) e^w, evaluated from the real coordinate form.

    The product form e^xi (cos eta + i sin eta)(sinh(a xi) cos(a eta) +
    i cosh(a xi) sin(a eta)) avoids the cancellation of the two exponentials
    near w = 0 and is exactly conjugate symmetric.
    """
    w = check_finite(w, "w")
    _guard(a, w)
    s = a.value
    xi, eta = w.real, w.imag
    e = math.exp(xi)
    sr, si = math.sinh(s * xi) * math.cos(s * eta), math.cosh(s * xi) * math.sin(s * eta)
    er, ei = e * math.cos(eta), e * math.sin(eta)
    return complex(er * sr - ei * si, er * si + ei * sr)


def f_prime(a: Parameter, w: complex) -> complex:
    """e^w (a cosh(a w) + sinh(a w))."""
    w = check_finite(w, "w")
    _guard(a, w)
    s = a.value
    xi, eta = w.real, w.imag
    ch, sh = math.cosh(s * xi), math.sinh(s * xi)
    c, sn = math.cos(s * eta), math.sin(s * eta)
    gr = s * ch * c + sh * c
    gi = s * sh * sn + ch * sn
    e = math.exp(xi)
    er, ei = e * math.cos(eta), e * math.sin(eta)
    return complex(er * gr - ei * gi, er * gi + ei * gr)


def f_second(a: Parameter, w: complex) -> complex:
    """e^w ((1 + a^2) sinh(a w) + 2 a cosh(a w))."""
    w = check_finite(w, "w")
    _guard(a, w)
    s = a.value
    aw = s * w
    return cmath.exp(w) * ((1 + s * s) * cmath.sinh(aw) + 2 * s * cmath.cosh(aw))


def jacobian(a: Parameter, w: complex) -> float:
    w = check_finite(w, "w")
    _guard(a, w)
    s = a.value
    xi, eta = w.real, w.imag
    return 0.25 * math.exp(2 * xi) * (
        (1 + s) ** 2 * math.exp(2 * s * xi)
        + (1 - s) ** 2 * math.exp(-2 * s * xi)
        - 2 * (1 - s * s) * math.cos(2 * eta * s)
    )


def x_a(a: Parameter) -> float:
    """Real critical value of f; minimum of f on the real line."""
    s = a.value
    return -s / (1 + s) * ((1 - s) / (1 + s)) ** ((1 - s) / (2 * s))


def xi_a(a: Parameter) -> float:
    """Real critical point of f, the preimage of x_a."""
    s = a.value
    return math.log((1 - s) / (1 + s)) / (2 * s)


def _unit_pi(r: Fraction) -> complex:
    """exp(i*pi*r) with exact values on the quarter turns."""
    r = r % 2
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
    if r in exact:
        return exact[r]
    t = math.pi * float(r)
    return complex(math.cos(t), math.sin(t))


def strip_phase(a: Parameter, k: int) -> complex:
    """exp(i (1+a) k pi / a): the factor relating f(w + i k pi/a) to f(w)."""
    if a.exact is not None:
        p, q = a.pq
        return _unit_pi(Fraction(k * (p + q), p))
    t = (1 + a.value) * k * math.pi / a.value
    return complex(math.cos(t), math.sin(t))


def critical_point(a: Parameter, k: int) -> CriticalPoint:
    w = complex(xi_a(a), k * math.pi / a.value)
    # x_a (-1)^k (cos(pi k/a) + i sin(pi k/a)) == x_a * strip_phase
    ph = strip_phase(a, k)
    xa = x_a(a)
    z = complex(xa * ph.real + 0.0, xa * ph.imag + 0.0)  # + 0.0 clears signed zeros
    return CriticalPoint(k, w, z)


def critical_points(a: Parameter, k_min: int, k_max: int) -> list[CriticalPoint]:
    if k_min > k_max:
        raise DomainError("k_min must not exceed k_max")
    return [critical_point(a, k) for k in range(k_min, k_max + 1)]


def strips_per_period(a: Parameter) -> int:
    """Number of strips of height pi/a in one imaginary period of f."""
    p, q = a.pq
    return p if (p + q) % 2 == 0 else 2 * p


def period(a: Parameter) -> complex:
    """Imaginary period T_a of f for rational a = p/q."""
    p, q = a.pq
    return complex(0.0, (q if (p + q) % 2 == 0 else 2 * q) * math.pi)


def _dedupe(values, tol=1e-12):
    out: list[complex] = []
    for v in values:
        if all(abs(v - u) > tol for u in out):
            out.append(v)
    return out


def branch_points(a: Parameter) -> tuple[complex, ...]:
    """Distinct critical values over one period, plus 0, sorted by (re, im).

    For irrational a only the principal pair {x_a, 0} is returned.
    """
    if a.exact is None:
        pts = [critical_point(a, 0).z, 0j]
    else:
        pts = [cp.z for cp in critical_points(a, 0, strips_per_period(a) - 1)] + [0j]
    return tuple(sorted(_dedupe(pts), key=lambda c: (round(c.real, 15), round(c.imag, 15))))


def psi_prime(a: Parameter, z: complex, w: complex, *, tol: float = 1e-10) -> complex:
    """Derivative of the branch of the inverse passing through (z, w)."""
    z = check_finite(z, "z")
    resid = abs(eval_f(a, w) - z)
    if resid > 1e-8 * max(1.0, abs(z)):
        raise DomainError(f"w is not a preimage of z (residual {resid:.3e})")
    d = f_prime(a, w)
    if abs(d) < tol:
        raise SingularityError(f"derivative undefined at critical value z = {z!r}")
    return 1.0 / d
