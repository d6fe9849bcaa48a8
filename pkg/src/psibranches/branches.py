"""Branches of psi, the multivalued inverse of f(w) = sinh(a w) e^w.

Branch families
---------------
``Principal(k)``
    C minus the ray from z_k away from 0, onto Omega_k.
``Tilde(k)``
    A sector around 0 onto the ribbon piece D_k. Indices skip 0: pieces of
    strip m >= 0 are numbered upward from 1, pieces of strip m < 0 end at -1,
    so Tilde(-1) contains the real branch psi_{-1}.
``HatPlus(k)`` / ``HatMinus(k)``
    For (1+a)/(1-a) not in N: the same pieces when their image is the upper
    (lower) half-plane cut by the line through 0 and the strip's critical
    value.

Every branch value is found by damped Newton iteration from asymptotic seeds
and accepted only if it lands in the branch codomain; if no seed succeeds the
value is tracked along a path inside the branch domain from an anchor whose
preimage is known.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .core import (
    Category,
    Parameter,
    as_parameter,
    branch_points,
    check_finite,
    critical_point,
    eval_f,
    f_prime,
    f_second,
    strip_phase,
    x_a,
    xi_a,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NearBranchPointWarning,
    RangeError,
    UnsupportedCategoryError,
)
from .geometry import (
    TWO_PI,
    RegionId,
    RegionKind,
    pieces_per_strip,
    piece_span,
    piece_theta,
    region_of,
    tilde_index,
    tilde_location,
)

__all__ = [
    "BranchFamily",
    "BranchId",
    "BranchDomain",
    "Principal",
    "Tilde",
    "sheet_of",
    "branch_domain",
    "codomain",
    "x_a",
    "xi_a",
    "psi0_real",
    "psi_minus1_real",
    "omega_transition",
    "psi_branch",
    "psi_one_third",
    "lambert_w",
    "psi_small_a",
    "psi_near_one",
]

MAX_ITER = 200
MAX_HALVINGS = 20
HALLEY_RADIUS = 1e-4
NEAR_BP = 1e-8
ARG_TOL = 1e-12
EDGE_BAND = 1e-7


class BranchFamily(enum.Enum):
    PRINCIPAL = "principal"
    TILDE = "tilde"
    HAT_PLUS = "hatplus"
    HAT_MINUS = "hatminus"


@dataclass(frozen=True)
class BranchId:
    family: BranchFamily
    k: int

    @classmethod
    def parse(cls, text: str) -> "BranchId":
        """Parse ``family:k``, e.g. ``principal:0`` or ``tilde:-1``."""
        try:
            fam, k = text.strip().lower().split(":")
            return cls(BranchFamily(fam), int(k))
        except ValueError as exc:
            raise ValueError(f"malformed branch {text!r}; expected family:k") from exc

    def __str__(self) -> str:
        return f"{self.family.value}:{self.k}"

    def __lt__(self, other):  # families sort by name, then index
        return (self.family.value, self.k) < (other.family.value, other.k)


def Principal(k: int) -> BranchId:
    return BranchId(BranchFamily.PRINCIPAL, k)


def Tilde(k: int) -> BranchId:
    return BranchId(BranchFamily.TILDE, k)


def sheet_of(region: RegionId) -> BranchId:
    if region.kind is RegionKind.OMEGA:
        return Principal(region.k)
    if region.kind is RegionKind.D:
        return Tilde(region.k)
    raise UnsupportedCategoryError(f"region {region} is not a named sheet")


def _lift(theta: float, lo: float) -> float:
    """Representative of theta mod 2 pi in (lo, lo + 2 pi]."""
    return theta + TWO_PI * math.floor((lo + TWO_PI - theta) / TWO_PI)


@dataclass(frozen=True)
class BranchDomain:
    """z-domain of one branch.

    A ``slit`` domain is C minus the ray {t z_k : t >= 1}; its extension is C.
    A ``sector`` domain is {z != 0 : arg z in (theta_lo, theta_hi)} with
    lifted arguments; its extension adds the upper edge arg z = theta_hi.
    """

    branch: BranchId
    kind: str
    cut_point: Optional[complex] = None
    theta_lo: float = 0.0
    theta_hi: float = 0.0

    @property
    def cuts(self) -> list[str]:
        if self.kind == "slit":
            return [f"ray from {self.cut_point:.17g} away from 0"]
        return [f"ray arg={self.theta_lo:.17g}", f"ray arg={self.theta_hi:.17g}"]

    def lifted_arg(self, z: complex) -> float:
        return _lift(cmath.phase(z), self.theta_lo)

    def on_boundary(self, z: complex) -> bool:
        if self.kind == "slit":
            c = self.cut_point
            if abs(z) < abs(c) * (1 - 1e-14):
                return False
            return abs(cmath.phase(z / c)) <= ARG_TOL
        if z == 0:
            return True
        t = self.lifted_arg(z)
        return t - self.theta_lo <= ARG_TOL or self.theta_hi - t <= ARG_TOL

    def edge_offset(self, z: complex) -> tuple[float, int]:
        """Angular distance of z from the nearest cut and the inward turn sign.

        Points exactly on a cut get the clockwise side, which owns the edge.
        """
        if self.kind == "slit":
            c = self.cut_point
            if z == 0 or abs(z) < abs(c):
                return math.inf, 0
            d = cmath.phase(z / c)
            return abs(d), (1 if d > 0 else -1)
        if z == 0:
            return math.inf, 0
        t = self.lifted_arg(z)
        lo, hi = t - self.theta_lo, self.theta_hi - t
        if self.theta_hi - self.theta_lo >= TWO_PI - ARG_TOL and lo <= ARG_TOL:
            lo = math.inf  # on a full turn the lower edge is the upper edge
        return (abs(lo), 1) if abs(lo) < abs(hi) else (abs(hi), -1)

    def contains(self, z: complex, extended: bool = False) -> bool:
        if self.kind == "slit":
            return extended or not self.on_boundary(z)
        if z == 0:
            return False
        t = self.lifted_arg(z)
        if t - self.theta_lo <= ARG_TOL:
            # the lower edge is the upper edge seen from the other side when the
            # sector is a full turn
            return extended and self.theta_hi - self.theta_lo >= TWO_PI - ARG_TOL
        if self.theta_hi - t <= ARG_TOL:
            return extended
        return t < self.theta_hi


def _check_family(a: Parameter, b: BranchId) -> None:
    if a.category is Category.IRRATIONAL and b != Principal(0):
        raise UnsupportedCategoryError(
            f"irrational a = {a} exposes only the principal branch principal:0"
        )
    if b.family in (BranchFamily.HAT_PLUS, BranchFamily.HAT_MINUS):
        if a.category is not Category.RATIONAL_GENERIC:
            raise UnsupportedCategoryError(f"{b.family.value} branches need (1+a)/(1-a) not in N")
        if b.k == 0:
            raise DomainError("branch index 0 does not exist for this family")
        m, j = tilde_location(a, b.k)
        if abs(piece_span(a, j) - math.pi) > 1e-12:
            raise DomainError(f"piece {b.k} is not a half-plane piece")
        plus = j % 2 == 1
        if plus != (b.family is BranchFamily.HAT_PLUS):
            raise DomainError(f"piece {b.k} maps onto the opposite half-plane")
    if b.family is BranchFamily.TILDE and b.k == 0:
        raise DomainError("tilde index 0 does not exist")


def branch_domain(a, b: BranchId) -> BranchDomain:
    a = as_parameter(a)
    _check_family(a, b)
    if b.family is BranchFamily.PRINCIPAL:
        return BranchDomain(b, "slit", cut_point=critical_point(a, b.k).z)
    m, j = tilde_location(a, b.k)
    lo, hi = piece_theta(a, m, j)
    return BranchDomain(b, "sector", theta_lo=lo, theta_hi=hi)


def codomain(a, b: BranchId) -> RegionId:
    a = as_parameter(a)
    _check_family(a, b)
    if b.family is BranchFamily.PRINCIPAL:
        return RegionId(RegionKind.OMEGA, b.k)
    return RegionId(RegionKind.D, b.k)


# ---------------------------------------------------------------------------
# Real branches


def _real_f(a: Parameter, t: float) -> float:
    return math.sinh(a.value * t) * math.exp(t)


def _real_fp(a: Parameter, t: float) -> float:
    s = a.value
    return math.exp(t) * (s * math.cosh(s * t) + math.sinh(s * t))


def _rtsafe(a: Parameter, x: float, lo: float, hi: float) -> float:
    """Safeguarded Newton for f(t) = x on a bracket where f is monotone."""
    flo = _real_f(a, lo) - x
    t = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        g = _real_f(a, t) - x
        if g == 0.0:
            return t
        if (g > 0) == (flo > 0):
            lo, flo = t, g
        else:
            hi = t
        d = _real_fp(a, t)
        tn = t - g / d if d != 0.0 else lo
        if not (min(lo, hi) < tn < max(lo, hi)):
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= 2e-16 * max(1.0, abs(t)):
            return tn
        t = tn
    raise ConvergenceError(f"real inversion did not converge for x = {x!r}")


def psi0_real(a, x: float) -> float:
    """Increasing real branch on [x_a, inf) with values in [xi_a, inf)."""
    a = as_parameter(a)
    xa, xia = x_a(a), xi_a(a)
    if not x >= xa:
        raise DomainError(f"x = {x!r} below x_a = {xa!r}")
    if x == xa:
        return xia
    if x == 0.0:
        return 0.0
    hi = max(1.0, math.log(2 * abs(x)) / (1 + a.value) + 1.0) if x > 0 else 0.0
    while _real_f(a, hi) < x:
        hi = 2 * hi + 1
    return _rtsafe(a, x, xia, hi)


def psi_minus1_real(a, x: float) -> float:
    """Decreasing real branch on [x_a, 0) with values in (-inf, xi_a]."""
    a = as_parameter(a)
    xa, xia = x_a(a), xi_a(a)
    if not (xa <= x < 0.0):
        raise DomainError(f"x = {x!r} outside [x_a, 0)")
    if x == xa:
        return xia
    lo = min(xia, math.log(-2 * x) / (1 - a.value) - 1.0)
    while _real_f(a, lo) < x:
        lo = 2 * lo - 1
    return _rtsafe(a, x, lo, xia)


def omega_transition(a, xi: float) -> float:
    """Map a point of the psi_0 range below 0 to the psi_{-1} value of f(xi)."""
    a = as_parameter(a)
    if not (xi_a(a) <= xi < 0.0):
        raise DomainError(f"xi = {xi!r} outside [xi_a, 0)")
    return psi_minus1_real(a, max(_real_f(a, xi), x_a(a)))


# ---------------------------------------------------------------------------
# Complex solver


def _near_bp(z: complex, bps) -> bool:
    return any(abs(z - b) < HALLEY_RADIUS for b in bps)


def _newton(a: Parameter, z: complex, w: complex, target: Optional[RegionId], halley: bool):
    """Damped Newton (Halley near critical values); None on failure."""
    scale = max(1.0, abs(z))
    try:
        r = abs(eval_f(a, w) - z)
    except RangeError:
        return None
    for _ in range(MAX_ITER):
        F = eval_f(a, w) - z
        d = f_prime(a, w)
        if d == 0:
            return None
        if halley:
            d2 = f_second(a, w)
            denom = d - F * d2 / (2 * d)
            step = F / denom if denom != 0 else F / d
        else:
            step = F / d
        inside = target is not None and region_of(a, w) == target
        lam = 1.0
        for _h in range(MAX_HALVINGS + 1):
            wn = w - lam * step
            try:
                rn = abs(eval_f(a, wn) - z)
            except RangeError:
                lam *= 0.5
                continue
            if rn < r or rn <= 1e-15 * scale:
                if inside and region_of(a, wn) != target:
                    lam *= 0.5
                    continue
                break
            lam *= 0.5
        else:
            return w if r <= 1e-10 * scale else None
        moved = abs(wn - w)
        w, r = wn, rn
        if r <= 1e-15 * scale or moved <= 4e-16 * max(1.0, abs(w)):
            break
    return w if r <= 1e-10 * scale else None


def _track(a: Parameter, path, dpath, w: complex, n: int = 48) -> complex:
    """RK4 on dw/ds = z'(s)/f'(w) for s in [0, 1], re-projected each step."""
    h = 1.0 / n

    def rhs(s, w_):
        return dpath(s) / f_prime(a, w_)

    for i in range(n):
        s = i * h
        k1 = rhs(s, w)
        k2 = rhs(s + h / 2, w + h / 2 * k1)
        k3 = rhs(s + h / 2, w + h / 2 * k2)
        k4 = rhs(s + h, w + h * k3)
        w = w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        zt = path(s + h)
        for _ in range(2):
            w = w - (eval_f(a, w) - zt) / f_prime(a, w)
    return w


def _sqrt_seeds(a: Parameter, z: complex, w0: complex):
    zc = eval_f(a, w0)
    d2 = f_second(a, w0)
    r = cmath.sqrt(2 * (z - zc) / d2)
    return [w0 + r, w0 - r]


def _solve_principal0(a: Parameter, z: complex) -> complex:
    target = RegionId(RegionKind.OMEGA, 0)
    xa = x_a(a)
    w_crit = complex(xi_a(a), 0.0)
    if abs(z - xa) <= 1e-15 * abs(xa):
        return w_crit
    halley = abs(z - xa) < HALLEY_RADIUS
    dominant = cmath.log(2 * z) / (1 + a.value) if z != 0 else 0j
    seeds = [z / a.value, *_sqrt_seeds(a, z, w_crit), dominant]
    if abs(z) > 1:
        seeds = [dominant] + seeds[:-1]
    for s in seeds:
        w = _newton(a, z, s, target, halley)
        if w is not None and region_of(a, w) == target:
            return w
    # straight path from z = 0, whose preimage in Omega_0 is w = 0
    w = _track(a, lambda s: s * z, lambda s: z, 0j)
    w = _newton(a, z, w, target, halley)
    if w is not None and region_of(a, w) == target:
        return w
    raise ConvergenceError(f"principal branch did not converge at z = {z!r}")


def _solve_piece0(a: Parameter, z: complex, j: int) -> complex:
    s_ = a.value
    target = RegionId(RegionKind.D, tilde_index(a, 0, j))
    lo, hi = piece_theta(a, 0, j)
    theta = _lift(cmath.phase(z), lo)
    if theta > hi + ARG_TOL:
        theta -= TWO_PI
    lr = math.log(2 * abs(z))
    left = complex(lr, theta - math.pi) / (1 - s_)
    right = complex(lr, theta) / (1 + s_)
    c0 = complex(xi_a(a), 0.0)
    c1 = complex(xi_a(a), math.pi / s_)
    z0, z1 = x_a(a), critical_point(a, 1).z
    halley = abs(z - z0) < HALLEY_RADIUS or abs(z - z1) < HALLEY_RADIUS
    seeds = [left, right] if abs(z) < abs(z0) else [right, left]
    seeds += _sqrt_seeds(a, z, c0) + _sqrt_seeds(a, z, c1)
    for s in seeds:
        w = _newton(a, z, s, target, halley)
        if w is not None and region_of(a, w) == target:
            return w
    # logarithmic spiral from a small anchor on the sector bisector
    mid = 0.5 * (lo + min(hi, lo + TWO_PI))
    r0 = min(abs(z), 1e-3 * abs(z0))
    lz0 = complex(math.log(r0), mid)
    lz1 = complex(math.log(abs(z)), theta)
    anchor = cmath.exp(lz0)
    w0 = _newton(a, anchor, complex(math.log(2 * r0), mid - math.pi) / (1 - s_), target, False)
    if w0 is not None:
        path = lambda s: cmath.exp(lz0 + s * (lz1 - lz0))
        dpath = lambda s: path(s) * (lz1 - lz0)
        w = _track(a, path, dpath, w0, n=96)
        w = _newton(a, z, w, target, halley)
        if w is not None and region_of(a, w) == target:
            return w
    raise ConvergenceError(f"{target} branch did not converge at z = {z!r}")


def psi_branch(a, z: complex, b: BranchId, *, extended: bool = False) -> complex:
    """Value of branch ``b`` of psi at ``z``.

    With ``extended=True`` the branch is also evaluated on the edge of its
    domain that the boundary convention assigns to it.
    """
    a = as_parameter(a)
    z = check_finite(z, "z")
    dom = branch_domain(a, b)
    if not dom.contains(z, extended):
        raise DomainError(f"z = {z!r} outside the domain of {b}")
    for bp in branch_points(a):
        if abs(z - bp) < NEAR_BP and z != bp:
            warnings.warn(f"z = {z!r} is within {NEAR_BP} of branch point {bp!r}", NearBranchPointWarning, stacklevel=2)
    margin, turn = dom.edge_offset(z)
    if b.family is BranchFamily.PRINCIPAL:
        m = b.k
        solve = lambda u: _solve_principal0(a, u)  # noqa: E731
    else:
        m, j = tilde_location(a, b.k)
        solve = lambda u: _solve_piece0(a, u, j)  # noqa: E731
    zeta = z / strip_phase(a, m) if m else z
    if abs(zeta - x_a(a)) <= 1e-15 * abs(x_a(a)):
        margin = math.inf  # the critical value itself is solved exactly
    if margin < EDGE_BAND:
        # the preimage sits in the boundary band of its region: solve a little
        # inside the domain, then polish at z without the region constraint
        w = _newton(a, zeta, solve(zeta * cmath.exp(1j * turn * EDGE_BAND)), None, True)
        if w is None:
            raise ConvergenceError(f"{b} did not converge at edge point z = {z!r}")
    else:
        w = solve(zeta)
    return w + complex(0.0, m * math.pi / a.value) if m else w


# ---------------------------------------------------------------------------
# Closed forms and limits


def psi_one_third(z: complex, which: str = "plain") -> complex:
    """Closed forms for a = 1/3: 3/2 log(1/2 +- sqrt(2 z + 1/4)).

    ``plain`` is the principal branch. ``tilde`` uses the principal square
    root and logarithm, so it equals Tilde(1) on the lower half-plane and
    Tilde(-1) (psi_{-1} on the real segment) on the upper half-plane.
    """
    z = check_finite(z, "z")
    root = cmath.sqrt(2 * z + 0.25)
    if which == "plain":
        if z.imag == 0 and z.real < -0.125:
            raise DomainError("plain branch is cut along (-inf, -1/8)")
        return 1.5 * cmath.log(0.5 + root)
    if which == "tilde":
        if z.imag == 0 and (z.real < -0.125 or z.real >= 0):
            raise DomainError("tilde closed form is cut along (-inf, -1/8) and [0, inf)")
        return 1.5 * cmath.log(0.5 - root)
    raise ValueError(f"which must be 'plain' or 'tilde', not {which!r}")


def lambert_w(branch: int, x: float) -> float:
    """Real Lambert W on branch 0 (x >= -1/e) or -1 (-1/e <= x < 0)."""
    em1 = -math.exp(-1.0)
    if branch not in (0, -1):
        raise DomainError("only the real branches 0 and -1 are available")
    if x < em1 or (branch == -1 and x >= 0.0):
        raise DomainError(f"x = {x!r} outside the domain of W_{branch}")
    if x == em1:
        return -1.0
    if x == 0.0:
        return 0.0
    p2 = 2.0 * (math.e * x + 1.0)
    if branch == 0:
        if p2 < 0.5:
            p = math.sqrt(p2)
            w = -1.0 + p - p2 / 3 + 11.0 / 72 * p * p2
        elif x < 3.0:
            w = math.log1p(x) * (1 - math.log1p(math.log1p(x)) / (2 + math.log1p(x)))
        else:
            lx = math.log(x)
            w = lx - math.log(lx)
    else:
        if p2 < 0.5:
            p = math.sqrt(p2)
            w = -1.0 - p - p2 / 3 - 11.0 / 72 * p * p2
        else:
            l1 = math.log(-x)
            l2 = math.log(-l1)
            w = l1 - l2 + l2 / l1
    for _ in range(100):
        ew = math.exp(w)
        g = w * ew - x
        if g == 0.0:
            break
        wp1 = w + 1.0
        dw = g / (ew * wp1 - (w + 2.0) * g / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def psi_small_a(a, z: complex, branch: int = 0) -> complex:
    """Small-a reference value W(z/a); non-real z goes to the matching psi branch."""
    a = as_parameter(a)
    z = check_finite(z, "z")
    if z.imag == 0.0:
        return complex(lambert_w(branch, z.real / a.value))
    b = Principal(0) if branch == 0 else Tilde(-1)
    return psi_branch(a, z, b)


def psi_near_one(a, z: complex) -> complex:
    """Near-one reference value log(2 z + 1)/2 with the principal logarithm."""
    z = check_finite(z, "z")
    u = 2 * z + 1
    if u.imag == 0.0 and u.real <= 0.0:
        raise DomainError("log(2z+1) is cut along z <= -1/2")
    return 0.5 * cmath.log(u)
