"""Region geometry in the w-plane.

The plane is cut into horizontal strips ``m*pi/a <= eta < (m+1)*pi/a``. The
translate ``Omega_k = Omega_0 + i k pi/a`` sits on the line between strips
k-1 and k. What is left of a strip after removing the two adjacent Omega
closures (the "ribbon") is mapped by f onto a sector around 0 of opening
``pi (1-a)/a``. For (1+a)/(1-a) in N the ribbon is one region D; otherwise it
is split into consecutive pieces of opening pi (half-planes) and a final
remainder, which reproduces the cubic Gamma curves for a = 1/4.

A point on a shared boundary belongs to the region beneath it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Category, Parameter, eval_f, strips_per_period, xi_a
from .errors import DomainError, UnsupportedCategoryError

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-9


# ---------------------------------------------------------------------------
# Xi(eta): the xi-level where Im f vanishes off the real axis


def xi(a: Parameter, eta: float) -> float:
    s = a.value
    num, den = math.sin((1 - s) * eta), math.sin((1 + s) * eta)
    if num == 0.0 or den == 0.0:
        raise DomainError(f"Xi undefined at eta = {eta!r}: a sine vanishes")
    ratio = num / den
    if ratio <= 0.0:
        raise DomainError(f"Xi undefined at eta = {eta!r}: ratio {ratio:.3g} <= 0")
    return math.log(ratio) / (2 * s)


def _xi_arch(a: Parameter, eta: float) -> float:
    # Xi on the principal arch |eta| < pi/(1+a), continuous through eta = 0
    if abs(eta) < 1e-4:
        return xi_a(a) + eta * eta / 3.0  # even Taylor series; next term O(eta^4)
    return xi(a, abs(eta))


class Limit(enum.Enum):
    PLUS_INF = "+inf"
    MINUS_INF = "-inf"
    FINITE = "finite"  # both sines vanish; Xi tends to xi_a
    CLIPPED = "clipped"  # interval truncated at eta_max


@dataclass(frozen=True)
class XiInterval:
    k: int
    lo: float
    hi: float
    left: Limit
    right: Limit
    lo_pi: Optional[Fraction] = None  # lo / pi, exact for rational a
    hi_pi: Optional[Fraction] = None


def _breakpoints(a: Parameter, eta_max: float):
    """Zeros of sin((1-a) eta) and sin((1+a) eta) in [0, eta_max], with kinds."""
    pts: dict = {}
    if a.exact is not None:
        p, q = a.pq
        steps = {"num": Fraction(q, q - p), "den": Fraction(q, q + p)}
        for kind, step in steps.items():
            k = 0
            while float(k * step) * math.pi <= eta_max * (1 + 1e-15):
                key = k * step
                pts.setdefault(key, set()).add(kind)
                k += 1
        out = [(float(x) * math.pi, x, kinds) for x, kinds in pts.items()]
    else:
        s = a.value
        raw = []
        for kind, step in (("num", math.pi / (1 - s)), ("den", math.pi / (1 + s))):
            k = 0
            while k * step <= eta_max * (1 + 1e-15):
                raw.append((k * step, kind))
                k += 1
        raw.sort()
        out = []
        for eta, kind in raw:
            if out and abs(out[-1][0] - eta) <= 1e-12 * max(1.0, eta):
                out[-1][2].add(kind)
            else:
                out.append((eta, None, {kind}))
    out.sort(key=lambda t: t[0])
    return out


def _limit(kinds) -> Limit:
    if kinds == {"num", "den"}:
        return Limit.FINITE
    return Limit.PLUS_INF if "den" in kinds else Limit.MINUS_INF


def xi_domain(a: Parameter, eta_max: float) -> list[XiInterval]:
    """Maximal open intervals of (0, eta_max) on which Xi is defined."""
    if eta_max <= 0:
        return []
    s = a.value
    bps = _breakpoints(a, eta_max)
    out: list[XiInterval] = []
    for (lo, lo_pi, lk), nxt in zip(bps, bps[1:] + [None]):
        if nxt is None:
            if lo >= eta_max:
                break
            hi, hi_pi, hk, clipped = eta_max, None, None, True
        else:
            hi, hi_pi, hk = nxt
            clipped = False
        if hi - lo <= 1e-12 * max(1.0, hi):
            continue
        mid = 0.5 * (lo + hi)
        if math.sin((1 - s) * mid) / math.sin((1 + s) * mid) <= 0:
            continue
        right = Limit.CLIPPED if clipped else _limit(hk)
        out.append(XiInterval(len(out), lo, hi, _limit(lk), right, lo_pi, hi_pi))
    return out


def _bisect(g, lo, hi, tol=1e-12):
    glo = g(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(g, lo, hi, step):
    n = max(8, int(math.ceil((hi - lo) / step)))
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    roots = []
    prev_x, prev_g = xs[0], g(xs[0])
    for x in xs[1:]:
        gx = g(x)
        if gx == 0.0:
            roots.append(x)
        elif prev_g != 0.0 and (gx > 0) != (prev_g > 0):
            roots.append(_bisect(g, prev_x, x))
        prev_x, prev_g = x, gx
    return roots


def extremum_condition(a: Parameter, eta: float) -> float:
    """sin(2 eta a) - a sin(2 eta); zero exactly where Xi' vanishes."""
    return math.sin(2 * eta * a.value) - a.value * math.sin(2 * eta)


def xi_extrema(a: Parameter, interval: XiInterval) -> list[float]:
    """Critical points of Xi inside the interval, plus arch vertices at its ends.

    Endpoints where both sines vanish are the vertices of an arch, where Xi
    has its minimum xi_a; they are reported together with interior roots.
    """
    g = lambda t: extremum_condition(a, t)
    width = interval.hi - interval.lo
    step = min(math.pi / 2048, width / 64)
    margin = 1e-9 * max(1.0, width)
    roots = _scan_roots(g, interval.lo + margin, interval.hi - margin, step)
    # the condition also vanishes at arch vertices; drop round-off roots there
    edge = 1e-6 * max(1.0, width)
    roots = [r for r in roots if interval.lo + edge < r < interval.hi - edge]
    out = [interval.lo] if interval.left is Limit.FINITE else []
    out += roots
    if interval.right is Limit.FINITE:
        out.append(interval.hi)
    return out


def xi_zeros(a: Parameter, eta_max: float) -> list[float]:
    """Zeros of Xi in [0, eta_max]: candidates k pi/a and pi/2 + k pi."""
    cands = set()
    k = 1
    while k * math.pi / a.value <= eta_max:
        cands.add(k * math.pi / a.value)
        k += 1
    k = 0
    while math.pi / 2 + k * math.pi <= eta_max:
        cands.add(math.pi / 2 + k * math.pi)
        k += 1
    out = []
    for eta in sorted(cands):
        try:
            v = xi(a, eta)
        except DomainError:
            continue
        if abs(v) <= 1e-10:
            out.append(eta)
    return out


def boundary_image_x(a: Parameter, eta: float) -> float:
    """Real image of the upper half of the principal Xi arch at height eta."""
    s = a.value
    if not (0.0 < eta < math.pi / (1 + s)):
        raise DomainError(f"eta = {eta!r} outside (0, pi/(1+a))")
    ratio = math.sin((1 - s) * eta) / math.sin((1 + s) * eta)
    return -math.sin(2 * eta * s) / (2 * math.sin(eta * (1 + s))) * ratio ** ((1 - s) / (2 * s))


def g_curve(a: Parameter, xi0: float, eta: float) -> complex:
    """Image of the point xi0 + i eta, written as the level curve of fixed xi0."""
    s = a.value
    alpha = 0.5 * math.exp(xi0 * (1 + s))
    beta = 0.5 * math.exp(xi0 * (1 - s))
    return complex(
        alpha * math.cos(eta * (1 + s)) - beta * math.cos(eta * (1 - s)),
        alpha * math.sin(eta * (1 + s)) - beta * math.sin(eta * (1 - s)),
    )


# ---------------------------------------------------------------------------
# Strips, ribbons and pieces


def ribbon_span(a: Parameter) -> float:
    """Angular opening of the image of one ribbon."""
    return math.pi * (1 - a.value) / a.value


def pieces_per_strip(a: Parameter) -> int:
    if a.category is Category.RATIONAL_GENERIC:
        p, q = a.pq
        return max(1, -((p - q) // p))  # ceil((q-p)/p)
    return 1


def piece_span(a: Parameter, j: int) -> float:
    """Opening of piece j of a ribbon."""
    n = pieces_per_strip(a)
    if n == 1:
        return ribbon_span(a)
    return math.pi if j < n - 1 else ribbon_span(a) - (n - 1) * math.pi


def theta_lo(a: Parameter, m: int) -> float:
    """Lifted argument of f along the lower edge of ribbon m."""
    return math.pi + (1 - a.value) * m * math.pi / a.value


def piece_theta(a: Parameter, m: int, j: int) -> tuple[float, float]:
    """Lifted-argument interval (lo, hi] covered by piece j of ribbon m."""
    lo = theta_lo(a, m) + j * math.pi
    return lo, lo + piece_span(a, j)


def lifted_arg(a: Parameter, w: complex, m: int) -> float:
    """Continuous argument of f(w) on the open strip m.

    With v = e^{2 a w}, f = e^{(1-a) w} (v - 1)/2 and arg(v - 1) is continuous
    with values in (0, 2 pi) on the strip, which avoids any unwrapping.
    """
    s = a.value
    xi_, eta = w.real, w.imag
    t = 2 * s * (eta - m * math.pi / s)
    if xi_ >= 0:
        ang = math.atan2(math.sin(t), math.cos(t) - math.exp(-2 * s * xi_))
    else:
        e = math.exp(2 * s * xi_)
        ang = math.atan2(e * math.sin(t), e * math.cos(t) - 1.0)
    if ang < 0:
        ang += TWO_PI
    return (1 - s) * eta + ang


def tilde_index(a: Parameter, m: int, j: int) -> int:
    """Branch index of piece j in ribbon m; index 0 is skipped."""
    n = pieces_per_strip(a)
    return m * n + j + 1 if m >= 0 else m * n + j


def tilde_location(a: Parameter, k: int) -> tuple[int, int]:
    if k == 0:
        raise DomainError("tilde index 0 does not exist")
    n = pieces_per_strip(a)
    idx = k - 1 if k > 0 else k
    return idx // n, idx % n


class RegionKind(enum.Enum):
    OMEGA = "Omega"
    D = "D"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class RegionId:
    kind: RegionKind
    k: int

    def __str__(self) -> str:
        return f"{self.kind.value}({self.k})"


def omega_index(a: Parameter, w: complex) -> Optional[int]:
    """k with w in Omega_k (upper arch included), else None."""
    s = a.value
    k = round(w.imag * s / math.pi)
    d = w.imag - k * math.pi / s
    if abs(d) >= math.pi / (1 + s):
        return None
    bound = _xi_arch(a, d)
    if w.real > bound + BOUNDARY_TOL:
        return k
    if abs(w.real - bound) <= BOUNDARY_TOL and d >= 0.0:
        return k
    return None


def ribbon_location(a: Parameter, w: complex) -> tuple[int, int]:
    """(strip m, piece j) of a point known to lie outside every Omega_k."""
    s = a.value
    h = math.pi / s
    m = math.floor(w.imag / h)
    if abs(w.imag - m * h) <= BOUNDARY_TOL * max(1.0, abs(w.imag)) * 1e-3 and w.real < xi_a(a):
        m -= 1  # lower edge ray belongs to the ribbon beneath
    rel = lifted_arg(a, w, m) - theta_lo(a, m)
    n = pieces_per_strip(a)
    j = math.ceil(rel / math.pi - BOUNDARY_TOL) - 1
    return m, min(max(j, 0), n - 1)


def region_of(a: Parameter, w: complex) -> RegionId:
    k = omega_index(a, w)
    if k is not None:
        return RegionId(RegionKind.OMEGA, k)
    if a.category is Category.IRRATIONAL:
        return RegionId(RegionKind.UNCLASSIFIED, 0)
    m, j = ribbon_location(a, w)
    return RegionId(RegionKind.D, tilde_index(a, m, j))


# ---------------------------------------------------------------------------
# Gamma curves


class Shape(enum.Enum):
    PARABOLIC = "parabolic"
    CUBIC = "cubic"


@dataclass(frozen=True)
class GammaCurve:
    k: int
    shape: Shape
    lo: float
    hi: float
    includes_ray: bool


def gamma_curves(a: Parameter) -> list[GammaCurve]:
    """Xi graphs over one period, in order of their eta-interval."""
    if a.category is Category.IRRATIONAL:
        raise UnsupportedCategoryError("Gamma curves need a rational parameter")
    t = strips_per_period(a) * math.pi / a.value
    out = []
    for iv in xi_domain(a, t * (1 + 1e-15)):
        cubic = Limit.MINUS_INF in (iv.left, iv.right)
        ray = Limit.FINITE in (iv.left, iv.right)
        out.append(GammaCurve(iv.k, Shape.CUBIC if cubic else Shape.PARABOLIC, iv.lo, iv.hi, ray))
    return out


def sample_xi_graph(a: Parameter, interval: XiInterval, n: int, clip: float = 8.0):
    """(eta, Xi(eta)) samples with |Xi| <= clip, endpoints excluded."""
    out = []
    for i in range(1, n + 1):
        eta = interval.lo + (interval.hi - interval.lo) * i / (n + 1)
        try:
            v = xi(a, eta)
        except DomainError:
            continue
        if abs(v) <= clip:
            out.append((eta, v))
    return out


def eval_on_graph(a: Parameter, eta: float) -> complex:
    return eval_f(a, complex(xi(a, eta), eta))
