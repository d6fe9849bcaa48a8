"""Analytic continuation of psi along z-paths and the gluing atlas of its sheets.

A path z(t), t in [0, 1], is lifted by integrating dw/dt = z'(t) / f'(w) with
fixed-step RK4 and a Newton re-projection onto f(w) = z(t) after every step.
Sheet changes are detected from ``region_of`` and refined by bisection.

The atlas lists, for one imaginary period, every w-plane cut between adjacent
sheets together with its z-image. Cuts of strip m are

``rho:m``
    the ray eta = m pi/a, xi < xi_a; z-image the segment (0, z_m).
``upper:m`` / ``lower:m``
    the two arches bounding Omega_m; both map onto the ray beyond z_m.
``inner:m:j``
    the cut between pieces j-1 and j of ribbon m; z-image a ray from 0.

Each cut has a closed side (the sheet that owns the boundary) and an open side.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .branches import BranchDomain, BranchFamily, BranchId, Principal, Tilde, branch_domain, psi_branch, sheet_of
from .core import (
    Category,
    Parameter,
    as_parameter,
    branch_points,
    check_finite,
    critical_point,
    eval_f,
    f_prime,
    strips_per_period,
)
from .errors import ConvergenceError, DomainError, SingularityError, UnsupportedCategoryError
from .geometry import RegionId, RegionKind, pieces_per_strip, piece_theta, region_of, tilde_index, tilde_location

__all__ = [
    "Polyline",
    "Circle",
    "PathSpec",
    "Cut",
    "AtlasEntry",
    "GluingAtlas",
    "Event",
    "ContinuationResult",
    "continue_path",
    "build_atlas",
    "monodromy_probe",
    "default_radius",
    "sheet_strip",
    "shift_sheet",
]

SAMPLES_PER_TURN = 4096
BP_CLEARANCE = 1e-6
SINGULAR_TOL = 1e-10
T_TOL = 1e-10
MAX_SHEETS = 64


# ---------------------------------------------------------------------------
# Paths


@dataclass(frozen=True)
class Polyline:
    points: tuple

    def __post_init__(self):
        pts = tuple(check_finite(p, "polyline point") for p in self.points)
        if len(pts) < 2:
            raise DomainError("a polyline needs at least two points")
        object.__setattr__(self, "points", pts)

    @property
    def length(self) -> float:
        return sum(abs(q - p) for p, q in zip(self.points, self.points[1:]))

    def _locate(self, t: float):
        """Segment (p, q) and local parameter for arc-length fraction t."""
        total = self.length
        pts = self.points
        if total == 0.0:
            return pts[0], pts[0], 0.0, 0.0
        s = min(max(t, 0.0), 1.0) * total
        for p, q in zip(pts, pts[1:]):
            seg = abs(q - p)
            if s <= seg or q is pts[-1]:
                u = s / seg if seg > 0 else 0.0
                return p, q, min(u, 1.0), total
            s -= seg
        return pts[-2], pts[-1], 1.0, total

    def z(self, t: float) -> complex:
        p, q, u, _ = self._locate(t)
        return p + u * (q - p)

    def dz(self, t: float) -> complex:
        p, q, _, total = self._locate(t)
        seg = abs(q - p)
        return (q - p) / seg * total if seg > 0 else 0j


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    turns: float = 1.0
    start_angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", check_finite(self.center, "center"))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("circle radius must be positive")
        if not math.isfinite(self.turns) or self.turns == 0:
            raise DomainError("circle turns must be finite and nonzero")

    def z(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * (self.start_angle + 2 * math.pi * self.turns * t))

    def dz(self, t: float) -> complex:
        om = 2 * math.pi * self.turns
        return 1j * om * self.radius * cmath.exp(1j * (self.start_angle + om * t))


@dataclass(frozen=True)
class PathSpec:
    kind: Union[Polyline, Circle]
    samples: Optional[int] = None

    def __post_init__(self):
        if self.samples is not None and self.samples < 1:
            raise DomainError("samples must be a positive integer")

    @property
    def n_steps(self) -> int:
        if self.samples is not None:
            return int(self.samples)
        if isinstance(self.kind, Circle):
            return int(math.ceil(SAMPLES_PER_TURN * max(1.0, abs(self.kind.turns))))
        return SAMPLES_PER_TURN

    def z(self, t: float) -> complex:
        return self.kind.z(t)

    def dz(self, t: float) -> complex:
        return self.kind.dz(t)

    @classmethod
    def circle(cls, center, radius, turns=1.0, start_angle=0.0, samples=None) -> "PathSpec":
        return cls(Circle(complex(center), float(radius), float(turns), float(start_angle)), samples)

    @classmethod
    def polyline(cls, points: Sequence[complex], samples=None) -> "PathSpec":
        return cls(Polyline(tuple(complex(p) for p in points)), samples)


# ---------------------------------------------------------------------------
# Atlas


def sheet_strip(a: Parameter, b: BranchId) -> int:
    if b.family is BranchFamily.PRINCIPAL:
        return b.k
    return tilde_location(a, b.k)[0]


def shift_sheet(a: Parameter, b: BranchId, strips: int) -> BranchId:
    """Translate a sheet by a whole number of strips."""
    if b.family is BranchFamily.PRINCIPAL:
        return Principal(b.k + strips)
    m, j = tilde_location(a, b.k)
    return BranchId(b.family, tilde_index(a, m + strips, j))


@dataclass(frozen=True)
class Cut:
    """A w-plane cut together with its z-image.

    The image starts at ``origin``; ``end`` is None for rays, which extend in
    direction ``angle``.
    """

    name: str
    origin: complex
    angle: float
    end: Optional[complex] = None

    def shifted(self, a: Parameter, strips: int) -> "Cut":
        head, *idx = self.name.split(":")
        idx[0] = str(int(idx[0]) + strips)
        rot = cmath.exp(1j * (1 + a.value) * strips * math.pi / a.value)
        end = None if self.end is None else self.end * rot
        return Cut(":".join([head, *idx]), self.origin * rot, self.angle + (1 + a.value) * strips * math.pi / a.value, end)

    def distance(self, z: complex) -> float:
        d = cmath.exp(1j * self.angle)
        u = ((z - self.origin) * d.conjugate()).real
        if u < 0:
            return abs(z - self.origin)
        if self.end is not None and u > abs(self.end - self.origin):
            return abs(z - self.end)
        return abs(((z - self.origin) * d.conjugate()).imag)


@dataclass(frozen=True)
class AtlasEntry:
    sheet: BranchId
    cut: Cut
    side: str  # "closed" or "open"
    neighbor: BranchId


@dataclass(frozen=True)
class GluingAtlas:
    a: Parameter
    period_strips: int
    entries: tuple

    def lookup(self, sheet: BranchId, neighbor: BranchId) -> Optional[AtlasEntry]:
        """Entry for the cut between two sheets, translated to their period."""
        s = sheet_strip(self.a, sheet)
        for e in self.entries:
            d = s - sheet_strip(self.a, e.sheet)
            if d % self.period_strips:
                continue
            if shift_sheet(self.a, e.sheet, d) == sheet and shift_sheet(self.a, e.neighbor, d) == neighbor:
                return AtlasEntry(sheet, e.cut.shifted(self.a, d) if d else e.cut, e.side, neighbor)
        return None

    def sheets(self) -> list[BranchId]:
        return sorted({e.sheet for e in self.entries})

    def links(self, bp: complex, tol: float = 1e-9) -> list[BranchId]:
        """Sheets having a cut that ends at the branch point bp."""
        out = set()
        for e in self.entries:
            ends = [e.cut.origin] + ([e.cut.end] if e.cut.end is not None else [])
            if any(abs(bp - p) <= tol for p in ends):
                out.add(e.sheet)
        return sorted(out)


def build_atlas(a) -> GluingAtlas:
    a = as_parameter(a)
    if a.category is Category.IRRATIONAL:
        raise UnsupportedCategoryError("no gluing atlas for irrational a")
    ns = strips_per_period(a)
    n = pieces_per_strip(a)
    if ns * (n + 1) > MAX_SHEETS:
        raise UnsupportedCategoryError(f"one period of a = {a} has more than {MAX_SHEETS} sheets")

    def piece(m, j):
        return Tilde(tilde_index(a, m, j))

    entries = []

    def glue(cut, closed, opened):
        entries.append(AtlasEntry(closed, cut, "closed", opened))
        entries.append(AtlasEntry(opened, cut, "open", closed))

    for m in range(ns):
        zm = critical_point(a, m).z
        ang = cmath.phase(zm)
        glue(Cut(f"rho:{m}", 0j, ang, zm), piece(m - 1, n - 1), piece(m, 0))
        glue(Cut(f"upper:{m}", zm, ang), Principal(m), piece(m, 0))
        glue(Cut(f"lower:{m}", zm, ang), piece(m - 1, n - 1), Principal(m))
        for j in range(1, n):
            th = piece_theta(a, m, j)[0]
            glue(Cut(f"inner:{m}:{j}", 0j, th), piece(m, j - 1), piece(m, j))
    return GluingAtlas(a, ns, tuple(entries))


# ---------------------------------------------------------------------------
# Continuation


@dataclass(frozen=True)
class Event:
    t: float
    z: complex
    cut: Optional[str]
    from_region: RegionId
    to_region: RegionId
    from_sheet: Optional[BranchId]
    to_sheet: Optional[BranchId]
    side: Optional[str]
    ccw: bool  # moving counterclockwise about the origin


@dataclass
class ContinuationResult:
    samples: list
    events: list
    final_region: RegionId
    final_sheet: Optional[BranchId]
    max_residual: float
    atlas: Optional[GluingAtlas] = field(default=None, repr=False)

    @property
    def w_final(self) -> complex:
        return self.samples[-1][2]


def _sheet(region: RegionId) -> Optional[BranchId]:
    return None if region.kind is RegionKind.UNCLASSIFIED else sheet_of(region)


def _project(a: Parameter, z: complex, w: complex, iters: int = 3) -> complex:
    scale = max(1.0, abs(z))
    for _ in range(iters):
        d = f_prime(a, w)
        if abs(d) < SINGULAR_TOL:
            raise SingularityError(f"continuation hit a critical point near w = {w!r}")
        r = eval_f(a, w) - z
        if abs(r) <= 1e-15 * scale:
            break
        w = w - r / d
    if abs(eval_f(a, w) - z) > 1e-10 * scale:
        raise ConvergenceError(f"residual re-projection failed at z = {z!r}")
    return w


def _rk4(a: Parameter, path: PathSpec, t: float, h: float, w: complex) -> complex:
    def rhs(s, w_):
        d = f_prime(a, w_)
        if abs(d) < SINGULAR_TOL:
            raise SingularityError(f"continuation hit a critical point near w = {w_!r}")
        return path.dz(s) / d

    k1 = rhs(t, w)
    k2 = rhs(t + h / 2, w + h / 2 * k1)
    k3 = rhs(t + h / 2, w + h / 2 * k2)
    k4 = rhs(t + h, w + h * k3)
    return _project(a, path.z(t + h), w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


def _segment_distance(p: complex, q: complex, z: complex) -> float:
    d = q - p
    if d == 0:
        return abs(z - p)
    u = min(max(((z - p) * d.conjugate()).real / abs(d) ** 2, 0.0), 1.0)
    return abs(z - (p + u * d))


def _check_clearance(a: Parameter, path: PathSpec) -> None:
    """Exact distance from the path to every branch point."""
    kind = path.kind
    for bp in branch_points(a):
        if isinstance(kind, Circle):
            if abs(kind.turns) >= 1:
                d = abs(abs(bp - kind.center) - kind.radius)
            else:
                n = 4096
                d = min(abs(bp - path.z(i / n)) for i in range(n + 1))
        else:
            d = min(_segment_distance(p, q, bp) for p, q in zip(kind.points, kind.points[1:]))
        if d < BP_CLEARANCE:
            raise DomainError(f"path passes within {BP_CLEARANCE} of branch point {bp!r}")


def _refine(a, path, atlas, t0, w0, r0, t1, r1):
    """Events between samples t0 (region r0) and t1 (region r1)."""
    events = []
    lo, wlo, rlo = t0, w0, r0
    while rlo != r1:
        hi = t1
        rhi = r1
        while hi - lo > T_TOL:
            mid = 0.5 * (lo + hi)
            wm = _rk4(a, path, lo, mid - lo, wlo)
            rm = region_of(a, wm)
            if rm == rlo:
                lo, wlo = mid, wm
            else:
                hi, rhi = mid, rm
        z = path.z(hi)
        ccw = (path.dz(hi) / z).imag > 0 if z != 0 else False
        fs, ts = _sheet(rlo), _sheet(rhi)
        entry = atlas.lookup(fs, ts) if atlas is not None and fs and ts else None
        events.append(
            Event(hi, z, entry.cut.name if entry else None, rlo, rhi, fs, ts, entry.side if entry else None, ccw)
        )
        if hi >= t1:
            break
        wlo = _rk4(a, path, lo, hi - lo, wlo)
        lo, rlo = hi, rhi
    return events


def continue_path(a, path: PathSpec, w_start: complex, *, atlas: Optional[GluingAtlas] = None) -> ContinuationResult:
    """Lift ``path`` starting from the preimage ``w_start`` of its first point."""
    a = as_parameter(a)
    w = check_finite(w_start, "w_start")
    z0 = path.z(0.0)
    if abs(eval_f(a, w) - z0) > 1e-10 * max(1.0, abs(z0)):
        raise DomainError("w_start is not a preimage of the path start point")
    n = path.n_steps
    _check_clearance(a, path)
    if atlas is None and a.category is not Category.IRRATIONAL:
        try:
            atlas = build_atlas(a)
        except UnsupportedCategoryError:
            atlas = None
    h = 1.0 / n
    region = region_of(a, w)
    samples = [(0.0, z0, w)]
    events: list[Event] = []
    worst = abs(eval_f(a, w) - z0) / max(1.0, abs(z0))
    for i in range(n):
        t = i * h
        wn = _rk4(a, path, t, h, w)
        rn = region_of(a, wn)
        if rn != region:
            events.extend(_refine(a, path, atlas, t, w, region, t + h, rn))
        w, region = wn, rn
        z = path.z(t + h)
        worst = max(worst, abs(eval_f(a, w) - z) / max(1.0, abs(z)))
        samples.append(((i + 1) * h, z, w))
    return ContinuationResult(samples, events, region, _sheet(region), worst, atlas)


# ---------------------------------------------------------------------------
# Monodromy


def default_radius(a, bp: complex) -> float:
    """Half the distance from bp to the nearest other branch point."""
    a = as_parameter(a)
    others = [abs(bp - c) for c in branch_points(a) if abs(bp - c) > 1e-12]
    if a.category is Category.IRRATIONAL and bp != 0:
        others.append(abs(bp))
    return 0.5 * min(others)


def _margin(a: Parameter, dom: BranchDomain, z: complex) -> float:
    """Angular clearance of z, seen from 0, from every cut direction."""
    if not dom.contains(z):
        return -1.0
    dirs = [cmath.phase(c) for c in branch_points(a) if c != 0]
    if dom.kind == "sector":
        dirs += [dom.theta_lo, dom.theta_hi]
    th = cmath.phase(z)
    return min(abs(math.remainder(th - d, math.pi)) for d in dirs) if dirs else math.pi


def start_angle(a, bp: complex, radius: float, start: BranchId, candidates: int = 256) -> float:
    a = as_parameter(a)
    dom = branch_domain(a, start)
    best, best_th = -1.0, None
    for i in range(candidates):
        th = 2 * math.pi * i / candidates
        m = _margin(a, dom, bp + radius * cmath.exp(1j * th))
        if m > best + 1e-12:
            best, best_th = m, th
    if best_th is None or best <= 0:
        raise DomainError(f"no loop of radius {radius} around {bp!r} starts inside {start}")
    return best_th


def monodromy_probe(
    a,
    bp: complex,
    start: BranchId,
    n_loops: int,
    *,
    radius: Optional[float] = None,
    samples_per_turn: int = SAMPLES_PER_TURN,
) -> list[BranchId]:
    """Sheet reached after each of ``n_loops`` positive loops around ``bp``."""
    a = as_parameter(a)
    bp = complex(bp)
    if n_loops < 1:
        raise DomainError("n_loops must be positive")
    if all(abs(bp - c) > 1e-12 for c in branch_points(a)):
        raise DomainError(f"{bp!r} is not a branch point")
    r = default_radius(a, bp) if radius is None else float(radius)
    th = start_angle(a, bp, r, start)
    path = PathSpec.circle(bp, r, 1.0, th, samples_per_turn)
    atlas = build_atlas(a) if a.category is not Category.IRRATIONAL else None
    w = psi_branch(a, path.z(0.0), start)
    out = []
    for _ in range(n_loops):
        res = continue_path(a, path, w, atlas=atlas)
        w = res.w_final
        out.append(res.final_sheet)
    return out
