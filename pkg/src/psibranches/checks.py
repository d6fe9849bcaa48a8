"""Deterministic verification suites behind ``psibranches verify``.

Each check yields a :class:`Check` record; suites return them sorted by name so
output is reproducible for fixed parameters and seed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy.stats import qmc

from .branches import (
    BranchId,
    Principal,
    Tilde,
    branch_domain,
    codomain,
    lambert_w,
    psi0_real,
    psi_branch,
    psi_minus1_real,
    psi_near_one,
    psi_one_third,
)
from .continuation import PathSpec, build_atlas, continue_path, default_radius, start_angle
from .core import (
    Category,
    Parameter,
    branch_points,
    critical_points,
    eval_f,
    f_prime,
    jacobian,
    psi_prime,
    strips_per_period,
    x_a,
    xi_a,
)
from .geometry import pieces_per_strip, region_of, tilde_index

SUITES = ("core", "branches", "limits", "monodromy")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    error: float
    tol: float


def _check(name: str, error: float, tol: float) -> Check:
    return Check(name, bool(math.isfinite(error) and error <= tol), float(error), float(tol))


def period_branches(a: Parameter) -> list[BranchId]:
    """Principal and tilde branches covering one period, plus the piece below it."""
    if a.category is Category.IRRATIONAL:
        return [Principal(0)]
    ns, n = strips_per_period(a), pieces_per_strip(a)
    out = [Principal(k) for k in range(ns)]
    out += [Tilde(tilde_index(a, m, j)) for m in range(-1, ns) for j in range(n)]
    return out


def sample_domain(a: Parameter, b: BranchId, n: int, seed: int = 0) -> list[complex]:
    """Quasi-random points of the domain of b with moduli in [1e-3, 10^1.5]."""
    dom = branch_domain(a, b)
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    out = []
    for r, s in u:
        mod = 10.0 ** (-3.0 + 4.5 * r)
        if dom.kind == "sector":
            lo, hi = dom.theta_lo, dom.theta_hi
            th = lo + (hi - lo) * (1e-6 + (1 - 2e-6) * s)
        else:
            th = math.pi * (2 * s - 1)
        z = cmath.rect(mod, th)
        if dom.contains(z):
            out.append(z)
    return out


# ---------------------------------------------------------------------------
# core


def jacobian_errors(a: Parameter, n: int = 200, box: float = 4.0):
    """Worst J lower bound and worst | |f'|^2 - J | / (1 + J) on an n x n grid."""
    xs = np.linspace(-box, box, n)
    ys = np.linspace(-box, box, n)
    jmin, dev = math.inf, 0.0
    for x in xs:
        for y in ys:
            w = complex(x, y)
            j = jacobian(a, w)
            jmin = min(jmin, j)
            dev = max(dev, abs(abs(f_prime(a, w)) ** 2 - j) / (1 + j))
    return jmin, dev


def suite_core(params: Iterable[Parameter], seed: int = 0) -> list[Check]:
    out = []
    for a in params:
        tag = f"core/a={a}"
        jmin, dev = jacobian_errors(a, n=40)
        out.append(_check(f"{tag}/jacobian_nonnegative", max(0.0, -jmin), 1e-15))
        out.append(_check(f"{tag}/jacobian_equals_abs_fprime_sq", dev, 1e-12))
        cps = critical_points(a, -2, 2)
        out.append(_check(f"{tag}/jacobian_at_critical_points", max(abs(jacobian(a, c.w)) for c in cps), 1e-12))
        out.append(_check(f"{tag}/critical_values", max(abs(eval_f(a, c.w) - c.z) for c in cps), 1e-14))
        out.append(_check(f"{tag}/x_a_is_real_minimum", abs(eval_f(a, complex(xi_a(a), 0)) - x_a(a)), 1e-15))
        bps = branch_points(a)
        out.append(_check(f"{tag}/branch_points_include_0_and_x_a", min(abs(b) for b in bps) + min(abs(b - x_a(a)) for b in bps), 0.0))
    return out


# ---------------------------------------------------------------------------
# branches


def _fd_error(a: Parameter, z: complex, b: BranchId, h: float = 1e-6) -> float:
    w = psi_branch(a, z, b)
    d = (psi_branch(a, z + h, b) - psi_branch(a, z - h, b)) / (2 * h)
    p = psi_prime(a, z, w)
    return abs(d - p) / abs(p)


def suite_branches(params: Iterable[Parameter], seed: int = 0, n: int = 64) -> list[Check]:
    out = []
    for a in params:
        tag = f"branches/a={a}"
        for b in period_branches(a):
            zs = sample_domain(a, b, n, seed)
            res, bad = 0.0, 0
            target = codomain(a, b)
            fd = 0.0
            for z in zs:
                w = psi_branch(a, z, b)
                res = max(res, abs(eval_f(a, w) - z) / max(1.0, abs(z)))
                if a.category is not Category.IRRATIONAL and region_of(a, w) != target:
                    bad += 1
                if branch_domain(a, b).contains(z + 1e-5) and branch_domain(a, b).contains(z - 1e-5) and min(
                    abs(z - c) for c in branch_points(a)
                ) > 1e-2:
                    fd = max(fd, _fd_error(a, z, b))
            out.append(_check(f"{tag}/{b}/roundtrip", res, 1e-10))
            out.append(_check(f"{tag}/{b}/codomain", float(bad), 0.0))
            out.append(_check(f"{tag}/{b}/derivative", fd, 1e-6))
        xa, xia = x_a(a), xi_a(a)
        xs = np.linspace(xa + 1e-6, xa + 10, 200)
        v0 = np.array([psi0_real(a, x) for x in xs])
        d2 = np.diff(v0, 2)
        out.append(_check(f"{tag}/psi0_increasing", float(max(0.0, -np.diff(v0).min())), 0.0))
        out.append(_check(f"{tag}/psi0_concave", float(max(0.0, d2.max())), 1e-9))
        xm = np.linspace(xa + 1e-6, -1e-6, 200)
        vm = np.array([psi_minus1_real(a, x) for x in xm])
        out.append(_check(f"{tag}/psi_minus1_decreasing", float(max(0.0, np.diff(vm).max())), 0.0))
        meet = abs(psi0_real(a, xa) - xia) + abs(psi_minus1_real(a, xa) - xia)
        out.append(_check(f"{tag}/real_branches_meet", meet, 1e-8))
        if a.exact == Fraction(1, 3):
            out.extend(_one_third_checks(a, seed))
    return out


def _one_third_checks(a: Parameter, seed: int) -> list[Check]:
    out = []
    # the tilde closed form is Tilde(1) below the real axis and Tilde(-1) above
    for which, b, sign in (("plain", Principal(0), 0), ("tilde", Tilde(1), -1), ("tilde", Tilde(-1), 1)):
        err = 0.0
        for z in sample_domain(a, b, 100, seed):
            if sign and z.imag * sign <= 0:
                z = z.conjugate()
            if sign and z.imag == 0:
                continue
            err = max(err, abs(psi_one_third(z, which) - psi_branch(a, z, b)))
        out.append(_check(f"branches/a={a}/closed_form_{which}_{b}", err, 1e-10))
    return out


# ---------------------------------------------------------------------------
# limits


def small_a_errors(alphas=(1e-1, 1e-2, 1e-3), n: int = 50) -> list[float]:
    xs = np.linspace(0.02, 2.0, n)
    out = []
    for s in alphas:
        a = Parameter.irrational(s)
        out.append(max(abs(psi0_real(a, x) - lambert_w(0, x / s)) for x in xs))
    return out


def near_one_errors(alphas=(0.9, 0.99, 0.999), n: int = 50) -> list[float]:
    xs = np.linspace(-0.2, 2.0, n)
    out = []
    for s in alphas:
        a = Parameter.irrational(s)
        out.append(max(abs(psi0_real(a, x) - psi_near_one(a, x).real) for x in xs))
    return out


def _decreasing(errs) -> float:
    """0 when strictly decreasing, else the largest non-decrease."""
    worst = 0.0
    for e0, e1 in zip(errs, errs[1:]):
        if e1 >= e0:
            worst = max(worst, e1 - e0 + 1e-300)
    return worst


def suite_limits(params: Iterable[Parameter] = (), seed: int = 0) -> list[Check]:
    sa, na = small_a_errors(), near_one_errors()
    out = [
        _check("limits/small_a_error_decreasing", _decreasing(sa), 0.0),
        _check("limits/near_one_error_decreasing", _decreasing(na), 0.0),
    ]
    for s, e in zip((1e-1, 1e-2, 1e-3), sa):
        out.append(_check(f"limits/small_a/a={s!r}", e, 1.0))
    for s, e in zip((0.9, 0.99, 0.999), na):
        out.append(_check(f"limits/near_one/a={s!r}", e, 1.0))
    return out


# ---------------------------------------------------------------------------
# monodromy


def event_violations(atlas, events) -> tuple[int, int]:
    """(events without a matching atlas entry, events breaking the CCC rule)."""
    missing = ccc = 0
    for e in events:
        entry = atlas.lookup(e.from_sheet, e.to_sheet) if e.from_sheet and e.to_sheet else None
        if entry is None or entry.cut.distance(e.z) > 1e-6 * max(1.0, abs(e.z)):
            missing += 1
            continue
        if (entry.side == "closed") != e.ccw:
            ccc += 1
    return missing, ccc


def no_return_witness(a: Parameter, start: BranchId, loops: int = 8, samples: int = 4096):
    """Sheets after each loop around 0 plus any atlas or CCC violations."""
    atlas = build_atlas(a)
    r = min(abs(x_a(a)) / 2, default_radius(a, 0j))
    th = start_angle(a, 0j, r, start)
    path = PathSpec.circle(0, r, 1.0, th, samples)
    w = psi_branch(a, path.z(0), start)
    sheets, missing, ccc = [], 0, 0
    for _ in range(loops):
        res = continue_path(a, path, w, atlas=atlas)
        m, c = event_violations(atlas, res.events)
        missing, ccc = missing + m, ccc + c
        w = res.w_final
        sheets.append(res.final_sheet)
    return sheets, missing, ccc


def trivial_loop_error(a: Parameter, samples: int = 2048) -> float:
    """Return error of a loop around z = 1 + |x_a| enclosing no branch point."""
    c = 1.0 + abs(x_a(a))
    r = 0.5 * min(abs(c - b) for b in branch_points(a))
    path = PathSpec.circle(c, r, 1.0, 0.0, samples)
    w0 = psi_branch(a, path.z(0), Principal(0))
    return abs(continue_path(a, path, w0).w_final - w0)


def suite_monodromy(params: Iterable[Parameter], seed: int = 0) -> list[Check]:
    out = []
    for a in params:
        tag = f"monodromy/a={a}"
        out.append(_check(f"{tag}/trivial_loop_returns", trivial_loop_error(a), 1e-8))
        if a.category is Category.IRRATIONAL:
            continue
        start = Tilde(1)
        sheets, missing, ccc = no_return_witness(a, start)
        out.append(_check(f"{tag}/no_return_around_0", float(sheets.count(start)), 0.0))
        out.append(_check(f"{tag}/events_match_atlas", float(missing), 0.0))
        out.append(_check(f"{tag}/ccc_rule", float(ccc), 0.0))
    return out


SUITE_FUNCS: dict[str, Callable[..., list[Check]]] = {
    "core": suite_core,
    "branches": suite_branches,
    "limits": suite_limits,
    "monodromy": suite_monodromy,
}


def run_suite(name: str, params: Iterable[Parameter], seed: int = 0) -> list[Check]:
    params = list(params)
    names = SUITES if name == "all" else (name,)
    out: list[Check] = []
    for s in names:
        out.extend(SUITE_FUNCS[s](params, seed))
    return sorted(out, key=lambda c: c.name)
