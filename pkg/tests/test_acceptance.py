"""Acceptance criteria 1-10, each with its stated tolerance and runtime budget."""

import math
import subprocess
import sys
import time

import numpy as np

from psibranches import (
    Parameter,
    Principal,
    Shape,
    Tilde,
    boundary_image_x,
    branch_domain,
    branch_points,
    codomain,
    critical_points,
    eval_f,
    f_prime,
    gamma_curves,
    jacobian,
    psi0_real,
    psi_branch,
    psi_minus1_real,
    psi_one_third,
    psi_prime,
    region_of,
    strips_per_period,
    x_a,
    xi_a,
    xi_domain,
)
from psibranches.branches import EDGE_BAND
from psibranches.checks import (
    event_violations,
    near_one_errors,
    no_return_witness,
    period_branches,
    sample_domain,
    small_a_errors,
    trivial_loop_error,
)
from psibranches.geometry import sample_xi_graph

THIRD = ["1/2", "1/3", "1/4"]


def test_criterion_01_closed_form_constants(acceptance):
    s3, s15 = math.sqrt(3) / 9, 3 * math.sqrt(15) / 125
    expected = {"1/2": (-s3, [-s3, 0.0, s3]), "1/4": (-s15, [-s15, 0.0, s15]), "1/3": (-1 / 8, [-1 / 8, 0.0])}
    worst, sets_ok = 0.0, True
    for text, (xa, bps) in expected.items():
        a = Parameter.parse(text)
        worst = max(worst, abs(x_a(a) - xa))
        for c in critical_points(a, 0, strips_per_period(a) - 1):
            worst = max(worst, min(abs(c.z - xa), abs(c.z + xa)))
        got = branch_points(a)
        sets_ok &= len(got) == len(bps) and all(abs(g - e) <= 1e-14 for g, e in zip(got, bps))
    ok = acceptance(1, worst <= 1e-14 and sets_ok, f"max |x_a - closed form| = {worst:.2e} (tol 1e-14); BP sets exact: {sets_ok}")
    assert ok


def test_criterion_02_roundtrip_inversion(acceptance):
    t0 = time.perf_counter()
    worst, bad, counts = 0.0, 0, []
    for text in THIRD:
        a = Parameter.parse(text)
        for b in period_branches(a):
            zs = sample_domain(a, b, 512, seed=11)
            counts.append(len(zs))
            target = codomain(a, b)
            dom = branch_domain(a, b)
            for z in zs:
                w = psi_branch(a, z, b)
                worst = max(worst, abs(eval_f(a, w) - z) / max(1.0, abs(z)))
                if dom.edge_offset(z)[0] >= EDGE_BAND and region_of(a, w) != target:
                    bad += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and bad == 0 and min(counts) >= 500 and dt <= 10.0
    acceptance(
        2, ok,
        f"{len(counts)} branches, >= {min(counts)} points each; max rel residual {worst:.2e} (tol 1e-10); "
        f"codomain misses {bad}; {dt:.1f} s (budget 10 s)",
    )
    assert ok


def test_criterion_03_jacobian_law(acceptance):
    worst_neg, worst_dev, worst_cp = 0.0, 0.0, 0.0
    for text in ["1/2", "1/3", "1/4", "0.6180339887498949"]:
        a = Parameter.parse(text)
        for x in np.linspace(-5, 5, 200):
            for y in np.linspace(-10, 10, 200):
                w = complex(x, y)
                j = jacobian(a, w)
                worst_neg = max(worst_neg, -j)
                worst_dev = max(worst_dev, abs(abs(f_prime(a, w)) ** 2 - j) / (1 + j))
        for c in critical_points(a, -3, 3):
            worst_cp = max(worst_cp, abs(jacobian(a, c.w)))
    ok = worst_neg <= 1e-15 and worst_dev <= 1e-12 and worst_cp <= 1e-12
    acceptance(3, ok, f"min J = {-worst_neg:.2e}; max ||f'|^2 - J|/(1+J) = {worst_dev:.2e}; max J at critical points = {worst_cp:.2e}")
    assert ok


def test_criterion_04_real_branch_shape(acceptance):
    ok = True
    details = []
    for text in THIRD:
        a = Parameter.parse(text)
        xa, xia = x_a(a), xi_a(a)
        v0 = np.array([psi0_real(a, x) for x in np.linspace(xa + 1e-6, xa + 10, 1000)])
        vm = np.array([psi_minus1_real(a, x) for x in np.linspace(xa + 1e-6, -1e-6, 1000)])
        inc = bool(np.all(np.diff(v0) > 0))
        concave = float(np.diff(v0, 2).max())
        dec = bool(np.all(np.diff(vm) < 0))
        meet = max(abs(psi0_real(a, xa) - xia), abs(psi_minus1_real(a, xa) - xia), abs(eval_f(a, complex(xia, 0)) - xa))
        ok &= inc and concave <= 1e-9 and dec and meet <= 1e-8
        details.append(f"a={text}: max 2nd diff {concave:.1e}, meet {meet:.1e}")
    acceptance(4, ok, "; ".join(details))
    assert ok


def test_criterion_05_one_third_closed_form(acceptance):
    a = Parameter.parse("1/3")
    worst = {}
    for which, b, side in (("plain", Principal(0), 0), ("tilde", Tilde(1), -1), ("tilde", Tilde(-1), 1)):
        zs = [z if not side or z.imag * side > 0 else z.conjugate() for z in sample_domain(a, b, 100, seed=5)]
        zs = [z for z in zs if not side or z.imag != 0][:100]
        assert len(zs) == 100
        worst[str(b)] = max(abs(psi_one_third(z, which) - psi_branch(a, z, b)) for z in zs)
    ok = max(worst.values()) <= 1e-10
    acceptance(5, ok, ", ".join(f"{k}: {v:.1e}" for k, v in worst.items()) + " (tol 1e-10)")
    assert ok


def test_criterion_06_limit_regimes(acceptance):
    sa, na = small_a_errors(), near_one_errors()
    ok = sa[0] > sa[1] > sa[2] and na[0] > na[1] > na[2]
    acceptance(
        6, ok,
        "a->0: " + " > ".join(f"{e:.2e}" for e in sa) + "; a->1: " + " > ".join(f"{e:.2e}" for e in na),
    )
    assert ok


def test_criterion_07_derivative(acceptance):
    h = 1e-6
    worst, counts = 0.0, []
    for text in THIRD:
        a = Parameter.parse(text)
        bps = branch_points(a)
        for b in period_branches(a):
            dom = branch_domain(a, b)
            n = 0
            for z in sample_domain(a, b, 400, seed=13):
                if n == 100:
                    break
                if min(abs(z - c) for c in bps) < 1e-2 or dom.edge_offset(z)[0] < 1e-4:
                    continue
                if not (dom.contains(z + h) and dom.contains(z - h)):
                    continue
                w = psi_branch(a, z, b)
                fd = (psi_branch(a, z + h, b) - psi_branch(a, z - h, b)) / (2 * h)
                d = psi_prime(a, z, w)
                worst = max(worst, abs(fd - d) / abs(d))
                n += 1
            counts.append(n)
    ok = worst <= 1e-6 and min(counts) == 100
    acceptance(7, ok, f"{len(counts)} branches x {min(counts)} points; max relative deviation {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_08_monodromy_witnesses(acceptance):
    t0 = time.perf_counter()
    ok, details = True, []
    for text in ["1/2", "1/4"]:
        a = Parameter.parse(text)
        sheets, missing, ccc = no_return_witness(a, Tilde(1), loops=8)
        triv = trivial_loop_error(a)
        ok &= Tilde(1) not in sheets and missing == 0 and ccc == 0 and triv <= 1e-8
        details.append(
            f"a={text}: sheets {' '.join(str(s.k) for s in sheets)}, atlas misses {missing}, CCC breaks {ccc}, trivial loop {triv:.1e}"
        )
    dt = time.perf_counter() - t0
    ok &= dt <= 20.0
    acceptance(8, ok, "; ".join(details) + f"; {dt:.1f} s (budget 20 s)")
    assert ok


def test_criterion_09_geometry_consistency(acceptance):
    im_worst, sup_gap, neg = 0.0, 0.0, True
    for text in THIRD:
        a = Parameter.parse(text)
        for iv in xi_domain(a, strips_per_period(a) * math.pi / a.value):
            for eta, v in sample_xi_graph(a, iv, 200):
                im_worst = max(im_worst, abs(eval_f(a, complex(v, eta)).imag))
        top = math.pi / (1 + a.value)
        xs = [boundary_image_x(a, top * k / 1000) for k in range(1, 1000)]
        neg &= max(xs) < 0
        sup_gap = max(sup_gap, abs(boundary_image_x(a, 1e-7) - x_a(a)))
        neg &= max(xs) <= x_a(a) + 1e-6
    shapes = [g.shape for g in gamma_curves(Parameter.parse("1/4"))]
    cubic = {k for k, s in enumerate(shapes) if s is Shape.CUBIC}
    parab = {k for k, s in enumerate(shapes) if s is Shape.PARABOLIC}
    pattern = cubic == {1, 2, 5, 6} and parab == {0, 3, 4, 7}
    ok = im_worst <= 1e-10 and neg and sup_gap <= 1e-6 and pattern
    acceptance(9, ok, f"max |Im f| on Xi graphs {im_worst:.1e}; boundary x < 0: {neg}; sup gap {sup_gap:.1e}; Gamma pattern ok: {pattern}")
    assert ok


def test_criterion_10_cli_determinism(acceptance):
    cmd = [sys.executable, "-m", "psibranches", "verify", "--suite", "all", "--a", "1/2", "--a", "1/3", "--a", "1/4"]
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    codes = [r.returncode for r in runs]
    same = runs[0].stdout == runs[1].stdout
    ok = codes == [0, 0] and same and len(runs[0].stdout) > 0
    acceptance(10, ok, f"exit codes {codes}; byte-identical: {same}; {runs[0].stdout.count(b'check,')} checks")
    assert ok
