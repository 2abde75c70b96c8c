"""End-to-end acceptance criteria, one logged line per criterion.

Each test records ``CRITERION n: PASS|FAIL <detail>`` through the
``acceptance_log`` fixture before asserting; the lines are printed in the
terminal summary.
"""
import json
import math
import os
import shutil
import subprocess
import sys
import time

import numpy as np

from gutzmer import make_space
from gutzmer.diagnostics import (
    _sobolev_image,
    classifier_corpus,
    classify,
    defining_property_check,
    delta_star_check,
    derivative_bound_check,
    gutzmer_check,
    holo_fourier_check,
    pointwise_bound_check,
    positive_weight_check,
    reproducing_kernel_check,
    sandwich_check,
    stenzel_check,
)
from gutzmer.heat_kernels import rl_integral_quadrature
from gutzmer.transform import SpectralCoeffs, bargmann_forward

T = 0.25
SPACES = ("circle", "sphere2", "su2")


def _record(log, n, ok, detail):
    log.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def _timed(fn, *args, **kw):
    start = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - start


def test_criterion_1_orbit_average_formula(acceptance_log):
    rng = np.random.default_rng(0)
    circle = bargmann_forward(SpectralCoeffs.random(make_space("circle"), 32, rng), T)
    rep_c, sec_c = _timed(gutzmer_check, circle, np.linspace(-4.0, 4.0, 17), tol=1e-12)
    sphere = bargmann_forward(SpectralCoeffs.random(make_space("sphere2"), 8, rng), T)
    rep_s, sec_s = _timed(gutzmer_check, sphere, np.linspace(0.0, 1.0, 9), 24, tol=1e-6)
    ok = rep_c.passed and sec_c < 1.0 and rep_s.passed and sec_s < 30.0
    _record(acceptance_log, 1, ok,
            f"circle err={rep_c.rel_error:.2e} ({sec_c:.2f}s), sphere2 err={rep_s.rel_error:.2e} ({sec_s:.2f}s)")


def test_criterion_2_isometry_constant(acceptance_log):
    parts, ok = [], True
    for name in SPACES:
        rep, sec = _timed(stenzel_check, make_space(name), T, 8, n_functions=10, tol=1e-6)
        ok &= rep.passed and sec < 10.0
        parts.append(f"{name} spread={rep.rel_error:.1e} ({sec:.1f}s)")
        if name == "circle":
            c = rep.fitted_constants["c_t"]
            ok &= abs(c - 0.5) <= 1e-9
            parts.append(f"circle c_t={c:.12f}")
    _record(acceptance_log, 2, ok, ", ".join(parts))


def test_criterion_3_dual_kernel_defining_property(acceptance_log):
    tols = {"circle": 1e-9, "sphere2": 1e-7, "su2": 1e-9}
    reps = {name: defining_property_check(make_space(name), T, 8, tol=tols[name]) for name in SPACES}
    ok = all(r.passed for r in reps.values())
    _record(acceptance_log, 3, ok, ", ".join(f"{n} err={r.rel_error:.1e}" for n, r in reps.items()))


def test_criterion_4_holomorphic_fourier_identity(acceptance_log):
    reps = {name: holo_fourier_check(make_space(name), T, 8, tol=1e-6) for name in SPACES}
    ok = all(r.passed for r in reps.values())
    _record(acceptance_log, 4, ok, ", ".join(f"{n} spread={r.rel_error:.1e}" for n, r in reps.items()))


def test_criterion_5_positive_order_weights(acceptance_log):
    parts, ok = [], True
    for name in SPACES:
        sp = make_space(name)
        reps = positive_weight_check(sp, T, 8, m_values=(0, 1, 2), tol=1e-6)
        ok &= all(r.passed for r in reps)
        worst = max(r.rel_error for r in reps)
        deltas = [delta_star_check(sp, T, m) for m in (1, 2, 3)]
        ok &= all(d.passed for d in deltas)
        margins = min(d.fitted_constants["min_at_delta_star_plus_0.1"] for d in deltas)
        parts.append(f"{name} wm err={worst:.1e} delta*={deltas[0].fitted_constants['delta_star']:.4g} "
                     f"margin={margins:.1e}")
    _record(acceptance_log, 5, ok, ", ".join(parts))


def test_criterion_6_negative_order_sandwich(acceptance_log):
    parts, ok = [], True
    for s in (0.5, 1.0, 2.0):
        rep = sandwich_check(T, s, b_max=1e3, tol=1e-12)
        ok &= rep.passed
        parts.append(f"s={s} c1={rep.fitted_constants['c1']:.3g} err={rep.rel_error:.1e}")
    # s = 1 against the elementary closed form, independent of the incomplete gamma function
    b = np.logspace(0, 3, 61)
    elementary = -np.expm1(-2 * T * b)
    err1 = float(np.max(np.abs(rl_integral_quadrature(1.0, T, b) - elementary) / elementary))
    ok &= err1 <= 1e-12
    parts.append(f"s=1 closed form err={err1:.1e}")
    _record(acceptance_log, 6, ok, ", ".join(parts))


def test_criterion_7_derivative_bound(acceptance_log):
    parts, ok = [], True
    for name in SPACES:
        reps = [derivative_bound_check(make_space(name), T, m, s_factor=1.25, r_max=10.0, tol=0.01)
                for m in range(4)]
        ok &= all(r.passed and math.isfinite(r.fitted_constants["C"]) for r in reps)
        parts.append(f"{name} max change={max(r.rel_error for r in reps):.1e}")
    _record(acceptance_log, 7, ok, ", ".join(parts))


def test_criterion_8_pointwise_envelope(acceptance_log):
    parts, ok = [], True
    for name in SPACES:
        sp = make_space(name)
        reps = [pointwise_bound_check(_sobolev_image(sp, T, 32, m), m, tol=0.02) for m in range(1, 5)]
        ok &= all(r.passed and math.isfinite(r.fitted_constants["C_star"]) for r in reps)
        parts.append(f"{name} max change={max(r.rel_error for r in reps):.1e}")
    rk = [reproducing_kernel_check(T, m, tol=1e-7) for m in (1, 2, 3)]
    ok &= all(r.passed for r in rk)
    parts.append(f"circle kernel err={max(r.rel_error for r in rk):.1e}")
    _record(acceptance_log, 8, ok, ", ".join(parts))


def test_criterion_9_classifier_corpus(acceptance_log):
    start = time.perf_counter()
    cases = classifier_corpus(T, 48, 0)
    expected_verdicts = {
        "SMOOTH": ("SMOOTH_CONSISTENT", None),
        "DISTRIBUTION": (None, "DISTRIBUTION_CONSISTENT"),
        "UNBOUNDED": (None, "UNBOUNDED_GROWTH"),
    }
    wrong = []
    for name, image, label in cases:
        out = classify(image, T)
        smooth_v, dist_v = expected_verdicts[label]
        good = out["label"] == label
        if smooth_v:
            good &= out["smooth_verdict"] == smooth_v
        if dist_v:
            good &= out["distribution_verdict"] == dist_v
        if label == "DISTRIBUTION":
            good &= out["smooth_verdict"] != "SMOOTH_CONSISTENT"
        if not good:
            wrong.append(name)
    sec = time.perf_counter() - start
    ok = len(cases) == 30 and not wrong and sec < 60.0
    _record(acceptance_log, 9, ok, f"{len(cases)} cases, misclassified={wrong or 0} ({sec:.1f}s)")


def _cli():
    exe = shutil.which("gutzmer")
    return [exe] if exe else [sys.executable, "-m", "gutzmer.cli"]


def _verify_all(name, lmax):
    argv = _cli() + ["verify", "all", "--space", name, "--t", str(T), "--lmax", str(lmax), "--seed", "0"]
    start = time.perf_counter()
    proc = subprocess.run(argv, capture_output=True, text=True, env=dict(os.environ))
    return proc, time.perf_counter() - start


def test_criterion_10_full_verification(acceptance_log):
    parts, ok = [], True
    for name, lmax in (("circle", 32), ("sphere2", 8), ("su2", 8)):
        first, sec = _verify_all(name, lmax)
        second, _ = _verify_all(name, lmax)
        docs = []
        for proc in (first, second):
            try:
                doc = json.loads(proc.stdout)
                doc.pop("timing")
            except (json.JSONDecodeError, KeyError):
                doc = None
            docs.append(doc)
        same = docs[0] is not None and docs[0] == docs[1]
        space_ok = first.returncode == 0 and second.returncode == 0 and sec < 300 and same
        ok &= space_ok
        summary = docs[0]["summary"] if docs[0] else first.stderr.strip()[-200:]
        parts.append(f"{name} exit={first.returncode} {sec:.0f}s deterministic={same} {summary}")
    _record(acceptance_log, 10, ok, "; ".join(parts))
