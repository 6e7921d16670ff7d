"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Tolerances are fixed here, not configurable.
"""

import time

import numpy as np
import pytest

import arrowtime as at
from arrowtime.checks import run_checks
from arrowtime.cli import main
from conftest import arctan_trace


def report(criterion, passed, detail):
    print(f"{'PASS' if passed else 'FAIL'}  criterion {criterion}: {detail}")
    assert passed, detail


def test_criterion_01_closed_form_trace(oracle_state):
    start = time.perf_counter()
    times = np.linspace(-2.0, 2.0, 21)
    exact = arctan_trace(times)
    direct = at.expectation_trace(oracle_state, times, "forward")
    err_kernel = float(np.max(np.abs(direct - exact)))
    err_oracle = max(
        abs(at.mf_expectation_oracle(oracle_state, float(t)) - e) for t, e in zip(times, exact)
    )
    elapsed = time.perf_counter() - start
    report(
        1,
        err_kernel < 2e-4 and err_oracle < 1e-5 and elapsed < 30.0,
        f"kernel err {err_kernel:.2e} (<2e-4), tail-oracle err {err_oracle:.2e} (<1e-5), "
        f"{elapsed:.1f}s (<30s) at n=4096",
    )


def test_criterion_02_monotone_packet_trace(packet_state_fine):
    times = np.linspace(-0.5, 0.5, 201)
    trace = at.lyapunov_trace(packet_state_fine, times)
    steps = np.diff(trace.mf_values)
    mid = at.mf_expectation(packet_state_fine, 0.0)
    report(
        2,
        bool(np.all(steps < 1e-9)) and abs(mid - 0.5) < 1e-3,
        f"max step {steps.max():.2e} (<1e-9), <M_F(0)> = {mid:.6f} (0.5 +- 1e-3)",
    )


def test_criterion_03_completeness(profile_grid):
    grid = at.default_profile_grid(1024)
    times = np.linspace(-2.0, 2.0, 5)
    worst = 0.0
    for k in range(100):
        state = at.random_smooth_state(grid, seed=9000 + k)
        for t in times:
            worst = max(worst, abs(at.completeness_defect(state, float(t))))
    report(3, worst < 1e-12, f"completeness defect {worst:.2e} (<1e-12) over 100 states x 5 times")


def test_criterion_04_oracle_triangulation(oracle_state, packet_state_fine):
    grid = at.default_profile_grid(4096)
    states = [oracle_state, packet_state_fine] + [
        at.random_smooth_state(grid, seed=7000 + k) for k in range(20)
    ]
    times = (-0.4, 0.0, 0.6)
    worst = 0.0
    for state in states:
        for t in times:
            a = at.mf_expectation(state, t)
            b = at.mf_expectation_oracle(state, t)
            c = at.mf_expectation_via_m(state, t)
            worst = max(worst, abs(a - b), abs(b - c), abs(a - c))
    report(4, worst < 1e-3, f"worst pairwise route disagreement {worst:.2e} (<1e-3)")


def test_criterion_05_m_density_closed_form(oracle_state):
    dist = at.to_m_representation(oracle_state)
    m = dist.mgrid.m_nodes
    sel = (m >= 0.05) & (m <= 0.95)
    dens_err = float(
        np.max(np.abs(dist.density_m("+")[sel] - 1.0 / (np.pi * np.sqrt(m[sel] * (1 - m[sel])))))
    )
    parseval = abs(dist.norm_squared() - oracle_state.norm_squared())
    report(
        5,
        dens_err < 1e-4 and parseval < 1e-6,
        f"density sup err {dens_err:.2e} (<1e-4), unitarity defect {parseval:.2e} (<1e-6)",
    )


def test_criterion_06_eigen_residuals():
    ms = (0.1, 0.3, 0.5, 0.7, 0.9)
    res = {}
    for n in (4096, 8192):
        grid = at.default_spectral_grid(n)
        kern = at.build_kernel(grid, "forward")
        res[n] = [at.eigen_residual(m, grid, kern) for m in ms]
    ok = max(res[4096]) < 1e-2 and all(f < c for c, f in zip(res[4096], res[8192]))
    report(
        6,
        ok,
        "residuals at n=4096: "
        + ", ".join(f"{m}:{r:.1e}" for m, r in zip(ms, res[4096]))
        + " (<1e-2, all decreasing at n=8192)",
    )


def test_criterion_07_frames(tmp_path):
    import json

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_n": 4096, "m_size": 32768}))
    out = str(tmp_path / "frames.csv")
    assert main(["frames", "--config", str(cfg), "--out", out]) == 0
    mfs, moments, blocks = [], [], 0
    for line in open(out):
        if line.startswith("# block: m"):
            blocks += 1
        elif line.startswith("# first_moment:"):
            moments.append(float(line.split(":")[1]))
        elif line.startswith("# mf:"):
            mfs.append(float(line.split(":")[1]))
    cross = max(abs(a - b) for a, b in zip(mfs[1::2], moments))
    ok = blocks == 5 and cross < 1e-3 and moments[-1] < moments[0]
    report(
        7,
        ok,
        f"5 frames emitted, first-moment cross-check {cross:.2e} (<1e-3), "
        f"mean m {moments[0]:.4f} -> {moments[-1]:.4f} (shift toward 0)",
    )


def test_criterion_08_scattering_equivalence(packet_state):
    times = np.linspace(-0.3, 0.3, 11)
    worst_defect, worst_overlap = 0.0, 1.0
    for lam in (0.0, 1.0, 2.0):
        model = at.delta_model(lam)
        worst_defect = max(worst_defect, at.equivalence_defect(packet_state, model, times))
        worst_overlap = min(worst_overlap, at.asymptotic_overlap(packet_state, model, -50.0))
    report(
        8,
        worst_defect < 1e-10 and worst_overlap > 0.99,
        f"equivalence defect {worst_defect:.2e} (<1e-10), overlap(-50) {worst_overlap:.4f} (>0.99)",
    )


def test_criterion_09_galapon_witness():
    op = at.galapon_T([0.0, 1.0])
    state = np.array([1.0, 1.0]) / np.sqrt(2.0)
    times = np.linspace(0.0, 2.0 * np.pi, 257)
    wt = at.lyapunov_violation_witness(op, state, times)
    dev = float(np.max(np.abs(wt.values + np.sin(times))))
    nodes = np.linspace(1.0, 2.0, 9)
    h = nodes[1] - nodes[0]
    grid = at.EnergyGrid(nodes, np.full(nodes.size, h), "linear", 1.0, 2.0)
    prop = float(
        np.max(np.abs(at.discretize_symmetric(grid).matrix - (h / np.pi) * at.galapon_T(nodes).matrix))
    )
    report(
        9,
        dev < 1e-12 and wt.non_monotone and prop < 1e-12,
        f"two-level trace dev {dev:.2e} (<1e-12), non-monotone flagged, "
        f"proportionality dev {prop:.2e} (<1e-12)",
    )


def test_criterion_10_mpc_check(oracle_state):
    d_expect, noncomm = at.mpc_commutator_defect(oracle_state)
    report(
        10,
        abs(d_expect - 1.0 / np.pi) < 1e-3 and noncomm > 0.0,
        f"rate {d_expect:.6f} (1/pi +- 1e-3), noncommutativity {noncomm:.3f} (>0)",
    )


def test_criterion_11_backward_running(packet_state_fine):
    prob = at.backward_running_probability(packet_state_fine, (0.4, 0.6), (0.7, 0.9), 0.05)
    report(11, prob > 1e-6, f"backward-running probability {prob:.3e} (>1e-6)")


def test_criterion_12_check_suite_runtime():
    start = time.perf_counter()
    results = run_checks()
    elapsed = time.perf_counter() - start
    failed = [r.name for r in results if not r.passed]
    report(
        12,
        not failed and elapsed < 300.0,
        f"{len(results)} checks in {elapsed:.0f}s (<300s)"
        + (f"; failed: {failed}" if failed else ""),
    )
