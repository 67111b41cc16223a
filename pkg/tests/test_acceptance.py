"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
when output capture is on.
"""
import math
import time
import warnings

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.optimize import bisect

from antipt import experiments
from antipt.cli import main
from antipt.dynamics import (
    DivergenceError,
    IntegratorConfig,
    analytic_resonator_solution,
    count_zero_crossings,
    linearize_optomech,
    locate_branch_emergence,
    optomech_max_rate,
    simulate_adiabatic,
    simulate_optomech,
    simulate_resonator,
    slowest_decay_rate,
)
from antipt.optomech import (
    OptomechParams,
    critical_drive,
    effective_potential,
    ep_drives,
    intracavity_amplitude,
    locate_EPs,
    restoring_force,
    ssb_displacement,
)
from antipt.resonator import (
    DampingPhase,
    ResonatorParams,
    build_hamiltonian,
    check_anti_pt,
    eigen_numeric,
    solve_frequency,
)
from antipt.sensing import (
    AsymptoticRangeWarning,
    finite_difference_sensitivity,
    minimum_resolvable_mass,
    sensitivity_analytic,
    splitting_exact,
    splitting_near_EP,
)

DESK = OptomechParams(ResonatorParams.from_quality_factor(1.0, 100.0), g=-0.01, gamma_c=50.0)


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_01_anti_pt_identity(capsys):
    worst = [0.0]
    count = [0]

    @settings(max_examples=1000, deadline=None, derandomize=True, database=None)
    @given(st.floats(-6, 6), st.floats(-6, 6))
    def draw(lw, lg):
        H = build_hamiltonian(ResonatorParams(10.0**lw, 10.0**lg))
        rel = check_anti_pt(H) / H.max_abs()
        worst[0] = max(worst[0], rel)
        count[0] += 1
        assert rel <= 1e-12

    try:
        draw()
        ok = True
    except AssertionError:
        ok = False
    report(capsys, 1, ok and count[0] >= 1000,
           f"{count[0]} draws over 12 decades, worst residual/|H|max = {worst[0]:.2e} (limit 1e-12)")


def test_02_phase_diagram(capsys):
    ratios = np.linspace(0.0, 4.0, 401)
    bad_re = bad_im = 0
    for r in ratios:
        sol = solve_frequency(1.0, r)
        if r > 2 and (sol.lambda_plus.real != 0 or sol.lambda_minus.real != 0):
            bad_re += 1
        if r < 2 and not (sol.lambda_plus.imag == sol.lambda_minus.imag == -0.5 * r):
            bad_im += 1

    def gap(r):
        sol = eigen_numeric(build_hamiltonian(ResonatorParams(1.0, r)))
        d = sol.lambda_plus - sol.lambda_minus
        return abs(d.real) - abs(d.imag)

    ep = bisect(gap, 1.0, 3.0, xtol=1e-14)
    err = abs(ep - 2.0) / 2.0
    ep_row = solve_frequency(1.0, 2.0).phase is DampingPhase.CRITICAL_DAMPING
    report(capsys, 2, bad_re == 0 and bad_im == 0 and err <= 1e-9 and ep_row,
           f"Re!=0 above EP: {bad_re}, Im!=-gamma/2 below EP: {bad_im}, "
           f"bisected EP ratio {ep:.15f} (rel err {err:.1e})")


def test_03_trajectory_dichotomy(capsys):
    ratios = np.geomspace(0.1, 10.0, 50)
    counts = []
    for r in ratios:
        params = ResonatorParams(1.0, r)
        horizon = 20.0 / slowest_decay_rate(params)
        cfg = IntegratorConfig(0.09 / max(1.0, r), horizon)
        counts.append(count_zero_crossings(simulate_resonator(params, 1.0, 0.0, cfg)))
    counts = np.array(counts)
    over = counts[ratios >= 2]
    under = counts[ratios <= 1.9]
    report(capsys, 3, bool(np.all(over == 0) and np.all(under >= 1)),
           f"max crossings for ratio>=2: {over.max()}, min crossings for ratio<=1.9: {under.min()}")


def test_04_integrator_order(capsys):
    params = ResonatorParams(1.0, 0.5)

    def end_error(h):
        traj = simulate_resonator(params, 1.0, 0.0, IntegratorConfig(h, 20.0, 10**7))
        Q, P = analytic_resonator_solution(params, 1.0, 0.0, traj.t[-1])
        return math.hypot(traj.Q[-1] - Q, traj.P[-1] - P), math.hypot(Q, P)

    e1, _ = end_error(0.08)
    e2, _ = end_error(0.04)
    factor = e1 / e2
    e_fine, norm = end_error(1e-3)
    rel = e_fine / norm
    report(capsys, 4, 14 <= factor <= 18 and rel <= 1e-6,
           f"halving factor (h=0.08->0.04) {factor:.2f}, end-state rel err at h=1e-3: {rel:.1e}")


def test_05_steady_state_oracle(capsys):
    start = time.perf_counter()
    omega_c = critical_drive(DESK)

    sub = DESK.with_drive(0.5 * omega_c)
    cfg = IntegratorConfig(0.0039, 2000.0, 1000, max_rate=optomech_max_rate(sub))
    q_sub = abs(simulate_optomech(sub, 0.1, 0.0, 0j, cfg).Q[-1])
    sub_ok = q_sub <= 1e-4

    sup = DESK.with_drive(1.2 * omega_c)
    q_s = ssb_displacement(sup)
    Q0 = 0.99 * q_s
    cfg = IntegratorConfig(0.0039, 2000.0, 1000, max_rate=optomech_max_rate(sup))
    try:
        traj = simulate_optomech(sup, Q0, 0.0, complex(intracavity_amplitude(sup, Q0)), cfg)
        tail = traj.Q[-50:]
        sup_err = float(np.max(np.abs(tail - q_s)) / q_s)
        sup_text = f"max rel deviation over last 50 samples {sup_err:.2e}"
    except DivergenceError as exc:
        sup_err = math.inf
        sup_text = f"diverged at t = {exc.t:.1f}"
    sup_ok = sup_err <= 1e-3

    adiabatic = simulate_adiabatic(sup, 0.1, 0.0, IntegratorConfig(0.05, 3000.0, 1000))
    ad_err = abs(adiabatic.Q[-1] - q_s) / q_s
    elapsed = time.perf_counter() - start
    report(capsys, 5, sub_ok and sup_ok and elapsed <= 10,
           f"0.5*Omega_c |Q_end| = {q_sub:.1e}; 1.2*Omega_c full model {sup_text} "
           f"(adiabatic model rel err {ad_err:.1e}); {elapsed:.1f} s")


def test_06_pitchfork_and_stability(capsys):
    omega_c = critical_drive(DESK)
    origin_growth, branch_growth = [], []
    for ratio in (1.01, 1.2, 2.0, 5.0):
        p = DESK.with_drive(ratio * omega_c)
        origin_growth.append(np.max(linearize_optomech(p, 0.0, intracavity_amplitude(p, 0.0)).real))
        q = ssb_displacement(p)
        for sign in (1.0, -1.0):
            branch_growth.append(np.max(linearize_optomech(p, sign * q, intracavity_amplitude(p, q)).real))
    emergence = locate_branch_emergence(DESK)
    err = abs(emergence - omega_c) / omega_c
    origin_ok = min(origin_growth) > 0
    branch_ok = max(branch_growth) <= 0
    report(capsys, 6, origin_ok and branch_ok and err <= 1e-6,
           f"origin max Re > 0: {origin_ok} (min {min(origin_growth):.2e}); "
           f"SSB branch max Re = {max(branch_growth):+.3e} (need <= 0); "
           f"branch emergence vs Omega_c rel err {err:.1e}")


def test_07_ep_locations(capsys):
    worst1 = worst2 = 0.0
    disc_ok = True
    notes = []
    for gam in (0.01, 0.05, 0.1):
        p = OptomechParams(ResonatorParams(1.0, gam), g=-0.01, gamma_c=50.0)
        eps = locate_EPs(p)
        oc = eps.Omega_c
        ep1 = oc * math.sqrt(1 - (gam / 2) ** 2)
        ep2 = oc / math.sqrt(1 - (gam / 4) ** 2)
        worst1 = max(worst1, abs(eps.Omega_EP1_bisect - ep1) / ep1)
        worst2 = max(worst2, abs(eps.Omega_EP2_bisect - ep2) / ep2)
        measured = eps.Omega_EP2_printed / eps.Omega_EP2_bisect - 1
        predicted = 3.0 / 32.0 * gam**2
        disc_ok &= abs(measured / predicted - 1) <= 0.01
        notes.append(f"{measured / predicted:.4f}")
    report(capsys, 7, worst1 <= 1e-10 and worst2 <= 1e-10 and disc_ok,
           f"EP1 rel err {worst1:.1e}, EP2 rel err {worst2:.1e}; printed-EP2 offset / "
           f"(3/32)(gamma/omega)^2 = {', '.join(notes)} for gamma/omega = 0.01, 0.05, 0.1")


def test_08_sensitivity(capsys):
    omega_c, ep1, ep2 = ep_drives(DESK)
    band = 1e-3 * omega_c
    drives = np.concatenate([np.linspace(0.0, ep1 - band, 50), np.linspace(ep2 + band, 3 * omega_c, 50)])
    worst = 0.0
    for drive in drives:
        p = DESK.with_drive(float(drive))
        a = sensitivity_analytic(p).plus
        fd, _ = finite_difference_sensitivity(p)
        worst = max(worst, abs(fd - a) / abs(a))
    report(capsys, 8, worst <= 1e-4 and len(drives) == 100,
           f"{len(drives)} drives outside EP bands, worst analytic/FD rel diff {worst:.1e}")


def test_09_square_root_law(capsys):
    _, ep1, _ = ep_drives(DESK)
    p = DESK.with_drive(ep1)
    d = 1e-6 * DESK.gamma_m
    ratio = splitting_exact(p, 4 * d).omega_plus / splitting_exact(p, d).omega_plus

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        hq = OptomechParams(ResonatorParams(1.0, 1e-4), g=-0.01, gamma_c=50.0)
    _, e1, e2 = ep_drives(hq)
    d = 1e-4 * hq.gamma_m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticRangeWarning)
        near1 = splitting_near_EP(hq.with_drive(e1), d, "EP1").omega_plus
        near2 = splitting_near_EP(hq.with_drive(e2), -d, "EP2").omega_plus
    exact1 = splitting_exact(hq.with_drive(e1), d).omega_plus
    exact2 = splitting_exact(hq.with_drive(e2), -d).omega_plus
    err1, err2 = abs(near1 / exact1 - 1), abs(near2 / exact2 - 1)
    report(capsys, 9, abs(ratio / 2 - 1) <= 0.02 and err1 <= 0.01 and err2 <= 0.01,
           f"S(4d)/S(d) = {ratio:.4f}; near-EP vs exact rel err EP1 {err1:.1e}, EP2 {err2:.1e}")


def test_10_mass_headline(capsys):
    r = ResonatorParams.from_quality_factor(2 * math.pi * 8.7e6, 7e5, mass=3.6e-15)
    m_min = minimum_resolvable_mass(r)
    exact = r.mass / (8 * r.quality_factor**2)
    grams = m_min * 1e3
    off = abs(grams / 1e-24 - 1)
    report(capsys, 10, math.isclose(m_min, exact, rel_tol=1e-15) and off <= 0.10,
           f"minimum resolvable mass {grams:.3e} g ({100 * off:.1f}% from 1e-24 g)")


def test_11_potential_force(capsys):
    p = DESK.with_drive(1.2 * critical_drive(DESK))
    q_s = ssb_displacement(p)
    Q = np.linspace(-2 * q_s, 2 * q_s, 2001)
    h = 1e-4 * q_s
    dU = (effective_potential(p, Q + h) - effective_potential(p, Q - h)) / (2 * h)
    force = restoring_force(p, Q)
    scale = np.abs(p.omega_m * Q) + np.abs(4 * p.g * intracavity_amplitude(p, Q) * np.conj(intracavity_amplitude(p, Q)) * Q)
    scale = scale.real
    err = np.abs(dU - force)
    rel = np.where(scale > 0, err / np.where(scale > 0, scale, 1.0), err)
    report(capsys, 11, float(rel.max()) <= 1e-6,
           f"max |dU/dQ - (omega Q + 4g|alpha|^2 Q)| / term scale = {rel.max():.1e} over 2001 points")


def test_12_determinism(capsys, tmp_path):
    mismatched = []
    for name in experiments.RUNNERS:
        a, b = tmp_path / name / "a", tmp_path / name / "b"
        codes = main([name, "--out", str(a)]), main([name, "--out", str(b)])
        if codes != (0, 0):
            mismatched.append(f"{name} exit {codes}")
            continue
        for f in sorted(a.iterdir()):
            if f.read_bytes() != (b / f.name).read_bytes():
                mismatched.append(f"{name}/{f.name}")
    report(capsys, 12, not mismatched,
           f"{len(experiments.RUNNERS)} experiments rerun, mismatches: {mismatched or 'none'}")
