"""Acceptance suite: ten numbered end-to-end claims, one test per claim.

Each test prints a single ``[ACCEPTANCE] criterion NN`` line with the
measured figures so a plain ``pytest -v -s tests/test_acceptance.py`` reads
as a report.  Two claims about the three-lobe snapshot and its beat
spectrum are not attainable from the three-term large-time form; those
tests measure everything, report the discrepancy, and fail deliberately
rather than loosening the thresholds (details in the failure messages).
"""

import json
import os
import time

import numpy as np
import pytest
from scipy.signal import find_peaks

from movingwell.analysis import (
    fit_power_law,
    identify_spectral_peaks,
    spectrum,
)
from movingwell.analytic import (
    IdentityCase,
    WellParams,
    _eigenstate_amp_pair,
    _propagate_rotated,
    asymptotic_terms,
    characteristic_frequencies,
    exact_wavefunction_closed,
    exact_wavefunction_quadrature,
    integral_identity_residual,
    moving_bound_eigenstate,
    survival_overlap_quadrature,
    survival_probability,
)
from movingwell.cli import cmd_survival, cmd_validate
from movingwell.oracle import (
    DeltaModel,
    GridSpec,
    WavefunctionField,
    default_grid,
    evolve,
    ground_state_on_grid,
    norm,
    overlap,
)
from movingwell.specfun import faddeyeva, moshinsky


def _report(number, title, verdict, details):
    print(f"[ACCEPTANCE] criterion {number:02d} {title}: {verdict} "
          f"({details})")


# ---------------------------------------------------------------------------
# 1. special functions vs the arbitrary-precision oracle
# ---------------------------------------------------------------------------

def test_criterion_01_special_functions(faddeyeva_grid_path):
    t0 = time.perf_counter()
    with np.load(faddeyeva_grid_path) as data:
        re_axis = data["re_axis"]
        im_axis = data["im_axis"]
        ref = data["values"]
    z = re_axis[None, :] + 1j * im_axis[:, None]
    rel = np.abs(faddeyeva(z) - ref) / np.abs(ref)
    grid_err = float(rel.max())

    # reflection w(z) = 2 exp(-z^2) - w(-z), checked where exp(-z^2)
    # stays well inside double range
    rng = np.random.default_rng(20240817)
    pts = rng.uniform(-3.0, 3.0, (40, 2))
    zs = pts[:, 0] + 1j * pts[:, 1]
    refl = np.abs(faddeyeva(zs) - (2.0 * np.exp(-zs * zs) - faddeyeva(-zs)))
    refl_err = float(refl.max())

    sum_err = 0.0
    for x, k, t in ((0.7, 1.3, 0.9), (-2.1, 0.4, 2.5), (3.0, -1.1, 0.1),
                    (12.0, 2.0, 4.0), (-5.0, -3.0, 8.0)):
        lhs = moshinsky(x, k, t) + moshinsky(-x, -k, t)
        rhs = np.exp(1j * (k * x - 0.5 * k * k * t))
        sum_err = max(sum_err, abs(lhs - rhs))
    elapsed = time.perf_counter() - t0

    _report(1, "special functions", "PASS",
            f"grid max rel {grid_err:.2e} <= 1e-10, reflection "
            f"{refl_err:.2e} and Moshinsky sum {sum_err:.2e} <= 1e-9, "
            f"{elapsed:.1f} s < 10 s")
    assert grid_err <= 1e-10
    assert refl_err <= 1e-9
    assert sum_err <= 1e-9
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# 2. eigenstate invariance under the kernel quadrature
# ---------------------------------------------------------------------------

def test_criterion_02_eigenstate_invariance(tmp_path):
    p = WellParams(gamma=1.0, v=0.5)
    amp_left, amp_right = _eigenstate_amp_pair(p)
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        for xi in np.linspace(-4.0, 5.0, 11):
            prop = _propagate_rotated(float(xi), float(t), p, amp_left,
                                      amp_right)
            ref = moving_bound_eigenstate(float(xi), float(t), p)
            worst = max(worst, abs(prop - ref))

    # the sign/argument resolution this check settles must ship with the
    # data: every manifest carries it
    assert cmd_survival(1.0, [0.5], str(tmp_path)) == 0
    with open(tmp_path / "run.manifest.json") as fh:
        conventions = json.load(fh)["conventions"]
    assert "+0.5i*gamma" in conventions["moshinsky_wavenumber"]
    assert conventions["moshinsky_time"] == "2*(t - t_src)"

    _report(2, "eigenstate invariance", "PASS",
            f"max abs dev {worst:.2e} <= 1e-5 at t in {{0.5, 1, 2}}; "
            f"resolution recorded in manifest")
    assert worst <= 1e-5


# ---------------------------------------------------------------------------
# 3. three-way agreement at the transient-regime parameters
# ---------------------------------------------------------------------------

def test_criterion_03_three_way_agreement():
    t0 = time.perf_counter()
    p = WellParams(gamma=0.7, v=1.5)
    x41 = np.linspace(-2.0, 4.0, 41)
    closed = exact_wavefunction_closed(x41, 1.0, p)
    quad = np.array([exact_wavefunction_quadrature(float(x), 1.0, p)
                     for x in x41])
    maxabs = float(np.max(np.abs(closed - quad)))

    grid, model = default_grid(p, 1.0, sigma=0.002 / p.gamma, margin=20.0)
    state = ground_state_on_grid(grid, model)
    final = evolve(state, model, p, 1.0, sample_every=10**9)[-1]
    closed_grid = exact_wavefunction_closed(grid.x, 1.0, p)
    l2 = float(np.sqrt(np.trapezoid(np.abs(final.values - closed_grid) ** 2,
                                    dx=grid.dx)))
    elapsed = time.perf_counter() - t0

    _report(3, "three-way agreement", "PASS",
            f"closed vs quadrature max abs {maxabs:.2e} <= 1e-6, vs "
            f"Crank-Nicolson L2 {l2:.2e} <= 1e-3, {elapsed:.0f} s < 120 s")
    assert maxabs <= 1e-6
    assert l2 <= 1e-3
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# 4. survival probability, formula and long-time oracle
# ---------------------------------------------------------------------------

def test_criterion_04_survival():
    worst = 0.0
    for theta in (0.0, 0.5, 1.0, 2.0, 4.0):
        p = WellParams(gamma=1.3, v=1.3 * theta)
        worst = max(worst, abs(survival_probability(p)
                               - survival_overlap_quadrature(p)))

    devs = {}
    for theta in (1.0, 2.0):
        p = WellParams(gamma=1.0, v=theta)
        t_end = 5.0 / (p.gamma * theta)
        grid, model = default_grid(p, t_end)
        state = ground_state_on_grid(grid, model)
        final = evolve(state, model, p, t_end, sample_every=10**9)[-1]
        eig = WavefunctionField(
            grid=grid, t=final.t,
            values=moving_bound_eigenstate(grid.x, final.t, p))
        frac = abs(overlap(eig, final)) ** 2
        target = survival_probability(p)
        devs[theta] = abs(frac - target) / target

    _report(4, "survival probability", "PASS",
            f"formula vs overlap {worst:.2e} <= 1e-8; oracle trapped "
            f"fraction off by {devs[1.0]:.2%} (theta=1) and "
            f"{devs[2.0]:.2%} (theta=2), both <= 2%")
    assert worst <= 1e-8
    assert devs[1.0] <= 0.02
    assert devs[2.0] <= 0.02


# ---------------------------------------------------------------------------
# 5. three-lobe snapshot (gamma=10, v=40, t=0.05) -- NOT ATTAINED
# ---------------------------------------------------------------------------

def test_criterion_05_three_lobe_snapshot():
    t0 = time.perf_counter()
    p = WellParams(gamma=10.0, v=40.0)
    t = 0.05
    x = np.linspace(-1.0, 5.0, 6001)
    psi = exact_wavefunction_closed(x, t, p)
    dens = np.abs(psi) ** 2
    idx, _ = find_peaks(dens, prominence=1e-4)
    targets = np.array([0.0, 2.0, 4.0])
    maxima = np.array([x[idx[np.argmin(np.abs(x[idx] - target))]]
                       for target in targets])

    terms = asymptotic_terms(x, t, p)
    approx = terms.free + terms.well + terms.double_velocity
    rel_l2 = float(np.sqrt(np.trapezoid(np.abs(approx - psi) ** 2, x)
                           / np.trapezoid(dens, x)))
    elapsed = time.perf_counter() - t0

    # what does hold: three separated maxima exist, the first two land on
    # x = 0 and x = vt
    assert idx.size >= 3
    assert abs(maxima[0] - 0.0) <= 0.1
    assert abs(maxima[1] - 2.0) <= 0.1
    assert elapsed < 60.0

    ok = abs(maxima[2] - 4.0) <= 0.1 and rel_l2 <= 0.10
    verdict = "PASS" if ok else "FAIL"
    _report(5, "three-lobe snapshot", verdict,
            f"maxima at x = {maxima[0]:.4f}, {maxima[1]:.4f}, "
            f"{maxima[2]:.4f} vs 0/2/4 +- 0.1; three-term rel L2 "
            f"{rel_l2:.3f} vs <= 0.10")
    if not ok:
        pytest.fail(
            "the exact density's third maximum sits at "
            f"x = {maxima[2]:.4f}, not 4.0 +- 0.1, and the three-term "
            f"large-time form misses the exact profile by {rel_l2:.1%} "
            "relative L2 over [-1, 5].  At t = 0.05 the forerunner lobe "
            "has not yet detached (v*t*gamma = 2 is not >> 1), so the "
            "claimed large-time decomposition does not describe this "
            "snapshot; no tolerance consistent with the claim admits the "
            "exact curve.")


# ---------------------------------------------------------------------------
# 6. peak-decay behavior (gamma=10, v=20)
# ---------------------------------------------------------------------------

def test_criterion_06_peak_decay():
    p = WellParams(gamma=10.0, v=20.0)
    limit = (p.gamma / 2.0) / (1.0 + (p.v / (2 * p.gamma)) ** 2) ** 2
    assert limit == 1.25

    dv = np.array([
        abs(exact_wavefunction_closed(p.v * t, float(t), p)) ** 2
        for t in np.linspace(1.0, 3.0, 65)])
    dv_dev = float(np.max(np.abs(dv - limit)) / limit)

    times = np.linspace(0.2, 1.0, 513)
    d0 = np.array([
        abs(exact_wavefunction_closed(0.0, float(t), p)) ** 2
        for t in times])
    d2v = np.array([
        abs(exact_wavefunction_closed(2.0 * p.v * t, float(t), p)) ** 2
        for t in times])
    alpha0, _ = fit_power_law(times, d0, (0.2, 1.0))
    alpha2, _ = fit_power_law(times, d2v, (0.2, 1.0), envelope=True)

    _report(6, "peak decay", "PASS",
            f"dv within {dv_dev:.2%} of 1.25 for t >= 1; exponents "
            f"{alpha0:.4f} (x=0, -1 +- 0.05) and {alpha2:.4f} "
            f"(x=2vt envelope, -1 +- 0.1)")
    assert dv_dev <= 0.02
    assert abs(alpha0 - (-1.0)) <= 0.05
    assert abs(alpha2 - (-1.0)) <= 0.1


# ---------------------------------------------------------------------------
# 7. density beat spectra (gamma=10, v=20) -- C peak NOT ATTAINED
# ---------------------------------------------------------------------------

def _model_trace(p, times, which):
    """|three-term model|^2 at x = 0, vt or 2vt with the double-velocity
    phase read as -v^2 t/4 (the quarter-phase reading; taking -v^2 t
    instead puts every cross term away from the four characteristic
    frequencies)."""
    factor = {"d0": 0.0, "dv": 1.0, "d2v": 2.0}[which]
    out = np.empty(times.size)
    for i, t in enumerate(times):
        x = factor * p.v * t
        terms = asymptotic_terms(x, float(t), p)
        model = (terms.free + terms.well
                 + terms.double_velocity * np.exp(0.75j * p.v**2 * t))
        out[i] = abs(model) ** 2
    return out


def test_criterion_07_beat_spectra():
    p = WellParams(gamma=10.0, v=20.0)
    f = characteristic_frequencies(p)
    times = 0.5 + 8.0 * np.arange(2048) / 2047.0   # duration 8 >= 4

    labels = {}
    for comp in ("d0", "dv", "d2v"):
        s = spectrum(times, _model_trace(p, times, comp), p=p, component=comp)
        labels[comp] = identify_spectral_peaks(s, p)
    df = s.df

    exact_labels = {}
    for comp, col in (("d0", 0.0), ("dv", 1.0), ("d2v", 2.0)):
        dens = np.array([
            abs(exact_wavefunction_closed(col * p.v * t, float(t), p)) ** 2
            for t in times])
        exact_labels[comp] = identify_spectral_peaks(
            spectrum(times, dens, p=p, component=comp), p)

    # what does hold, model trace: A and B in dv; d0/d2v carry only the
    # f2 line (D resp. E)
    assert labels["dv"].get("A", np.inf) == pytest.approx(f.f1, abs=2 * df)
    assert labels["dv"].get("B", np.inf) == pytest.approx(f.f3, abs=2 * df)
    assert set(labels["d0"]) == {"D"}
    assert labels["d0"]["D"] == pytest.approx(f.f2, abs=2 * df)
    assert set(labels["d2v"]) == {"E"}
    assert labels["d2v"]["E"] == pytest.approx(f.f2, abs=2 * df)

    ok = "C" in labels["dv"]
    verdict = "PASS" if ok else "FAIL"
    _report(7, "beat spectra", verdict,
            f"model labels {labels}; exact-trace labels {exact_labels}; "
            f"C (f4 = {f.f4:.3f}) absent from dv")
    if not ok:
        pytest.fail(
            "the dv spectrum shows A and B but no C peak at "
            f"f4 = {f.f4:.3f}.  With three interfering components the "
            "pairwise beats are f1, f3 and f1+f3 = f2 only; "
            "f4 = 2*f2 - f1 is not among them, so a C peak cannot arise "
            "from the three-term form (a fourth component would "
            "be needed).  The exact traces confirm: the trapped-lobe "
            f"trace beats at f1 alone ({exact_labels['dv']}), and the "
            "x = 0 / x = 2vt traces are beat-free "
            f"({exact_labels['d0']}, {exact_labels['d2v']}).")


# ---------------------------------------------------------------------------
# 8. integral identity across the time range
# ---------------------------------------------------------------------------

def test_criterion_08_integral_identity():
    combos = ((-0.6, 0.9, 0.3), (-1.1, -0.5, -1.2), (-0.25, 1.4, 2.2),
              (-0.8, 0.2, 0.0), (-0.4, -1.3, 1.7))
    cases = [IdentityCase(k=1j * k_im, v0=v0, t=t, x=x)
             for t in (0.1, 0.5, 2.0, 10.0)
             for k_im, v0, x in combos]
    assert len(cases) == 20
    residuals = np.array([integral_identity_residual(case)
                          for case in cases])
    worst = float(residuals.max())
    _report(8, "integral identity", "PASS",
            f"worst residual {worst:.2e} <= 1e-6 over 20 cases, "
            f"t in [0.1, 10]")
    assert worst <= 1e-6


# ---------------------------------------------------------------------------
# 9. oracle hygiene: drift, convergence order, ground-state fidelity
# ---------------------------------------------------------------------------

def test_criterion_09_oracle_hygiene():
    # norm drift per step over a transient-regime run
    p = WellParams(gamma=0.7, v=1.5)
    grid, model = default_grid(p, 1.0)
    state = ground_state_on_grid(grid, model)
    steps = int(round(1.0 / grid.dt))
    final = evolve(state, model, p, 1.0, sample_every=10**9)[-1]
    drift_per_step = abs(norm(final) - 1.0) / steps

    # self-convergence order on a joint (dx, dt) ladder against a much
    # finer reference; a wide well keeps the potential smooth on every rung
    pw = WellParams(gamma=0.2, v=0.0)
    wide = DeltaModel(width=0.5, strength=-0.2)

    def _run(dx, dt):
        n = int(round(24.0 / dx)) + 1
        g = GridSpec(x_min=-12.0, x_max=12.0, n_points=n, dt=dt)
        packet = np.exp(-(g.x + 2.0) ** 2 / 2.0 + 2.0j * g.x)
        packet /= np.sqrt(np.trapezoid(np.abs(packet) ** 2, dx=g.dx))
        start = WavefunctionField(grid=g, t=0.0, values=packet)
        return g, evolve(start, wide, pw, 1.0, sample_every=10**9)[-1]

    g_ref, ref = _run(0.0125, 1.0 / 256.0)
    errs, dts = [], []
    for dx, dt in ((0.2, 1.0 / 16.0), (0.1, 1.0 / 32.0),
                   (0.05, 1.0 / 64.0)):
        g_i, out = _run(dx, dt)
        stride = int(round(dx / 0.0125))
        diff = out.values - ref.values[::stride]
        errs.append(np.sqrt(np.trapezoid(np.abs(diff) ** 2, dx=g_i.dx)))
        dts.append(dt)
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])

    # ground-state fidelity of the regularized well at sigma = 0.01/gamma
    gf = GridSpec(x_min=-25.0, x_max=25.0, n_points=10001, dt=0.0025)
    mf = DeltaModel(width=0.01, strength=-1.0)
    fid = abs(overlap(ground_state_on_grid(gf, mf),
                      ground_state_on_grid(gf, mf,
                                           method="imaginary_time"))) ** 2

    _report(9, "oracle hygiene", "PASS",
            f"norm drift {drift_per_step:.1e}/step <= 1e-9; convergence "
            f"order {order:.2f} in 2.0 +- 0.2; ground-state fidelity "
            f"{fid:.6f} >= 0.999")
    assert drift_per_step <= 1e-9
    assert 1.8 <= order <= 2.2
    assert fid >= 0.999


# ---------------------------------------------------------------------------
# 10. determinism of the full validation battery
# ---------------------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    reports, manifests = [], []
    for name in ("first", "second"):
        out = tmp_path / name
        out.mkdir()
        assert cmd_validate("full", str(out)) == 0
        reports.append((out / "validate_report.csv").read_bytes())
        with open(out / "run.manifest.json") as fh:
            manifests.append(json.load(fh))
    elapsed = time.perf_counter() - t0

    for m in manifests:
        m.pop("duration_s")
    _report(10, "determinism", "PASS",
            f"full battery passed twice with byte-identical reports, "
            f"{elapsed:.0f} s < 600 s")
    assert reports[0] == reports[1]
    assert manifests[0] == manifests[1]
    assert elapsed < 600.0
