"""Acceptance checks for the display-distortion study.

One test per criterion, each printing a single "criterion NN: PASS/FAIL"
verdict line before asserting so the verdict is visible either way.  The
sampled estimates are deterministic for a given seed, so these tests are
stable reruns of frozen configurations, not flaky statistics.
"""
import json
import math
import time

import numpy as np
import pytest

from crslab import cli
from crslab.control import ServoSpec, step_servos
from crslab.distortion import (
    SweepConfig,
    fit_power_law,
    lattice_for,
    position_distortion,
    shape_distortion,
)
from crslab.fields import make_lattice
from crslab.mechanics import (
    BeamSpec,
    FoundationSpec,
    LoadCase,
    collapse_index,
    critical_load,
    deflection_series,
    membrane_strain,
)
from crslab.reconstruct import ReconstructionModel

PIX = ReconstructionModel("pixel-only")
LIN = ReconstructionModel("linear")
CRS = ReconstructionModel("crs")

_PA_TO_NMM = 1e-6


def _verdict(num: int, checks):
    """Print one criterion verdict line, then assert every check.

    checks is a list of (ok, detail) pairs; the detail strings of failed
    checks end up in the verdict line.
    """
    bad = [detail for ok, detail in checks if not ok]
    if bad:
        line = f"criterion {num:02d}: FAIL ({'; '.join(bad)})"
    else:
        line = f"criterion {num:02d}: PASS"
    print(line)
    assert not bad, line


# ======================================================================
# 1: 1D pixel-only position distortion follows D_p = 0.25 d/l
# ======================================================================

def test_criterion_01_pixel_position_law_1d():
    cfg = SweepConfig()
    t0 = time.perf_counter()
    pts = []
    for dol in (0.1, 0.2, 0.3, 0.4, 0.5):
        lat = lattice_for("line", dol, cfg)
        est = position_distortion(PIX, lat, cfg.wavelength, cfg.n_position,
                                  cfg.seed)
        assert est.n_samples >= 10000
        pts.append((dol, est.value))
    fit = fit_power_law(pts)
    elapsed = time.perf_counter() - t0
    _verdict(1, [
        (abs(fit.coefficient - 0.250) <= 0.005,
         f"c={fit.coefficient:.5f} outside 0.250+-0.005"),
        (abs(fit.exponent - 1.00) <= 0.02,
         f"p={fit.exponent:.5f} outside 1.00+-0.02"),
        (elapsed <= 60.0, f"runtime {elapsed:.1f} s over 60 s"),
    ])


# ======================================================================
# 2: 1D pixel-only shape distortion, coefficient bracketed by the
#    small-d/l staircase asymptote
# ======================================================================

def test_criterion_02_pixel_shape_law_1d():
    cfg = SweepConfig()
    pts = []
    for dol in (0.1, 0.2, 0.3, 0.4, 0.5):
        lat = lattice_for("line", dol, cfg)
        est = shape_distortion(PIX, lat, cfg.wavelength, cfg.n_shape,
                               cfg.seed)
        pts.append((dol, est.value))
    fit = fit_power_law(pts)

    # staircase asymptote computed from scratch: a zero-order hold of the
    # raised-cosine bump phi(u) = (1 + cos 2 pi u)/2 has mean-square cell
    # error phi'^2 (d/l)^2 / 12, so D_s -> (d/l) sqrt(int phi'^2 / 12 int
    # phi^2) = pi/3
    us = np.linspace(-0.5, 0.5, 200001)
    phi = 0.5 * (1.0 + np.cos(2.0 * math.pi * us))
    dphi = -math.pi * np.sin(2.0 * math.pi * us)
    c_asym = math.sqrt(float(np.trapezoid(dphi ** 2, us))
                       / (12.0 * float(np.trapezoid(phi ** 2, us))))
    assert c_asym == pytest.approx(math.pi / 3.0, rel=1e-9)

    ratio = fit.coefficient / 0.994
    _verdict(2, [
        (0.90 <= ratio <= 1.10,
         f"c={fit.coefficient:.5f} outside [0.90, 1.10] x 0.994"),
        (abs(fit.exponent - 1.0) <= 0.05,
         f"p={fit.exponent:.5f} outside 1.00+-0.05"),
        (min(fit.coefficient, c_asym) <= 0.994 <= max(fit.coefficient, c_asym),
         f"0.994 not bracketed by fit c={fit.coefficient:.5f} and "
         f"asymptote {c_asym:.5f}"),
    ])


# ======================================================================
# 3: 1D linear-interpolation shape distortion follows c (d/l)^2
# ======================================================================

def test_criterion_03_linear_shape_law_1d():
    cfg = SweepConfig()
    pts = []
    for dol in (0.1, 0.2, 0.3, 0.4, 0.5):
        lat = lattice_for("line", dol, cfg)
        est = shape_distortion(LIN, lat, cfg.wavelength, cfg.n_shape,
                               cfg.seed)
        pts.append((dol, est.value))
    fit = fit_power_law(pts)
    _verdict(3, [
        (abs(fit.coefficient - 1.545) <= 0.15 * 1.545,
         f"c={fit.coefficient:.5f} outside 1.545+-15%"),
        (abs(fit.exponent - 2.0) <= 0.1,
         f"p={fit.exponent:.5f} outside 2.0+-0.1"),
    ])


# ======================================================================
# 4: 2D pixel-only position distortion matches the cell-geometry laws
# ======================================================================

def test_criterion_04_pixel_position_law_2d():
    cfg = SweepConfig()
    checks = []
    for kind, coef in (("square", 0.3825), ("hexagonal", 0.3510)):
        for dol in (0.1, 0.2, 0.3, 0.4, 0.5):
            lat = lattice_for(kind, dol, cfg)
            est = position_distortion(PIX, lat, cfg.wavelength, 200000,
                                      cfg.seed)
            rel = est.value / (coef * dol) - 1.0
            checks.append((abs(rel) <= 0.01,
                           f"{kind} d/l={dol:.1f} off by {100 * rel:+.2f}%"))
    _verdict(4, checks)


# ======================================================================
# 5: 2D pixel-only shape distortion laws (interior sampling)
# ======================================================================

def test_criterion_05_pixel_shape_law_2d():
    cfg = SweepConfig()
    checks = []
    for kind, target in (("square", 1.412), ("hexagonal", 1.318)):
        pts = []
        for dol in (0.1, 0.15, 0.2, 0.25, 0.3):
            lat = lattice_for(kind, dol, cfg)
            est = shape_distortion(PIX, lat, cfg.wavelength, cfg.n_shape,
                                   cfg.seed, region="interior")
            pts.append((dol, est.value))
        fit = fit_power_law(pts)
        checks.append((abs(fit.coefficient - target) <= 0.10 * target,
                       f"{kind} c={fit.coefficient:.4f} outside "
                       f"{target}+-10%"))
        checks.append((abs(fit.exponent - 1.0) <= 0.05,
                       f"{kind} p={fit.exponent:.4f} outside 1.00+-0.05"))
    _verdict(5, checks)


# ======================================================================
# 6: collapse index threshold is the mode-1 / mode-3 crossover
# ======================================================================

def test_criterion_06_collapse_index_identity():
    rng = np.random.default_rng(20240)
    exceptions = 0
    n_collapse = 0
    for _ in range(1000):
        e = 10.0 ** rng.uniform(8, 12)
        w = 10.0 ** rng.uniform(-1, 1.5)
        b = 10.0 ** rng.uniform(-2, 0.7)
        beta = 10.0 ** rng.uniform(-6, 0)
        d = 10.0 ** rng.uniform(0.3, 2)
        beam = BeamSpec(e, w, b, 10.0)
        fnd = FoundationSpec(beta)
        n1 = critical_load(1, beam, fnd, 3.0 * d)
        n3 = critical_load(3, beam, fnd, 3.0 * d)
        delta = collapse_index(e, beam.moment_of_inertia, beta, d)
        if (delta > 1.0) != (n1 < n3):
            exceptions += 1
        if delta < 1.0:
            n_collapse += 1
    _verdict(6, [
        (exceptions == 0, f"{exceptions} of 1000 draws broke the identity"),
        (100 <= n_collapse <= 900,
         f"draw ranges degenerate: {n_collapse}/1000 collapse"),
    ])


# ======================================================================
# 7: deflection series linearity, truncation, and zero-load limits
# ======================================================================

def test_criterion_07_series_limits():
    beam = BeamSpec(193e9, 4.0, 0.15, 450.0)
    d = 30.0
    l = 3.0 * d
    ei = beam.youngs_modulus * _PA_TO_NMM * beam.moment_of_inertia
    beta = 16.0 * math.pi ** 4 * ei / (27.0 * 1.7 * d ** 4)
    fnd = FoundationSpec(beta)
    n_min = min(critical_load(n, beam, fnd, l) for n in range(1, 11))
    load = LoadCase(1.0, 0.995 * n_min, l)
    xs = l * np.arange(1, 12) / 12.0

    y1 = deflection_series(xs, load, beam, fnd)
    y2 = deflection_series(xs, LoadCase(2.0, load.axial_load, l), beam, fnd)
    ypi = deflection_series(xs, LoadCase(math.pi, load.axial_load, l),
                            beam, fnd)
    linear_exact = bool(np.array_equal(y2, 2.0 * y1))
    linear_pi = bool(np.allclose(ypi, math.pi * y1, rtol=1e-12, atol=0.0))

    y32 = deflection_series(xs, load, beam, fnd, n_max=32)
    y64 = deflection_series(xs, load, beam, fnd, n_max=64)
    trunc = float(np.max(np.abs(y64 - y32)) / np.max(np.abs(y64)))

    y0 = deflection_series(xs, LoadCase(0.0, load.axial_load, l), beam, fnd)

    _verdict(7, [
        (linear_exact, "doubling P does not exactly double y"),
        (linear_pi, "scaling P by pi is not linear to 1e-12"),
        (trunc < 1e-6, f"32->64 term truncation rel err {trunc:.2e}"),
        (bool(np.all(y0 == 0.0)), "P=0 does not give the flat state"),
    ])


# ======================================================================
# 8: 1D CRS distortions against the pixel-law and linear-model bars
# ======================================================================

def test_criterion_08_crs_1d():
    cfg = SweepConfig()
    checks = []
    for dol in (1.0 / 3.0, 0.5):
        lat = lattice_for("line", dol, cfg)
        dp = position_distortion(CRS, lat, cfg.wavelength,
                                 cfg.n_position_crs, cfg.seed)
        bound = 0.25 * dol / 5.0
        checks.append((dp.value <= bound,
                       f"Dp(crs)={dp.value:.5f} > {bound:.5f} at "
                       f"d/l={dol:.2f}"))
        ds_c = shape_distortion(CRS, lat, cfg.wavelength, cfg.n_shape_crs,
                                cfg.seed)
        ds_l = shape_distortion(LIN, lat, cfg.wavelength, cfg.n_shape,
                                cfg.seed)
        checks.append((ds_c.value <= ds_l.value,
                       f"Ds(crs)={ds_c.value:.5f} > Ds(linear)="
                       f"{ds_l.value:.5f} at d/l={dol:.2f}"))
    _verdict(8, checks)


# ======================================================================
# 9: 2D CRS on a 19-pixel hexagonal display beats pixel-only by 40%
# ======================================================================

def test_criterion_09_crs_2d():
    cfg = SweepConfig()
    lat = make_lattice("hexagonal", 30.0, 60.0)
    assert lat.n_pixels == 19
    dp_pix = position_distortion(PIX, lat, cfg.wavelength, cfg.n_position,
                                 cfg.seed)
    dp_crs = position_distortion(CRS, lat, cfg.wavelength,
                                 cfg.n_position_crs, cfg.seed)
    ds_pix = shape_distortion(PIX, lat, cfg.wavelength, cfg.n_shape,
                              cfg.seed)
    ds_crs = shape_distortion(CRS, lat, cfg.wavelength, cfg.n_shape_crs,
                              cfg.seed)
    rp = dp_crs.value / dp_pix.value
    rs = ds_crs.value / ds_pix.value
    _verdict(9, [
        (rp <= 0.6, f"Dp ratio {rp:.3f} > 0.6"),
        (rs <= 0.6, f"Ds ratio {rs:.3f} > 0.6"),
    ])


# ======================================================================
# 10: membrane strain reference points
# ======================================================================

def test_criterion_10_membrane_strain():
    s42 = membrane_strain(4.0, 2.0)
    s12 = membrane_strain(1.0, 2.0)
    _verdict(10, [
        (0.38 <= s42 <= 0.44, f"strain(4,2)={s42:.4f} outside [0.38,0.44]"),
        (2.9 <= s12 <= 3.3, f"strain(1,2)={s12:.4f} outside [2.9,3.3]"),
    ])


# ======================================================================
# 11: servo stroke timing and slew-rate fuzz
# ======================================================================

def test_criterion_11_servo_limits():
    spec = ServoSpec()
    dt = 1.0

    state = np.zeros(1)
    steps = 0
    while state[0] < spec.travel:
        state = step_servos(state, np.array([spec.travel]), dt, spec)
        steps += 1
        assert steps < 1000
    stroke_ok = abs(steps * dt - 72.0) <= dt and state[0] == spec.travel

    rng = np.random.default_rng(11)
    state = np.zeros(8)
    max_move = spec.rate_mm_per_ms * dt
    worst_move = 0.0
    in_range = True
    for _ in range(10000):
        cmd = rng.uniform(-2.0, 11.0, size=8)
        new = step_servos(state, cmd, dt, spec)
        worst_move = max(worst_move, float(np.max(np.abs(new - state))))
        in_range = in_range and bool(np.all((new >= 0.0)
                                            & (new <= spec.travel)))
        state = new
    _verdict(11, [
        (stroke_ok, f"0->9 mm stroke took {steps} steps"),
        (worst_move <= max_move + 1e-12,
         f"slew violated: step of {worst_move:.6f} mm"),
        (in_range, "a channel left [0, travel]"),
    ])


# ======================================================================
# 12: every CLI command is byte-identical on rerun
# ======================================================================

def test_criterion_12_cli_determinism(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    trace.write_text("t_ms,x_f_mm,y_f_mm,z_f_mm\n0,7,-4,2\n40,5,0,3\n",
                     encoding="utf-8")
    vcfg = tmp_path / "v.json"
    vcfg.write_text(json.dumps({"experiment": "strain-table",
                                "cell_mm": [4.0], "h_mm": [2.0]}))
    argsets = {
        "strain-table": ["strain-table"],
        "phase-diagram": ["phase-diagram", "--set", "resolution=6"],
        "elastica-demo": ["elastica-demo", "--set", "points=101"],
        "distortion-sweep": ["distortion-sweep",
                             "--set", "models=[\"pixel-only\"]",
                             "--set", "d_over_l=[0.25,0.5]",
                             "--set", "n_position=200",
                             "--set", "n_shape=5",
                             "--set", "include_interior=false"],
        "replay": ["replay", str(trace), "--set", "track_peaks=false"],
    }
    checks = []
    for name, args in argsets.items():
        out_a = tmp_path / f"{name}-a.csv"
        out_b = tmp_path / f"{name}-b.csv"
        rc_a = cli.main(args + ["--out", str(out_a)])
        rc_b = cli.main(args + ["--out", str(out_b)])
        same = out_a.read_bytes() == out_b.read_bytes()
        checks.append((rc_a == 0 and rc_b == 0 and same,
                       f"{name} rerun differs"))
    capsys.readouterr()
    rc_a = cli.main(["validate-config", str(vcfg)])
    first = capsys.readouterr().out
    rc_b = cli.main(["validate-config", str(vcfg)])
    second = capsys.readouterr().out
    checks.append((rc_a == 0 and rc_b == 0 and first == second,
                   "validate-config rerun differs"))
    _verdict(12, checks)
