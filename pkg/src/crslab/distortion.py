"""Continuity metrics: mean peak-position and shape distortion.

The display quality of a pixel device is summarized by two expectations
over a uniformly random target peak position: the mean normalized peak
offset D_p = E(|x_r - X_i| / l) and the mean relative L2 shape error D_s
over a one-wavelength window centred on the ideal peak.  Both are plain
Monte Carlo means over seedable substreams, so every estimate is exactly
reproducible and models can be compared on identical draws.

Conventions baked into this module:

* ideal peak positions are uniform over the pixel hull (the region between
  the first and last pixels); an interior variant shrinks the region by
  half a wavelength to isolate edge effects;
* ideal and displayed shapes are evaluated as zero outside the hull;
* samples whose reconstruction is identically zero ("no peak") count with
  the nearest pixel position capped at half a pitch, instead of being
  discarded (discarding would bias D_p down); a config flag exposes the
  discarding variant for sensitivity checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from .elastica import ElasticaSettings
from .fields import (BumpField1D, BumpField2D, Lattice, _raised_cosine,
                     make_lattice)
from .reconstruct import (CrsProfile1D, CrsSurface2D, LinearSurface2D,
                          ReconstructionModel, build_profile)
from .rng import uniform_block


class NoPeakError(ValueError):
    """The reconstruction is identically zero; there is no peak to locate."""


@dataclass(frozen=True)
class PeakResult:
    """Located maximum of a displayed profile.

    location -- x_r (1D) or np.array([x_r, y_r]) (2D)
    height   -- profile value at the location
    plateau  -- True when the maximum is attained on a flat region (always
                the case for the staircase model)
    """

    location: Union[float, np.ndarray]
    height: float
    plateau: bool


@dataclass(frozen=True)
class DistortionEstimate:
    """One Monte Carlo distortion estimate.

    metric         -- "Dp" or "Ds"
    value          -- dimensionless mean
    standard_error -- sample standard error of the mean
    n_samples      -- number of peak draws
    d_over_l       -- pixel pitch over wavelength
    model          -- reconstruction variant name
    rng_seed       -- base seed of the draw stream
    region         -- "full" (whole hull) or "interior" (hull shrunk by l/2)
    """

    metric: str
    value: float
    standard_error: float
    n_samples: int
    d_over_l: float
    model: str
    rng_seed: int
    region: str = "full"


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of D = c (d/l)^p on log-log values."""

    coefficient: float
    exponent: float
    residual: float           # RMS of log-residuals


# ======================================================================
# peak finding
# ======================================================================

def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Deterministic golden-section maximization on [a, b]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = f(c)
    fd = f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_peak(profile, wavelength: Optional[float] = None) -> PeakResult:
    """Locate the maximum of a displayed profile.

    Vertex-based models (staircase, linear) resolve to the best pixel,
    ties to the lowest-indexed one.  Continuous profiles are grid-scanned
    at >= 512 points per wavelength (64 per wavelength per axis in 2D) and
    refined by golden-section / coordinate descent to 1e-4 wavelengths.
    Raises NoPeakError for an identically zero reconstruction.
    """
    lat: Lattice = profile.lattice
    if profile.kind in ("staircase", "linear"):
        h = np.asarray(profile.heights, dtype=float)
        if not np.any(h > 0.0):
            raise NoPeakError("no peak")
        top = float(h.max())
        idx = int(np.flatnonzero(h == top)[0])
        if lat.ndim == 1:
            loc: Union[float, np.ndarray] = float(lat.positions[idx])
        else:
            loc = lat.positions[idx].copy()
        plateau = profile.kind == "staircase" or int(np.sum(h == top)) > 1
        return PeakResult(loc, top, plateau)

    wl = wavelength if wavelength is not None else getattr(profile, "wavelength")
    if wl is None or wl <= 0.0:
        raise ValueError("continuous peak search needs a positive wavelength")
    if lat.ndim == 1:
        x0, x1 = lat.hull_bounds()
        n = max(int(math.ceil((x1 - x0) / wl * 512.0)), 64) + 1
        xs = np.linspace(x0, x1, n)
        ys = profile(xs)
        if not np.any(ys > 0.0):
            raise NoPeakError("no peak")
        i = int(np.argmax(ys))
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, n - 1)]
        xr = _golden_max(lambda x: float(np.atleast_1d(profile(x))[0]),
                         a, b, 1e-4 * wl)
        return PeakResult(float(xr), float(np.atleast_1d(profile(xr))[0]),
                          False)

    if lat.kind == "square":
        (x0, x1), (y0, y1) = lat.hull_bounds()
    else:
        r = lat.hull_bounds()
        x0, x1, y0, y1 = -r, r, -r, r
    step = wl / 64.0
    nx = max(int(math.ceil((x1 - x0) / step)), 8) + 1
    ny = max(int(math.ceil((y1 - y0) / step)), 8) + 1
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    gx = np.tile(xs, ny)
    gy = np.repeat(ys, nx)
    vals = profile(gx, gy)
    if not np.any(vals > 0.0):
        raise NoPeakError("no peak")
    i = int(np.argmax(vals))       # first occurrence: smallest y, then x
    cx, cy = float(gx[i]), float(gy[i])
    span = step
    for _ in range(4):
        cx = _golden_max(lambda x: float(profile(x, cy)[0]),
                         cx - span, cx + span, 1e-4 * wl)
        cy = _golden_max(lambda y: float(profile(cx, y)[0]),
                         cy - span, cy + span, 1e-4 * wl)
        span *= 0.35
    return PeakResult(np.array([cx, cy]),
                      float(profile(cx, cy)[0]), False)


# ======================================================================
# Monte Carlo draws
# ======================================================================

def _draw_peaks(lattice: Lattice, wavelength: float, n: int, seed: int,
                metric: str, region: str) -> np.ndarray:
    """Peak positions for one estimate.  The stream tag deliberately omits
    the model so that different models see identical draws (paired
    comparisons); it includes the metric and region so those never share
    samples."""
    tag = f"{metric}:{lattice.kind}:{region}"
    u = uniform_block(seed, tag, n, lattice.uniforms_per_point())
    margin = 0.5 * wavelength if region == "interior" else 0.0
    return lattice.points_from_uniform(u, margin=margin)


def _field_for(lattice: Lattice, peak, amplitude: float, wavelength: float):
    if lattice.ndim == 1:
        return BumpField1D(float(peak), amplitude, wavelength)
    return BumpField2D((float(peak[0]), float(peak[1])), amplitude, wavelength)


# ======================================================================
# position distortion
# ======================================================================

def position_distortion(model: ReconstructionModel, lattice: Lattice,
                        wavelength: float, n_samples: int, seed: int,
                        amplitude: float = 1.0, region: str = "full",
                        no_peak_policy: str = "nearest_capped",
                        ) -> DistortionEstimate:
    """Mean normalized peak offset D_p for one model on one lattice.

    Draws n_samples ideal peak positions uniformly over the region ("full"
    hull per the metric's definition, or "interior"), reconstructs each
    target, and averages |x_r - X_i| / l.  Deterministic given the seed;
    estimates for different models with equal (lattice, wavelength, seed,
    region) use identical draws.  Reported runs should use n_samples >=
    1000.
    """
    _check_region_policy(region, no_peak_policy)
    peaks = _draw_peaks(lattice, wavelength, n_samples, seed, "Dp", region)
    if model.variant in ("pixel-only", "linear"):
        errs = _vertex_position_errors(lattice, peaks, wavelength,
                                       no_peak_policy)
    else:
        errs = _crs_position_errors(model, lattice, peaks, wavelength,
                                    amplitude, no_peak_policy)
    return _estimate_from_errors(errs / wavelength, "Dp", lattice, wavelength,
                                 model.variant, seed, region)


def _vertex_position_errors(lattice: Lattice, peaks: np.ndarray,
                            wavelength: float, policy: str) -> np.ndarray:
    """Both vertex-based models peak at the maximum-height pixel, which for
    a radially decreasing bump is exactly the nearest pixel, so the peak
    error is the nearest-pixel distance (capped at d/2 for the rare draws
    whose bump misses every pixel)."""
    dist = lattice.nearest_distance(peaks)
    in_support = dist < 0.5 * wavelength
    if policy == "discard":
        return dist[in_support]
    return np.where(in_support, dist, np.minimum(dist, 0.5 * lattice.pitch))


def _crs_position_errors(model: ReconstructionModel, lattice: Lattice,
                         peaks: np.ndarray, wavelength: float,
                         amplitude: float, policy: str) -> np.ndarray:
    errs = []
    for peak in np.atleast_1d(peaks):
        fld = _field_for(lattice, peak, amplitude, wavelength)
        profile = build_profile(model, fld, lattice)
        try:
            res = find_peak(profile, wavelength)
        except NoPeakError:
            if policy == "discard":
                continue
            d = float(lattice.nearest_distance(
                np.atleast_1d(peak) if lattice.ndim == 1
                else np.atleast_2d(peak))[0])
            errs.append(min(d, 0.5 * lattice.pitch))
            continue
        if lattice.ndim == 1:
            errs.append(abs(res.location - float(peak)))
        else:
            errs.append(float(np.linalg.norm(res.location - peak)))
    return np.asarray(errs, dtype=float)


# ======================================================================
# shape distortion
# ======================================================================

def shape_distortion(model: ReconstructionModel, lattice: Lattice,
                     wavelength: float, n_samples: int, seed: int,
                     amplitude: float = 1.0, region: str = "full",
                     points_per_wavelength: int = 256,
                     ) -> DistortionEstimate:
    """Mean relative L2 shape error D_s over a one-wavelength window.

    Per sample, integrates (ideal - displayed)^2 and ideal^2 over the
    window centred on the ideal peak (a disc of diameter l in 2D) with
    composite Simpson quadrature at points_per_wavelength subintervals per
    wavelength, both shapes taken as zero outside the display hull, and
    averages the square-rooted ratio.
    """
    _check_region_policy(region, "nearest_capped")
    if points_per_wavelength < 256 or points_per_wavelength % 2:
        raise ValueError("need an even points_per_wavelength >= 256")
    peaks = _draw_peaks(lattice, wavelength, n_samples, seed, "Ds", region)
    if lattice.ndim == 1:
        vals = _shape_errors_1d(model, lattice, peaks, wavelength, amplitude,
                                points_per_wavelength)
    else:
        vals = _shape_errors_2d(model, lattice, peaks, wavelength, amplitude,
                                points_per_wavelength)
    return _estimate_from_errors(vals, "Ds", lattice, wavelength,
                                 model.variant, seed, region)


def _shape_errors_1d(model, lattice, peaks, wl, amplitude, ppw) -> np.ndarray:
    n = peaks.shape[0]
    rel = np.linspace(-0.5 * wl, 0.5 * wl, ppw + 1)
    dx = rel[1] - rel[0]
    phi_rel = _raised_cosine(np.abs(rel), amplitude, wl)
    pts = peaks[:, None] + rel[None, :]
    inside = lattice.contains(pts.ravel()).reshape(n, ppw + 1)
    phi = np.where(inside, phi_rel[None, :], 0.0)

    if model.variant == "pixel-only":
        idx = lattice.nearest_index(pts.ravel()).reshape(n, ppw + 1)
        pixdist = np.abs(lattice.positions[idx] - peaks[:, None])
        psi = _raised_cosine(pixdist, amplitude, wl)
        psi = np.where(inside, psi, 0.0)
    elif model.variant == "linear":
        pix = lattice.positions
        hmat = _raised_cosine(np.abs(pix[None, :] - peaks[:, None]),
                              amplitude, wl)
        seg = np.clip(np.searchsorted(pix, pts.ravel()) - 1,
                      0, pix.size - 2).reshape(n, ppw + 1)
        t = (pts - pix[seg]) / (pix[seg + 1] - pix[seg])
        t = np.clip(t, 0.0, 1.0)
        h_lo = np.take_along_axis(hmat, seg, axis=1)
        h_hi = np.take_along_axis(hmat, seg + 1, axis=1)
        psi = np.where(inside, h_lo * (1.0 - t) + h_hi * t, 0.0)
    else:
        psi = np.empty_like(phi)
        for i in range(n):
            fld = BumpField1D(float(peaks[i]), amplitude, wl)
            prof = CrsProfile1D(fld, lattice, model.settings)
            psi[i] = prof.extended(pts[i])

    num = simpson((phi - psi) ** 2, dx=dx, axis=1)
    den = simpson(phi ** 2, dx=dx, axis=1)
    return np.sqrt(num / den)


def _shape_errors_2d(model, lattice, peaks, wl, amplitude, ppw) -> np.ndarray:
    n = peaks.shape[0]
    m = ppw + 1
    rel = np.linspace(-0.5 * wl, 0.5 * wl, m)
    dx = rel[1] - rel[0]
    rx = np.tile(rel, m)
    ry = np.repeat(rel, m)
    rr = np.hypot(rx, ry)
    in_disc = rr <= 0.5 * wl
    phi_grid = np.where(in_disc, _raised_cosine(rr, amplitude, wl), 0.0)
    w1 = np.ones(m)
    w1[1:-1:2] = 4.0
    w1[2:-1:2] = 2.0
    w2 = (np.outer(w1, w1).ravel()) * (dx / 3.0) ** 2

    out = np.empty(n)
    for i in range(n):
        px, py = float(peaks[i, 0]), float(peaks[i, 1])
        qx = px + rx
        qy = py + ry
        pts = np.column_stack([qx, qy])
        inside = lattice.contains(pts)
        phi = np.where(inside, phi_grid, 0.0)
        if model.variant == "pixel-only":
            idx = lattice.nearest_index(pts)
            pd = np.linalg.norm(lattice.positions[idx] - peaks[i][None, :],
                                axis=1)
            psi = np.where(inside, _raised_cosine(pd, amplitude, wl), 0.0)
        else:
            fld = BumpField2D((px, py), amplitude, wl)
            if model.variant == "linear":
                surf = LinearSurface2D(
                    _raised_cosine(np.linalg.norm(
                        lattice.positions - peaks[i][None, :], axis=1),
                        amplitude, wl), lattice)
            else:
                surf = CrsSurface2D(fld, lattice, model.settings)
            psi = surf.extended(pts)
        integrand = np.where(in_disc, (phi - psi) ** 2, 0.0)
        num = float(integrand @ w2)
        den = float((phi ** 2) @ w2)
        out[i] = math.sqrt(num / den)
    return out


# ======================================================================
# power-law fitting and sweeps
# ======================================================================

def fit_power_law(points: Sequence[Tuple[float, float]]) -> PowerLawFit:
    """Fit D = c (d/l)^p by least squares on (log(d/l), log D).

    Needs at least 4 strictly positive points.  The residual is the RMS of
    the log-domain fit residuals.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 (d/l, D) points")
    if np.any(pts <= 0.0):
        raise ValueError("power-law fit needs positive values")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    p, lc = np.polyfit(lx, ly, 1)
    res = ly - (p * lx + lc)
    return PowerLawFit(float(math.exp(lc)), float(p),
                       float(math.sqrt(np.mean(res ** 2))))


@dataclass(frozen=True)
class SweepConfig:
    """Configuration of a distortion sweep.

    Lattice sizing: 1D displays span span_wavelengths wavelengths; 2D
    displays extend radius_wavelengths wavelengths from the centre
    (hex_rings / grid_points override the derived size when set).  The CRS
    model uses its own, smaller sample counts since each sample costs one
    or more elastica solves.
    """

    wavelength: float = 90.0
    amplitude: float = 1.0
    n_position: int = 20000
    n_shape: int = 400
    n_position_crs: int = 1000
    n_shape_crs: int = 300
    seed: int = 20240
    span_wavelengths: float = 4.0
    radius_wavelengths: float = 2.0
    hex_rings: Optional[int] = None
    grid_points: Optional[int] = None
    include_interior: bool = True
    points_per_wavelength: int = 256
    no_peak_policy: str = "nearest_capped"
    elastica: Optional[ElasticaSettings] = None


def lattice_for(kind: str, d_over_l: float, config: SweepConfig) -> Lattice:
    """The display lattice a sweep uses at one d/l point."""
    d = d_over_l * config.wavelength
    if kind == "line":
        n_gaps = max(2, int(round(config.span_wavelengths / d_over_l)))
        return make_lattice("line", d, (0.0, n_gaps * d))
    if kind == "square":
        if config.grid_points is not None:
            m = config.grid_points
        else:
            m = max(2, int(round(2.0 * config.radius_wavelengths / d_over_l)) + 1)
        side = (m - 1) * d
        return make_lattice("square", d, ((0.0, side), (0.0, side)))
    if kind == "hexagonal":
        if config.hex_rings is not None:
            k = config.hex_rings
        else:
            k = max(2, int(round(config.radius_wavelengths / d_over_l)))
        return make_lattice("hexagonal", d, k * d)
    raise ValueError(f"unknown lattice kind: {kind!r}")


def distortion_sweep(models: Sequence[Union[str, ReconstructionModel]],
                     d_over_l_values: Sequence[float], lattice_kind: str,
                     config: Optional[SweepConfig] = None,
                     ) -> List[DistortionEstimate]:
    """Full distortion table: every model and metric on a shared d/l grid.

    Models at the same grid point share peak draws (the sample streams are
    keyed by metric, lattice kind and region only), so cross-model
    comparisons are paired.  Returns the flat list of estimates; adding the
    interior-region variant doubles the rows.
    """
    config = config or SweepConfig()
    models = [ReconstructionModel(m, config.elastica) if isinstance(m, str)
              else m for m in models]
    regions = ("full", "interior") if config.include_interior else ("full",)
    rows: List[DistortionEstimate] = []
    for dol in d_over_l_values:
        lat = lattice_for(lattice_kind, dol, config)
        for model in models:
            crs = model.variant == "crs"
            n_pos = config.n_position_crs if crs else config.n_position
            n_shp = config.n_shape_crs if crs else config.n_shape
            for region in regions:
                rows.append(position_distortion(
                    model, lat, config.wavelength, n_pos, config.seed,
                    amplitude=config.amplitude, region=region,
                    no_peak_policy=config.no_peak_policy))
                rows.append(shape_distortion(
                    model, lat, config.wavelength, n_shp, config.seed,
                    amplitude=config.amplitude, region=region,
                    points_per_wavelength=config.points_per_wavelength))
    return rows


def sweep_fits(rows: Sequence[DistortionEstimate]) -> List[Tuple[str, str, str, PowerLawFit]]:
    """Power-law fits per (model, metric, region) group with >= 4 points."""
    groups = {}
    for r in rows:
        groups.setdefault((r.model, r.metric, r.region), []).append(
            (r.d_over_l, r.value))
    fits = []
    for (model, metric, region), pts in sorted(groups.items()):
        if len(pts) >= 4 and all(v > 0.0 for _, v in pts):
            fits.append((model, metric, region,
                         fit_power_law(sorted(pts))))
    return fits


# ======================================================================
# shared helpers
# ======================================================================

def _check_region_policy(region: str, policy: str) -> None:
    if region not in ("full", "interior"):
        raise ValueError("region must be 'full' or 'interior'")
    if policy not in ("nearest_capped", "discard"):
        raise ValueError("no-peak policy must be 'nearest_capped' or 'discard'")


def _estimate_from_errors(errs: np.ndarray, metric: str, lattice: Lattice,
                          wavelength: float, model: str, seed: int,
                          region: str) -> DistortionEstimate:
    errs = np.asarray(errs, dtype=float)
    n = errs.size
    if n == 0:
        raise ValueError("no samples left to average")
    value = float(np.mean(errs))
    se = float(np.std(errs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return DistortionEstimate(metric, value, se, n,
                              lattice.pitch / wavelength, model, seed, region)
