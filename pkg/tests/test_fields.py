"""Fields and lattices: bump geometry, restriction slices, lattice
construction, hull membership, nearest-pixel lookups, beam lines."""
import math

import numpy as np
import pytest

from crslab.fields import (
    BumpField1D,
    BumpField2D,
    bump1d,
    bump2d,
    make_lattice,
    sample_pixels,
)


# ======================================================================
# raised-cosine bumps
# ======================================================================

def test_bump1d_shape_values():
    fld = BumpField1D(peak=10.0, amplitude=2.0, wavelength=90.0)
    assert fld(10.0) == pytest.approx(2.0)
    # half height one quarter-wavelength out: (A/2)(1 + cos(pi/2)) = A/2
    assert fld(10.0 + 22.5) == pytest.approx(1.0)
    assert fld(10.0 - 22.5) == pytest.approx(1.0)
    # support edge and beyond are exactly zero
    assert fld(10.0 + 45.0) == 0.0
    assert fld(10.0 + 46.0) == 0.0
    assert fld(10.0 - 500.0) == 0.0


def test_bump1d_slope_matches_finite_difference():
    fld = BumpField1D(peak=-3.0, amplitude=1.5, wavelength=60.0)
    xs = np.linspace(-40.0, 40.0, 321)
    h = 1e-6
    fd = (bump1d(xs + h, fld) - bump1d(xs - h, fld)) / (2.0 * h)
    assert np.allclose(fld.slope(xs), fd, atol=5e-6)


def test_bump1d_arc_excess_against_quadrature():
    fld = BumpField1D(peak=45.0, amplitude=3.0, wavelength=90.0)
    xs = np.linspace(0.0, 90.0, 200001)
    z = bump1d(xs, fld)
    arc = np.sum(np.hypot(np.diff(xs), np.diff(z)))
    expect = arc - 90.0
    assert fld.arc_excess(0.0, 90.0) == pytest.approx(expect, rel=1e-6)
    # regions outside the support contribute nothing
    assert fld.arc_excess(-1000.0, 1000.0) == pytest.approx(expect, rel=1e-6)
    assert fld.arc_excess(200.0, 300.0) == 0.0


def test_bump1d_zero_amplitude_is_flat():
    fld = BumpField1D(peak=0.0, amplitude=0.0, wavelength=90.0)
    xs = np.linspace(-50.0, 50.0, 101)
    assert np.all(bump1d(xs, fld) == 0.0)
    assert fld.arc_excess(-45.0, 45.0) == 0.0


def test_bump1d_validation():
    with pytest.raises(ValueError):
        BumpField1D(0.0, -1.0, 90.0)
    with pytest.raises(ValueError):
        BumpField1D(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        BumpField1D(math.nan, 1.0, 90.0)


def test_bump2d_radial_symmetry():
    fld = BumpField2D(peak=(5.0, -2.0), amplitude=1.0, wavelength=90.0)
    rng = np.random.default_rng(11)
    r = 45.0 * rng.random(200)
    ang = 2.0 * math.pi * rng.random(200)
    x = 5.0 + r * np.cos(ang)
    y = -2.0 + r * np.sin(ang)
    ref = 0.5 * (1.0 + np.cos(2.0 * math.pi * r / 90.0))
    assert np.allclose(bump2d(x, y, fld), ref, atol=1e-12)
    assert fld.support_radius() == 45.0
    assert fld(5.0 + 45.0, -2.0) == 0.0


def test_bump2d_section_matches_1d():
    # a diameter cut of the 2D bump is the 1D bump
    fld2 = BumpField2D(peak=(0.0, 0.0), amplitude=2.5, wavelength=80.0)
    fld1 = BumpField1D(peak=0.0, amplitude=2.5, wavelength=80.0)
    xs = np.linspace(-50.0, 50.0, 401)
    assert np.allclose(bump2d(xs, np.zeros_like(xs), fld2), bump1d(xs, fld1))


# ======================================================================
# line restrictions
# ======================================================================

def test_line_restriction_values_match_field():
    fld = BumpField2D(peak=(12.0, 7.0), amplitude=1.0, wavelength=90.0)
    origin = np.array([-30.0, -5.0])
    direction = np.array([1.0, 1.0]) / math.sqrt(2.0)
    restr = fld.along_line(origin, direction)
    s = np.linspace(-20.0, 120.0, 301)
    pts = origin[None, :] + s[:, None] * direction[None, :]
    assert np.allclose(restr(s), bump2d(pts[:, 0], pts[:, 1], fld), atol=1e-12)


def test_line_restriction_offset_geometry():
    fld = BumpField2D(peak=(0.0, 10.0), amplitude=1.0, wavelength=90.0)
    restr = fld.along_line(np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    assert restr.s_peak == pytest.approx(0.0)
    assert restr.offset == pytest.approx(10.0)
    # value at closest approach: field at distance 10 from the peak
    expect = 0.5 * (1.0 + math.cos(2.0 * math.pi * 10.0 / 90.0))
    assert restr(0.0) == pytest.approx(expect)


def test_line_restriction_support_and_excess():
    fld = BumpField2D(peak=(0.0, 0.0), amplitude=2.0, wavelength=90.0)
    on_axis = fld.along_line(np.array([-100.0, 0.0]), np.array([1.0, 0.0]))
    lo, hi = on_axis.support()
    assert lo == pytest.approx(55.0)   # peak at s=100, support radius 45
    assert hi == pytest.approx(145.0)
    # a line missing the support entirely has no excess
    far = fld.along_line(np.array([0.0, 60.0]), np.array([1.0, 0.0]))
    assert far.support() is None
    assert far.arc_excess(-200.0, 200.0) == 0.0
    # quadrature excess against a dense polyline
    s = np.linspace(55.0, 145.0, 100001)
    z = on_axis(s)
    expect = np.sum(np.hypot(np.diff(s), np.diff(z))) - 90.0
    assert on_axis.arc_excess(-200.0, 200.0) == pytest.approx(expect, rel=1e-6)


# ======================================================================
# lattice construction
# ======================================================================

def test_make_line_lattice_positions():
    lat = make_lattice("line", 30.0, 120.0)
    assert lat.n_pixels == 5
    assert np.allclose(lat.positions, [0.0, 30.0, 60.0, 90.0, 120.0])
    assert lat.ndim == 1
    assert lat.hull_bounds() == (0.0, 120.0)


def test_make_square_lattice_enumeration():
    lat = make_lattice("square", 10.0, (20.0, 20.0))
    assert lat.n_pixels == 9
    # row-major by (y, x)
    assert np.allclose(lat.positions[0], [0.0, 0.0])
    assert np.allclose(lat.positions[1], [10.0, 0.0])
    assert np.allclose(lat.positions[3], [0.0, 10.0])
    order = np.lexsort((lat.positions[:, 0], lat.positions[:, 1]))
    assert np.all(order == np.arange(9))


def test_make_hex_lattice_counts():
    # rings k = 1, 2, 3 hold 3k(k+1)+1 sites
    for k, n in ((1, 7), (2, 19), (3, 37)):
        lat = make_lattice("hexagonal", 30.0, 30.0 * k)
        assert lat.n_pixels == n
    lat = make_lattice("hexagonal", 30.0, 60.0)
    # centre pixel present, enumeration sorted by (y, x)
    d = np.linalg.norm(lat.positions, axis=1)
    assert d.min() == 0.0
    order = np.lexsort((lat.positions[:, 0], lat.positions[:, 1]))
    assert np.all(order == np.arange(lat.n_pixels))


def test_hex_interior_neighbour_distances():
    lat = make_lattice("hexagonal", 30.0, 90.0)
    pos = lat.positions
    interior = np.linalg.norm(pos, axis=1) < 60.0 - 1e-9
    for i in np.nonzero(interior)[0]:
        d = np.linalg.norm(pos - pos[i], axis=1)
        neigh = np.sort(d)[1:7]
        assert np.allclose(neigh, 30.0, atol=1e-9)


def test_degenerate_lattices_raise():
    with pytest.raises(ValueError, match="degenerate lattice"):
        make_lattice("line", 30.0, 10.0)
    with pytest.raises(ValueError, match="degenerate lattice"):
        make_lattice("square", 30.0, (10.0, 300.0))
    with pytest.raises(ValueError, match="degenerate lattice"):
        make_lattice("hexagonal", 30.0, 20.0)
    with pytest.raises(ValueError):
        make_lattice("line", -1.0, 100.0)
    with pytest.raises(ValueError):
        make_lattice("triangular", 30.0, 100.0)


# ======================================================================
# hull membership and uniform sampling
# ======================================================================

def test_contains_line_and_square():
    lat = make_lattice("line", 30.0, 120.0)
    assert bool(lat.contains(np.array([0.0]))[0])
    assert bool(lat.contains(np.array([120.0]))[0])
    assert not bool(lat.contains(np.array([121.0]))[0])
    assert not bool(lat.contains(np.array([100.0]), margin=30.0)[0])

    sq = make_lattice("square", 10.0, (40.0, 40.0))
    pts = np.array([[0.0, 0.0], [40.0, 40.0], [41.0, 20.0], [20.0, -1.0]])
    assert list(sq.contains(pts)) == [True, True, False, False]


def test_contains_hexagon():
    lat = make_lattice("hexagonal", 30.0, 60.0)
    apothem = 60.0 * math.sqrt(3.0) / 2.0
    pts = np.array([
        [0.0, 0.0],
        [60.0, 0.0],                 # hexagon vertex
        [0.0, apothem - 1e-6],       # just inside the flat edge
        [0.0, apothem + 1e-3],       # just outside
        [70.0, 0.0],
    ])
    assert list(lat.contains(pts)) == [True, True, True, False, False]


def test_points_from_uniform_lands_in_hull():
    rng = np.random.default_rng(21)
    for kind, ext in (("line", 360.0), ("square", (120.0, 120.0)),
                      ("hexagonal", 90.0)):
        lat = make_lattice(kind, 30.0, ext)
        u = rng.random((2000, lat.uniforms_per_point()))
        pts = lat.points_from_uniform(u)
        assert np.all(lat.contains(pts))
        # interior sampling respects the margin
        pts_m = lat.points_from_uniform(u, margin=45.0)
        assert np.all(lat.contains(pts_m, margin=45.0 - 1e-6))


def test_points_from_uniform_is_deterministic():
    lat = make_lattice("hexagonal", 30.0, 60.0)
    u = np.random.default_rng(5).random((64, 3))
    a = lat.points_from_uniform(u)
    b = lat.points_from_uniform(u.copy())
    assert np.array_equal(a, b)


# ======================================================================
# nearest pixel
# ======================================================================

def test_nearest_index_line_ties_to_lower():
    lat = make_lattice("line", 30.0, 120.0)
    # query exactly on the cell boundary between pixels 1 and 2
    assert int(lat.nearest_index(np.array([45.0]))[0]) == 1
    assert int(lat.nearest_index(np.array([45.0 + 1e-9]))[0]) == 2
    assert int(lat.nearest_index(np.array([-10.0]))[0]) == 0


def test_nearest_index_matches_brute_force():
    rng = np.random.default_rng(33)
    for kind, ext in (("square", (90.0, 90.0)), ("hexagonal", 90.0)):
        lat = make_lattice(kind, 30.0, ext)
        u = rng.random((500, lat.uniforms_per_point()))
        pts = lat.points_from_uniform(u)
        idx = lat.nearest_index(pts)
        d2 = np.sum((lat.positions[None, :, :] - pts[:, None, :]) ** 2, axis=2)
        brute = np.argmin(d2, axis=1)   # argmin takes the first = lowest index
        assert np.array_equal(idx, brute)
        assert np.allclose(lat.nearest_distance(pts),
                           np.sqrt(d2[np.arange(len(pts)), brute]))


# ======================================================================
# beam lines
# ======================================================================

def test_beam_lines_square():
    lat = make_lattice("square", 30.0, (90.0, 90.0))
    beams = lat.beam_lines()
    # 4 rows + 4 columns
    assert len(beams) == 8
    families = {b.family for b in beams}
    assert families == {0, 1}
    for b in beams:
        assert np.allclose(np.linalg.norm(b.direction), 1.0)
        assert np.allclose(np.diff(b.stations), 30.0)
        pts = b.origin[None, :] + b.stations[:, None] * b.direction[None, :]
        assert np.allclose(pts, lat.positions[b.pixel_idx])


def test_beam_lines_hex_three_families():
    lat = make_lattice("hexagonal", 30.0, 60.0)   # 19 pixels, k = 2
    beams = lat.beam_lines()
    assert len(beams) == 15                        # 3 families x (2k + 1)
    per_family = {f: 0 for f in (0, 1, 2)}
    covered = set()
    for b in beams:
        per_family[b.family] += 1
        covered.update(int(i) for i in b.pixel_idx)
        pts = b.origin[None, :] + b.stations[:, None] * b.direction[None, :]
        assert np.allclose(pts, lat.positions[b.pixel_idx], atol=1e-9)
    assert per_family == {0: 5, 1: 5, 2: 5}
    assert covered == set(range(19))
    # names are unique and stable
    names = [b.name for b in beams]
    assert len(set(names)) == 15


def test_beam_line_point_at():
    lat = make_lattice("square", 30.0, (60.0, 60.0))
    b = lat.beam_lines()[0]
    p = b.point_at(np.array([0.0, 15.0, 30.0]))
    assert p.shape == (3, 2)
    assert np.allclose(p[2] - p[0], 30.0 * b.direction)


# ======================================================================
# pixel sampling
# ======================================================================

def test_sample_pixels_line_and_hex():
    lat = make_lattice("line", 30.0, 120.0)
    fld = BumpField1D(peak=60.0, amplitude=2.0, wavelength=90.0)
    h = sample_pixels(fld, lat)
    assert np.allclose(h, bump1d(lat.positions, fld))
    assert h[2] == pytest.approx(2.0)

    hexlat = make_lattice("hexagonal", 30.0, 60.0)
    fld2 = BumpField2D(peak=(0.0, 0.0), amplitude=1.0, wavelength=90.0)
    h2 = sample_pixels(fld2, hexlat)
    centre = int(np.argmin(np.linalg.norm(hexlat.positions, axis=1)))
    assert h2[centre] == pytest.approx(1.0)
    with pytest.raises(TypeError):
        sample_pixels(fld2, lat)
    with pytest.raises(TypeError):
        sample_pixels(fld, hexlat)
