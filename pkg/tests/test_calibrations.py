"""Calibration fields: constant symplectic, tubular, Fubini-Study, SL form."""

import math

import numpy as np
import pytest

from curlab import calibrations as cal
from curlab import currents as cur
from curlab import examples as ex
from curlab import exterior as xt


def test_standard_symplectic_values():
    field = cal.standard_symplectic(4)
    om = field.evaluate(np.zeros(4))
    e12 = xt.simple_2vector([1, 0, 0, 0], [0, 1, 0, 0])
    e13 = xt.simple_2vector([1, 0, 0, 0], [0, 0, 1, 0])
    assert xt.pairing(om, e12) == pytest.approx(1.0, abs=1e-14)
    assert abs(xt.pairing(om, e13)) < 1e-14
    assert xt.comass2(om) == pytest.approx(1.0, abs=1e-12)
    assert field.closed


def test_standard_symplectic_rejects_odd():
    with pytest.raises(ValueError):
        cal.standard_symplectic(5)


def _normal_at(C, k, rng):
    """A unit vector orthogonal to triangle k's plane."""
    e1, e2 = xt.plane_basis(xt.MultiVector(C.m, 2, C.tangents[k]))
    v = rng.standard_normal(C.m)
    v -= (v @ e1) * e1 + (v @ e2) * e2
    return v / np.linalg.norm(v)


@pytest.fixture(scope="module")
def tube_pair():
    """A small non-holomorphic graph and its tubular calibration."""
    C = ex.nonholo_graph(h=0.06, rmax=0.6)
    return C, cal.tubular_calibration(C, 0.05)


def test_tubular_flat_plane_is_constant():
    C = ex.flat_disk(h=0.1, rmax=0.6)
    field = cal.tubular_calibration(C, 0.1)
    nb = len(xt.blades(4, 2))
    dx12 = np.eye(nb)[xt.blade_index(4, (0, 1))]
    rng = np.random.default_rng(2)
    for k in rng.choice(len(C), 20, replace=False):
        for off in (0.0, 0.03):
            x = C.centroids[k] + off * _normal_at(C, k, rng)
            got = field.evaluate(x).coeffs
            assert np.allclose(got, dx12, atol=1e-9)


def test_tubular_rejects_bad_radius():
    C = ex.flat_disk(h=0.1, rmax=0.6)
    with pytest.raises(ValueError):
        cal.tubular_calibration(C, -0.1)


def test_tubular_on_surface_calibrates(tube_pair):
    C, field = tube_pair
    vals = field.evaluate_many(C.centroids)
    pairings = np.einsum("pc,pc->p", vals, C.tangents)
    assert np.abs(pairings - 1.0).max() <= 1e-6


def test_tubular_comass_sampled(tube_pair):
    C, field = tube_pair
    rng = np.random.default_rng(3)
    idx = rng.choice(len(C), 400, replace=True)
    pts = []
    for k in idx:
        n = _normal_at(C, k, rng)
        pts.append(C.centroids[k] + rng.uniform(-0.05, 0.05) * n)
    vals = field.evaluate_many(np.array(pts))
    for row in vals:
        assert xt.comass2(xt.MultiForm(4, 2, row)) <= 1.0 + 1e-6


def test_tubular_defect(tube_pair):
    C, field = tube_pair
    d = cal.calibration_defect(C, field)
    assert -1e-8 <= d <= 1e-6 * cur.mass(C)


def test_tubular_genuinely_nonclosed(tube_pair):
    """dA of the field is nonzero inside the cutoff shell."""
    C, field = tube_pair
    assert not field.closed
    rng = np.random.default_rng(5)
    best = 0.0
    for k in rng.choice(len(C), 10, replace=False):
        x = C.centroids[k] + 0.75 * field.delta * _normal_at(C, k, rng)
        best = max(best, cal.exterior_derivative_fd(field, x, h=1e-4).norm())
    assert best >= 1e-3


def test_defect_holomorphic_graph():
    # fine mesh: the secant-plane defect of the triangulation is O(h^2)
    C = ex.holomorphic_graph(k=2, h=0.003)
    field = cal.standard_symplectic(4)
    d = cal.calibration_defect(C, field)
    assert -1e-8 <= d <= 1e-6 * cur.mass(C)


def test_defect_two_lines_exact():
    C = ex.two_lines(h=0.05)
    d = cal.calibration_defect(C, cal.standard_symplectic(4))
    assert -1e-8 <= d <= 1e-10 * cur.mass(C)


def test_defect_anticomplex_plane():
    # a disk in the e1 e3 plane pairs to zero with the symplectic form
    pts, tris = ex.param_disk(np.linspace(0.1, 1.0, 10), 32)
    verts = np.zeros((len(pts), 4))
    verts[:, 0] = pts[:, 0]
    verts[:, 2] = pts[:, 1]
    C = cur.TriCurrent(verts, tris, np.ones(len(tris), int))
    d = cal.calibration_defect(C, cal.standard_symplectic(4))
    assert d == pytest.approx(cur.mass(C), rel=1e-10)


def test_defect_requires_unit_comass():
    C = ex.flat_disk(h=0.1)
    field = cal.special_legendrian()
    with pytest.raises(ValueError):
        cal.calibration_defect(C, field)


def _d_of_1form(fs, x, h=1e-5):
    """Finite-difference exterior derivative of the primitive alpha."""
    m = fs.mreal
    grad = np.zeros((m, m))
    for d in range(m):
        e = np.zeros(m)
        e[d] = h
        grad[d] = (fs.alpha(x + e).coeffs - fs.alpha(x - e).coeffs) / (2 * h)
    i, j = xt.pairs2(m)
    return grad[i, j] - grad[j, i]


@pytest.mark.parametrize("n", [2, 3])
def test_fubini_study_primitive(n):
    fs = cal.fubini_study(n)
    rng = np.random.default_rng(n)
    pts = rng.standard_normal((1000, fs.mreal)) * 0.8
    worst = 0.0
    for x in pts:
        da = _d_of_1form(fs, x)
        om = fs.field.evaluate(x).coeffs
        worst = max(worst, np.abs(da - om).max())
    assert worst <= 1e-5


def test_fubini_study_line_area():
    # total area of CP^1 in the affine chart: 2 pi r / (1 + r^2)^2 dr
    fs = cal.fubini_study(2)
    r = np.linspace(0.0, 150.0, 400_001)
    dens = 2 * math.pi * r / (1 + r**2) ** 2
    # chart density equals the single form coefficient
    mid = fs.field.evaluate(np.array([0.3, -0.4]))
    K = 1 + 0.25
    assert mid.coeffs[0] == pytest.approx(1 / K**2, rel=1e-12)
    area = np.trapezoid(dens, r)
    assert area == pytest.approx(math.pi, rel=5e-3)


def test_fubini_study_comass_sampled():
    fs = cal.fubini_study(3)
    rng = np.random.default_rng(9)
    for x in rng.standard_normal((500, 4)):
        om = fs.field.evaluate(x)
        assert xt.comass2(om) <= 1.0 + 1e-6


def test_fubini_study_distance():
    fs = cal.fubini_study(2)
    assert fs.fs_distance([1, 0], [0, 1]) == pytest.approx(math.pi / 2)
    # arccos is sqrt-sensitive near coincident classes
    assert fs.fs_distance([1, 1], [2, 2]) == pytest.approx(0.0, abs=1e-7)


def test_special_legendrian_base_point():
    field = cal.special_legendrian()
    om = field.evaluate(np.array([1.0, 0, 0, 0, 0, 0]))
    nb = len(xt.blades(6, 2))
    want = np.zeros(nb)
    want[xt.blade_index(6, (2, 4))] = 1.0
    want[xt.blade_index(6, (3, 5))] = -1.0
    assert np.allclose(om.coeffs, want, atol=1e-14)
    assert xt.comass2(om) == pytest.approx(1.0, abs=1e-12)


def test_special_legendrian_zero_at_origin():
    field = cal.special_legendrian()
    assert field.evaluate(np.zeros(6)).coeffs == pytest.approx(0.0, abs=1e-15)


def test_special_legendrian_nonclosed():
    field = cal.special_legendrian()
    d = cal.exterior_derivative_fd(field, np.array([1.0, 0, 0, 0, 0, 0]))
    assert d.norm() >= 1e-3


def test_retriangulation_invariance():
    """Pairing with a closed constant form only sees the boundary chain."""
    om = cal.standard_symplectic(4)

    def disk(radii):
        pts, tris = ex.param_disk(radii, 48)
        verts = np.zeros((len(pts), 4))
        verts[:, :2] = pts
        return cur.TriCurrent(verts, tris, np.ones(len(tris), int))

    A = disk(np.linspace(0.2, 1.0, 5))
    B = disk(np.concatenate([[0.07, 0.11], np.linspace(0.33, 1.0, 9)]))
    pa = cur.pair(A, om.evaluate(np.zeros(4)))
    pb = cur.pair(B, om.evaluate(np.zeros(4)))
    assert abs(pa - pb) <= 1e-8 * max(abs(pa), 1.0)
