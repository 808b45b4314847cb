"""Scaled-energy analysis of pseudo-holomorphic maps on the 4-ball.

Maps are sampled on a polar product grid (geometric radius ladder times a
Gauss-Legendre x trapezoid grid on the 3-sphere). Shipped checks: scaled
energy and weighted radial energy, the almost-monotonicity inequality pair,
the inner variation identity, coarea slicing by complex lines through the
origin, tangent-map gaps between dilations, and power-law rate fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import blowup as bl

__all__ = [
    "SampledMap",
    "AlmostComplexField",
    "VectorField",
    "radial_bump_field",
    "random_bump_field",
    "target_structure",
    "map_example",
    "MAP_EXAMPLE_NAMES",
    "scaled_energy",
    "radial_energy",
    "map_monotonicity_check",
    "inner_variation_residual",
    "coarea_slice_check",
    "tangent_map_gap",
    "map_rate_fit",
]


def _stencil_1d(t: np.ndarray):
    """3-point first-derivative stencils on a nonuniform grid.

    Returns (idx, w) of shape (M, 3); exact on quadratics.
    """
    M = len(t)
    idx = np.zeros((M, 3), dtype=int)
    w = np.zeros((M, 3))
    for i in range(M):
        j = min(max(i, 1), M - 2)
        x0, x1, x2 = t[j - 1], t[j], t[j + 1]
        x = t[i]
        # derivative of the Lagrange interpolant through (x0, x1, x2)
        w0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
        w1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
        w2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
        idx[i] = (j - 1, j, j + 1)
        w[i] = (w0, w1, w2)
    return idx, w


def _apply_stencil(values: np.ndarray, axis: int, idx: np.ndarray,
                   w: np.ndarray) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = (
        w[:, 0].reshape(-1, *([1] * (v.ndim - 1))) * v[idx[:, 0]]
        + w[:, 1].reshape(-1, *([1] * (v.ndim - 1))) * v[idx[:, 1]]
        + w[:, 2].reshape(-1, *([1] * (v.ndim - 1))) * v[idx[:, 2]]
    )
    return np.moveaxis(out, 0, axis)


def _periodic_spectral(values: np.ndarray, axis: int) -> np.ndarray:
    """Derivative along a uniform periodic [0, 2pi) axis via the FFT."""
    n = values.shape[axis]
    vhat = np.fft.rfft(values, axis=axis)
    k = np.arange(vhat.shape[axis])
    if n % 2 == 0:
        k[-1] = 0  # drop the unpaired Nyquist mode
    shape = [1] * values.ndim
    shape[axis] = -1
    vhat *= 1j * k.reshape(shape)
    return np.fft.irfft(vhat, n=n, axis=axis)


def _diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """Polynomial differentiation matrix on arbitrary nodes (barycentric)."""
    x = np.asarray(nodes, dtype=float)
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / diff.prod(axis=1)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


class SampledMap:
    """A map B^4 -> R^d sampled on a polar grid, with finite differences.

    Coordinates: x = rho * (cos(eta) e^{i phi1}, sin(eta) e^{i phi2}) read as
    R^4. Radii form a decreasing-toward-zero geometric ladder stored in
    increasing order; eta uses Gauss-Legendre nodes on (0, pi/2), the phi
    angles a uniform periodic grid.
    """

    def __init__(self, f, r_max: float = 1.0, n_radial: int = 41,
                 ratio: float = 0.9, n_eta: int = 16, n_phi: int = 32):
        if not 0 < ratio < 1:
            raise ValueError("radial ratio must lie in (0, 1)")
        self.r_max = float(r_max)
        self.ratio = float(ratio)
        self.radii = r_max * ratio ** np.arange(n_radial)[::-1]
        nodes, wts = np.polynomial.legendre.leggauss(n_eta)
        self.eta = 0.25 * math.pi * (nodes + 1.0)
        self.w_eta = 0.25 * math.pi * wts
        self.n_phi = n_phi
        self.phi = 2 * math.pi * np.arange(n_phi) / n_phi
        self.f = f
        self._grad = None

        rho = self.radii[:, None, None, None]
        eta = self.eta[None, :, None, None]
        p1 = self.phi[None, None, :, None]
        p2 = self.phi[None, None, None, :]
        full = (n_radial, n_eta, n_phi, n_phi)
        x = np.stack(
            [
                np.broadcast_to(rho * np.cos(eta) * np.cos(p1), full),
                np.broadcast_to(rho * np.cos(eta) * np.sin(p1), full),
                np.broadcast_to(rho * np.sin(eta) * np.cos(p2), full),
                np.broadcast_to(rho * np.sin(eta) * np.sin(p2), full),
            ],
            axis=-1,
        )
        self.points = x
        flat = x.reshape(-1, 4)
        vals = np.asarray(f(flat), dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        self.d = vals.shape[1]
        self.values = vals.reshape(n_radial, n_eta, n_phi, n_phi, self.d)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("map values must be finite")
        # sphere quadrature weights including the cos*sin area factor
        dphi = 2 * math.pi / n_phi
        self.sphere_weights = (
            self.w_eta[:, None, None]
            * np.cos(self.eta)[:, None, None]
            * np.sin(self.eta)[:, None, None]
            * dphi**2
            * np.ones((1, n_phi, n_phi))
        )

    # -- differentiation -------------------------------------------------

    def frame_partials(self):
        """Partials along the orthogonal polar frame, each (R,E,P,P,d).

        Order: d/d rho, (1/rho) d/d eta, the two normalized phi directions.
        """
        if self._grad is not None:
            return self._grad
        v = self.values
        idx_r, w_r = _stencil_1d(self.radii)
        du_rho = _apply_stencil(v, 0, idx_r, w_r)
        D_eta = _diff_matrix(self.eta)
        du_eta = np.einsum("ef,rfabd->reabd", D_eta, v)
        du_p1 = _periodic_spectral(v, 2)
        du_p2 = _periodic_spectral(v, 3)
        rho = self.radii[:, None, None, None, None]
        ce = np.cos(self.eta)[None, :, None, None, None]
        se = np.sin(self.eta)[None, :, None, None, None]
        self._grad = (du_rho, du_eta / rho, du_p1 / (rho * ce),
                      du_p2 / (rho * se))
        return self._grad

    def frame_vectors(self):
        """Orthonormal frame (e_rho, e_eta, e_phi1, e_phi2) at the nodes."""
        eta = self.eta[None, :, None, None]
        p1 = self.phi[None, None, :, None]
        p2 = self.phi[None, None, None, :]
        shape = (1, len(self.eta), self.n_phi, self.n_phi)
        ce, se = np.cos(eta), np.sin(eta)
        c1, s1 = np.cos(p1), np.sin(p1)
        c2, s2 = np.cos(p2), np.sin(p2)
        zero = np.zeros(shape)

        def pack(*comps):
            return np.stack([np.broadcast_to(c, shape) for c in comps], axis=-1)

        e_rho = pack(ce * c1, ce * s1, se * c2, se * s2)
        e_eta = pack(-se * c1, -se * s1, ce * c2, ce * s2)
        e_p1 = pack(-s1, c1, zero, zero)
        e_p2 = pack(zero, zero, -s2, c2)
        return e_rho, e_eta, e_p1, e_p2

    def gradient(self):
        """Full Cartesian Jacobian at every node, shape (R,E,P,P,d,4)."""
        parts = self.frame_partials()
        frames = self.frame_vectors()
        out = np.zeros(self.values.shape + (4,))
        for du, e in zip(parts, frames):
            out += du[..., :, None] * e[..., None, :]
        return out

    def energy_density(self) -> np.ndarray:
        """|grad u|^2 per node, shape (R,E,P,P)."""
        parts = self.frame_partials()
        return sum(np.einsum("...d,...d->...", p, p) for p in parts)

    def radial_density(self) -> np.ndarray:
        """|du/dR|^2 per node."""
        du = self.frame_partials()[0]
        return np.einsum("...d,...d->...", du, du)

    # -- integration -----------------------------------------------------

    def sphere_integral(self, density: np.ndarray) -> np.ndarray:
        """Integrate a (R,E,P,P) density over the sphere at each radius."""
        return np.einsum("reab,eab->r", density, self.sphere_weights)

    def _radius_index(self, r: float) -> int:
        k = int(np.argmin(np.abs(self.radii - r)))
        if abs(self.radii[k] - r) > 1e-9 * self.r_max:
            raise ValueError(f"radius {r} is not on the grid ladder")
        return k

    def ball_integral(self, density: np.ndarray, r: float,
                      radial_weight=None) -> float:
        """Integrate density * radial_weight(rho) over the ball B_r.

        Trapezoidal in radius over the geometric ladder; the hole below the
        innermost radius is closed with the local power-law model.
        """
        from scipy.integrate import simpson

        k = self._radius_index(r)
        S = self.sphere_integral(density)
        rho = self.radii
        wfun = (lambda t: 1.0) if radial_weight is None else radial_weight
        F = np.array([rho[i] ** 3 * S[i] * wfun(rho[i]) for i in range(len(rho))])
        # the ladder is uniform in log radius; Simpson there is high order
        if k >= 2:
            s = np.log(rho[: k + 1])
            acc = float(simpson(F[: k + 1] * rho[: k + 1], x=s))
        else:
            acc = float(np.trapezoid(F[: k + 1], rho[: k + 1]))
        # hole: assume F ~ F(rho_0) * (rho/rho_0)^p with p from the first step
        if F[0] > 0 and F[1] > 0:
            p = math.log(F[1] / F[0]) / math.log(rho[1] / rho[0])
            p = min(max(p, 0.0), 8.0)
        else:
            p = 3.0
        acc += float(F[0] * rho[0] / (p + 1.0))
        return acc


def scaled_energy(u: SampledMap, r: float) -> float:
    """r^{2-2n} times the Dirichlet energy on B_r (domain dimension 2n=4)."""
    E = u.ball_integral(u.energy_density(), r)
    return E / r**2


def radial_energy(u: SampledMap, sigma: float, tau: float) -> float:
    """Integral of R^{2-2n} |du/dR|^2 over the annulus, sigma may be 0."""
    dens = u.radial_density()
    w = lambda t: t**-2
    top = u.ball_integral(dens, tau, w)
    if sigma <= 0:
        return top
    return top - u.ball_integral(dens, sigma, w)


def map_monotonicity_check(u: SampledMap, ladder, tol: float = 0.01):
    """Smallest C making both energy monotonicity inequalities hold.

    Direct form: (e^{C tau}/tau^2) E(tau) - (e^{C sigma}/sigma^2) E(sigma)
    >= 2 * radial energy of the annulus. Reverse form: the same difference
    with e^{-C rho} weights is <= (2 + C) times the radial energy; at C = 0
    both reduce to the exact monotonicity identity of holomorphic maps.
    Returns (C, passed).
    """
    ladder = np.sort(np.asarray(ladder, dtype=float))
    if len(ladder) < 5:
        raise ValueError("at least 5 ladder scales required")
    E = np.array([u.ball_integral(u.energy_density(), r) for r in ladder])
    dens = u.radial_density()
    w = lambda t: t**-2
    cum = np.array([u.ball_integral(dens, r, w) for r in ladder])
    rad = np.diff(cum)
    theta = E / ladder**2
    scale = max(theta.max(), 1e-30)

    def ok(c):
        up = np.exp(c * ladder) * theta
        down = np.exp(-c * ladder) * theta
        direct = np.all(np.diff(up) >= 2 * rad - tol * scale)
        reverse = np.all(np.diff(down) <= (2 + c) * rad + tol * scale)
        return bool(direct and reverse)

    if ok(0.0):
        return 0.0, True
    lo, hi = 0.0, 1e3
    if not ok(hi):
        return hi, False
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi, True


def target_structure(d: int) -> np.ndarray:
    """Standard complex structure matrix on R^d (d even)."""
    if d % 2:
        raise ValueError("even target dimension required")
    J = np.zeros((d, d))
    for a in range(d // 2):
        J[2 * a + 1, 2 * a] = 1.0
        J[2 * a, 2 * a + 1] = -1.0
    return J


class AlmostComplexField:
    """Domain almost complex structure J(x) with J(0) the standard one.

    Built as a conjugation J = T J0 T^{-1} so that J^2 = -Id holds exactly;
    the deviation from J0 grows linearly with a configurable slope.
    """

    def __init__(self, matrix_fn, slope: float = 0.0, matrix_many_fn=None):
        self.J0 = target_structure(4)
        self._fn = matrix_fn
        self._many = matrix_many_fn
        self.slope = slope

    @staticmethod
    def standard() -> "AlmostComplexField":
        J0 = target_structure(4)
        return AlmostComplexField(lambda x: J0, slope=0.0)

    @staticmethod
    def perturbed(c: float, seed: int = 11) -> "AlmostComplexField":
        """Slope-c perturbation J(x) = T(x) J0 T(x)^{-1}, T = I + c x_1 K."""
        J0 = target_structure(4)
        rng = np.random.default_rng(seed)
        K = rng.normal(size=(4, 4))
        K /= np.linalg.norm(K, 2)

        def fn(x):
            T = np.eye(4) + c * x[0] * K
            return T @ J0 @ np.linalg.inv(T)

        def many(pts):
            T = np.eye(4)[None] + c * pts[:, 0, None, None] * K[None]
            return T @ J0 @ np.linalg.inv(T)

        return AlmostComplexField(fn, slope=c, matrix_many_fn=many)

    @staticmethod
    def from_diffeo(jac_fn, slope: float) -> "AlmostComplexField":
        """Pullback structure (D psi)^{-1} J0 (D psi) of a domain diffeo."""
        J0 = target_structure(4)

        def fn(x):
            D = jac_fn(x)
            return np.linalg.solve(D, J0 @ D)

        return AlmostComplexField(fn, slope=slope)

    def matrix(self, x) -> np.ndarray:
        return self._fn(np.asarray(x, dtype=float))

    def matrix_many(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self._many is not None:
            return self._many(points)
        return np.array([self._fn(x) for x in points])

    def deviation(self, x) -> np.ndarray:
        return self.matrix(x) - self.J0

    def verify(self, n_samples: int = 64, seed: int = 5, radius: float = 1.0):
        """Sampled structure checks: J^2 = -Id and linear deviation growth.

        Returns (max |J^2 + Id|, max |J - J0| / |x|).
        """
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(n_samples, 4))
        pts *= radius * rng.uniform(0.05, 1, n_samples)[:, None] / np.linalg.norm(
            pts, axis=1
        )[:, None]
        sq = 0.0
        lin = 0.0
        for x in pts:
            J = self.matrix(x)
            sq = max(sq, float(np.abs(J @ J + np.eye(4)).max()))
            lin = max(lin, float(np.linalg.norm(J - self.J0, 2))
                      / float(np.linalg.norm(x)))
        return sq, lin


@dataclass
class VectorField:
    """Compactly supported test field on B^4 with an analytic Jacobian."""

    value: callable  # (P, 4) -> (P, 4)
    jacobian: callable  # (P, 4) -> (P, 4, 4), entry [i, j] = d xi^j / d x_i
    support_radius: float = 1.0


def _bump(t: np.ndarray):
    """C^2 cutoff: 1 at t<=0, 0 at t>=1, with derivative."""
    tc = np.clip(t, 0.0, 1.0)
    val = 1.0 - tc**3 * (10.0 - 15.0 * tc + 6.0 * tc * tc)
    der = -30.0 * tc**2 * (1.0 - tc) ** 2
    der = np.where((t <= 0) | (t >= 1), 0.0, der)
    return val, der


def radial_bump_field(r0: float = 0.5, r1: float = 0.9) -> VectorField:
    """xi(x) = phi(|x|) x with a smooth cutoff between r0 and r1."""

    def value(x):
        r = np.linalg.norm(x, axis=1)
        val, _ = _bump((r - r0) / (r1 - r0))
        return val[:, None] * x

    def jacobian(x):
        r = np.linalg.norm(x, axis=1)
        val, der = _bump((r - r0) / (r1 - r0))
        der = der / (r1 - r0)
        rr = np.where(r > 1e-12, r, 1.0)
        out = np.einsum("p,ij->pij", val, np.eye(4))
        out += np.einsum("p,pi,pj->pij", der / rr, x, x)
        return out

    return VectorField(value, jacobian, r1)


def random_bump_field(seed: int, r1: float = 0.9) -> VectorField:
    """Quadratic polynomial field times the radial cutoff."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=4)
    B = rng.normal(size=(4, 4))

    def poly(x):
        return a[None, :] + x @ B.T

    def value(x):
        r = np.linalg.norm(x, axis=1)
        val, _ = _bump(r / r1)
        return val[:, None] * poly(x)

    def jacobian(x):
        r = np.linalg.norm(x, axis=1)
        val, der = _bump(r / r1)
        der = der / r1
        rr = np.where(r > 1e-12, r, 1.0)
        # d/dx_i [phi * p^j] = phi' (x_i/r) p^j + phi B_{ji}
        out = np.einsum("p,pi,pj->pij", der / rr, x, poly(x))
        out += np.einsum("p,ji->pij", val, B)
        return out

    return VectorField(value, jacobian, r1)


def inner_variation_residual(u: SampledMap, xi: VectorField,
                             J: AlmostComplexField) -> float:
    """Stationarity residual: stress-energy pairing minus the four
    structure-perturbation terms; zero (to quadrature) for standard-structure
    holomorphic maps, and O(slope * r) times the energy in general.
    """
    if xi.support_radius >= u.r_max - 1e-12:
        # sampled compactness check on the outermost sphere
        edge = np.abs(xi.value(u.points[-1].reshape(-1, 4))).max()
        if edge > 1e-10:
            raise ValueError("test field must vanish near the boundary")
    pts = u.points.reshape(-1, 4)
    Du = u.gradient().reshape(-1, u.d, 4)
    dens = u.energy_density().reshape(-1)
    Dxi = xi.jacobian(pts)  # (P, i, j) = d xi^j / d x_i
    gram = np.einsum("pai,paj->pij", Du, Du)
    lhs = dens * np.einsum("pii->p", Dxi) - 2.0 * np.einsum(
        "pij,pij->p", gram, Dxi
    )
    B = target_structure(u.d)
    J0 = J.J0
    div = np.einsum("pii->p", Dxi)
    rhs = np.zeros(len(pts))
    if J.slope != 0.0:
        A = J.matrix_many(pts) - J.J0[None]
        M = np.einsum("pkl,pml->pkm", A, A) + 2.0 * np.einsum(
            "pkl,ml->pkm", A, J0
        )
        phi = np.einsum("pak,pkl,pbl,ba->p", Du, A, Du, B)
        T2 = np.einsum("pki,pak,ba,pbj->pij", A, Du, B, Du)
        psi = np.einsum("pkl,pkl->p", gram, M)
        T4 = np.einsum("pki,pkj->pij", M, gram)
        rhs = (
            -0.5 * phi * div
            + np.einsum("pij,pij->p", T2, Dxi)
            - 0.5 * psi * div
            + np.einsum("pij,pij->p", T4, Dxi)
        )
    resid = lhs - rhs
    grid = resid.reshape(u.values.shape[:4])
    # integrate over the whole ball (xi vanishes near the boundary)
    return u.ball_integral(grid, u.r_max)


def coarea_slice_check(u: SampledMap, n_lines: int = 128, seed: int = 7,
                       density: np.ndarray | None = None):
    """Reassemble the ball integral from complex lines through the origin.

    Each line zeta -> zeta * a carries the Jacobian weight |zeta|^2; the
    average over uniformly sampled projective classes times the line-space
    volume pi must reproduce the ball integral. Returns (per-line values,
    reassembled integral, ball integral, consistency ratio).
    """
    if n_lines < 64:
        raise ValueError("at least 64 line samples required")
    if density is None:
        density = u.energy_density()
    phi_ext = np.append(u.phi, 2 * math.pi)
    interp = RegularGridInterpolator(
        (u.radii, u.eta, phi_ext, phi_ext),
        np.pad(density, ((0, 0), (0, 0), (0, 1), (0, 1)), mode="wrap"),
        bounds_error=False,
        fill_value=None,
    )

    def sample(points):
        rel = points
        rho = np.linalg.norm(rel, axis=1)
        z1 = np.abs(rel[:, 0] + 1j * rel[:, 1])
        eta = np.arctan2(np.abs(rel[:, 2] + 1j * rel[:, 3]), z1)
        p1 = np.arctan2(rel[:, 1], rel[:, 0]) % (2 * math.pi)
        p2 = np.arctan2(rel[:, 3], rel[:, 2]) % (2 * math.pi)
        eta = np.clip(eta, u.eta[0], u.eta[-1])
        rho = np.clip(rho, u.radii[0], u.radii[-1])
        return interp(np.column_stack([rho, eta, p1, p2]))

    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n_lines, 2)) + 1j * rng.normal(size=(n_lines, 2))
    a /= np.linalg.norm(a, axis=1)[:, None]
    # polar quadrature on the unit disk of the line parameter
    nr, nt = 24, 48
    tr = (np.arange(nr) + 0.5) / nr
    tt = 2 * math.pi * np.arange(nt) / nt
    zeta = (tr[:, None] * np.exp(1j * tt[None, :])).ravel()
    wq = (1.0 / nr) * (2 * math.pi / nt) * np.abs(zeta) * np.abs(zeta) ** 2
    per_line = np.empty(n_lines)
    for k in range(n_lines):
        zpts = zeta[:, None] * a[k][None, :]
        pts = np.column_stack(
            [zpts[:, 0].real, zpts[:, 0].imag, zpts[:, 1].real, zpts[:, 1].imag]
        )
        per_line[k] = float(sample(pts) @ wq)
    reassembled = math.pi * per_line.mean()
    ball = u.ball_integral(density, u.r_max)
    ratio = reassembled / ball if ball else math.nan
    return per_line, reassembled, ball, ratio


def tangent_map_gap(u: SampledMap, sigma: float, tau: float) -> float:
    """L^2 sphere distance between the dilations u(tau x) and u(sigma x)."""
    if not 0 < sigma < tau:
        raise ValueError("need 0 < sigma < tau")
    ks = u._radius_index(sigma)
    kt = u._radius_index(tau)
    diff = u.values[kt] - u.values[ks]
    d2 = np.einsum("...d,...d->...", diff, diff)
    return math.sqrt(float(np.einsum("eab,eab->", d2, u.sphere_weights)))


def map_rate_fit(u: SampledMap, ladder, mode: str = "A",
                 theta_hat: float | None = None) -> bl.RateFit:
    """Power-law fit of the scaled-energy trace over a decreasing ladder."""
    ladder = np.asarray(sorted(ladder, reverse=True), dtype=float)
    masses = np.array(
        [u.ball_integral(u.energy_density(), r) for r in ladder]
    )
    trace = bl.DensityTrace(np.zeros(4), ladder, masses)
    return bl.rate_fit(trace, mode=mode, theta_hat=theta_hat)


def _hopf_point(z: np.ndarray) -> np.ndarray:
    """Class [z1:z2] as a point of the round 2-sphere."""
    n2 = np.abs(z[:, 0]) ** 2 + np.abs(z[:, 1]) ** 2
    n2 = np.maximum(n2, 1e-300)
    w = 2.0 * np.conj(z[:, 0]) * z[:, 1]
    return np.column_stack(
        [w.real / n2, w.imag / n2, (np.abs(z[:, 0]) ** 2 - np.abs(z[:, 1]) ** 2) / n2]
    )


MAP_EXAMPLE_NAMES = ("constant", "z1", "z1z2", "hopf", "z1-warped")


def map_example(name: str, slope: float = 0.1, **grid):
    """Named sampled maps; z1-warped is holomorphic for a perturbed
    structure (returned alongside the map)."""
    if name == "constant":
        return SampledMap(lambda x: np.tile([0.7, -0.2], (len(x), 1)), **grid)
    if name == "z1":
        return SampledMap(lambda x: x[:, :2].copy(), **grid)
    if name == "z1z2":

        def f(x):
            z = (x[:, 0] + 1j * x[:, 1]) * (x[:, 2] + 1j * x[:, 3])
            return np.column_stack([z.real, z.imag])

        return SampledMap(f, **grid)
    if name == "hopf":

        def f(x):
            z = np.column_stack([x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]])
            return _hopf_point(z)

        return SampledMap(f, **grid)
    if name == "z1-warped":
        # u = z1 after the domain warp psi(x) = x + slope * q(x), q quadratic
        def psi(x):
            q = np.column_stack(
                [x[:, 0] * x[:, 2], x[:, 1] * x[:, 3],
                 np.zeros(len(x)), np.zeros(len(x))]
            )
            return x + slope * q

        def f(x):
            y = psi(x)
            return y[:, :2]

        def jac(x):
            D = np.eye(4)
            D = D.copy()
            D[0, 0] += slope * x[2]
            D[0, 2] = slope * x[0]
            D[1, 1] += slope * x[3]
            D[1, 3] = slope * x[1]
            return D

        u = SampledMap(f, **grid)
        J = AlmostComplexField.from_diffeo(jac, slope)
        return u, J
    raise ValueError(f"unknown map example {name!r}")
