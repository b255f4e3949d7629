"""Far-field patterns, power integrals, collection efficiency and the alpha fit.

Two routes to the far field are provided. :func:`dipole_farfield` sums the
radiation of a Hertzian-dipole array directly. :func:`ntf_surface` projects
equivalent surface currents sampled on a plane, and serves as an independent
cross-check. Patterns live on a uniform ``(theta, phi)`` grid; integrals use
the trapezoid rule in ``theta`` and the periodic rule in ``phi``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import (
    GridMismatchError,
    InvalidParameterError,
    NearFieldFormatError,
    ZeroPowerError,
    check_positive,
)
from .nearfield import Z0, DipoleArray

# Rows of theta handled per work item; fixed so results do not depend on the thread count.
_BLOCK_ROWS = 16


@dataclass(frozen=True)
class SphericalGrid:
    """Uniform sampling of polar angle ``theta`` and azimuth ``phi`` (radians)."""

    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        for name, arr in (("theta", theta), ("phi", phi)):
            if arr.ndim != 1 or len(arr) < 2:
                raise InvalidParameterError(f"{name} needs at least 2 samples")
            d = np.diff(arr)
            if np.any(d <= 0):
                raise InvalidParameterError(f"{name} samples must be strictly increasing")
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
                raise InvalidParameterError(f"{name} samples must be uniformly spaced")
        if theta[0] < -1e-12 or theta[-1] > math.pi + 1e-9:
            raise InvalidParameterError("theta must lie within [0, pi]")

    @classmethod
    def uniform(cls, resolution_deg: float = 0.5, theta_max: float = math.pi) -> "SphericalGrid":
        """Grid from ``theta=0`` to ``theta_max`` inclusive with a full periodic ``phi`` axis."""
        check_positive("resolution_deg", resolution_deg)
        h = math.radians(resolution_deg)
        nt = int(round(theta_max / h)) + 1
        nphi = int(round(2 * math.pi / h))
        theta = np.linspace(0.0, (nt - 1) * h, nt)
        theta[-1] = min(theta[-1], math.pi)
        phi = np.arange(nphi) * (2 * math.pi / nphi)
        return cls(theta, phi)

    @property
    def dtheta(self) -> float:
        return float(self.theta[1] - self.theta[0])

    @property
    def dphi(self) -> float:
        return float(self.phi[1] - self.phi[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.theta), len(self.phi))

    @property
    def periodic_phi(self) -> bool:
        return math.isclose(len(self.phi) * self.dphi, 2 * math.pi, rel_tol=1e-9)

    def mesh(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def same_as(self, other: "SphericalGrid") -> bool:
        return (
            self.shape == other.shape
            and np.allclose(self.theta, other.theta, rtol=0, atol=1e-9)
            and np.allclose(self.phi, other.phi, rtol=0, atol=1e-9)
        )


@dataclass
class FarFieldGrid:
    """Far-field components and radial Poynting flux on a spherical grid."""

    grid: SphericalGrid
    e_theta: np.ndarray
    e_phi: np.ndarray
    eta_med: float = Z0 / 1.4
    k: float = 2 * math.pi * 1.4
    s_r: np.ndarray | None = None

    def __post_init__(self):
        self.e_theta = np.asarray(self.e_theta, dtype=complex)
        self.e_phi = np.asarray(self.e_phi, dtype=complex)
        if self.e_theta.shape != self.grid.shape or self.e_phi.shape != self.grid.shape:
            raise InvalidParameterError("field arrays do not match the grid shape")
        if self.s_r is None:
            self.s_r = (np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2) / self.eta_med
        else:
            self.s_r = np.asarray(self.s_r, dtype=float)
            if self.s_r.shape != self.grid.shape:
                raise InvalidParameterError("s_r does not match the grid shape")
            if np.any(self.s_r < 0):
                raise InvalidParameterError("s_r must be non-negative")

    @classmethod
    def from_power(cls, grid: SphericalGrid, s_r, eta_med: float = Z0 / 1.4, k: float = 2 * math.pi * 1.4):
        """Wrap a bare power pattern (field components set to zero)."""
        z = np.zeros(grid.shape, dtype=complex)
        return cls(grid, z, z.copy(), eta_med=eta_med, k=k, s_r=np.asarray(s_r, dtype=float))

    def scaled(self, factor: float) -> "FarFieldGrid":
        """Pattern with power multiplied by ``factor`` (fields by its square root)."""
        if factor < 0:
            raise InvalidParameterError("power scale must be non-negative")
        r = math.sqrt(factor)
        return FarFieldGrid(self.grid, self.e_theta * r, self.e_phi * r, self.eta_med, self.k, self.s_r * factor)


def _unit_vectors(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = (st * cp, st * sp, ct)
    that = (ct * cp, ct * sp, -st)
    phat = (-sp, cp, np.zeros_like(theta))
    return rhat, that, phat


def _dipole_block(dipoles: DipoleArray, theta, phi, radius):
    (rx, ry, rz), that, phat = _unit_vectors(theta, phi)
    k = dipoles.k
    ax = np.zeros(theta.shape, dtype=complex)
    ay = np.zeros(theta.shape, dtype=complex)
    az = np.zeros(theta.shape, dtype=complex)
    for (x, y, z), (ix, iy, iz) in zip(dipoles.positions, dipoles.currents):
        if radius is None:
            w = np.exp(1j * k * (rx * x + ry * y + rz * z))
        else:
            dist = np.sqrt((radius * rx - x) ** 2 + (radius * ry - y) ** 2 + (radius * rz - z) ** 2)
            # Common factor R*exp(+jkR) removed so both modes share one scale.
            w = np.exp(-1j * k * (dist - radius)) * (radius / dist)
        if ix != 0:
            ax += ix * w
        if iy != 0:
            ay += iy * w
        if iz != 0:
            az += iz * w
    c = dipoles.eta_med * dipoles.length * k / (4j * math.pi)
    e_theta = c * (ax * that[0] + ay * that[1] + az * that[2])
    e_phi = c * (ax * phat[0] + ay * phat[1])
    return e_theta, e_phi


def dipole_farfield(
    dipoles: DipoleArray,
    grid: SphericalGrid,
    mode: str = "fraunhofer",
    radius: float | None = None,
    threads: int = 1,
) -> FarFieldGrid:
    """Far field of a Hertzian-dipole array.

    Parameters
    ----------
    dipoles : DipoleArray
        Positions and complex currents; ``k`` and ``eta_med`` describe the medium.
    grid : SphericalGrid
        Observation directions.
    mode : {"fraunhofer", "finite_radius"}
        ``fraunhofer`` keeps only the phase ``exp(+jk rhat.r')`` of each
        dipole. ``finite_radius`` evaluates the exact spherical-wave factor
        on a sphere of the given ``radius``; the common ``exp(-jkR)/R`` is
        divided out so the two modes are directly comparable.
    threads : int
        Worker threads. The output is bit-identical for any value.
    """
    if len(dipoles) == 0:
        raise InvalidParameterError("dipole array is empty")
    if mode == "fraunhofer":
        rad = None
    elif mode == "finite_radius":
        if radius is None:
            raise InvalidParameterError("finite_radius mode needs a radius")
        rad = check_positive("radius", radius)
        span = float(np.max(np.linalg.norm(dipoles.positions, axis=1)))
        if rad < 100 * span:
            raise InvalidParameterError(f"radius {rad} must be at least 100x the array extent ({span:.4g})")
    else:
        raise InvalidParameterError(f"unknown far-field mode {mode!r}")

    th, ph = grid.mesh()
    blocks = [slice(i, i + _BLOCK_ROWS) for i in range(0, th.shape[0], _BLOCK_ROWS)]

    def work(sl):
        return _dipole_block(dipoles, th[sl], ph[sl], rad)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(sl) for sl in blocks]
    e_theta = np.concatenate([p[0] for p in parts], axis=0)
    e_phi = np.concatenate([p[1] for p in parts], axis=0)
    return FarFieldGrid(grid, e_theta, e_phi, eta_med=dipoles.eta_med, k=dipoles.k)


def _theta_profile(ff: FarFieldGrid) -> np.ndarray:
    """``sin(theta) * integral of S_r over phi`` for each theta row."""
    g = ff.grid
    if not g.periodic_phi:
        raise InvalidParameterError("power integrals need a full periodic phi axis")
    return np.sin(g.theta) * ff.s_r.sum(axis=1) * g.dphi


def _cumulative(theta, f, t):
    """Integral of the piecewise-linear interpolant of ``f`` from ``theta[0]`` to ``t``."""
    h = theta[1] - theta[0]
    cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (f[1:] + f[:-1]))])
    j = int(np.clip(np.searchsorted(theta, t, side="right") - 1, 0, len(theta) - 2))
    delta = t - theta[j]
    if delta <= 0:
        return float(cum[j])
    ft = f[j] + (f[j + 1] - f[j]) * delta / h
    return float(cum[j] + 0.5 * delta * (f[j] + ft))


def power_between(ff: FarFieldGrid, theta_lo: float, theta_hi: float) -> float:
    """Power through the band ``theta_lo <= theta <= theta_hi``."""
    g = ff.grid
    tol = 1e-9
    if theta_lo > theta_hi:
        raise InvalidParameterError("theta_lo must not exceed theta_hi")
    if theta_lo < g.theta[0] - tol or theta_hi > g.theta[-1] + tol:
        raise InvalidParameterError(
            f"region [{theta_lo:.6g}, {theta_hi:.6g}] rad is outside grid coverage "
            f"[{g.theta[0]:.6g}, {g.theta[-1]:.6g}]"
        )
    f = _theta_profile(ff)
    lo = max(theta_lo, g.theta[0])
    hi = min(theta_hi, g.theta[-1])
    return _cumulative(g.theta, f, hi) - _cumulative(g.theta, f, lo)


def total_power(ff: FarFieldGrid, region: str | tuple = "full") -> float:
    """Integrate ``S_r`` over a region of the sphere.

    ``region`` is ``"full"``, ``"upper"``, ``"lower"``, ``("cone", theta0)``
    or ``("annulus", theta_lo, theta_hi)`` with angles in radians.
    """
    if region == "full":
        return power_between(ff, 0.0, math.pi)
    if region == "upper":
        return power_between(ff, 0.0, math.pi / 2)
    if region == "lower":
        return power_between(ff, math.pi / 2, math.pi)
    kind = region[0]
    if kind == "cone":
        return power_between(ff, 0.0, float(region[1]))
    if kind == "annulus":
        return power_between(ff, float(region[1]), float(region[2]))
    raise InvalidParameterError(f"unknown region {region!r}")


def na_to_theta(na: float, n_collect: float = 1.4) -> float:
    check_positive("NA", na)
    check_positive("n_collect", n_collect)
    if na > n_collect * (1 + 1e-12):
        raise InvalidParameterError(f"NA={na} exceeds the collection index {n_collect}")
    return math.asin(min(na / n_collect, 1.0))


def collection_efficiency(ff: FarFieldGrid, na: float, n_collect: float = 1.4) -> float:
    """Fraction of the full-sphere power inside the cone ``theta <= asin(NA/n_collect)`` about +z."""
    theta0 = na_to_theta(na, n_collect)
    total = total_power(ff, "full")
    if not total > 0:
        raise ZeroPowerError("far-field pattern carries no power; collection efficiency is undefined")
    return min(max(power_between(ff, 0.0, theta0) / total, 0.0), 1.0)


def efficiency_curve(ff: FarFieldGrid, nas, n_collect: float = 1.4) -> list[tuple[float, float]]:
    """Collection efficiency for each numerical aperture in ``nas``."""
    total = total_power(ff, "full")
    if not total > 0:
        raise ZeroPowerError("far-field pattern carries no power; collection efficiency is undefined")
    g = ff.grid
    f = _theta_profile(ff)
    out = []
    for na in nas:
        theta0 = na_to_theta(float(na), n_collect)
        if theta0 > g.theta[-1] + 1e-9:
            raise InvalidParameterError("cone extends past grid coverage")
        p = _cumulative(g.theta, f, min(theta0, g.theta[-1]))
        out.append((float(na), min(max(p / total, 0.0), 1.0)))
    return out


@dataclass(frozen=True)
class SurfaceCurrents:
    """Equivalent surface currents at sampled points of a surface.

    ``points``, ``J`` and ``M`` have shape ``(N, 3)``; ``areas`` holds the
    surface element of each sample. ``J`` and ``M`` are the electric and
    magnetic surface current densities. The medium is described by its
    refractive index (relative permeability 1). Build instances with
    :meth:`plane` for a uniform rectangle or :func:`box_surface` for a closed
    box.
    """

    points: np.ndarray
    J: np.ndarray
    M: np.ndarray
    areas: np.ndarray
    n_medium: float = 1.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        J = np.asarray(self.J, dtype=complex).reshape(-1, 3)
        M = np.asarray(self.M, dtype=complex).reshape(-1, 3)
        areas = np.broadcast_to(np.asarray(self.areas, dtype=float), (len(pts),)).copy()
        if J.shape != pts.shape or M.shape != pts.shape:
            raise InvalidParameterError("J and M must have one 3-vector per sample point")
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(M)) and np.all(np.isfinite(pts))):
            raise InvalidParameterError("surface currents contain non-finite values")
        if np.any(areas <= 0):
            raise InvalidParameterError("surface elements must have positive area")
        check_positive("n_medium", self.n_medium)
        for name, val in (("points", pts), ("J", J), ("M", M), ("areas", areas)):
            object.__setattr__(self, name, val)

    @classmethod
    def plane(cls, x, y, z0: float, J, M, n_medium: float = 1.0) -> "SurfaceCurrents":
        """Currents on the uniform rectangle ``x`` by ``y`` at height ``z0``.

        ``J`` and ``M`` have shape ``(len(y), len(x), 3)``.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        for name, arr in (("x", x), ("y", y)):
            if arr.ndim != 1 or len(arr) < 2:
                raise InvalidParameterError(f"{name} needs at least 2 samples")
            if not np.allclose(np.diff(arr), arr[1] - arr[0], rtol=1e-9, atol=1e-12):
                raise InvalidParameterError(f"{name} samples must be uniform")
        shape = (len(y), len(x), 3)
        if np.shape(J) != shape or np.shape(M) != shape:
            raise InvalidParameterError(f"J and M must have shape {shape}")
        xx, yy = np.meshgrid(x, y)
        pts = np.column_stack([xx.ravel(), yy.ravel(), np.full(xx.size, float(z0))])
        area = (x[1] - x[0]) * (y[1] - y[0])
        return cls(pts, J, M, area, n_medium)

    def __len__(self):
        return len(self.points)

    @property
    def k(self) -> float:
        return 2 * math.pi * self.n_medium

    @property
    def eta_med(self) -> float:
        return Z0 / self.n_medium


def ntf_surface(sc: SurfaceCurrents, grid: SphericalGrid, chunk: int = 2048) -> FarFieldGrid:
    """Far-zone projection of surface currents.

    Forms the radiation vectors ``N = sum J exp(jk rhat.r') dA`` and
    ``L = sum M exp(jk rhat.r') dA`` and returns
    ``E_theta = k/(4 pi j) (L_phi + eta N_theta)`` and
    ``E_phi = -k/(4 pi j) (L_theta - eta N_phi)``, with the common
    ``exp(-jkr)/r`` dropped as in :func:`dipole_farfield`.
    """
    if len(sc) == 0:
        raise InvalidParameterError("surface current set is empty")
    k, eta = sc.k, sc.eta_med
    th, ph = grid.mesh()
    (rx, ry, rz), that, phat = _unit_vectors(th, ph)
    rhat = np.column_stack([rx.ravel(), ry.ravel(), rz.ravel()])
    jw = sc.J * sc.areas[:, None]
    mw = sc.M * sc.areas[:, None]
    n_vec = np.empty((len(rhat), 3), dtype=complex)
    l_vec = np.empty((len(rhat), 3), dtype=complex)
    for start in range(0, len(rhat), chunk):
        sl = slice(start, start + chunk)
        phase = np.exp(1j * k * (rhat[sl] @ sc.points.T))
        n_vec[sl] = phase @ jw
        l_vec[sl] = phase @ mw
    n_vec = n_vec.reshape(th.shape + (3,))
    l_vec = l_vec.reshape(th.shape + (3,))
    n_th = sum(n_vec[..., i] * that[i] for i in range(3))
    n_ph = n_vec[..., 0] * phat[0] + n_vec[..., 1] * phat[1]
    l_th = sum(l_vec[..., i] * that[i] for i in range(3))
    l_ph = l_vec[..., 0] * phat[0] + l_vec[..., 1] * phat[1]
    c = k / (4j * math.pi)
    e_theta = c * (l_ph + eta * n_th)
    e_phi = -c * (l_th - eta * n_ph)
    return FarFieldGrid(grid, e_theta, e_phi, eta_med=eta, k=k)


def hertzian_near_fields(points, moment, k: float, eta: float, origin=(0.0, 0.0, 0.0)):
    """Exact E and H of a Hertzian dipole.

    ``moment`` is the complex vector ``I*l``; time dependence ``exp(+jwt)``.
    Returns two ``(N, 3)`` complex arrays.
    """
    pts = np.asarray(points, dtype=float) - np.asarray(origin, dtype=float)
    p = np.asarray(moment, dtype=complex)
    r = np.linalg.norm(pts, axis=1)
    if np.any(r == 0):
        raise InvalidParameterError("fields are singular at the dipole position")
    rhat = pts / r[:, None]
    phase = np.exp(-1j * k * r) / (4 * math.pi)
    rp = rhat @ p
    transverse = p[None, :] - rhat * rp[:, None]
    quasi = 3 * rhat * rp[:, None] - p[None, :]
    e = eta * phase[:, None] * (
        (-1j * k / r)[:, None] * transverse + (1 / r**2 + 1 / (1j * k * r**3))[:, None] * quasi
    )
    h = phase[:, None] * (1j * k / r + 1 / r**2)[:, None] * np.cross(p[None, :], rhat)
    return e, h


def box_points(half: float, cell: float, center=(0.0, 0.0, 0.0)):
    """Cell centers, outward normals and areas tiling the surface of a cube."""
    n = max(int(round(2 * half / cell)), 1)
    h = 2 * half / n
    c = -half + (np.arange(n) + 0.5) * h
    a, b = np.meshgrid(c, c)
    a, b = a.ravel(), b.ravel()
    pts, normals = [], []
    for axis in range(3):
        others = [i for i in range(3) if i != axis]
        for sign in (1.0, -1.0):
            p = np.zeros((a.size, 3))
            p[:, axis] = sign * half
            p[:, others[0]] = a
            p[:, others[1]] = b
            nrm = np.zeros((a.size, 3))
            nrm[:, axis] = sign
            pts.append(p)
            normals.append(nrm)
    pts = np.vstack(pts) + np.asarray(center, dtype=float)
    return pts, np.vstack(normals), np.full(len(pts), h * h)


def box_surface(e_func, h_func, half: float, cell: float, center=(0.0, 0.0, 0.0), n_medium: float = 1.0):
    """Equivalent currents ``J = n x H``, ``M = -n x E`` on a closed cube.

    ``e_func`` and ``h_func`` map an ``(N, 3)`` array of points to fields.
    """
    pts, nrm, areas = box_points(half, cell, center)
    e = e_func(pts)
    h = h_func(pts)
    return SurfaceCurrents(pts, np.cross(nrm, h), -np.cross(nrm, e), areas, n_medium)


def dipole_box_currents(moment, half: float = 0.5, cell: float = 0.05, n_medium: float = 1.0, origin=(0.0, 0.0, 0.0)):
    """Sample a dipole's exact near fields on a closed cube around it."""
    k = 2 * math.pi * n_medium
    eta = Z0 / n_medium
    return box_surface(
        lambda p: hertzian_near_fields(p, moment, k, eta, origin)[0],
        lambda p: hertzian_near_fields(p, moment, k, eta, origin)[1],
        half,
        cell,
        origin,
        n_medium,
    )


def array_box_currents(dipoles: DipoleArray, half: float, cell: float, center=(0.0, 0.0, 0.0)):
    """Sample the exact near fields of a whole dipole array on a closed cube.

    The cube must enclose every dipole. The medium follows ``dipoles.k``.
    """
    pos = dipoles.positions - np.asarray(center, dtype=float)
    if np.any(np.abs(pos) >= half):
        raise InvalidParameterError("the box must enclose every dipole")
    n_medium = dipoles.k / (2 * math.pi)
    moments = dipoles.currents * dipoles.length

    def fields(p):
        e = np.zeros((len(p), 3), dtype=complex)
        h = np.zeros((len(p), 3), dtype=complex)
        for r0, m in zip(dipoles.positions, moments):
            de, dh = hertzian_near_fields(p, m, dipoles.k, dipoles.eta_med, r0)
            e += de
            h += dh
        return e, h

    pts, nrm, areas = box_points(half, cell, center)
    e, h = fields(pts)
    return SurfaceCurrents(pts, np.cross(nrm, h), -np.cross(nrm, e), areas, n_medium)


def dipole_plane_currents(
    moment, height: float, half_width: float, spacing: float, n_medium: float = 1.0, taper: float = 0.0
):
    """Sample a dipole's exact fields on the plane ``z = height`` (normal +z).

    An open plane only captures directions whose specular point lies on it,
    and a hard edge adds diffraction of the same order as the signal.
    ``taper`` is the fraction of the half-width over which a raised-cosine
    window rolls the currents off to zero.
    """
    k = 2 * math.pi * n_medium
    eta = Z0 / n_medium
    n = int(round(2 * half_width / spacing)) + 1
    xs = np.linspace(-half_width, half_width, n)
    xx, yy = np.meshgrid(xs, xs)
    pts = np.column_stack([xx.ravel(), yy.ravel(), np.full(xx.size, height)])
    e, h = hertzian_near_fields(pts, moment, k, eta)
    zhat = np.array([0.0, 0.0, 1.0])
    J = np.cross(zhat[None, :], h).reshape(n, n, 3)
    M = -np.cross(zhat[None, :], e).reshape(n, n, 3)
    if taper > 0:
        inner = half_width * (1 - taper)
        ramp = np.clip((np.abs(xs) - inner) / (half_width - inner), 0.0, 1.0)
        w1 = 0.5 * (1 + np.cos(np.pi * ramp))
        win = (w1[:, None] * w1[None, :])[:, :, None]
        J, M = J * win, M * win
    return SurfaceCurrents.plane(xs, xs, height, J, M, n_medium=n_medium)


@dataclass(frozen=True)
class AlphaFit:
    alpha: float
    rmse: float
    theta_max: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rmse": self.rmse,
            "theta_max_deg": math.degrees(self.theta_max),
            "n_points": self.n_points,
        }


def normalized_power(ff: FarFieldGrid) -> np.ndarray:
    total = total_power(ff, "full")
    if not total > 0:
        raise ZeroPowerError("cannot normalize a pattern with zero power")
    return ff.s_r / total


def alpha_fit(
    model: FarFieldGrid,
    reference: FarFieldGrid,
    theta_max: float = math.radians(70.0),
    normalize: bool = False,
) -> AlphaFit:
    """Least-squares scale ``alpha`` minimizing ``sum (alpha*S_model - S_ref)^2`` for ``theta <= theta_max``.

    With ``normalize=True`` both patterns are first divided by their
    full-sphere power. The RMS residual is taken over the same grid points.
    """
    if not model.grid.same_as(reference.grid):
        raise GridMismatchError("model and reference far fields use different grids")
    if theta_max > model.grid.theta[-1] + 1e-9:
        raise InvalidParameterError("fit region extends past grid coverage")
    sm, sr = model.s_r, reference.s_r
    if normalize:
        sm, sr = normalized_power(model), normalized_power(reference)
    rows = model.grid.theta <= theta_max + 1e-9
    a = sm[rows].ravel()
    b = sr[rows].ravel()
    denom = float(a @ a)
    if denom == 0:
        raise ZeroPowerError("model pattern is zero over the fit region")
    alpha = max(float(a @ b) / denom, 0.0)
    resid = alpha * a - b
    rmse = math.sqrt(float(resid @ resid) / a.size)
    return AlphaFit(alpha=alpha, rmse=rmse, theta_max=float(theta_max), n_points=int(a.size))


def write_farfield(path, ff: FarFieldGrid) -> None:
    """Write a pattern as text: header then rows ``theta phi ReEt ImEt ReEp ImEp S_r`` (degrees)."""
    g = ff.grid
    lines = [
        f"# eta_med {ff.eta_med:.17g}",
        f"# k {ff.k:.17g}",
        f"ntheta {len(g.theta)}",
        f"nphi {len(g.phi)}",
        f"dtheta_deg {math.degrees(g.dtheta):.17g}",
        f"dphi_deg {math.degrees(g.dphi):.17g}",
    ]
    th_deg = np.degrees(g.theta)
    ph_deg = np.degrees(g.phi)
    for i in range(len(g.theta)):
        et, ep, s = ff.e_theta[i], ff.e_phi[i], ff.s_r[i]
        for j in range(len(g.phi)):
            lines.append(
                f"{th_deg[i]:.17g} {ph_deg[j]:.17g} {et[j].real:.17g} {et[j].imag:.17g} "
                f"{ep[j].real:.17g} {ep[j].imag:.17g} {s[j]:.17g}"
            )
    Path(path).write_text("\n".join(lines) + "\n")


def read_farfield(path) -> FarFieldGrid:
    """Read a pattern written by :func:`write_farfield` (or any file in that format)."""
    meta = {}
    header = {}
    rows = []
    keys = ("ntheta", "nphi", "dtheta_deg", "dphi_deg")
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2:
                try:
                    meta[parts[0]] = float(parts[1])
                except ValueError:
                    pass
            continue
        parts = line.replace("=", " ").split()
        if len(header) < len(keys):
            if len(parts) != 2 or parts[0] not in keys:
                raise NearFieldFormatError(f"expected far-field header line, got {raw!r}", row=lineno)
            try:
                header[parts[0]] = float(parts[1])
            except ValueError:
                raise NearFieldFormatError(f"header value for {parts[0]!r} is not a number", row=lineno) from None
            continue
        if len(parts) != 7:
            raise NearFieldFormatError(f"expected 7 values per row, found {len(parts)}", row=lineno)
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise NearFieldFormatError("row contains a non-numeric value", row=lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise NearFieldFormatError("row contains NaN or infinite values", row=lineno)
        rows.append(vals)
    if len(header) < len(keys):
        raise NearFieldFormatError("far-field header is incomplete")
    nt, nphi = int(header["ntheta"]), int(header["nphi"])
    if len(rows) != nt * nphi:
        raise NearFieldFormatError(f"expected {nt * nphi} rows, found {len(rows)}")
    arr = np.asarray(rows).reshape(nt, nphi, 7)
    theta = np.radians(arr[:, 0, 0])
    phi = np.radians(arr[0, :, 1])
    if not np.allclose(np.diff(theta), math.radians(header["dtheta_deg"]), rtol=1e-6, atol=1e-12):
        raise NearFieldFormatError("theta samples are not uniform at the declared spacing")
    if nphi > 1 and not np.allclose(np.diff(phi), math.radians(header["dphi_deg"]), rtol=1e-6, atol=1e-12):
        raise NearFieldFormatError("phi samples are not uniform at the declared spacing")
    grid = SphericalGrid(theta, phi)
    eta = meta.get("eta_med", Z0 / 1.4)
    k = meta.get("k", 2 * math.pi * 1.4)
    return FarFieldGrid(
        grid,
        arr[:, :, 2] + 1j * arr[:, :, 3],
        arr[:, :, 4] + 1j * arr[:, :, 5],
        eta_med=eta,
        k=k,
        s_r=arr[:, :, 6],
    )
