"""Microdisk near field in the grating plane and dipole excitation currents.

The field is either an analytic whispering-gallery approximation or a
sampled grid read from disk (for instance the in-plane field of a bare-disk
full-wave run). Sampling the field at hole centers gives the currents of the
Hertzian-dipole array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ._validation import (
    InvalidParameterError,
    NearFieldFormatError,
    OutOfDomainError,
    check_finite_array,
    check_positive,
)
from .lattice import positions_array

#: Impedance of free space in ohms.
Z0 = 376.730313668

POLARIZATIONS = ("azimuthal", "radial")


@dataclass(frozen=True)
class DiskSpec:
    r_d: float = 1.5427
    t: float = 0.9411
    r_u: float = 1.45
    n_disk: float = 2.4
    n_sub: float = 1.4

    def __post_init__(self):
        check_positive("r_d", self.r_d)
        check_positive("t", self.t)
        check_positive("r_u", self.r_u)
        if self.r_u > self.r_d:
            raise InvalidParameterError(f"undercut radius r_u={self.r_u} exceeds disk radius r_d={self.r_d}")
        if not (self.n_disk > self.n_sub >= 1.0):
            raise InvalidParameterError(
                f"need n_disk > n_sub >= 1, got n_disk={self.n_disk}, n_sub={self.n_sub}"
            )


@dataclass(frozen=True)
class ModeSpec:
    """Analytic whispering-gallery mode.

    ``r_peak``, ``radial_width`` and ``decay_length`` shape the radial
    envelope; they are calibration knobs, not measured quantities.
    ``r_peak=None`` means ``r_d - 0.25``. ``wavelength`` only sets the
    physical scale for reporting (all geometry is in units of it).
    """

    m: int = 18
    wavelength: float = 619e-9
    polarization: str = "azimuthal"
    r_peak: float | None = None
    radial_width: float = 0.25
    decay_length: float = 0.1
    standing_wave: bool = True
    amplitude: complex = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise InvalidParameterError(f"azimuthal mode number must be a non-negative integer, got {self.m!r}")
        if self.polarization not in POLARIZATIONS:
            raise InvalidParameterError(f"polarization must be one of {POLARIZATIONS}, got {self.polarization!r}")
        check_positive("wavelength", self.wavelength)
        check_positive("radial_width", self.radial_width)
        check_positive("decay_length", self.decay_length)
        if self.r_peak is not None:
            check_positive("r_peak", self.r_peak)

    def peak_radius(self, disk: DiskSpec) -> float:
        r_peak = disk.r_d - 0.25 if self.r_peak is None else self.r_peak
        if r_peak > disk.r_d or r_peak <= 0:
            raise InvalidParameterError(f"r_peak={r_peak} must lie in (0, r_d={disk.r_d}]")
        return r_peak


class NearField:
    """Complex in-plane field ``(E_x, E_y, E_z)`` as a function of ``(x, y)``."""

    provenance = "abstract"

    def __call__(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        if xy.shape[-1] != 2:
            raise InvalidParameterError(f"query points must have shape (N, 2), got {xy.shape}")
        return self._evaluate(xy)

    def _evaluate(self, xy: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


class AnalyticNearField(NearField):
    """``E(r, phi) = e_pol * g(r) * A(phi)``.

    ``g`` is a Gaussian bump centered at ``r_peak`` inside the disk, joined
    continuously to an exponential tail beyond ``r_d``. ``A`` is
    ``cos(m*phi)`` for a standing wave or ``exp(1j*m*phi)`` for a traveling one.
    """

    provenance = "analytic"

    def __init__(self, disk: DiskSpec, mode: ModeSpec):
        self.disk = disk
        self.mode = mode
        self.r_peak = mode.peak_radius(disk)

    def radial_profile(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        w = self.mode.radial_width
        r_d = self.disk.r_d
        inside = np.exp(-0.5 * ((r - self.r_peak) / w) ** 2)
        edge = math.exp(-0.5 * ((r_d - self.r_peak) / w) ** 2)
        outside = edge * np.exp(-(r - r_d) / self.mode.decay_length)
        return np.where(r <= r_d, inside, outside)

    def azimuthal_factor(self, phi) -> np.ndarray:
        m = self.mode.m
        if self.mode.standing_wave:
            return np.cos(m * np.asarray(phi)).astype(complex)
        return np.exp(1j * m * np.asarray(phi))

    def _evaluate(self, xy):
        x, y = xy[:, 0], xy[:, 1]
        r = np.hypot(x, y)
        phi = np.arctan2(y, x)
        amp = self.mode.amplitude * self.radial_profile(r) * self.azimuthal_factor(phi)
        # The polarization direction is undefined at the axis; the field is set to zero there.
        amp = np.where(r > 0, amp, 0.0)
        c, s = np.cos(phi), np.sin(phi)
        out = np.zeros((len(xy), 3), dtype=complex)
        if self.mode.polarization == "azimuthal":
            out[:, 0] = -s * amp
            out[:, 1] = c * amp
        else:
            out[:, 0] = c * amp
            out[:, 1] = s * amp
        return out


def analytic_mode(disk: DiskSpec, mode: ModeSpec) -> AnalyticNearField:
    return AnalyticNearField(disk, mode)


class GridNearField(NearField):
    """Bilinear interpolation of a uniformly sampled field.

    ``values`` has shape ``(ny, nx, 3)``. Queries outside the sampled
    rectangle raise :class:`OutOfDomainError`.
    """

    provenance = "imported"

    def __init__(self, x0: float, y0: float, dx: float, dy: float, values):
        values = np.asarray(values, dtype=complex)
        if values.ndim != 3 or values.shape[2] != 3:
            raise InvalidParameterError(f"values must have shape (ny, nx, 3), got {values.shape}")
        ny, nx, _ = values.shape
        if nx < 2 or ny < 2:
            raise InvalidParameterError("a near-field grid needs at least 2 samples per axis")
        if not (dx > 0 and dy > 0):
            raise NearFieldFormatError(f"non-uniform grid: spacings must be positive, got dx={dx}, dy={dy}")
        if not np.all(np.isfinite(values)):
            raise NearFieldFormatError("near-field samples contain NaN or infinite values")
        self.x0, self.y0, self.dx, self.dy = float(x0), float(y0), float(dx), float(dy)
        self.values = values
        self.x = self.x0 + self.dx * np.arange(nx)
        self.y = self.y0 + self.dy * np.arange(ny)
        self._interp = RegularGridInterpolator((self.y, self.x), values, method="linear", bounds_error=False)

    @property
    def extent(self) -> tuple[float, float, float, float]:
        return (self.x[0], self.x[-1], self.y[0], self.y[-1])

    def _evaluate(self, xy):
        tol = 1e-9 * max(self.dx, self.dy)
        x, y = xy[:, 0], xy[:, 1]
        bad = (x < self.x[0] - tol) | (x > self.x[-1] + tol) | (y < self.y[0] - tol) | (y > self.y[-1] + tol)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise OutOfDomainError(
                f"point ({x[i]:.6g}, {y[i]:.6g}) lies outside the sampled extent {self.extent}"
            )
        pts = np.column_stack([np.clip(y, self.y[0], self.y[-1]), np.clip(x, self.x[0], self.x[-1])])
        return self._interp(pts)


def sample_grid(field: NearField, x0: float, y0: float, dx: float, dy: float, nx: int, ny: int) -> GridNearField:
    """Tabulate ``field`` on a uniform grid."""
    xs = x0 + dx * np.arange(nx)
    ys = y0 + dy * np.arange(ny)
    xx, yy = np.meshgrid(xs, ys)
    vals = field(np.column_stack([xx.ravel(), yy.ravel()])).reshape(ny, nx, 3)
    return GridNearField(x0, y0, dx, dy, vals)


_HEADER_KEYS = ("nx", "ny", "x0", "y0", "dx", "dy")


def write_nearfield(path, grid: GridNearField) -> None:
    """Write a grid in the plain-text near-field format (x varies fastest)."""
    ny, nx, _ = grid.values.shape
    lines = [f"nx {nx}", f"ny {ny}", f"x0 {grid.x0!r}", f"y0 {grid.y0!r}", f"dx {grid.dx!r}", f"dy {grid.dy!r}"]
    flat = grid.values.reshape(-1, 3)
    for e in flat:
        lines.append(" ".join(repr(float(v)) for v in (e[0].real, e[0].imag, e[1].real, e[1].imag, e[2].real, e[2].imag)))
    Path(path).write_text("\n".join(lines) + "\n")


def import_nearfield(path) -> GridNearField:
    """Read a near-field grid file.

    The file starts with ``key value`` lines for ``nx ny x0 y0 dx dy``,
    followed by ``nx*ny`` records of six numbers (real and imaginary parts
    of ``E_x, E_y, E_z``) in row-major, x-fastest order. Blank lines and
    ``#`` comments are ignored. Errors carry the 1-based line number.
    """
    header: dict[str, float] = {}
    records = []
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace("=", " ").split()
        if len(header) < len(_HEADER_KEYS):
            key = parts[0].lower()
            if key not in _HEADER_KEYS or len(parts) != 2:
                raise NearFieldFormatError(f"expected header line '<{'|'.join(_HEADER_KEYS)}> <value>', got {raw!r}", row=lineno)
            if key in header:
                raise NearFieldFormatError(f"duplicate header key {key!r}", row=lineno)
            try:
                header[key] = float(parts[1])
            except ValueError:
                raise NearFieldFormatError(f"header value for {key!r} is not a number", row=lineno) from None
            continue
        if len(parts) != 6:
            raise NearFieldFormatError(f"expected 6 values per record, found {len(parts)}", row=lineno)
        try:
            rec = [float(p) for p in parts]
        except ValueError:
            raise NearFieldFormatError("record contains a non-numeric value", row=lineno) from None
        if not all(math.isfinite(r) for r in rec):
            raise NearFieldFormatError("record contains NaN or infinite values", row=lineno)
        records.append(rec)
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise NearFieldFormatError(f"missing header keys: {', '.join(missing)}")
    nx, ny = header["nx"], header["ny"]
    if nx != int(nx) or ny != int(ny) or nx < 2 or ny < 2:
        raise NearFieldFormatError(f"nx and ny must be integers >= 2, got nx={nx}, ny={ny}")
    nx, ny = int(nx), int(ny)
    if len(records) != nx * ny:
        raise NearFieldFormatError(f"expected {nx * ny} records for a {nx}x{ny} grid, found {len(records)}")
    arr = np.asarray(records)
    vals = (arr[:, 0::2] + 1j * arr[:, 1::2]).reshape(ny, nx, 3)
    return GridNearField(header["x0"], header["y0"], header["dx"], header["dy"], vals)


@dataclass
class DipoleArray:
    """Hertzian dipoles at hole centers.

    ``positions`` is ``(N, 3)`` and ``currents`` is ``(N, 3)`` complex
    (``I_x, I_y, I_z``). ``eta_med`` is the medium impedance and ``k`` the
    wavenumber in the medium, in radians per unit length.
    """

    positions: np.ndarray
    currents: np.ndarray
    length: float = 0.01
    eta_med: float = Z0 / 1.4
    k: float = 2 * math.pi * 1.4
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.positions = check_finite_array("positions", np.asarray(self.positions, dtype=float), ndim=2, last=3)
        self.currents = check_finite_array("currents", np.asarray(self.currents, dtype=complex), ndim=2, last=3)
        if len(self.positions) != len(self.currents):
            raise InvalidParameterError("positions and currents differ in length")
        check_positive("dipole length", self.length)
        check_positive("eta_med", self.eta_med)
        check_positive("k", self.k)
        if len(self.positions) > 1:
            uniq = np.unique(np.round(self.positions, 12), axis=0)
            if len(uniq) != len(self.positions):
                raise InvalidParameterError("dipole positions must be distinct")

    def __len__(self):
        return len(self.positions)


def medium_constants(n_medium: float) -> tuple[float, float]:
    """Wavenumber (per free-space wavelength) and impedance of a medium of index ``n``."""
    check_positive("n_medium", n_medium)
    return 2 * math.pi * n_medium, Z0 / n_medium


def sample_currents(
    field: NearField,
    holes,
    include_z: bool = False,
    n_medium: float = 1.4,
    length: float = 0.01,
    z: float = 0.0,
) -> DipoleArray:
    """Dipole currents equal to the field at each hole center.

    With ``include_z=False`` the out-of-plane current is dropped, since
    z-polarized light sees no boundary discontinuity at a vertical hole wall.
    """
    xy = positions_array(holes)
    if len(xy) == 0:
        cur = np.zeros((0, 3), dtype=complex)
    else:
        cur = np.array(field(xy), dtype=complex)
    if not include_z:
        cur[:, 2] = 0.0
    k, eta = medium_constants(n_medium)
    pos = np.column_stack([xy, np.full(len(xy), float(z))]) if len(xy) else np.zeros((0, 3))
    return DipoleArray(pos, cur, length=length, eta_med=eta, k=k)


def overlap_report(field: NearField, holes) -> np.ndarray:
    """Field magnitude at each hole center, scaled so the largest is 1."""
    xy = positions_array(holes)
    if len(xy) == 0:
        return np.zeros(0)
    mag = np.linalg.norm(field(xy), axis=1)
    peak = mag.max()
    if peak == 0:
        return np.zeros_like(mag)
    return mag / peak
