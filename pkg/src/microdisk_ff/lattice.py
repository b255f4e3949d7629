"""Triangular hole lattice: positions, hexagonal traces and alignment reduction.

Lengths are in units of the free-space wavelength. The lattice basis is
``a1 = (a, 0)`` and ``a2 = (a/2, a*sqrt(3)/2)``; a hole sits at
``n1*a1 + n2*a2 - (u, v)`` relative to the disk center.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import InvalidParameterError, check_positive

SQRT3 = math.sqrt(3.0)
TAN30 = math.tan(math.pi / 6)

# Relative slack used when deciding membership on region boundaries.
_EPS = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """Grating geometry.

    Parameters
    ----------
    a : float
        Lattice constant.
    r_h : float
        Hole radius; holes must not overlap (``2*r_h < a``).
    d : float
        Etch depth of the grating layer.
    u, v : float
        Alignment offset of the lattice relative to the disk center.
    """

    a: float
    r_h: float = 0.2
    d: float = 0.2931
    u: float = 0.0
    v: float = 0.0

    def __post_init__(self):
        check_positive("a", self.a)
        check_positive("r_h", self.r_h)
        check_positive("d", self.d)
        if 2 * self.r_h >= self.a:
            raise InvalidParameterError(
                f"holes overlap: 2*r_h={2 * self.r_h!r} must be smaller than a={self.a!r}"
            )
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise InvalidParameterError("alignment offsets must be finite")

    @property
    def is_centered(self) -> bool:
        return self.u == 0.0 and self.v == 0.0


@dataclass(frozen=True)
class HolePosition:
    x: float
    y: float
    trace_index: int | None = None

    @property
    def distance(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def angle(self) -> float:
        """Polar angle in ``[0, 2*pi)``."""
        return math.atan2(self.y, self.x) % (2 * math.pi)


def basis(a: float) -> np.ndarray:
    """Rows are the primitive vectors ``a1`` and ``a2``."""
    return np.array([[a, 0.0], [a / 2, a * SQRT3 / 2]])


def hex_distance(n1, n2):
    """Index of the hexagonal trace holding lattice point ``(n1, n2)``."""
    n1 = np.asarray(n1)
    n2 = np.asarray(n2)
    return np.maximum(np.maximum(np.abs(n1), np.abs(n2)), np.abs(n1 + n2))


def _sorted_holes(xy: np.ndarray, traces) -> list[HolePosition]:
    dist = np.hypot(xy[:, 0], xy[:, 1])
    ang = np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2 * np.pi)
    # Rounded keys so that floating-point noise cannot reorder equal distances.
    ang = np.where(np.round(ang, 10) >= round(2 * np.pi, 10), 0.0, ang)
    order = np.lexsort((np.round(ang, 10), np.round(dist, 10)))
    out = []
    for i in order:
        t = None if traces is None else int(traces[i])
        out.append(HolePosition(float(xy[i, 0]), float(xy[i, 1]), t))
    return out


def generate_lattice(spec: LatticeSpec, extent: float) -> list[HolePosition]:
    """All hole centers within ``extent`` of the disk center.

    Holes are ordered by distance from the center, then by polar angle.
    ``trace_index`` is filled in only for a centered lattice.
    """
    check_positive("extent", extent)
    a = check_positive("a", spec.a)
    shift = math.hypot(spec.u, spec.v)
    nmax = int(math.ceil((extent + shift) / (a * SQRT3 / 2))) + 1
    rng = np.arange(-nmax, nmax + 1)
    n1, n2 = np.meshgrid(rng, rng, indexing="ij")
    n1 = n1.ravel()
    n2 = n2.ravel()
    xy = np.stack([n1, n2], axis=1) @ basis(a) - np.array([spec.u, spec.v])
    keep = np.hypot(xy[:, 0], xy[:, 1]) <= extent + _EPS * a
    traces = hex_distance(n1[keep], n2[keep]) if spec.is_centered else None
    return _sorted_holes(xy[keep], traces)


def hex_trace(n: int, a: float = 1.0) -> list[HolePosition]:
    """The ``6n`` lattice points on the perimeter of the n-th hexagon about a lattice point."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"trace index must be a positive integer, got {n!r}")
    n = int(n)
    check_positive("a", a)
    # Walk the six edges: start at corner n*a1 and step along the six neighbor directions.
    steps = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)]
    i, j = n, 0
    pts = []
    for di, dj in steps:
        for _ in range(n):
            pts.append((i, j))
            i += di
            j += dj
    idx = np.array(pts)
    xy = idx @ basis(a)
    return _sorted_holes(xy, np.full(len(pts), n))


def positions_array(holes) -> np.ndarray:
    """Stack hole centers into an ``(N, 2)`` array."""
    if len(holes) == 0:
        return np.zeros((0, 2))
    return np.array([(h.x, h.y) for h in holes], dtype=float)


def symmetry_points(a: float) -> dict[str, tuple[float, float]]:
    """The two named alignments: A on a lattice point, B at the far corner of the reduced domain."""
    check_positive("a", a)
    return {"A": (0.0, 0.0), "B": (a / 4, a * TAN30 / 4)}


def reduce_alignment(u: float, v: float, a: float) -> tuple[float, float]:
    """Map ``(u, v)`` to its representative under the full symmetry group of the lattice.

    Uses lattice translations plus the 12 rotations/reflections about a
    lattice point. The result lies in the triangle with corners ``(0, 0)``,
    ``(a/2, 0)`` and ``(a/2, a/(2*sqrt(3)))``. Every alignment in the same
    orbit yields the same hole pattern up to a rigid rotation or reflection.
    """
    check_positive("a", a)
    # Nearest lattice point: search the four corners of the containing cell and their neighbors.
    frac = np.linalg.solve(basis(a).T, np.array([u, v], dtype=float))
    base = np.floor(frac)
    best = None
    for d1 in (-1, 0, 1, 2):
        for d2 in (-1, 0, 1, 2):
            p = np.array([base[0] + d1, base[1] + d2]) @ basis(a)
            r = np.array([u, v]) - p
            d = float(r @ r)
            if best is None or d < best[0] - _EPS * a * a:
                best = (d, r)
    x, y = best[1]
    rho = math.hypot(x, y)
    if rho <= _EPS * a:
        return (0.0, 0.0)
    phi = math.atan2(y, x) % (math.pi / 3)
    if phi > math.pi / 6:
        phi = math.pi / 3 - phi
    x, y = rho * math.cos(phi), rho * math.sin(phi)
    # Points on the hexagon boundary may round slightly outside the wedge.
    x = min(x, a / 2)
    y = min(max(y, 0.0), x * TAN30)
    return (x, y)


def _fold_map(a: float):
    o = np.array([0.0, 0.0])
    p = np.array([a / 2, 0.0])
    q = np.array([a / 2, a * TAN30 / 2])
    m1, m2, m3 = (o + p) / 2, (p + q) / 2, (o + q) / 2
    target = (o, m1, m3)
    # Each quarter of the wedge, listed with vertices ordered to match ``target``.
    return target, [(o, m1, m3), (m1, p, m2), (m3, m2, q), (m2, m3, m1)]


def _barycentric(pt, tri):
    t0, t1, t2 = tri
    mat = np.column_stack([t1 - t0, t2 - t0])
    l1, l2 = np.linalg.solve(mat, pt - t0)
    return 1 - l1 - l2, l1, l2


def canonicalize_alignment(u: float, v: float, a: float) -> tuple[float, float]:
    """Fold an alignment into ``0 <= u' <= a/4``, ``0 <= v' <= u' tan(pi/6)``.

    The first stage is :func:`reduce_alignment`, which is exact. The wedge
    it lands in is four times larger than the target domain, so the second
    stage splits it into four congruent quarter-triangles and carries the
    point into the corner quarter by the rigid motion matching their
    vertices. That second stage is a bookkeeping map and not a lattice
    symmetry; use :func:`reduce_alignment` when the physical alignment is
    needed.
    """
    x, y = reduce_alignment(u, v, a)
    pt = np.array([x, y])
    target, quarters = _fold_map(a)
    for tri in quarters:
        lam = _barycentric(pt, tri)
        if min(lam) >= -1e-9:
            bary = np.clip(lam, 0.0, None)
            bary = bary / bary.sum()
            out = bary[0] * target[0] + bary[1] * target[1] + bary[2] * target[2]
            if tri is quarters[0]:
                return (x, y)
            u2 = float(min(max(out[0], 0.0), a / 4))
            v2 = float(min(max(out[1], 0.0), u2 * TAN30))
            return (u2, v2)
    raise AssertionError("reduced alignment fell outside the symmetry wedge")  # pragma: no cover


def in_reduced_domain(u: float, v: float, a: float, tol: float = 1e-12) -> bool:
    return -tol <= u <= a / 4 + tol and -tol <= v <= u * TAN30 + tol


def point_group_images(u: float, v: float) -> list[tuple[float, float]]:
    """The 12 images of ``(u, v)`` under the rotations and reflections about a lattice point."""
    out = []
    for k in range(6):
        c, s = math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)
        out.append((c * u - s * v, s * u + c * v))
        out.append((c * u + s * v, s * u - c * v))
    return out
