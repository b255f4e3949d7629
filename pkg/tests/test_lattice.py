import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microdisk_ff import InvalidParameterError
from microdisk_ff.lattice import (
    LatticeSpec,
    basis,
    canonicalize_alignment,
    generate_lattice,
    hex_distance,
    hex_trace,
    in_reduced_domain,
    point_group_images,
    positions_array,
    reduce_alignment,
    symmetry_points,
)

A = 0.5168


def brute_force_ring(n, a):
    """Lattice points whose hexagonal index equals ``n``, by exhaustive search."""
    b = basis(a)
    pts = []
    for n1, n2 in itertools.product(range(-n - 1, n + 2), repeat=2):
        if max(abs(n1), abs(n2), abs(n1 + n2)) == n:
            pts.append(np.array([n1, n2]) @ b)
    return np.array(sorted(map(tuple, np.round(pts, 12))))


@pytest.mark.parametrize("n", range(1, 11))
def test_hex_trace_matches_enumeration(n):
    got = positions_array(hex_trace(n, A))
    assert len(got) == 6 * n
    assert np.allclose(np.array(sorted(map(tuple, np.round(got, 12)))), brute_force_ring(n, A), atol=1e-12)


def test_trace_three_distance_groups():
    d = np.array([p.distance for p in hex_trace(3, A)])
    assert np.sum(np.abs(d - math.sqrt(7) * A) < 1e-9) == 12
    assert np.sum(np.abs(d - 3 * A) < 1e-9) == 6


@pytest.mark.parametrize("n", [0, -1, 1.5])
def test_hex_trace_rejects_bad_index(n):
    with pytest.raises(InvalidParameterError):
        hex_trace(n, A)


def test_hex_distance_is_trace_index():
    assert hex_distance(2, -1) == 2
    assert hex_distance(-3, 3) == 3
    assert hex_distance(0, 0) == 0


def test_generate_lattice_centered_counts():
    holes = generate_lattice(LatticeSpec(a=1.0), 3.0 + 1e-9)
    # within radius 3: center, 6 at 1, 6 at sqrt3, 6 at 2, 12 at sqrt7, 6 at 3
    assert len(holes) == 37
    assert holes[0].trace_index == 0
    assert sorted({h.trace_index for h in holes}) == [0, 1, 2, 3]
    d = [h.distance for h in holes]
    assert d == sorted(d) or np.all(np.diff(np.round(d, 9)) >= 0)


def test_generate_lattice_offset_shifts_every_hole():
    base = positions_array(generate_lattice(LatticeSpec(a=1.0), 10.0))
    shifted = generate_lattice(LatticeSpec(a=1.0, u=0.2, v=0.1), 9.0)
    assert shifted[0].trace_index is None
    # every shifted hole is a lattice point moved by (-u, -v)
    xy = positions_array(shifted) + np.array([0.2, 0.1])
    dmin = np.min(np.linalg.norm(xy[:, None, :] - base[None, :, :], axis=2), axis=1)
    assert np.all(dmin < 1e-12)


def test_lattice_spec_validation():
    with pytest.raises(InvalidParameterError):
        LatticeSpec(a=0.4, r_h=0.2)
    with pytest.raises(InvalidParameterError):
        LatticeSpec(a=-1.0)
    with pytest.raises(InvalidParameterError):
        generate_lattice(LatticeSpec(a=1.0), -1.0)


def test_small_extent():
    assert len(generate_lattice(LatticeSpec(a=1.0), 0.1)) == 1
    assert len(generate_lattice(LatticeSpec(a=1.0, u=0.3), 0.1)) == 0
    with pytest.raises(InvalidParameterError):
        generate_lattice(LatticeSpec(a=1.0), 0.0)


def test_symmetry_points_in_domain():
    pts = symmetry_points(A)
    assert pts["A"] == (0.0, 0.0)
    for u, v in pts.values():
        assert in_reduced_domain(u, v, A)
        assert canonicalize_alignment(u, v, A) == pytest.approx((u, v), abs=1e-12)


def _pattern_key(u, v, a, extent=2.5):
    """Sorted hole distances from the disk center; invariant under rigid rotations/reflections."""
    holes = generate_lattice(LatticeSpec(a=a, r_h=0.1 * a, u=u, v=v), extent * a)
    return np.sort([h.distance for h in holes])[:20]


coord = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(coord, coord)
def test_reduce_lands_in_wedge_and_is_idempotent(u, v):
    x, y = reduce_alignment(u, v, 1.0)
    assert -1e-12 <= y <= x * math.tan(math.pi / 6) + 1e-12
    assert x <= 0.5 + 1e-12
    assert reduce_alignment(x, y, 1.0) == pytest.approx((x, y), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(coord, coord)
def test_reduce_preserves_hole_pattern(u, v):
    x, y = reduce_alignment(u, v, 1.0)
    assert np.allclose(_pattern_key(u, v, 1.0), _pattern_key(x, y, 1.0), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(coord, coord, st.integers(-3, 3), st.integers(-3, 3))
def test_reduce_invariant_under_symmetry_group(u, v, n1, n2):
    ref = reduce_alignment(u, v, 1.0)
    t = np.array([n1, n2]) @ basis(1.0)
    for x, y in point_group_images(u, v):
        assert reduce_alignment(x + t[0], y + t[1], 1.0) == pytest.approx(ref, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(coord, coord)
def test_canonical_domain_and_idempotence(u, v):
    x, y = canonicalize_alignment(u, v, A)
    assert in_reduced_domain(x, y, A, tol=1e-9)
    assert canonicalize_alignment(x, y, A) == pytest.approx((x, y), abs=1e-9)


def test_canonical_is_constant_on_orbits():
    rng = np.random.default_rng(3)
    for u, v in rng.uniform(-1, 1, (50, 2)):
        ref = canonicalize_alignment(u, v, A)
        for x, y in point_group_images(u, v):
            assert canonicalize_alignment(x + A, y, A) == pytest.approx(ref, abs=1e-9)


def test_point_group_images_are_isometries():
    imgs = np.array(point_group_images(0.3, 0.1))
    assert imgs.shape == (12, 2)
    assert np.allclose(np.hypot(imgs[:, 0], imgs[:, 1]), math.hypot(0.3, 0.1))
    assert len(np.unique(np.round(imgs, 12), axis=0)) == 12
