"""scikit-learn style front end for the dipole emission model.

:class:`MicrodiskEmitter` bundles geometry, mode and far-field settings as
estimator parameters, so it works with ``get_params``/``set_params`` and
``sklearn.base.clone``; the optimizer builds every sample that way.
``fit`` evaluates the far field (and fits the substrate scale ``alpha`` when
a reference pattern is given), ``predict`` returns the pattern, ``score``
returns the collection efficiency and ``transform`` maps in-plane points to
dipole currents.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .lattice import LatticeSpec, generate_lattice, reduce_alignment
from .nearfield import (
    DiskSpec,
    ModeSpec,
    NearField,
    analytic_mode,
    import_nearfield,
    sample_currents,
)
from .radiation import (
    FarFieldGrid,
    SphericalGrid,
    alpha_fit,
    collection_efficiency,
    dipole_farfield,
    efficiency_curve,
    read_farfield,
)


class MicrodiskEmitter(TransformerMixin, BaseEstimator):
    """Layered microdisk with a triangular hole grating, modeled as a dipole array.

    Parameters mirror :class:`~microdisk_ff.nearfield.DiskSpec`,
    :class:`~microdisk_ff.lattice.LatticeSpec` and
    :class:`~microdisk_ff.nearfield.ModeSpec`. Defaults reproduce the
    optimized device geometry.

    nearfield : None, str or NearField
        ``None`` uses the analytic whispering-gallery mode; a string is read
        as a near-field grid file.
    na : float
        Numerical aperture used by :meth:`score`.
    extent_pad : float
        Holes up to ``r_d + extent_pad`` from the disk center become dipoles.
    reduce_uv : bool
        Replace ``(u, v)`` by its symmetry-reduced representative before
        building the lattice. The hole pattern is then a rigid rotation or
        reflection of the original, which leaves cone integrals unchanged.
    farfield_radius : float
        Sphere radius for ``farfield_mode="finite_radius"``.
    """

    def __init__(
        self,
        a=0.5168,
        r_h=0.2,
        d=0.2931,
        u=0.0,
        v=0.0,
        r_d=1.5427,
        t=0.9411,
        r_u=1.45,
        n_disk=2.4,
        n_sub=1.4,
        m=18,
        wavelength=619e-9,
        polarization="azimuthal",
        r_peak=None,
        radial_width=0.25,
        decay_length=0.1,
        standing_wave=True,
        amplitude=1.0,
        nearfield=None,
        resolution_deg=0.5,
        n_collect=1.4,
        na=0.7,
        include_z=False,
        farfield_mode="fraunhofer",
        farfield_radius=1000.0,
        extent_pad=0.6,
        dipole_length=0.01,
        reduce_uv=False,
        threads=1,
    ):
        self.a = a
        self.r_h = r_h
        self.d = d
        self.u = u
        self.v = v
        self.r_d = r_d
        self.t = t
        self.r_u = r_u
        self.n_disk = n_disk
        self.n_sub = n_sub
        self.m = m
        self.wavelength = wavelength
        self.polarization = polarization
        self.r_peak = r_peak
        self.radial_width = radial_width
        self.decay_length = decay_length
        self.standing_wave = standing_wave
        self.amplitude = amplitude
        self.nearfield = nearfield
        self.resolution_deg = resolution_deg
        self.n_collect = n_collect
        self.na = na
        self.include_z = include_z
        self.farfield_mode = farfield_mode
        self.farfield_radius = farfield_radius
        self.extent_pad = extent_pad
        self.dipole_length = dipole_length
        self.reduce_uv = reduce_uv
        self.threads = threads

    def _specs(self):
        disk = DiskSpec(self.r_d, self.t, self.r_u, self.n_disk, self.n_sub)
        u, v = self.u, self.v
        if self.reduce_uv:
            u, v = reduce_alignment(u, v, self.a)
        lattice = LatticeSpec(self.a, self.r_h, self.d, u, v)
        mode = ModeSpec(
            self.m,
            self.wavelength,
            self.polarization,
            self.r_peak,
            self.radial_width,
            self.decay_length,
            self.standing_wave,
            self.amplitude,
        )
        return disk, lattice, mode

    def _field(self, disk, mode) -> NearField:
        if self.nearfield is None:
            return analytic_mode(disk, mode)
        if isinstance(self.nearfield, NearField):
            return self.nearfield
        return import_nearfield(self.nearfield)

    def fit(self, X=None, y=None, reference=None, theta_max=math.radians(70.0), normalize=False, grid=None):
        """Evaluate the far field; fit ``alpha`` against ``reference`` if given.

        ``X`` and ``y`` are ignored. ``reference`` is a
        :class:`~microdisk_ff.radiation.FarFieldGrid` or a far-field file path
        sampled on the same grid as this model. ``grid`` overrides the
        uniform grid built from ``resolution_deg``.
        """
        disk, lattice, mode = self._specs()
        self.disk_, self.lattice_, self.mode_ = disk, lattice, mode
        self.field_ = self._field(disk, mode)
        self.holes_ = generate_lattice(lattice, disk.r_d + self.extent_pad)
        self.dipoles_ = sample_currents(
            self.field_, self.holes_, include_z=self.include_z, n_medium=self.n_sub, length=self.dipole_length
        )
        self.grid_ = SphericalGrid.uniform(self.resolution_deg) if grid is None else grid
        self.far_field_ = dipole_farfield(
            self.dipoles_,
            self.grid_,
            mode=self.farfield_mode,
            radius=self.farfield_radius if self.farfield_mode == "finite_radius" else None,
            threads=self.threads,
        )
        self.alpha_fit_ = None
        if reference is not None:
            if not isinstance(reference, FarFieldGrid):
                reference = read_farfield(reference)
            self.alpha_fit_ = alpha_fit(self.far_field_, reference, theta_max=theta_max, normalize=normalize)
        return self

    @property
    def alpha_(self):
        check_is_fitted(self, "far_field_")
        return None if self.alpha_fit_ is None else self.alpha_fit_.alpha

    def predict(self, X=None) -> FarFieldGrid:
        """The fitted far-field pattern; ``X`` is ignored."""
        check_is_fitted(self, "far_field_")
        return self.far_field_

    def transform(self, X) -> np.ndarray:
        """Dipole currents ``(N, 3)`` for in-plane positions ``X`` of shape ``(N, 2)``."""
        check_is_fitted(self, "field_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected in-plane positions with 2 columns, got {X.shape[1]}")
        cur = np.array(self.field_(X), dtype=complex)
        if not self.include_z:
            cur[:, 2] = 0.0
        return cur

    def score(self, X=None, y=None) -> float:
        """Collection efficiency at ``self.na``."""
        check_is_fitted(self, "far_field_")
        return collection_efficiency(self.far_field_, self.na, self.n_collect)

    def collection_curve(self, nas) -> list[tuple[float, float]]:
        check_is_fitted(self, "far_field_")
        return efficiency_curve(self.far_field_, nas, self.n_collect)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = True
        return tags
