"""Far-field emission model for a diamond microdisk under a triangular hole grating.

Holes of the grating are treated as Hertzian dipoles driven by the bare-disk
mode; their summed radiation gives the far field, from which collection
efficiency into a numerical aperture is integrated.
"""
from ._validation import (
    GridMismatchError,
    InvalidParameterError,
    MicrodiskError,
    NearFieldFormatError,
    NoBracketError,
    OutOfDomainError,
    ZeroPowerError,
)
from .config import ConfigError, RunConfig, load_config
from .efficiency import ColorCenter, EfficiencyReport, eta_total, eta_zpl, presets
from .estimator import MicrodiskEmitter
from .lattice import (
    HolePosition,
    LatticeSpec,
    canonicalize_alignment,
    generate_lattice,
    hex_trace,
    reduce_alignment,
    symmetry_points,
)
from .nearfield import (
    DiskSpec,
    DipoleArray,
    ModeSpec,
    analytic_mode,
    import_nearfield,
    overlap_report,
    sample_currents,
)
from .optimizer import RobustnessSpec, SweepSpec, refine_argmax, robustness, sweep
from .radiation import (
    AlphaFit,
    FarFieldGrid,
    SphericalGrid,
    SurfaceCurrents,
    alpha_fit,
    collection_efficiency,
    dipole_farfield,
    efficiency_curve,
    ntf_surface,
    total_power,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFit",
    "ColorCenter",
    "ConfigError",
    "DipoleArray",
    "DiskSpec",
    "EfficiencyReport",
    "FarFieldGrid",
    "GridMismatchError",
    "HolePosition",
    "InvalidParameterError",
    "LatticeSpec",
    "MicrodiskEmitter",
    "MicrodiskError",
    "ModeSpec",
    "NearFieldFormatError",
    "NoBracketError",
    "OutOfDomainError",
    "RobustnessSpec",
    "RunConfig",
    "SphericalGrid",
    "SurfaceCurrents",
    "SweepSpec",
    "ZeroPowerError",
    "alpha_fit",
    "analytic_mode",
    "canonicalize_alignment",
    "collection_efficiency",
    "dipole_farfield",
    "efficiency_curve",
    "eta_total",
    "eta_zpl",
    "generate_lattice",
    "hex_trace",
    "import_nearfield",
    "load_config",
    "ntf_surface",
    "overlap_report",
    "presets",
    "reduce_alignment",
    "refine_argmax",
    "robustness",
    "sample_currents",
    "sweep",
    "symmetry_points",
    "total_power",
]
