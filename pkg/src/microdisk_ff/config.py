"""JSON run configuration.

All lengths are in units of the free-space ZPL wavelength and all angles
are in degrees. ``load_config`` accepts a path or the name of a bundled
configuration (``"optimized"``).
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from ._validation import InvalidParameterError, MicrodiskError
from .efficiency import color_center
from .lattice import LatticeSpec
from .nearfield import DiskSpec, ModeSpec


class ConfigError(MicrodiskError, ValueError):
    """The configuration file is missing, malformed or inconsistent."""


DEFAULTS: dict = {
    "disk": {"r_d": 1.5427, "t": 0.9411, "r_u": 1.45, "n_disk": 2.4, "n_sub": 1.4},
    "lattice": {"a": 0.5168, "r_h": 0.2, "d": 0.2931, "u": 0.0, "v": 0.0},
    "mode": {
        "m": 18,
        "wavelength": 619e-9,
        "polarization": "azimuthal",
        "r_peak": None,
        "radial_width": 0.25,
        "decay_length": 0.1,
        "standing_wave": True,
        "amplitude": 1.0,
    },
    "nearfield": {"source": "analytic", "path": None},
    "farfield": {
        "resolution_deg": 0.5,
        "n_collect": 1.4,
        "na": [0.7],
        "target_na": 0.7,
        "include_z": False,
        "mode": "fraunhofer",
        "extent_pad": 0.6,
        "dipole_length": 0.01,
    },
    "emitter": {"color_center": "SnV", "purcell": 52.6},
    "reference": {"path": None, "theta_max_deg": 70.0, "normalize": False},
    "sweep": None,
    "robustness": None,
}

SWEEP_DEFAULTS = {"param": "a", "lo": 0.40, "hi": 0.65, "count": 26, "metric": "eta_col", "refine": True, "rtol": 1e-3}
ROBUSTNESS_DEFAULTS = {
    "count": 205,
    "seed": None,
    "distributions": {"uv": {"dist": "cell"}},
    "thresholds": {"lo": 0.0, "hi": 0.5, "count": 51},
}


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"unknown key {where}{key!r}")
        if isinstance(base[key], dict) and isinstance(val, dict) and key != "distributions":
            out[key] = _merge(base[key], val, f"{where}{key}.")
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass
class RunConfig:
    disk: DiskSpec
    lattice: LatticeSpec
    mode: ModeSpec
    raw: dict = field(repr=False)
    base_dir: Path = field(default_factory=Path.cwd, repr=False)

    @property
    def farfield(self) -> dict:
        return self.raw["farfield"]

    @property
    def emitter(self) -> dict:
        return self.raw["emitter"]

    @property
    def reference(self) -> dict:
        return self.raw["reference"]

    @property
    def nearfield_path(self) -> Path | None:
        nf = self.raw["nearfield"]
        return None if nf["source"] == "analytic" else self.resolve(nf["path"])

    @property
    def sweep(self) -> dict:
        return _merge(SWEEP_DEFAULTS, self.raw.get("sweep") or {}, "sweep.")

    @property
    def robustness(self) -> dict:
        return _merge(ROBUSTNESS_DEFAULTS, self.raw.get("robustness") or {}, "robustness.")

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def estimator_params(self) -> dict:
        """Flat keyword arguments for :class:`~microdisk_ff.estimator.MicrodiskEmitter`."""
        ff = self.farfield
        params = {f.name: getattr(self.disk, f.name) for f in fields(self.disk)}
        params.update({f.name: getattr(self.lattice, f.name) for f in fields(self.lattice)})
        params.update({f.name: getattr(self.mode, f.name) for f in fields(self.mode)})
        params.update(
            nearfield=None if self.nearfield_path is None else str(self.nearfield_path),
            resolution_deg=ff["resolution_deg"],
            n_collect=ff["n_collect"],
            na=ff["target_na"],
            include_z=ff["include_z"],
            farfield_mode=ff["mode"],
            extent_pad=ff["extent_pad"],
            dipole_length=ff["dipole_length"],
        )
        return params

    def with_overrides(self, **sections) -> "RunConfig":
        raw = _merge(self.raw, sections, "")
        return build_config(raw, self.base_dir)


def build_config(raw: dict, base_dir: Path | None = None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    merged = _merge(DEFAULTS, raw, "")
    base_dir = Path.cwd() if base_dir is None else Path(base_dir)
    try:
        disk = DiskSpec(**merged["disk"])
        lattice = LatticeSpec(**merged["lattice"])
        mode = ModeSpec(**merged["mode"])
        color_center(merged["emitter"]["color_center"])
    except (InvalidParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value: {exc}") from exc
    ff = merged["farfield"]
    if not isinstance(ff["na"], list) or not ff["na"]:
        raise ConfigError("farfield.na must be a non-empty list")
    for key in ("resolution_deg", "n_collect", "extent_pad", "dipole_length"):
        if not isinstance(ff[key], (int, float)) or isinstance(ff[key], bool) or not ff[key] > 0:
            raise ConfigError(f"farfield.{key} must be a positive number, got {ff[key]!r}")
    for na in [*ff["na"], ff["target_na"]]:
        if not isinstance(na, (int, float)) or not (0 < na <= ff["n_collect"]):
            raise ConfigError(f"NA {na!r} must lie in (0, n_collect={ff['n_collect']}]")
    if ff["mode"] not in ("fraunhofer", "finite_radius"):
        raise ConfigError(f"unknown far-field mode {ff['mode']!r}")
    nf = merged["nearfield"]
    if nf["source"] not in ("analytic", "file"):
        raise ConfigError("nearfield.source must be 'analytic' or 'file'")
    if nf["source"] == "file" and not nf.get("path"):
        raise ConfigError("nearfield.source 'file' needs nearfield.path")
    if nf["source"] == "analytic" and nf.get("path"):
        raise ConfigError("give either an analytic near field or a file path, not both")
    cfg = RunConfig(disk, lattice, mode, merged, base_dir)
    for label, path in (("near-field", cfg.nearfield_path), ("reference", merged["reference"]["path"])):
        if path is not None and not cfg.resolve(path).is_file():
            raise ConfigError(f"{label} file not found: {cfg.resolve(path)}")
    return cfg


def bundled_configs() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("microdisk_ff.configs").iterdir() if p.name.endswith(".json"))


def load_config(source) -> RunConfig:
    """Load a configuration from a JSON file or a bundled name."""
    path = Path(source)
    if not path.exists() and str(source) in bundled_configs():
        text = resources.files("microdisk_ff.configs").joinpath(f"{source}.json").read_text()
        base = Path.cwd()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        base = path.resolve().parent
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {source}: {exc}") from exc
    return build_config(raw, base)
