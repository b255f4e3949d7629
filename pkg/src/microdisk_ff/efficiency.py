"""Spectral efficiency of color centers and the overall figure of merit."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._validation import InvalidParameterError, check_nonnegative, check_unit_interval


@dataclass(frozen=True)
class ColorCenter:
    """An emitter characterized by the fraction of its emission naturally in the ZPL."""

    name: str
    zpl_branching: float

    def __post_init__(self):
        if not (0.0 < self.zpl_branching <= 1.0):
            raise InvalidParameterError(
                f"ZPL branching ratio must lie in (0, 1], got {self.zpl_branching!r}"
            )

    @property
    def sideband_ratio(self) -> float:
        """``Gamma_total / Gamma_ZPL - 1``."""
        return 1.0 / self.zpl_branching - 1.0


_PRESETS = {"NV": 0.03, "SiV": 0.7, "SnV": 0.8}


def presets() -> dict[str, float]:
    """Natural ZPL emission fractions of common diamond color centers."""
    return dict(_PRESETS)


def color_center(name: str) -> ColorCenter:
    try:
        return ColorCenter(name, _PRESETS[name])
    except KeyError:
        raise InvalidParameterError(
            f"unknown color center {name!r}; choose from {', '.join(_PRESETS)}"
        ) from None


def eta_zpl(purcell: float, center: ColorCenter | str) -> float:
    """Fraction of emission into the ZPL for a cavity with Purcell enhancement ``purcell``.

    ``F / (F + Gamma_total/Gamma_ZPL - 1)``. A center with branching ratio 1
    emits only into the ZPL, so the result is 1 for any ``F``.
    """
    if isinstance(center, str):
        center = color_center(center)
    f = check_nonnegative("Purcell enhancement", purcell)
    rest = center.sideband_ratio
    if rest == 0.0:
        return 1.0
    return f / (f + rest)


def eta_total(eta_zpl_value: float, eta_col: float) -> float:
    return check_unit_interval("eta_ZPL", eta_zpl_value) * check_unit_interval("eta_col", eta_col)


@dataclass(frozen=True)
class EfficiencyReport:
    purcell: float
    eta_zpl: float
    eta_col: float
    na: float
    alpha: float | None = None
    center: str = "SnV"

    def __post_init__(self):
        check_unit_interval("eta_ZPL", self.eta_zpl)
        check_unit_interval("eta_col", self.eta_col)
        if not math.isfinite(self.purcell):
            raise InvalidParameterError("Purcell enhancement must be finite")

    @property
    def eta(self) -> float:
        return self.eta_zpl * self.eta_col

    @classmethod
    def build(cls, purcell: float, center: str, eta_col: float, na: float, alpha: float | None = None):
        return cls(purcell, eta_zpl(purcell, center), eta_col, na, alpha, center)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eta"] = self.eta
        return d
