"""Calibration constants: reliability ceilings, congruence penalties, decay floor.

The defaults below are the framework's standard calibration. Overriding
requires an explicit JSON config file so that audits can detect
nonstandard calibrations; nothing else in the engine mutates these.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import ValidationError
from .model import Congruence, Formality, Layer

_LAYER_DEFAULT = MappingProxyType({Layer.L0: 0.35, Layer.L1: 0.75, Layer.L2: 1.0})
_FORMALITY_DEFAULT = MappingProxyType(
    {Formality.F0: 0.70, Formality.F1: 0.85, Formality.F2: 0.95, Formality.F3: 1.0}
)
_CONGRUENCE_DEFAULT = MappingProxyType(
    {Congruence.CL3: 0.0, Congruence.CL2: 0.10, Congruence.CL1: 0.40, Congruence.CL0: 0.90}
)


@dataclass(frozen=True)
class Calibration:
    layer_ceiling: Mapping[Layer, float] = field(default=_LAYER_DEFAULT)
    formality_ceiling: Mapping[Formality, float] = field(default=_FORMALITY_DEFAULT)
    congruence_penalty: Mapping[Congruence, float] = field(default=_CONGRUENCE_DEFAULT)
    decay_floor: float = 0.1
    warning_window_days: int = 14

    @classmethod
    def from_file(cls, path: str | Path) -> "Calibration":
        """Load a nonstandard calibration from a JSON file.

        Recognized keys: ``layer_ceiling``, ``formality_ceiling``,
        ``congruence_penalty`` (maps keyed by level name), ``decay_floor``,
        ``warning_window_days``. Omitted keys keep their defaults.
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot load calibration {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("calibration file must hold a JSON object")

        def table(key: str, enum_cls, default):
            raw = data.get(key)
            if raw is None:
                return default
            try:
                return MappingProxyType({enum_cls(k): float(v) for k, v in raw.items()})
            except (ValueError, AttributeError) as exc:
                raise ValidationError(f"bad calibration table {key}: {exc}") from None

        return cls(
            layer_ceiling=table("layer_ceiling", Layer, _LAYER_DEFAULT),
            formality_ceiling=table("formality_ceiling", Formality, _FORMALITY_DEFAULT),
            congruence_penalty=table("congruence_penalty", Congruence, _CONGRUENCE_DEFAULT),
            decay_floor=float(data.get("decay_floor", 0.1)),
            warning_window_days=int(data.get("warning_window_days", 14)),
        )


DEFAULT_CALIBRATION = Calibration()
