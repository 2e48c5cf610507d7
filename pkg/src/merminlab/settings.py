"""Measurement settings for n-particle Bell operators, plus JSON persistence.

Each particle j carries a pair of measurement directions (n_j, n_j').  Two
forms exist:

* ``MeasurementSettings`` — arbitrary unit vectors per particle;
* ``PlanarSettings`` — directions confined to the x-y plane, stored as
  azimuth pairs (phi_j, phi_j') in radians.  The included angle
  theta_j = phi_j' - phi_j drives every planar closed form.

File format (radians, plain JSON)::

    {"n": 3, "planar": [{"phi": 0.0, "phi_prime": 1.5707963267948966}, ...]}
    {"n": 2, "pairs": [{"a": [1.0, 0.0, 0.0], "b": [0.0, 1.0, 0.0]}, ...]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .pauli import UnitVector3

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    r = math.remainder(angle, TAU)
    if r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class SettingPair:
    """The two measurement directions (n_j, n_j') of one particle."""

    a: UnitVector3
    b: UnitVector3


@dataclass(frozen=True)
class MeasurementSettings:
    """Per-particle direction pairs for an n-particle Bell operator (n >= 2)."""

    pairs: tuple[SettingPair, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if len(self.pairs) < 2:
            raise ValueError("need settings for at least two particles")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def subset(self, particles: tuple[int, ...]) -> "MeasurementSettings":
        """Settings restricted to the given 1-based particles, order preserved."""
        return MeasurementSettings(tuple(self.pairs[j - 1] for j in particles))


@dataclass(frozen=True)
class PlanarSettings:
    """x-y-plane settings as (phi_j, phi_j') azimuth pairs in radians."""

    angles: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "angles", tuple((float(p), float(q)) for p, q in self.angles)
        )
        if len(self.angles) < 2:
            raise ValueError("need settings for at least two particles")

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def included_angles(self) -> tuple[float, ...]:
        """theta_j = phi_j' - phi_j for each particle."""
        return tuple(q - p for p, q in self.angles)

    def to_measurement_settings(self) -> MeasurementSettings:
        return MeasurementSettings(
            tuple(
                SettingPair(UnitVector3.from_azimuth(p), UnitVector3.from_azimuth(q))
                for p, q in self.angles
            )
        )

    def shifted(self, deltas: tuple[float, ...]) -> "PlanarSettings":
        """Rotate each pair rigidly: (phi_j + d_j, phi_j' + d_j).  Leaves theta_j fixed."""
        if len(deltas) != self.n:
            raise ValueError("need one shift per particle")
        return PlanarSettings(
            tuple((p + d, q + d) for (p, q), d in zip(self.angles, deltas))
        )


AnySettings = Union[MeasurementSettings, PlanarSettings]


# ---- JSON -----------------------------------------------------------------


def settings_to_json(settings: AnySettings) -> dict:
    if isinstance(settings, PlanarSettings):
        return {
            "n": settings.n,
            "planar": [{"phi": p, "phi_prime": q} for p, q in settings.angles],
        }
    return {
        "n": settings.n,
        "pairs": [
            {"a": [pair.a.x, pair.a.y, pair.a.z], "b": [pair.b.x, pair.b.y, pair.b.z]}
            for pair in settings.pairs
        ],
    }


def settings_from_json(data: dict) -> AnySettings:
    if not isinstance(data, dict) or "n" not in data:
        raise ValueError("settings JSON must be an object with an 'n' field")
    n = data["n"]
    if not isinstance(n, int) or n < 2:
        raise ValueError("'n' must be an integer >= 2")
    if ("planar" in data) == ("pairs" in data):
        raise ValueError("settings JSON needs exactly one of 'planar' or 'pairs'")
    if "planar" in data:
        entries = data["planar"]
        if len(entries) != n:
            raise ValueError(f"'planar' has {len(entries)} entries, expected n={n}")
        return PlanarSettings(
            tuple((float(e["phi"]), float(e["phi_prime"])) for e in entries)
        )
    entries = data["pairs"]
    if len(entries) != n:
        raise ValueError(f"'pairs' has {len(entries)} entries, expected n={n}")
    pairs = []
    for e in entries:
        a, b = e["a"], e["b"]
        if len(a) != 3 or len(b) != 3:
            raise ValueError("direction vectors must have three components")
        pairs.append(
            SettingPair(UnitVector3(*map(float, a)), UnitVector3(*map(float, b)))
        )
    return MeasurementSettings(tuple(pairs))


def load_settings(path: str | Path) -> AnySettings:
    with open(path, "r", encoding="utf-8") as fh:
        return settings_from_json(json.load(fh))


def save_settings(path: str | Path, settings: AnySettings) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(settings_to_json(settings), fh, indent=2)
        fh.write("\n")


# ---- seeded sampling ------------------------------------------------------


def random_unit_vector(rng: np.random.Generator) -> UnitVector3:
    """Uniform direction from a normalized Gaussian triple."""
    while True:
        v = rng.normal(size=3)
        r = float(np.linalg.norm(v))
        if r > 1e-8:
            return UnitVector3(float(v[0] / r), float(v[1] / r), float(v[2] / r))


def random_settings(n: int, rng: np.random.Generator) -> MeasurementSettings:
    return MeasurementSettings(
        tuple(
            SettingPair(random_unit_vector(rng), random_unit_vector(rng))
            for _ in range(n)
        )
    )


def random_planar(n: int, rng: np.random.Generator) -> PlanarSettings:
    return PlanarSettings(
        tuple(
            (float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(-math.pi, math.pi)))
            for _ in range(n)
        )
    )
