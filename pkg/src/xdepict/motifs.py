"""Parametric stroke programs for the nine motif classes.

Each program is a list of primitives (polyline, arc, circle) with control
points in unit coordinates, y growing downward. Instances jitter the
control points; the base programs stay inside [0, 1]^2.
"""

from dataclasses import dataclass

import numpy as np

TAU = 2.0 * np.pi


@dataclass(frozen=True)
class Polyline:
    points: tuple  # ((x, y), ...)


@dataclass(frozen=True)
class Arc:
    center: tuple
    radius: float
    theta0: float
    theta1: float  # radians, counterclockwise sweep from theta0


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float


def _p(*pts):
    return Polyline(tuple(pts))


MOTIF_PROGRAMS = {
    "bulls-head": (
        _p((0.35, 0.34), (0.30, 0.54), (0.40, 0.74), (0.50, 0.80), (0.60, 0.74), (0.70, 0.54), (0.65, 0.34)),
        Arc((0.30, 0.30), 0.13, 0.25 * TAU, 0.80 * TAU),
        Arc((0.70, 0.30), 0.13, 0.70 * TAU, 1.25 * TAU),
        Circle((0.43, 0.50), 0.030),
        Circle((0.57, 0.50), 0.030),
        _p((0.50, 0.80), (0.50, 0.63)),
    ),
    "letter-p": (
        _p((0.40, 0.15), (0.40, 0.85)),
        Arc((0.40, 0.33), 0.18, 0.75 * TAU, 1.25 * TAU),
        _p((0.32, 0.85), (0.48, 0.85)),
        _p((0.32, 0.15), (0.48, 0.15)),
    ),
    "crown": (
        _p((0.25, 0.72), (0.75, 0.72)),
        _p((0.25, 0.62), (0.25, 0.72)),
        _p((0.75, 0.62), (0.75, 0.72)),
        _p((0.25, 0.62), (0.75, 0.62)),
        _p((0.29, 0.62), (0.31, 0.38)),
        _p((0.50, 0.62), (0.50, 0.33)),
        _p((0.71, 0.62), (0.69, 0.38)),
        Circle((0.31, 0.34), 0.032),
        Circle((0.50, 0.29), 0.032),
        Circle((0.69, 0.34), 0.032),
    ),
    "unicorn": (
        _p((0.36, 0.78), (0.34, 0.56), (0.39, 0.43), (0.48, 0.38), (0.57, 0.41), (0.63, 0.50), (0.61, 0.62)),
        _p((0.63, 0.50), (0.52, 0.54)),
        _p((0.48, 0.38), (0.58, 0.12)),
        _p((0.41, 0.43), (0.36, 0.31)),
        Circle((0.46, 0.48), 0.022),
    ),
    "grape": (
        Circle((0.38, 0.44), 0.058),
        Circle((0.50, 0.42), 0.058),
        Circle((0.62, 0.44), 0.058),
        Circle((0.44, 0.55), 0.058),
        Circle((0.56, 0.55), 0.058),
        Circle((0.50, 0.66), 0.058),
        _p((0.50, 0.36), (0.50, 0.20)),
        _p((0.50, 0.24), (0.62, 0.16)),
    ),
    "triple-mount": (
        Arc((0.32, 0.70), 0.13, 0.50 * TAU, 1.00 * TAU),
        Arc((0.68, 0.70), 0.13, 0.50 * TAU, 1.00 * TAU),
        Arc((0.50, 0.64), 0.15, 0.50 * TAU, 1.00 * TAU),
        _p((0.19, 0.70), (0.81, 0.70)),
        _p((0.50, 0.49), (0.50, 0.26)),
        _p((0.43, 0.34), (0.57, 0.34)),
    ),
    "horn": (
        Arc((0.50, 0.52), 0.22, 0.08 * TAU, 0.92 * TAU),
        _p((0.68, 0.42), (0.80, 0.33)),
        _p((0.66, 0.64), (0.80, 0.74), (0.78, 0.80)),
        _p((0.80, 0.33), (0.84, 0.40)),
    ),
    "tower": (
        _p((0.38, 0.80), (0.38, 0.40)),
        _p((0.62, 0.80), (0.62, 0.40)),
        _p((0.33, 0.80), (0.67, 0.80)),
        _p((0.36, 0.40), (0.36, 0.30), (0.44, 0.30), (0.44, 0.40)),
        _p((0.46, 0.40), (0.46, 0.30), (0.54, 0.30), (0.54, 0.40)),
        _p((0.56, 0.40), (0.56, 0.30), (0.64, 0.30), (0.64, 0.40)),
        _p((0.36, 0.40), (0.64, 0.40)),
        Arc((0.50, 0.80), 0.075, 0.50 * TAU, 1.00 * TAU),
    ),
    "circle": (
        Circle((0.50, 0.57), 0.23),
        _p((0.50, 0.34), (0.50, 0.14)),
        _p((0.42, 0.22), (0.58, 0.22)),
    ),
}

MOTIF_NAMES = tuple(MOTIF_PROGRAMS)


@dataclass(frozen=True)
class InstanceSpec:
    """One physical motif instance; regenerates identical geometry forever."""

    class_name: str
    instance_id: int
    jitter_seed: int
    jitter_scale: float = 0.03


def instance_geometry(spec: InstanceSpec):
    """Jitter the class program's control points with the instance's seed."""
    if spec.class_name not in MOTIF_PROGRAMS:
        raise ValueError(f"unknown motif class {spec.class_name!r}")
    rng = np.random.default_rng(spec.jitter_seed)
    s = spec.jitter_scale
    out = []
    for prim in MOTIF_PROGRAMS[spec.class_name]:
        if isinstance(prim, Polyline):
            pts = tuple(
                (_clip01(x + rng.normal(0, s)), _clip01(y + rng.normal(0, s)))
                for x, y in prim.points
            )
            out.append(Polyline(pts))
        elif isinstance(prim, Arc):
            cx = _clip01(prim.center[0] + rng.normal(0, s))
            cy = _clip01(prim.center[1] + rng.normal(0, s))
            r = max(0.01, prim.radius * (1.0 + rng.normal(0, s * 4)))
            out.append(Arc((cx, cy), r, prim.theta0, prim.theta1))
        else:
            cx = _clip01(prim.center[0] + rng.normal(0, s))
            cy = _clip01(prim.center[1] + rng.normal(0, s))
            r = max(0.01, prim.radius * (1.0 + rng.normal(0, s * 4)))
            out.append(Circle((cx, cy), r))
    return out


def _clip01(v: float) -> float:
    return float(min(0.98, max(0.02, v)))
