"""Stroke rasterization and style rendering.

Rasterization builds a per-pixel distance field to the nearest primitive
and converts it to ink coverage with a smoothstep against half the stroke
width (one-pixel soft edge). Styles then compose background, contrast,
blur, and noise into an 8-bit grayscale image.
"""

import zlib

import numpy as np
from scipy.ndimage import gaussian_filter

from .motifs import Arc, Circle, InstanceSpec, Polyline, instance_geometry
from .styles import REFERENCE_SIZE, DepictionStyle


def _segment_distance(px, py, x0, y0, x1, y1):
    vx, vy = x1 - x0, y1 - y0
    seg_len2 = vx * vx + vy * vy
    if seg_len2 < 1e-18:
        return np.hypot(px - x0, py - y0)
    t = np.clip(((px - x0) * vx + (py - y0) * vy) / seg_len2, 0.0, 1.0)
    return np.hypot(px - (x0 + t * vx), py - (y0 + t * vy))


def _arc_distance(px, py, cx, cy, r, t0, t1):
    dx, dy = px - cx, py - cy
    ring = np.abs(np.hypot(dx, dy) - r)
    theta = np.arctan2(dy, dx) % (2 * np.pi)
    sweep = (t1 - t0) % (2 * np.pi)
    if sweep == 0.0:
        sweep = 2 * np.pi
    inside = (theta - t0) % (2 * np.pi) <= sweep
    e0 = (cx + r * np.cos(t0), cy + r * np.sin(t0))
    e1 = (cx + r * np.cos(t1), cy + r * np.sin(t1))
    d_ends = np.minimum(np.hypot(px - e0[0], py - e0[1]), np.hypot(px - e1[0], py - e1[1]))
    return np.where(inside, ring, d_ends)


def distance_field(strokes, size: int) -> np.ndarray:
    """Distance (in pixels) from each pixel center to the nearest primitive."""
    coords = (np.arange(size) + 0.5) / size
    px, py = np.meshgrid(coords, coords)  # py varies along rows
    dmin = np.full((size, size), np.inf)
    for prim in strokes:
        if isinstance(prim, Polyline):
            pts = prim.points
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                dmin = np.minimum(dmin, _segment_distance(px, py, x0, y0, x1, y1))
        elif isinstance(prim, Circle):
            dmin = np.minimum(dmin, np.abs(np.hypot(px - prim.center[0], py - prim.center[1]) - prim.radius))
        elif isinstance(prim, Arc):
            dmin = np.minimum(
                dmin,
                _arc_distance(px, py, prim.center[0], prim.center[1], prim.radius, prim.theta0, prim.theta1),
            )
        else:
            raise TypeError(f"unknown primitive {type(prim).__name__}")
    return dmin * size


def rasterize_strokes(strokes, width_px: float, size: int) -> np.ndarray:
    """Anti-aliased ink coverage in [0, 1]; empty stroke list gives a blank image."""
    if width_px < 1:
        raise ValueError("stroke width must be >= 1 px")
    if not strokes:
        return np.zeros((size, size), dtype=np.float64)
    d = distance_field(strokes, size)
    half, soft = width_px / 2.0, 0.5
    t = np.clip((half + soft - d) / (2.0 * soft), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _style_rng(instance: InstanceSpec, style: DepictionStyle):
    key = zlib.crc32(style.name.encode("utf-8"))
    return np.random.default_rng(
        np.random.SeedSequence(entropy=instance.jitter_seed, spawn_key=(key,))
    )


def _background(style: DepictionStyle, size: int, rng) -> np.ndarray:
    if style.background == "flat":
        return np.ones((size, size))
    if style.background == "grain":
        return np.full((size, size), 0.62)
    # low-frequency gradient: a tilted plane in a random direction
    angle = rng.uniform(0, 2 * np.pi)
    coords = np.linspace(-0.5, 0.5, size)
    xx, yy = np.meshgrid(coords, coords)
    ramp = np.cos(angle) * xx + np.sin(angle) * yy
    return 0.72 + 0.18 * ramp


def render_motif(instance: InstanceSpec, style: DepictionStyle, size: int) -> np.ndarray:
    """Render one instance under one style as an 8-bit grayscale image."""
    strokes = instance_geometry(instance)
    scale = size / REFERENCE_SIZE
    ink = rasterize_strokes(strokes, max(1.0, style.stroke_width * scale), size)
    rng = _style_rng(instance, style)
    contrast = rng.uniform(*style.contrast)
    bg = _background(style, size, rng)
    img = bg - contrast * ink * (bg - 0.05)
    if style.blur_sigma > 0:
        img = gaussian_filter(img, sigma=style.blur_sigma * scale, mode="nearest")
    if style.noise_amplitude > 0:
        if style.background == "grain":
            img = img + (rng.random(img.shape) - 0.5) * 2.0 * style.noise_amplitude
        else:
            img = img + rng.normal(0.0, style.noise_amplitude, img.shape)
    img = np.clip(img, 0.0, 1.0)
    return np.round(img * 255.0).astype(np.uint8)
