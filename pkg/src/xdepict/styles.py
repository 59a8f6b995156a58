"""Depiction styles: the three reproduction techniques the corpus emulates.

Widths and blur sigmas are in pixels at the 64-px reference size and scale
linearly with the rendered image size.
"""

from dataclasses import dataclass

REFERENCE_SIZE = 64


@dataclass(frozen=True)
class DepictionStyle:
    name: str
    stroke_width: float  # px at REFERENCE_SIZE
    blur_sigma: float  # px at REFERENCE_SIZE
    noise_amplitude: float
    background: str  # flat | grain | gradient
    contrast: tuple  # (lo, hi) stroke darkening strength

    def __post_init__(self):
        if self.stroke_width <= 0 or self.blur_sigma < 0 or self.noise_amplitude < 0:
            raise ValueError(f"style {self.name!r}: parameters must be positive")
        if self.background not in ("flat", "grain", "gradient"):
            raise ValueError(f"style {self.name!r}: unknown background {self.background!r}")
        lo, hi = self.contrast
        if not (0 < lo <= hi <= 1):
            raise ValueError(f"style {self.name!r}: bad contrast range {self.contrast}")


STYLES = {
    "trace": DepictionStyle("trace", 2.0, 0.4, 0.0, "flat", (0.90, 1.00)),
    "rubbing": DepictionStyle("rubbing", 4.0, 1.5, 0.15, "grain", (0.45, 0.55)),
    "radiography": DepictionStyle("radiography", 3.0, 2.5, 0.08, "gradient", (0.30, 0.40)),
}

STYLE_NAMES = tuple(STYLES)
