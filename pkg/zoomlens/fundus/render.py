"""
Synthetic fundus photographs: a shaded retinal disc on black, an optic
disc, vessels and lesions drawn from LESION_SPECS with tight boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.fundus.lesions import LESION_SPECS, Lesion, LesionKind, lesion_counts
from zoomlens.fundus.sample import Eye, FundusSample
from zoomlens.sampler import BBox
from zoomlens.utils import child_rng

MIN_RENDER_SIZE = 64
REFERENCE_SIZE = 320
RETINA_COLOR = np.array([0.78, 0.36, 0.16])
OPTIC_DISC_COLOR = np.array([0.98, 0.85, 0.55])
VESSEL_COLOR = np.array([0.45, 0.08, 0.05])

# independent streams so the background doesn't depend on the lesions
_BACKGROUND_STREAM = 0
_LESION_STREAM = 1


@dataclass(frozen=True)
class FundusSpec:
    seed: int
    grade: int
    patient_id: str = ""
    eye: Eye = Eye.LEFT


@dataclass(frozen=True)
class DiscGeometry:
    size: int
    cx: float
    cy: float
    radius: float

    @property
    def bounds(self) -> BBox:
        """Tight box of the pixels whose centers fall inside the disc."""
        x0 = max(math.ceil(self.cx - self.radius), 0)
        y0 = max(math.ceil(self.cy - self.radius), 0)
        x1 = min(math.floor(self.cx + self.radius), self.size - 1)
        y1 = min(math.floor(self.cy + self.radius), self.size - 1)
        return BBox(x0, y0, x1 - x0 + 1, y1 - y0 + 1)

    def distance_grid(self) -> np.ndarray:
        yy, xx = np.mgrid[0 : self.size, 0 : self.size]
        return np.hypot(xx - self.cx, yy - self.cy)


def _disc_geometry(size: int, rng: np.random.Generator) -> DiscGeometry:
    radius = rng.uniform(0.40, 0.45) * size
    jitter = 0.02 * size
    return DiscGeometry(
        size,
        size / 2 + rng.uniform(-jitter, jitter),
        size / 2 + rng.uniform(-jitter, jitter),
        radius,
    )


def _blend(canvas: np.ndarray, mask: np.ndarray, color: np.ndarray) -> None:
    canvas *= 1 - mask[None]
    canvas += mask[None] * color[:, None, None]


def _stamp_disc(mask: np.ndarray, x: float, y: float, radius: float, soft: bool = False):
    size_y, size_x = mask.shape
    x0, x1 = max(int(x - radius) - 1, 0), min(int(x + radius) + 2, size_x)
    y0, y1 = max(int(y - radius) - 1, 0), min(int(y + radius) + 2, size_y)
    if x0 >= x1 or y0 >= y1:
        return
    yy, xx = np.mgrid[y0:y1, x0:x1]
    dist = np.hypot(xx - x, yy - y) / radius
    if soft:
        local = np.where(dist < 1, np.exp(-2 * dist**2), 0.0)
    else:
        local = (dist <= 1).astype(np.float64)
    mask[y0:y1, x0:x1] = np.maximum(mask[y0:y1, x0:x1], local)


def _draw_background(geometry: DiscGeometry, eye: Eye, rng: np.random.Generator):
    size = geometry.size
    dist = geometry.distance_grid()
    inside = dist <= geometry.radius

    shading = 1 - 0.35 * (dist / geometry.radius) ** 2
    texture = 1 + rng.normal(0, 0.015, (size, size))
    canvas = RETINA_COLOR[:, None, None] * (shading * texture)[None]

    side = 1 if eye is Eye.LEFT else -1
    disc_x = geometry.cx + side * 0.3 * geometry.radius
    disc_y = geometry.cy + rng.uniform(-0.05, 0.05) * geometry.radius
    optic = np.zeros((size, size))
    _stamp_disc(optic, disc_x, disc_y, 0.12 * geometry.radius, soft=True)
    _blend(canvas, 0.9 * optic, OPTIC_DISC_COLOR)

    vessels = np.zeros((size, size))
    scale = size / REFERENCE_SIZE
    for _ in range(int(rng.integers(6, 10))):
        heading = rng.uniform(0, 2 * np.pi)
        bend = rng.uniform(-1.5, 1.5) / geometry.radius
        width = rng.uniform(0.8, 1.6) * scale
        length = rng.uniform(0.6, 1.1) * geometry.radius
        x, y = disc_x, disc_y
        for _ in range(int(length)):
            heading += bend
            x += math.cos(heading)
            y += math.sin(heading)
            _stamp_disc(vessels, x, y, width)
    _blend(canvas, 0.5 * vessels, VESSEL_COLOR)

    canvas = np.clip(canvas, 0, 1)
    canvas[:, ~inside] = 0.0
    return canvas, inside


def _lesion_mask(
    kind: LesionKind,
    shape: tuple[int, int],
    x: float,
    y: float,
    radius: float,
    rng: np.random.Generator,
) -> np.ndarray:
    mask = np.zeros(shape)
    if kind is LesionKind.DOT:
        _stamp_disc(mask, x, y, radius)
    elif kind is LesionKind.BLOT:
        for _ in range(3):
            dx, dy = rng.uniform(-0.5, 0.5, 2) * radius
            _stamp_disc(mask, x + dx, y + dy, radius * rng.uniform(0.6, 1.0))
    elif kind is LesionKind.FLAME:
        angle = rng.uniform(0, np.pi)
        width = max(radius / 4, 1.0)
        for t in np.linspace(-radius, radius, int(2 * radius) + 1):
            taper = 1 - 0.5 * abs(t) / radius
            _stamp_disc(mask, x + t * math.cos(angle), y + t * math.sin(angle), width * taper)
    elif kind is LesionKind.SOFT_PATCH:
        _stamp_disc(mask, x, y, radius, soft=True)
    else:
        for _ in range(int(rng.integers(3, 7))):
            dx, dy = rng.uniform(-2, 2, 2) * radius
            _stamp_disc(mask, x + dx, y + dy, radius * rng.uniform(0.5, 1.0))
    return mask


def _mask_box(mask: np.ndarray) -> BBox:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return BBox(
        int(cols[0]),
        int(rows[0]),
        int(cols[-1] - cols[0] + 1),
        int(rows[-1] - rows[0] + 1),
    )


def _draw_lesions(
    canvas: np.ndarray,
    inside: np.ndarray,
    geometry: DiscGeometry,
    grade: int,
    rng: np.random.Generator,
) -> list[Lesion]:
    scale = geometry.size / REFERENCE_SIZE
    lesions = []
    for kind, count in lesion_counts(grade, rng).items():
        spec = LESION_SPECS[kind]
        for _ in range(count):
            radius = rng.uniform(*spec.radius) * scale
            # hard patches spread their blobs over twice their radius
            reach = radius * (3 if kind is LesionKind.HARD_PATCH else 1.5) + 2
            spread = max(geometry.radius * 0.9 - reach, 0.0)
            rho = spread * math.sqrt(rng.uniform())
            theta = rng.uniform(0, 2 * np.pi)
            x = geometry.cx + rho * math.cos(theta)
            y = geometry.cy + rho * math.sin(theta)

            mask = _lesion_mask(kind, inside.shape, x, y, radius, rng) * inside
            if not mask.any():
                _stamp_disc(mask, geometry.cx, geometry.cy, 1.0)
            _blend(canvas, rng.uniform(*spec.intensity) * mask, np.array(spec.color))
            lesions.append(Lesion(kind, _mask_box(mask)))
    return lesions


def render(spec: FundusSpec, size: int, with_lesions: bool = True) -> FundusSample:
    """
    Draws the sample described by 'spec' on a size x size canvas. The
    background only depends on the seed, so with_lesions=False gives the
    same photograph without its lesions.
    """
    if size < MIN_RENDER_SIZE:
        raise InvalidArgumentError(f"Render size must be at least {MIN_RENDER_SIZE}.")

    background_rng = child_rng(spec.seed, _BACKGROUND_STREAM)
    geometry = _disc_geometry(size, background_rng)
    canvas, inside = _draw_background(geometry, spec.eye, background_rng)

    lesions = []
    if with_lesions:
        lesions = _draw_lesions(
            canvas, inside, geometry, spec.grade, child_rng(spec.seed, _LESION_STREAM)
        )
    canvas = np.clip(canvas, 0, 1)

    return FundusSample(
        image=canvas,
        grade=spec.grade,
        lesions=lesions,
        patient_id=spec.patient_id,
        eye=spec.eye,
        disc_box=geometry.bounds,
    )
