from __future__ import annotations

from dataclasses import dataclass

from zoomlens.exceptions import InvalidArgumentError


@dataclass(frozen=True, order=True)
class BBox:
    """Axis-aligned pixel rectangle. (x, y) is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InvalidArgumentError(f"BBox needs positive extents, got {self}.")
        if self.x < 0 or self.y < 0:
            raise InvalidArgumentError(f"BBox corner must be non-negative, got {self}.")

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2, self.y + self.h / 2

    def intersection_area(self, other: BBox) -> int:
        width = min(self.x2, other.x2) - max(self.x, other.x)
        height = min(self.y2, other.y2) - max(self.y, other.y)
        return max(width, 0) * max(height, 0)

    def is_inside(self, width: int, height: int) -> bool:
        return self.x2 <= width and self.y2 <= height

    def clamped(self, width: int, height: int) -> BBox:
        """Shifts the box inside a width x height image, shrinking it if needed."""
        w = min(self.w, width)
        h = min(self.h, height)
        x = min(max(self.x, 0), width - w)
        y = min(max(self.y, 0), height - h)
        return BBox(x, y, w, h)

    def scaled(self, sx: float, sy: float | None = None) -> BBox:
        sy = sx if sy is None else sy
        x = int(round(self.x * sx))
        y = int(round(self.y * sy))
        x2 = max(int(round(self.x2 * sx)), x + 1)
        y2 = max(int(round(self.y2 * sy)), y + 1)
        return BBox(x, y, x2 - x, y2 - y)

    def to_tuple(self) -> tuple[int, int, int, int]:
        return self.x, self.y, self.w, self.h

    @classmethod
    def centered(cls, cx: int, cy: int, size: int, width: int, height: int) -> BBox:
        """size x size window centered at (cx, cy), clamped inside the image."""
        if size > width or size > height:
            raise InvalidArgumentError(
                f"Window of {size} px does not fit a {width}x{height} image."
            )
        x = min(max(cx - size // 2, 0), width - size)
        y = min(max(cy - size // 2, 0), height - size)
        return cls(x, y, size, size)
