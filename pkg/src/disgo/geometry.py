"""Rotated word boxes and exact polygon-clipping IoU."""

from __future__ import annotations

import math
from dataclasses import dataclass

# Intersection areas below this are floating-point slivers, treated as zero.
_AREA_EPS = 1e-12


@dataclass(frozen=True)
class WordBox:
    """Rotated rectangle locating one word: center, size, CCW rotation in degrees.

    theta is normalized to [-90, 90); a rectangle is symmetric under 180
    degrees and a 90-degree turn is absorbed by swapping width and height.
    """

    cx: float
    cy: float
    w: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.cx) and math.isfinite(self.cy)):
            raise ValueError("box center must be finite")
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        theta = math.fmod(self.theta, 180.0)
        if theta < -90.0:
            theta += 180.0
        elif theta >= 90.0:
            theta -= 180.0
        object.__setattr__(self, "theta", theta)

    @property
    def area(self) -> float:
        return self.w * self.h


def box_vertices(box: WordBox) -> list[tuple[float, float]]:
    """Four corners in counter-clockwise order (y up), starting bottom-left."""
    rad = math.radians(box.theta)
    cos_t, sin_t = math.cos(rad), math.sin(rad)
    hw, hh = box.w / 2.0, box.h / 2.0
    corners = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
    return [
        (box.cx + x * cos_t - y * sin_t, box.cy + x * sin_t + y * cos_t)
        for x, y in corners
    ]


def polygon_area(points: list[tuple[float, float]]) -> float:
    """Shoelace area; positive for counter-clockwise vertex order."""
    n = len(points)
    if n < 3:
        return 0.0
    total = 0.0
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def clip_polygon(subject: list[tuple[float, float]],
                 clip: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Sutherland-Hodgman: clip a polygon against a convex CCW polygon."""
    output = list(subject)
    n = len(clip)
    for i in range(n):
        if not output:
            return []
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay

        def inside(p):
            return ex * (p[1] - ay) - ey * (p[0] - ax) >= 0.0

        def intersect(p, q):
            dx, dy = q[0] - p[0], q[1] - p[1]
            denom = ex * dy - ey * dx
            t = (ey * (p[0] - ax) - ex * (p[1] - ay)) / denom
            return (p[0] + t * dx, p[1] + t * dy)

        clipped = []
        for j in range(len(output)):
            cur = output[j]
            prev = output[j - 1]
            if inside(cur):
                if not inside(prev):
                    clipped.append(intersect(prev, cur))
                clipped.append(cur)
            elif inside(prev):
                clipped.append(intersect(prev, cur))
        output = clipped
    return output


def intersection_area(a: WordBox, b: WordBox) -> float:
    area = polygon_area(clip_polygon(box_vertices(a), box_vertices(b)))
    if area < _AREA_EPS:
        return 0.0
    return area


def iou(a: WordBox, b: WordBox) -> float:
    """Intersection-over-union of two rotated boxes, in [0, 1]."""
    # cheap reject: centers farther apart than the combined half-diagonals
    half_diag = (math.hypot(a.w, a.h) + math.hypot(b.w, b.h)) / 2.0
    if math.hypot(a.cx - b.cx, a.cy - b.cy) > half_diag:
        return 0.0
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    union = a.area + b.area - inter
    return min(inter / union, 1.0)
