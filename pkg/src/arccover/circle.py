"""Points of the circle in unit-interval and ray form, plus lifted ordering.

Both representations expose one shared notion: an exact circular position
measured counterclockwise from a branch cut.  The unit-interval position is
the value itself; the ray position is a square-boundary parameter in [0, 8)
(a monotone angle substitute computed from coordinate ratios, no trig).
"""

from __future__ import annotations

from typing import Union

from .exactnum import DomainError, Q, Radical, compare, qsign

UNIT_PERIOD = Radical.of(1)
RAY_PERIOD = Radical.of(8)


class UnitPoint:
    """A circle point as a value t in [0, 1); reduced modulo 1 on construction."""

    __slots__ = ("t",)

    def __init__(self, t):
        t = Radical.of(t)
        k = t.floor()
        if k != 0:
            t = t - k
        self.t = t

    def __eq__(self, other):
        return isinstance(other, UnitPoint) and self.t == other.t

    def __hash__(self):
        return hash(("unit", self.t))

    def __repr__(self):
        return f"UnitPoint({self.t})"


class RayPoint:
    """A circle point as any point on the open ray from the origin through it."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        x, y = Radical.of(x), Radical.of(y)
        if x.sign() == 0 and y.sign() == 0:
            raise DomainError("ray through the origin is undefined")
        self.x, self.y = x, y

    def cross(self, other: "RayPoint") -> Radical:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "RayPoint") -> Radical:
        return self.x * other.x + self.y * other.y

    def __eq__(self, other):
        if not isinstance(other, RayPoint):
            return NotImplemented
        return self.cross(other).sign() == 0 and self.dot(other).sign() > 0

    def __hash__(self):
        s = self.sparam()
        return hash(("ray", s))

    def sparam(self) -> Radical:
        """Square-boundary parameter in [0, 8), increasing counterclockwise.

        Edges: s in [0,1): (1, s); [1,3): (2-s, 1); [3,5): (-1, 4-s);
        [5,7): (s-6, -1); [7,8): (1, s-8).  The branch cut (1, 0) is s = 0.
        """
        x, y = self.x, self.y
        sx, sy = x.sign(), y.sign()
        ax = x if sx >= 0 else -x
        ay = y if sy >= 0 else -y
        c = compare(ax, ay)
        if sx > 0 and (c > 0 or (c == 0 and sy <= 0)):
            s = y / x
            return s if sy >= 0 else s + 8
        if sy > 0 and c <= 0:
            return Radical.of(2) - x / y
        if sx < 0 and (c > 0 or (c == 0 and sy > 0)):
            return Radical.of(4) + y / x
        return Radical.of(6) - x / y

    def __repr__(self):
        return f"RayPoint({self.x}, {self.y})"


def ray_of_sparam(s: Radical) -> RayPoint:
    s = Radical.of(s)
    if s < 1:
        return RayPoint(Radical.of(1), s)
    if s < 3:
        return RayPoint(2 - s, Radical.of(1))
    if s < 5:
        return RayPoint(Radical.of(-1), 4 - s)
    if s < 7:
        return RayPoint(s - 6, Radical.of(-1))
    return RayPoint(Radical.of(1), s - 8)


CirclePoint = Union[UnitPoint, RayPoint]


def position(p: CirclePoint) -> Radical:
    """Position from the canonical branch cut (t = 0, resp. ray (1,0))."""
    if isinstance(p, UnitPoint):
        return p.t
    return p.sparam()


def period_of(p: CirclePoint) -> Radical:
    return UNIT_PERIOD if isinstance(p, UnitPoint) else RAY_PERIOD


def position_from(branch: CirclePoint, p: CirclePoint) -> Radical:
    d = position(p) - position(branch)
    if d.sign() < 0:
        d = d + period_of(p)
    return d


def ccw_compare(a: CirclePoint, b: CirclePoint, branch: CirclePoint) -> int:
    """Order a, b by counterclockwise distance from the branch cut."""
    return compare(position_from(branch, a), position_from(branch, b))


class Arc:
    """Half-open counterclockwise arc [start, end); start == end is empty.

    The full circle cannot be written as [a, a) and gets an explicit flag.
    """

    __slots__ = ("start", "end", "full")

    def __init__(self, start: CirclePoint, end: CirclePoint, full: bool = False):
        self.start, self.end, self.full = start, end, full

    def is_empty(self) -> bool:
        return (not self.full) and position_from(self.start, self.end).sign() == 0

    def __contains__(self, p: CirclePoint) -> bool:
        return arc_contains(self, p)

    def __repr__(self):
        if self.full:
            return "Arc(<full circle>)"
        return f"Arc({self.start!r}, {self.end!r})"


def arc_contains(arc: Arc, p: CirclePoint) -> bool:
    if arc.full:
        return True
    span = position_from(arc.start, arc.end)
    if span.sign() == 0:
        return False
    return position_from(arc.start, p) < span


class LiftedPoint:
    """A point of Z x S^1: winding count plus a circle point."""

    __slots__ = ("winding", "point")

    def __init__(self, winding: int, point: CirclePoint):
        self.winding, self.point = int(winding), point

    def __repr__(self):
        return f"LiftedPoint({self.winding}, {self.point!r})"


def lift_compare(a: LiftedPoint, b: LiftedPoint, branch: CirclePoint) -> int:
    if a.winding != b.winding:
        return -1 if a.winding < b.winding else 1
    return ccw_compare(a.point, b.point, branch)
