"""Exact 2D primitives shared by the geometric reductions.

Points are plain (x, y) tuples whose entries are rationals or Radicals; all
predicates reduce to exact sign computations, so rational and radical
coordinates mix freely as long as radicands stay compatible.  Regions that
may be non-convex (visibility intersections) are kept as soups of convex
cells: unions are exact and no general polygon boolean machinery is needed.
"""

from __future__ import annotations

import warnings
from typing import Iterable, Optional, Sequence

from .exactnum import DomainError, Q, Radical, compare, qsign
from .plrf import _interior_point


def _sgn(v) -> int:
    if isinstance(v, Radical):
        return v.sign()
    return qsign(v)


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def scale(a, t):
    return (a[0] * t, a[1] * t)


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def orient(a, b, c) -> int:
    """Sign of the cross product (b - a) x (c - a)."""
    return _sgn(cross(sub(b, a), sub(c, a)))


def points_equal(a, b) -> bool:
    return _sgn(a[0] - b[0]) == 0 and _sgn(a[1] - b[1]) == 0


def on_segment(p, a, b) -> bool:
    """p on the closed segment [a, b] (collinearity plus box test)."""
    if orient(a, b, p) != 0:
        return False
    return (
        _sgn(dot(sub(p, a), sub(b, a))) >= 0
        and _sgn(dot(sub(p, b), sub(a, b))) >= 0
    )


class GeomError(ValueError):
    pass


class DegenerateConeError(GeomError):
    pass


# ---------------------------------------------------------------------------
# lines and segments


def line_intersection(p1, p2, q1, q2):
    """Intersection point of lines p1p2 and q1q2, None if parallel."""
    d1, d2 = sub(p2, p1), sub(q2, q1)
    den = cross(d1, d2)
    if _sgn(den) == 0:
        return None
    t = cross(sub(q1, p1), d2) / den
    return add(p1, scale(d1, t))


def segment_intersection(a1, a2, b1, b2):
    """Single intersection point of closed segments, None if disjoint.

    Collinear overlapping segments return a shared endpoint if the overlap
    is a single point, else the first endpoint of the overlap.
    """
    d1, d2 = sub(a2, a1), sub(b2, b1)
    den = cross(d1, d2)
    if _sgn(den) != 0:
        t = cross(sub(b1, a1), d2) / den
        u = cross(sub(b1, a1), d1) / den
        if _sgn(t) >= 0 and _sgn(t - 1) <= 0 and _sgn(u) >= 0 and _sgn(u - 1) <= 0:
            return add(a1, scale(d1, t))
        return None
    if orient(a1, a2, b1) != 0:
        return None
    for p in (b1, b2):
        if on_segment(p, a1, a2):
            return p
    for p in (a1, a2):
        if on_segment(p, b1, b2):
            return p
    return None


def segments_properly_cross(a1, a2, b1, b2) -> bool:
    """Interiors cross at a single point (no touching, no collinearity)."""
    o1, o2 = orient(a1, a2, b1), orient(a1, a2, b2)
    o3, o4 = orient(b1, b2, a1), orient(b1, b2, a2)
    return o1 * o2 < 0 and o3 * o4 < 0


# ---------------------------------------------------------------------------
# polygons


class SimplePolygon:
    """Counterclockwise simple polygon; collinear and repeated vertices are
    normalized away at ingestion (inputs are assumed desk-scale)."""

    def __init__(self, vertices: Sequence, validate: bool = True):
        vs = [tuple(v) for v in vertices]
        vs = _normalize_ring(vs)
        if len(vs) < 3:
            raise GeomError("polygon needs at least 3 non-collinear vertices")
        if _sgn(signed_area2(vs)) < 0:
            vs.reverse()
        self.vertices = vs
        if validate and _self_intersects(vs):
            raise GeomError("polygon is self-intersecting")

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def __repr__(self):
        return f"SimplePolygon({len(self.vertices)} vertices)"


def _normalize_ring(vs):
    out = []
    for v in vs:
        if out and points_equal(out[-1], v):
            continue
        out.append(v)
    if len(out) > 1 and points_equal(out[0], out[-1]):
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if orient(a, b, c) == 0:
                dropped = out.pop(i)
                if not on_segment(dropped, a, c):
                    warnings.warn("collinear spike vertex dropped at ingestion")
                changed = True
                break
    return out


def _self_intersects(vs) -> bool:
    n = len(vs)
    for i in range(n):
        a1, a2 = vs[i], vs[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = vs[j], vs[(j + 1) % n]
            if segments_properly_cross(a1, a2, b1, b2):
                return True
            if on_segment(b1, a1, a2) and not points_equal(b1, a1) and not points_equal(b1, a2):
                return True
    return False


def signed_area2(vs) -> object:
    acc = Q(0)
    n = len(vs)
    for i in range(n):
        acc = acc + cross(vs[i], vs[(i + 1) % n])
    return acc


def point_in_polygon(p, vs) -> str:
    """'in' | 'out' | 'boundary', exact crossing-number with half-open rule."""
    n = len(vs)
    for i in range(n):
        if on_segment(p, vs[i], vs[(i + 1) % n]):
            return "boundary"
    inside = False
    py = p[1]
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        ca, cb = _sgn(a[1] - py), _sgn(b[1] - py)
        if ca <= 0 < cb:  # upward crossing: count if p strictly left of a->b
            if orient(a, b, p) > 0:
                inside = not inside
        elif cb <= 0 < ca:  # downward crossing: strictly right of a->b
            if orient(a, b, p) < 0:
                inside = not inside
    return "in" if inside else "out"


def convex_hull(points) -> list:
    """Counterclockwise hull, collinear points removed (monotone chain).

    All-collinear inputs return the extreme pair (degenerate segment hull);
    a single point returns itself.
    """
    pts = []
    for p in points:
        if not any(points_equal(p, q) for q in pts):
            pts.append(tuple(p))
    pts.sort(key=lambda p: (p[0], p[1]))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return pts[:1] if len(pts) == 1 else [pts[0], pts[-1]]
    return hull


def halfplane_clip(vs, a, b):
    """Clip a convex polygon by the closed half-plane left of directed a->b."""
    out = []
    n = len(vs)
    for i in range(n):
        cur, nxt = vs[i], vs[(i + 1) % n]
        side_cur = orient(a, b, cur)
        side_nxt = orient(a, b, nxt)
        if side_cur >= 0:
            out.append(cur)
        if side_cur * side_nxt < 0:
            out.append(line_intersection(a, b, cur, nxt))
    return _normalize_ring(out) if len(out) >= 3 else []


def clip_segment_halfplane(p1, p2, a, b):
    """Part of segment [p1, p2] in the closed half-plane left of a->b."""
    s1, s2 = orient(a, b, p1), orient(a, b, p2)
    if s1 >= 0 and s2 >= 0:
        return (p1, p2)
    if s1 < 0 and s2 < 0:
        return None
    m = line_intersection(a, b, p1, p2)
    if m is None:
        return None
    return (m, p2) if s1 < 0 else (p1, m)


# ---------------------------------------------------------------------------
# convex cell soups (exact unions of convex polygons)


def fan_cells(vs, center) -> list:
    """Triangles fanning a star-shaped polygon from an interior/star point."""
    cells = []
    n = len(vs)
    for i in range(n):
        tri = [center, vs[i], vs[(i + 1) % n]]
        if orient(*tri) > 0:
            cells.append(tri)
        elif orient(*tri) < 0:
            cells.append([tri[0], tri[2], tri[1]])
    return cells


def ear_clip(vs) -> list:
    """Triangulation of a simple counterclockwise polygon (ear clipping)."""
    vs = list(vs)
    tris = []
    guard = 0
    while len(vs) > 3:
        guard += 1
        if guard > 10_000:
            raise GeomError("ear clipping failed to make progress")
        n = len(vs)
        clipped = False
        for i in range(n):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % n]
            if orient(a, b, c) <= 0:
                continue
            ok = True
            for p in vs:
                if p in (a, b, c):
                    continue
                if _point_in_triangle_closed(p, a, b, c):
                    ok = False
                    break
            if ok:
                tris.append([a, b, c])
                vs.pop(i)
                clipped = True
                break
        if not clipped:
            raise GeomError("no ear found (polygon not simple?)")
    tris.append(list(vs))
    return [t for t in tris if orient(*t) > 0]


def _point_in_triangle_closed(p, a, b, c) -> bool:
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def cells_clip_halfplane(cells, a, b) -> list:
    out = []
    for cell in cells:
        clipped = halfplane_clip(cell, a, b)
        if clipped:
            out.append(clipped)
    return out


def cells_intersect(cells_a, cells_b) -> list:
    """Pairwise convex intersections; the union equals the set intersection."""
    out = []
    for ca in cells_a:
        for cb in cells_b:
            cur = ca
            n = len(cb)
            for i in range(n):
                cur = halfplane_clip(cur, cb[i], cb[(i + 1) % n])
                if not cur:
                    break
            if cur:
                out.append(cur)
    return out


def cells_nonempty(cells) -> bool:
    return any(_sgn(signed_area2(c)) > 0 for c in cells)


def cells_area2(cells):
    acc = Q(0)
    for c in cells:
        acc = acc + signed_area2(c)
    return acc


def point_in_cells(p, cells) -> bool:
    for c in cells:
        if point_in_polygon(p, c) != "out":
            return True
    return False


def region_intersection(a: SimplePolygon, b: SimplePolygon) -> list:
    """Exact intersection of two simple polygons as a list of convex cells.

    Convex inputs produce a single cell; the union of the returned cells is
    the exact set intersection in every case.
    """
    if is_convex(a.vertices) and is_convex(b.vertices):
        cur = a.vertices
        n = len(b.vertices)
        for i in range(n):
            cur = halfplane_clip(cur, b.vertices[i], b.vertices[(i + 1) % n])
            if not cur:
                return []
        return [cur]
    return cells_intersect(ear_clip(a.vertices), ear_clip(b.vertices))


def is_convex(vs) -> bool:
    n = len(vs)
    for i in range(n):
        if orient(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) < 0:
            return False
    return True


def kernel(poly: SimplePolygon) -> list:
    """The kernel (set of points seeing the whole polygon) as a convex ring."""
    vs = poly.vertices
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    lo_x, hi_x = min(xs) - 1, max(xs) + 1
    lo_y, hi_y = min(ys) - 1, max(ys) + 1
    cur = [(lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y)]
    for a, b in poly.edges():
        cur = halfplane_clip(cur, a, b)
        if not cur:
            return []
    return cur


# ---------------------------------------------------------------------------
# cones


class Cone:
    """Closed cone with apex y spanned between rays y->p and y->q, taken on
    the side containing segment pq."""

    def __init__(self, p, y, q):
        self.p, self.y, self.q = p, y, q
        self.orientation = orient(y, p, q)

    def is_degenerate(self) -> bool:
        return self.orientation == 0

    def contains(self, x, strict: bool = False) -> bool:
        if self.is_degenerate():
            raise DegenerateConeError("cone apex chain is collinear")
        s1 = orient(self.y, self.p, x)
        s2 = orient(self.y, self.q, x)
        if strict:
            return s1 * self.orientation > 0 and s2 * self.orientation < 0
        return s1 * self.orientation >= 0 and s2 * self.orientation <= 0


def cone_contains(cone: Cone, x, strict: bool = False) -> bool:
    return cone.contains(x, strict=strict)


# ---------------------------------------------------------------------------
# visibility


def _angular_key(d):
    """Exact counterclockwise sort key helper: (half, direction)."""
    half = 0 if (_sgn(d[1]) > 0 or (_sgn(d[1]) == 0 and _sgn(d[0]) > 0)) else 1
    return half


def _dir_less(d1, d2) -> bool:
    h1, h2 = _angular_key(d1), _angular_key(d2)
    if h1 != h2:
        return h1 < h2
    c = _sgn(cross(d1, d2))
    return c > 0


def _sort_dirs(dirs):
    out = list(dirs)
    # insertion sort with the exact comparator (n is small)
    for i in range(1, len(out)):
        j = i
        while j > 0 and _dir_less(out[j], out[j - 1]):
            out[j], out[j - 1] = out[j - 1], out[j]
            j -= 1
    dedup = []
    for d in out:
        if dedup and _sgn(cross(dedup[-1], d)) == 0 and _sgn(dot(dedup[-1], d)) > 0:
            continue
        dedup.append(d)
    return dedup


def _ray_first_hit(q, d, edges, skip_zero=True):
    """Closest boundary point strictly along ray q + t d (t > 0)."""
    best_t = None
    best_p = None
    for a, b in edges:
        e = sub(b, a)
        den = cross(d, e)
        w = sub(a, q)
        if _sgn(den) == 0:
            if _sgn(cross(d, w)) != 0:
                continue
            # collinear edge: candidate endpoints by parameter along d
            for p in (a, b):
                t = _param_along(q, d, p)
                if _sgn(t) > 0 and (best_t is None or t < best_t):
                    best_t, best_p = t, p
            continue
        t = cross(w, e) / den
        u = cross(w, d) / den
        if _sgn(u) < 0 or _sgn(u - 1) > 0:
            continue
        if _sgn(t) <= 0:
            continue
        if best_t is None or t < best_t:
            best_t, best_p = t, add(q, scale(d, t))
    return best_p, best_t


def _param_along(q, d, p):
    dx, dy = d
    if _sgn(dx) != 0:
        return (p[0] - q[0]) / dx
    return (p[1] - q[1]) / dy


def _mid_direction(d1, d2):
    """A rational direction strictly inside the ccw sector from d1 to d2."""
    n1 = abs(d1[0]) + abs(d1[1])
    n2 = abs(d2[0]) + abs(d2[1])
    m = add(scale(d1, n2), scale(d2, n1))
    if _sgn(m[0]) == 0 and _sgn(m[1]) == 0:
        # opposite directions: sector is the left half-turn
        return (-d1[1], d1[0])
    return m


def visibility_polygon(poly: SimplePolygon, q) -> SimplePolygon:
    """The region of poly seen from q (interior or boundary), exact.

    Angular sweep over vertex directions with exact first-hit computations;
    output vertices are polygon vertices and window points.
    """
    vs = poly.vertices
    edges = poly.edges()
    loc = point_in_polygon(q, vs)
    if loc == "out":
        raise GeomError("viewpoint outside the polygon")

    if loc == "boundary":
        d_out, d_in = _boundary_tangents(poly, q)
    else:
        d_out = d_in = None

    dirs = []
    for v in vs:
        d = sub(v, q)
        if _sgn(d[0]) == 0 and _sgn(d[1]) == 0:
            continue
        dirs.append(d)
    dirs = _sort_dirs(dirs)
    if loc == "boundary":
        dirs = _restrict_dirs(dirs, d_out, d_in)
        ordered = dirs
    else:
        ordered = dirs + [dirs[0]]

    pts = []
    if loc == "boundary":
        pts.append(q)
    for i in range(len(ordered) - 1):
        dA, dB = ordered[i], ordered[i + 1]
        m = _mid_direction(dA, dB)
        hitp, _ = _ray_first_hit(q, m, edges)
        if hitp is None:
            continue
        edge = _edge_through(edges, q, m, hitp)
        if edge is None:
            continue
        a, b = edge
        entry = _ray_line_point(q, dA, a, b)
        exitp = _ray_line_point(q, dB, a, b)
        if entry is not None:
            pts.append(entry)
        if exitp is not None:
            pts.append(exitp)
    ring = _normalize_ring(pts)
    if len(ring) < 3:
        raise GeomError("degenerate visibility region")
    return SimplePolygon(ring, validate=False)


def _boundary_tangents(poly: SimplePolygon, q):
    vs = poly.vertices
    n = len(vs)
    for i, v in enumerate(vs):
        if points_equal(v, q):
            return sub(vs[(i + 1) % n], q), sub(vs[i - 1], q)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if on_segment(q, a, b):
            return sub(b, q), sub(a, q)
    raise GeomError("boundary point not found on any edge")


def _restrict_dirs(dirs, d_out, d_in):
    """Directions within the ccw sector [d_out, d_in], endpoints included."""
    out = [d_out]
    for d in dirs:
        if _sgn(cross(d_out, d)) == 0 and _sgn(dot(d_out, d)) > 0:
            continue
        if _sgn(cross(d_in, d)) == 0 and _sgn(dot(d_in, d)) > 0:
            continue
        if _ccw_between(d_out, d, d_in):
            out.append(d)
    out.append(d_in)
    return out


def _ccw_between(d1, d, d2) -> bool:
    """d strictly inside the ccw sector from d1 to d2."""
    c12 = _sgn(cross(d1, d2))
    c1 = _sgn(cross(d1, d))
    c2 = _sgn(cross(d, d2))
    if c12 > 0:
        return c1 > 0 and c2 > 0
    if c12 < 0:
        return c1 > 0 or c2 > 0
    # half-turn sector
    return c1 > 0


def _edge_through(edges, q, d, hitp):
    for a, b in edges:
        if on_segment(hitp, a, b):
            return (a, b)
    return None


def _ray_line_point(q, d, a, b):
    """Intersection of ray q + t d (t >= 0) with line ab; max-t endpoint when
    collinear (the edge seen edge-on collapses to its far endpoint)."""
    e = sub(b, a)
    den = cross(d, e)
    if _sgn(den) == 0:
        if _sgn(cross(d, sub(a, q))) != 0:
            return None
        ta, tb = _param_along(q, d, a), _param_along(q, d, b)
        t = ta if ta > tb else tb
        return a if t == ta else b
    t = cross(sub(a, q), e) / den
    if _sgn(t) < 0:
        return None
    return add(q, scale(d, t))


def segment_in_polygon(poly: SimplePolygon, a, b) -> bool:
    """True iff the closed segment [a, b] lies inside the closed polygon."""
    vs = poly.vertices
    if point_in_polygon(a, vs) == "out" or point_in_polygon(b, vs) == "out":
        return False
    if points_equal(a, b):
        return True
    cuts = [Radical.of(0), Radical.of(1)]
    d = sub(b, a)
    for e1, e2 in poly.edges():
        den = cross(d, sub(e2, e1))
        w = sub(e1, a)
        if _sgn(den) == 0:
            if _sgn(cross(d, w)) == 0:
                for p in (e1, e2):
                    t = _param_along(a, d, p)
                    if _sgn(t) > 0 and _sgn(t - 1) < 0:
                        cuts.append(Radical.of(t))
            continue
        t = cross(w, sub(e2, e1)) / den
        u = cross(w, d) / den
        if _sgn(u) >= 0 and _sgn(u - 1) <= 0 and _sgn(t) > 0 and _sgn(t - 1) < 0:
            cuts.append(Radical.of(t))
    cuts = sorted(set(cuts))
    for i in range(len(cuts) - 1):
        t = _interior_point(cuts[i], cuts[i + 1])
        p = add(a, scale(d, t if isinstance(t, Radical) else Radical.of(t)))
        if point_in_polygon(p, vs) == "out":
            return False
    return True


def sees(poly: SimplePolygon, y, x) -> bool:
    """Guard at y sees boundary/interior point x (segment containment)."""
    return segment_in_polygon(poly, y, x)
