"""Contiguous boundary guarding of a simple polygon.

The boundary is parameterized into [0, 1) edge by edge.  For every ordered
edge pair (i, j) surviving the visibility walk, the farthest coverable
parameter on edge j from a start on edge i is assembled as a piecewise
linear-rational function of the start parameter: candidate guards are the
guard region's cell-edge endpoints, intersections with blocker-pair lines,
and intersections with the moving line through the start point and one
blocker; each candidate is scored against all blockers by an exact prefix
walk, and every piece carries its witnessing guard as a parameter-dependent
homogeneous triple so guard placements reconstruct exactly from the witness
chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exactnum import Q, Radical, compare
from .circle import UnitPoint, position
from . import geom2d as g2
from .geom2d import SimplePolygon
from . import plrf
from .plrf import ConstMap, LinRat1, Piece, PiecewiseLRF, _interior_point, _quad_roots, ALL_ROOTS
from . import cover as cov


class GalleryError(ValueError):
    pass


@dataclass
class GuardPlan:
    k: int
    guards: list   # exact guard points
    arcs: list     # (start, end) global boundary parameters, half-open
    witness: object = None


# ---------------------------------------------------------------------------
# boundary parameterization


def boundary_point(poly: SimplePolygon, t):
    """Point at global boundary parameter t (taken modulo 1)."""
    n = len(poly.vertices)
    t = Radical.of(t)
    scaled = t * n
    k = scaled.floor()
    local = scaled - k
    i = k % n
    a = poly.vertices[i]
    b = poly.vertices[(i + 1) % n]
    return (a[0] + local * (b[0] - a[0]), a[1] + local * (b[1] - a[1]))


def vertex_param(poly: SimplePolygon, i: int):
    return Q(i % len(poly.vertices), len(poly.vertices))


# ---------------------------------------------------------------------------
# exact single-guard reach (shared with the brute-force oracle)


def _cone_blocked(e_t, y, f_r, x) -> Optional[bool]:
    """x strictly inside cone(e_t, y, f_r); None for a degenerate cone."""
    o = g2.orient(y, e_t, f_r)
    if o == 0:
        d1, d2 = g2.sub(e_t, y), g2.sub(f_r, y)
        if g2._sgn(g2.dot(d1, d2)) > 0:
            return False  # zero-angle cone: empty interior
        return None       # half-turn cone: ambiguous, caller treats as blocked
    s1 = g2.orient(y, e_t, x)
    s2 = g2.orient(y, f_r, x)
    return s1 * o > 0 and s2 * o < 0


def _any_blocked(e_t, y, f_r, blockers) -> bool:
    if g2.points_equal(y, f_r) or g2.points_equal(y, e_t):
        return False
    for x in blockers:
        b = _cone_blocked(e_t, y, f_r, x)
        if b is None or b:
            return True
    return False


def guard_reach_on_edge(e_t, y, f0, f1, blockers) -> Optional[Radical]:
    """Largest r in [0, 1] whose whole prefix of cones avoids every blocker
    strictly; None if r = 0 is already blocked.  Exact prefix walk over the
    critical alignments."""
    fd = g2.sub(f1, f0)
    crit = {Radical.of(0), Radical.of(1)}
    for x in list(blockers) + [e_t]:
        c1 = Radical.of(g2.cross(fd, g2.sub(x, y)))
        c0 = Radical.of(g2.cross(g2.sub(f0, y), g2.sub(x, y)))
        if c1.sign() != 0:
            r = -(c0 / c1)
            if Radical.of(0) < r < Radical.of(1):
                crit.add(r)
    crit = sorted(crit)
    if _any_blocked(e_t, y, f0, blockers):
        return None
    reach = Radical.of(0)
    for idx in range(len(crit) - 1):
        mid = _interior_point(crit[idx], crit[idx + 1])
        fr = g2.add(f0, g2.scale(fd, mid))
        if _any_blocked(e_t, y, fr, blockers):
            return crit[idx]
        reach = crit[idx + 1]
    return reach


# ---------------------------------------------------------------------------
# parametric points (homogeneous triples affine in the local edge parameter)


def _aff(c0, c1=0):
    return (Q(c0), Q(c1))


def _aff_eval(a, t: Radical) -> Radical:
    return Radical.of(a[0]) + Radical.of(a[1]) * t


def _aff_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _aff_scale(a, q):
    return (a[0] * q, a[1] * q)


def _aff_mul(a, b):
    """Product of two affine forms: quadratic [c2, c1, c0]."""
    return [a[1] * b[1], a[0] * b[1] + a[1] * b[0], a[0] * b[0]]


class ParamPoint:
    __slots__ = ("X", "Y", "W")

    def __init__(self, X, Y, W):
        self.X, self.Y, self.W = X, Y, W

    @staticmethod
    def const(p):
        return ParamPoint(_aff(p[0]), _aff(p[1]), _aff(1))

    def at(self, t: Radical):
        w = _aff_eval(self.W, t)
        if w.sign() == 0:
            return None
        return (_aff_eval(self.X, t) / w, _aff_eval(self.Y, t) / w)

    def shifted_to_global(self, n: int, i: int) -> "ParamPoint":
        """Substitute t = n*T - i, turning local-parameter forms global."""
        def conv(a):
            return (a[0] - a[1] * i, a[1] * n)

        return ParamPoint(conv(self.X), conv(self.Y), conv(self.W))


def edge_point_param(e0, e1) -> ParamPoint:
    d = g2.sub(e1, e0)
    return ParamPoint(_aff(e0[0], d[0]), _aff(e0[1], d[1]), _aff(1))


def moving_guard(l_a, l_b, e0, e1, x) -> ParamPoint:
    """line(l) meet line(e_t, x) as a homogeneous triple affine in t."""
    d = g2.sub(e1, e0)
    # homogeneous line through E(t) = (e0 + t d, 1) and X = (x, 1):
    # L1 = E x X componentwise affine in t
    L1a = _aff(e0[1] - x[1], d[1])
    L1b = _aff(x[0] - e0[0], -d[0])
    L1c = _aff(e0[0] * x[1] - e0[1] * x[0], d[0] * x[1] - d[1] * x[0])
    a2 = Q(l_a[1] - l_b[1])
    b2 = Q(l_b[0] - l_a[0])
    c2 = Q(l_a[0] * l_b[1] - l_a[1] * l_b[0])
    X = _aff_sub(_aff_scale(L1b, c2), _aff_scale(L1c, b2))
    Y = _aff_sub(_aff_scale(L1c, a2), _aff_scale(L1a, c2))
    W = _aff_sub(_aff_scale(L1a, b2), _aff_scale(L1b, a2))
    return ParamPoint(X, Y, W)


def _det3(y: ParamPoint, row2_pp, row3_const):
    """det [[X,Y,W],[p(t),1],[q,1]] as quadratic coefficients [c2,c1,c0].

    row2_pp is an affine point (pair of affine forms); row3_const a point.
    """
    (e1, e2) = row2_pp
    (x1, x2) = row3_const
    # cofactor expansion along the first row
    # X * (e2 - x2') ... with affine entries: use generic 2x2 minors
    m1 = _aff_sub(e2, _aff(x2))          # e2(t) - x2
    m2 = _aff_sub(e1, _aff(x1))          # e1(t) - x1
    # det = X*(e2 - x2) - Y*(e1 - x1) + W*(e1*x2 - e2*x1)
    part1 = _aff_mul(y.X, m1)
    part2 = _aff_mul(y.Y, m2)
    cross_e = _aff_sub(_aff_scale(e1, x2), _aff_scale(e2, x1))
    part3 = _aff_mul(y.W, cross_e)
    return [
        part1[0] - part2[0] + part3[0],
        part1[1] - part2[1] + part3[1],
        part1[2] - part2[2] + part3[2],
    ]


def shadow_lrf(y: ParamPoint, x, f0, f1) -> Optional[LinRat1]:
    """Parameter r on f where y(t), x, f_r are collinear, as an LRF of t.

    From det[[X,Y,W],[x,1],[f0 + r fd,1]] = 0:
      r(t) = -(f0x*P - f0y*Qq + R) / (fdx*P - fdy*Qq)
    with P = Y - W*x_y, Qq = X - W*x_x, R = X*x_y - Y*x_x, all affine in t.
    """
    fd = g2.sub(f1, f0)
    P = _aff_sub(y.Y, _aff_scale(y.W, Q(x[1])))
    Qq = _aff_sub(y.X, _aff_scale(y.W, Q(x[0])))
    R = _aff_sub(_aff_scale(y.X, Q(x[1])), _aff_scale(y.Y, Q(x[0])))
    num = _aff_sub(_aff_sub(_aff_scale(Qq, Q(f0[1])), _aff_scale(P, Q(f0[0]))), R)
    den = _aff_sub(_aff_scale(P, Q(fd[0])), _aff_scale(Qq, Q(fd[1])))
    if den[0] == 0 and den[1] == 0:
        return None
    return LinRat1(num[1], num[0], den[1], den[0])


def sparam_lrf(y: ParamPoint, l_a, l_b) -> LinRat1:
    """Parameter of y(t) along segment l, as an LRF of t."""
    ld = g2.sub(l_b, l_a)
    nrm = Q(ld[0] * ld[0] + ld[1] * ld[1])
    num = _aff_sub(
        _aff_scale(_aff_sub(y.X, _aff_scale(y.W, Q(l_a[0]))), Q(ld[0])),
        _aff_scale(_aff_sub(_aff_scale(y.W, Q(l_a[1])), y.Y), Q(ld[1])),
    )
    den = _aff_scale(y.W, nrm)
    return LinRat1(num[1], num[0], den[1], den[0])


# ---------------------------------------------------------------------------
# candidate assembly


def _lrf_roots_and_poles(f: LinRat1, lo, hi):
    """Roots of f = 0, f = 1 and poles, restricted to the open interval."""
    pts = []
    for c1, c0 in (
        (f.p, f.q),                # f == 0
        (f.p - f.r, f.q - f.s),    # f == 1
        (f.r, f.s),                # pole
    ):
        if c1 != 0:
            t = Radical.of(-Q(c0) / Q(c1))
            if lo < t < hi:
                pts.append(t)
    return pts


def _quad_roots_in(coeffs, lo, hi):
    roots = _quad_roots(*coeffs)
    if roots == ALL_ROOTS:
        return []
    return [r for r in roots if lo < r < hi]


def candidate_plrf(
    y: ParamPoint,
    e0,
    e1,
    f0,
    f1,
    blockers,
    l_seg: Optional[tuple],
) -> list:
    """Pieces (lo, hi, map, tag) of this candidate guard's reach over t in [0,1].

    The domain is cut at every parameter where a sign condition can change;
    each cell is then classified by one exact sample, which is sound because
    all flip points are cell boundaries.
    """
    lo, hi = Radical.of(0), Radical.of(1)
    cuts = {lo, hi}
    ept = (
        _aff(e0[0], g2.sub(e1, e0)[0]),
        _aff(e0[1], g2.sub(e1, e0)[1]),
    )
    # guard at infinity
    if y.W[1] != 0:
        w_root = Radical.of(-Q(y.W[0]) / Q(y.W[1]))
        if lo < w_root < hi:
            cuts.add(w_root)
    # guard leaving the carrier segment
    sp = sparam_lrf(y, *l_seg) if l_seg is not None else None
    if sp is not None:
        for t in _lrf_roots_and_poles(sp, lo, hi):
            cuts.add(t)
    shadows = {}
    for bi, x in enumerate(blockers):
        # blocker crossing the e-arm line
        for t in _quad_roots_in(_det3(y, ept, x), lo, hi):
            cuts.add(t)
        s = shadow_lrf(y, x, f0, f1)
        shadows[bi] = s
        if s is not None:
            for t in _lrf_roots_and_poles(s, lo, hi):
                cuts.add(t)
    # cone degeneracy against the f endpoints
    for v in (f0, f1):
        for t in _quad_roots_in(_det3(y, ept, v), lo, hi):
            cuts.add(t)
    bounds = sorted(cuts)
    pieces = []
    tag = y
    for ci in range(len(bounds) - 1):
        u, v = bounds[ci], bounds[ci + 1]
        ts = _interior_point(u, v)
        yt = y.at(ts)
        if yt is None:
            continue
        if sp is not None:
            try:
                sv = sp(ts)
            except Exception:
                continue
            if sv < 0 or sv > 1:
                continue
        et = (_aff_eval(ept[0], ts), _aff_eval(ept[1], ts))
        full = guard_reach_on_edge(et, yt, f0, f1, blockers)
        if full is None:
            continue
        if full == Radical.of(1):
            pieces.append((u, v, ConstMap(Radical.of(1)), tag))
            continue
        # identify contributing blockers and verify the min structure
        contributing = []
        for bi, x in enumerate(blockers):
            single = guard_reach_on_edge(et, yt, f0, f1, [x])
            if single is not None and single < Radical.of(1) and shadows.get(bi) is not None:
                contributing.append(bi)
        if not contributing:
            continue  # degenerate binding: drop conservatively
        best = None
        for bi in contributing:
            val = shadows[bi](ts)
            if best is None or val < best:
                best = val
        if best is None or compare(best, full) != 0:
            continue  # exotic interaction: drop conservatively
        if len(contributing) == 1:
            pieces.append((u, v, shadows[contributing[0]], tag))
        else:
            merged = _merge_min_lrfs([shadows[bi] for bi in contributing], u, v)
            for mu, mv, fn in merged:
                pieces.append((mu, mv, fn, tag))
    return pieces


def _merge_min_lrfs(fns, u, v):
    acc = PiecewiseLRF(plrf.LINE, [Piece(u, v, fns[0])])
    for fn in fns[1:]:
        nxt = PiecewiseLRF(plrf.LINE, [Piece(u, v, fn)])
        acc = plrf.merge(acc, nxt, -1)
    return [(pc.lo, pc.hi, pc.fn) for pc in acc.pieces]


# ---------------------------------------------------------------------------
# the restricted-next family


def restricted_next_multi(e0, e1, f0, f1, l_seg, blockers):
    """Max coverable f-parameter using guards on the segment l, vs all
    blockers; list of tagged LINE pieces over t in [0, 1]."""
    la, lb = l_seg
    cands = []
    cands.append(ParamPoint.const(la))
    cands.append(ParamPoint.const(lb))
    for bi in range(len(blockers)):
        cands.append(moving_guard(la, lb, e0, e1, blockers[bi]))
    for bi in range(len(blockers)):
        for bj in range(bi + 1, len(blockers)):
            x1, x2 = blockers[bi], blockers[bj]
            if g2.points_equal(x1, x2):
                continue
            p = g2.line_intersection(la, lb, x1, x2)
            if p is not None and g2.on_segment(p, la, lb):
                cands.append(ParamPoint.const(p))
    pieces = []
    for y in cands:
        l_for = l_seg if _is_moving(y) else None
        pieces.extend(candidate_plrf(y, e0, e1, f0, f1, blockers, l_for))
    return pieces


def _is_moving(y: ParamPoint) -> bool:
    return any(c != 0 for c in (y.X[1], y.Y[1], y.W[1]))


def restricted_next(e0, e1, f0, f1, l_seg, x1, x2):
    """Two-blocker form: duplicated points degenerate to the single-blocker
    case, matching the ordered-pair construction."""
    blockers = [x1] if g2.points_equal(x1, x2) else [x1, x2]
    return restricted_next_multi(e0, e1, f0, f1, l_seg, blockers)


def restricted_next_region(e0, e1, f0, f1, blockers, region_cells):
    """Max over guard segments drawn from the region's cell edges."""
    segs = []
    seen = set()
    for cell in region_cells:
        n = len(cell)
        for i in range(n):
            a, b = cell[i], cell[(i + 1) % n]
            key = _seg_key(a, b)
            if key in seen:
                continue
            seen.add(key)
            segs.append((a, b))
    pieces = []
    if not blockers:
        if segs:
            tag = ParamPoint.const(segs[0][0])
            return [(Radical.of(0), Radical.of(1), ConstMap(Radical.of(1)), tag)]
        return []
    for seg in segs:
        pieces.extend(restricted_next_multi(e0, e1, f0, f1, seg, blockers))
    return pieces


def _seg_key(a, b):
    ka = (str(a[0]), str(a[1]))
    kb = (str(b[0]), str(b[1]))
    return (ka, kb) if ka <= kb else (kb, ka)


# ---------------------------------------------------------------------------
# generator assembly


def _merge_max_tagged(piece_lists, domain_lo, domain_hi):
    """LINE merge-max of tagged piece fragments over a common domain."""
    acc = None
    for frag in piece_lists:
        if not frag:
            continue
        f = PiecewiseLRF(plrf.LINE, [Piece(lo, hi, fn, tag=tag) for lo, hi, fn, tag in frag])
        acc = f if acc is None else plrf.merge(acc, f, +1)
    return acc


def furthest_edge(poly: SimplePolygon, x):
    """Visibility walk from boundary point x: the last edge with coverable
    area and the surviving guard region (as convex cells)."""
    n = len(poly.vertices)
    i = _edge_of_boundary_point(poly, x)
    vis_x = g2.visibility_polygon(poly, x)
    cells = g2.fan_cells(vis_x.vertices, x)
    j = i
    region = cells
    for step in range(n):
        j_next = (j + 1) % n
        vis_v = _vis_cells(poly, j_next)
        nxt = g2.cells_intersect(region, vis_v)
        if not g2.cells_nonempty(nxt):
            return j, region
        region = nxt
        a, b = poly.vertices[j_next], poly.vertices[(j_next + 1) % n]
        probe = g2.cells_clip_halfplane(region, a, b)
        if not g2.cells_nonempty(probe):
            return j_next, region
        j = j_next
    return j, region


def _edge_of_boundary_point(poly, x) -> int:
    n = len(poly.vertices)
    for i in range(n):
        if g2.points_equal(poly.vertices[i], x):
            return i
    for i in range(n):
        if g2.on_segment(x, poly.vertices[i], poly.vertices[(i + 1) % n]):
            return i
    raise GalleryError("point is not on the boundary")


_VIS_CACHE: dict = {}


def _vis_cells(poly: SimplePolygon, k: int):
    key = (id(poly), k)
    got = _VIS_CACHE.get(key)
    if got is None:
        v = poly.vertices[k]
        vis = g2.visibility_polygon(poly, v)
        got = g2.fan_cells(vis.vertices, v)
        _VIS_CACHE[key] = got
    return got


def build_next_generator(poly: SimplePolygon):
    """The boundary next-generator as a lifted unit PLRF with guard tags."""
    n = len(poly.vertices)
    segments = []
    tags = []
    for i in range(n):
        e0 = poly.vertices[i]
        e1 = poly.vertices[(i + 1) % n]
        frag_lists = []
        # always-valid fallback: the start point itself guards its suffix
        fb_tag = edge_point_param(e0, e1)
        frag_lists.append([(Radical.of(0), Radical.of(1), ConstMap(Radical.of(0)), fb_tag)])
        region = None
        for dj in range(1, n + 1):
            j = (i + dj) % n
            vis_v = _vis_cells(poly, j)
            region = vis_v if region is None else g2.cells_intersect(region, vis_v)
            if not g2.cells_nonempty(region):
                break
            f0 = poly.vertices[j]
            f1 = poly.vertices[(j + 1) % n]
            cells = g2.cells_clip_halfplane(region, e0, e1)
            cells = g2.cells_clip_halfplane(cells, f0, f1)
            if not g2.cells_nonempty(cells):
                break
            blockers = _wedge_blockers(poly, i, j, e0, e1, f0, f1)
            frag = restricted_next_region(e0, e1, f0, f1, blockers, cells)
            frag = [(lo, hi, _scale_map(fn, dj, n), tag) for lo, hi, fn, tag in frag]
            if frag:
                frag_lists.append(frag)
        fallback = frag_lists[0]
        frag_lists[0] = [
            (lo, hi, _scale_map(fn, 1, n), tag) for lo, hi, fn, tag in fallback
        ]
        acc = _merge_max_tagged(frag_lists, Radical.of(0), Radical.of(1))
        if acc is None:
            raise GalleryError("no coverage function on an edge")
        for pc in acc.pieces:
            glo = (Radical.of(i) + pc.lo) / n
            ghi = (Radical.of(i) + pc.hi) / n
            gmap = _globalize_map(pc.fn, n, i)
            gtag = pc.tag.shifted_to_global(n, i) if pc.tag is not None else None
            segments.append((glo, ghi, gmap))
            tags.append(gtag)
    return plrf.build_unit_generator(segments, tags=tags, as_lifted=True)


def _wedge_blockers(poly, i, j, e0, e1, f0, f1):
    n = len(poly.vertices)
    out = []
    k = (j + 1) % n
    while True:
        v = poly.vertices[k]
        if g2.orient(e0, e1, v) >= 0 and g2.orient(f0, f1, v) >= 0:
            out.append(v)
        if k == i:
            break
        k = (k + 1) % n
    return out


def _scale_map(fn, dj, n):
    """Local reach r on target edge dj-ahead to the raw global value
    (i + dj + r)/n relative to the source edge's local parameter; the i/n
    offset is added at globalization time."""
    if isinstance(fn, ConstMap):
        return ConstMap((fn.pos() + dj) / n)
    # (r + dj)/n as an outer affine map composed with fn
    outer = LinRat1(Q(1, n), Q(dj, n), 0, 1)
    return outer.compose(fn)


def _globalize_map(fn, n, i):
    """Conjugate a local-parameter map to the global parameter T = (i + t)/n.

    The local value (dj + r)/n from _scale_map only needs the i/n offset and
    the inner substitution t = n T - i.
    """
    if isinstance(fn, ConstMap):
        return ConstMap(fn.pos() + Q(i, n))
    inner = LinRat1(n, -i, 0, 1)
    shifted = LinRat1(1, Q(i, n), 0, 1).compose(fn)
    return shifted.compose(inner)


# ---------------------------------------------------------------------------
# end-to-end solve


def solve_contiguous_art_gallery(poly: SimplePolygon, k_max: Optional[int] = None) -> GuardPlan:
    kern = g2.kernel(poly)
    if kern:
        guard = kern[0]
        plan = GuardPlan(1, [guard], [(Radical.of(0), Radical.of(1))])
        if not _validate_plan(poly, plan):
            raise GalleryError("kernel guard failed validation")
        return plan
    g = build_next_generator(poly)
    if k_max is None:
        k_max = g.base.n_pieces() + 3
    sol = cov.solve_analytic(g, k_max=k_max)
    params = [position(p) for p in sol.cover_points]
    guards = []
    arcs = []
    for m in range(sol.k):
        t = params[m]
        pc = g.base.piece_at(t)
        tag = pc.tag
        if tag is None:
            raise GalleryError("solver piece lost its guard tag")
        y = tag.at(t)
        if y is None:
            raise GalleryError("guard triple degenerate at the witness")
        guards.append(y)
        end = params[m + 1] if m + 1 < sol.k else params[0]
        arcs.append((t, end))
    plan = GuardPlan(sol.k, guards, arcs, witness=sol.witness)
    if not _validate_plan(poly, plan):
        raise GalleryError("guard plan failed exact validation")
    return plan


def _validate_plan(poly: SimplePolygon, plan: GuardPlan) -> bool:
    n = len(poly.vertices)
    total = Radical.of(0)
    for (a, b), y in zip(plan.arcs, plan.guards):
        if g2.point_in_polygon(y, poly.vertices) == "out":
            return False
        span = b - a
        if span.sign() <= 0:
            span = span + 1
        total = total + span
        for p in _arc_checkpoints(poly, a, b):
            if not g2.segment_in_polygon(poly, y, p):
                return False
    return total == Radical.of(1)


def _arc_checkpoints(poly: SimplePolygon, a, b):
    n = len(poly.vertices)
    pts = [boundary_point(poly, a)]
    span = b - a
    if span.sign() <= 0:
        span = span + 1
    # vertices with parameter inside (a, a + span)
    start = (a * n).floor()
    steps = (span * n).floor() + 2
    for s in range(1, int(steps) + 1):
        vp = Q(start + s, n)
        rel = Radical.of(vp) - a
        if rel.sign() < 0:
            rel = rel + 1
        if rel < span:
            pts.append(poly.vertices[(start + s) % n])
    end = a + span
    pts.append(boundary_point(poly, end if end < 1 else end - 1))
    return pts
