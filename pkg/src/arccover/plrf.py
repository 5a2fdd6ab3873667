"""Piecewise linear-rational functions on the circle.

One engine drives both representations.  Every function is a sorted list of
half-open parameter intervals [lo, hi) inside [0, period), each carrying a
single map: a Moebius map t -> (p t + q)/(r t + s) in the unit representation,
a 2x2 matrix acting on ray coordinates in the ray representation, or an
explicit constant.  Boundary parameters are first-order radicals.

Invariants maintained by all constructors and operations:
  * pieces are disjoint, sorted, and never span the parameter origin;
  * ray-representation pieces never span a square corner (s in {1,3,5,7}),
    so each piece lives in one affine chart x(s);
  * a piece's image never properly crosses the canonical branch cut, which
    makes circular positions continuous on every piece.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from .exactnum import DomainError, PoleError, Q, Radical, compare, eval_lrf, qsign
from .circle import (
    CirclePoint,
    RayPoint,
    UnitPoint,
    position,
    ray_of_sparam,
)

UNIT = "unit"
RAY = "ray"
# LINE is an internal mode: same machinery over a plain interval, values
# compared as raw radicals with no circular reduction (used to assemble
# generators from unreduced graphs before splitting them into [0, 1)).
LINE = "line"

_PERIOD = {UNIT: Radical.of(1), RAY: Radical.of(8), LINE: Radical.of(1 << 62)}
_RAY_CORNERS = [Radical.of(k) for k in (1, 3, 5, 7)]


class MalformedFunctionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# maps


class LinRat1:
    """t -> (p t + q) / (r t + s) with rational coefficients."""

    __slots__ = ("p", "q", "r", "s")

    def __init__(self, p, q, r, s):
        self.p, self.q, self.r, self.s = Q(p), Q(q), Q(r), Q(s)

    @staticmethod
    def identity() -> "LinRat1":
        return LinRat1(1, 0, 0, 1)

    def det(self):
        return self.p * self.s - self.q * self.r

    def is_const(self) -> bool:
        return self.det() == 0

    def __call__(self, t: Radical) -> Radical:
        return eval_lrf(self.p, self.q, self.r, self.s, t)

    def compose(self, inner: "LinRat1") -> "LinRat1":
        a, b, c, d = self.p, self.q, self.r, self.s
        e, f, g, h = inner.p, inner.q, inner.r, inner.s
        return LinRat1(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def invert(self) -> "LinRat1":
        if self.is_const():
            raise MalformedFunctionError("constant map has no inverse")
        return LinRat1(self.s, -self.q, -self.r, self.p)

    def shifted(self, k: int) -> "LinRat1":
        """The map minus the integer k (unit-representation reduction)."""
        return LinRat1(self.p - k * self.r, self.q - k * self.s, self.r, self.s)

    def coeffs(self):
        return (self.p, self.q, self.r, self.s)

    def __eq__(self, other):
        if not isinstance(other, LinRat1):
            return NotImplemented
        return self.coeffs() == other.coeffs()

    def __repr__(self):
        return f"LinRat1({self.p}, {self.q}, {self.r}, {self.s})"


class LinRat2:
    """Ray map x -> (A x) / (C x) with C constrained to equal rows.

    The equal-row constraint keeps composition closed (the common scalar
    denominator factors out of the pointwise quotient), and builders
    sign-normalize A so the denominator form is positive on the piece; the
    image ray is then the ray through A x, which is what the engine uses.
    """

    __slots__ = ("a11", "a12", "a21", "a22", "c1", "c2")

    def __init__(self, A, C=None):
        (self.a11, self.a12), (self.a21, self.a22) = (
            (Q(A[0][0]), Q(A[0][1])),
            (Q(A[1][0]), Q(A[1][1])),
        )
        if C is None:
            self.c1, self.c2 = Q(1), Q(0)
        else:
            if tuple(C[0]) != tuple(C[1]):
                raise MalformedFunctionError("LinRat2 requires equal denominator rows")
            self.c1, self.c2 = Q(C[0][0]), Q(C[0][1])

    @staticmethod
    def identity() -> "LinRat2":
        return LinRat2(((1, 0), (0, 1)))

    @staticmethod
    def rotation_quarter_turns(k: int) -> "LinRat2":
        mats = {
            0: ((1, 0), (0, 1)),
            1: ((0, -1), (1, 0)),
            2: ((-1, 0), (0, -1)),
            3: ((0, 1), (-1, 0)),
        }
        return LinRat2(mats[k % 4])

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def is_const(self) -> bool:
        return self.det() == 0

    def apply_vec(self, x, y):
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def __call__(self, p: RayPoint) -> RayPoint:
        u, v = self.apply_vec(p.x, p.y)
        return RayPoint(u, v)

    def compose(self, inner: "LinRat2") -> "LinRat2":
        b = inner
        A = (
            (self.a11 * b.a11 + self.a12 * b.a21, self.a11 * b.a12 + self.a12 * b.a22),
            (self.a21 * b.a11 + self.a22 * b.a21, self.a21 * b.a12 + self.a22 * b.a22),
        )
        c = (self.c1 * b.a11 + self.c2 * b.a21, self.c1 * b.a12 + self.c2 * b.a22)
        return LinRat2(A, (c, c))

    def invert(self) -> "LinRat2":
        d = self.det()
        if d == 0:
            raise MalformedFunctionError("singular ray map has no inverse")
        # adjugate maps A x back to det * x; flip sign if det < 0 to keep rays
        if d > 0:
            return LinRat2(((self.a22, -self.a12), (-self.a21, self.a11)))
        return LinRat2(((-self.a22, self.a12), (self.a21, -self.a11)))

    def coeffs(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def __eq__(self, other):
        if not isinstance(other, LinRat2):
            return NotImplemented
        return self.coeffs() == other.coeffs()

    def __repr__(self):
        return f"LinRat2((({self.a11},{self.a12}),({self.a21},{self.a22})))"


class ConstMap:
    """A piece whose image is one circle point (or one raw value in LINE mode)."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def is_const(self) -> bool:
        return True

    def pos(self) -> Radical:
        return self.value if isinstance(self.value, Radical) else position(self.value)

    def __eq__(self, other):
        if not isinstance(other, ConstMap):
            return NotImplemented
        return self.pos() == other.pos()

    def __repr__(self):
        return f"ConstMap({self.value!r})"


MapLike = Union[LinRat1, LinRat2, ConstMap]


# ---------------------------------------------------------------------------
# pieces


class Piece:
    __slots__ = ("lo", "hi", "fn", "wind", "tag")

    def __init__(self, lo, hi, fn: MapLike, wind: int = 0, tag: Any = None):
        self.lo = Radical.of(lo)
        self.hi = Radical.of(hi)
        self.fn = fn
        self.wind = wind
        self.tag = tag

    def clone(self, lo=None, hi=None, wind=None) -> "Piece":
        return Piece(
            self.lo if lo is None else lo,
            self.hi if hi is None else hi,
            self.fn,
            self.wind if wind is None else wind,
            self.tag,
        )

    def __repr__(self):
        w = f", w={self.wind}" if self.wind else ""
        return f"Piece([{self.lo}, {self.hi}) {self.fn!r}{w})"


class PiecewiseLRF:
    """Ordered pieces over the circular parameter; domain may be partial."""

    def __init__(self, rep: str, pieces: list, validate: bool = True):
        if rep not in (UNIT, RAY, LINE):
            raise MalformedFunctionError(f"unknown representation {rep!r}")
        self.rep = rep
        self.pieces = sorted(pieces, key=lambda p: p.lo)
        if validate:
            self._validate()

    @property
    def period(self) -> Radical:
        return _PERIOD[self.rep]

    def _validate(self):
        per = self.period
        zero = Radical.of(0)
        prev_hi = None
        for pc in self.pieces:
            if not (zero <= pc.lo < per):
                raise MalformedFunctionError(f"piece start {pc.lo} outside [0, period)")
            if not (pc.lo < pc.hi <= per):
                raise MalformedFunctionError(f"empty or reversed piece [{pc.lo}, {pc.hi})")
            if prev_hi is not None and pc.lo < prev_hi:
                raise MalformedFunctionError("overlapping pieces")
            if self.rep == RAY:
                for c in _RAY_CORNERS:
                    if pc.lo < c < pc.hi:
                        raise MalformedFunctionError("ray piece spans a square corner")
            prev_hi = pc.hi

    def is_full_circle(self) -> bool:
        if not self.pieces:
            return False
        if self.pieces[0].lo.sign() != 0:
            return False
        prev = self.pieces[0]
        for pc in self.pieces[1:]:
            if pc.lo != prev.hi:
                return False
            prev = pc
        return prev.hi == self.period

    def piece_index_at(self, tau: Radical) -> Optional[int]:
        lo, hi = 0, len(self.pieces) - 1
        ans = None
        while lo <= hi:
            mid = (lo + hi) // 2
            if self.pieces[mid].lo <= tau:
                ans = mid
                lo = mid + 1
            else:
                hi = mid - 1
        if ans is None:
            return None
        return ans if tau < self.pieces[ans].hi else None

    def piece_at(self, tau: Radical) -> Optional[Piece]:
        i = self.piece_index_at(tau)
        return None if i is None else self.pieces[i]

    def boundary_taus(self) -> list:
        return [pc.lo for pc in self.pieces]

    def n_pieces(self) -> int:
        return len(self.pieces)

    def __repr__(self):
        return f"PiecewiseLRF({self.rep}, {len(self.pieces)} pieces)"


class LiftedPLRF:
    """A PiecewiseLRF whose pieces carry winding increments (canonical branch)."""

    def __init__(self, base: PiecewiseLRF):
        self.base = base

    @property
    def rep(self):
        return self.base.rep

    @property
    def pieces(self):
        return self.base.pieces

    def n_pieces(self):
        return self.base.n_pieces()

    def __repr__(self):
        return f"LiftedPLRF({self.base!r})"


# ---------------------------------------------------------------------------
# representation helpers

_EDGE_CHARTS = (
    # (edge start s, x(s) = u0 + s*du)
    (Q(0), (Q(1), Q(0)), (Q(0), Q(1))),
    (Q(1), (Q(2), Q(1)), (Q(-1), Q(0))),
    (Q(3), (Q(-1), Q(4)), (Q(0), Q(-1))),
    (Q(5), (Q(-6), Q(-1)), (Q(1), Q(0))),
    (Q(7), (Q(1), Q(-8)), (Q(0), Q(1))),
)


def _chart_for(lo: Radical):
    for start, u0, du in reversed(_EDGE_CHARTS):
        if lo >= start:
            return u0, du
    raise MalformedFunctionError("parameter below 0")


def point_of_tau(rep: str, tau: Radical) -> CirclePoint:
    if rep == UNIT:
        return UnitPoint(tau)
    return ray_of_sparam(tau)


def tau_of_point(rep: str, p: CirclePoint) -> Radical:
    return position(p)


def _ray_value(fn: MapLike, tau: Radical) -> RayPoint:
    if isinstance(fn, ConstMap):
        return fn.value
    u0, du = _chart_for(tau)
    x = Radical.of(u0[0]) + tau * du[0]
    y = Radical.of(u0[1]) + tau * du[1]
    u, v = fn.apply_vec(x, y)
    return RayPoint(u, v)


def map_value(rep: str, fn: MapLike, tau: Radical) -> CirclePoint:
    if isinstance(fn, ConstMap):
        return fn.value
    if rep == UNIT:
        return UnitPoint(fn(tau))
    return _ray_value(fn, tau)


def value_tau(rep: str, fn: MapLike, tau: Radical) -> Radical:
    """Circular position (raw value in LINE mode) of the map's value at tau."""
    if rep == LINE:
        if isinstance(fn, ConstMap):
            return fn.value if isinstance(fn.value, Radical) else position(fn.value)
        return fn(tau)
    return position(map_value(rep, fn, tau))


def _raw_value_unit(fn: MapLike, tau: Radical) -> Radical:
    """Unreduced unit value (may equal 1 at a closed right endpoint)."""
    if isinstance(fn, ConstMap):
        return position(fn.value)
    return fn(tau)


# ---------------------------------------------------------------------------
# quadratic machinery

ALL_ROOTS = "all"


def _quad_roots(c2, c1, c0):
    """Real roots of c2 t^2 + c1 t + c0 (rationals); ALL_ROOTS if identically 0."""
    c2, c1, c0 = Q(c2), Q(c1), Q(c0)
    if c2 == 0:
        if c1 == 0:
            return ALL_ROOTS if c0 == 0 else []
        return [Radical.of(-c0 / c1)]
    disc = c1 * c1 - 4 * c2 * c0
    s = qsign(disc)
    if s < 0:
        return []
    if s == 0:
        return [Radical.of(-c1 / (2 * c2))]
    r1 = Radical(-c1 / (2 * c2), 1 / (2 * c2), disc)
    r2 = Radical(-c1 / (2 * c2), -1 / (2 * c2), disc)
    return [r1, r2] if r1 < r2 else [r2, r1]


def _poly_eval(coeffs, t: Radical) -> Radical:
    acc = Radical.of(0)
    for c in coeffs:
        acc = acc * t + Radical.of(c)
    return acc


def _sign_after(coeffs, t0: Radical) -> int:
    """Sign of the polynomial (rational coeffs, degree <= 2) just right of t0."""
    v = _poly_eval(coeffs, t0)
    s = v.sign()
    if s != 0:
        return s
    if len(coeffs) == 3 and coeffs[0] != 0:
        a, b, _ = coeffs
        # p(t) = a (t - t0)(t - r'); just right of t0 the first factor is +eps
        other = Radical.of(Q(-b) / Q(a)) - t0  # r' (other root, via Vieta)
        so = other.sign()
        if so == 0:
            return qsign(a)
        return -qsign(a) * so
    lin = coeffs[-2:] if len(coeffs) >= 2 else [0, coeffs[-1]]
    if lin[0] != 0:
        return qsign(lin[0])
    return 0


def _interior_point(lo: Radical, hi: Radical) -> Radical:
    """An exact point strictly inside (lo, hi).

    Radicals with distinct radicands have no radical midpoint, so fall back
    to a dyadic rational just above lo; terminates by density.
    """
    if lo.c == hi.c:
        return (lo + hi) / 2
    k = 8
    while k <= (1 << 24):
        scale = 1 << k
        n = (lo * scale).floor() + 1
        cand = Radical.of(Q(n, scale))
        if lo < cand < hi:
            return cand
        k *= 2
    raise MalformedFunctionError("could not find interior point")


def _dedup_sorted(vals) -> list:
    vals = sorted(vals)
    out = []
    for v in vals:
        if not out or out[-1] != v:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# crossing solvers


def _unit_diff_poly(fa: MapLike, fb: MapLike):
    """Coefficients [c2, c1, c0] with
    sign(fa(t) - fb(t)) == sign(poly(t)) * den_sign(fa, t) * den_sign(fb, t).
    Returns None when a constant with a radical value is involved."""
    fa_const = isinstance(fa, ConstMap)
    fb_const = isinstance(fb, ConstMap)
    if fa_const and fb_const:
        return None
    if fa_const:
        v = fa.pos()
        if not v.is_rational():
            return None
        vq = v.as_rational()
        return [Q(0), vq * fb.r - fb.p, vq * fb.s - fb.q]
    if fb_const:
        v = fb.pos()
        if not v.is_rational():
            return None
        vq = v.as_rational()
        return [Q(0), fa.p - vq * fa.r, fa.q - vq * fa.s]
    c2 = fa.p * fb.r - fb.p * fa.r
    c1 = fa.p * fb.s + fa.q * fb.r - fb.p * fa.s - fb.q * fa.r
    c0 = fa.q * fb.s - fb.q * fa.s
    return [c2, c1, c0]


def _den_sign_unit(fn: MapLike, tau: Radical) -> int:
    if isinstance(fn, ConstMap):
        return 1
    d = Radical.of(fn.r) * tau + fn.s
    s = d.sign()
    if s == 0:
        raise PoleError("pole inside a piece", at=tau)
    return s


def _solve_unit_equal(fa, fb, lo, hi):
    poly = _unit_diff_poly(fa, fb)
    if poly is None:
        # at least one radical-valued constant involved
        if isinstance(fa, ConstMap) and isinstance(fb, ConstMap):
            return ALL_ROOTS if fa.pos() == fb.pos() else []
        cst, mob = (fa, fb) if isinstance(fa, ConstMap) else (fb, fa)
        v = cst.pos()
        den = Radical.of(mob.p) - v * mob.r
        if den.sign() == 0:
            num = Radical.of(mob.q) - v * mob.s
            return ALL_ROOTS if num.sign() == 0 else []
        t = (v * mob.s - mob.q) / den
        return [t] if lo < t < hi else []
    roots = _quad_roots(*poly)
    if roots == ALL_ROOTS:
        return ALL_ROOTS
    return [r for r in roots if lo < r < hi]


def _ray_affine_image(fn: LinRat2, u0, du):
    """A (u0 + s du) as coefficient pairs (e0 + e1 s, f0 + f1 s)."""
    e0 = fn.a11 * u0[0] + fn.a12 * u0[1]
    e1 = fn.a11 * du[0] + fn.a12 * du[1]
    f0 = fn.a21 * u0[0] + fn.a22 * u0[1]
    f1 = fn.a21 * du[0] + fn.a22 * du[1]
    return (e0, e1, f0, f1)


def _ray_cross_poly_maps(fa: LinRat2, fb: LinRat2, u0, du):
    """cross(fa x(s), fb x(s)) as [c2, c1, c0]."""
    ea0, ea1, fa0, fa1 = _ray_affine_image(fa, u0, du)
    eb0, eb1, fb0, fb1 = _ray_affine_image(fb, u0, du)
    c2 = ea1 * fb1 - fa1 * eb1
    c1 = ea0 * fb1 + ea1 * fb0 - fa0 * eb1 - fa1 * eb0
    c0 = ea0 * fb0 - fa0 * eb0
    return [c2, c1, c0]


def _ray_cross_poly_const(fn: LinRat2, b: RayPoint, u0, du):
    """cross(fn x(s), b) as [c1, c0] with radical coefficients allowed."""
    e0, e1, f0, f1 = _ray_affine_image(fn, u0, du)
    c1 = b.y * e1 - b.x * f1
    c0 = b.y * e0 - b.x * f0
    return c1, c0


def _solve_ray_equal(fa, fb, lo, hi):
    u0, du = _chart_for(lo)
    fa_const = isinstance(fa, ConstMap)
    fb_const = isinstance(fb, ConstMap)
    if fa_const and fb_const:
        return ALL_ROOTS if fa.value == fb.value else []
    if fa_const or fb_const:
        cst, mat = (fa, fb) if fa_const else (fb, fa)
        b = cst.value
        c1, c0 = _ray_cross_poly_const(mat, b, u0, du)
        if c1.sign() == 0 and c0.sign() == 0:
            roots = ALL_ROOTS
        elif c1.sign() == 0:
            roots = []
        else:
            roots = [-c0 / c1]
    else:
        poly = _ray_cross_poly_maps(fa, fb, u0, du)
        roots = _quad_roots(*poly)
    if roots == ALL_ROOTS:
        va, vb = _ray_value(fa, lo), _ray_value(fb, lo)
        return ALL_ROOTS if va.dot(vb).sign() > 0 else []
    out = []
    for r in roots:
        if lo < r < hi:
            va, vb = _ray_value(fa, r), _ray_value(fb, r)
            if va.dot(vb).sign() > 0:
                out.append(r)
    return out


def solve_equal(rep, fa, fb, lo, hi):
    """Parameters in the open cell (lo, hi) where the two maps' values agree."""
    if rep in (UNIT, LINE):
        return _solve_unit_equal(fa, fb, lo, hi)
    return _solve_ray_equal(fa, fb, lo, hi)


def solve_identity(rep, fn, lo, hi):
    """Parameters in (lo, hi) where fn(x) == x."""
    if isinstance(fn, ConstMap):
        v = fn.pos()
        return [v] if lo < v < hi else []
    if rep == UNIT:
        roots = _quad_roots(-fn.r, fn.p - fn.s, fn.q)
        if roots == ALL_ROOTS:
            return ALL_ROOTS
        return [r for r in roots if lo < r < hi]
    u0, du = _chart_for(lo)
    e0, e1, f0, f1 = _ray_affine_image(fn, u0, du)
    c2 = e1 * du[1] - f1 * du[0]
    c1 = e0 * du[1] + e1 * u0[1] - f0 * du[0] - f1 * u0[0]
    c0 = e0 * u0[1] - f0 * u0[0]
    roots = _quad_roots(c2, c1, c0)
    if roots == ALL_ROOTS:
        # parallel everywhere: identity if aligned, antipodal map otherwise
        aligned = _ray_value(fn, lo).dot(ray_of_sparam(lo)).sign() > 0
        return ALL_ROOTS if aligned else []
    out = []
    for r in roots:
        if lo < r < hi:
            if _ray_value(fn, r).dot(ray_of_sparam(r)).sign() > 0:
                out.append(r)
    return out


def solve_preimage(rep, fn, lo, hi, target: CirclePoint):
    """Parameters in [lo, hi) with fn(x) == target."""
    if isinstance(fn, ConstMap):
        return []
    if rep == UNIT:
        v = position(target)
        den = Radical.of(fn.p) - v * fn.r
        if den.sign() == 0:
            return []
        t = (v * fn.s - fn.q) / den
        return [t] if lo <= t < hi else []
    u0, du = _chart_for(lo)
    c1, c0 = _ray_cross_poly_const(fn, target, u0, du)
    if c1.sign() == 0:
        return []
    t = -c0 / c1
    if lo <= t < hi and _ray_value(fn, t).dot(target).sign() > 0:
        return [t]
    return []


def compare_after(rep, fa, fb, tau0: Radical, hi: Radical) -> int:
    """Sign of pos(fa) - pos(fb) just right of tau0 (cell extends to hi)."""
    pa = value_tau(rep, fa, tau0)
    pb = value_tau(rep, fb, tau0)
    c = compare(pa, pb)
    if c != 0:
        return c
    if rep in (UNIT, LINE):
        poly = _unit_diff_poly(fa, fb)
        if poly is not None:
            s = _sign_after(poly, tau0)
            return s * _den_sign_unit(fa, tau0) * _den_sign_unit(fb, tau0)
        return _probe_compare(rep, fa, fb, tau0, hi)
    if isinstance(fa, ConstMap) or isinstance(fb, ConstMap):
        return _probe_compare(rep, fa, fb, tau0, hi)
    u0, du = _chart_for(tau0)
    # cross(fb x, fa x) > 0 iff fa is locally counterclockwise-ahead of fb
    poly = _ray_cross_poly_maps(fb, fa, u0, du)
    return _sign_after(poly, tau0)


def _probe_compare(rep, fa, fb, tau0, hi) -> int:
    cuts = solve_equal(rep, fa, fb, tau0, hi)
    if cuts == ALL_ROOTS:
        return 0
    right = cuts[0] if cuts else hi
    mid = _interior_point(tau0, right)
    return compare(value_tau(rep, fa, mid), value_tau(rep, fb, mid))


# ---------------------------------------------------------------------------
# evaluation


def eval_plrf(f: PiecewiseLRF, x: CirclePoint) -> CirclePoint:
    tau = tau_of_point(f.rep, x)
    pc = f.piece_at(tau)
    if pc is None:
        raise DomainError(f"point at parameter {tau} outside function domain")
    if f.rep == UNIT:
        raw = _raw_value_unit(pc.fn, tau)
        if raw.sign() < 0 or raw >= f.period:
            raise MalformedFunctionError("piece map value escaped [0, 1)")
    return map_value(f.rep, pc.fn, tau)


def eval_lifted(f: LiftedPLRF, x: CirclePoint):
    tau = tau_of_point(f.rep, x)
    pc = f.base.piece_at(tau)
    if pc is None:
        raise DomainError("point outside function domain")
    return pc.wind, map_value(f.rep, pc.fn, tau)


# ---------------------------------------------------------------------------
# merge


def _refine_cells(fa: PiecewiseLRF, fb: PiecewiseLRF):
    events = set()
    for f in (fa, fb):
        for pc in f.pieces:
            events.add(pc.lo)
            events.add(pc.hi)
    evs = _dedup_sorted(events)
    cells = []
    for i in range(len(evs) - 1):
        u, v = evs[i], evs[i + 1]
        pa = fa.piece_at(u)
        pb = fb.piece_at(u)
        if pa is not None or pb is not None:
            cells.append((u, v, pa, pb))
    return cells


def _pos_from(branch_tau: Radical, tau: Radical, period: Radical) -> Radical:
    d = tau - branch_tau
    return d + period if d.sign() < 0 else d


def _cell_winner(rep, pa, pb, su, sv, mode, branch_tau, period):
    ta = value_tau(rep, pa.fn, su)
    tb = value_tau(rep, pb.fn, su)
    c = compare(_pos_from(branch_tau, ta, period), _pos_from(branch_tau, tb, period))
    if c == 0:
        c = compare_after(rep, pa.fn, pb.fn, su, sv)
    if c == 0:
        return pa
    return pa if c * mode > 0 else pb


def merge(fa: PiecewiseLRF, fb: PiecewiseLRF, mode: int, branch: Optional[CirclePoint] = None) -> PiecewiseLRF:
    """Pointwise max (mode=+1) or min (mode=-1) by circular position from branch.

    Where only one input is defined the result copies it; crossing parameters
    inside shared cells become new radical boundary points (at most two per
    shared cell, per the quadratic).
    """
    if fa.rep != fb.rep:
        raise MalformedFunctionError("cannot merge functions of different representations")
    rep = fa.rep
    period = fa.period
    branch_tau = Radical.of(0) if branch is None else tau_of_point(rep, branch)
    out = []
    for u, v, pa, pb in _refine_cells(fa, fb):
        if pa is None or pb is None:
            src = pa if pa is not None else pb
            out.append(src.clone(lo=u, hi=v))
            continue
        cuts = solve_equal(rep, pa.fn, pb.fn, u, v)
        if cuts == ALL_ROOTS:
            out.append(pa.clone(lo=u, hi=v))
            continue
        if branch_tau.sign() != 0:
            target = point_of_tau(rep, branch_tau)
            for fn in (pa.fn, pb.fn):
                for t in solve_preimage(rep, fn, u, v, target):
                    if u < t < v:
                        cuts.append(t)
        bounds = _dedup_sorted([u] + cuts + [v])
        for i in range(len(bounds) - 1):
            su, sv = bounds[i], bounds[i + 1]
            winner = _cell_winner(rep, pa, pb, su, sv, mode, branch_tau, period)
            out.append(winner.clone(lo=su, hi=sv))
    return PiecewiseLRF(rep, coalesce(out, rep))


def merge_max(fa, fb, branch=None):
    return merge(fa, fb, +1, branch)


def merge_min(fa, fb, branch=None):
    return merge(fa, fb, -1, branch)


def coalesce(pieces: list, rep: str = UNIT) -> list:
    pieces = sorted(pieces, key=lambda p: p.lo)
    corners = set()
    if rep == RAY:
        corners = {float(c) for c in _RAY_CORNERS}
    out = []
    for pc in pieces:
        if (
            out
            and out[-1].hi == pc.lo
            and float(out[-1].hi) not in corners
            and out[-1].wind == pc.wind
            and out[-1].tag == pc.tag
            and _fn_equal(out[-1].fn, pc.fn)
        ):
            out[-1] = out[-1].clone(hi=pc.hi)
        else:
            out.append(pc.clone())
    return out


def _fn_equal(a: MapLike, b: MapLike) -> bool:
    if type(a) is not type(b):
        return False
    r = a == b
    return bool(r) if r is not NotImplemented else False


# ---------------------------------------------------------------------------
# composition, inversion, lift


def compose(f: PiecewiseLRF, g: PiecewiseLRF) -> PiecewiseLRF:
    """f after g.  Requires image(g) inside domain(f), g monotone nondecreasing.

    Boundary parameters of the composite are g's own plus g-preimages of f's
    boundaries, which is what keeps composition growth additive.
    """
    if f.rep != g.rep:
        raise MalformedFunctionError("representation mismatch")
    rep = f.rep
    events = set()
    for pc in g.pieces:
        events.add(pc.lo)
        events.add(pc.hi)
    targets = [point_of_tau(rep, pc.lo) for pc in f.pieces]
    for pc in g.pieces:
        for target in targets:
            for t in solve_preimage(rep, pc.fn, pc.lo, pc.hi, target):
                events.add(t)
    evs = _dedup_sorted(events)
    out = []
    for i in range(len(evs) - 1):
        u, v = evs[i], evs[i + 1]
        gp = g.piece_at(u)
        if gp is None:
            continue
        img = map_value(rep, gp.fn, u)
        fp = f.piece_at(tau_of_point(rep, img))
        if fp is None:
            raise DomainError("image of inner function escapes outer domain")
        out.append(Piece(u, v, _compose_fns(rep, fp.fn, gp.fn), gp.wind + fp.wind))
    return PiecewiseLRF(rep, coalesce(out, rep))


def _compose_fns(rep, outer: MapLike, inner: MapLike) -> MapLike:
    if isinstance(outer, ConstMap):
        return ConstMap(outer.value)
    if isinstance(inner, ConstMap):
        return ConstMap(map_value(rep, outer, position(inner.value)))
    return outer.compose(inner)


def compose_lifted(f: LiftedPLRF, g: LiftedPLRF) -> LiftedPLRF:
    return LiftedPLRF(compose(f.base, g.base))


def invert(f: PiecewiseLRF) -> PiecewiseLRF:
    """Inverse of a strictly monotone full-circle function."""
    if not f.is_full_circle():
        raise MalformedFunctionError("invert requires a full-circle function")
    out = []
    for pc in f.pieces:
        if isinstance(pc.fn, ConstMap) or pc.fn.is_const():
            raise MalformedFunctionError("constant piece is not invertible")
        if pc.fn.det() <= 0:
            raise MalformedFunctionError("non-monotone piece")
        lo_img = value_tau(f.rep, pc.fn, pc.lo)
        w, hi_img = _lifted_left_limit(f.rep, Piece(pc.lo, pc.hi, pc.fn), f.period)
        if w:
            hi_img = f.period
        if not lo_img < hi_img:
            raise MalformedFunctionError("piece image is not increasing")
        for a, b in split_at_corners(f.rep, lo_img, hi_img):
            out.append(Piece(a, b, pc.fn.invert()))
    return PiecewiseLRF(f.rep, coalesce(out, f.rep))


def lift(f: PiecewiseLRF, branch: Optional[CirclePoint] = None) -> LiftedPLRF:
    """Winding annotation: 1 exactly where the image falls behind the input.

    Pieces are split wherever the image meets the input point so that the
    increment is constant on each final piece; with a non-canonical branch
    cut, also wherever the image or the input crosses the branch.
    """
    rep = f.rep
    branch_tau = Radical.of(0) if branch is None else tau_of_point(rep, branch)
    period = f.period
    out = []
    for pc in f.pieces:
        cuts = solve_identity(rep, pc.fn, pc.lo, pc.hi)
        if cuts == ALL_ROOTS:
            out.append(pc.clone(wind=0))
            continue
        if branch_tau.sign() != 0:
            target = point_of_tau(rep, branch_tau)
            cuts = cuts + [t for t in solve_preimage(rep, pc.fn, pc.lo, pc.hi, target) if pc.lo < t]
            if pc.lo < branch_tau < pc.hi:
                cuts.append(branch_tau)
        bounds = _dedup_sorted([pc.lo] + cuts + [pc.hi])
        for i in range(len(bounds) - 1):
            u, v = bounds[i], bounds[i + 1]
            w = _wind_on(rep, pc.fn, u, branch_tau, period)
            out.append(pc.clone(lo=u, hi=v, wind=w))
    return LiftedPLRF(PiecewiseLRF(rep, coalesce(out, rep)))


def _wind_on(rep, fn, u, branch_tau, period) -> int:
    pos_raw = value_tau(rep, fn, u)
    if (isinstance(fn, ConstMap) or fn.is_const()) and compare(pos_raw, branch_tau) == 0:
        # a constant sitting exactly on the cut: [x, branch) never contains
        # the branch point, so the chain stalls instead of wrapping
        return 0
    pos_v = _pos_from(branch_tau, pos_raw, period)
    pos_u = _pos_from(branch_tau, u, period)
    c = compare(pos_v, pos_u)
    if c == 0:
        c = _identity_compare_after(rep, fn, u)
    return 1 if c < 0 else 0


def _identity_compare_after(rep, fn, tau0) -> int:
    """Sign of pos(fn(x)) - pos(x) just right of tau0."""
    if isinstance(fn, ConstMap):
        return -1  # a constant falls behind a moving input
    if rep == UNIT:
        s = _sign_after([-fn.r, fn.p - fn.s, fn.q], tau0)
        return s * _den_sign_unit(fn, tau0)
    u0, du = _chart_for(tau0)
    e0, e1, f0, f1 = _ray_affine_image(fn, u0, du)
    # cross(x(s), fn x(s)) > 0 iff the image is locally ahead of the input
    c2 = du[0] * f1 - du[1] * e1
    c1 = u0[0] * f1 + du[0] * f0 - u0[1] * e1 - du[1] * e0
    c0 = u0[0] * f0 - u0[1] * e0
    return _sign_after([c2, c1, c0], tau0)


def is_proper(f: LiftedPLRF) -> bool:
    """True iff the lifted map never advances more than one full turn."""
    rep = f.rep
    for pc in f.pieces:
        if pc.wind >= 2:
            return False
        if pc.wind <= 0:
            continue
        cuts = solve_identity(rep, pc.fn, pc.lo, pc.hi)
        if cuts == ALL_ROOTS:
            continue
        bounds = _dedup_sorted([pc.lo] + cuts + [pc.hi])
        for i in range(len(bounds) - 1):
            u = bounds[i]
            c = compare(value_tau(rep, pc.fn, u), u)
            if c == 0:
                c = _identity_compare_after(rep, pc.fn, u)
            if c > 0:
                return False
    return True


def monotone_check(f: PiecewiseLRF) -> bool:
    """Counterclockwise order preservation of the induced lifted map."""
    if not f.is_full_circle():
        return False
    for pc in f.pieces:
        if isinstance(pc.fn, ConstMap):
            continue
        if pc.fn.det() < 0:
            return False
    pieces = lift(f).pieces
    for i, pc in enumerate(pieces):
        nxt = pieces[(i + 1) % len(pieces)]
        wrap = i + 1 == len(pieces)
        left_w, left_pos = _lifted_left_limit(f.rep, pc, f.period)
        right_w, right_pos = nxt.wind, value_tau(f.rep, nxt.fn, nxt.lo)
        if wrap:
            right_w += 1
        if left_w > right_w:
            return False
        if left_w == right_w and compare(left_pos, right_pos) > 0:
            return False
    return True


def _lifted_left_limit(rep, pc: Piece, period: Radical):
    """(extra winding, position) of the piece image's left limit at hi."""
    if isinstance(pc.fn, ConstMap):
        return pc.wind, position(pc.fn.value)
    if rep == UNIT:
        raw = _raw_value_unit(pc.fn, pc.hi)
        if raw == period:
            return pc.wind + 1, Radical.of(0)
        return pc.wind, raw
    val = _ray_value(pc.fn, pc.hi)
    s = val.sparam()
    if s.sign() == 0 and value_tau(rep, pc.fn, pc.lo).sign() > 0:
        return pc.wind + 1, Radical.of(0)
    return pc.wind, s


def threshold_witness(f: LiftedPLRF) -> Optional[Radical]:
    """Smallest parameter x with lifted f(0, x) >= (1, x), if any."""
    rep = f.rep
    for pc in f.pieces:
        if pc.wind >= 2:
            return pc.lo
        if pc.wind != 1:
            continue
        c = compare(value_tau(rep, pc.fn, pc.lo), pc.lo)
        if c >= 0:
            return pc.lo
        cuts = solve_identity(rep, pc.fn, pc.lo, pc.hi)
        if cuts == ALL_ROOTS:
            return pc.lo
        if cuts:
            return min(cuts)
    return None


# ---------------------------------------------------------------------------
# builders


def split_at_corners(rep: str, lo: Radical, hi: Radical):
    """Cut [lo, hi) at square corners so each part lives in one chart."""
    if rep == UNIT:
        return [(lo, hi)]
    cuts = [c for c in _RAY_CORNERS if lo < c < hi]
    bounds = [lo] + cuts + [hi]
    return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def build_unit_generator(segments, tags=None, as_lifted: bool = False):
    """Unit-representation PLRF from raw (unreduced, nondecreasing) graphs.

    `segments` is a list of (lo, hi, LinRat1 | ConstMap); raw Moebius values
    may run past 1 and are split at integer crossings, then reduced into
    [0, 1).  Constant values are reduced modulo 1 directly.  With
    `as_lifted`, winding increments are taken from the raw integer parts
    (this is the only way to express a multi-turn advance).
    """
    out = []
    for idx, seg in enumerate(segments):
        lo, hi, fn = seg
        tag = tags[idx] if tags else None
        lo, hi = Radical.of(lo), Radical.of(hi)
        if isinstance(fn, ConstMap):
            raw = fn.pos()
            k = raw.floor()
            reduced = ConstMap(UnitPoint(raw))
            out.append(Piece(lo, hi, reduced, wind=k if as_lifted else 0, tag=tag))
            continue
        if fn.det() < 0:
            raise MalformedFunctionError("generator graphs must be nondecreasing")
        v_lo, v_hi = fn(lo), fn(hi)
        cuts = []
        for k in range(v_lo.floor(), v_hi.floor() + 1):
            den = Radical.of(fn.p) - Radical.of(k) * fn.r
            if den.sign() == 0:
                continue
            t = (Radical.of(k) * fn.s - fn.q) / den
            if lo < t < hi:
                cuts.append(t)
        bounds = _dedup_sorted([lo] + cuts + [hi])
        for i in range(len(bounds) - 1):
            u, v = bounds[i], bounds[i + 1]
            k = fn(u).floor()
            out.append(Piece(u, v, fn.shifted(k), wind=k if as_lifted else 0, tag=tag))
    f = PiecewiseLRF(UNIT, coalesce(out, UNIT))
    return LiftedPLRF(f) if as_lifted else f


def unit_rotation(delta) -> PiecewiseLRF:
    """Rotation of the unit circle by the rational amount delta."""
    d = Q(delta) % 1
    if d == 0:
        return PiecewiseLRF(UNIT, [Piece(0, 1, LinRat1.identity())])
    return build_unit_generator([(Radical.of(0), Radical.of(1), LinRat1(1, d, 0, 1))])


_BRANCH_RAY = RayPoint(Radical.of(1), Radical.of(0))


def build_ray_plrf(segments, tags=None) -> PiecewiseLRF:
    """Ray-representation PLRF from (lo, hi, LinRat2 | ConstMap) segments.

    Splits every segment at square corners and wherever its image crosses the
    canonical branch ray, establishing the engine invariants.
    """
    out = []
    for idx, (lo, hi, fn) in enumerate(segments):
        tag = tags[idx] if tags else None
        for a, b in split_at_corners(RAY, Radical.of(lo), Radical.of(hi)):
            cuts = [t for t in solve_preimage(RAY, fn, a, b, _BRANCH_RAY) if a < t]
            bounds = _dedup_sorted([a] + cuts + [b])
            for i in range(len(bounds) - 1):
                out.append(Piece(bounds[i], bounds[i + 1], fn, tag=tag))
    return PiecewiseLRF(RAY, coalesce(out, RAY))


def _mat_from_columns(u0, du, col_u0, col_du) -> LinRat2:
    """The matrix M with M u0 = col_u0 and M du = col_du."""
    det = u0[0] * du[1] - u0[1] * du[0]
    # inverse of [u0 du] times target columns
    i11, i12 = du[1] / det, -du[0] / det
    i21, i22 = -u0[1] / det, u0[0] / det
    a11 = col_u0[0] * i11 + col_du[0] * i21
    a12 = col_u0[0] * i12 + col_du[0] * i22
    a21 = col_u0[1] * i11 + col_du[1] * i21
    a22 = col_u0[1] * i12 + col_du[1] * i22
    return LinRat2(((a11, a12), (a21, a22)))


def ray_plrf_from_sparam_graph(segments) -> PiecewiseLRF:
    """Ray PLRF whose square-parameter graph matches the given raw graphs.

    `segments` lists (lo, hi, LinRat1) raw nondecreasing Moebius graphs over
    the square parameter in [0, 8) with values in [lo, 16).  Each part is
    pinned to one input chart and one output chart, then realized as a 2x2
    matrix (flipped in sign where the Moebius denominator is negative, which
    keeps the denominator form positive on the piece).
    """
    edge_marks = [Q(k) for k in (1, 3, 5, 7, 8, 9, 11, 13, 15)]
    out = []
    for lo, hi, fn in segments:
        lo, hi = Radical.of(lo), Radical.of(hi)
        if fn.det() < 0:
            raise MalformedFunctionError("graphs must be nondecreasing")
        for a, b in split_at_corners(RAY, lo, hi):
            cuts = []
            for mark in edge_marks:
                den = Radical.of(fn.p) - Radical.of(mark) * fn.r
                if den.sign() == 0:
                    continue
                t = (Radical.of(mark) * fn.s - fn.q) / den
                if a < t < b:
                    cuts.append(t)
            bounds = _dedup_sorted([a] + cuts + [b])
            for i in range(len(bounds) - 1):
                u, v = bounds[i], bounds[i + 1]
                raw = fn(u)
                w = 1 if raw >= 8 else 0
                shifted = fn.shifted(8 * w)
                u0, du = _chart_for(u)
                out_chart = _chart_for(shifted(u))
                uo, do = out_chart
                # sigma(s) = (P s + Q)/(R s + S); image ray = uo*(R s+S) + do*(P s+Q)
                P, Qc, R, S = shifted.p, shifted.q, shifted.r, shifted.s
                col_u0 = (uo[0] * S + do[0] * Qc, uo[1] * S + do[1] * Qc)
                col_du = (uo[0] * R + do[0] * P, uo[1] * R + do[1] * P)
                mat = _mat_from_columns(u0, du, col_u0, col_du)
                den_mid = Radical.of(R) * u + S
                if den_mid.sign() < 0:
                    mat = LinRat2(((-mat.a11, -mat.a12), (-mat.a21, -mat.a22)))
                out.append(Piece(u, v, mat))
    return PiecewiseLRF(RAY, coalesce(out, RAY))
