"""Finite and analytic circular covering.

The finite warm-up algorithms (interval greedy, arc greedy from a point) are
exact over rationals.  The analytic solver takes a piecewise linear-rational
next-generator, lifts it, and finds the smallest k whose k-fold composition
admits a full-turn witness; the witness chain is materialized and verified
as a winding certificate before anything is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .exactnum import DomainError, Q, Radical, compare
from .circle import Arc, CirclePoint, position, position_from
from . import plrf
from .plrf import (
    ConstMap,
    LiftedPLRF,
    LinRat1,
    Piece,
    PiecewiseLRF,
    build_unit_generator,
    compose_lifted,
    eval_lifted,
    is_proper,
    lift,
    merge_max,
    monotone_check,
    threshold_witness,
)


class UncoverableError(ValueError):
    """Input cannot cover the target; carries the first uncovered point."""

    def __init__(self, msg, at=None):
        super().__init__(msg)
        self.at = at


class ImproperGeneratorError(ValueError):
    pass


class KMaxExceededError(ValueError):
    def __init__(self, msg, best_advance=None):
        super().__init__(msg)
        self.best_advance = best_advance


@dataclass
class FiniteArcInstance:
    arcs: list
    rep: str = plrf.UNIT


@dataclass
class CoverSolution:
    k: int
    witness: CirclePoint
    cover_points: list
    payload: Any = None


def interval_cover_greedy(intervals) -> list[int]:
    """Minimum subset of half-open rational intervals covering [0, 1).

    Greedy by maximal right endpoint among intervals covering the leftmost
    uncovered point; exact and optimal for interval covering.
    """
    ivs = [(Q(a), Q(b)) for a, b in intervals]
    chosen: list[int] = []
    point = Q(0)
    while point < 1:
        best = None
        for i, (a, b) in enumerate(ivs):
            if a <= point < b:
                if best is None or b > ivs[best][1]:
                    best = i
        if best is None:
            raise UncoverableError(f"point {point} is uncovered", at=point)
        chosen.append(best)
        point = ivs[best][1]
    return chosen


def arc_cover_greedy_exact(instance: FiniteArcInstance) -> int:
    """Exact optimum for a finite arc instance: best greedy over all arc starts."""
    best = None
    for a in instance.arcs:
        sol = arc_cover_from_point(instance, a.start)
        if best is None or sol.k < best:
            best = sol.k
    if best is None:
        raise UncoverableError("no arcs")
    return best


def arc_cover_from_point(instance: FiniteArcInstance, p: CirclePoint) -> CoverSolution:
    """Greedy counterclockwise cover starting at p; at most optimum + 1 arcs."""
    arcs = [a for a in instance.arcs if a.full or not a.is_empty()]
    for a in arcs:
        if a.full:
            return CoverSolution(1, p, [p, p], payload=[a])
    frontier = p
    frontier_pos = Radical.of(0)
    chosen = []
    points = [p]
    for _ in range(len(arcs) + 1):
        best = None
        best_end_pos = None
        done = False
        for a in arcs:
            if not _arc_covers(a, frontier):
                continue
            end_pos = position_from(p, a.end)
            if end_pos <= frontier_pos and _arc_advances(a, frontier):
                # end wrapped past the start point: full circle reached
                best, done = a, True
                break
            if best is None or end_pos > best_end_pos:
                best, best_end_pos = a, end_pos
        if best is None:
            raise UncoverableError("frontier point uncovered", at=frontier)
        chosen.append(best)
        points.append(best.end)
        if done:
            return CoverSolution(len(chosen), p, points, payload=chosen)
        if best_end_pos <= frontier_pos:
            raise UncoverableError("no progress past frontier", at=frontier)
        frontier, frontier_pos = best.end, best_end_pos
    raise UncoverableError("greedy failed to close the circle", at=frontier)


def _arc_covers(a: Arc, p: CirclePoint) -> bool:
    from .circle import arc_contains

    return arc_contains(a, p)


def _arc_advances(a: Arc, frontier: CirclePoint) -> bool:
    return position_from(a.start, a.end) > position_from(a.start, frontier)


def finite_instance_generator(instance: FiniteArcInstance) -> PiecewiseLRF:
    """The induced next-generator of a finite unit-representation instance.

    Each arc contributes the constant raw graph 'reach of the arc end from
    the branch cut, lifted past 1 when the arc wraps'; their pointwise max
    over raw values reduces to the generator.
    """
    if instance.rep != plrf.UNIT:
        raise DomainError("finite instances are unit-representation")
    graphs = []
    for a in instance.arcs:
        if a.full:
            lo = position(a.start)
            graphs.append(PiecewiseLRF(plrf.LINE, [Piece(0, 1, ConstMap(lo + 1))]))
            continue
        if a.is_empty():
            continue
        s, e = position(a.start), position(a.end)
        val = e if e > s else e + 1
        pieces = []
        if e > s:
            pieces.append(Piece(s, e, ConstMap(val)))
        else:
            pieces.append(Piece(s, Radical.of(1), ConstMap(val)))
            if e.sign() > 0:
                pieces.append(Piece(0, e, ConstMap(e)))
        graphs.append(PiecewiseLRF(plrf.LINE, pieces))
    if not graphs:
        raise UncoverableError("no arcs")
    acc = graphs[0]
    for gph in graphs[1:]:
        acc = plrf.merge(acc, gph, +1)
    if not acc.is_full_circle() and not _covers_unit_domain(acc):
        raise UncoverableError("arcs do not cover the circle")
    segments = [(pc.lo, pc.hi, pc.fn) for pc in acc.pieces]
    return build_unit_generator(segments, as_lifted=True)


def _covers_unit_domain(f: PiecewiseLRF) -> bool:
    if not f.pieces or f.pieces[0].lo.sign() != 0:
        return False
    prev = f.pieces[0]
    for pc in f.pieces[1:]:
        if pc.lo != prev.hi:
            return False
        prev = pc
    return prev.hi == Radical.of(1)


def threshold_test(f: LiftedPLRF) -> Optional[CirclePoint]:
    """Witness x with lifted f(0, x) >= (1, x), or None."""
    tau = threshold_witness(f)
    if tau is None:
        return None
    return plrf.point_of_tau(f.rep, tau)


def _threshold_candidates(f: LiftedPLRF):
    """All candidate witness parameters in counterclockwise order."""
    out = []
    rep = f.rep
    for pc in f.pieces:
        if pc.wind >= 2:
            out.append(pc.lo)
            continue
        if pc.wind != 1:
            continue
        c = compare(plrf.value_tau(rep, pc.fn, pc.lo), pc.lo)
        if c >= 0:
            out.append(pc.lo)
            continue
        cuts = plrf.solve_identity(rep, pc.fn, pc.lo, pc.hi)
        if cuts == plrf.ALL_ROOTS:
            out.append(pc.lo)
        else:
            out.extend(sorted(cuts))
    return out


def _power(cache: dict, g: LiftedPLRF, k: int) -> LiftedPLRF:
    """g composed k times, by binary powers."""
    if k in cache:
        return cache[k]
    if k == 1:
        cache[1] = g
        return g
    half = _power(cache, g, k // 2)
    val = compose_lifted(half, half)
    if k % 2:
        val = compose_lifted(g, val)
    cache[k] = val
    return val


def solve_analytic(
    g: PiecewiseLRF,
    k_max: Optional[int] = None,
    mode: str = "doubling",
) -> CoverSolution:
    """Smallest k such that some x has g^(k) advancing a full turn from x.

    The generator must be monotone and proper; the returned witness chain is
    validated (every returned solution passes validate_cover).
    """
    if isinstance(g, LiftedPLRF):
        lifted = g
        base = g.base
    else:
        base = g
        lifted = None
    if not base.is_full_circle():
        raise ImproperGeneratorError("generator must be defined on the whole circle")
    for pc in base.pieces:
        if not isinstance(pc.fn, ConstMap) and pc.fn.det() < 0:
            raise ImproperGeneratorError("generator has an orientation-reversing piece")
    if lifted is None:
        lifted = lift(base)
    if not is_proper(lifted):
        raise ImproperGeneratorError("generator advances more than one turn")
    if k_max is None:
        k_max = base.n_pieces() + 3
    if mode == "linear":
        finder = _find_k_linear
    elif mode == "doubling":
        finder = _find_k_doubling
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    k, composed = finder(lifted, k_max)
    if k is None:
        raise KMaxExceededError(f"no cover within k_max={k_max} steps")
    for tau in _threshold_candidates(composed):
        witness = plrf.point_of_tau(base.rep, tau)
        sol = _materialize(lifted, witness, k)
        if sol is not None:
            return sol
    raise ImproperGeneratorError("threshold witness chain failed to validate")


def _find_k_linear(lifted: LiftedPLRF, k_max: int):
    composed = lifted
    for k in range(1, k_max + 1):
        if threshold_witness(composed) is not None:
            return k, composed
        if k < k_max:
            composed = compose_lifted(lifted, composed)
    return None, None


def _find_k_doubling(lifted: LiftedPLRF, k_max: int):
    cache: dict = {}
    hi = 1
    while hi < k_max and threshold_witness(_power(cache, lifted, hi)) is None:
        hi *= 2
    hi = min(hi, k_max)
    if threshold_witness(_power(cache, lifted, hi)) is None:
        return None, None
    lo = hi // 2 + 1 if hi > 1 else 1
    while lo < hi:
        mid = (lo + hi) // 2
        if threshold_witness(_power(cache, lifted, mid)) is not None:
            hi = mid
        else:
            lo = mid + 1
    return hi, _power(cache, lifted, hi)


def _materialize(lifted: LiftedPLRF, witness: CirclePoint, k: int) -> Optional[CoverSolution]:
    """Iterate the generator from the witness; None if the chain stalls."""
    pts = [witness]
    winds = 0
    x = witness
    for _ in range(k):
        w, nxt = eval_lifted(lifted, x)
        advance_zero = w == 0 and compare(position(nxt), position(x)) == 0
        if advance_zero:
            return None
        winds += w
        pts.append(nxt)
        x = nxt
    if winds > 1:
        return CoverSolution(k, witness, pts)
    if winds == 1 and compare(position(x), position(witness)) >= 0:
        return CoverSolution(k, witness, pts)
    return None


def validate_cover(g, solution: CoverSolution) -> bool:
    """Certificate check: the chain reproduces and accumulates a full turn."""
    lifted = g if isinstance(g, LiftedPLRF) else lift(g)
    x = solution.witness
    winds = 0
    if not solution.cover_points or position(solution.cover_points[0]) != position(x):
        return False
    for i in range(solution.k):
        try:
            w, nxt = eval_lifted(lifted, x)
        except DomainError:
            return False
        if i + 1 >= len(solution.cover_points):
            return False
        if position(solution.cover_points[i + 1]) != position(nxt):
            return False
        if w == 0 and compare(position(nxt), position(x)) == 0:
            return False
        winds += w
        x = nxt
    if winds > 1:
        return True
    return winds == 1 and compare(position(x), position(solution.witness)) >= 0
