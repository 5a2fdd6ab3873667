import itertools
import math
import random

import pytest

from arccover.exactnum import Q, Radical
from arccover.circle import Arc, RayPoint, UnitPoint, position, position_from
from arccover import plrf
from arccover.cover import (
    CoverSolution,
    FiniteArcInstance,
    KMaxExceededError,
    UncoverableError,
    arc_cover_from_point,
    arc_cover_greedy_exact,
    finite_instance_generator,
    interval_cover_greedy,
    solve_analytic,
    threshold_test,
    validate_cover,
)
from arccover.plrf import LinRat2, build_ray_plrf, lift, unit_rotation

R = Radical.of


def uarc(a, b):
    return Arc(UnitPoint(R(Q(a))), UnitPoint(R(Q(b))))


def exhaustive_interval_optimum(intervals):
    n = len(intervals)
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            if _covers_unit(sorted((intervals[i] for i in sub))):
                return size
    return None


def _covers_unit(ivs):
    point = Q(0)
    for a, b in sorted(ivs):
        if a > point:
            return False
        point = max(point, b)
    return point >= 1


class TestIntervalGreedy:
    def test_two_halves(self):
        assert len(interval_cover_greedy([(0, Q(1, 2)), (Q(2, 5), 1)])) == 2

    def test_single(self):
        assert len(interval_cover_greedy([(0, 1)])) == 1

    def test_example_three(self):
        ivs = [(0, Q(2, 5)), (Q(3, 10), Q(7, 10)), (Q(35, 100), Q(4, 5)), (Q(3, 5), 1)]
        chosen = interval_cover_greedy(ivs)
        assert len(chosen) == 3
        assert exhaustive_interval_optimum(ivs) == 3

    def test_uncoverable_reports_point(self):
        with pytest.raises(UncoverableError) as ei:
            interval_cover_greedy([(0, Q(1, 4)), (Q(1, 2), 1)])
        assert ei.value.at == Q(1, 4)

    def test_matches_exhaustive_random(self):
        rng = random.Random(9)
        for _ in range(60):
            n = rng.randint(2, 8)
            ivs = []
            for _ in range(n - 1):
                a = Q(rng.randint(0, 90), 100)
                b = a + Q(rng.randint(5, 60), 100)
                ivs.append((a, min(b, Q(1))))
            ivs.append((Q(0), Q(rng.randint(20, 100), 100)))
            if not _covers_unit(ivs):
                continue
            assert len(interval_cover_greedy(ivs)) == exhaustive_interval_optimum(ivs)


class TestArcGreedy:
    def test_three_thirds(self):
        inst = FiniteArcInstance([uarc(0, Q(2, 5)), uarc(Q(1, 3), Q(1, 3) + Q(2, 5)), uarc(Q(2, 3), Q(2, 3) + Q(2, 5) - 1)])
        sol = arc_cover_from_point(inst, UnitPoint(R(0)))
        assert sol.k == 3

    def test_full_circle_arc(self):
        inst = FiniteArcInstance([Arc(UnitPoint(R(0)), UnitPoint(R(0)), full=True)])
        sol = arc_cover_from_point(inst, UnitPoint(R(Q(1, 3))))
        assert sol.k == 1

    def test_plus_one_demonstration(self):
        # two arcs cover the circle; starting inside one forces 3
        inst = FiniteArcInstance([uarc(0, Q(11, 20)), uarc(Q(1, 2), Q(1, 20))])
        best = arc_cover_greedy_exact(inst)
        assert best == 2
        sol = arc_cover_from_point(inst, UnitPoint(R(Q(1, 4))))
        assert sol.k == 3


class TestThreshold:
    def test_rotation_advance(self):
        g = lift(unit_rotation(Q(2, 5)))
        g2 = plrf.compose_lifted(g, g)
        g3 = plrf.compose_lifted(g, g2)
        assert threshold_test(g2) is None
        assert threshold_test(g3) is not None


class TestSolveAnalytic:
    @pytest.mark.parametrize("p,q", [(2, 5), (1, 4), (1, 3), (3, 7), (5, 11)])
    def test_rotation_k(self, p, q):
        g = unit_rotation(Q(p, q))
        sol = solve_analytic(g)
        assert sol.k == math.ceil(q / p)
        assert validate_cover(g, sol)

    def test_two_piece_generator(self):
        # g(x) = x + 1/2 on [0, 1/2); g(x) = x + 1/4 on [1/2, 1) -> k = 3
        segs = [
            (R(0), R(Q(1, 2)), plrf.LinRat1(1, Q(1, 2), 0, 1)),
            (R(Q(1, 2)), R(1), plrf.LinRat1(1, Q(1, 4), 0, 1)),
        ]
        g = plrf.build_unit_generator(segs)
        sol = solve_analytic(g)
        assert sol.k == 3
        assert validate_cover(g, sol)

    def test_modes_agree(self):
        rng = random.Random(77)
        for _ in range(12):
            g = _random_generator(rng, rng.randint(1, 7))
            a = solve_analytic(g, mode="linear")
            b = solve_analytic(g, mode="doubling")
            assert a.k == b.k
            assert validate_cover(g, a) and validate_cover(g, b)

    def test_k_max_exceeded(self):
        g = unit_rotation(Q(1, 100))
        with pytest.raises(KMaxExceededError):
            solve_analytic(g, k_max=5)

    def test_tampered_solutions_fail(self):
        g = unit_rotation(Q(2, 5))
        sol = solve_analytic(g)
        bad_k = CoverSolution(sol.k - 1, sol.witness, sol.cover_points[:-1])
        assert not validate_cover(g, bad_k)
        bad_witness = CoverSolution(sol.k, UnitPoint(R(Q(1, 7))), sol.cover_points)
        assert not validate_cover(g, bad_witness)

    def test_sampled_start_sandwich(self):
        rng = random.Random(123)
        for _ in range(8):
            g = _random_generator(rng, rng.randint(1, 6))
            sol = solve_analytic(g)
            lifted = plrf.lift(g)
            for _ in range(40):
                start = UnitPoint(R(Q(rng.randint(0, 999), 1000)))
                steps = _greedy_steps(lifted, start, sol.k + 3)
                assert steps >= sol.k

    def test_ray_rotation_quarter(self):
        g = build_ray_plrf([(R(0), R(8), LinRat2.rotation_quarter_turns(1))])
        sol = solve_analytic(g)
        assert sol.k == 4
        assert validate_cover(g, sol)


class TestFiniteEncoding:
    def test_finite_agreement_random(self):
        rng = random.Random(55)
        trials = 0
        while trials < 25:
            arcs, ok = _random_cover_arcs(rng)
            if not ok:
                continue
            trials += 1
            inst = FiniteArcInstance(arcs)
            exact = arc_cover_greedy_exact(inst)
            g = finite_instance_generator(inst)
            sol = solve_analytic(g, k_max=len(arcs) + 3)
            assert sol.k == exact
            assert validate_cover(g, sol)


def _greedy_steps(lifted, start, cap):
    x = start
    winds = 0
    for i in range(1, cap + 1):
        w, nxt = lifted and plrf.eval_lifted(lifted, x)
        winds += w
        x = nxt
        if winds > 1 or (winds == 1 and position(x) >= position(start)):
            return i
    return cap + 1


def _random_generator(rng, n):
    from test_plrf import _random_generator as gen

    return gen(rng, n)


def _random_cover_arcs(rng):
    n = rng.randint(3, 8)
    arcs = []
    for _ in range(n):
        a = Q(rng.randint(0, 19), 20)
        ln = Q(rng.randint(3, 12), 20)
        arcs.append(uarc(a, (a + ln) % 1))
    # coverage check by scanning boundaries
    marks = sorted({position(x.start) for x in arcs} | {position(x.end) for x in arcs})
    from arccover.circle import arc_contains

    for i, m in enumerate(marks):
        nxt = marks[(i + 1) % len(marks)]
        probe = UnitPoint(m)
        if not any(arc_contains(a, probe) for a in arcs):
            return arcs, False
    return arcs, True
