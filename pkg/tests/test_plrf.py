import random

import pytest

from arccover.exactnum import Q, Radical, compare
from arccover.circle import RayPoint, UnitPoint, position, ray_of_sparam
from arccover import plrf
from arccover.plrf import (
    ConstMap,
    LinRat1,
    LinRat2,
    Piece,
    PiecewiseLRF,
    build_ray_plrf,
    build_unit_generator,
    compose,
    eval_plrf,
    invert,
    is_proper,
    lift,
    merge_max,
    merge_min,
    monotone_check,
    ray_plrf_from_sparam_graph,
    threshold_witness,
    unit_rotation,
)

R = Radical.of


def mk_unit(pieces):
    return PiecewiseLRF(plrf.UNIT, [Piece(lo, hi, fn) for lo, hi, fn in pieces])


def eval_u(f, t):
    return position(eval_plrf(f, UnitPoint(R(t))))


class TestEval:
    def test_identity(self):
        f = mk_unit([(0, 1, LinRat1.identity())])
        assert eval_u(f, Q(3, 10)) == Q(3, 10)

    def test_rotation_two_fifths(self):
        f = unit_rotation(Q(2, 5))
        assert f.n_pieces() == 2
        assert eval_u(f, Q(9, 10)) == Q(3, 10)
        assert eval_u(f, Q(1, 10)) == Q(1, 2)

    def test_ray_quarter_rotation(self):
        f = build_ray_plrf([(R(0), R(8), LinRat2.rotation_quarter_turns(1))])
        out = eval_plrf(f, RayPoint(R(1), R(0)))
        assert out == RayPoint(R(0), R(1))


class TestLift:
    def test_rotation_winds(self):
        f = lift(unit_rotation(Q(2, 5)))
        winds = {(float(pc.lo), float(pc.hi)): pc.wind for pc in f.pieces}
        assert winds == {(0.0, 0.6): 0, (0.6, 1.0): 1}

    def test_identity_all_zero(self):
        f = lift(mk_unit([(0, 1, LinRat1.identity())]))
        assert all(pc.wind == 0 for pc in f.pieces)

    def test_constant_at_branch(self):
        f = lift(mk_unit([(0, 1, ConstMap(UnitPoint(R(0))))]))
        # [x, 0) never contains the cut: the constant-at-branch chain stalls
        assert [pc.wind for pc in f.pieces] == [0]

    def test_ray_rotation_winds(self):
        f = lift(build_ray_plrf([(R(0), R(8), LinRat2.rotation_quarter_turns(1))]))
        # advance is a quarter turn: wind 1 exactly on the last quarter
        for pc in f.pieces:
            mid_w = pc.wind
            assert mid_w == (1 if pc.lo >= R(6) else 0)


class TestProper:
    def test_rotation_proper(self):
        assert is_proper(lift(unit_rotation(Q(2, 5))))

    def test_triple_rotation_improper(self):
        g = lift(unit_rotation(Q(2, 5)))
        g3 = plrf.compose_lifted(g, plrf.compose_lifted(g, g))
        assert not is_proper(g3)

    def test_identity_proper(self):
        assert is_proper(lift(mk_unit([(0, 1, LinRat1.identity())])))


class TestCompose:
    def test_rotations_add(self):
        a = unit_rotation(Q(1, 4))
        c = compose(a, a)
        assert eval_u(c, Q(1, 8)) == Q(1, 8) + Q(1, 2)
        assert eval_u(c, Q(7, 8)) == Q(3, 8)

    def test_moebius_algebra(self):
        f = LinRat1(1, 0, 1, 1)   # t/(t+1)
        g = LinRat1(0, 1, 1, 0)   # 1/t
        comp = f.compose(g)       # 1/(1+t)
        t = R(Q(1, 3))
        assert comp(t) == Q(3, 4)

    def test_piece_count_additive(self):
        rng = random.Random(5)
        f = _random_generator(rng, 6)
        g = _random_generator(rng, 5)
        c = compose(f, g)
        assert c.n_pieces() <= f.n_pieces() + g.n_pieces()

    def test_eval_agreement(self):
        rng = random.Random(11)
        f = _random_generator(rng, 5)
        g = _random_generator(rng, 4)
        c = compose(f, g)
        for _ in range(200):
            t = UnitPoint(R(Q(rng.randint(0, 999), 1000)))
            assert position(eval_plrf(c, t)) == position(eval_plrf(f, eval_plrf(g, t)))


class TestInvert:
    def test_rotation(self):
        f = unit_rotation(Q(2, 5))
        fi = invert(f)
        for tq in (Q(1, 10), Q(7, 10), Q(99, 100)):
            t = UnitPoint(R(tq))
            assert position(eval_plrf(fi, eval_plrf(f, t))) == tq

    def test_identity(self):
        f = mk_unit([(0, 1, LinRat1.identity())])
        fi = invert(f)
        assert eval_u(fi, Q(1, 3)) == Q(1, 3)

    def test_random_roundtrip(self):
        rng = random.Random(23)
        f = _random_generator(rng, 7)
        fi = invert(f)
        for _ in range(100):
            t = UnitPoint(R(Q(rng.randint(0, 999), 1000)))
            assert position(eval_plrf(fi, eval_plrf(f, t))) == position(t)


class TestMonotone:
    def test_rotation(self):
        assert monotone_check(unit_rotation(Q(2, 5)))

    def test_reflection_fails(self):
        # t -> 1 - t is orientation reversing
        f = mk_unit([(0, 1, LinRat1(-1, 1, 0, 1))])
        assert not monotone_check(f)

    def test_random_generators(self):
        rng = random.Random(31)
        for _ in range(10):
            assert monotone_check(_random_generator(rng, rng.randint(1, 8)))


class TestThreshold:
    def test_rotation_three_steps(self):
        g = lift(unit_rotation(Q(2, 5)))
        g2 = plrf.compose_lifted(g, g)
        g3 = plrf.compose_lifted(g, g2)
        assert threshold_witness(g2) is None
        w = threshold_witness(g3)
        assert w is not None

    def test_piecewise_witness_in_fast_piece(self):
        # advances 0.9 on [0,1/2) and 1.1 on [1/2,1): a composed-style lift
        segs = [
            (R(0), R(Q(1, 2)), LinRat1(1, Q(9, 10), 0, 1)),
            (R(Q(1, 2)), R(1), LinRat1(1, Q(11, 10), 0, 1)),
        ]
        g = build_unit_generator(segs, as_lifted=True)
        w = threshold_witness(g)
        assert w is not None and R(Q(1, 2)) <= w < R(1)
        assert w == Q(1, 2)


class TestMerge:
    def test_constant_vs_identity(self):
        fa = mk_unit([(0, 1, ConstMap(UnitPoint(R(Q(3, 5)))))])
        fb = mk_unit([(0, 1, LinRat1.identity())])
        m = merge_max(fa, fb)
        assert eval_u(m, Q(1, 5)) == Q(3, 5)
        assert eval_u(m, Q(4, 5)) == Q(4, 5)
        bts = [pc.lo for pc in m.pieces]
        assert any(b == Q(3, 5) for b in bts)

    def test_pointwise_dominance_random(self):
        rng = random.Random(17)
        for _ in range(10):
            fa = _random_partial(rng)
            fb = _random_partial(rng)
            mx = merge_max(fa, fb)
            mn = merge_min(fa, fb)
            for _ in range(60):
                t = R(Q(rng.randint(0, 999), 1000))
                pa = fa.piece_at(t)
                pb = fb.piece_at(t)
                if pa is None and pb is None:
                    assert mx.piece_at(t) is None and mn.piece_at(t) is None
                    continue
                vals = []
                if pa is not None:
                    vals.append(plrf.value_tau(plrf.UNIT, pa.fn, t))
                if pb is not None:
                    vals.append(plrf.value_tau(plrf.UNIT, pb.fn, t))
                got_mx = plrf.value_tau(plrf.UNIT, mx.piece_at(t).fn, t)
                got_mn = plrf.value_tau(plrf.UNIT, mn.piece_at(t).fn, t)
                assert got_mx == max(vals)
                assert got_mn == min(vals)

    def test_piece_growth_bound(self):
        rng = random.Random(29)
        for _ in range(6):
            fa = _random_partial(rng)
            fb = _random_partial(rng)
            m = merge_max(fa, fb)
            n, mm = fa.n_pieces(), fb.n_pieces()
            assert m.n_pieces() <= 2 * (n + mm) + 4

    def test_quadratic_crossing_radical_boundary(self):
        # t + 1/4 vs (t+1)/2 cross at t = 1/2; restrict to [0, 1/2)
        fa = mk_unit([(0, Q(1, 2), LinRat1(1, Q(1, 4), 0, 1))])
        fb = mk_unit([(0, Q(1, 2), LinRat1(Q(1, 2), Q(1, 2), 0, 1))])
        m = merge_max(fa, fb)
        # (t+1)/2 >= t+1/4 on [0,1/2): single piece, no interior boundary
        assert m.n_pieces() == 1
        assert eval_u(m, Q(1, 4)) == Q(5, 8)

    def test_moebius_crossing_example(self):
        # 2t/(t+1) vs 3t/(t+2): crossings solve 2t(t+2) = 3t(t+1) => t in {0,1}
        fa = mk_unit([(0, 1, LinRat1(2, 0, 1, 1))])
        fb = mk_unit([(0, 1, LinRat1(3, 0, 1, 2))])
        m = merge_max(fa, fb)
        assert m.n_pieces() == 1  # no interior crossing on (0,1)
        rng = random.Random(2)
        for _ in range(50):
            tq = Q(rng.randint(1, 999), 1000)
            va = plrf.value_tau(plrf.UNIT, fa.pieces[0].fn, R(tq))
            vb = plrf.value_tau(plrf.UNIT, fb.pieces[0].fn, R(tq))
            vm = plrf.value_tau(plrf.UNIT, m.piece_at(R(tq)).fn, R(tq))
            assert vm == max(va, vb)


class TestRaySParamGraph:
    def test_quarter_rotation_matches_matrix(self):
        segs = [(R(0), R(8), LinRat1(1, 2, 0, 1))]  # s -> s + 2 (one quarter)
        f = ray_plrf_from_sparam_graph(segs)
        g = build_ray_plrf([(R(0), R(8), LinRat2.rotation_quarter_turns(1))])
        rng = random.Random(41)
        for _ in range(100):
            s = R(Q(rng.randint(0, 7999), 1000))
            vf = position(eval_plrf(f, ray_of_sparam(s)))
            vg = position(eval_plrf(g, ray_of_sparam(s)))
            assert vf == vg

    def test_graph_values_roundtrip(self):
        # G(0)=2.5, G(2)=3.2, G(5)=8.2, G(8)=10.5 = G(0)+8 (degree-1 wrap)
        segs = [
            (R(0), R(2), LinRat1(Q(7, 20), Q(5, 2), 0, 1)),
            (R(2), R(5), LinRat1(Q(5, 3), Q(16, 5) - Q(10, 3), 0, 1)),
            (R(5), R(8), LinRat1(Q(23, 30), Q(82, 10) - Q(23, 30) * 5, 0, 1)),
        ]
        f = ray_plrf_from_sparam_graph(segs)
        assert monotone_check(f)
        assert is_proper(lift(f))
        rng = random.Random(43)
        for _ in range(100):
            sq = Q(rng.randint(0, 7999), 1000)
            if sq < 2:
                raw = Q(7, 20) * sq + Q(5, 2)
            elif sq < 5:
                raw = Q(5, 3) * sq + Q(16, 5) - Q(10, 3)
            else:
                raw = Q(23, 30) * sq + Q(82, 10) - Q(23, 30) * 5
            want = raw % 8
            got = position(eval_plrf(f, ray_of_sparam(R(sq))))
            assert got == want


def _random_generator(rng: random.Random, n: int) -> PiecewiseLRF:
    """A strictly increasing proper next-generator with n graph segments.

    Graph values G satisfy t < G(t) < t + 1 and G(1) = G(0) + 1, so the
    reduced function is a valid generator in every case.
    """
    breaks = sorted(rng.sample(range(1, 60), n - 1)) if n > 1 else []
    cuts = [Q(0)] + [Q(b, 60) for b in breaks] + [Q(1)]
    base = Q(rng.randint(5, 80), 100)
    ys = [base]
    top = base + 1
    for i in range(1, n):
        lo_w = max(ys[-1], cuts[i]) + Q(1, 1000)
        hi_w = min(top, cuts[i] + 1) - Q(1, 1000) * (n - i)
        span = hi_w - lo_w
        ys.append(lo_w + span * Q(rng.randint(1, 99), 100))
    ys.append(top)
    segs = []
    for i in range(n):
        x0, x1, y0, y1 = cuts[i], cuts[i + 1], ys[i], ys[i + 1]
        slope = (y1 - y0) / (x1 - x0)
        segs.append((R(x0), R(x1), LinRat1(slope, y0 - slope * x0, 0, 1)))
    return build_unit_generator(segs)


def _random_partial(rng: random.Random) -> PiecewiseLRF:
    """A piecewise function with random gaps and mixed map kinds."""
    n = rng.randint(1, 6)
    marks = sorted(rng.sample(range(1, 40), 2 * n))
    pieces = []
    for i in range(n):
        lo, hi = Q(marks[2 * i], 40), Q(marks[2 * i + 1], 40)
        kind = rng.random()
        if kind < 0.3:
            fn = ConstMap(UnitPoint(R(Q(rng.randint(0, 39), 40))))
        else:
            # affine map kept inside [0, 1): v0 + slope*(t - lo)
            v0 = Q(rng.randint(0, 20), 40)
            vmax = Q(39, 40)
            slope_cap = (vmax - v0) / (hi - lo)
            slope = min(Q(rng.randint(0, 3), 2), slope_cap)
            fn = LinRat1(slope, v0 - slope * lo, 0, 1)
        pieces.append(Piece(R(lo), R(hi), fn))
    return PiecewiseLRF(plrf.UNIT, pieces)
