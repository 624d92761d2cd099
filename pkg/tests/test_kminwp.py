from __future__ import annotations

import math

import numpy as np
import pytest

from sweepcover.graph import GraphError, make_path, make_pathset, validate_pathset
from sweepcover.kminwp import (
    SolutionMode,
    guess_budget,
    iteration_cap,
    solve_kminwp,
    split_path,
    trim,
)
from sweepcover.mop import ALPHA_STAR
from sweepcover.oracle import build_path_cover_table, opt_kminwp

from helpers import random_euclidean
from test_graph import unit_line


class TestSplitPath:
    def test_even_four(self):
        g = unit_line(4)
        s = split_path(g, make_path(g, [0, 1, 2, 3]))
        assert s.left.vertices == (0, 1) and s.right.vertices == (2, 3)
        assert s.middle is None
        assert s.left_charge == pytest.approx(2.0)
        assert s.right_charge == pytest.approx(2.0)
        assert s.left_count == s.right_count == 2

    def test_odd_five(self):
        g = unit_line(5)
        s = split_path(g, make_path(g, [0, 1, 2, 3, 4]))
        assert s.middle == 2
        assert s.left.vertices == (0, 1) and s.right.vertices == (3, 4)
        assert s.left_charge == pytest.approx(2.0)
        assert s.right_charge == pytest.approx(2.0)

    def test_two_vertices(self):
        g = unit_line(6)
        s = split_path(g, make_path(g, [0, 5]))
        assert s.left.vertices == (0,) and s.right.vertices == (5,)
        assert s.left_charge == pytest.approx(5.0)
        assert s.right_charge == pytest.approx(5.0)

    def test_trivial_rejected(self):
        g = unit_line(3)
        with pytest.raises(GraphError, match="cannot split trivial path"):
            split_path(g, make_path(g, [1]))

    def test_charges_cover_path_weight(self):
        # odd split: the two charges partition the path weight exactly;
        # even split: the middle edge is double charged
        rng = np.random.default_rng(4)
        for q in (6, 7):
            g = random_euclidean(rng, 10)
            verts = [int(v) for v in rng.permutation(10)[:q]]
            p = make_path(g, verts)
            s = split_path(g, p)
            total = s.left_charge + s.right_charge
            if s.middle is None:
                mid_w = g.dist[verts[q // 2 - 1], verts[q // 2]]
                assert total == pytest.approx(p.weight + mid_w)
            else:
                assert total == pytest.approx(p.weight)


class TestTrim:
    def test_unit_path_eight(self):
        g = unit_line(8)
        ps = make_pathset(g, [list(range(8))])
        out = trim(g, ps, 2)
        assert out.spanned == 4
        assert out.cost == pytest.approx(3.0)
        assert out.cost <= 2 * (out.spanned / 8) * ps.cost + 1e-9

    def test_unit_path_five(self):
        g = unit_line(5)
        ps = make_pathset(g, [list(range(5))])
        out = trim(g, ps, 2)
        assert out.spanned == 3
        assert out.cost == pytest.approx(2.0)
        assert out.cost <= 2 * (3 / 5) * 4.0 + 1e-9

    def test_at_most_2k_is_identity(self):
        g = unit_line(6)
        ps = make_pathset(g, [list(range(6))])
        out = trim(g, ps, 3)  # spans exactly 2k, loop body never runs
        assert out.spanned == 6 and out.cost == pytest.approx(ps.cost)

    def test_requires_more_than_k(self):
        g = unit_line(4)
        ps = make_pathset(g, [list(range(4))])
        with pytest.raises(GraphError, match="more than k"):
            trim(g, ps, 4)

    def test_halving_and_bounds(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            n = int(rng.integers(8, 16))
            g = random_euclidean(rng, n)
            m = int(rng.integers(1, 4))
            groups = []
            perm = [int(v) for v in rng.permutation(n)]
            sizes = sorted(rng.choice(np.arange(1, n), size=m - 1, replace=False).tolist()) if m > 1 else []
            lo = 0
            for hi in sizes + [n]:
                groups.append(perm[lo:hi])
                lo = hi
            ps = make_pathset(g, groups)
            k = int(rng.integers(m, max(m + 1, ps.spanned // 2)))
            if ps.spanned <= 2 * k:
                continue
            out = trim(g, ps, k)
            assert k < out.spanned <= 2 * k
            assert out.cost <= 2 * (out.spanned / ps.spanned) * ps.cost + 1e-9
            # per-round vertex map q -> ceil(q/2) composed over rounds
            for before, after in zip(ps.paths, out.paths):
                q = before.q
                while q > after.q:
                    q = math.ceil(q / 2)
                assert q == after.q


class TestGuessBudget:
    def test_k_equals_m(self):
        g = unit_line(5)
        r = guess_budget(g, 2, 2, ALPHA_STAR, 0.01)
        assert r.budget == 0.0
        assert r.pathset.spanned == 2
        assert all(p.trivial for p in r.pathset.paths)

    def test_line8_example(self):
        g = unit_line(8)
        r = guess_budget(g, 1, 4, 0.417, 0.01)
        alpha_k = 0.417 * 4
        assert r.pathset.spanned > alpha_k
        p = r.pathset.spanned
        assert r.pathset.cost <= (4 * (p - alpha_k) / ((1 - 0.417) * 4)) * (3.0 + 0.01) + 1e-9

    def test_iteration_budget(self):
        g = unit_line(8)
        r = guess_budget(g, 1, 4, 0.417, 0.01)
        assert r.iterations <= iteration_cap(r.cap, 0.01) + 1
        assert iteration_cap(7.0, 0.01) == math.ceil(math.log2(7.0 / 0.01))

    def test_bracket_order(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            g = random_euclidean(rng, int(rng.integers(5, 10)))
            m = int(rng.integers(1, 3))
            k = int(rng.integers(m, g.n + 1))
            r = guess_budget(g, m, k, ALPHA_STAR, 0.001)
            assert 0.0 <= r.lower <= r.budget <= r.cap + 1e-12
            assert validate_pathset(g, r.pathset) is None
            assert r.pathset.m == m

    def test_param_validation(self):
        g = unit_line(4)
        with pytest.raises(GraphError):
            guess_budget(g, 3, 2, ALPHA_STAR, 0.01)
        with pytest.raises(GraphError):
            guess_budget(g, 1, 9, ALPHA_STAR, 0.01)
        with pytest.raises(GraphError):
            guess_budget(g, 1, 3, 1.5, 0.01)
        with pytest.raises(GraphError):
            guess_budget(g, 1, 3, ALPHA_STAR, 0.0)


class TestSolveKminwp:
    def test_k_equals_m(self):
        g = unit_line(6)
        s = solve_kminwp(g, 3, 3, ALPHA_STAR, 0.01)
        assert s.mode is SolutionMode.FEASIBLE
        assert s.pathset.cost == pytest.approx(0.0)
        assert s.pathset.spanned == 3

    def test_unit_line_ten(self):
        g = unit_line(10)
        s = solve_kminwp(g, 1, 3, ALPHA_STAR, 0.01)
        opt = 2.0
        if s.mode is SolutionMode.FEASIBLE:
            assert s.pathset.spanned >= 3
            assert s.pathset.cost <= (16 / (1 - ALPHA_STAR) + 0.01) * opt + 1e-9
        else:
            assert s.pathset.spanned > ALPHA_STAR * 3
            assert s.pathset.cost <= ((8 - 4 * ALPHA_STAR) / (1 - ALPHA_STAR) + 0.01) * opt + 1e-9

    def test_mode_bounds_random(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(5, 10))
            g = random_euclidean(rng, n)
            m = int(rng.integers(1, 4))
            if m > n:
                m = n
            k = int(rng.integers(m, n + 1))
            s = solve_kminwp(g, m, k, ALPHA_STAR, 0.001)
            assert validate_pathset(g, s.pathset) is None
            table = build_path_cover_table(g, m)
            opt = opt_kminwp(table, m, k)
            if s.mode is SolutionMode.FEASIBLE:
                assert s.pathset.spanned >= k
                assert s.pathset.cost <= (16 / (1 - ALPHA_STAR) + 0.001) * opt + 1e-9
            else:
                assert s.pathset.spanned > ALPHA_STAR * k
                bound = (8 - 4 * ALPHA_STAR) / (1 - ALPHA_STAR)
                assert s.pathset.cost <= (bound + 0.001) * opt + 1e-9

    def test_trim_only_when_oversized(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            g = random_euclidean(rng, 8)
            s = solve_kminwp(g, 1, int(rng.integers(1, 5)), ALPHA_STAR, 0.01)
            if s.rounds > 0:
                assert s.mode is SolutionMode.FEASIBLE
                assert s.guess.pathset.spanned > s.pathset.spanned
