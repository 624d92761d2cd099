from __future__ import annotations

import numpy as np
import pytest

from sweepcover.graph import BscInstance, GraphError, make_pathset, validate_pathset
from sweepcover.oracle import (
    ORACLE_CAP,
    OracleError,
    bsc_upper_bound,
    build_path_cover_table,
    build_tree_cover_table,
    opt_kminwp,
    opt_mop,
    opt_pcf,
    opt_pcp,
    recover_kminwp_witness,
)

from helpers import random_euclidean
from test_graph import unit_line


@pytest.fixture(scope="module")
def line4():
    g = unit_line(4)
    return g, build_path_cover_table(g, 2)


@pytest.fixture(scope="module")
def line5():
    g = unit_line(5)
    return g, build_path_cover_table(g, 2)


class TestPathCoverTable:
    def test_singleton_is_free(self, line4):
        g, table = line4
        assert opt_kminwp(table, 1, 1) == pytest.approx(0.0)

    def test_line4_one_path(self, line4):
        _, table = line4
        full = opt_kminwp(table, 1, 4)
        assert full == pytest.approx(3.0)

    def test_line4_two_paths(self, line4):
        _, table = line4
        assert opt_kminwp(table, 2, 4) == pytest.approx(2.0)

    def test_cap_enforced(self):
        g = unit_line(ORACLE_CAP + 1)
        with pytest.raises(OracleError, match="oracle cap exceeded"):
            build_path_cover_table(g, 1)


class TestOptKminwp:
    def test_k_equals_m_is_zero(self, line4):
        _, table = line4
        assert opt_kminwp(table, 2, 2) == pytest.approx(0.0)

    def test_line8_window(self):
        g = unit_line(8)
        table = build_path_cover_table(g, 1)
        assert opt_kminwp(table, 1, 4) == pytest.approx(3.0)

    def test_m_above_k_rejected(self, line4):
        _, table = line4
        with pytest.raises((OracleError, GraphError)):
            opt_kminwp(table, 2, 1)

    def test_monotone_in_k_and_m(self):
        rng = np.random.default_rng(11)
        g = random_euclidean(rng, 7)
        table = build_path_cover_table(g, 3)
        for m in (1, 2, 3):
            vals = [opt_kminwp(table, m, k) for k in range(m, 8)]
            assert vals == sorted(vals)
        for k in (3, 5, 7):
            assert opt_kminwp(table, 1, k) >= opt_kminwp(table, 2, k) - 1e-12
            assert opt_kminwp(table, 2, k) >= opt_kminwp(table, 3, k) - 1e-12

    def test_witness_matches_value(self):
        rng = np.random.default_rng(5)
        g = random_euclidean(rng, 8)
        table = build_path_cover_table(g, 2)
        for m, k in [(1, 4), (2, 5), (2, 8)]:
            ps = recover_kminwp_witness(g, table, m, k)
            assert validate_pathset(g, ps) is None
            assert ps.m == m and ps.spanned >= k
            assert ps.cost == pytest.approx(opt_kminwp(table, m, k), abs=1e-9)


class TestPenaltyOracles:
    def test_pcp_zero_penalty(self, line5):
        _, table = line5
        assert opt_pcp(table, np.zeros(5), 2) == pytest.approx(0.0)

    def test_pcp_line5(self, line5):
        _, table = line5
        assert opt_pcp(table, np.full(5, 10.0), 2) == pytest.approx(3.0)

    def test_pcp_m_equals_n(self):
        g = unit_line(3)
        table = build_path_cover_table(g, 3)
        assert opt_pcp(table, np.full(3, 10.0), 3) == pytest.approx(0.0)

    def test_pcf_line4(self):
        g = unit_line(4)
        table = build_tree_cover_table(g, 1)
        assert opt_pcf(table, np.full(4, 100.0), 1) == pytest.approx(3.0)

    def test_pcf_penalty_tradeoff(self):
        # one far vertex: cheaper to pay its penalty than to reach it
        g = unit_line(4)
        table = build_tree_cover_table(g, 1)
        pi = np.array([10.0, 10.0, 10.0, 0.05])
        assert opt_pcf(table, pi, 1) == pytest.approx(2.05)


class TestMopOracle:
    def test_zero_budget(self, line5):
        _, table = line5
        assert opt_mop(table, 2, 0.0) == 2

    def test_line5_unit_budget(self, line5):
        _, table = line5
        assert opt_mop(table, 1, 1.0) == 2

    def test_full_budget(self, line5):
        _, table = line5
        assert opt_mop(table, 1, 4.0) == 5

    def test_monotone(self, line5):
        _, table = line5
        vals = [opt_mop(table, 1, b) for b in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert vals == sorted(vals)
        assert opt_mop(table, 2, 1.0) >= opt_mop(table, 1, 1.0)


class TestBscUpperBound:
    def test_line5(self):
        g = unit_line(5)
        inst = BscInstance(g, sensors=1, speed=1.0, period=2.0)
        assert bsc_upper_bound(inst) == 3

    def test_fleet_matches_vertices(self):
        g = unit_line(6)
        inst = BscInstance(g, sensors=6, speed=0.1, period=0.1)
        assert bsc_upper_bound(inst) == 6

    def test_no_sensors(self):
        g = unit_line(4)
        inst = BscInstance(g, sensors=0, speed=1.0, period=1.0)
        assert bsc_upper_bound(inst) == 0
