"""Clock, ECN codepoints, packets, and the seeded RNG."""

import pytest
from hypothesis import given, strategies as st

from dualq.core import (
    NS_PER_MS,
    NS_PER_SEC,
    Ecn,
    Packet,
    Rng,
    SimClock,
    ms_to_ns,
    ns_to_s,
    s_to_ns,
)


class TestTime:
    def test_conversions(self):
        assert ms_to_ns(15) == 15_000_000
        assert ms_to_ns(0.5) == 500_000
        assert s_to_ns(30) == 30 * NS_PER_SEC
        assert ns_to_s(25_000_000) == pytest.approx(0.025)

    def test_clock_advances(self):
        clock = SimClock()
        assert clock.advance(5) == 5
        assert clock.advance(0) == 5
        assert clock.now == 5

    def test_clock_rejects_negative(self):
        clock = SimClock()
        with pytest.raises(ValueError):
            clock.advance(-1)
        with pytest.raises(ValueError):
            SimClock(-3)

    def test_long_run_no_wrap(self):
        # 1e4 seconds of nanoseconds stays an exact integer
        clock = SimClock()
        clock.advance(10_000 * NS_PER_SEC)
        assert clock.now == 10_000_000_000_000

    @given(st.lists(st.integers(min_value=0, max_value=10**12), max_size=50))
    def test_clock_monotone(self, deltas):
        clock = SimClock()
        prev = 0
        for d in deltas:
            cur = clock.advance(d)
            assert cur >= prev
            prev = cur


class TestEcn:
    def test_wire_values(self):
        assert Ecn.NOT_ECT == 0b00
        assert Ecn.ECT1 == 0b01
        assert Ecn.ECT0 == 0b10
        assert Ecn.CE == 0b11

    def test_distinct(self):
        assert len({e.value for e in Ecn}) == 4


class TestPacket:
    def test_fields(self):
        p = Packet(7, "a", 1500, Ecn.ECT1, 123, seq=9)
        assert p.id == 7
        assert p.flow == "a"
        assert p.size == 1500
        assert p.ecn is Ecn.ECT1
        assert p.created_at == 123
        assert p.seq == 9
        assert p.enqueued_at == -1

    def test_slots(self):
        p = Packet(1, "a", 1500, Ecn.ECT0, 0)
        with pytest.raises(AttributeError):
            p.bogus = 1


class TestRng:
    def test_same_seed_same_stream(self):
        a = Rng(42)
        b = Rng(42)
        assert [a.random() for _ in range(100)] == [b.random() for _ in range(100)]

    def test_different_seeds_differ(self):
        a = Rng(1)
        b = Rng(2)
        assert [a.random() for _ in range(10)] != [b.random() for _ in range(10)]

    def test_algorithm_recorded(self):
        assert Rng.algorithm == "mt19937"
        assert Rng(0).seed == 0

    def test_bernoulli_consumes_one_draw(self):
        a = Rng(7)
        b = Rng(7)
        a.bernoulli(0.0)
        a.bernoulli(1.0)
        b.random()
        b.random()
        assert a.random() == b.random()

    def test_bernoulli_edge_probabilities(self):
        rng = Rng(3)
        assert not any(rng.bernoulli(0.0) for _ in range(1000))
        assert all(rng.bernoulli(1.0) for _ in range(1000))

    def test_bernoulli_long_run_frequency(self):
        rng = Rng(12345)
        n = 1_000_000
        hits = sum(rng.bernoulli(0.5) for _ in range(n))
        assert abs(hits / n - 0.5) < 0.002
