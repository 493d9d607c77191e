#include <doctest.h>

#include <chronostore/interval.hpp>

#include <random>
#include <vector>

using namespace chronostore;

TEST_CASE("interval overlap is half-open") {
    CHECK_FALSE(Interval(3, 7).overlaps(Interval(7, 9)));  // touching intervals are disjoint
    CHECK(Interval(3, 7).overlaps(Interval(5, 6)));
    CHECK(Interval(0, kAliveEnd).overlaps(Interval(100, 101)));
    CHECK(Interval(5, 6).overlaps(Interval(3, 7)));
    CHECK_FALSE(Interval(7, 9).overlaps(Interval(3, 7)));
}

TEST_CASE("interval contains") {
    Interval iv(3, 7);
    CHECK_FALSE(iv.contains(2));
    CHECK(iv.contains(3));
    CHECK(iv.contains(6));
    CHECK_FALSE(iv.contains(7));
    CHECK(Interval::open_ended(5).contains(kAliveEnd - 1));
}

TEST_CASE("degenerate intervals rejected") {
    CHECK_THROWS_AS(Interval(5, 5), OverflowError);
    CHECK_THROWS_AS(Interval(7, 3), OverflowError);
}

TEST_CASE("interval set insert coalesces adjacency and rejects overlap") {
    IntervalSet s;
    s.insert(Interval(2, 5));
    CHECK(s.size() == 1);

    SUBCASE("adjacent intervals coalesce") {
        s.insert(Interval(5, 9));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals().front() == Interval(2, 9));
    }
    SUBCASE("left-adjacent coalesces too") {
        s.insert(Interval(0, 2));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals().front() == Interval(0, 5));
    }
    SUBCASE("overlap throws") {
        CHECK_THROWS_AS(s.insert(Interval(4, 9)), OverlapError);
        CHECK(s.size() == 1);  // unchanged after failed insert
    }
    SUBCASE("bridging two members coalesces both sides") {
        s.insert(Interval(7, 9));
        s.insert(Interval(5, 7));
        REQUIRE(s.size() == 1);
        CHECK(s.intervals().front() == Interval(2, 9));
    }
}

TEST_CASE("truncate shrinks to the cut instant") {
    IntervalSet s{Interval::open_ended(0)};
    IntervalSet t = s.truncated(10);
    REQUIRE(t.size() == 1);
    CHECK(t.intervals().front() == Interval(0, 10));

    IntervalSet multi{Interval(0, 5), Interval::open_ended(8)};
    IntervalSet t2 = multi.truncated(9);
    // oracle: membership of every instant 0..12 before/after against a bit vector
    std::vector<bool> before(13), expect(13);
    for (TimeInstant i = 0; i < 13; ++i) {
        before[i] = multi.contains(i);
        expect[i] = before[i] && i < 9;
    }
    for (TimeInstant i = 0; i < 13; ++i) {
        CAPTURE(i);
        CHECK(t2.contains(i) == expect[i]);
    }

    CHECK_THROWS_AS(IntervalSet{Interval(0, 5)}.truncated(7), NotAliveAtError);
    // cut at an interval's start empties it
    CHECK(IntervalSet{Interval(4, 9)}.truncated(4).empty());
}

TEST_CASE("clip drops content at or after the cut") {
    IntervalSet s{Interval(0, 5), Interval(8, 10)};
    CHECK(s.clipped_before(3) == IntervalSet{Interval(0, 3)});
    CHECK(s.clipped_before(7) == IntervalSet{Interval(0, 5)});
    CHECK(s.clipped_before(0).empty());
    // clipping is idempotent at the same cut
    auto once = s.clipped_before(9);
    CHECK(once.clipped_before(9) == once);
}

TEST_CASE("interval set membership matches bit-vector oracle on random sets") {
    std::mt19937_64 rng(20260810);
    for (int round = 0; round < 50; ++round) {
        constexpr TimeInstant kHorizon = 200;
        std::vector<bool> oracle(kHorizon, false);
        IntervalSet s;
        for (int k = 0; k < 30; ++k) {
            TimeInstant a = rng() % kHorizon;
            TimeInstant b = a + 1 + rng() % 20;
            if (b > kHorizon) b = kHorizon;
            if (a >= b) continue;
            bool clash = false;
            for (TimeInstant i = a; i < b; ++i) clash = clash || oracle[i];
            if (clash) {
                CHECK_THROWS_AS(s.insert(Interval(a, b)), OverlapError);
            } else {
                s.insert(Interval(a, b));
                for (TimeInstant i = a; i < b; ++i) oracle[i] = true;
            }
        }
        for (int probe = 0; probe < 1000; ++probe) {
            TimeInstant t = rng() % kHorizon;
            CHECK(s.contains(t) == oracle[t]);
        }
        // truncation never increases covered length
        TimeInstant cut = rng() % kHorizon;
        IntervalSet clipped = s.clipped_before(cut);
        CHECK(clipped.covered_length() <= s.covered_length());
        for (TimeInstant i = 0; i < kHorizon; ++i) {
            CHECK(clipped.contains(i) == (oracle[i] && i < cut));
        }
        // overlap agrees with per-instant membership
        for (int probe = 0; probe < 100; ++probe) {
            TimeInstant a = rng() % kHorizon;
            TimeInstant b = a + 1 + rng() % 30;
            bool any = false;
            for (TimeInstant i = a; i < b && i < kHorizon; ++i) any = any || oracle[i];
            CHECK(s.overlaps(Interval(a, b)) == any);
        }
    }
}

TEST_CASE("intersection clips members to the query window") {
    IntervalSet s{Interval(0, 5), Interval(8, 12)};
    CHECK(s.intersected(Interval(3, 9)) == IntervalSet{Interval(3, 5), Interval(8, 9)});
    CHECK(s.intersected(Interval(5, 8)).empty());
    CHECK(s.intersected(Interval(0, kAliveEnd)) == s);
}
