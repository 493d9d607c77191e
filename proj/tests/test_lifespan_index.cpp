#include <doctest.h>

#include <chronostore/lifespan_index.hpp>

#include <algorithm>
#include <random>
#include <unordered_map>

using namespace chronostore;

TEST_CASE("stab on empty index") {
    LifespanIndex idx;
    CHECK(idx.stab(0).empty());
    CHECK(idx.stab(12345).empty());
}

TEST_CASE("stab and range on a small index") {
    LifespanIndex idx;
    idx.set(1, IntervalSet{Interval(0, 10)});
    idx.set(2, IntervalSet{Interval::open_ended(5)});

    CHECK(idx.stab(7) == std::vector<EntityId>{1, 2});
    CHECK(idx.stab(12) == std::vector<EntityId>{2});
    CHECK(idx.stab(4) == std::vector<EntityId>{1});

    LifespanIndex ranged;
    ranged.set(1, IntervalSet{Interval(0, 10)});
    CHECK(ranged.range(Interval(10, 20)).empty());
    ranged.set(2, IntervalSet{Interval(5, 15)});
    CHECK(ranged.range(Interval(8, 12)) == std::vector<EntityId>{1, 2});

    LifespanIndex alive;
    alive.set(1, IntervalSet{Interval::open_ended(0)});
    CHECK(alive.range(Interval(999, 1000)) == std::vector<EntityId>{1});
}

TEST_CASE("alive marking uses the open-ended sentinel") {
    LifespanIndex idx;
    idx.insert_interval(9, Interval::open_ended(3));
    CHECK(idx.alive_at(9, kAliveEnd - 1));
    idx.truncate(9, 8);
    CHECK(idx.alive_at(9, 7));
    CHECK_FALSE(idx.alive_at(9, 8));
    CHECK_THROWS_AS(idx.truncate(9, 100), NotAliveAtError);
}

TEST_CASE("index agrees with linear-scan oracle under churn") {
    std::mt19937_64 rng(42);
    LifespanIndex idx;
    std::unordered_map<EntityId, IntervalSet> mirror;
    constexpr TimeInstant kHorizon = 300;

    auto oracle_stab = [&](TimeInstant t) {
        std::vector<EntityId> out;
        for (const auto& [id, s] : mirror) {
            if (s.contains(t)) out.push_back(id);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto oracle_range = [&](const Interval& q) {
        std::vector<EntityId> out;
        for (const auto& [id, s] : mirror) {
            if (s.overlaps(q)) out.push_back(id);
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    for (int step = 0; step < 3000; ++step) {
        EntityId id = rng() % 400;
        switch (rng() % 4) {
            case 0: {  // fresh single interval
                TimeInstant a = rng() % kHorizon;
                TimeInstant b = (rng() % 8 == 0) ? kAliveEnd : a + 1 + rng() % 40;
                IntervalSet s{Interval(a, b)};
                idx.set(id, s);
                mirror[id] = s;
                break;
            }
            case 1: {  // append interval after current content
                auto it = mirror.find(id);
                if (it != mirror.end() && it->second.alive()) break;
                TimeInstant base = it == mirror.end() ? 0 : it->second.max_finite_instant() + 1;
                TimeInstant a = base + rng() % 10;
                TimeInstant b = (rng() % 8 == 0) ? kAliveEnd : a + 1 + rng() % 40;
                idx.insert_interval(id, Interval(a, b));
                mirror[id].insert(Interval(a, b));
                break;
            }
            case 2: {  // truncate if alive at a probe
                TimeInstant cut = rng() % kHorizon;
                auto it = mirror.find(id);
                if (it == mirror.end() || !it->second.contains(cut)) break;
                idx.truncate(id, cut);
                IntervalSet next = it->second.truncated(cut);
                if (next.empty()) {
                    mirror.erase(it);
                } else {
                    it->second = next;
                }
                break;
            }
            default: {  // remove
                idx.set(id, IntervalSet{});
                mirror.erase(id);
                break;
            }
        }
        if (step % 50 == 0) {
            TimeInstant t = rng() % kHorizon;
            CHECK(idx.stab(t) == oracle_stab(t));
            TimeInstant a = rng() % kHorizon;
            Interval q(a, a + 1 + rng() % 50);
            CHECK(idx.range(q) == oracle_range(q));
        }
    }
    // forced rebuild must not change answers
    idx.rebuild();
    for (TimeInstant t = 0; t < kHorizon; t += 7) {
        CHECK(idx.stab(t) == oracle_stab(t));
    }
}
