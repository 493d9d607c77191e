#include <doctest.h>

#include <chronostore/pmap.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

using chronostore::detail::PMap;

TEST_CASE("pmap basic operations") {
    PMap<int, std::string> m;
    CHECK(m.empty());
    auto m1 = m.assign(2, "b").assign(1, "a").assign(3, "c");
    CHECK(m1.size() == 3);
    CHECK(m.empty());  // original untouched
    REQUIRE(m1.find(2) != nullptr);
    CHECK(*m1.find(2) == "b");
    auto m2 = m1.assign(2, "B");
    CHECK(*m1.find(2) == "b");
    CHECK(*m2.find(2) == "B");
    auto m3 = m2.erase(1);
    CHECK(m3.size() == 2);
    CHECK(m2.size() == 3);
    CHECK(m3.find(1) == nullptr);
    CHECK(m3.erase(99).size() == 2);  // erasing a missing key is a no-op
}

TEST_CASE("pmap iteration is in key order") {
    PMap<int, int> m;
    for (int i : {5, 1, 9, 3, 7}) m = m.assign(i, i * 10);
    std::vector<int> keys;
    for (auto it = m.begin(); !it.at_end(); it.next()) keys.push_back(it.key());
    CHECK(keys == std::vector<int>{1, 3, 5, 7, 9});

    auto it = m.lower_bound(4);
    REQUIRE(!it.at_end());
    CHECK(it.key() == 5);
    it = m.lower_bound(10);
    CHECK(it.at_end());
    it = m.lower_bound(1);
    CHECK(it.key() == 1);
}

TEST_CASE("pmap matches std::map under random churn with live snapshots") {
    std::mt19937_64 rng(7);
    PMap<int, int> m;
    std::map<int, int> ref;
    std::vector<std::pair<PMap<int, int>, std::map<int, int>>> snaps;

    for (int step = 0; step < 20000; ++step) {
        int k = int(rng() % 500);
        if (rng() % 3 == 0) {
            m = m.erase(k);
            ref.erase(k);
        } else {
            int v = int(rng() % 100000);
            m = m.assign(k, v);
            ref[k] = v;
        }
        if (step % 2500 == 0) snaps.emplace_back(m, ref);
    }

    auto check_equal = [](const PMap<int, int>& pm, const std::map<int, int>& sm) {
        REQUIRE(pm.size() == sm.size());
        auto it = pm.begin();
        for (const auto& [k, v] : sm) {
            REQUIRE(!it.at_end());
            CHECK(it.key() == k);
            CHECK(it.value() == v);
            it.next();
        }
        CHECK(it.at_end());
    };

    check_equal(m, ref);
    // earlier snapshots still see their own state
    for (const auto& [pm, sm] : snaps) check_equal(pm, sm);

    // lower_bound agreement on random probes
    for (int probe = 0; probe < 500; ++probe) {
        int k = int(rng() % 600);
        auto it = m.lower_bound(k);
        auto rit = ref.lower_bound(k);
        if (rit == ref.end()) {
            CHECK(it.at_end());
        } else {
            REQUIRE(!it.at_end());
            CHECK(it.key() == rit->first);
        }
    }
}
