#pragma once

#include <chronostore/errors.hpp>

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace chronostore {

// Abstract clock ticks. Dataset loaders map years / snapshot indexes /
// epoch-milliseconds onto ticks.
using TimeInstant = std::uint64_t;

// Reserved "still alive" sentinel; loaders must reject real timestamps
// equal to it.
inline constexpr TimeInstant kAliveEnd = std::numeric_limits<TimeInstant>::max();

// Half-open validity period [start, end) over integer ticks. An entity
// deleted at `end` is alive through end-1 and dead at end.
struct Interval {
    TimeInstant start = 0;
    TimeInstant end = kAliveEnd;

    Interval() = default;
    Interval(TimeInstant s, TimeInstant e) : start(s), end(e) {
        if (s >= e) {
            throw OverflowError("interval start must precede end: [" + std::to_string(s) +
                                "," + std::to_string(e) + ")");
        }
    }

    static Interval open_ended(TimeInstant s) { return Interval(s, kAliveEnd); }

    bool contains(TimeInstant t) const { return start <= t && t < end; }
    bool overlaps(const Interval& o) const { return start < o.end && o.start < end; }
    bool alive() const { return end == kAliveEnd; }

    friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::string to_string(const Interval& iv);

// Sorted, pairwise-disjoint, non-adjacent intervals (adjacent members
// coalesce on insert). Represents a possibly interrupted lifespan.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::initializer_list<Interval> ivs);

    // Inserts iv, coalescing with adjacent members. Throws OverlapError
    // when iv intersects an existing member.
    void insert(Interval iv);

    // Removes all content at or after `cut`; checked variant of
    // clipped_before. Throws NotAliveAtError when no member contains `cut`.
    IntervalSet truncated(TimeInstant cut) const;

    // Removes all content at or after `cut`; a member straddling `cut`
    // becomes [start, cut). Never throws; may produce an empty set.
    IntervalSet clipped_before(TimeInstant cut) const;

    // Intersection with a single interval; members clipped, empties dropped.
    IntervalSet intersected(const Interval& q) const;

    bool contains(TimeInstant t) const;
    bool overlaps(const Interval& q) const;
    // true when some member fully contains q
    bool covers(const Interval& q) const;

    bool empty() const { return ivs_.empty(); }
    std::size_t size() const { return ivs_.size(); }
    bool alive() const { return !ivs_.empty() && ivs_.back().alive(); }

    // Total covered tick count. Open-ended sets saturate at kAliveEnd.
    TimeInstant covered_length() const;

    TimeInstant first_start() const;
    // Largest finite endpoint (start or end) in the set, or 0 if none.
    TimeInstant max_finite_instant() const;

    const std::vector<Interval>& intervals() const { return ivs_; }
    auto begin() const { return ivs_.begin(); }
    auto end() const { return ivs_.end(); }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> ivs_;  // sorted by start, disjoint, non-adjacent
};

std::string to_string(const IntervalSet& s);

}  // namespace chronostore
