#pragma once

#include <chronostore/interval.hpp>
#include <chronostore/value.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chronostore {

using Vid = std::uint64_t;

// One value of an attribute together with its validity period.
struct AttrValue {
    Doc value;
    Interval iv;

    friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

// Entries ordered by interval start; intervals of one attribute never
// overlap (a value change is a delete followed by an insert).
using AttrHistory = std::vector<AttrValue>;
using AttrMap = std::map<std::string, AttrHistory>;

struct EdgeHistory {
    IntervalSet intervals;
    AttrMap attrs;

    bool empty() const { return intervals.empty() && attrs.empty(); }
    friend bool operator==(const EdgeHistory&, const EdgeHistory&) = default;
};

// A vertex's full history: lifespan, attribute histories, and both
// directions of incident edge histories.
struct DiachronicNode {
    Vid vid = 0;
    IntervalSet lifespan;
    AttrMap attrs;
    std::map<Vid, EdgeHistory> out_edges;
    std::map<Vid, EdgeHistory> in_edges;

    // Drops empty histories and orders attribute entries by start.
    void normalize();

    // Enforces the containment invariants: attribute intervals within the
    // lifespan, edge intervals within the lifespan, edge-attribute
    // intervals within their edge. Throws InvariantViolationError.
    void validate() const;

    // Everything intersected with q; empty pieces dropped. An absent
    // result is signalled by an empty lifespan with no content.
    DiachronicNode restricted_to(const Interval& q) const;

    bool alive_at(TimeInstant t) const { return lifespan.contains(t); }

    friend bool operator==(const DiachronicNode&, const DiachronicNode&) = default;
};

// Value valid at t, or nullopt.
std::optional<Doc> attr_value_at(const AttrHistory& h, TimeInstant t);
// True when some entry's interval contains t.
bool attr_alive_at(const AttrHistory& h, TimeInstant t);
// Clips every entry to q, dropping empties.
AttrHistory clip_history(const AttrHistory& h, const Interval& q);
// Removes content at or after cut.
AttrHistory clip_history_before(const AttrHistory& h, TimeInstant cut);

}  // namespace chronostore
