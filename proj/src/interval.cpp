#include <chronostore/interval.hpp>

#include <algorithm>

namespace chronostore {

std::string to_string(const Interval& iv) {
    std::string e = iv.alive() ? std::string("inf") : std::to_string(iv.end);
    return "[" + std::to_string(iv.start) + "," + e + ")";
}

IntervalSet::IntervalSet(std::initializer_list<Interval> ivs) {
    for (const Interval& iv : ivs) insert(iv);
}

void IntervalSet::insert(Interval iv) {
    // first member with start >= iv.start
    auto it = std::lower_bound(ivs_.begin(), ivs_.end(), iv,
                               [](const Interval& a, const Interval& b) { return a.start < b.start; });
    if (it != ivs_.end() && iv.overlaps(*it)) {
        throw OverlapError("interval " + to_string(iv) + " overlaps " + to_string(*it));
    }
    if (it != ivs_.begin() && iv.overlaps(*std::prev(it))) {
        throw OverlapError("interval " + to_string(iv) + " overlaps " + to_string(*std::prev(it)));
    }
    // coalesce with adjacent neighbours
    if (it != ivs_.begin() && std::prev(it)->end == iv.start) {
        --it;
        iv.start = it->start;
        it = ivs_.erase(it);
    }
    if (it != ivs_.end() && !iv.alive() && iv.end == it->start) {
        iv.end = it->end;
        it = ivs_.erase(it);
    }
    ivs_.insert(it, iv);
}

IntervalSet IntervalSet::truncated(TimeInstant cut) const {
    if (!contains(cut)) {
        throw NotAliveAtError("nothing alive at instant " + std::to_string(cut));
    }
    return clipped_before(cut);
}

IntervalSet IntervalSet::clipped_before(TimeInstant cut) const {
    IntervalSet out;
    for (const Interval& iv : ivs_) {
        if (iv.start >= cut) break;
        out.ivs_.push_back(Interval(iv.start, std::min(iv.end, cut)));
    }
    return out;
}

IntervalSet IntervalSet::intersected(const Interval& q) const {
    IntervalSet out;
    for (const Interval& iv : ivs_) {
        if (iv.start >= q.end) break;
        if (!iv.overlaps(q)) continue;
        out.ivs_.push_back(Interval(std::max(iv.start, q.start), std::min(iv.end, q.end)));
    }
    return out;
}

bool IntervalSet::contains(TimeInstant t) const {
    auto it = std::upper_bound(ivs_.begin(), ivs_.end(), t,
                               [](TimeInstant v, const Interval& iv) { return v < iv.start; });
    return it != ivs_.begin() && std::prev(it)->contains(t);
}

bool IntervalSet::covers(const Interval& q) const {
    auto it = std::upper_bound(ivs_.begin(), ivs_.end(), q.start,
                               [](TimeInstant v, const Interval& iv) { return v < iv.start; });
    if (it == ivs_.begin()) return false;
    const Interval& c = *std::prev(it);
    return c.start <= q.start && q.end <= c.end;
}

bool IntervalSet::overlaps(const Interval& q) const {
    auto it = std::lower_bound(ivs_.begin(), ivs_.end(), q,
                               [](const Interval& a, const Interval& b) { return a.start < b.start; });
    if (it != ivs_.end() && it->overlaps(q)) return true;
    return it != ivs_.begin() && std::prev(it)->overlaps(q);
}

TimeInstant IntervalSet::covered_length() const {
    TimeInstant total = 0;
    for (const Interval& iv : ivs_) {
        if (iv.alive()) return kAliveEnd;
        total += iv.end - iv.start;
    }
    return total;
}

TimeInstant IntervalSet::first_start() const {
    return ivs_.empty() ? 0 : ivs_.front().start;
}

TimeInstant IntervalSet::max_finite_instant() const {
    TimeInstant m = 0;
    for (const Interval& iv : ivs_) {
        m = std::max(m, iv.start);
        if (!iv.alive()) m = std::max(m, iv.end);
    }
    return m;
}

std::string to_string(const IntervalSet& s) {
    std::string out = "{";
    bool first = true;
    for (const Interval& iv : s) {
        if (!first) out += ",";
        first = false;
        out += to_string(iv);
    }
    return out + "}";
}

}  // namespace chronostore
