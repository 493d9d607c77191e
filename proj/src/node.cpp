#include <chronostore/node.hpp>

#include <chronostore/errors.hpp>

#include <algorithm>

namespace chronostore {

namespace {

void sort_history(AttrHistory& h) {
    std::sort(h.begin(), h.end(),
              [](const AttrValue& a, const AttrValue& b) { return a.iv.start < b.iv.start; });
}

void normalize_attrs(AttrMap& attrs) {
    for (auto it = attrs.begin(); it != attrs.end();) {
        if (it->second.empty()) {
            it = attrs.erase(it);
        } else {
            sort_history(it->second);
            ++it;
        }
    }
}

void validate_attrs(const AttrMap& attrs, const IntervalSet& owner, const std::string& what) {
    for (const auto& [name, history] : attrs) {
        TimeInstant prev_end = 0;
        bool first = true;
        for (const AttrValue& av : history) {
            if (!owner.covers(av.iv)) {
                throw InvariantViolationError(what + " attribute '" + name + "' interval " +
                                              to_string(av.iv) + " escapes owner coverage " +
                                              to_string(owner));
            }
            if (!first && av.iv.start < prev_end) {
                throw InvariantViolationError(what + " attribute '" + name +
                                              "' has overlapping value intervals");
            }
            prev_end = av.iv.end;
            first = false;
        }
    }
}

}  // namespace

void DiachronicNode::normalize() {
    normalize_attrs(attrs);
    for (auto* edges : {&out_edges, &in_edges}) {
        for (auto it = edges->begin(); it != edges->end();) {
            normalize_attrs(it->second.attrs);
            if (it->second.empty()) {
                it = edges->erase(it);
            } else {
                ++it;
            }
        }
    }
}

void DiachronicNode::validate() const {
    std::string me = "vertex " + std::to_string(vid);
    validate_attrs(attrs, lifespan, me);
    for (const auto* edges : {&out_edges, &in_edges}) {
        for (const auto& [nbr, eh] : *edges) {
            std::string en = me + " edge to " + std::to_string(nbr);
            for (const Interval& iv : eh.intervals) {
                if (!lifespan.covers(iv)) {
                    throw InvariantViolationError(en + " interval " + to_string(iv) +
                                                  " escapes lifespan " + to_string(lifespan));
                }
            }
            if (eh.intervals.empty() && !eh.attrs.empty()) {
                throw InvariantViolationError(en + " carries attributes but no intervals");
            }
            validate_attrs(eh.attrs, eh.intervals, en);
        }
    }
}

DiachronicNode DiachronicNode::restricted_to(const Interval& q) const {
    DiachronicNode out;
    out.vid = vid;
    out.lifespan = lifespan.intersected(q);
    for (const auto& [name, history] : attrs) {
        AttrHistory clipped = clip_history(history, q);
        if (!clipped.empty()) out.attrs[name] = std::move(clipped);
    }
    auto clip_edges = [&](const std::map<Vid, EdgeHistory>& src, std::map<Vid, EdgeHistory>& dst) {
        for (const auto& [nbr, eh] : src) {
            EdgeHistory ce;
            ce.intervals = eh.intervals.intersected(q);
            for (const auto& [name, history] : eh.attrs) {
                AttrHistory clipped = clip_history(history, q);
                if (!clipped.empty()) ce.attrs[name] = std::move(clipped);
            }
            if (!ce.empty()) dst[nbr] = std::move(ce);
        }
    };
    clip_edges(out_edges, out.out_edges);
    clip_edges(in_edges, out.in_edges);
    return out;
}

std::optional<Doc> attr_value_at(const AttrHistory& h, TimeInstant t) {
    for (const AttrValue& av : h) {
        if (av.iv.contains(t)) return av.value;
    }
    return std::nullopt;
}

bool attr_alive_at(const AttrHistory& h, TimeInstant t) {
    return attr_value_at(h, t).has_value();
}

AttrHistory clip_history(const AttrHistory& h, const Interval& q) {
    AttrHistory out;
    for (const AttrValue& av : h) {
        if (!av.iv.overlaps(q)) continue;
        out.push_back(AttrValue{av.value, Interval(std::max(av.iv.start, q.start),
                                                   std::min(av.iv.end, q.end))});
    }
    return out;
}

AttrHistory clip_history_before(const AttrHistory& h, TimeInstant cut) {
    AttrHistory out;
    for (const AttrValue& av : h) {
        if (av.iv.start >= cut) continue;
        out.push_back(AttrValue{av.value, Interval(av.iv.start, std::min(av.iv.end, cut))});
    }
    return out;
}

}  // namespace chronostore
