#include <chronostore/lifespan_index.hpp>

#include <algorithm>

namespace chronostore {

void LifespanIndex::set(EntityId id, IntervalSet spans) {
    if (spans.empty()) {
        entries_.erase(id);
    } else {
        entries_[id] = std::move(spans);
    }
    mark_dirty(id);
}

void LifespanIndex::insert_interval(EntityId id, const Interval& iv) {
    entries_[id].insert(iv);
    mark_dirty(id);
}

void LifespanIndex::truncate(EntityId id, TimeInstant cut) {
    auto it = entries_.find(id);
    if (it == entries_.end()) {
        throw NotAliveAtError("unknown entity " + std::to_string(id));
    }
    IntervalSet next = it->second.truncated(cut);
    if (next.empty()) {
        entries_.erase(it);
    } else {
        it->second = std::move(next);
    }
    mark_dirty(id);
}

const IntervalSet* LifespanIndex::find(EntityId id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

bool LifespanIndex::alive_at(EntityId id, TimeInstant t) const {
    const IntervalSet* s = find(id);
    return s != nullptr && s->contains(t);
}

void LifespanIndex::mark_dirty(EntityId id) {
    overflow_.insert(id);
}

void LifespanIndex::maybe_rebuild() const {
    if (overflow_.size() > 64 && overflow_.size() * 4 > tree_items_) rebuild();
}

void LifespanIndex::rebuild() const {
    std::vector<std::pair<Interval, EntityId>> items;
    items.reserve(entries_.size());
    for (const auto& [id, spans] : entries_) {
        for (const Interval& iv : spans) items.emplace_back(iv, id);
    }
    tree_items_ = items.size();
    tree_ = items.empty() ? nullptr : build(items, 0, items.size());
    overflow_.clear();
}

std::unique_ptr<LifespanIndex::TreeNode> LifespanIndex::build(
    std::vector<std::pair<Interval, EntityId>>& items, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return nullptr;
    // center on the median start; intervals are half-open so the last
    // covered instant of [s,e) is e-1
    std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(items.begin() + lo, items.begin() + mid, items.begin() + hi,
                     [](const auto& a, const auto& b) { return a.first.start < b.first.start; });
    TimeInstant center = items[mid].first.start;

    auto node = std::make_unique<TreeNode>();
    node->center = center;
    // three-way partition: entirely left (end <= center), crossing, entirely right (start > center)
    std::vector<std::pair<Interval, EntityId>> lefts, rights;
    for (std::size_t i = lo; i < hi; ++i) {
        const auto& item = items[i];
        if (item.first.end <= center) {
            lefts.push_back(item);
        } else if (item.first.start > center) {
            rights.push_back(item);
        } else {
            node->by_start.push_back(item);
        }
    }
    node->by_end = node->by_start;
    std::sort(node->by_start.begin(), node->by_start.end(),
              [](const auto& a, const auto& b) { return a.first.start < b.first.start; });
    std::sort(node->by_end.begin(), node->by_end.end(),
              [](const auto& a, const auto& b) { return a.first.end > b.first.end; });

    std::size_t pos = lo;
    for (auto& it2 : lefts) items[pos++] = it2;
    std::size_t lsplit = pos;
    for (auto& it2 : rights) items[pos++] = it2;
    node->left = build(items, lo, lsplit);
    node->right = build(items, lsplit, pos);
    return node;
}

void LifespanIndex::collect_stab(const TreeNode* n, TimeInstant t, std::vector<EntityId>& out) const {
    if (n == nullptr) return;
    if (t < n->center) {
        for (const auto& [iv, id] : n->by_start) {
            if (iv.start > t) break;
            out.push_back(id);
        }
        collect_stab(n->left.get(), t, out);
    } else if (t > n->center) {
        for (const auto& [iv, id] : n->by_end) {
            if (iv.end <= t) break;
            out.push_back(id);
        }
        collect_stab(n->right.get(), t, out);
    } else {
        // left subtree ends at or before center, right starts after it, so
        // only this node's intervals can contain t == center
        for (const auto& [iv, id] : n->by_start) out.push_back(id);
    }
}

void LifespanIndex::collect_range(const TreeNode* n, const Interval& q, std::vector<EntityId>& out) const {
    if (n == nullptr) return;
    if (q.end <= n->center) {
        for (const auto& [iv, id] : n->by_start) {
            if (iv.start >= q.end) break;
            out.push_back(id);
        }
    } else if (q.start > n->center) {
        for (const auto& [iv, id] : n->by_end) {
            if (iv.end <= q.start) break;
            out.push_back(id);
        }
    } else {
        for (const auto& [iv, id] : n->by_start) out.push_back(id);
    }
    if (q.start < n->center) collect_range(n->left.get(), q, out);
    if (q.end > n->center) collect_range(n->right.get(), q, out);
}

std::vector<EntityId> LifespanIndex::stab(TimeInstant t) const {
    maybe_rebuild();
    std::vector<EntityId> out;
    collect_stab(tree_.get(), t, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<EntityId> result;
    result.reserve(out.size());
    for (EntityId id : out) {
        if (overflow_.count(id)) continue;  // re-checked below
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.contains(t)) result.push_back(id);
    }
    for (EntityId id : overflow_) {
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.contains(t)) result.push_back(id);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<EntityId> LifespanIndex::range(const Interval& q) const {
    maybe_rebuild();
    std::vector<EntityId> out;
    collect_range(tree_.get(), q, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<EntityId> result;
    result.reserve(out.size());
    for (EntityId id : out) {
        if (overflow_.count(id)) continue;
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.overlaps(q)) result.push_back(id);
    }
    for (EntityId id : overflow_) {
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.overlaps(q)) result.push_back(id);
    }
    std::sort(result.begin(), result.end());
    return result;
}

void LifespanIndex::clear() {
    entries_.clear();
    tree_.reset();
    overflow_.clear();
    tree_items_ = 0;
}

}  // namespace chronostore
