#pragma once

#include <chronostore/interval.hpp>

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace chronostore {

using EntityId = std::uint64_t;

// Maps entity ids to their lifespans and answers stabbing/overlap queries.
// The stabbing side is a centered interval tree rebuilt lazily; entries
// changed since the last rebuild live in an overflow set that is scanned
// directly and merged on query. Tree hits are validated against the
// authoritative entry map, so stale tree items are harmless.
class LifespanIndex {
public:
    LifespanIndex() = default;

    // Replaces (or removes, when empty) the entry for id.
    void set(EntityId id, IntervalSet spans);
    // Appends one interval to id's entry (OverlapError on intersection).
    void insert_interval(EntityId id, const Interval& iv);
    // Checked truncation of id's entry (NotAliveAtError per IntervalSet).
    void truncate(EntityId id, TimeInstant cut);

    const IntervalSet* find(EntityId id) const;
    bool alive_at(EntityId id, TimeInstant t) const;

    // Ids whose lifespan contains t, ascending.
    std::vector<EntityId> stab(TimeInstant t) const;
    // Ids whose lifespan overlaps q, ascending.
    std::vector<EntityId> range(const Interval& q) const;

    std::size_t size() const { return entries_.size(); }
    void clear();
    void rebuild() const;

private:
    struct TreeNode {
        TimeInstant center = 0;
        // intervals crossing the center, with owning id
        std::vector<std::pair<Interval, EntityId>> by_start;  // ascending start
        std::vector<std::pair<Interval, EntityId>> by_end;    // descending end
        std::unique_ptr<TreeNode> left, right;
    };

    void mark_dirty(EntityId id);
    void maybe_rebuild() const;
    static std::unique_ptr<TreeNode> build(std::vector<std::pair<Interval, EntityId>>& items,
                                           std::size_t lo, std::size_t hi);
    void collect_stab(const TreeNode* n, TimeInstant t, std::vector<EntityId>& out) const;
    void collect_range(const TreeNode* n, const Interval& q, std::vector<EntityId>& out) const;

    std::unordered_map<EntityId, IntervalSet> entries_;
    mutable std::unique_ptr<TreeNode> tree_;
    mutable std::unordered_set<EntityId> overflow_;  // ids not represented by tree_
    mutable std::size_t tree_items_ = 0;
};

}  // namespace chronostore
