#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace chronostore::detail {

// Persistent weight-balanced ordered map. Handles are immutable values:
// assign/erase return new maps sharing structure with the old one, so a
// snapshot is a shared_ptr copy and a batched update costs O(ops * log n).
// Iterators keep raw pointers into the tree; the map handle they came
// from must outlive them.
template <typename K, typename V, typename Cmp = std::less<K>>
class PMap {
    struct Node;
    using Ptr = std::shared_ptr<const Node>;

    struct Node {
        K key;
        V val;
        Ptr left;
        Ptr right;
        std::size_t count;
    };

    Ptr root_;

    static std::size_t count_of(const Ptr& n) { return n ? n->count : 0; }

    static Ptr make(const K& k, const V& v, Ptr l, Ptr r) {
        std::size_t c = count_of(l) + count_of(r) + 1;
        return std::make_shared<const Node>(Node{k, v, std::move(l), std::move(r), c});
    }

    // weight-balanced rebalance; weights are count+1, delta=3, gamma=2
    static Ptr balanced(const K& k, const V& v, Ptr l, Ptr r) {
        std::size_t lw = count_of(l) + 1;
        std::size_t rw = count_of(r) + 1;
        if (lw + rw <= 3) return make(k, v, std::move(l), std::move(r));
        if (rw > 3 * lw) {
            Ptr rl = r->left;
            Ptr rr = r->right;
            if (count_of(rl) + 1 < 2 * (count_of(rr) + 1)) {
                return make(r->key, r->val, make(k, v, std::move(l), std::move(rl)), std::move(rr));
            }
            return make(rl->key, rl->val, make(k, v, std::move(l), rl->left),
                        make(r->key, r->val, rl->right, std::move(rr)));
        }
        if (lw > 3 * rw) {
            Ptr ll = l->left;
            Ptr lr = l->right;
            if (count_of(lr) + 1 < 2 * (count_of(ll) + 1)) {
                return make(l->key, l->val, std::move(ll), make(k, v, std::move(lr), std::move(r)));
            }
            return make(lr->key, lr->val, make(l->key, l->val, std::move(ll), lr->left),
                        make(k, v, lr->right, std::move(r)));
        }
        return make(k, v, std::move(l), std::move(r));
    }

    static Ptr assign_(const Ptr& n, const K& k, const V& v, bool& added) {
        if (!n) {
            added = true;
            return make(k, v, nullptr, nullptr);
        }
        Cmp cmp;
        if (cmp(k, n->key)) return balanced(n->key, n->val, assign_(n->left, k, v, added), n->right);
        if (cmp(n->key, k)) return balanced(n->key, n->val, n->left, assign_(n->right, k, v, added));
        added = false;
        return make(n->key, v, n->left, n->right);
    }

    static Ptr extract_min(const Ptr& n, const Node** min_out) {
        if (!n->left) {
            *min_out = n.get();
            return n->right;
        }
        return balanced(n->key, n->val, extract_min(n->left, min_out), n->right);
    }

    static Ptr glue(Ptr l, Ptr r) {
        if (!l) return r;
        if (!r) return l;
        const Node* m = nullptr;
        Ptr rest = extract_min(r, &m);
        return balanced(m->key, m->val, std::move(l), std::move(rest));
    }

    static Ptr erase_(const Ptr& n, const K& k, bool& removed) {
        if (!n) {
            removed = false;
            return nullptr;
        }
        Cmp cmp;
        if (cmp(k, n->key)) return balanced(n->key, n->val, erase_(n->left, k, removed), n->right);
        if (cmp(n->key, k)) return balanced(n->key, n->val, n->left, erase_(n->right, k, removed));
        removed = true;
        return glue(n->left, n->right);
    }

    explicit PMap(Ptr root) : root_(std::move(root)) {}

public:
    PMap() = default;

    std::size_t size() const { return count_of(root_); }
    bool empty() const { return !root_; }

    PMap assign(const K& k, const V& v) const {
        bool added = false;
        return PMap(assign_(root_, k, v, added));
    }

    PMap erase(const K& k) const {
        bool removed = false;
        Ptr r = erase_(root_, k, removed);
        return removed ? PMap(std::move(r)) : *this;
    }

    const V* find(const K& k) const {
        const Node* n = root_.get();
        Cmp cmp;
        while (n) {
            if (cmp(k, n->key)) {
                n = n->left.get();
            } else if (cmp(n->key, k)) {
                n = n->right.get();
            } else {
                return &n->val;
            }
        }
        return nullptr;
    }

    bool contains(const K& k) const { return find(k) != nullptr; }

    class const_iterator {
        std::vector<const Node*> stack_;
        void push_left(const Node* n) {
            while (n) {
                stack_.push_back(n);
                n = n->left.get();
            }
        }
        friend class PMap;

    public:
        const_iterator() = default;
        bool at_end() const { return stack_.empty(); }
        const K& key() const { return stack_.back()->key; }
        const V& value() const { return stack_.back()->val; }
        void next() {
            const Node* n = stack_.back();
            stack_.pop_back();
            push_left(n->right.get());
        }
    };

    const_iterator begin() const {
        const_iterator it;
        it.push_left(root_.get());
        return it;
    }

    // first element with key >= k
    const_iterator lower_bound(const K& k) const {
        const_iterator it;
        const Node* n = root_.get();
        Cmp cmp;
        while (n) {
            if (cmp(n->key, k)) {
                n = n->right.get();
            } else {
                it.stack_.push_back(n);
                n = n->left.get();
            }
        }
        return it;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (auto it = begin(); !it.at_end(); it.next()) fn(it.key(), it.value());
    }
};

}  // namespace chronostore::detail
