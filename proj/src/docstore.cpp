#include <chronostore/docstore.hpp>

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace chronostore {

// ---------------------------------------------------------------- paths

FieldPath FieldPath::parse(const std::string& dotted) {
    FieldPath p;
    std::string cur;
    for (char c : dotted) {
        if (c == '.') {
            p.parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    p.parts.push_back(cur);
    return p;
}

std::string FieldPath::str() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '.';
        out += parts[i];
    }
    return out;
}

void resolve_path(const Doc& doc, const FieldPath& path, std::size_t depth,
                  std::vector<const Doc*>& out) {
    if (doc.is_array()) {
        // lists are transparent: a path step applies to each element
        for (const Doc& el : doc) resolve_path(el, path, depth, out);
        return;
    }
    if (depth == path.parts.size()) {
        out.push_back(&doc);
        return;
    }
    if (!doc.is_object()) return;
    const std::string& seg = path.parts[depth];
    if (seg == "*") {
        for (const auto& [k, v] : doc.items()) resolve_path(v, path, depth + 1, out);
    } else {
        auto it = doc.find(seg);
        if (it != doc.end()) resolve_path(*it, path, depth + 1, out);
    }
}

// ----------------------------------------------------------- projection

namespace {

// Copies the subtree(s) selected by `path` from src into dst, creating
// intermediate objects and merging with previously copied paths.
void copy_path(const Doc& src, Doc& dst, const FieldPath& path, std::size_t depth) {
    if (depth == path.parts.size()) {
        dst = src;
        return;
    }
    const std::string& seg = path.parts[depth];
    if (src.is_object()) {
        if (seg == "*") {
            for (const auto& [k, v] : src.items()) {
                Doc picked;
                copy_path(v, picked, path, depth + 1);
                if (!picked.is_null()) {
                    if (!dst.is_object()) dst = Doc::object();
                    if (dst.contains(k)) {
                        dst[k].update(picked, true);
                    } else {
                        dst[k] = std::move(picked);
                    }
                }
            }
        } else {
            auto it = src.find(seg);
            if (it == src.end()) return;
            Doc picked;
            copy_path(*it, picked, path, depth + 1);
            if (!picked.is_null()) {
                if (!dst.is_object()) dst = Doc::object();
                if (dst.contains(seg) && dst[seg].is_object() && picked.is_object()) {
                    dst[seg].update(picked, true);
                } else {
                    dst[seg] = std::move(picked);
                }
            }
        }
    } else if (src.is_array()) {
        Doc arr = Doc::array();
        for (const Doc& el : src) {
            Doc picked;
            copy_path(el, picked, path, seg == "*" ? depth + 1 : depth);
            if (!picked.is_null()) arr.push_back(std::move(picked));
        }
        if (!arr.empty()) dst = std::move(arr);
    }
}

}  // namespace

Doc Projection::apply(const Doc& doc) const {
    if (all) return doc;
    Doc out = Doc::object();
    for (const FieldPath& p : paths) copy_path(doc, out, p, 0);
    return out;
}

// ------------------------------------------------------------ predicate

Predicate Predicate::always(bool value) {
    Predicate p;
    p.kind_ = value ? Kind::True : Kind::False;
    return p;
}

Predicate Predicate::cmp(FieldPath path, CmpOp op, Scalar rhs) {
    Predicate p;
    p.kind_ = Kind::Cmp;
    p.path_ = std::move(path);
    p.op_ = op;
    p.rhs_ = std::move(rhs);
    return p;
}

Predicate Predicate::interval_overlap(FieldPath start_path, FieldPath end_path, std::uint64_t qs,
                                      std::uint64_t qe) {
    Predicate p;
    p.kind_ = Kind::Overlap;
    p.path_ = std::move(start_path);
    p.end_path_ = std::move(end_path);
    p.qs_ = qs;
    p.qe_ = qe;
    return p;
}

Predicate Predicate::all_of(std::vector<Predicate> children) {
    Predicate p;
    p.kind_ = Kind::And;
    p.children_ = std::move(children);
    return p;
}

Predicate Predicate::any_of(std::vector<Predicate> children) {
    Predicate p;
    p.kind_ = Kind::Or;
    p.children_ = std::move(children);
    return p;
}

Predicate Predicate::exists(FieldPath list_path, Predicate inner) {
    Predicate p;
    p.kind_ = Kind::Exists;
    p.path_ = std::move(list_path);
    p.children_.push_back(std::move(inner));
    return p;
}

namespace {

bool op_holds(CmpOp op, int c) {
    switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Eq: return c == 0;
        case CmpOp::Ge: return c >= 0;
        case CmpOp::Gt: return c > 0;
    }
    return false;
}

std::optional<std::uint64_t> scalar_tick_at(const Doc& doc, const FieldPath& path) {
    std::vector<const Doc*> hits;
    resolve_path(doc, path, 0, hits);
    for (const Doc* d : hits) {
        if (d->is_number_unsigned()) return d->get<std::uint64_t>();
        if (d->is_number_integer()) {
            auto v = d->get<std::int64_t>();
            if (v >= 0) return static_cast<std::uint64_t>(v);
        }
        throw PredicateTypeError("interval bound is not an unsigned number: " + d->dump());
    }
    return std::nullopt;
}

}  // namespace

bool Predicate::eval(const Doc& doc) const {
    switch (kind_) {
        case Kind::True:
            return true;
        case Kind::False:
            return false;
        case Kind::And:
            for (const Predicate& c : children_) {
                if (!c.eval(doc)) return false;
            }
            return true;
        case Kind::Or:
            for (const Predicate& c : children_) {
                if (c.eval(doc)) return true;
            }
            return false;
        case Kind::Cmp: {
            std::vector<const Doc*> hits;
            resolve_path(doc, path_, 0, hits);
            for (const Doc* d : hits) {
                if (d->is_object() || d->is_array() || d->is_null()) continue;
                if (op_holds(op_, Scalar::from_json(*d).compare(rhs_, /*strict=*/true))) return true;
            }
            return false;
        }
        case Kind::Overlap: {
            auto s = scalar_tick_at(doc, path_);
            auto e = scalar_tick_at(doc, end_path_);
            if (!s || !e) return false;
            return *s < qe_ && qs_ < *e;
        }
        case Kind::Exists: {
            std::vector<const Doc*> hits;
            resolve_path(doc, path_, 0, hits);
            for (const Doc* d : hits) {
                if (children_.front().eval(*d)) return true;
            }
            return false;
        }
    }
    return false;
}

void FetchStats::merge(const FetchStats& o) {
    documents_fetched += o.documents_fetched;
    index_entries_scanned += o.index_entries_scanned;
    logical_bytes += o.logical_bytes;
    peak_buffered = std::max(peak_buffered, o.peak_buffered);
}

// -------------------------------------------------------------- state

namespace detail {

using DocPtr = std::shared_ptr<const Doc>;
using DocMap = PMap<KeyTuple, DocPtr, KeyTupleLess>;

using IndexEntry = std::pair<KeyTuple, KeyTuple>;  // (index key, primary key)
struct IndexEntryLess {
    bool operator()(const IndexEntry& a, const IndexEntry& b) const {
        int c = compare_tuples(a.first, b.first);
        if (c != 0) return c < 0;
        return compare_tuples(a.second, b.second) < 0;
    }
};
using IndexMap = PMap<IndexEntry, char, IndexEntryLess>;

struct CollectionState {
    CollectionSchema schema;
    DocMap docs;
    std::vector<IndexMap> indexes;  // parallel to schema.indexes
};

struct StoreState {
    std::map<std::string, std::shared_ptr<const CollectionState>> collections;
    std::uint64_t version = 0;
};

}  // namespace detail

namespace {

using detail::CollectionState;
using detail::DocMap;
using detail::DocPtr;
using detail::IndexEntry;
using detail::IndexMap;
using detail::StoreState;

KeyTuple extract_key(const CollectionSchema& schema, const Doc& doc) {
    if (!doc.is_object()) throw ValidationError("document must be an object");
    KeyTuple key;
    key.reserve(schema.key_fields.size());
    for (const std::string& f : schema.key_fields) {
        auto it = doc.find(f);
        if (it == doc.end()) {
            throw ValidationError("document missing key field '" + f + "' for collection " +
                                  schema.name);
        }
        key.push_back(Scalar::from_json(*it));
    }
    return key;
}

// Index keys for one document; multikey paths fan out per list element.
// A document lacking any indexed field produces no entries (sparse).
std::vector<KeyTuple> index_keys_for(const Doc& doc, const IndexDef& idx) {
    std::vector<std::vector<Scalar>> per_field;
    for (const FieldPath& path : idx.fields) {
        std::vector<const Doc*> hits;
        resolve_path(doc, path, 0, hits);
        std::vector<Scalar> vals;
        for (const Doc* d : hits) {
            if (d->is_object() || d->is_array() || d->is_null()) continue;
            vals.push_back(Scalar::from_json(*d));
            if (!idx.multikey) break;
        }
        if (vals.empty()) return {};
        per_field.push_back(std::move(vals));
    }
    std::vector<KeyTuple> keys{{}};
    for (const auto& vals : per_field) {
        std::vector<KeyTuple> next;
        next.reserve(keys.size() * vals.size());
        for (const KeyTuple& k : keys) {
            for (const Scalar& v : vals) {
                KeyTuple nk = k;
                nk.push_back(v);
                next.push_back(std::move(nk));
            }
        }
        keys = std::move(next);
    }
    return keys;
}

CollectionState with_doc_removed(const CollectionState& c, const KeyTuple& key) {
    CollectionState next = c;
    const DocPtr* old = c.docs.find(key);
    if (old == nullptr) return next;
    next.docs = next.docs.erase(key);
    for (std::size_t i = 0; i < c.schema.indexes.size(); ++i) {
        for (const KeyTuple& ik : index_keys_for(**old, c.schema.indexes[i])) {
            next.indexes[i] = next.indexes[i].erase({ik, key});
        }
    }
    return next;
}

CollectionState with_doc_upserted(const CollectionState& c, const KeyTuple& key, Doc doc) {
    CollectionState next = with_doc_removed(c, key);
    auto ptr = std::make_shared<const Doc>(std::move(doc));
    next.docs = next.docs.assign(key, ptr);
    for (std::size_t i = 0; i < next.schema.indexes.size(); ++i) {
        for (const KeyTuple& ik : index_keys_for(*ptr, next.schema.indexes[i])) {
            next.indexes[i] = next.indexes[i].assign({ik, key}, 1);
        }
    }
    return next;
}

std::uint64_t hash_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_doc(std::uint64_t h, const Doc& d) {
    auto bytes = Doc::to_cbor(d);
    return hash_bytes(h, bytes.data(), bytes.size());
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    return hash_bytes(seed, data, len);
}

// -------------------------------------------------------------- cursor

struct Cursor::Source {
    virtual ~Source() = default;
    // Yields the next raw (pre-projection) document, updating fetch
    // counters. Returns false at end of stream.
    virtual bool next(Doc& out, FetchStats& stats) = 0;
};

namespace {

std::uint64_t logical_size(const Doc& d) {
    return Doc::to_cbor(d).size();
}

struct ScanSource final : Cursor::Source {
    DocMap::const_iterator it;
    explicit ScanSource(DocMap::const_iterator i) : it(std::move(i)) {}
    bool next(Doc& out, FetchStats& stats) override {
        if (it.at_end()) return false;
        out = *it.value();
        it.next();
        stats.documents_fetched += 1;
        return true;
    }
};

struct KeyRangeSource final : Cursor::Source {
    DocMap::const_iterator it;
    Bound upper;
    KeyRangeSource(DocMap::const_iterator i, Bound u) : it(std::move(i)), upper(std::move(u)) {}
    bool next(Doc& out, FetchStats& stats) override {
        if (it.at_end()) return false;
        if (!upper.unbounded && compare_prefix(it.key(), upper.values) > 0) return false;
        out = *it.value();
        it.next();
        stats.documents_fetched += 1;
        return true;
    }
};

struct FilterSource final : Cursor::Source {
    DocMap::const_iterator it;
    Predicate pred;
    FilterSource(DocMap::const_iterator i, Predicate p) : it(std::move(i)), pred(std::move(p)) {}
    bool next(Doc& out, FetchStats& stats) override {
        while (!it.at_end()) {
            const Doc& d = *it.value();
            if (pred.eval(d)) {
                out = d;
                it.next();
                stats.documents_fetched += 1;
                return true;
            }
            it.next();
        }
        return false;
    }
};

struct IndexSource final : Cursor::Source {
    const CollectionState* coll;
    IndexMap::const_iterator it;
    Bound upper;
    bool covered;
    const IndexDef* idx;
    const std::vector<std::string>* key_fields;
    std::set<KeyTuple, KeyTupleLess> seen;  // multikey fan-out dedupe

    bool next(Doc& out, FetchStats& stats) override {
        while (!it.at_end()) {
            const IndexEntry& e = it.key();
            if (!upper.unbounded && compare_prefix(e.first, upper.values) > 0) return false;
            if (idx->multikey) {
                if (seen.count(e.second)) {
                    it.next();
                    continue;
                }
                seen.insert(e.second);
            }
            if (covered) {
                // serve from the index entry alone
                Doc d = Doc::object();
                for (std::size_t i = 0; i < idx->fields.size(); ++i) {
                    d[idx->fields[i].parts.front()] = e.first[i].to_json();
                }
                for (std::size_t i = 0; i < key_fields->size(); ++i) {
                    d[(*key_fields)[i]] = e.second[i].to_json();
                }
                out = std::move(d);
                stats.index_entries_scanned += 1;
            } else {
                const DocPtr* doc = coll->docs.find(e.second);
                if (doc == nullptr) {
                    throw InvariantViolationError("index entry without document in " +
                                                  coll->schema.name);
                }
                out = **doc;
                stats.documents_fetched += 1;
            }
            it.next();
            return true;
        }
        return false;
    }
};

}  // namespace

Cursor::Cursor(std::shared_ptr<const detail::CollectionState> coll, std::unique_ptr<Source> src,
               Projection proj, std::size_t batch_size)
    : coll_(std::move(coll)),
      src_(std::move(src)),
      proj_(std::move(proj)),
      batch_size_(batch_size == 0 ? 1 : batch_size) {}

Cursor::Cursor(Cursor&&) noexcept = default;
Cursor& Cursor::operator=(Cursor&&) noexcept = default;
Cursor::~Cursor() = default;

void Cursor::refill() {
    buffer_.clear();
    pos_ = 0;
    Doc raw;
    while (buffer_.size() < batch_size_ && src_->next(raw, stats_)) {
        Doc projected = proj_.apply(raw);
        stats_.logical_bytes += logical_size(projected);
        buffer_.push_back(std::move(projected));
        stats_.peak_buffered = std::max<std::uint64_t>(stats_.peak_buffered, buffer_.size());
    }
    if (buffer_.empty()) exhausted_ = true;
}

bool Cursor::next(Doc& out) {
    if (pos_ >= buffer_.size()) {
        if (exhausted_) return false;
        refill();
        if (exhausted_) return false;
    }
    out = std::move(buffer_[pos_]);
    ++pos_;
    return true;
}

// ------------------------------------------------------------ snapshot

const CollectionState& Snapshot::coll(const std::string& name) const {
    auto it = state_->collections.find(name);
    if (it == state_->collections.end()) {
        throw UnknownCollectionError("unknown collection: " + name);
    }
    return *it->second;
}

bool Snapshot::has_collection(const std::string& name) const {
    return state_->collections.count(name) > 0;
}

const CollectionSchema& Snapshot::schema(const std::string& name) const {
    return coll(name).schema;
}

std::vector<std::string> Snapshot::collection_names() const {
    std::vector<std::string> out;
    out.reserve(state_->collections.size());
    for (const auto& [name, c] : state_->collections) out.push_back(name);
    return out;
}

std::size_t Snapshot::doc_count(const std::string& name) const {
    return coll(name).docs.size();
}

std::optional<Doc> Snapshot::get(const std::string& name, const KeyTuple& key) const {
    const auto& c = coll(name);
    const DocPtr* d = c.docs.find(key);
    if (d == nullptr) return std::nullopt;
    return **d;
}

Cursor Snapshot::scan(const std::string& name, Projection proj, std::size_t batch) const {
    auto it = state_->collections.find(name);
    if (it == state_->collections.end()) throw UnknownCollectionError("unknown collection: " + name);
    auto src = std::make_unique<ScanSource>(it->second->docs.begin());
    return Cursor(it->second, std::move(src), std::move(proj), batch);
}

Cursor Snapshot::key_range(const std::string& name, Bound lower, Bound upper, Projection proj,
                           std::size_t batch) const {
    auto it = state_->collections.find(name);
    if (it == state_->collections.end()) throw UnknownCollectionError("unknown collection: " + name);
    auto iter = lower.unbounded ? it->second->docs.begin() : it->second->docs.lower_bound(lower.values);
    auto src = std::make_unique<KeyRangeSource>(std::move(iter), std::move(upper));
    return Cursor(it->second, std::move(src), std::move(proj), batch);
}

Cursor Snapshot::index_range_scan(const std::string& name, const std::string& index, Bound lower,
                                  Bound upper, Projection proj, std::size_t batch) const {
    auto cit = state_->collections.find(name);
    if (cit == state_->collections.end()) throw UnknownCollectionError("unknown collection: " + name);
    const CollectionState& c = *cit->second;
    std::size_t idx_pos = c.schema.indexes.size();
    for (std::size_t i = 0; i < c.schema.indexes.size(); ++i) {
        if (c.schema.indexes[i].name == index) {
            idx_pos = i;
            break;
        }
    }
    if (idx_pos == c.schema.indexes.size()) {
        throw UnknownIndexError("collection " + name + " has no index '" + index + "'");
    }
    const IndexDef& def = c.schema.indexes[idx_pos];

    // a projection limited to single-segment index/key fields is served
    // from the index entries alone (covered scan)
    bool covered = !def.multikey && !proj.all;
    if (covered) {
        std::set<std::string> available;
        bool simple = true;
        for (const FieldPath& f : def.fields) {
            if (f.parts.size() != 1) simple = false;
            available.insert(f.parts.front());
        }
        for (const std::string& k : c.schema.key_fields) available.insert(k);
        if (simple) {
            for (const FieldPath& p : proj.paths) {
                if (p.parts.size() != 1 || available.count(p.parts.front()) == 0) {
                    covered = false;
                    break;
                }
            }
        } else {
            covered = false;
        }
    }

    auto src = std::make_unique<IndexSource>();
    src->coll = &c;
    src->it = lower.unbounded ? c.indexes[idx_pos].begin()
                              : c.indexes[idx_pos].lower_bound({lower.values, KeyTuple{}});
    src->upper = std::move(upper);
    src->covered = covered;
    src->idx = &def;
    src->key_fields = &c.schema.key_fields;
    return Cursor(cit->second, std::move(src), std::move(proj), batch);
}

Cursor Snapshot::filtered_scan(const std::string& name, Predicate pred, Projection proj,
                               std::size_t batch) const {
    auto it = state_->collections.find(name);
    if (it == state_->collections.end()) throw UnknownCollectionError("unknown collection: " + name);
    auto src = std::make_unique<FilterSource>(it->second->docs.begin(), std::move(pred));
    return Cursor(it->second, std::move(src), std::move(proj), batch);
}

std::uint64_t Snapshot::version() const { return state_->version; }

std::uint64_t Snapshot::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [name, c] : state_->collections) {
        h = hash_bytes(h, name.data(), name.size());
        for (const std::string& k : c->schema.key_fields) h = hash_bytes(h, k.data(), k.size());
        for (const IndexDef& idx : c->schema.indexes) {
            h = hash_bytes(h, idx.name.data(), idx.name.size());
            for (const FieldPath& f : idx.fields) {
                std::string s = f.str();
                h = hash_bytes(h, s.data(), s.size());
            }
            h = hash_bytes(h, &idx.multikey, 1);
        }
        c->docs.for_each([&](const KeyTuple& key, const DocPtr& doc) {
            Doc karr = Doc::array();
            for (const Scalar& s : key) karr.push_back(s.to_json());
            h = hash_doc(h, karr);
            h = hash_doc(h, *doc);
        });
    }
    return h;
}

// -------------------------------------------------------------- store

Store::Store() : state_(std::make_shared<const StoreState>()) {}

// moves require external synchronization (no readers or writers in flight)
Store::Store(Store&& other) noexcept
    : state_(std::move(other.state_)), fault_hook_(std::move(other.fault_hook_)) {}

Store& Store::operator=(Store&& other) noexcept {
    if (this != &other) {
        state_ = std::move(other.state_);
        fault_hook_ = std::move(other.fault_hook_);
    }
    return *this;
}

std::shared_ptr<const StoreState> Store::state_locked() const {
    std::lock_guard<std::mutex> lk(state_mu_);
    return state_;
}

void Store::swap_state(std::shared_ptr<const StoreState> next) {
    std::lock_guard<std::mutex> lk(state_mu_);
    state_ = std::move(next);
}

Snapshot Store::snapshot() const { return Snapshot(state_locked()); }

void Store::create_collection(CollectionSchema schema) {
    if (snapshot().has_collection(schema.name)) {
        throw DuplicateCollectionError("collection already exists: " + schema.name);
    }
    WriteBatch b;
    b.ensure_collection(std::move(schema));
    commit(b);
}

void WriteBatch::ensure_collection(CollectionSchema schema) {
    ops_.push_back(EnsureCollection{std::move(schema)});
}
void WriteBatch::upsert(std::string coll, Doc doc) {
    ops_.push_back(Upsert{std::move(coll), std::move(doc)});
}
void WriteBatch::erase(std::string coll, KeyTuple key) {
    ops_.push_back(Erase{std::move(coll), std::move(key)});
}
void WriteBatch::update_field(std::string coll, KeyTuple key, FieldPath path, Doc value) {
    ops_.push_back(UpdateField{std::move(coll), std::move(key), std::move(path), std::move(value)});
}

namespace {

void validate_schema(const CollectionSchema& schema) {
    if (schema.name.empty()) throw ValidationError("collection name must not be empty");
    if (schema.key_fields.empty()) throw ValidationError("key schema must name at least one field");
    std::set<std::string> idx_names;
    for (const IndexDef& idx : schema.indexes) {
        if (idx.fields.empty()) throw ValidationError("index must cover at least one field");
        if (!idx_names.insert(idx.name).second) {
            throw ValidationError("duplicate index name: " + idx.name);
        }
    }
}

bool same_schema(const CollectionSchema& a, const CollectionSchema& b) {
    if (a.key_fields != b.key_fields || a.indexes.size() != b.indexes.size()) return false;
    for (std::size_t i = 0; i < a.indexes.size(); ++i) {
        if (a.indexes[i].name != b.indexes[i].name || a.indexes[i].fields != b.indexes[i].fields ||
            a.indexes[i].multikey != b.indexes[i].multikey) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::uint64_t Store::commit(const WriteBatch& batch) {
    std::lock_guard<std::mutex> wl(writer_mu_);
    auto base = state_locked();
    if (batch.expected_version() && *batch.expected_version() != base->version) {
        throw ConflictError("store version moved: expected " +
                            std::to_string(*batch.expected_version()) + ", at " +
                            std::to_string(base->version));
    }

    // shadow-apply: copy touched collections, swap once at the end
    std::map<std::string, std::shared_ptr<CollectionState>> shadow;
    auto touch = [&](const std::string& name) -> CollectionState& {
        auto it = shadow.find(name);
        if (it != shadow.end()) return *it->second;
        auto bit = base->collections.find(name);
        if (bit == base->collections.end()) {
            throw UnknownCollectionError("unknown collection: " + name);
        }
        auto copy = std::make_shared<CollectionState>(*bit->second);
        return *shadow.emplace(name, std::move(copy)).first->second;
    };

    for (std::size_t i = 0; i < batch.ops().size(); ++i) {
        if (fault_hook_) fault_hook_(i);
        const WriteBatch::Op& op = batch.ops()[i];
        if (const auto* ec = std::get_if<WriteBatch::EnsureCollection>(&op)) {
            validate_schema(ec->schema);
            auto existing = shadow.find(ec->schema.name);
            if (existing != shadow.end() ||
                base->collections.count(ec->schema.name) > 0) {
                const CollectionSchema& have = existing != shadow.end()
                                                   ? existing->second->schema
                                                   : base->collections.at(ec->schema.name)->schema;
                if (!same_schema(have, ec->schema)) {
                    throw ValidationError("collection exists with different schema: " +
                                          ec->schema.name);
                }
                continue;
            }
            auto fresh = std::make_shared<CollectionState>();
            fresh->schema = ec->schema;
            fresh->indexes.resize(ec->schema.indexes.size());
            shadow.emplace(ec->schema.name, std::move(fresh));
        } else if (const auto* up = std::get_if<WriteBatch::Upsert>(&op)) {
            CollectionState& c = touch(up->coll);
            KeyTuple key = extract_key(c.schema, up->doc);
            c = with_doc_upserted(c, key, up->doc);
        } else if (const auto* er = std::get_if<WriteBatch::Erase>(&op)) {
            CollectionState& c = touch(er->coll);
            c = with_doc_removed(c, er->key);
        } else if (const auto* uf = std::get_if<WriteBatch::UpdateField>(&op)) {
            CollectionState& c = touch(uf->coll);
            if (uf->path.parts.empty()) throw ValidationError("empty update path");
            for (const std::string& kf : c.schema.key_fields) {
                if (uf->path.parts.front() == kf) {
                    throw ValidationError("key field is immutable: " + kf);
                }
            }
            const DocPtr* old = c.docs.find(uf->key);
            if (old == nullptr) {
                throw ValidationError("no document with key " + to_string(uf->key) + " in " +
                                      uf->coll);
            }
            Doc updated = **old;
            Doc* node = &updated;
            for (std::size_t pi = 0; pi + 1 < uf->path.parts.size(); ++pi) {
                node = &(*node)[uf->path.parts[pi]];
                if (!node->is_object()) *node = Doc::object();
            }
            (*node)[uf->path.parts.back()] = uf->value;
            c = with_doc_upserted(c, uf->key, std::move(updated));
        }
    }

    auto next = std::make_shared<StoreState>();
    next->collections = base->collections;
    for (auto& [name, c] : shadow) {
        next->collections[name] = std::move(c);
    }
    next->version = base->version + 1;
    std::uint64_t v = next->version;
    swap_state(std::move(next));
    return v;
}

std::optional<Doc> Store::get(const std::string& coll, const KeyTuple& key) const {
    return snapshot().get(coll, key);
}
bool Store::has_collection(const std::string& name) const {
    return snapshot().has_collection(name);
}
std::size_t Store::doc_count(const std::string& coll) const {
    return snapshot().doc_count(coll);
}
std::uint64_t Store::version() const { return snapshot().version(); }
std::uint64_t Store::content_hash() const { return snapshot().content_hash(); }

void Store::set_fault_hook(std::function<void(std::size_t)> hook) {
    fault_hook_ = std::move(hook);
}

// ---------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[4] = {'C', 'H', 'R', 'N'};
constexpr std::uint16_t kFormatVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& payload) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    return static_cast<std::uint32_t>(crc);
}

void write_record(std::ostream& out, const std::vector<std::uint8_t>& payload) {
    std::string hdr;
    put_u32(hdr, static_cast<std::uint32_t>(payload.size()));
    put_u32(hdr, crc_of(payload));
    out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
}

bool read_exact(std::istream& in, void* buf, std::size_t len) {
    in.read(static_cast<char*>(buf), static_cast<std::streamsize>(len));
    return static_cast<std::size_t>(in.gcount()) == len;
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

std::vector<std::uint8_t> read_record(std::istream& in) {
    unsigned char hdr[8];
    if (!read_exact(in, hdr, 8)) throw CorruptCheckpointError("truncated record header");
    std::uint32_t len = get_u32(hdr);
    std::uint32_t crc = get_u32(hdr + 4);
    if (len > (1u << 30)) throw CorruptCheckpointError("record length out of range");
    std::vector<std::uint8_t> payload(len);
    if (!read_exact(in, payload.data(), len)) throw CorruptCheckpointError("truncated record body");
    if (crc_of(payload) != crc) throw CorruptCheckpointError("record CRC mismatch");
    return payload;
}

}  // namespace

void Store::persist_checkpoint(const std::string& path) const {
    Snapshot snap = snapshot();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + path);

    std::string header(kMagic, 4);
    put_u16(header, kFormatVersion);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    Doc meta = Doc::object();
    Doc colls = Doc::array();
    std::size_t total_docs = 0;
    for (const std::string& name : snap.collection_names()) {
        const CollectionSchema& s = snap.schema(name);
        Doc cs = Doc::object();
        cs["name"] = s.name;
        cs["key"] = s.key_fields;
        Doc idxs = Doc::array();
        for (const IndexDef& idx : s.indexes) {
            Doc di = Doc::object();
            di["name"] = idx.name;
            Doc fields = Doc::array();
            for (const FieldPath& f : idx.fields) fields.push_back(f.str());
            di["fields"] = std::move(fields);
            di["multikey"] = idx.multikey;
            idxs.push_back(std::move(di));
        }
        cs["indexes"] = std::move(idxs);
        colls.push_back(std::move(cs));
        total_docs += snap.doc_count(name);
    }
    meta["collections"] = std::move(colls);
    meta["docs"] = total_docs;
    write_record(out, Doc::to_cbor(meta));

    std::size_t coll_index = 0;
    for (const std::string& name : snap.collection_names()) {
        Cursor cur = snap.scan(name, Projection::whole(), 1024);
        Doc d;
        // re-derive the key per doc; key fields are part of the body
        while (cur.next(d)) {
            Doc rec = Doc::object();
            rec["c"] = coll_index;
            rec["b"] = std::move(d);
            write_record(out, Doc::to_cbor(rec));
        }
        ++coll_index;
    }
    if (!out) throw IoError("write failed: " + path);
}

Store Store::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for read: " + path);

    char magic[4];
    if (!read_exact(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw CorruptCheckpointError("bad magic");
    }
    unsigned char verbuf[2];
    if (!read_exact(in, verbuf, 2)) throw CorruptCheckpointError("truncated version");
    std::uint16_t version = std::uint16_t(verbuf[0]) | (std::uint16_t(verbuf[1]) << 8);
    if (version != kFormatVersion) {
        throw CorruptCheckpointError("unsupported format version " + std::to_string(version));
    }

    Doc meta;
    try {
        meta = Doc::from_cbor(read_record(in));
    } catch (const Doc::exception&) {
        throw CorruptCheckpointError("unreadable checkpoint header");
    }
    if (!meta.is_object() || !meta.contains("collections") || !meta.contains("docs")) {
        throw CorruptCheckpointError("malformed checkpoint header");
    }

    Store store;
    std::vector<std::string> coll_names;
    WriteBatch ddl;
    for (const Doc& cs : meta["collections"]) {
        CollectionSchema schema;
        schema.name = cs.at("name").get<std::string>();
        schema.key_fields = cs.at("key").get<std::vector<std::string>>();
        for (const Doc& di : cs.at("indexes")) {
            IndexDef idx;
            idx.name = di.at("name").get<std::string>();
            for (const Doc& f : di.at("fields")) idx.fields.push_back(FieldPath::parse(f.get<std::string>()));
            idx.multikey = di.at("multikey").get<bool>();
            schema.indexes.push_back(std::move(idx));
        }
        coll_names.push_back(schema.name);
        ddl.ensure_collection(std::move(schema));
    }
    if (!ddl.empty()) store.commit(ddl);

    std::size_t expected = meta["docs"].get<std::size_t>();
    std::size_t loaded = 0;
    WriteBatch batch;
    while (loaded < expected) {
        Doc rec;
        try {
            rec = Doc::from_cbor(read_record(in));
        } catch (const Doc::exception&) {
            throw CorruptCheckpointError("unreadable document record");
        }
        std::size_t ci = rec.at("c").get<std::size_t>();
        if (ci >= coll_names.size()) throw CorruptCheckpointError("record names unknown collection");
        batch.upsert(coll_names[ci], std::move(rec.at("b")));
        ++loaded;
        if (batch.size() >= 4096) {
            store.commit(batch);
            batch = WriteBatch();
        }
    }
    if (!batch.empty()) store.commit(batch);
    if (loaded != expected) throw CorruptCheckpointError("document count mismatch");
    return store;
}

}  // namespace chronostore
