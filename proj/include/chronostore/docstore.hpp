#pragma once

#include <chronostore/errors.hpp>
#include <chronostore/pmap.hpp>
#include <chronostore/value.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace chronostore {

// Dotted field path into a document body. "*" matches every key of an
// object or every element of a list.
struct FieldPath {
    std::vector<std::string> parts;

    FieldPath() = default;
    FieldPath(std::initializer_list<std::string> p) : parts(p) {}
    static FieldPath parse(const std::string& dotted);
    std::string str() const;

    friend bool operator==(const FieldPath&, const FieldPath&) = default;
};

struct IndexDef {
    std::string name;
    std::vector<FieldPath> fields;
    bool multikey = false;  // fan out one entry per element of list-valued paths
};

struct CollectionSchema {
    std::string name;
    std::vector<std::string> key_fields;  // top-level scalar fields forming the primary key
    std::vector<IndexDef> indexes;
};

// Whitelist projection. Paths absent from a document are silently omitted.
struct Projection {
    bool all = true;
    std::vector<FieldPath> paths;

    static Projection whole() { return Projection{}; }
    static Projection of(std::vector<FieldPath> p) { return Projection{false, std::move(p)}; }

    Doc apply(const Doc& doc) const;
};

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

// Pure predicate over a document; evaluation needs no external state.
class Predicate {
public:
    static Predicate always(bool value);
    static Predicate cmp(FieldPath path, CmpOp op, Scalar rhs);
    // half-open overlap test: doc[start_path] < qe && qs < doc[end_path]
    static Predicate interval_overlap(FieldPath start_path, FieldPath end_path, std::uint64_t qs,
                                      std::uint64_t qe);
    static Predicate all_of(std::vector<Predicate> children);
    static Predicate any_of(std::vector<Predicate> children);
    // true when any element of the list at `list_path` satisfies `inner`
    // (inner paths are relative to the element)
    static Predicate exists(FieldPath list_path, Predicate inner);

    bool eval(const Doc& doc) const;  // PredicateTypeError on type mismatch

private:
    enum class Kind { True, False, Cmp, Overlap, And, Or, Exists };
    Kind kind_ = Kind::True;
    FieldPath path_, end_path_;
    CmpOp op_ = CmpOp::Eq;
    Scalar rhs_;
    std::uint64_t qs_ = 0, qe_ = 0;
    std::vector<Predicate> children_;
};

// Inclusive, prefix-aware scan bound: a shorter bound constrains only the
// index components it names.
struct Bound {
    bool unbounded = true;
    KeyTuple values;

    static Bound none() { return Bound{}; }
    static Bound at(KeyTuple v) { return Bound{false, std::move(v)}; }
};

struct FetchStats {
    std::uint64_t documents_fetched = 0;     // documents crossing store -> client
    std::uint64_t index_entries_scanned = 0; // covered reads served from an index
    std::uint64_t logical_bytes = 0;         // serialized size of fetched payloads
    std::uint64_t peak_buffered = 0;         // client-side batch buffer high-water mark

    void merge(const FetchStats& o);
};

namespace detail {
struct CollectionState;
struct StoreState;
}  // namespace detail

// Streaming result handle. Holds a snapshot of its collection, yields each
// matching document exactly once, and never materializes more than
// `batch_size` documents client-side.
class Cursor {
public:
    struct Source;

    Cursor(Cursor&&) noexcept;
    Cursor& operator=(Cursor&&) noexcept;
    ~Cursor();

    bool next(Doc& out);
    const FetchStats& stats() const { return stats_; }

private:
    friend class Snapshot;
    Cursor(std::shared_ptr<const detail::CollectionState> coll, std::unique_ptr<Source> src,
           Projection proj, std::size_t batch_size);

    void refill();

    std::shared_ptr<const detail::CollectionState> coll_;
    std::unique_ptr<Source> src_;
    Projection proj_;
    std::size_t batch_size_;
    std::vector<Doc> buffer_;
    std::size_t pos_ = 0;
    bool exhausted_ = false;
    FetchStats stats_;
};

// Ordered list of writes applied atomically by Store::commit.
class WriteBatch {
public:
    struct EnsureCollection {
        CollectionSchema schema;
    };
    struct Upsert {
        std::string coll;
        Doc doc;
    };
    struct Erase {
        std::string coll;
        KeyTuple key;
    };
    struct UpdateField {
        std::string coll;
        KeyTuple key;
        FieldPath path;
        Doc value;
    };
    using Op = std::variant<EnsureCollection, Upsert, Erase, UpdateField>;

    void ensure_collection(CollectionSchema schema);
    void upsert(std::string coll, Doc doc);
    void erase(std::string coll, KeyTuple key);
    void update_field(std::string coll, KeyTuple key, FieldPath path, Doc value);

    bool empty() const { return ops_.empty(); }
    std::size_t size() const { return ops_.size(); }
    const std::vector<Op>& ops() const { return ops_; }

    // optimistic concurrency: commit fails with ConflictError unless the
    // store version still equals `v`
    void expect_version(std::uint64_t v) { expected_version_ = v; }
    const std::optional<std::uint64_t>& expected_version() const { return expected_version_; }

private:
    std::vector<Op> ops_;
    std::optional<std::uint64_t> expected_version_;
};

// Immutable view of the store at one committed version. All reads within
// one snapshot are mutually consistent across collections.
class Snapshot {
public:
    bool has_collection(const std::string& name) const;
    const CollectionSchema& schema(const std::string& name) const;
    std::vector<std::string> collection_names() const;
    std::size_t doc_count(const std::string& coll) const;

    std::optional<Doc> get(const std::string& coll, const KeyTuple& key) const;
    Cursor scan(const std::string& coll, Projection proj, std::size_t batch) const;
    // primary-key order scan bounded by inclusive key prefixes
    Cursor key_range(const std::string& coll, Bound lower, Bound upper, Projection proj,
                     std::size_t batch) const;
    Cursor index_range_scan(const std::string& coll, const std::string& index, Bound lower,
                            Bound upper, Projection proj, std::size_t batch) const;
    Cursor filtered_scan(const std::string& coll, Predicate pred, Projection proj,
                         std::size_t batch) const;

    std::uint64_t version() const;
    std::uint64_t content_hash() const;

private:
    friend class Store;
    explicit Snapshot(std::shared_ptr<const detail::StoreState> state) : state_(std::move(state)) {}
    const detail::CollectionState& coll(const std::string& name) const;
    std::shared_ptr<const detail::StoreState> state_;
};

// Embedded document store: named collections, ordered secondary indexes,
// predicate pushdown with projection, snapshot cursors, atomic batches,
// and checkpoint persistence. Single writer, many concurrent readers.
class Store {
public:
    Store();
    Store(Store&& other) noexcept;
    Store& operator=(Store&& other) noexcept;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    void create_collection(CollectionSchema schema);  // DuplicateCollectionError
    std::uint64_t commit(const WriteBatch& batch);    // returns new version

    Snapshot snapshot() const;

    // conveniences over a fresh snapshot
    std::optional<Doc> get(const std::string& coll, const KeyTuple& key) const;
    bool has_collection(const std::string& name) const;
    std::size_t doc_count(const std::string& coll) const;
    std::uint64_t version() const;
    std::uint64_t content_hash() const;

    void persist_checkpoint(const std::string& path) const;
    static Store load_checkpoint(const std::string& path);

    // test hook: invoked before each op inside commit; throwing aborts the batch
    void set_fault_hook(std::function<void(std::size_t op_index)> hook);

private:
    std::shared_ptr<const detail::StoreState> state_locked() const;
    void swap_state(std::shared_ptr<const detail::StoreState> next);

    mutable std::mutex state_mu_;
    std::mutex writer_mu_;
    std::shared_ptr<const detail::StoreState> state_;
    std::function<void(std::size_t)> fault_hook_;
};

// Resolves a dotted path inside a document; lists fan out. Returns all
// terminal nodes reached.
void resolve_path(const Doc& doc, const FieldPath& path, std::size_t depth,
                  std::vector<const Doc*>& out);

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);

}  // namespace chronostore
