#pragma once

#include <chronostore/errors.hpp>

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace chronostore {

// Document bodies are JSON trees: scalars, lists, nested objects.
using Doc = nlohmann::json;

// Scalar value usable in primary keys and index entries. Total order:
// bools < numbers < strings; numbers compare numerically across integer
// and floating representations (x86-64 long double holds any u64 exactly).
class Scalar {
public:
    Scalar() : v_(std::uint64_t{0}) {}
    Scalar(bool b) : v_(b) {}
    Scalar(std::int64_t i) {
        if (i >= 0) {
            v_ = static_cast<std::uint64_t>(i);
        } else {
            v_ = i;
        }
    }
    Scalar(std::uint64_t u) : v_(u) {}
    Scalar(int i) : Scalar(static_cast<std::int64_t>(i)) {}
    Scalar(unsigned u) : Scalar(static_cast<std::uint64_t>(u)) {}
    Scalar(double d) : v_(d) {}
    Scalar(std::string s) : v_(std::move(s)) {}
    Scalar(const char* s) : v_(std::string(s)) {}

    static Scalar from_json(const Doc& j);
    Doc to_json() const;

    bool is_number() const {
        return std::holds_alternative<std::int64_t>(v_) || std::holds_alternative<std::uint64_t>(v_) ||
               std::holds_alternative<double>(v_);
    }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }

    std::uint64_t as_u64() const;
    const std::string& as_string() const;

    // three-way compare; throws PredicateTypeError on cross-class compares
    // when strict is set (predicate evaluation), otherwise orders by class.
    int compare(const Scalar& other, bool strict = false) const;

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.compare(b) == 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.compare(b) < 0; }

    std::string repr() const;

private:
    int type_class() const;  // 0 bool, 1 number, 2 string
    std::variant<bool, std::int64_t, std::uint64_t, double, std::string> v_;
};

using KeyTuple = std::vector<Scalar>;

int compare_tuples(const KeyTuple& a, const KeyTuple& b);
// Lexicographic compare limited to min(a,b) components; equal prefixes
// compare equal regardless of length. Used for inclusive scan bounds.
int compare_prefix(const KeyTuple& key, const KeyTuple& bound);

struct KeyTupleLess {
    bool operator()(const KeyTuple& a, const KeyTuple& b) const { return compare_tuples(a, b) < 0; }
};

std::string to_string(const KeyTuple& k);

}  // namespace chronostore
