#include <chronostore/value.hpp>

namespace chronostore {

Scalar Scalar::from_json(const Doc& j) {
    switch (j.type()) {
        case Doc::value_t::boolean:
            return Scalar(j.get<bool>());
        case Doc::value_t::number_integer: {
            // normalize non-negative integers to the unsigned lane so that
            // in-memory and re-parsed documents key identically
            auto i = j.get<std::int64_t>();
            return Scalar(i);
        }
        case Doc::value_t::number_unsigned:
            return Scalar(j.get<std::uint64_t>());
        case Doc::value_t::number_float:
            return Scalar(j.get<double>());
        case Doc::value_t::string:
            return Scalar(j.get<std::string>());
        default:
            throw ValidationError("not a scalar: " + j.dump());
    }
}

Doc Scalar::to_json() const {
    return std::visit([](const auto& v) { return Doc(v); }, v_);
}

std::uint64_t Scalar::as_u64() const {
    if (const auto* u = std::get_if<std::uint64_t>(&v_)) return *u;
    if (const auto* i = std::get_if<std::int64_t>(&v_); i && *i >= 0) return static_cast<std::uint64_t>(*i);
    throw ValidationError("scalar is not an unsigned integer: " + repr());
}

const std::string& Scalar::as_string() const {
    if (const auto* s = std::get_if<std::string>(&v_)) return *s;
    throw ValidationError("scalar is not a string: " + repr());
}

int Scalar::type_class() const {
    if (std::holds_alternative<bool>(v_)) return 0;
    if (std::holds_alternative<std::string>(v_)) return 2;
    return 1;
}

namespace {

int cmp3(long double a, long double b) { return a < b ? -1 : (a > b ? 1 : 0); }

long double to_ld(const std::variant<bool, std::int64_t, std::uint64_t, double, std::string>& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<long double>(*i);
    if (const auto* u = std::get_if<std::uint64_t>(&v)) return static_cast<long double>(*u);
    return static_cast<long double>(std::get<double>(v));
}

}  // namespace

int Scalar::compare(const Scalar& other, bool strict) const {
    int ca = type_class();
    int cb = other.type_class();
    if (ca != cb) {
        if (strict) {
            throw PredicateTypeError("cannot compare " + repr() + " with " + other.repr());
        }
        return ca < cb ? -1 : 1;
    }
    switch (ca) {
        case 0:
            return int(std::get<bool>(v_)) - int(std::get<bool>(other.v_));
        case 1:
            return cmp3(to_ld(v_), to_ld(other.v_));
        default: {
            const auto& a = std::get<std::string>(v_);
            const auto& b = std::get<std::string>(other.v_);
            return a < b ? -1 : (a > b ? 1 : 0);
        }
    }
}

std::string Scalar::repr() const {
    return to_json().dump();
}

int compare_tuples(const KeyTuple& a, const KeyTuple& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = a[i].compare(b[i]);
        if (c != 0) return c;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

int compare_prefix(const KeyTuple& key, const KeyTuple& bound) {
    std::size_t n = std::min(key.size(), bound.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = key[i].compare(bound[i]);
        if (c != 0) return c;
    }
    return 0;
}

std::string to_string(const KeyTuple& k) {
    std::string out = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) out += ",";
        out += k[i].repr();
    }
    return out + ")";
}

}  // namespace chronostore
