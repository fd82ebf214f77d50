#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sqlrl {

// One SQL scalar. monostate is NULL.
using Value = std::variant<std::monostate, int64_t, double, std::string>;

bool is_null(const Value& v);
bool is_numeric(const Value& v);
double as_double(const Value& v);

// Tolerant scalar equality: nulls equal only nulls, text exact,
// numerics within 1e-6 relative (1e-9 absolute floor).
bool value_equal(const Value& a, const Value& b);

// Canonical ordering (type rank, then value); used only to make
// serialization and matching deterministic, never for semantics.
bool value_less(const Value& a, const Value& b);

std::string value_to_string(const Value& v);
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

// Order-free multiset of canonical scalars.
struct CanonicalAnswer {
    std::vector<Value> values; // kept sorted by value_less

    static CanonicalAnswer from_values(std::vector<Value> vals);

    size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    // multiset equality under tolerant scalar equality
    bool operator==(const CanonicalAnswer& other) const;

    // |this ⊓ other| via greedy matching over sorted values
    size_t intersection_size(const CanonicalAnswer& other) const;

    // true iff every element of `sub` matches a distinct element here
    bool contains(const CanonicalAnswer& sub) const;

    nlohmann::json to_json() const;
    static CanonicalAnswer from_json(const nlohmann::json& j);
};

} // namespace sqlrl
