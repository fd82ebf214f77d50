#include "sqlrl/value.hpp"

#include <algorithm>
#include <cmath>

namespace sqlrl {

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool is_numeric(const Value& v) {
    return std::holds_alternative<int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
    if (auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

static int type_rank(const Value& v) {
    if (is_null(v)) return 0;
    if (is_numeric(v)) return 1;
    return 2;
}

bool value_equal(const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return is_null(a) && is_null(b);
    if (is_numeric(a) && is_numeric(b)) {
        if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
            return std::get<int64_t>(a) == std::get<int64_t>(b);
        double x = as_double(a), y = as_double(b);
        double diff = std::fabs(x - y);
        double scale = std::max(std::fabs(x), std::fabs(y));
        return diff <= std::max(1e-9, 1e-6 * scale);
    }
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b))
        return std::get<std::string>(a) == std::get<std::string>(b);
    return false;
}

bool value_less(const Value& a, const Value& b) {
    int ra = type_rank(a), rb = type_rank(b);
    if (ra != rb) return ra < rb;
    if (ra == 0) return false;
    if (ra == 1) {
        if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
            return std::get<int64_t>(a) < std::get<int64_t>(b);
        return as_double(a) < as_double(b);
    }
    return std::get<std::string>(a) < std::get<std::string>(b);
}

std::string value_to_string(const Value& v) {
    if (is_null(v)) return "NULL";
    if (auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&v)) {
        nlohmann::json j = *d; // shortest round-trip formatting
        return j.dump();
    }
    return std::get<std::string>(v);
}

nlohmann::json value_to_json(const Value& v) {
    if (is_null(v)) return nullptr;
    if (auto* i = std::get_if<int64_t>(&v)) return *i;
    if (auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_number_float()) return j.get<double>();
    return j.get<std::string>();
}

CanonicalAnswer CanonicalAnswer::from_values(std::vector<Value> vals) {
    std::sort(vals.begin(), vals.end(), value_less);
    return CanonicalAnswer{std::move(vals)};
}

size_t CanonicalAnswer::intersection_size(const CanonicalAnswer& other) const {
    std::vector<bool> used(other.values.size(), false);
    size_t matched = 0;
    for (const auto& v : values) {
        for (size_t j = 0; j < other.values.size(); ++j) {
            if (!used[j] && value_equal(v, other.values[j])) {
                used[j] = true;
                ++matched;
                break;
            }
        }
    }
    return matched;
}

bool CanonicalAnswer::operator==(const CanonicalAnswer& other) const {
    return values.size() == other.values.size() &&
           intersection_size(other) == values.size();
}

bool CanonicalAnswer::contains(const CanonicalAnswer& sub) const {
    return sub.intersection_size(*this) == sub.values.size();
}

nlohmann::json CanonicalAnswer::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : values) arr.push_back(value_to_json(v));
    return arr;
}

CanonicalAnswer CanonicalAnswer::from_json(const nlohmann::json& j) {
    std::vector<Value> vals;
    for (const auto& e : j) vals.push_back(value_from_json(e));
    return from_values(std::move(vals));
}

} // namespace sqlrl
