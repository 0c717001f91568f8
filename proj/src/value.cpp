#include "lctrs/value.hpp"

#include <algorithm>

namespace lctrs {

std::string Value::literal() const {
    if (isBool()) return asBool() ? "true" : "false";
    if (isInt()) return asInt().str();
    std::string out = "{";
    const auto& a = asArray();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += a[i].str();
    }
    return out + "}";
}

bool operator<(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return a.v_.index() < b.v_.index();
    if (a.isBool()) return !a.asBool() && b.asBool();
    if (a.isInt()) return a.asInt() < b.asInt();
    const auto& x = a.asArray();
    const auto& y = b.asArray();
    if (x.size() != y.size()) return x.size() < y.size();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace lctrs
