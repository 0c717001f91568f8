#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <variant>
#include <vector>

namespace lctrs {

using BigInt = boost::multiprecision::cpp_int;
using IntArray = std::vector<BigInt>;

/// An element of a theory carrier set: a boolean, an unbounded integer, or a
/// finite integer sequence.
class Value {
public:
    Value() : v_(false) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(BigInt n) : v_(std::move(n)) {}
    explicit Value(IntArray a) : v_(std::move(a)) {}
    static Value integer(long long n) { return Value(BigInt(n)); }

    bool isBool() const { return std::holds_alternative<bool>(v_); }
    bool isInt() const { return std::holds_alternative<BigInt>(v_); }
    bool isArray() const { return std::holds_alternative<IntArray>(v_); }

    bool asBool() const { return std::get<bool>(v_); }
    const BigInt& asInt() const { return std::get<BigInt>(v_); }
    const IntArray& asArray() const { return std::get<IntArray>(v_); }

    /// Canonical literal: `true`, `-3`, `{1,2}`.
    std::string literal() const;

    friend bool operator==(const Value&, const Value&) = default;
    /// Total order used for enumeration: booleans false < true, integers
    /// numerically, arrays by length then lexicographically.
    friend bool operator<(const Value& a, const Value& b);

private:
    std::variant<bool, BigInt, IntArray> v_;
};

}  // namespace lctrs
