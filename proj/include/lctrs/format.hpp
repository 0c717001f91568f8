#pragma once

// Text format for systems (.lctrs files):
//
//   THEORY ints
//   SORTS List
//   SIGNATURE
//     nil  : List
//     cons : Int * List => List
//     fact : Int => Int
//   RULES
//     fact(x) -> 1 [x <= 0]
//     fact(x) -> x * fact(x - 1) [not (x <= 0)]
//
// Operators, loosest first: `=>`, `\/`, `/\`, `not`, comparisons
// (`<= < = != >= >`, non-associative), `+ -`, `*`. Comments start with `;;`.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lctrs/system.hpp"

namespace lctrs {

struct Span {
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based, in bytes
    std::size_t offset = 0;
    std::size_t length = 0;
};

enum class ParseErrorKind {
    Lexical,
    Syntax,
    UnknownTheory,
    UnknownSort,
    UnknownSymbol,
    Duplicate,
    ArityMismatch,
    IllSorted,
    AmbiguousSort,
    ConstraintNotBool,
    ConstraintNotLogical,
    LhsVariable,
    LhsLogical,
    MixedComparison,
    TooDeep,
};

const char* toString(ParseErrorKind k);

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, Span span, std::string message, std::string expected = {});

    ParseErrorKind kind() const { return kind_; }
    const Span& span() const { return span_; }
    /// Bare message without location.
    const std::string& message() const { return message_; }
    /// What the parser would have accepted, when that is meaningful.
    const std::string& expected() const { return expected_; }

private:
    ParseErrorKind kind_;
    Span span_;
    std::string message_;
    std::string expected_;
};

/// Parses a whole specification. Without a THEORY section `ints` is used.
Lctrs parseSystem(std::string_view text);

/// Parses a term over the signature of `sys`. Unknown identifiers become
/// variables with ids from `fresh`.
Term parseTerm(const Lctrs& sys, std::string_view text, VarFactory& fresh);

/// Canonical rendering; parseSystem(printSystem(s)) reproduces s up to
/// variable renaming.
std::string printSystem(const Lctrs& sys);

/// Same sorts, term signature and rules (up to renaming, in order).
bool sameSystem(const Lctrs& a, const Lctrs& b);

}  // namespace lctrs
