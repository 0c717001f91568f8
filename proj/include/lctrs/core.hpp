#pragma once

// Many-sorted first-order terms: sorts, symbols, variables, substitutions,
// syntactic matching and position-based navigation.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lctrs/value.hpp"

namespace lctrs {

class SortError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class PositionError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A sort, identified by name.
struct Sort {
    std::string name;

    friend bool operator==(const Sort&, const Sort&) = default;
    friend auto operator<=>(const Sort&, const Sort&) = default;
};

/// Which half of the signature a symbol belongs to. `Both` is reserved for
/// values that are also usable as ordinary term constants.
enum class SymbolKind { Terms, Theory, Both };

/// Semantic operation of a calculation symbol. `None` for symbols without a
/// built-in interpretation (user symbols and values).
enum class TheoryOp {
    None,
    And, Or, Implies, Not,
    Eq, Neq,
    Add, Sub, Mul,
    Le, Lt, Ge, Gt,
    Size, Select,
};

struct FunSymbol {
    std::string name;
    std::vector<Sort> inputs;
    Sort output;
    SymbolKind kind = SymbolKind::Terms;
    TheoryOp op = TheoryOp::None;
    std::optional<Value> value;  // set iff this is a value symbol

    std::size_t arity() const { return inputs.size(); }
    bool isValue() const { return value.has_value(); }
    bool inTerms() const { return kind != SymbolKind::Theory; }
    bool inTheory() const { return kind != SymbolKind::Terms; }
    bool isCalc() const { return inTheory() && !isValue(); }
};

using SymbolRef = std::shared_ptr<const FunSymbol>;

/// Symbols are identified by name together with their sort declaration, so
/// the overloaded theory equality can exist once per theory sort.
bool sameSymbol(const FunSymbol& a, const FunSymbol& b);
inline bool sameSymbol(const SymbolRef& a, const SymbolRef& b) {
    return a == b || sameSymbol(*a, *b);
}

SymbolRef makeSymbol(std::string name, std::vector<Sort> inputs, Sort output,
                     SymbolKind kind = SymbolKind::Terms);

struct Var {
    std::uint64_t id = 0;
    std::string name;
    Sort sort;

    friend bool operator==(const Var& a, const Var& b) { return a.id == b.id; }
    friend auto operator<=>(const Var& a, const Var& b) { return a.id <=> b.id; }
};

struct VarHash {
    std::size_t operator()(const Var& v) const noexcept { return std::hash<std::uint64_t>{}(v.id); }
};

/// Monotone source of variable ids. Ids handed out are never reused, which
/// is what "fresh" means throughout the toolkit.
class VarFactory {
public:
    explicit VarFactory(std::uint64_t first = 1) : next_(first) {}
    VarFactory(const VarFactory&) = delete;
    VarFactory& operator=(const VarFactory&) = delete;

    Var fresh(std::string name, Sort sort);
    /// A fresh variable whose display name is derived from `base`.
    Var freshLike(const Var& base);
    std::uint64_t peek() const { return next_.load(); }
    /// Guarantee every later id is at least `bound`.
    void reserve(std::uint64_t bound);

private:
    std::atomic<std::uint64_t> next_;
};

using Position = std::vector<std::size_t>;

/// Immutable term. Copies share structure; equality is structural.
class Term {
public:
    static Term variable(Var v);
    /// Builds f(args); throws SortError unless the arguments fit f's
    /// sort declaration.
    static Term apply(SymbolRef f, std::vector<Term> args = {});

    bool isVar() const;
    const Var& var() const;
    const SymbolRef& symbol() const;
    std::span<const Term> args() const;
    const Term& arg(std::size_t i) const { return args()[i]; }
    const Sort& sort() const;

    /// Number of function-symbol occurrences.
    std::size_t symbolCount() const;
    /// Number of variable occurrences.
    std::size_t varOccurrences() const;
    std::size_t depth() const;
    std::size_t hash() const;
    bool isGround() const { return varOccurrences() == 0; }
    bool isValue() const { return !isVar() && symbol()->isValue(); }

    friend bool operator==(const Term& a, const Term& b);

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

const Sort& sortOf(const Term& t);

/// Variables of `t` in order of first occurrence (left to right).
std::vector<Var> vars(const Term& t);
void collectVars(const Term& t, std::vector<Var>& out);
bool occurs(const Var& x, const Term& t);

bool isLinear(const Term& t);

class Substitution {
public:
    Substitution() = default;
    Substitution(std::initializer_list<std::pair<Var, Term>> init);

    /// Throws SortError when the sorts differ.
    void bind(const Var& x, Term t);
    const Term* lookup(const Var& x) const;
    bool contains(const Var& x) const { return lookup(x) != nullptr; }
    /// Variables mapped to something other than themselves, in binding order.
    std::vector<Var> domain() const;
    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }

    /// (this ; other): first this, then other.
    Substitution then(const Substitution& other) const;

    const std::vector<Var>& boundVars() const { return order_; }

private:
    std::unordered_map<Var, Term, VarHash> map_;
    std::vector<Var> order_;
};

Term apply(const Term& t, const Substitution& sigma);

/// Syntactic matching. Extends `into` (which must be consistent with the
/// pattern) and returns false on mismatch.
bool matchInto(const Term& pattern, const Term& subject, Substitution& into);
std::optional<Substitution> match(const Term& pattern, const Term& subject);

const Term& subtermAt(const Term& t, std::span<const std::size_t> p);
Term replaceAt(const Term& t, std::span<const std::size_t> p, Term u);
/// All positions of `t` in pre-order (root first, children left to right).
std::vector<Position> positions(const Term& t);

std::string toString(const Term& t);
/// Same, with variables rendered by `varText`.
std::string toString(const Term& t, const std::function<std::string(const Var&)>& varText);
std::string toString(const Position& p);
std::string toString(const Substitution& s);

}  // namespace lctrs
