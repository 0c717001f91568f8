#pragma once

// Built-in theories: carrier sets, value symbols and the semantics of
// calculation symbols.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lctrs/core.hpp"
#include "lctrs/value.hpp"

namespace lctrs {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const Sort& boolSort();
const Sort& intSort();
const Sort& arraySort();

class Theory {
public:
    /// Booleans only.
    static Theory coreBool();
    /// Booleans and unbounded integers.
    static Theory ints();
    /// Integers plus integer arrays with `size` and `select`.
    static Theory intArrays();
    /// Accepts `core-bool`, `ints` and `int-arrays` (plus the aliases `bool`
    /// and `arrays`).
    static std::optional<Theory> byName(const std::string& name);

    const std::string& name() const { return name_; }
    const std::vector<Sort>& sorts() const { return sorts_; }
    bool isTheorySort(const Sort& s) const;

    /// Calculation symbols (theory symbols that are not values), in a fixed
    /// order. `=` and `!=` appear once per theory sort.
    const std::vector<SymbolRef>& calcSymbols() const { return calc_; }
    /// All calculation symbols carrying `name`.
    std::vector<SymbolRef> calcByName(const std::string& name) const;

    SymbolRef valueSymbol(const Value& v) const;
    Term valueTerm(const Value& v) const { return Term::apply(valueSymbol(v)); }
    Term trueTerm() const { return valueTerm(Value(true)); }
    Term falseTerm() const { return valueTerm(Value(false)); }

    /// The interpretation of a calculation symbol on argument values.
    Value interpret(const FunSymbol& f, std::span<const Value> args) const;

private:
    void addCalc(std::string name, TheoryOp op, std::vector<Sort> in, Sort out);

    std::string name_;
    std::vector<Sort> sorts_;
    std::vector<SymbolRef> calc_;
};

/// Sort of the value.
Sort sortOfValue(const Value& v);

/// True iff `t` is built from theory symbols and variables only.
bool isLogical(const Term& t);
bool isValue(const Term& t);
/// The value denoted by a nullary value term.
const Value& valueOf(const Term& t);

/// Value of a ground logical term. Throws EvalError otherwise.
Value evaluate(const Theory& th, const Term& t);

/// γ maps every variable of φ to a value and φγ evaluates to true.
bool respects(const Theory& th, const Substitution& gamma, const Term& constraint);

/// Flattens nested conjunctions into their conjuncts.
std::vector<Term> conjuncts(const Term& phi);

}  // namespace lctrs
