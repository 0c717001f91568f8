#pragma once

// Constrained rules, calculation rules, the full system and its rewrite
// relation.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lctrs/core.hpp"
#include "lctrs/theory.hpp"

namespace lctrs {

class SystemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// lhs -> rhs [constraint]
struct Rule {
    Term lhs;
    Term rhs;
    Term constraint;
    bool isCalc = false;

    const SymbolRef& root() const { return lhs.symbol(); }
    /// Var(constraint) ∪ (Var(rhs) \ Var(lhs)): the variables that must be
    /// instantiated by values.
    std::vector<Var> lvars() const;
    /// Variables of the rule, lhs first.
    std::vector<Var> allVars() const;
};

std::string toString(const Rule& r);

/// Same rule up to a bijective renaming of variables.
bool alphaEquivalent(const Rule& a, const Rule& b);

/// Consistently renames every variable of the rule to a fresh one.
Rule renameApart(const Rule& r, VarFactory& fresh);

/// One calculation rule f(x1,...,xn) -> y [y = f(x1,...,xn)] per calculation
/// symbol of the theory.
std::vector<Rule> calcRules(const Theory& th, VarFactory& fresh);

class Lctrs {
public:
    /// Validates every rule and the signature split; throws SystemError.
    /// `termSymbols` lists the declared Σ_terms symbols; values declared
    /// there (e.g. `true : Bool`) become term constants as well.
    Lctrs(Theory theory, std::vector<Sort> userSorts, std::vector<SymbolRef> termSymbols,
          std::vector<Rule> rules, std::uint64_t firstFreeVar);

    const Theory& theory() const { return theory_; }
    const std::vector<Sort>& userSorts() const { return userSorts_; }
    /// Theory sorts followed by user sorts.
    std::vector<Sort> allSorts() const;
    bool hasSort(const Sort& s) const;
    bool isTheorySort(const Sort& s) const { return theory_.isTheorySort(s); }

    const std::vector<SymbolRef>& termSymbols() const { return termSymbols_; }
    const std::vector<Rule>& rules() const { return rules_; }
    const std::vector<Rule>& calcRules() const { return calc_; }
    /// User rules followed by calculation rules.
    std::vector<const Rule*> allRules() const;

    /// Declared term symbol with this name, or null.
    SymbolRef findTermSymbol(const std::string& name) const;

    bool isDefined(const FunSymbol& f) const;
    /// Defined symbols in order of first rule occurrence.
    const std::vector<SymbolRef>& definedSymbols() const { return defined_; }
    bool isConstructor(const FunSymbol& f) const;
    bool isConstructorTerm(const Term& t) const;
    /// Non-value constructors with the given output sort, in declaration order.
    std::vector<SymbolRef> nonValueConstructors(const Sort& s) const;

    /// First variable id never used by this system.
    std::uint64_t firstFreeVar() const { return firstFreeVar_; }

    /// Same signature and theory, different rules.
    Lctrs withRules(std::vector<Rule> rules, std::uint64_t firstFreeVar) const;

private:
    void validateRule(const Rule& r) const;

    Theory theory_;
    std::vector<Sort> userSorts_;
    std::vector<SymbolRef> termSymbols_;
    std::vector<Rule> rules_;
    std::vector<Rule> calc_;
    std::vector<SymbolRef> defined_;
    std::uint64_t firstFreeVar_;
};

/// Values supplied for right-hand-side variables the constraint leaves open
/// (user input or random choice), keyed by variable name.
using Choices = std::map<std::string, Value>;

struct RewriteStep {
    Position position;
    const Rule* rule = nullptr;
    Substitution substitution;
    Term before;
    Term after;
    /// Variables whose values were neither bound by matching nor forced by
    /// an equation in the constraint. Non-empty means the step needs a choice;
    /// `after` then uses a witness found by bounded search.
    std::vector<Var> unresolved;

    bool needsChoice() const { return !unresolved.empty(); }
};

/// γ maps LVar(r) to values and the constraint holds.
bool respectsRule(const Theory& th, const Substitution& gamma, const Rule& r);

/// Every applicable (position, rule, γ), positions in pre-order, rules in
/// system order.
std::vector<RewriteStep> findRedexes(const Lctrs& sys, const Term& t);
/// Steps at one position only.
std::vector<RewriteStep> findRedexesAt(const Lctrs& sys, const Term& t, const Position& p);

enum class Strategy { LeftmostInnermost, LeftmostOutermost };

class ChoiceRequired : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The step selected by the strategy, or nullopt for a normal form. Throws
/// ChoiceRequired when that step needs values the constraint does not fix
/// and `choices` does not supply them.
std::optional<RewriteStep> rewriteStep(const Lctrs& sys, const Term& t,
                                       Strategy strategy = Strategy::LeftmostInnermost,
                                       const Choices* choices = nullptr);

struct NormalizeResult {
    Term result;
    std::vector<RewriteStep> trace;
    bool truncated = false;
};

NormalizeResult normalize(const Lctrs& sys, const Term& t, Strategy strategy = Strategy::LeftmostInnermost,
                          std::size_t maxSteps = 10000, const Choices* choices = nullptr);

}  // namespace lctrs
