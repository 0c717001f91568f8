#pragma once

// Quasi-reductivity checking: the recursive pattern-completeness procedure
// over (x̄, A, flag) and the top-level verdict for a system.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lctrs/analysis.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/system.hpp"

namespace lctrs {

class CheckerError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Which constructor instantiations of the first column are still in play.
enum class Flag { Either, Value, Term };

const char* toString(Flag f);

struct OkRow {
    std::vector<Term> terms;
    Term constraint;
};

struct OkProblem {
    std::vector<Var> xVars;        // theory-sorted variables already lifted out
    std::vector<Sort> colSorts;    // sorts of the remaining columns
    std::vector<OkRow> rows;       // the set A, in input order

    std::size_t columns() const { return colSorts.size(); }
};

std::string toString(const OkProblem& p);

/// Lexicographic termination measure: symbols in the rows' terms (not the
/// constraints), then variable occurrences in those terms, then the flag.
struct Measure {
    std::size_t symbols = 0;
    std::size_t variables = 0;
    int flagRank = 0;  // either = 1, term = value = 0

    friend auto operator<=>(const Measure&, const Measure&) = default;
};

Measure measureOf(const OkProblem& p, Flag b);

enum class OkResult { True, False, Unknown };

const char* toString(OkResult r);

enum class OkCase {
    Empty,        // A = ∅: no row can cover anything
    Base,         // no columns left: one validity query
    EitherTerm,   // first sort is not a theory sort
    EitherValue,  // first sort is a theory sort with only value constructors
    EitherSplit,  // first sort has values and other constructors
    LiftValue,    // first column is lifted into the variable prefix
    DropColumn,   // first column is all unconstrained variables
    Expand,       // split on the non-value constructors of the first sort
};

const char* toString(OkCase c);

struct OkEvent {
    /// Name of the symbol whose A_f is being checked (set by the top level).
    std::string symbol;
    std::size_t depth = 0;
    OkCase kase = OkCase::Base;
    Flag flag = Flag::Either;
    Measure measure;
    std::size_t xCount = 0;
    std::size_t columns = 0;
    std::size_t rows = 0;
    /// Only for OkCase::Base.
    std::optional<ValidityQuery> query;
    std::optional<SolverAnswer> answer;
    /// For OkCase::Expand: the constructors split on.
    std::vector<std::string> constructors;
};

using OkTrace = std::function<void(const OkEvent&)>;

struct OkFailure {
    OkProblem problem;
    ValidityQuery query;
    SolverAnswer answer;
};

struct OkStats {
    std::size_t calls = 0;
    std::size_t measureChecks = 0;
    std::size_t measureViolations = 0;
    std::size_t solverQueries = 0;
    std::size_t vacuousExpansions = 0;
    std::size_t maxDepth = 0;

    OkStats& operator+=(const OkStats& o);
};

class OkChecker {
public:
    OkChecker(const Lctrs& sys, Solver& solver, VarFactory& fresh, OkTrace trace = {});

    /// Throws CheckerError on a malformed problem or a measure that fails to
    /// decrease.
    OkResult ok(const OkProblem& p, Flag b);

    const OkStats& stats() const { return stats_; }
    /// The first base case whose query was not valid.
    const std::optional<OkFailure>& firstFailure() const { return failure_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    OkResult run(const OkProblem& p, Flag b, std::size_t depth);
    OkResult recurse(const OkProblem& child, Flag b, const Measure& parent, std::size_t depth);
    void emit(OkEvent e);

    const Lctrs& sys_;
    Solver& solver_;
    VarFactory& fresh_;
    OkTrace trace_;
    OkStats stats_;
    std::optional<OkFailure> failure_;
    std::vector<std::string> warnings_;
};

/// A_f: argument tuples and constraints of all rules (user and calculation)
/// rooted at f, each row renamed apart.
OkProblem buildAf(const Lctrs& sys, const FunSymbol& f, VarFactory& fresh);

enum class QrResult { QuasiReductive, NotProven, NotQuasiReductive, Ineligible };

const char* toString(QrResult r);

struct SymbolVerdict {
    enum class Status { Ok, Failed, Unknown };

    SymbolRef symbol;
    Status status = Status::Ok;
    std::optional<OkFailure> failure;
};

const char* toString(SymbolVerdict::Status s);

struct QrVerdict {
    QrResult result = QrResult::NotProven;
    RestrictionReport restrictions;
    /// Values in left-hand sides were replaced by constrained variables.
    bool madeValueFree = false;
    /// Defined symbols that lose all rules when non-constructor rules are
    /// dropped; any of them yields a stuck basic term.
    std::vector<SymbolRef> lostDefined;
    std::vector<SymbolVerdict> perSymbol;
    OkStats stats;
    std::vector<std::string> warnings;
    std::string explanation;
};

struct CheckOptions {
    OkTrace trace;
    /// Symbols are checked concurrently on this many workers, each with its
    /// own solver session. Trace events are still delivered in symbol order.
    unsigned jobs = 1;
};

/// Symbol name; the overloaded `=` and `!=` get their argument sort
/// appended, as in `=:Int`.
std::string symbolLabel(const FunSymbol& f);

QrVerdict checkQuasiReductivity(const Lctrs& sys, const SolverConfig& solverCfg, const CheckOptions& opts = {});

}  // namespace lctrs
