#pragma once

// Validity of closed formulas  forall xs. exists ys. (phi_1 \/ ... \/ phi_k)
// over the built-in theories.

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lctrs/core.hpp"
#include "lctrs/theory.hpp"

namespace lctrs {

struct ValidityQuery {
    std::vector<Var> universal;
    std::vector<Var> existential;
    std::vector<Term> disjuncts;
};

std::string toString(const ValidityQuery& q);

struct SolverAnswer {
    enum class Kind { Valid, Invalid, Unknown };

    Kind kind = Kind::Unknown;
    /// Values for the universal variables under which no existential witness
    /// exists. Only meaningful for Invalid.
    std::vector<std::pair<Var, Value>> counterexample;
    std::string reason;
    /// "builtin" or "external".
    std::string backend;

    static SolverAnswer valid(std::string backend) { return {Kind::Valid, {}, {}, std::move(backend)}; }
    static SolverAnswer unknown(std::string reason, std::string backend) {
        return {Kind::Unknown, {}, std::move(reason), std::move(backend)};
    }
    bool isValid() const { return kind == Kind::Valid; }
    bool isInvalid() const { return kind == Kind::Invalid; }
    bool isUnknown() const { return kind == Kind::Unknown; }
};

const char* toString(SolverAnswer::Kind k);

struct BuiltinConfig {
    /// Integer variables are searched over [-intRange, intRange].
    long long intRange = 16;
    /// Upper bound on universal assignments tried before giving up.
    std::size_t maxAssignments = 2'000'000;
};

/// Exact by enumeration when every relevant variable is Bool. With integer
/// or array universals it only searches for a counterexample in a bounded
/// range and never answers Valid.
SolverAnswer decideBuiltin(const Theory& th, const ValidityQuery& q, const BuiltinConfig& cfg = {});

/// One-point elimination: inside a disjunct, a conjunct y = e with y
/// existential and not occurring in e is dropped and e substituted for y.
/// Existentials that no longer occur are removed. Equivalence-preserving.
ValidityQuery eliminateDefinedExistentials(const Theory& th, const ValidityQuery& q);

struct ExternalConfig {
    std::string path;
    std::vector<std::string> args;
    std::chrono::milliseconds timeout{5000};

    /// Standard flags for known solvers (z3, cvc5, cvc4, yices-smt2) chosen by
    /// the binary's name.
    static ExternalConfig forBinary(std::string path);
};

/// SMT-LIB 2 script deciding `q`: the negation of the existential
/// disjunction is asserted, so unsat means valid.
std::string encodeSmtLib(const ValidityQuery& q);

using ScriptLog = std::function<void(const std::string& script, const std::string& response)>;

/// A long-lived solver process. `(reset)` separates queries. Single client.
class SmtSession {
public:
    explicit SmtSession(ExternalConfig cfg, ScriptLog log = {});
    ~SmtSession();
    SmtSession(const SmtSession&) = delete;
    SmtSession& operator=(const SmtSession&) = delete;

    /// Never throws on solver failure; launch and protocol problems become
    /// Unknown answers.
    SolverAnswer check(const ValidityQuery& q);

private:
    struct Process;
    ExternalConfig cfg_;
    ScriptLog log_;
    std::unique_ptr<Process> proc_;
};

SolverAnswer decideExternal(const ValidityQuery& q, const ExternalConfig& cfg);

struct SolverConfig {
    BuiltinConfig builtin;
    std::optional<ExternalConfig> external;
    ScriptLog scriptLog;
};

/// Routing policy: Bool-only queries go to enumeration; otherwise bounded
/// refutation first, then the external solver, else Unknown. A Valid answer
/// is always backed by enumeration or an unsat result.
class Solver {
public:
    Solver(Theory theory, SolverConfig cfg);
    ~Solver();

    SolverAnswer decide(const ValidityQuery& q);
    bool hasExternal() const { return cfg_.external.has_value(); }
    const SolverConfig& config() const { return cfg_; }
    const Theory& theory() const { return theory_; }

private:
    Theory theory_;
    SolverConfig cfg_;
    std::unique_ptr<SmtSession> session_;
};

/// Evaluates the query's matrix under a full assignment of universals and
/// existentials. Used for counterexample replay.
bool holdsUnder(const Theory& th, const ValidityQuery& q, const Substitution& assignment);

}  // namespace lctrs
