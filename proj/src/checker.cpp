#include "lctrs/checker.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace lctrs {

const char* toString(Flag f) {
    switch (f) {
        case Flag::Either: return "either";
        case Flag::Value: return "value";
        case Flag::Term: return "term";
    }
    return "?";
}

const char* toString(OkResult r) {
    switch (r) {
        case OkResult::True: return "true";
        case OkResult::False: return "false";
        case OkResult::Unknown: return "unknown";
    }
    return "?";
}

const char* toString(OkCase c) {
    switch (c) {
        case OkCase::Empty: return "empty";
        case OkCase::Base: return "base";
        case OkCase::EitherTerm: return "either-term";
        case OkCase::EitherValue: return "either-value";
        case OkCase::EitherSplit: return "either-split";
        case OkCase::LiftValue: return "lift-value";
        case OkCase::DropColumn: return "drop-column";
        case OkCase::Expand: return "expand";
    }
    return "?";
}

const char* toString(QrResult r) {
    switch (r) {
        case QrResult::QuasiReductive: return "quasi-reductive";
        case QrResult::NotProven: return "not-proven";
        case QrResult::NotQuasiReductive: return "not-quasi-reductive";
        case QrResult::Ineligible: return "ineligible";
    }
    return "?";
}

const char* toString(SymbolVerdict::Status s) {
    switch (s) {
        case SymbolVerdict::Status::Ok: return "ok";
        case SymbolVerdict::Status::Failed: return "failed";
        case SymbolVerdict::Status::Unknown: return "unknown";
    }
    return "?";
}

std::string toString(const OkProblem& p) {
    std::string out = "x = (";
    for (std::size_t i = 0; i < p.xVars.size(); ++i) out += (i ? ", " : "") + p.xVars[i].name;
    out += "), A = {";
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
        out += r ? ", ((" : "((";
        for (std::size_t i = 0; i < p.rows[r].terms.size(); ++i) out += (i ? ", " : "") + toString(p.rows[r].terms[i]);
        out += "), " + toString(p.rows[r].constraint) + ")";
    }
    return out + "}";
}

Measure measureOf(const OkProblem& p, Flag b) {
    Measure m;
    for (const auto& row : p.rows)
        for (const auto& t : row.terms) {
            m.symbols += t.symbolCount();
            m.variables += t.varOccurrences();
        }
    m.flagRank = b == Flag::Either ? 1 : 0;
    return m;
}

OkStats& OkStats::operator+=(const OkStats& o) {
    calls += o.calls;
    measureChecks += o.measureChecks;
    measureViolations += o.measureViolations;
    solverQueries += o.solverQueries;
    vacuousExpansions += o.vacuousExpansions;
    maxDepth = std::max(maxDepth, o.maxDepth);
    return *this;
}

namespace {

OkResult conj(OkResult a, OkResult b) {
    if (a == OkResult::False || b == OkResult::False) return OkResult::False;
    if (a == OkResult::Unknown || b == OkResult::Unknown) return OkResult::Unknown;
    return OkResult::True;
}

}  // namespace

OkChecker::OkChecker(const Lctrs& sys, Solver& solver, VarFactory& fresh, OkTrace trace)
    : sys_(sys), solver_(solver), fresh_(fresh), trace_(std::move(trace)) {}

void OkChecker::emit(OkEvent e) {
    if (trace_) trace_(e);
}

OkResult OkChecker::ok(const OkProblem& p, Flag b) {
    for (const auto& row : p.rows) {
        if (row.terms.size() != p.columns()) throw CheckerError("row width does not match the column sorts");
        for (std::size_t i = 0; i < row.terms.size(); ++i)
            if (row.terms[i].sort() != p.colSorts[i]) throw CheckerError("row term has the wrong sort");
    }
    return run(p, b, 0);
}

OkResult OkChecker::recurse(const OkProblem& child, Flag b, const Measure& parent, std::size_t depth) {
    ++stats_.measureChecks;
    Measure m = measureOf(child, b);
    if (!(m < parent)) {
        ++stats_.measureViolations;
        throw CheckerError("termination measure did not decrease");
    }
    return run(child, b, depth + 1);
}

OkResult OkChecker::run(const OkProblem& p, Flag b, std::size_t depth) {
    ++stats_.calls;
    stats_.maxDepth = std::max(stats_.maxDepth, depth);
    const Measure here = measureOf(p, b);
    OkEvent ev{{}, depth, OkCase::Base, b, here, p.xVars.size(), p.columns(), p.rows.size(), {}, {}, {}};

    if (p.rows.empty()) {
        ev.kase = OkCase::Empty;
        emit(ev);
        if (!failure_) {
            ValidityQuery q{p.xVars, {}, {}};
            failure_ = OkFailure{p, q, {SolverAnswer::Kind::Invalid, {}, "no rule covers this case", "checker"}};
        }
        return OkResult::False;
    }

    if (p.columns() == 0) {
        ValidityQuery q{p.xVars, {}, {}};
        std::vector<Var> all;
        for (const auto& row : p.rows) {
            collectVars(row.constraint, all);
            q.disjuncts.push_back(row.constraint);
        }
        for (const auto& y : all)
            if (std::find(p.xVars.begin(), p.xVars.end(), y) == p.xVars.end()) q.existential.push_back(y);
        ++stats_.solverQueries;
        SolverAnswer ans = solver_.decide(q);
        ev.query = q;
        ev.answer = ans;
        emit(ev);
        if (ans.isValid()) return OkResult::True;
        if (!failure_) failure_ = OkFailure{p, q, ans};
        return ans.isInvalid() ? OkResult::False : OkResult::Unknown;
    }

    const Sort& kappa = p.colSorts.front();
    auto firstIsVar = [](const OkRow& r) { return r.terms.front().isVar(); };

    if (b == Flag::Either) {
        if (!sys_.isTheorySort(kappa)) {
            ev.kase = OkCase::EitherTerm;
            emit(ev);
            return recurse(p, Flag::Term, here, depth);
        }
        if (sys_.nonValueConstructors(kappa).empty()) {
            ev.kase = OkCase::EitherValue;
            emit(ev);
            return recurse(p, Flag::Value, here, depth);
        }
        ev.kase = OkCase::EitherSplit;
        emit(ev);
        OkProblem values{p.xVars, p.colSorts, {}};
        OkProblem terms{p.xVars, p.colSorts, {}};
        for (const auto& row : p.rows) {
            const Term& s1 = row.terms.front();
            if (s1.isVar()) values.rows.push_back(row);
            if (!s1.isVar() || !occurs(s1.var(), row.constraint)) terms.rows.push_back(row);
        }
        OkResult left = recurse(values, Flag::Value, here, depth);
        if (left == OkResult::False) return left;
        return conj(left, recurse(terms, Flag::Term, here, depth));
    }

    if (b == Flag::Value) {
        if (!std::all_of(p.rows.begin(), p.rows.end(), firstIsVar))
            throw CheckerError("value case entered with a non-variable in the first column");
        ev.kase = OkCase::LiftValue;
        emit(ev);
        Var lifted = fresh_.fresh("x" + std::to_string(p.xVars.size() + 1), kappa);
        OkProblem child{p.xVars, {p.colSorts.begin() + 1, p.colSorts.end()}, {}};
        child.xVars.push_back(lifted);
        for (const auto& row : p.rows) {
            Substitution sub{{row.terms.front().var(), Term::variable(lifted)}};
            child.rows.push_back({{row.terms.begin() + 1, row.terms.end()}, apply(row.constraint, sub)});
        }
        return recurse(child, Flag::Either, here, depth);
    }

    // Flag::Term
    if (std::all_of(p.rows.begin(), p.rows.end(), firstIsVar)) {
        for (const auto& row : p.rows)
            if (occurs(row.terms.front().var(), row.constraint))
                throw CheckerError("term case with a constrained variable in the first column");
        ev.kase = OkCase::DropColumn;
        emit(ev);
        OkProblem child{p.xVars, {p.colSorts.begin() + 1, p.colSorts.end()}, {}};
        for (const auto& row : p.rows) child.rows.push_back({{row.terms.begin() + 1, row.terms.end()}, row.constraint});
        return recurse(child, Flag::Either, here, depth);
    }

    auto cons = sys_.nonValueConstructors(kappa);
    ev.kase = OkCase::Expand;
    for (const auto& f : cons) ev.constructors.push_back(f->name);
    emit(ev);
    for (const auto& row : p.rows) {
        const Term& s1 = row.terms.front();
        if (s1.isVar()) {
            if (occurs(s1.var(), row.constraint))
                throw CheckerError("term case with a constrained variable in the first column");
        } else if (s1.symbol()->isValue() || !sys_.isConstructor(*s1.symbol())) {
            throw CheckerError("first column contains " + toString(s1) + ", which is not a non-value constructor term");
        }
    }
    if (cons.empty()) {
        ++stats_.vacuousExpansions;
        warnings_.push_back("sort " + kappa.name + " has no non-value constructors; expansion is vacuously true");
        return OkResult::True;
    }

    OkResult acc = OkResult::True;
    for (const auto& f : cons) {
        OkProblem child{p.xVars, f->inputs, {}};
        child.colSorts.insert(child.colSorts.end(), p.colSorts.begin() + 1, p.colSorts.end());
        for (const auto& row : p.rows) {
            const Term& s1 = row.terms.front();
            std::vector<Term> u;
            Term psi = row.constraint;
            if (s1.isVar()) {
                std::vector<Term> ys;
                for (const auto& mu : f->inputs) ys.push_back(Term::variable(fresh_.fresh("y", mu)));
                u = ys;
                psi = apply(row.constraint, Substitution{{s1.var(), Term::apply(f, ys)}});
            } else if (sameSymbol(s1.symbol(), f)) {
                u.assign(s1.args().begin(), s1.args().end());
            } else {
                continue;
            }
            u.insert(u.end(), row.terms.begin() + 1, row.terms.end());
            child.rows.push_back({std::move(u), psi});
        }
        acc = conj(acc, recurse(child, Flag::Either, here, depth));
        if (acc == OkResult::False) return acc;
    }
    return acc;
}

OkProblem buildAf(const Lctrs& sys, const FunSymbol& f, VarFactory& fresh) {
    if (!sys.isDefined(f) && !f.isCalc())
        throw CheckerError("symbol '" + f.name + "' is neither defined nor a calculation symbol");
    OkProblem p{{}, f.inputs, {}};
    for (const Rule* r : sys.allRules()) {
        if (!sameSymbol(*r->root(), f)) continue;
        Rule renamed = renameApart(*r, fresh);
        OkRow row{{renamed.lhs.args().begin(), renamed.lhs.args().end()}, renamed.constraint};
        if (!isLinear(renamed.lhs)) throw CheckerError("rule " + toString(*r) + " is not left-linear");
        for (const auto& t : row.terms) {
            if (!sys.isConstructorTerm(t)) throw CheckerError("rule " + toString(*r) + " is not a constructor rule");
            if (!r->isCalc)
                for (const auto& pos : positions(t))
                    if (subtermAt(t, pos).isValue())
                        throw CheckerError("rule " + toString(*r) + " has a value in its left-hand side");
        }
        p.rows.push_back(std::move(row));
    }
    return p;
}

namespace {

struct SymbolJob {
    SymbolRef symbol;
    SymbolVerdict verdict;
    OkStats stats;
    std::vector<std::string> warnings;
    std::vector<OkEvent> events;
};

// Each symbol draws fresh variables from its own id block so results do not
// depend on scheduling.
constexpr std::uint64_t kIdBlock = std::uint64_t{1} << 32;

void runJob(const Lctrs& sys, Solver& solver, SymbolJob& job, std::uint64_t firstId, const OkTrace& live) {
    VarFactory fresh(firstId);
    OkTrace sink = [&job, &live](const OkEvent& e) {
        OkEvent tagged = e;
        tagged.symbol = symbolLabel(*job.symbol);
        if (live) live(tagged);
        else job.events.push_back(std::move(tagged));
    };
    OkChecker checker(sys, solver, fresh, sink);
    OkProblem af = buildAf(sys, *job.symbol, fresh);
    OkResult r = checker.ok(af, Flag::Either);
    job.verdict.symbol = job.symbol;
    job.verdict.status = r == OkResult::True    ? SymbolVerdict::Status::Ok
                         : r == OkResult::False ? SymbolVerdict::Status::Failed
                                                : SymbolVerdict::Status::Unknown;
    job.verdict.failure = checker.firstFailure();
    job.stats = checker.stats();
    job.warnings = checker.warnings();
}

}  // namespace

std::string symbolLabel(const FunSymbol& f) {
    if (f.op == TheoryOp::Eq || f.op == TheoryOp::Neq) return f.name + ":" + f.inputs.front().name;
    return f.name;
}

QrVerdict checkQuasiReductivity(const Lctrs& sys, const SolverConfig& solverCfg, const CheckOptions& opts) {
    QrVerdict v;
    v.madeValueFree = !checkLeftValueFree(sys).ok;
    Lctrs lvf = makeLeftValueFree(sys);
    v.restrictions = checkRestrictions(lvf);
    if (!v.restrictions.eligible()) {
        v.result = QrResult::Ineligible;
        v.explanation = !v.restrictions.leftLinear.ok ? "system is not left-linear"
                        : !v.restrictions.constructorSound.ok
                            ? "system is not constructor-sound"
                            : "system is not left-value-free";
        return v;
    }

    auto restricted = restrictToConstructorRules(lvf);
    if (!restricted.sameConstructors()) {
        v.result = QrResult::NotQuasiReductive;
        v.lostDefined = restricted.lostDefined;
        v.explanation = "symbol '" + restricted.lostDefined.front()->name +
                        "' has only non-constructor rules, so it is stuck on constructor arguments";
        return v;
    }
    const Lctrs& target = restricted.system;

    std::vector<SymbolJob> jobs;
    for (const auto& f : target.definedSymbols()) jobs.push_back({f, {}, {}, {}, {}});
    for (const auto& f : target.theory().calcSymbols())
        if (!target.isDefined(*f)) jobs.push_back({f, {}, {}, {}, {}});

    const std::uint64_t base = (target.firstFreeVar() / kIdBlock + 1) * kIdBlock;
    unsigned workers = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(jobs.size())));
    if (workers == 1) {
        Solver solver(target.theory(), solverCfg);
        for (std::size_t i = 0; i < jobs.size(); ++i) runJob(target, solver, jobs[i], base + i * kIdBlock, opts.trace);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex errorMutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                Solver solver(target.theory(), solverCfg);
                for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
                    try {
                        runJob(target, solver, jobs[i], base + i * kIdBlock, {});
                    } catch (...) {
                        std::lock_guard lock(errorMutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
        if (opts.trace)
            for (const auto& job : jobs)
                for (const auto& e : job.events) opts.trace(e);
    }

    bool allOk = true;
    for (auto& job : jobs) {
        v.stats += job.stats;
        v.warnings.insert(v.warnings.end(), job.warnings.begin(), job.warnings.end());
        allOk = allOk && job.verdict.status == SymbolVerdict::Status::Ok;
        v.perSymbol.push_back(std::move(job.verdict));
    }
    v.result = allOk ? QrResult::QuasiReductive : QrResult::NotProven;
    v.explanation = allOk ? "every defined and calculation symbol covers all constructor arguments"
                          : "some symbol could not be shown to cover all constructor arguments";
    return v;
}

}  // namespace lctrs
