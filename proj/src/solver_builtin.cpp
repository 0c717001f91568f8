#include <algorithm>

#include "lctrs/solver.hpp"

namespace lctrs {

const char* toString(SolverAnswer::Kind k) {
    switch (k) {
        case SolverAnswer::Kind::Valid: return "valid";
        case SolverAnswer::Kind::Invalid: return "invalid";
        case SolverAnswer::Kind::Unknown: return "unknown";
    }
    return "?";
}

std::string toString(const ValidityQuery& q) {
    std::string out;
    auto binder = [&](const char* q, const std::vector<Var>& xs) {
        if (xs.empty()) return;
        out += q;
        for (const auto& x : xs) out += " " + x.name + ":" + x.sort.name;
        out += ". ";
    };
    binder("forall", q.universal);
    binder("exists", q.existential);
    if (q.disjuncts.empty()) return out + "false";
    for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
        if (i) out += " \\/ ";
        out += "(" + toString(q.disjuncts[i]) + ")";
    }
    return out;
}

bool holdsUnder(const Theory& th, const ValidityQuery& q, const Substitution& assignment) {
    for (const auto& d : q.disjuncts) {
        Value v = evaluate(th, apply(d, assignment));
        if (v.asBool()) return true;
    }
    return false;
}

namespace {

std::vector<Var> occurring(const ValidityQuery& q, const std::vector<Var>& among) {
    std::vector<Var> present;
    for (const auto& d : q.disjuncts) collectVars(d, present);
    std::vector<Var> out;
    for (const auto& x : among)
        if (std::find(present.begin(), present.end(), x) != present.end()) out.push_back(x);
    return out;
}

std::vector<Value> searchDomain(const Sort& s, long long range) {
    std::vector<Value> out;
    if (s == boolSort()) return {Value(false), Value(true)};
    if (s == intSort()) {
        out.push_back(Value::integer(0));
        for (long long k = 1; k <= range; ++k) {
            out.push_back(Value::integer(k));
            out.push_back(Value::integer(-k));
        }
        return out;
    }
    out.push_back(Value(IntArray{}));
    for (long long a = -2; a <= 2; ++a) out.push_back(Value(IntArray{BigInt(a)}));
    for (long long a = -1; a <= 1; ++a)
        for (long long b = -1; b <= 1; ++b) out.push_back(Value(IntArray{BigInt(a), BigInt(b)}));
    return out;
}

Value defaultValue(const Sort& s) {
    if (s == boolSort()) return Value(false);
    if (s == intSort()) return Value::integer(0);
    return Value(IntArray{});
}

// Odometer over the cartesian product of `domains`; calls `visit` until it
// returns true. Returns whether some visit returned true.
template <typename F>
bool forEachAssignment(const std::vector<std::vector<Value>>& domains, std::size_t& budget, bool& exhausted,
                       F&& visit) {
    std::vector<std::size_t> idx(domains.size(), 0);
    for (const auto& d : domains)
        if (d.empty()) return false;
    while (true) {
        if (budget == 0) {
            exhausted = true;
            return false;
        }
        --budget;
        if (visit(idx)) return true;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
        if (k == idx.size()) return false;
    }
}

}  // namespace

SolverAnswer decideBuiltin(const Theory& th, const ValidityQuery& q, const BuiltinConfig& cfg) {
    auto univ = occurring(q, q.universal);
    auto exist = occurring(q, q.existential);
    auto isBool = [](const Var& x) { return x.sort == boolSort(); };
    bool exact = std::all_of(univ.begin(), univ.end(), isBool);
    if (!std::all_of(exist.begin(), exist.end(), isBool)) {
        return SolverAnswer::unknown("existential variable over an unbounded sort", "builtin");
    }

    std::vector<std::vector<Value>> udom, edom;
    for (const auto& x : univ) udom.push_back(searchDomain(x.sort, cfg.intRange));
    for (const auto& y : exist) edom.push_back(searchDomain(y.sort, cfg.intRange));

    std::size_t budget = cfg.maxAssignments;
    bool exhausted = false;
    std::optional<Substitution> cex;
    forEachAssignment(udom, budget, exhausted, [&](const std::vector<std::size_t>& ui) {
        Substitution base;
        for (std::size_t i = 0; i < univ.size(); ++i) base.bind(univ[i], th.valueTerm(udom[i][ui[i]]));
        std::size_t inner = SIZE_MAX;
        bool innerExhausted = false;
        bool witnessed = forEachAssignment(edom, inner, innerExhausted, [&](const std::vector<std::size_t>& ei) {
            Substitution full = base;
            for (std::size_t j = 0; j < exist.size(); ++j) full.bind(exist[j], th.valueTerm(edom[j][ei[j]]));
            return holdsUnder(th, q, full);
        });
        if (!witnessed) cex = base;
        return !witnessed;
    });

    if (cex) {
        SolverAnswer ans{SolverAnswer::Kind::Invalid, {}, {}, "builtin"};
        for (const auto& x : q.universal) {
            const Term* img = cex->lookup(x);
            ans.counterexample.emplace_back(x, img ? valueOf(*img) : defaultValue(x.sort));
        }
        return ans;
    }
    if (exhausted) return SolverAnswer::unknown("assignment budget exhausted", "builtin");
    if (!exact) return SolverAnswer::unknown("no counterexample within bounds; integer sorts are unbounded", "builtin");
    return SolverAnswer::valid("builtin");
}

ValidityQuery eliminateDefinedExistentials(const Theory& th, const ValidityQuery& q) {
    ValidityQuery out{q.universal, {}, {}};
    SymbolRef conj = th.calcByName("/\\").front();
    for (const auto& d : q.disjuncts) {
        auto parts = conjuncts(d);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < parts.size() && !progress; ++i) {
                const Term& c = parts[i];
                if (c.isVar() || c.symbol()->op != TheoryOp::Eq) continue;
                for (int side = 0; side < 2; ++side) {
                    const Term& y = c.arg(side);
                    const Term& e = c.arg(1 - side);
                    if (!y.isVar() || occurs(y.var(), e)) continue;
                    if (std::find(q.existential.begin(), q.existential.end(), y.var()) == q.existential.end())
                        continue;
                    Substitution one{{y.var(), e}};
                    std::vector<Term> rest;
                    for (std::size_t j = 0; j < parts.size(); ++j)
                        if (j != i) rest.push_back(apply(parts[j], one));
                    parts = std::move(rest);
                    progress = true;
                    break;
                }
            }
        }
        Term merged = th.trueTerm();
        for (std::size_t i = 0; i < parts.size(); ++i) merged = i == 0 ? parts[0] : Term::apply(conj, {merged, parts[i]});
        out.disjuncts.push_back(merged);
    }
    out.existential = occurring(out, q.existential);
    return out;
}

}  // namespace lctrs
