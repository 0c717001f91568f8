#include "lctrs/system.hpp"

#include <algorithm>
#include <unordered_map>

namespace lctrs {

std::vector<Var> Rule::lvars() const {
    std::vector<Var> out = vars(constraint);
    for (const auto& x : vars(rhs))
        if (!occurs(x, lhs) && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    return out;
}

std::vector<Var> Rule::allVars() const {
    std::vector<Var> out;
    collectVars(lhs, out);
    collectVars(rhs, out);
    collectVars(constraint, out);
    return out;
}

std::string toString(const Rule& r) {
    std::string out = toString(r.lhs) + " -> " + toString(r.rhs);
    bool trivial = r.constraint.isValue() && valueOf(r.constraint) == Value(true);
    if (!trivial) out += " [" + toString(r.constraint) + "]";
    return out;
}

namespace {
bool alphaWalk(const Term& a, const Term& b, std::unordered_map<std::uint64_t, std::uint64_t>& fwd,
               std::unordered_map<std::uint64_t, std::uint64_t>& bwd) {
    if (a.isVar() != b.isVar()) return false;
    if (a.isVar()) {
        if (a.sort() != b.sort()) return false;
        auto [f, fnew] = fwd.emplace(a.var().id, b.var().id);
        auto [g, gnew] = bwd.emplace(b.var().id, a.var().id);
        return f->second == b.var().id && g->second == a.var().id;
    }
    if (!sameSymbol(a.symbol(), b.symbol())) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!alphaWalk(a.arg(i), b.arg(i), fwd, bwd)) return false;
    return true;
}
}  // namespace

bool alphaEquivalent(const Rule& a, const Rule& b) {
    std::unordered_map<std::uint64_t, std::uint64_t> fwd, bwd;
    return a.isCalc == b.isCalc && alphaWalk(a.lhs, b.lhs, fwd, bwd) && alphaWalk(a.rhs, b.rhs, fwd, bwd) &&
           alphaWalk(a.constraint, b.constraint, fwd, bwd);
}

Rule renameApart(const Rule& r, VarFactory& fresh) {
    Substitution ren;
    for (const auto& x : r.allVars()) ren.bind(x, Term::variable(fresh.freshLike(x)));
    return Rule{apply(r.lhs, ren), apply(r.rhs, ren), apply(r.constraint, ren), r.isCalc};
}

std::vector<Rule> calcRules(const Theory& th, VarFactory& fresh) {
    std::vector<Rule> out;
    for (const auto& f : th.calcSymbols()) {
        std::vector<Term> xs;
        for (std::size_t i = 0; i < f->arity(); ++i)
            xs.push_back(Term::variable(fresh.fresh("x" + std::to_string(i + 1), f->inputs[i])));
        Term lhs = Term::apply(f, xs);
        Term y = Term::variable(fresh.fresh("y", f->output));
        SymbolRef eq;
        for (const auto& g : th.calcByName("="))
            if (g->inputs.front() == f->output) eq = g;
        out.push_back(Rule{lhs, y, Term::apply(eq, {y, lhs}), true});
    }
    return out;
}

Lctrs::Lctrs(Theory theory, std::vector<Sort> userSorts, std::vector<SymbolRef> termSymbols,
             std::vector<Rule> rules, std::uint64_t firstFreeVar)
    : theory_(std::move(theory)),
      userSorts_(std::move(userSorts)),
      termSymbols_(std::move(termSymbols)),
      rules_(std::move(rules)),
      firstFreeVar_(firstFreeVar) {
    for (const auto& s : userSorts_)
        if (theory_.isTheorySort(s)) throw SystemError("sort " + s.name + " is already a theory sort");
    for (const auto& f : termSymbols_) {
        if (f->inTheory() && !f->isValue())
            throw SystemError("symbol '" + f->name + "' is in both signatures but is not a value");
        if (!theory_.calcByName(f->name).empty())
            throw SystemError("symbol '" + f->name + "' clashes with a theory symbol");
        for (const auto& s : f->inputs)
            if (!hasSort(s)) throw SystemError("symbol '" + f->name + "' uses undeclared sort " + s.name);
        if (!hasSort(f->output)) throw SystemError("symbol '" + f->name + "' uses undeclared sort " + f->output.name);
    }
    for (const auto& r : rules_) {
        validateRule(r);
        const auto& root = r.root();
        if (std::none_of(defined_.begin(), defined_.end(), [&](const SymbolRef& g) { return sameSymbol(g, root); }))
            defined_.push_back(root);
        for (const auto& x : r.allVars()) firstFreeVar_ = std::max(firstFreeVar_, x.id + 1);
    }
    VarFactory fresh(firstFreeVar_);
    calc_ = lctrs::calcRules(theory_, fresh);
    firstFreeVar_ = fresh.peek();
}

void Lctrs::validateRule(const Rule& r) const {
    if (r.isCalc) throw SystemError("calculation rules are derived, not supplied");
    if (r.lhs.isVar()) throw SystemError("left-hand side of " + toString(r) + " is a variable");
    if (r.lhs.sort() != r.rhs.sort())
        throw SystemError("sides of " + toString(r) + " have different sorts (" + r.lhs.sort().name + " vs " +
                          r.rhs.sort().name + ")");
    if (isLogical(r.lhs)) throw SystemError("left-hand side of " + toString(r) + " is a logical term");
    if (r.constraint.sort() != boolSort() || !isLogical(r.constraint))
        throw SystemError("constraint of " + toString(r) + " is not a logical term of sort Bool");
}

std::vector<Sort> Lctrs::allSorts() const {
    std::vector<Sort> out = theory_.sorts();
    out.insert(out.end(), userSorts_.begin(), userSorts_.end());
    return out;
}

bool Lctrs::hasSort(const Sort& s) const {
    return theory_.isTheorySort(s) || std::find(userSorts_.begin(), userSorts_.end(), s) != userSorts_.end();
}

std::vector<const Rule*> Lctrs::allRules() const {
    std::vector<const Rule*> out;
    for (const auto& r : rules_) out.push_back(&r);
    for (const auto& r : calc_) out.push_back(&r);
    return out;
}

SymbolRef Lctrs::findTermSymbol(const std::string& name) const {
    for (const auto& f : termSymbols_)
        if (f->name == name) return f;
    return nullptr;
}

bool Lctrs::isDefined(const FunSymbol& f) const {
    return std::any_of(defined_.begin(), defined_.end(), [&](const SymbolRef& g) { return sameSymbol(*g, f); });
}

bool Lctrs::isConstructor(const FunSymbol& f) const {
    if (f.isValue()) return true;
    return f.inTerms() && !isDefined(f);
}

bool Lctrs::isConstructorTerm(const Term& t) const {
    if (t.isVar()) return true;
    if (!isConstructor(*t.symbol())) return false;
    return std::all_of(t.args().begin(), t.args().end(), [&](const Term& a) { return isConstructorTerm(a); });
}

std::vector<SymbolRef> Lctrs::nonValueConstructors(const Sort& s) const {
    std::vector<SymbolRef> out;
    for (const auto& f : termSymbols_)
        if (!f->isValue() && f->output == s && !isDefined(*f)) out.push_back(f);
    return out;
}

Lctrs Lctrs::withRules(std::vector<Rule> rules, std::uint64_t firstFreeVar) const {
    return Lctrs(theory_, userSorts_, termSymbols_, std::move(rules), std::max(firstFreeVar, firstFreeVar_));
}

bool respectsRule(const Theory& th, const Substitution& gamma, const Rule& r) {
    for (const auto& x : r.lvars()) {
        const Term* img = gamma.lookup(x);
        if (!img || !img->isValue()) return false;
    }
    return respects(th, gamma, r.constraint);
}

namespace {

// Binds open variables that the constraint pins down through an equation
// `z = e` (either orientation) with e ground after substitution.
void forceByEquations(const Theory& th, const Term& constraint, Substitution& gamma, std::vector<Var>& open) {
    bool changed = true;
    while (changed && !open.empty()) {
        changed = false;
        for (const auto& c : conjuncts(apply(constraint, gamma))) {
            if (c.isVar() || c.symbol()->op != TheoryOp::Eq) continue;
            for (int side = 0; side < 2 && !changed; ++side) {
                const Term& z = c.arg(side);
                const Term& e = c.arg(1 - side);
                if (!z.isVar() || !e.isGround() || !isLogical(e)) continue;
                auto it = std::find(open.begin(), open.end(), z.var());
                if (it == open.end()) continue;
                gamma.bind(z.var(), th.valueTerm(evaluate(th, e)));
                open.erase(it);
                changed = true;
            }
            if (changed) break;
        }
    }
}

std::vector<Value> witnessDomain(const Sort& s) {
    std::vector<Value> out;
    if (s == boolSort()) {
        out = {Value(false), Value(true)};
    } else if (s == intSort()) {
        out.push_back(Value::integer(0));
        for (long long k = 1; k <= 16; ++k) {
            out.push_back(Value::integer(k));
            out.push_back(Value::integer(-k));
        }
    } else if (s == arraySort()) {
        out.push_back(Value(IntArray{}));
        for (long long a = -2; a <= 2; ++a) out.push_back(Value(IntArray{BigInt(a)}));
        for (long long a = -1; a <= 1; ++a)
            for (long long b = -1; b <= 1; ++b) out.push_back(Value(IntArray{BigInt(a), BigInt(b)}));
    }
    return out;
}

// Bounded search for values of `open` under which the constraint holds.
bool searchWitness(const Theory& th, const Rule& r, Substitution& gamma, const std::vector<Var>& open) {
    std::vector<std::vector<Value>> domains;
    for (const auto& x : open) {
        domains.push_back(witnessDomain(x.sort));
        if (domains.back().empty()) return false;
    }
    std::vector<std::size_t> idx(open.size(), 0);
    for (std::size_t budget = 0; budget < 200000; ++budget) {
        Substitution trial = gamma;
        for (std::size_t i = 0; i < open.size(); ++i) trial.bind(open[i], th.valueTerm(domains[i][idx[i]]));
        if (respectsRule(th, trial, r)) {
            gamma = std::move(trial);
            return true;
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
        if (k == idx.size()) return false;
    }
    return false;
}

std::optional<RewriteStep> tryRule(const Lctrs& sys, const Term& t, const Position& p, const Term& sub,
                                   const Rule& r, const Choices* choices) {
    Substitution gamma;
    if (!matchInto(r.lhs, sub, gamma)) return std::nullopt;
    std::vector<Var> open;
    for (const auto& x : r.lvars()) {
        if (const Term* img = gamma.lookup(x)) {
            if (!img->isValue()) return std::nullopt;
        } else {
            open.push_back(x);
        }
    }
    const Theory& th = sys.theory();
    forceByEquations(th, r.constraint, gamma, open);
    if (choices) {
        for (auto it = open.begin(); it != open.end();) {
            auto c = choices->find(it->name);
            if (c != choices->end() && sortOfValue(c->second) == it->sort) {
                gamma.bind(*it, th.valueTerm(c->second));
                it = open.erase(it);
            } else {
                ++it;
            }
        }
    }
    if (open.empty()) {
        if (!respectsRule(th, gamma, r)) return std::nullopt;
    } else if (!searchWitness(th, r, gamma, open)) {
        return std::nullopt;
    }
    RewriteStep step{p, &r, gamma, t, replaceAt(t, p, apply(r.rhs, gamma)), open};
    return step;
}

void postOrder(const Term& t, Position& cur, std::vector<Position>& out) {
    if (!t.isVar())
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            cur.push_back(i);
            postOrder(t.arg(i), cur, out);
            cur.pop_back();
        }
    out.push_back(cur);
}

}  // namespace

std::vector<RewriteStep> findRedexesAt(const Lctrs& sys, const Term& t, const Position& p) {
    std::vector<RewriteStep> out;
    const Term& sub = subtermAt(t, p);
    if (sub.isVar()) return out;
    for (const Rule* r : sys.allRules())
        if (auto step = tryRule(sys, t, p, sub, *r, nullptr)) out.push_back(std::move(*step));
    return out;
}

std::vector<RewriteStep> findRedexes(const Lctrs& sys, const Term& t) {
    std::vector<RewriteStep> out;
    for (const auto& p : positions(t)) {
        auto here = findRedexesAt(sys, t, p);
        std::move(here.begin(), here.end(), std::back_inserter(out));
    }
    return out;
}

std::optional<RewriteStep> rewriteStep(const Lctrs& sys, const Term& t, Strategy strategy, const Choices* choices) {
    std::vector<Position> order;
    if (strategy == Strategy::LeftmostInnermost) {
        Position cur;
        postOrder(t, cur, order);
    } else {
        order = positions(t);
    }
    for (const auto& p : order) {
        const Term& sub = subtermAt(t, p);
        if (sub.isVar()) continue;
        for (const Rule* r : sys.allRules()) {
            auto step = tryRule(sys, t, p, sub, *r, choices);
            if (!step) continue;
            if (step->needsChoice()) {
                std::string names;
                for (const auto& x : step->unresolved) names += (names.empty() ? "" : ", ") + x.name;
                throw ChoiceRequired("rule " + toString(*r) + " at " + toString(p) +
                                     " needs explicit values for: " + names);
            }
            return step;
        }
    }
    return std::nullopt;
}

NormalizeResult normalize(const Lctrs& sys, const Term& t, Strategy strategy, std::size_t maxSteps,
                          const Choices* choices) {
    NormalizeResult res{t, {}, false};
    while (true) {
        auto step = rewriteStep(sys, res.result, strategy, choices);
        if (!step) return res;
        if (res.trace.size() == maxSteps) {
            res.truncated = true;
            return res;
        }
        res.result = step->after;
        res.trace.push_back(std::move(*step));
    }
}

}  // namespace lctrs
