#include "lctrs/analysis.hpp"

#include <algorithm>

namespace lctrs {

LinearityReport checkLeftLinear(const Lctrs& sys) {
    LinearityReport rep;
    for (std::size_t i = 0; i < sys.rules().size(); ++i)
        if (!isLinear(sys.rules()[i].lhs)) rep.offendingRules.push_back(i);
    rep.ok = rep.offendingRules.empty();
    return rep;
}

std::vector<Sort> inhabitedSorts(const Lctrs& sys) {
    // Least fixpoint: theory sorts are inhabited by their values; a user sort
    // is inhabited once some constructor into it has inhabited inputs.
    std::vector<Sort> inhabited = sys.theory().sorts();
    auto known = [&](const Sort& s) { return std::find(inhabited.begin(), inhabited.end(), s) != inhabited.end(); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& f : sys.termSymbols()) {
            if (!sys.isConstructor(*f) || known(f->output)) continue;
            if (std::all_of(f->inputs.begin(), f->inputs.end(), known)) {
                inhabited.push_back(f->output);
                changed = true;
            }
        }
    }
    return inhabited;
}

InhabitationReport checkConstructorSound(const Lctrs& sys) {
    InhabitationReport rep;
    auto inhabited = inhabitedSorts(sys);
    for (const auto& f : sys.definedSymbols())
        for (const auto& s : f->inputs)
            if (std::find(inhabited.begin(), inhabited.end(), s) == inhabited.end() &&
                std::find(rep.uninhabited.begin(), rep.uninhabited.end(), s) == rep.uninhabited.end())
                rep.uninhabited.push_back(s);
    rep.ok = rep.uninhabited.empty();
    return rep;
}

ValueFreedomReport checkLeftValueFree(const Lctrs& sys) {
    ValueFreedomReport rep;
    for (std::size_t i = 0; i < sys.rules().size(); ++i) {
        const Term& lhs = sys.rules()[i].lhs;
        for (const auto& p : positions(lhs)) {
            const Term& sub = subtermAt(lhs, p);
            if (sub.isValue()) rep.occurrences.push_back({i, p, valueOf(sub)});
        }
    }
    rep.ok = rep.occurrences.empty();
    return rep;
}

RestrictionReport checkRestrictions(const Lctrs& sys) {
    return {checkLeftLinear(sys), checkConstructorSound(sys), checkLeftValueFree(sys)};
}

Lctrs makeLeftValueFree(const Lctrs& sys) {
    if (checkLeftValueFree(sys).ok) return sys;
    VarFactory fresh(sys.firstFreeVar());
    const Theory& th = sys.theory();
    std::vector<Rule> rules;
    for (const auto& r : sys.rules()) {
        Rule out = r;
        for (const auto& p : positions(r.lhs)) {
            const Term& sub = subtermAt(r.lhs, p);
            if (!sub.isValue()) continue;
            Term x = Term::variable(fresh.fresh("v", sub.sort()));
            out.lhs = replaceAt(out.lhs, p, x);
            SymbolRef eq;
            for (const auto& g : th.calcByName("="))
                if (g->inputs.front() == sub.sort()) eq = g;
            Term eqn = Term::apply(eq, {x, sub});
            bool trivial = out.constraint.isValue() && valueOf(out.constraint) == Value(true);
            out.constraint = trivial ? eqn : Term::apply(th.calcByName("/\\").front(), {out.constraint, eqn});
        }
        rules.push_back(std::move(out));
    }
    return sys.withRules(std::move(rules), fresh.peek());
}

ConstructorRestriction restrictToConstructorRules(const Lctrs& sys) {
    std::vector<Rule> kept;
    for (const auto& r : sys.rules()) {
        auto args = r.lhs.args();
        if (std::all_of(args.begin(), args.end(), [&](const Term& a) { return sys.isConstructorTerm(a); }))
            kept.push_back(r);
    }
    Lctrs restricted = sys.withRules(std::move(kept), sys.firstFreeVar());
    std::vector<SymbolRef> lost;
    for (const auto& f : sys.definedSymbols())
        if (!restricted.isDefined(*f)) lost.push_back(f);
    return {std::move(restricted), std::move(lost)};
}

}  // namespace lctrs
