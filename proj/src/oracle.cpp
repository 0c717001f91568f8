#include "lctrs/oracle.hpp"

#include <algorithm>
#include <map>

namespace lctrs {

std::vector<IntArray> EnumBudget::defaultArrays() {
    std::vector<IntArray> out{{}};
    for (int a = 0; a <= 1; ++a) out.push_back({BigInt(a)});
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) out.push_back({BigInt(a), BigInt(b)});
    return out;
}

namespace {

class Enumerator {
public:
    Enumerator(const Lctrs& sys, const EnumBudget& budget) : sys_(sys), budget_(budget) {}

    // Terms of depth <= d, unsorted.
    const std::vector<Term>& upTo(const Sort& s, std::size_t d) {
        auto key = std::make_pair(s.name, d);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::vector<Term> out;
        if (d > 0) {
            for (const auto& v : valuesOf(s)) out.push_back(sys_.theory().valueTerm(v));
            for (const auto& f : sys_.nonValueConstructors(s)) {
                if (out.size() >= budget_.maxTerms) break;
                if (f->arity() == 0) {
                    out.push_back(Term::apply(f));
                    continue;
                }
                std::vector<const std::vector<Term>*> pools;
                bool empty = false;
                for (const auto& in : f->inputs) {
                    pools.push_back(&upTo(in, d - 1));
                    empty = empty || pools.back()->empty();
                }
                if (empty) continue;
                std::vector<std::size_t> idx(pools.size(), 0);
                while (out.size() < budget_.maxTerms) {
                    std::vector<Term> args;
                    for (std::size_t i = 0; i < pools.size(); ++i) args.push_back((*pools[i])[idx[i]]);
                    out.push_back(Term::apply(f, std::move(args)));
                    std::size_t k = idx.size();
                    while (k > 0 && ++idx[k - 1] == pools[k - 1]->size()) idx[--k] = 0;
                    if (k == 0) break;
                }
            }
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

private:
    std::vector<Value> valuesOf(const Sort& s) const {
        std::vector<Value> out;
        if (!sys_.isTheorySort(s)) return out;
        if (s == boolSort()) return {Value(false), Value(true)};
        if (s == intSort()) {
            for (BigInt n = budget_.intMin; n <= budget_.intMax; ++n) out.push_back(Value(n));
            return out;
        }
        for (const auto& a : budget_.arrayValues) out.push_back(Value(a));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    const Lctrs& sys_;
    const EnumBudget& budget_;
    std::map<std::pair<std::string, std::size_t>, std::vector<Term>> memo_;
};

}  // namespace

std::vector<Term> enumerateGroundConstructorTerms(const Lctrs& sys, const Sort& sort, const EnumBudget& budget) {
    Enumerator en(sys, budget);
    std::vector<Term> out = en.upTo(sort, budget.maxDepth);
    std::stable_sort(out.begin(), out.end(),
                     [](const Term& a, const Term& b) { return a.symbolCount() < b.symbolCount(); });
    return out;
}

OracleResult findStuckTerm(const Lctrs& sys, const EnumBudget& budget) {
    OracleResult res;
    std::vector<SymbolRef> symbols = sys.definedSymbols();
    for (const auto& f : sys.theory().calcSymbols())
        if (!sys.isDefined(*f)) symbols.push_back(f);

    std::map<std::string, std::vector<Term>> bySort;
    auto pool = [&](const Sort& s) -> const std::vector<Term>& {
        auto it = bySort.find(s.name);
        if (it == bySort.end()) it = bySort.emplace(s.name, enumerateGroundConstructorTerms(sys, s, budget)).first;
        return it->second;
    };

    const Position root;
    for (const auto& f : symbols) {
        std::vector<const std::vector<Term>*> pools;
        bool empty = false;
        for (const auto& in : f->inputs) {
            pools.push_back(&pool(in));
            empty = empty || pools.back()->empty();
        }
        if (empty) continue;
        std::vector<std::size_t> idx(pools.size(), 0);
        while (true) {
            if (res.examined >= budget.maxTerms) {
                res.truncated = true;
                return res;
            }
            std::vector<Term> args;
            for (std::size_t i = 0; i < pools.size(); ++i) args.push_back((*pools[i])[idx[i]]);
            Term t = Term::apply(f, std::move(args));
            ++res.examined;
            // Arguments are ground constructor terms, hence normal forms, so
            // only the root can be a redex.
            if (findRedexesAt(sys, t, root).empty()) {
                res.stuck = t;
                return res;
            }
            std::size_t k = idx.size();
            while (k > 0 && ++idx[k - 1] == pools[k - 1]->size()) idx[--k] = 0;
            if (k == 0) break;
        }
    }
    return res;
}

}  // namespace lctrs
