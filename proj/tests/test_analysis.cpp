#include <doctest.h>

#include <set>

#include "lctrs/analysis.hpp"
#include "lctrs/format.hpp"
#include "lctrs/oracle.hpp"
#include "support/harness.hpp"
#include "support/random_systems.hpp"

using namespace lctrs;
using lctrs::testing::readText;
using lctrs::testing::samplePath;

namespace {

Lctrs sample(const std::string& name) { return parseSystem(readText(samplePath(name + ".lctrs"))); }

bool hasSort(const std::vector<Sort>& v, const std::string& name) {
    for (const auto& s : v)
        if (s.name == name) return true;
    return false;
}

// Results of all root steps, as strings.
std::set<std::string> rootResults(const Lctrs& sys, const Term& t) {
    std::set<std::string> out;
    for (const auto& s : findRedexesAt(sys, t, Position{})) out.insert(toString(s.after));
    return out;
}

}  // namespace

TEST_CASE("left-linearity") {
    auto rep = checkLeftLinear(sample("addtoset"));
    CHECK_FALSE(rep.ok);
    CHECK(rep.offendingRules == std::vector<std::size_t>{1});
    CHECK(checkLeftLinear(sample("addtoset_constrained")).ok);
    CHECK_FALSE(checkRestrictions(sample("addtoset")).eligible());
}

TEST_CASE("constructor soundness") {
    for (const char* name : {"factorial", "array_sum", "lists", "nonconstructor"})
        CHECK(checkConstructorSound(sample(name)).ok);

    // B has only a recursive constructor; C has none at all; D's only
    // symbol is defined
    Lctrs sys = parseSystem(
        "THEORY ints\nSORTS A B C D\nSIGNATURE\n  a : A\n  s : B => B\n  d : D\n"
        "  f : B => A\n  g : C * Int => A\n  h : D => A\nRULES\n"
        "  f(x) -> a\n  g(x, n) -> a\n  h(x) -> a\n  d -> d\n");
    auto inhabited = inhabitedSorts(sys);
    CHECK(hasSort(inhabited, "A"));
    CHECK(hasSort(inhabited, "Int"));
    CHECK(hasSort(inhabited, "Bool"));
    CHECK_FALSE(hasSort(inhabited, "B"));
    CHECK_FALSE(hasSort(inhabited, "D"));
    auto rep = checkConstructorSound(sys);
    CHECK_FALSE(rep.ok);
    CHECK(hasSort(rep.uninhabited, "B"));
    CHECK(hasSort(rep.uninhabited, "C"));
    CHECK(hasSort(rep.uninhabited, "D"));
    CHECK_FALSE(hasSort(rep.uninhabited, "Int"));
}

TEST_CASE("left-value-freedom report and transformation") {
    Lctrs sys = parseSystem(
        "THEORY ints\nSIGNATURE\n  g : Int * Int => Int\nRULES\n"
        "  g(0, y) -> 1\n  g(x, 3) -> 2 [x > 0]\n  g(x, y) -> 0 [x < 0 \\/ x > 0 /\\ y != 3]\n");
    auto rep = checkLeftValueFree(sys);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.occurrences.size() == 2);
    CHECK(rep.occurrences[0].rule == 0);
    CHECK(rep.occurrences[0].position == Position{0});
    CHECK(rep.occurrences[0].value == Value::integer(0));
    CHECK(rep.occurrences[1].rule == 1);
    CHECK(rep.occurrences[1].position == Position{1});

    Lctrs lvf = makeLeftValueFree(sys);
    CHECK(checkLeftValueFree(lvf).ok);
    REQUIRE(lvf.rules().size() == 3);
    for (const auto& r : lvf.rules()) CHECK(isLinear(r.lhs));
    CHECK(toString(lvf.rules()[2]) == toString(sys.rules()[2]));

    VarFactory fresh(lvf.firstFreeVar());
    for (int a = -2; a <= 2; ++a)
        for (int b = 2; b <= 4; ++b) {
            Term t = parseTerm(sys, "g(" + std::to_string(a) + ", " + std::to_string(b) + ")", fresh);
            CHECK(rootResults(sys, t) == rootResults(lvf, t));
        }

    CHECK(checkLeftValueFree(sample("factorial")).ok);
}

TEST_CASE("left-value-free transformation keeps root steps on random systems") {
    lctrs::testing::RandomSystemOptions opts;
    opts.literalInLhs = 0.6;
    lctrs::testing::RandomSystemGen gen(7, opts);
    EnumBudget budget;
    budget.maxDepth = 2;
    budget.intMin = -2;
    budget.intMax = 2;
    int withValues = 0;
    for (int i = 0; i < 60; ++i) {
        Lctrs sys = gen.next();
        if (checkLeftValueFree(sys).ok) continue;
        ++withValues;
        Lctrs lvf = makeLeftValueFree(sys);
        CHECK(checkLeftValueFree(lvf).ok);
        CHECK(lvf.rules().size() == sys.rules().size());
        for (const auto& f : sys.definedSymbols()) {
            std::vector<std::vector<Term>> cols;
            for (const auto& s : f->inputs) cols.push_back(enumerateGroundConstructorTerms(sys, s, budget));
            // diagonal walk through the argument product keeps this cheap
            std::size_t longest = 0;
            for (const auto& c : cols) longest = std::max(longest, c.size());
            for (std::size_t k = 0; k < longest; ++k) {
                std::vector<Term> args;
                for (std::size_t j = 0; j < cols.size(); ++j) args.push_back(cols[j][(k + j) % cols[j].size()]);
                Term t = Term::apply(f, args);
                CHECK(rootResults(sys, t) == rootResults(lvf, t));
            }
        }
    }
    CHECK(withValues > 10);
}

TEST_CASE("restriction to constructor rules") {
    auto same = restrictToConstructorRules(sample("factorial"));
    CHECK(same.sameConstructors());
    CHECK(same.system.rules().size() == 2);

    Lctrs nc = sample("nonconstructor");
    auto r = restrictToConstructorRules(nc);
    REQUIRE(r.system.rules().size() == 1);
    CHECK(toString(r.system.rules()[0]) == "g(x) -> x");
    REQUIRE(r.lostDefined.size() == 1);
    CHECK(r.lostDefined[0]->name == "f");
    CHECK_FALSE(r.sameConstructors());
    CHECK(r.system.isConstructor(*r.system.findTermSymbol("f")));
}
