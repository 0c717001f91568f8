#include <doctest.h>

#include "lctrs/checker.hpp"
#include "lctrs/format.hpp"
#include "support/harness.hpp"
#include "support/random_systems.hpp"

using namespace lctrs;
using lctrs::testing::externalSolver;
using lctrs::testing::readText;
using lctrs::testing::samplePath;

namespace {

Lctrs sample(const std::string& name) { return parseSystem(readText(samplePath(name + ".lctrs"))); }

SolverConfig builtinOnly() { return {}; }

std::optional<SolverConfig> withZ3() {
    std::string z3 = externalSolver();
    if (z3.empty()) return std::nullopt;
    SolverConfig cfg;
    cfg.external = ExternalConfig::forBinary(z3);
    return cfg;
}

const SymbolVerdict* verdictFor(const QrVerdict& v, const std::string& label) {
    for (const auto& s : v.perSymbol)
        if (symbolLabel(*s.symbol) == label) return &s;
    return nullptr;
}

struct TraceLine {
    std::string symbol;
    std::size_t depth;
    OkCase kase;
    Flag flag;
    Measure measure;
    friend bool operator==(const TraceLine&, const TraceLine&) = default;
};

std::vector<TraceLine> collect(const Lctrs& sys, const SolverConfig& cfg, unsigned jobs, QrVerdict* out = nullptr) {
    std::vector<TraceLine> lines;
    CheckOptions opts;
    opts.jobs = jobs;
    opts.trace = [&](const OkEvent& e) { lines.push_back({e.symbol, e.depth, e.kase, e.flag, e.measure}); };
    auto v = checkQuasiReductivity(sys, cfg, opts);
    if (out) *out = std::move(v);
    return lines;
}

}  // namespace

TEST_CASE("measure of a problem") {
    Lctrs lists = sample("lists");
    VarFactory fresh(lists.firstFreeVar());
    auto p = buildAf(lists, *lists.findTermSymbol("mem"), fresh);
    // mem(x, nil), mem(x, cons(y, ys)) twice
    REQUIRE(p.rows.size() == 3);
    CHECK(p.columns() == 2);
    CHECK(p.xVars.empty());
    auto m = measureOf(p, Flag::Either);
    CHECK(m.symbols == 3);
    CHECK(m.variables == 7);
    CHECK(m.flagRank == 1);
    CHECK(measureOf(p, Flag::Term).flagRank == 0);
    CHECK(measureOf(p, Flag::Value) < m);
    CHECK((Measure{2, 9, 1} < Measure{3, 0, 0}));
    CHECK((Measure{3, 1, 1} < Measure{3, 2, 0}));
}

TEST_CASE("A_f for user and calculation symbols") {
    Lctrs fact = sample("factorial");
    VarFactory fresh(fact.firstFreeVar());
    auto p = buildAf(fact, *fact.definedSymbols()[0], fresh);
    REQUIRE(p.rows.size() == 2);
    CHECK(p.colSorts == std::vector<Sort>{intSort()});
    // each row is renamed apart from the rules and from the other rows
    Var a = p.rows[0].terms[0].var();
    Var b = p.rows[1].terms[0].var();
    CHECK(a.id != b.id);
    CHECK(a.id >= fact.firstFreeVar());
    CHECK(vars(p.rows[0].constraint) == std::vector<Var>{a});
    CHECK(vars(p.rows[1].constraint) == std::vector<Var>{b});
    CHECK(toString(p.rows[0].constraint) == a.name + " <= 0");

    auto plus = fact.theory().calcByName("+").front();
    auto c = buildAf(fact, *plus, fresh);
    REQUIRE(c.rows.size() == 1);
    CHECK(c.columns() == 2);
    const auto& row = c.rows[0];
    std::string x1 = row.terms[0].var().name, x2 = row.terms[1].var().name;
    auto cv = vars(row.constraint);
    REQUIRE(cv.size() == 3);
    std::string y = cv[0].name;
    CHECK(toString(row.constraint) == y + " = " + x1 + " + " + x2);
    CHECK(toString(c) == "x = (), A = {((" + x1 + ", " + x2 + "), " + toString(row.constraint) + ")}");
}

TEST_CASE("labels of overloaded symbols") {
    Theory th = Theory::intArrays();
    std::vector<std::string> labels;
    for (const auto& f : th.calcByName("=")) labels.push_back(symbolLabel(*f));
    CHECK(labels == std::vector<std::string>{"=:Bool", "=:Int", "=:IntArray"});
    CHECK(symbolLabel(*th.calcByName("+").front()) == "+");
}

TEST_CASE("factorial: a trace of the recursion") {
    QrVerdict v;
    auto lines = collect(sample("factorial"), builtinOnly(), 1, &v);
    std::vector<TraceLine> fact;
    for (const auto& l : lines)
        if (l.symbol == "fact") fact.push_back(l);
    REQUIRE(fact.size() == 3);
    CHECK((fact[0] == TraceLine{"fact", 0, OkCase::EitherValue, Flag::Either, {0, 2, 1}}));
    CHECK((fact[1] == TraceLine{"fact", 1, OkCase::LiftValue, Flag::Value, {0, 2, 0}}));
    CHECK((fact[2] == TraceLine{"fact", 2, OkCase::Base, Flag::Either, {0, 0, 1}}));
    CHECK(v.stats.measureViolations == 0);
    CHECK(v.stats.measureChecks > 0);
}

TEST_CASE("factorial: builtin cannot prove, an external solver can") {
    auto v = checkQuasiReductivity(sample("factorial"), builtinOnly());
    CHECK((v.result == QrResult::NotProven));
    const auto* fact = verdictFor(v, "fact");
    REQUIRE(fact);
    CHECK((fact->status == SymbolVerdict::Status::Unknown));
    REQUIRE(fact->failure);
    CHECK(toString(fact->failure->query) == "forall x1:Int. (x1 <= 0) \\/ (not (x1 <= 0))");
    // calculation symbols over Bool are settled by enumeration
    CHECK((verdictFor(v, "/\\")->status == SymbolVerdict::Status::Ok));
    CHECK((verdictFor(v, "=:Bool")->status == SymbolVerdict::Status::Ok));

    auto z3 = withZ3();
    if (!z3) {
        MESSAGE("no external solver; skipped");
        return;
    }
    auto w = checkQuasiReductivity(sample("factorial"), *z3);
    CHECK((w.result == QrResult::QuasiReductive));
    CHECK(w.perSymbol.size() == 1 + Theory::ints().calcSymbols().size());
    auto arr = checkQuasiReductivity(sample("array_sum"), *z3);
    CHECK((arr.result == QrResult::QuasiReductive));
    auto lists = checkQuasiReductivity(sample("lists"), *z3);
    CHECK((lists.result == QrResult::QuasiReductive));
    auto set = checkQuasiReductivity(sample("addtoset_constrained"), *z3);
    CHECK((set.result == QrResult::QuasiReductive));
}

TEST_CASE("factorial without the recursive case fails with a counterexample") {
    auto v = checkQuasiReductivity(sample("factorial_missing"), builtinOnly());
    CHECK((v.result == QrResult::NotProven));
    const auto* fact = verdictFor(v, "fact");
    REQUIRE(fact);
    CHECK((fact->status == SymbolVerdict::Status::Failed));
    REQUIRE(fact->failure);
    CHECK(fact->failure->answer.isInvalid());
    REQUIRE(fact->failure->answer.counterexample.size() == 1);
    CHECK(fact->failure->answer.counterexample[0].second == Value::integer(1));
    CHECK(toString(fact->failure->problem) == "x = (x1), A = {((), x1 <= 0)}");
}

TEST_CASE("user constructors are expanded") {
    auto v = checkQuasiReductivity(sample("lists"), builtinOnly());
    const auto* len = verdictFor(v, "len");
    REQUIRE(len);
    CHECK((len->status == SymbolVerdict::Status::Ok));

    std::vector<std::string> split;
    CheckOptions opts;
    opts.trace = [&](const OkEvent& e) {
        if (e.symbol == "len" && e.kase == OkCase::Expand) split = e.constructors;
    };
    checkQuasiReductivity(sample("lists"), builtinOnly(), opts);
    CHECK(split == std::vector<std::string>{"nil", "cons"});

    Lctrs holes = parseSystem(
        "THEORY ints\nSORTS List\nSIGNATURE\n  nil : List\n  cons : Int * List => List\n"
        "  hd : List => Int\nRULES\n  hd(cons(x, xs)) -> x\n");
    auto h = checkQuasiReductivity(holes, builtinOnly());
    CHECK((h.result == QrResult::NotProven));
    CHECK((verdictFor(h, "hd")->status == SymbolVerdict::Status::Failed));
}

TEST_CASE("ineligible and non-constructor systems") {
    auto v = checkQuasiReductivity(sample("addtoset"), builtinOnly());
    CHECK((v.result == QrResult::Ineligible));
    CHECK(v.explanation == "system is not left-linear");
    CHECK(v.perSymbol.empty());

    Lctrs empty = parseSystem("THEORY ints\nSORTS B\nSIGNATURE\n  s : B => B\n  f : B => Int\nRULES\n  f(x) -> 0\n");
    auto u = checkQuasiReductivity(empty, builtinOnly());
    CHECK((u.result == QrResult::Ineligible));
    CHECK(u.explanation == "system is not constructor-sound");

    auto n = checkQuasiReductivity(sample("nonconstructor"), builtinOnly());
    CHECK((n.result == QrResult::NotQuasiReductive));
    REQUIRE(n.lostDefined.size() == 1);
    CHECK(n.lostDefined[0]->name == "f");
}

TEST_CASE("values in left-hand sides are made constrained variables first") {
    Lctrs sys = parseSystem(
        "THEORY ints\nSIGNATURE\n  g : Int => Int\nRULES\n  g(0) -> 1\n  g(x) -> 2 [x != 0]\n");
    auto b = checkQuasiReductivity(sys, builtinOnly());
    CHECK(b.madeValueFree);
    CHECK(b.restrictions.eligible());
    CHECK((b.result == QrResult::NotProven));
    CHECK((verdictFor(b, "g")->status == SymbolVerdict::Status::Unknown));

    Lctrs gap = parseSystem(
        "THEORY ints\nSIGNATURE\n  g : Int => Int\nRULES\n  g(0) -> 1\n  g(x) -> 2 [x > 0]\n");
    auto c = checkQuasiReductivity(gap, builtinOnly());
    const auto* g = verdictFor(c, "g");
    REQUIRE(g->failure);
    CHECK((g->status == SymbolVerdict::Status::Failed));
    CHECK(g->failure->answer.counterexample[0].second == Value::integer(-1));

    auto z3 = withZ3();
    if (!z3) return;
    CHECK((checkQuasiReductivity(sys, *z3).result == QrResult::QuasiReductive));
}

TEST_CASE("a non-value integer constructor breaks the calculation symbols") {
    Lctrs sys = parseSystem("THEORY ints\nSIGNATURE\n  err : Int\n  f : Int => Int\nRULES\n  f(x) -> 0\n");
    auto z3 = withZ3();
    auto v = checkQuasiReductivity(sys, z3 ? *z3 : builtinOnly());
    CHECK((v.result == QrResult::NotProven));
    CHECK((verdictFor(v, "f")->status == SymbolVerdict::Status::Ok));
    const auto* plus = verdictFor(v, "+");
    REQUIRE(plus);
    CHECK((plus->status == SymbolVerdict::Status::Failed));
    REQUIRE(plus->failure);
    CHECK(plus->failure->problem.rows.empty());
    // Bool symbols never see err
    CHECK((verdictFor(v, "/\\")->status == SymbolVerdict::Status::Ok));
}

TEST_CASE("parallel checking gives the same verdict and trace") {
    std::vector<Lctrs> systems{sample("factorial"), sample("lists"), sample("array_sum"),
                               sample("factorial_missing")};
    lctrs::testing::RandomSystemGen gen(21);
    for (int i = 0; i < 15; ++i) systems.push_back(gen.next());
    auto z3 = withZ3();
    SolverConfig cfg = z3 ? *z3 : builtinOnly();
    for (const auto& sys : systems) {
        QrVerdict a, b;
        auto seq = collect(sys, cfg, 1, &a);
        auto par = collect(sys, cfg, 4, &b);
        CHECK((seq == par));
        CHECK((a.result == b.result));
        REQUIRE(a.perSymbol.size() == b.perSymbol.size());
        for (std::size_t k = 0; k < a.perSymbol.size(); ++k) CHECK((a.perSymbol[k].status == b.perSymbol[k].status));
        CHECK(a.stats.calls == b.stats.calls);
        CHECK(a.stats.solverQueries == b.stats.solverQueries);
    }
}

TEST_CASE("the measure decreases on every recursive call of random problems") {
    lctrs::testing::RandomSystemGen gen(33);
    OkStats total;
    for (int i = 0; i < 80; ++i) {
        Lctrs sys = gen.next();
        auto v = checkQuasiReductivity(sys, builtinOnly());
        total += v.stats;
    }
    CHECK(total.measureChecks > 1000);
    CHECK(total.measureViolations == 0);
}
