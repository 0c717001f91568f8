#include <doctest.h>

#include <random>
#include <set>
#include <thread>

#include "lctrs/core.hpp"
#include "lctrs/theory.hpp"

using namespace lctrs;

namespace {

struct Sig {
    Sort a{"A"};
    SymbolRef f = makeSymbol("f", {a, a}, a);
    SymbolRef g = makeSymbol("g", {a}, a);
    SymbolRef c = makeSymbol("c", {}, a);
    SymbolRef d = makeSymbol("d", {}, a);
    VarFactory fresh{1};
    std::vector<Var> xs;

    Sig() {
        for (const char* n : {"x", "y", "z"}) xs.push_back(fresh.fresh(n, a));
    }

    Term random(std::mt19937_64& rng, int depth) {
        int k = static_cast<int>(rng() % (depth > 0 ? 5 : 3));
        switch (k) {
            case 0: return Term::variable(xs[rng() % xs.size()]);
            case 1: return Term::apply(c);
            case 2: return Term::apply(d);
            case 3: return Term::apply(g, {random(rng, depth - 1)});
            default: return Term::apply(f, {random(rng, depth - 1), random(rng, depth - 1)});
        }
    }

    Substitution randomSub(std::mt19937_64& rng) {
        Substitution s;
        for (const auto& x : xs)
            if (rng() % 2) s.bind(x, random(rng, 2));
        return s;
    }
};

}  // namespace

TEST_CASE("terms: construction, sorts and counts") {
    Sig s;
    Term x = Term::variable(s.xs[0]);
    Term t = Term::apply(s.f, {Term::apply(s.g, {x}), x});
    CHECK(t.sort() == s.a);
    CHECK(t.symbolCount() == 2);
    CHECK(t.varOccurrences() == 2);
    CHECK(t.depth() == 3);
    CHECK_FALSE(t.isGround());
    CHECK_FALSE(isLinear(t));
    CHECK(isLinear(Term::apply(s.g, {x})));
    CHECK(vars(t) == std::vector<Var>{s.xs[0]});
    CHECK(toString(t) == "f(g(x), x)");

    Sort b{"B"};
    Var wrong = s.fresh.fresh("w", b);
    CHECK_THROWS_AS(Term::apply(s.g, {Term::variable(wrong)}), SortError);
    CHECK_THROWS_AS(Term::apply(s.f, {x}), SortError);
}

TEST_CASE("terms: equality is structural and variables compare by id") {
    Sig s;
    Var x2 = s.fresh.fresh("x", s.a);  // same name, different id
    CHECK((Term::apply(s.g, {Term::apply(s.c)}) == Term::apply(s.g, {Term::apply(s.c)})));
    CHECK_FALSE((Term::variable(s.xs[0]) == Term::variable(x2)));
    CHECK_FALSE((Term::apply(s.c) == Term::apply(s.d)));
}

TEST_CASE("substitutions: bind checks sorts, apply and domain") {
    Sig s;
    Substitution sub;
    sub.bind(s.xs[0], Term::apply(s.c));
    CHECK(sub.contains(s.xs[0]));
    CHECK_FALSE(sub.contains(s.xs[1]));
    Term t = Term::apply(s.f, {Term::variable(s.xs[0]), Term::variable(s.xs[1])});
    CHECK(toString(apply(t, sub)) == "f(c, y)");
    CHECK(sub.domain() == std::vector<Var>{s.xs[0]});

    Substitution identity;
    identity.bind(s.xs[1], Term::variable(s.xs[1]));
    CHECK(identity.domain().empty());

    Var b = s.fresh.fresh("b", Sort{"B"});
    CHECK_THROWS_AS(sub.bind(b, Term::apply(s.c)), SortError);
}

TEST_CASE("substitutions: composition agrees with sequential application") {
    Sig s;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 300; ++i) {
        Term t = s.random(rng, 3);
        Substitution a = s.randomSub(rng);
        Substitution b = s.randomSub(rng);
        CHECK((apply(apply(t, a), b) == apply(t, a.then(b))));
    }
}

TEST_CASE("matching: an instance matches its pattern with the same substitution") {
    Sig s;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
        Term p = s.random(rng, 3);
        if (!isLinear(p)) continue;
        Substitution sigma = s.randomSub(rng);
        Term inst = apply(p, sigma);
        auto m = match(p, inst);
        REQUIRE(m.has_value());
        CHECK((apply(p, *m) == inst));
        for (const auto& x : vars(p)) {
            const Term* got = m->lookup(x);
            Term want = sigma.lookup(x) ? *sigma.lookup(x) : Term::variable(x);
            CHECK(((got ? *got : Term::variable(x)) == want));
        }
    }
}

TEST_CASE("matching: non-linear patterns need syntactic equality") {
    Sig s;
    Term x = Term::variable(s.xs[0]);
    Term p = Term::apply(s.f, {x, x});
    CHECK(match(p, Term::apply(s.f, {Term::apply(s.c), Term::apply(s.c)})).has_value());
    CHECK_FALSE(match(p, Term::apply(s.f, {Term::apply(s.c), Term::apply(s.d)})).has_value());
    CHECK_FALSE(match(Term::apply(s.g, {x}), Term::apply(s.c)).has_value());
}

TEST_CASE("positions: pre-order and replaceAt with the same subterm is the identity") {
    Sig s;
    Term x = Term::variable(s.xs[0]);
    Term t = Term::apply(s.f, {Term::apply(s.g, {x}), Term::apply(s.c)});
    auto ps = positions(t);
    REQUIRE(ps.size() == 4);
    CHECK(ps[0].empty());
    CHECK(ps[1] == Position{0});
    CHECK(ps[2] == Position{0, 0});
    CHECK(ps[3] == Position{1});
    CHECK(toString(subtermAt(t, ps[2])) == "x");
    CHECK(toString(replaceAt(t, Position{0, 0}, Term::apply(s.d))) == "f(g(d), c)");
    CHECK_THROWS_AS(subtermAt(t, Position{2}), PositionError);
    CHECK_THROWS_AS(subtermAt(t, Position{1, 0}), PositionError);
    CHECK_THROWS_AS(replaceAt(t, Position{0}, Term::variable(s.fresh.fresh("b", Sort{"B"}))), SortError);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        Term r = s.random(rng, 4);
        for (const auto& p : positions(r)) CHECK((replaceAt(r, p, subtermAt(r, p)) == r));
    }
}

TEST_CASE("printing: precedence and literals") {
    Theory th = Theory::intArrays();
    VarFactory fresh;
    Term x = Term::variable(fresh.fresh("x", intSort()));
    Term y = Term::variable(fresh.fresh("y", intSort()));
    Term z = Term::variable(fresh.fresh("z", intSort()));
    auto op = [&](const std::string& name, Term a, Term b) {
        for (const auto& f : th.calcByName(name))
            if (f->inputs[0] == a.sort()) return Term::apply(f, {a, b});
        throw std::logic_error(name);
    };
    auto notT = [&](Term a) { return Term::apply(th.calcByName("not").front(), {a}); };
    Term zero = th.valueTerm(Value::integer(0));
    Term le = op("<=", x, zero);
    Term gt = op(">", y, zero);
    Term eq = op("=", z, zero);

    CHECK(toString(op("/\\", op("\\/", le, gt), eq)) == "(x <= 0 \\/ y > 0) /\\ z = 0");
    CHECK(toString(op("\\/", op("/\\", le, gt), eq)) == "x <= 0 /\\ y > 0 \\/ z = 0");
    CHECK(toString(notT(le)) == "not (x <= 0)");
    CHECK(toString(op("-", x, op("-", y, z))) == "x - (y - z)");
    CHECK(toString(op("-", op("-", x, y), z)) == "x - y - z");
    CHECK(toString(op("*", op("+", x, y), z)) == "(x + y) * z");
    CHECK(toString(op("=>", le, op("=>", gt, eq))) == "x <= 0 => y > 0 => z = 0");
    CHECK(toString(op("=>", op("=>", le, gt), eq)) == "(x <= 0 => y > 0) => z = 0");
    CHECK(toString(th.valueTerm(Value(IntArray{1, 2}))) == "{1,2}");
    CHECK(toString(th.valueTerm(Value(IntArray{}))) == "{}");
    CHECK(toString(th.valueTerm(Value::integer(-3))) == "-3");
}

TEST_CASE("fresh variables are unique across threads") {
    VarFactory fresh(10);
    std::vector<std::vector<std::uint64_t>> ids(4);
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&, t] {
            for (int i = 0; i < 1000; ++i) ids[static_cast<std::size_t>(t)].push_back(fresh.fresh("v", intSort()).id);
        });
    for (auto& t : ts) t.join();
    std::set<std::uint64_t> all;
    for (const auto& v : ids) all.insert(v.begin(), v.end());
    CHECK(all.size() == 4000);
    CHECK(*all.begin() >= 10);
    fresh.reserve(100000);
    CHECK(fresh.fresh("v", intSort()).id >= 100000);
}
