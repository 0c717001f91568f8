#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "support/harness.hpp"

using namespace lctrs::testing;
using nlohmann::json;

namespace {

std::vector<json> eventsOf(const RunResult& r, const std::string& kind) {
    std::vector<json> out;
    for (const auto& e : r.events)
        if (e.value("event", "") == kind) out.push_back(e);
    return out;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("lctrs-cli-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        auto p = path / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p) << text;
        return p.string();
    }
};

}  // namespace

TEST_CASE("check: exit codes") {
    CHECK(runCli({"check", samplePath("factorial_missing.lctrs"), "--no-solver"}).exitCode == 1);
    CHECK(runCli({"check", samplePath("factorial.lctrs"), "--no-solver"}).exitCode == 1);
    CHECK(runCli({"check", samplePath("addtoset.lctrs"), "--no-solver"}).exitCode == 2);
    CHECK(runCli({"check", samplePath("nonconstructor.lctrs"), "--no-solver"}).exitCode == 1);
    CHECK(runCli({"check", "/nonexistent.lctrs"}).exitCode == 3);
    CHECK(runCli({"check"}).exitCode == 3);
    CHECK(runCli({"frobnicate"}).exitCode == 3);
    CHECK(runCli({"check", samplePath("factorial.lctrs"), "--format", "yaml"}).exitCode == 3);

    TempDir tmp;
    std::string bad = tmp.write("bad.lctrs", "THEORY reals\n");
    auto r = runCli({"check", bad}, kCleanEnv, true);
    CHECK(r.exitCode == 3);
    CHECK(r.out.find("1:8: unknown theory 'reals'") != std::string::npos);

    std::string z3 = externalSolver();
    if (z3.empty()) return;
    CHECK(runCli({"check", samplePath("factorial.lctrs"), "--solver", z3}).exitCode == 0);
    CHECK(runCli({"check", samplePath("array_sum.lctrs"), "--solver", z3}).exitCode == 0);
    CHECK(runCli({"check", samplePath("lists.lctrs"), "--solver", z3}).exitCode == 0);
}

TEST_CASE("check: json events") {
    auto r = runCli({"--format", "json", "check", samplePath("factorial_missing.lctrs"), "--no-solver", "--oracle"});
    CHECK(r.exitCode == 1);
    // every line of stdout is one json object
    std::size_t lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == r.events.size());

    const json* solver = findEvent(r, "solver");
    REQUIRE(solver);
    CHECK((*solver)["backend"] == "builtin");
    CHECK((*solver)["source"] == "--no-solver");

    const json* rest = findEvent(r, "restrictions");
    REQUIRE(rest);
    CHECK((*rest)["eligible"] == true);

    auto symbols = eventsOf(r, "symbol");
    REQUIRE(symbols.size() == 16);
    CHECK(symbols[0]["symbol"] == "fact");
    CHECK(symbols[0]["status"] == "failed");
    CHECK(symbols[15]["symbol"] == "!=:Int");

    const json* oracle = findEvent(r, "oracle");
    REQUIRE(oracle);
    CHECK((*oracle)["stuck"] == "fact(1)");
    CHECK((*oracle)["examined"] == 6);

    const json* verdict = findEvent(r, "verdict");
    REQUIRE(verdict);
    CHECK((*verdict)["result"] == "not-quasi-reductive");
    CHECK(r.events.back()["event"] == "verdict");

    // without --oracle the verdict stays not-proven
    auto plain = runCli({"--format", "json", "check", samplePath("factorial_missing.lctrs"), "--no-solver"});
    CHECK((*findEvent(plain, "verdict"))["result"] == "not-proven");
    CHECK(findEvent(plain, "oracle") == nullptr);
}

TEST_CASE("check: ineligible systems report their witness") {
    auto r = runCli({"--format", "json", "check", samplePath("addtoset.lctrs"), "--no-solver"});
    CHECK(r.exitCode == 2);
    const json* rest = findEvent(r, "restrictions");
    REQUIRE(rest);
    CHECK((*rest)["leftLinear"] == false);
    CHECK((*rest)["nonLinearRules"][0] == "addtoset(x, setof(x, rest)) -> setof(x, rest)");
    CHECK((*findEvent(r, "verdict"))["result"] == "ineligible");
}

TEST_CASE("check: trace") {
    auto r = runCli({"--format", "json", "check", samplePath("factorial.lctrs"), "--no-solver", "-v"});
    auto calls = eventsOf(r, "ok-call");
    REQUIRE(calls.size() >= 3);
    CHECK(calls[0]["symbol"] == "fact");
    CHECK(calls[0]["case"] == "either-value");
    CHECK(calls[0]["measure"] == json::array({0, 2, 1}));
    CHECK(calls[2]["case"] == "base");
    CHECK(calls[2]["query"] == "forall x1:Int. (x1 <= 0) \\/ (not (x1 <= 0))");
    CHECK(calls[2]["answer"] == "unknown [builtin]");

    auto quiet = runCli({"--format", "json", "check", samplePath("factorial.lctrs"), "--no-solver"});
    CHECK(eventsOf(quiet, "ok-call").empty());
}

TEST_CASE("check: jobs do not change the output") {
    for (const char* name : {"factorial.lctrs", "lists.lctrs", "factorial_missing.lctrs"}) {
        auto one = runCli({"--format", "json", "check", samplePath(name), "--no-solver", "-v", "-j", "1"});
        auto four = runCli({"--format", "json", "check", samplePath(name), "--no-solver", "-v", "-j", "4"});
        CHECK(one.exitCode == four.exitCode);
        CHECK(one.out == four.out);
    }
}

TEST_CASE("human output renders the same events") {
    auto r = runCli({"check", samplePath("factorial_missing.lctrs"), "--no-solver", "--oracle"});
    CHECK(r.out.find("fact: failed") != std::string::npos);
    CHECK(r.out.find("counterexample: x1=1") != std::string::npos);
    CHECK(r.out.find("oracle: stuck term fact(1)") != std::string::npos);
    CHECK(r.out.find("not-quasi-reductive") != std::string::npos);
    CHECK(r.events.empty());
}

TEST_CASE("rewrite") {
    auto fact = runCli({"--format", "json", "rewrite", samplePath("factorial.lctrs"), "fact(3)"});
    CHECK(fact.exitCode == 0);
    auto steps = eventsOf(fact, "step");
    CHECK(steps.size() == 10);
    CHECK(steps[0]["position"] == "[]");
    CHECK(steps[0]["rule"] == "fact(x) -> x * fact(x - 1) [not (x <= 0)]");
    CHECK(steps[0]["substitution"] == "[x:=3]");
    CHECK(steps[0]["after"] == "3 * fact(3 - 1)");
    const json* res = findEvent(fact, "result");
    REQUIRE(res);
    CHECK((*res)["term"] == "6");
    CHECK((*res)["steps"] == 10);
    CHECK((*res)["normalForm"] == true);

    auto sub = runCli({"--format", "json", "rewrite", samplePath("factorial.lctrs"), "3 - 1"});
    CHECK((*findEvent(sub, "result"))["term"] == "2");
    CHECK((*findEvent(sub, "result"))["steps"] == 1);

    auto lit = runCli({"--format", "json", "rewrite", samplePath("factorial.lctrs"), "42"});
    CHECK(lit.exitCode == 0);
    CHECK((*findEvent(lit, "result"))["steps"] == 0);

    auto out = runCli({"--format", "json", "rewrite", samplePath("lists.lctrs"), "len(cons(1 + 1, nil))",
                       "--strategy", "outermost"});
    CHECK(eventsOf(out, "step")[0]["after"] == "1 + len(nil)");

    auto cut = runCli({"--format", "json", "rewrite", samplePath("factorial.lctrs"), "fact(3)", "--max-steps", "2"});
    CHECK(cut.exitCode == 1);
    CHECK((*findEvent(cut, "result"))["normalForm"] == false);

    CHECK(runCli({"rewrite", samplePath("factorial.lctrs"), "fact(x)"}).exitCode == 3);
    CHECK(runCli({"rewrite", samplePath("factorial.lctrs"), "fact("}).exitCode == 3);

    auto human = runCli({"rewrite", samplePath("factorial.lctrs"), "fact(3)"});
    CHECK(human.out.find("6  (10 steps)") != std::string::npos);
}

TEST_CASE("rewrite: choices for open right-hand side variables") {
    TempDir tmp;
    std::string pick = tmp.write("pick.lctrs", "SIGNATURE\n  pick : Int => Int\nRULES\n  pick(x) -> y [y > x]\n");
    auto need = runCli({"rewrite", pick, "pick(3)"}, kCleanEnv, true);
    CHECK(need.exitCode == 1);
    CHECK(need.out.find("--choose") != std::string::npos);
    auto chosen = runCli({"--format", "json", "rewrite", pick, "pick(3)", "--choose", "y=7"});
    CHECK(chosen.exitCode == 0);
    CHECK((*findEvent(chosen, "result"))["term"] == "7");
    CHECK(runCli({"rewrite", pick, "pick(3)", "--choose", "y"}).exitCode == 3);
}

TEST_CASE("restrictions, oracle and print") {
    auto ok = runCli({"--format", "json", "restrictions", samplePath("factorial.lctrs")});
    CHECK(ok.exitCode == 0);
    const json* r = findEvent(ok, "restrictions");
    REQUIRE(r);
    CHECK((*r)["leftLinear"] == true);
    CHECK((*r)["constructorSound"] == true);
    CHECK((*r)["leftValueFree"] == true);
    CHECK(runCli({"restrictions", samplePath("addtoset.lctrs")}).exitCode == 2);

    auto stuck = runCli({"--format", "json", "oracle", samplePath("factorial_missing.lctrs")});
    CHECK(stuck.exitCode == 1);
    CHECK((*findEvent(stuck, "oracle"))["stuck"] == "fact(1)");
    auto none = runCli({"--format", "json", "oracle", samplePath("factorial.lctrs"), "--depth", "2"});
    CHECK(none.exitCode == 0);
    CHECK((*findEvent(none, "oracle"))["stuck"].is_null());
    auto capped = runCli({"--format", "json", "oracle", samplePath("factorial.lctrs"), "--max-terms", "5"});
    CHECK((*findEvent(capped, "oracle"))["truncated"] == true);
    auto narrow = runCli({"--format", "json", "oracle", samplePath("factorial_missing.lctrs"), "--int-min", "3",
                          "--int-max", "5"});
    CHECK((*findEvent(narrow, "oracle"))["stuck"] == "fact(3)");
    CHECK(runCli({"oracle", samplePath("factorial.lctrs"), "--int-min", "3", "--int-max", "1"}).exitCode == 3);

    auto printed = runCli({"--format", "json", "print", samplePath("factorial.lctrs")});
    CHECK(printed.exitCode == 0);
    CHECK((*findEvent(printed, "system"))["text"] == readText(samplePath("factorial.lctrs")).substr(
                                                         readText(samplePath("factorial.lctrs")).find("THEORY")));
}

TEST_CASE("solver discovery") {
    TempDir tmp;
    const std::string fromEnv = "/opt/from-env/z3";
    const std::string fromCfg = "/opt/from-config/z3";
    const std::string fromFlag = "/opt/from-flag/z3";
    std::string cfg = tmp.write("cfg/config.json", json{{"solver", fromCfg}, {"flags", {"-in"}}}.dump());
    std::string xdg = tmp.write("xdg/lctrs/config.json", json{{"solver", fromCfg}}.dump());
    auto source = [&](const std::string& env, std::vector<std::string> extra = {}) {
        std::vector<std::string> args{"--format", "json", "check", samplePath("factorial_missing.lctrs"), "--timeout",
                                      "500"};
        args.insert(args.end(), extra.begin(), extra.end());
        auto r = runCli(args, env);
        const json* e = findEvent(r, "solver");
        REQUIRE(e);
        return *e;
    };

    auto flag = source("env LCTRS_SOLVER=" + fromEnv + " LCTRS_CONFIG=" + cfg, {"--solver", fromFlag});
    CHECK(flag["path"] == fromFlag);
    CHECK(flag["source"] == "--solver");

    auto env = source("env LCTRS_SOLVER=" + fromEnv + " LCTRS_CONFIG=" + cfg);
    CHECK(env["path"] == fromEnv);
    CHECK(env["source"] == "LCTRS_SOLVER");

    auto file = source("env -u LCTRS_SOLVER LCTRS_CONFIG=" + cfg);
    CHECK(file["path"] == fromCfg);
    CHECK(file["source"] == cfg);

    auto xdgFile = source("env -u LCTRS_SOLVER -u LCTRS_CONFIG XDG_CONFIG_HOME=" + (tmp.path / "xdg").string());
    CHECK(xdgFile["path"] == fromCfg);

    auto home = source("env -u LCTRS_SOLVER -u LCTRS_CONFIG -u XDG_CONFIG_HOME HOME=" + (tmp.path / "nohome").string());
    CHECK(home["backend"] == "builtin");
    CHECK(home["source"] == "default");

    auto off = source("env LCTRS_SOLVER=" + fromEnv, {"--no-solver"});
    CHECK(off["backend"] == "builtin");

    // the default prints a warning on stderr
    auto warn = runCli({"check", samplePath("factorial_missing.lctrs")}, kCleanEnv, true);
    CHECK(warn.out.find("WARNING: no external SMT solver") != std::string::npos);

    // a solver that cannot be started leaves the verdict not-proven
    auto broken = runCli({"--format", "json", "check", samplePath("factorial.lctrs"), "--solver", fromFlag});
    CHECK(broken.exitCode == 1);
    CHECK((*findEvent(broken, "verdict"))["result"] == "not-proven");
}
