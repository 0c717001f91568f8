// lctrs: command-line front end.
//
//   lctrs check FILE          quasi-reductivity verdict
//   lctrs rewrite FILE TERM   normalise a ground term, printing each step
//   lctrs restrictions FILE   left-linearity, constructor-soundness, value-freedom
//   lctrs oracle FILE         bounded search for a stuck ground term
//   lctrs print FILE          canonical rendering
//
// Every report is a sequence of JSON events; --format human renders the same
// events as text.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lctrs/analysis.hpp"
#include "lctrs/checker.hpp"
#include "lctrs/format.hpp"
#include "lctrs/oracle.hpp"

using json = nlohmann::ordered_json;
using namespace lctrs;

namespace {

enum Exit { kOk = 0, kNegative = 1, kIneligible = 2, kUsage = 3 };

class Output {
public:
    explicit Output(bool asJson) : json_(asJson) {}

    void emit(const json& e) {
        if (json_) {
            std::cout << e.dump() << "\n";
        } else {
            std::string text = render(e);
            if (!text.empty()) std::cout << text << "\n";
        }
        std::cout.flush();
    }

    static void diagnostic(const std::string& msg) { std::cerr << "lctrs: " << msg << "\n"; }

private:
    static std::string str(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

    static std::string yesNo(const json& v) { return v.get<bool>() ? "yes" : "no"; }

    static std::string render(const json& e) {
        std::ostringstream os;
        const std::string kind = e.at("event");
        if (kind == "solver") {
            os << "solver: " << str(e["backend"]);
            if (e.contains("path")) os << " (" << str(e["path"]) << ")";
        } else if (kind == "restrictions") {
            os << "restrictions: left-linear " << yesNo(e["leftLinear"]) << ", constructor-sound "
               << yesNo(e["constructorSound"]) << ", left-value-free " << yesNo(e["leftValueFree"]);
            for (const auto& r : e["nonLinearRules"]) os << "\n  not left-linear: " << str(r);
            for (const auto& s : e["uninhabitedSorts"]) os << "\n  no ground constructor term of sort " << str(s);
            for (const auto& v : e["lhsValues"])
                os << "\n  value " << str(v["value"]) << " at position " << str(v["position"]) << " in " << str(v["rule"]);
        } else if (kind == "ok-call") {
            os << "  [" << str(e["symbol"]) << "] " << std::string(2 * e["depth"].get<std::size_t>(), ' ')
               << str(e["case"]) << " flag=" << str(e["flag"]) << " measure=(" << e["measure"][0] << ","
               << e["measure"][1] << "," << e["measure"][2] << ") x=" << e["x"] << " cols=" << e["columns"]
               << " rows=" << e["rows"];
            if (e.contains("constructors")) {
                os << " on";
                for (const auto& c : e["constructors"]) os << " " << str(c);
            }
            if (e.contains("query")) os << "\n      query: " << str(e["query"]) << "\n      answer: " << str(e["answer"]);
        } else if (kind == "symbol") {
            os << str(e["symbol"]) << ": " << str(e["status"]);
            if (e.contains("query")) {
                os << "\n  failing query: " << str(e["query"]) << "\n  answer: " << str(e["answer"]);
                if (e.contains("reason")) os << " (" << str(e["reason"]) << ")";
                if (e.contains("counterexample") && !e["counterexample"].empty()) {
                    os << "\n  counterexample:";
                    for (const auto& [k, v] : e["counterexample"].items()) os << " " << k << "=" << str(v);
                }
            }
        } else if (kind == "oracle") {
            if (!e["stuck"].is_null()) {
                os << "oracle: stuck term " << str(e["stuck"]);
            } else {
                os << "oracle: no stuck term";
                if (e["truncated"].get<bool>()) os << " (search cut short)";
            }
            os << " after " << e["examined"] << " terms";
        } else if (kind == "verdict") {
            os << str(e["result"]) << ": " << str(e["explanation"]);
        } else if (kind == "step") {
            os << e["index"] << ". " << str(e["before"]) << "\n   -> " << str(e["after"]) << "   at " << str(e["position"])
               << " by " << str(e["rule"]);
            if (!str(e["substitution"]).empty()) os << " with " << str(e["substitution"]);
            if (e.contains("chosen")) {
                os << " choosing";
                for (const auto& c : e["chosen"]) os << " " << str(c);
            }
        } else if (kind == "result") {
            os << str(e["term"]) << "  (" << e["steps"] << (e["steps"] == 1 ? " step" : " steps");
            if (!e["normalForm"].get<bool>()) os << ", step limit reached";
            os << ")";
        } else if (kind == "system") {
            os << str(e["text"]);
            std::string s = os.str();
            if (!s.empty() && s.back() == '\n') s.pop_back();
            return s;
        } else {
            os << e.dump();
        }
        return os.str();
    }

    bool json_;
};

std::optional<std::string> readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<Lctrs> load(const std::string& path) {
    auto text = readFile(path);
    if (!text) {
        Output::diagnostic("cannot read " + path);
        return std::nullopt;
    }
    try {
        return parseSystem(*text);
    } catch (const ParseError& e) {
        Output::diagnostic(path + ":" + e.what() + " [" + toString(e.kind()) + "]");
        return std::nullopt;
    }
}

// ---------------------------------------------------------------- solver discovery

struct SolverFlags {
    std::string path;
    std::string flags;
    bool none = false;
    long long timeoutMs = 5000;
};

std::string which(const std::string& name) {
    if (name.find('/') != std::string::npos) return name;
    const char* pathEnv = std::getenv("PATH");
    if (!pathEnv) return name;
    std::stringstream ss(pathEnv);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        auto cand = std::filesystem::path(dir.empty() ? "." : dir) / name;
        std::error_code ec;
        if (std::filesystem::is_regular_file(cand, ec)) return cand.string();
    }
    return name;
}

std::filesystem::path configPath() {
    if (const char* p = std::getenv("LCTRS_CONFIG")) return p;
    if (const char* x = std::getenv("XDG_CONFIG_HOME")) return std::filesystem::path(x) / "lctrs" / "config.json";
    if (const char* h = std::getenv("HOME")) return std::filesystem::path(h) / ".config" / "lctrs" / "config.json";
    return {};
}

std::vector<std::string> splitFlags(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

// Flag beats LCTRS_SOLVER beats the config file.
std::optional<ExternalConfig> discoverSolver(const SolverFlags& f, Output& out) {
    if (f.none) {
        out.emit({{"event", "solver"}, {"backend", "builtin"}, {"source", "--no-solver"}});
        return std::nullopt;
    }
    std::string path = f.path;
    std::string flags = f.flags;
    std::string source = "--solver";
    long long timeout = f.timeoutMs;
    if (path.empty()) {
        if (const char* env = std::getenv("LCTRS_SOLVER"); env && *env) {
            path = env;
            source = "LCTRS_SOLVER";
        }
    }
    if (path.empty()) {
        auto cfgFile = configPath();
        std::error_code ec;
        if (!cfgFile.empty() && std::filesystem::exists(cfgFile, ec)) {
            try {
                auto text = readFile(cfgFile.string());
                auto cfg = json::parse(text.value_or("{}"));
                path = cfg.value("solver", "");
                if (flags.empty() && cfg.contains("flags")) {
                    for (const auto& a : cfg["flags"]) flags += a.get<std::string>() + " ";
                }
                source = cfgFile.string();
            } catch (const std::exception& e) {
                Output::diagnostic("ignoring malformed config " + cfgFile.string() + ": " + e.what());
            }
        }
    }
    if (path.empty()) {
        Output::diagnostic(
            "WARNING: no external SMT solver configured (use --solver, LCTRS_SOLVER or a config file); "
            "integer and array queries cannot be proven valid");
        out.emit({{"event", "solver"}, {"backend", "builtin"}, {"source", "default"}});
        return std::nullopt;
    }
    ExternalConfig cfg = ExternalConfig::forBinary(which(path));
    if (!flags.empty()) cfg.args = splitFlags(flags);
    cfg.timeout = std::chrono::milliseconds(timeout);
    out.emit({{"event", "solver"}, {"backend", "external"}, {"path", cfg.path}, {"source", source}});
    return cfg;
}

// ---------------------------------------------------------------- events

json restrictionsEvent(const Lctrs& sys, const RestrictionReport& r) {
    json nonLinear = json::array();
    for (auto i : r.leftLinear.offendingRules) nonLinear.push_back(toString(sys.rules()[i]));
    json uninhabited = json::array();
    for (const auto& s : r.constructorSound.uninhabited) uninhabited.push_back(s.name);
    json values = json::array();
    for (const auto& v : r.leftValueFree.occurrences)
        values.push_back({{"rule", toString(sys.rules()[v.rule])}, {"position", toString(v.position)}, {"value", v.value.literal()}});
    return {{"event", "restrictions"},
            {"leftLinear", r.leftLinear.ok},
            {"constructorSound", r.constructorSound.ok},
            {"leftValueFree", r.leftValueFree.ok},
            {"eligible", r.eligible()},
            {"nonLinearRules", nonLinear},
            {"uninhabitedSorts", uninhabited},
            {"lhsValues", values}};
}

std::string answerText(const SolverAnswer& a) { return std::string(toString(a.kind)) + " [" + a.backend + "]"; }

json okEvent(const OkEvent& e) {
    json j{{"event", "ok-call"},
           {"symbol", e.symbol},
           {"depth", e.depth},
           {"case", toString(e.kase)},
           {"flag", toString(e.flag)},
           {"measure", {e.measure.symbols, e.measure.variables, e.measure.flagRank}},
           {"x", e.xCount},
           {"columns", e.columns},
           {"rows", e.rows}};
    if (!e.constructors.empty()) j["constructors"] = e.constructors;
    if (e.query) j["query"] = toString(*e.query);
    if (e.answer) j["answer"] = answerText(*e.answer);
    return j;
}

const char* statusText(SymbolVerdict::Status s) {
    switch (s) {
        case SymbolVerdict::Status::Ok: return "ok";
        case SymbolVerdict::Status::Failed: return "failed";
        case SymbolVerdict::Status::Unknown: return "unknown";
    }
    return "?";
}

json symbolEvent(const SymbolVerdict& v) {
    json j{{"event", "symbol"}, {"symbol", symbolLabel(*v.symbol)}, {"status", statusText(v.status)}};
    if (v.failure) {
        j["query"] = toString(v.failure->query);
        j["answer"] = answerText(v.failure->answer);
        if (!v.failure->answer.reason.empty()) j["reason"] = v.failure->answer.reason;
        json cex = json::object();
        for (const auto& [x, val] : v.failure->answer.counterexample) cex[x.name] = val.literal();
        j["counterexample"] = cex;
    }
    return j;
}

json oracleEvent(const OracleResult& r) {
    return {{"event", "oracle"},
            {"stuck", r.stuck ? json(toString(*r.stuck)) : json(nullptr)},
            {"examined", r.examined},
            {"truncated", r.truncated}};
}

struct BudgetFlags {
    std::size_t depth = 3;
    long long intMin = -4;
    long long intMax = 4;
    std::size_t maxTerms = 1'000'000;

    EnumBudget budget() const {
        EnumBudget b;
        b.maxDepth = depth;
        b.intMin = intMin;
        b.intMax = intMax;
        b.maxTerms = maxTerms;
        return b;
    }
};

void addBudget(CLI::App* cmd, BudgetFlags& b) {
    cmd->add_option("--depth", b.depth, "oracle term depth (values and constants have depth 1)")->capture_default_str();
    cmd->add_option("--int-min", b.intMin, "smallest integer value enumerated")->capture_default_str();
    cmd->add_option("--int-max", b.intMax, "largest integer value enumerated")->capture_default_str();
    cmd->add_option("--max-terms", b.maxTerms, "cap on enumerated terms")->capture_default_str();
}

// ---------------------------------------------------------------- commands

int cmdCheck(const std::string& path, const SolverFlags& sf, bool oracle, const BudgetFlags& bf, bool trace,
             unsigned jobs, Output& out) {
    auto sys = load(path);
    if (!sys) return kUsage;
    SolverConfig cfg;
    cfg.external = discoverSolver(sf, out);
    CheckOptions opts;
    opts.jobs = jobs;
    if (trace) opts.trace = [&](const OkEvent& e) { out.emit(okEvent(e)); };

    QrVerdict v;
    try {
        v = checkQuasiReductivity(*sys, cfg, opts);
    } catch (const std::exception& e) {
        Output::diagnostic(std::string("internal error: ") + e.what());
        return kUsage;
    }
    out.emit(restrictionsEvent(makeLeftValueFree(*sys), v.restrictions));
    for (const auto& w : v.warnings) Output::diagnostic("warning: " + w);
    for (const auto& s : v.perSymbol) out.emit(symbolEvent(s));

    QrResult result = v.result;
    std::string explanation = v.explanation;
    if (oracle && result != QrResult::QuasiReductive) {
        auto budget = bf.budget();
        if (!budget.wellFormed()) {
            Output::diagnostic("invalid oracle budget");
            return kUsage;
        }
        OracleResult r = findStuckTerm(*sys, budget);
        out.emit(oracleEvent(r));
        if (r.stuck && result == QrResult::NotProven) {
            result = QrResult::NotQuasiReductive;
            explanation = "the ground term " + toString(*r.stuck) + " is stuck";
        }
    }
    json lost = json::array();
    for (const auto& f : v.lostDefined) lost.push_back(f->name);
    out.emit({{"event", "verdict"},
              {"result", toString(result)},
              {"explanation", explanation},
              {"lostDefined", lost},
              {"stats",
               {{"calls", v.stats.calls},
                {"solverQueries", v.stats.solverQueries},
                {"measureChecks", v.stats.measureChecks},
                {"measureViolations", v.stats.measureViolations},
                {"maxDepth", v.stats.maxDepth}}}});
    switch (result) {
        case QrResult::QuasiReductive: return kOk;
        case QrResult::Ineligible: return kIneligible;
        default: return kNegative;
    }
}

int cmdRewrite(const std::string& path, const std::string& termText, const std::string& strategy, std::size_t maxSteps,
               const std::vector<std::string>& choose, Output& out) {
    auto sys = load(path);
    if (!sys) return kUsage;
    VarFactory fresh(sys->firstFreeVar());
    Term t = sys->theory().trueTerm();
    try {
        t = parseTerm(*sys, termText, fresh);
    } catch (const ParseError& e) {
        Output::diagnostic(std::string("term: ") + e.what() + " [" + toString(e.kind()) + "]");
        return kUsage;
    }
    if (!t.isGround()) {
        Output::diagnostic("term must be ground: " + toString(t));
        return kUsage;
    }
    Choices choices;
    for (const auto& c : choose) {
        auto eq = c.find('=');
        if (eq == std::string::npos || eq == 0) {
            Output::diagnostic("--choose expects NAME=VALUE, got " + c);
            return kUsage;
        }
        try {
            VarFactory scratch;
            Term v = parseTerm(*sys, c.substr(eq + 1), scratch);
            if (!v.isValue()) throw std::runtime_error("not a value");
            choices[c.substr(0, eq)] = valueOf(v);
        } catch (const std::exception& e) {
            Output::diagnostic("--choose " + c + ": " + e.what());
            return kUsage;
        }
    }
    Strategy strat = strategy == "outermost" ? Strategy::LeftmostOutermost : Strategy::LeftmostInnermost;
    NormalizeResult res{t, {}, false};
    try {
        res = normalize(*sys, t, strat, maxSteps, &choices);
    } catch (const ChoiceRequired& e) {
        Output::diagnostic(std::string(e.what()) + "; supply values with --choose NAME=VALUE");
        return kNegative;
    }
    std::size_t i = 0;
    for (const auto& s : res.trace) {
        json j{{"event", "step"},
               {"index", ++i},
               {"position", toString(s.position)},
               {"rule", toString(*s.rule)},
               {"substitution", toString(s.substitution)},
               {"before", toString(s.before)},
               {"after", toString(s.after)}};
        if (s.needsChoice()) {
            json chosen = json::array();
            for (const auto& x : s.unresolved) chosen.push_back(x.name);
            j["chosen"] = chosen;
        }
        out.emit(j);
    }
    out.emit({{"event", "result"}, {"term", toString(res.result)}, {"steps", res.trace.size()}, {"normalForm", !res.truncated}});
    return res.truncated ? kNegative : kOk;
}

int cmdRestrictions(const std::string& path, Output& out) {
    auto sys = load(path);
    if (!sys) return kUsage;
    auto r = checkRestrictions(*sys);
    out.emit(restrictionsEvent(*sys, r));
    return r.eligible() ? kOk : kIneligible;
}

int cmdOracle(const std::string& path, const BudgetFlags& bf, Output& out) {
    auto sys = load(path);
    if (!sys) return kUsage;
    auto budget = bf.budget();
    if (!budget.wellFormed()) {
        Output::diagnostic("invalid oracle budget");
        return kUsage;
    }
    OracleResult r = findStuckTerm(*sys, budget);
    out.emit(oracleEvent(r));
    return r.stuck ? kNegative : kOk;
}

int cmdPrint(const std::string& path, Output& out) {
    auto sys = load(path);
    if (!sys) return kUsage;
    out.emit({{"event", "system"}, {"text", printSystem(*sys)}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained rewriting toolkit: rewriting, restriction checks and quasi-reductivity"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"human", "json"}))->capture_default_str();

    std::string file;
    SolverFlags sf;
    bool oracle = false;
    bool trace = false;
    unsigned jobs = 1;
    BudgetFlags bf;

    auto* check = app.add_subcommand("check", "decide quasi-reductivity");
    check->add_option("file", file, "specification (.lctrs)")->required();
    check->add_option("--solver", sf.path, "SMT-LIB 2 solver binary (z3, cvc5, ...)");
    check->add_option("--solver-flags", sf.flags, "replace the solver's default command-line flags");
    check->add_flag("--no-solver", sf.none, "use the builtin solver only");
    check->add_option("--timeout", sf.timeoutMs, "per-query solver timeout in milliseconds")->capture_default_str();
    check->add_flag("--oracle", oracle, "search for a stuck ground term when the check is not positive");
    check->add_flag("-v,--trace", trace, "emit every recursive call with its case, measure and queries");
    check->add_option("-j,--jobs", jobs, "symbols checked concurrently")->check(CLI::Range(1u, 256u))->capture_default_str();
    addBudget(check, bf);

    std::string termText;
    std::string strategy = "innermost";
    std::size_t maxSteps = 10000;
    std::vector<std::string> choose;
    auto* rewrite = app.add_subcommand("rewrite", "rewrite a ground term to normal form");
    rewrite->add_option("file", file, "specification (.lctrs)")->required();
    rewrite->add_option("term", termText, "ground term")->required();
    rewrite->add_option("--strategy", strategy, "redex selection")
        ->check(CLI::IsMember({"innermost", "outermost"}))
        ->capture_default_str();
    rewrite->add_option("--max-steps", maxSteps, "step limit")->capture_default_str();
    rewrite->add_option("--choose", choose, "value for a variable the constraint leaves open, NAME=VALUE");

    auto* restrictions = app.add_subcommand("restrictions", "report the restrictions the checker needs");
    restrictions->add_option("file", file, "specification (.lctrs)")->required();

    auto* oracleCmd = app.add_subcommand("oracle", "search for a stuck ground term");
    oracleCmd->add_option("file", file, "specification (.lctrs)")->required();
    addBudget(oracleCmd, bf);

    auto* print = app.add_subcommand("print", "print the specification in canonical form");
    print->add_option("file", file, "specification (.lctrs)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    Output out(format == "json");
    if (check->parsed()) return cmdCheck(file, sf, oracle, bf, trace, jobs, out);
    if (rewrite->parsed()) return cmdRewrite(file, termText, strategy, maxSteps, choose, out);
    if (restrictions->parsed()) return cmdRestrictions(file, out);
    if (oracleCmd->parsed()) return cmdOracle(file, bf, out);
    if (print->parsed()) return cmdPrint(file, out);
    return kUsage;
}
