#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <map>

#include "lctrs/solver.hpp"

namespace lctrs {

namespace {

struct SExpr {
    std::string atom;
    std::vector<SExpr> items;
    bool isList = false;
};

// Parses one s-expression starting at `pos`; `pos` ends past it.
SExpr parseSExpr(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    SExpr e;
    if (pos >= s.size()) return e;
    if (s[pos] == '(') {
        e.isList = true;
        ++pos;
        while (true) {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos >= s.size()) break;
            if (s[pos] == ')') {
                ++pos;
                break;
            }
            e.items.push_back(parseSExpr(s, pos));
        }
        return e;
    }
    std::size_t start = pos;
    if (s[pos] == '"') {
        ++pos;
        while (pos < s.size()) {
            if (s[pos] == '"') {
                if (pos + 1 < s.size() && s[pos + 1] == '"') {
                    pos += 2;
                    continue;
                }
                ++pos;
                break;
            }
            ++pos;
        }
    } else if (s[pos] == '|') {
        pos = s.find('|', pos + 1);
        pos = pos == std::string::npos ? s.size() : pos + 1;
    } else {
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')')
            ++pos;
    }
    e.atom = s.substr(start, pos - start);
    return e;
}

std::optional<BigInt> parseIntExpr(const SExpr& e) {
    try {
        if (!e.isList) return BigInt(e.atom);
        if (e.items.size() == 2 && !e.items[0].isList && e.items[0].atom == "-") {
            if (auto inner = parseIntExpr(e.items[1])) return BigInt(-*inner);
        }
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

// Collects `(define-fun name () Sort value)` entries wherever they appear.
void collectDefinitions(const SExpr& e, std::map<std::string, SExpr>& out) {
    if (!e.isList) return;
    if (e.items.size() == 5 && !e.items[0].isList && e.items[0].atom == "define-fun" && e.items[2].isList &&
        e.items[2].items.empty()) {
        out[e.items[1].atom] = e.items[4];
        return;
    }
    for (const auto& c : e.items) collectDefinitions(c, out);
}

std::string smtName(const Var& x) { return "v" + std::to_string(x.id); }

}  // namespace

struct SmtSession::Process {
    pid_t pid = -1;
    int fd = -1;
    std::string buffer;

    ~Process() {
        if (fd >= 0) ::close(fd);
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
        }
    }

    bool send(const std::string& text) {
        std::size_t off = 0;
        while (off < text.size()) {
            ssize_t n = ::send(fd, text.data() + off, text.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    // Reads one complete s-expression (or atom) from the solver's output.
    // Empty optional on timeout or end of stream.
    std::optional<std::string> receive(std::chrono::steady_clock::time_point deadline) {
        while (true) {
            if (auto got = extract()) return got;
            auto now = std::chrono::steady_clock::now();
            if (now >= deadline) return std::nullopt;
            auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            pollfd p{fd, POLLIN, 0};
            int rc = ::poll(&p, 1, static_cast<int>(std::max<long long>(1, wait)));
            if (rc < 0 && errno == EINTR) continue;
            if (rc <= 0) continue;
            char chunk[4096];
            ssize_t n = ::read(fd, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) return std::nullopt;
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }

    std::optional<std::string> extract() {
        std::size_t i = 0;
        while (i < buffer.size() && std::isspace(static_cast<unsigned char>(buffer[i]))) ++i;
        if (i == buffer.size()) return std::nullopt;
        std::size_t end = i;
        if (buffer[i] == '(') {
            int depth = 0;
            bool inString = false;
            for (; end < buffer.size(); ++end) {
                char c = buffer[end];
                if (inString) {
                    if (c == '"') inString = false;
                    continue;
                }
                if (c == '"') inString = true;
                else if (c == '(') ++depth;
                else if (c == ')' && --depth == 0) break;
            }
            if (end == buffer.size()) return std::nullopt;
            ++end;
        } else {
            while (end < buffer.size() && !std::isspace(static_cast<unsigned char>(buffer[end]))) ++end;
            if (end == buffer.size()) return std::nullopt;
        }
        std::string out = buffer.substr(i, end - i);
        buffer.erase(0, end);
        return out;
    }
};

ExternalConfig ExternalConfig::forBinary(std::string path) {
    ExternalConfig cfg;
    auto base = std::filesystem::path(path).filename().string();
    if (base.find("z3") != std::string::npos) {
        cfg.args = {"-in", "-smt2"};
    } else if (base.find("cvc5") != std::string::npos || base.find("cvc4") != std::string::npos) {
        cfg.args = {"--lang=smt2", "--incremental"};
    } else if (base.find("yices") != std::string::npos) {
        cfg.args = {"--incremental"};
    }
    cfg.path = std::move(path);
    return cfg;
}

SmtSession::SmtSession(ExternalConfig cfg, ScriptLog log) : cfg_(std::move(cfg)), log_(std::move(log)) {}

SmtSession::~SmtSession() = default;

SolverAnswer SmtSession::check(const ValidityQuery& q) {
    const char* backend = "external";
    std::string script;
    try {
        script = encodeSmtLib(q);
    } catch (const std::exception& e) {
        return SolverAnswer::unknown(std::string("cannot encode query: ") + e.what(), backend);
    }

    if (!proc_) {
        if (::access(cfg_.path.c_str(), X_OK) != 0)
            return SolverAnswer::unknown("solver binary not executable: " + cfg_.path, backend);
        int sv[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0)
            return SolverAnswer::unknown(std::string("socketpair failed: ") + std::strerror(errno), backend);
        pid_t pid = ::fork();
        if (pid < 0) {
            ::close(sv[0]);
            ::close(sv[1]);
            return SolverAnswer::unknown(std::string("fork failed: ") + std::strerror(errno), backend);
        }
        if (pid == 0) {
            ::dup2(sv[1], 0);
            ::dup2(sv[1], 1);
            int devnull = ::open("/dev/null", O_WRONLY);
            if (devnull >= 0) ::dup2(devnull, 2);
            ::close(sv[0]);
            ::close(sv[1]);
            std::vector<char*> argv;
            argv.push_back(const_cast<char*>(cfg_.path.c_str()));
            for (auto& a : cfg_.args) argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            ::execv(cfg_.path.c_str(), argv.data());
            ::_exit(127);
        }
        ::close(sv[1]);
        proc_ = std::make_unique<Process>();
        proc_->pid = pid;
        proc_->fd = sv[0];
    }

    auto deadline = std::chrono::steady_clock::now() + cfg_.timeout;
    std::string transcript;
    auto fail = [&](const std::string& why) {
        proc_.reset();
        if (log_) log_(script, transcript);
        return SolverAnswer::unknown(why, backend);
    };
    auto ask = [&](const std::string& text) -> std::optional<std::string> {
        if (!proc_->send(text)) return std::nullopt;
        auto reply = proc_->receive(deadline);
        if (reply) transcript += *reply + "\n";
        return reply;
    };

    auto status = ask(script);
    if (!status) return fail(std::chrono::steady_clock::now() >= deadline ? "timeout" : "solver process ended");

    SolverAnswer ans;
    ans.backend = backend;
    if (*status == "unsat") {
        ans.kind = SolverAnswer::Kind::Valid;
    } else if (*status == "sat") {
        auto model = ask("(get-model)\n");
        if (!model) return fail("no model returned");
        std::size_t pos = 0;
        std::map<std::string, SExpr> defs;
        collectDefinitions(parseSExpr(*model, pos), defs);
        ans.kind = SolverAnswer::Kind::Invalid;
        for (const auto& x : q.universal) {
            if (x.sort == boolSort()) {
                auto it = defs.find(smtName(x));
                ans.counterexample.emplace_back(x, Value(it != defs.end() && it->second.atom == "true"));
            } else if (x.sort == intSort()) {
                auto it = defs.find(smtName(x));
                auto n = it == defs.end() ? std::optional<BigInt>(0) : parseIntExpr(it->second);
                ans.counterexample.emplace_back(x, Value(n.value_or(0)));
            } else {
                auto it = defs.find(smtName(x) + "_n");
                auto n = it == defs.end() ? std::optional<BigInt>(0) : parseIntExpr(it->second);
                std::size_t size = static_cast<std::size_t>(std::min<BigInt>(std::max<BigInt>(n.value_or(0), 0), 256));
                IntArray elems(size, BigInt(0));
                if (size > 0) {
                    std::string req = "(get-value (";
                    for (std::size_t i = 0; i < size; ++i) req += "(select " + smtName(x) + "_m " + std::to_string(i) + ") ";
                    req += "))\n";
                    auto vals = ask(req);
                    if (!vals) return fail("no values returned");
                    std::size_t vp = 0;
                    SExpr list = parseSExpr(*vals, vp);
                    for (std::size_t i = 0; i < size && i < list.items.size(); ++i)
                        if (list.items[i].items.size() == 2)
                            elems[i] = parseIntExpr(list.items[i].items[1]).value_or(0);
                }
                ans.counterexample.emplace_back(x, Value(std::move(elems)));
            }
        }
    } else {
        ans.kind = SolverAnswer::Kind::Unknown;
        ans.reason = "solver answered: " + *status;
    }
    if (!proc_->send("(reset)\n")) proc_.reset();
    if (log_) log_(script, transcript);
    return ans;
}

SolverAnswer decideExternal(const ValidityQuery& q, const ExternalConfig& cfg) {
    SmtSession session(cfg);
    return session.check(q);
}

Solver::Solver(Theory theory, SolverConfig cfg) : theory_(std::move(theory)), cfg_(std::move(cfg)) {}

Solver::~Solver() = default;

SolverAnswer Solver::decide(const ValidityQuery& raw) {
    ValidityQuery q = eliminateDefinedExistentials(theory_, raw);
    for (const auto& d : q.disjuncts)
        if (d.isGround() && evaluate(theory_, d).asBool()) return SolverAnswer::valid("builtin");

    std::vector<Var> relevant;
    for (const auto& d : q.disjuncts) collectVars(d, relevant);
    bool boolOnly = std::all_of(relevant.begin(), relevant.end(), [](const Var& x) { return x.sort == boolSort(); });

    SolverAnswer local = decideBuiltin(theory_, q, cfg_.builtin);
    if (boolOnly || local.isInvalid()) return local;
    if (!cfg_.external) return local;
    if (!session_) session_ = std::make_unique<SmtSession>(*cfg_.external, cfg_.scriptLog);
    return session_->check(q);
}

}  // namespace lctrs
