#include "lctrs/core.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace lctrs {

bool sameSymbol(const FunSymbol& a, const FunSymbol& b) {
    return a.name == b.name && a.output == b.output && a.inputs == b.inputs;
}

SymbolRef makeSymbol(std::string name, std::vector<Sort> inputs, Sort output, SymbolKind kind) {
    auto f = std::make_shared<FunSymbol>();
    f->name = std::move(name);
    f->inputs = std::move(inputs);
    f->output = std::move(output);
    f->kind = kind;
    return f;
}

Var VarFactory::fresh(std::string name, Sort sort) {
    return Var{next_.fetch_add(1), std::move(name), std::move(sort)};
}

Var VarFactory::freshLike(const Var& base) {
    auto name = base.name;
    if (auto cut = name.find('_'); cut != std::string::npos && cut > 0) name.resize(cut);
    auto id = next_.fetch_add(1);
    return Var{id, name + "_" + std::to_string(id), base.sort};
}

void VarFactory::reserve(std::uint64_t bound) {
    auto cur = next_.load();
    while (cur < bound && !next_.compare_exchange_weak(cur, bound)) {
    }
}

struct Term::Node {
    std::optional<Var> var;
    SymbolRef symbol;
    std::vector<Term> args;
    Sort sort;
    std::size_t hash = 0;
    std::size_t symbols = 0;
    std::size_t variables = 0;
    std::size_t depth = 1;
};

Term Term::variable(Var v) {
    auto n = std::make_shared<Node>();
    n->sort = v.sort;
    n->hash = std::hash<std::uint64_t>{}(v.id) * 0x9e3779b97f4a7c15ULL;
    n->variables = 1;
    n->var = std::move(v);
    return Term(std::move(n));
}

Term Term::apply(SymbolRef f, std::vector<Term> args) {
    if (!f) throw SortError("null function symbol");
    if (args.size() != f->arity()) {
        throw SortError("symbol '" + f->name + "' expects " + std::to_string(f->arity()) +
                        " argument(s), got " + std::to_string(args.size()));
    }
    auto n = std::make_shared<Node>();
    n->hash = std::hash<std::string>{}(f->name);
    n->symbols = 1;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].sort() != f->inputs[i]) {
            throw SortError("argument " + std::to_string(i + 1) + " of '" + f->name + "' has sort " +
                            args[i].sort().name + ", expected " + f->inputs[i].name);
        }
        n->hash = n->hash * 31 + args[i].hash();
        n->symbols += args[i].symbolCount();
        n->variables += args[i].varOccurrences();
        n->depth = std::max(n->depth, args[i].depth() + 1);
    }
    n->sort = f->output;
    n->symbol = std::move(f);
    n->args = std::move(args);
    return Term(std::move(n));
}

bool Term::isVar() const { return node_->var.has_value(); }
const Var& Term::var() const { return *node_->var; }
const SymbolRef& Term::symbol() const { return node_->symbol; }
std::span<const Term> Term::args() const { return node_->args; }
const Sort& Term::sort() const { return node_->sort; }
std::size_t Term::symbolCount() const { return node_->symbols; }
std::size_t Term::varOccurrences() const { return node_->variables; }
std::size_t Term::depth() const { return node_->depth; }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.isVar() != b.isVar()) return false;
    if (a.isVar()) return a.var() == b.var();
    if (!sameSymbol(a.symbol(), b.symbol())) return false;
    auto as = a.args();
    auto bs = b.args();
    return std::equal(as.begin(), as.end(), bs.begin(), bs.end());
}

const Sort& sortOf(const Term& t) { return t.sort(); }

void collectVars(const Term& t, std::vector<Var>& out) {
    if (t.isVar()) {
        if (std::find(out.begin(), out.end(), t.var()) == out.end()) out.push_back(t.var());
        return;
    }
    if (t.isGround()) return;
    for (const auto& a : t.args()) collectVars(a, out);
}

std::vector<Var> vars(const Term& t) {
    std::vector<Var> out;
    collectVars(t, out);
    return out;
}

bool occurs(const Var& x, const Term& t) {
    if (t.isVar()) return t.var() == x;
    if (t.isGround()) return false;
    return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return occurs(x, a); });
}

namespace {
bool linearWalk(const Term& t, std::unordered_set<std::uint64_t>& seen) {
    if (t.isVar()) return seen.insert(t.var().id).second;
    for (const auto& a : t.args())
        if (!linearWalk(a, seen)) return false;
    return true;
}
}  // namespace

bool isLinear(const Term& t) {
    std::unordered_set<std::uint64_t> seen;
    return linearWalk(t, seen);
}

Substitution::Substitution(std::initializer_list<std::pair<Var, Term>> init) {
    for (const auto& [x, t] : init) bind(x, t);
}

void Substitution::bind(const Var& x, Term t) {
    if (t.sort() != x.sort) {
        throw SortError("cannot bind " + x.name + " : " + x.sort.name + " to a term of sort " + t.sort().name);
    }
    auto [it, inserted] = map_.insert_or_assign(x, std::move(t));
    if (inserted) order_.push_back(x);
}

const Term* Substitution::lookup(const Var& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
}

std::vector<Var> Substitution::domain() const {
    std::vector<Var> out;
    for (const auto& x : order_) {
        const Term& t = map_.at(x);
        if (!(t.isVar() && t.var() == x)) out.push_back(x);
    }
    return out;
}

Substitution Substitution::then(const Substitution& other) const {
    Substitution out;
    for (const auto& x : order_) out.bind(x, lctrs::apply(map_.at(x), other));
    for (const auto& x : other.order_)
        if (!contains(x)) out.bind(x, *other.lookup(x));
    return out;
}

Term apply(const Term& t, const Substitution& sigma) {
    if (t.isVar()) {
        const Term* img = sigma.lookup(t.var());
        return img ? *img : t;
    }
    if (t.isGround() || sigma.empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    bool changed = false;
    for (const auto& a : t.args()) {
        args.push_back(apply(a, sigma));
        changed = changed || !(args.back() == a);
    }
    return changed ? Term::apply(t.symbol(), std::move(args)) : t;
}

bool matchInto(const Term& pattern, const Term& subject, Substitution& into) {
    if (pattern.isVar()) {
        if (pattern.sort() != subject.sort()) return false;
        if (const Term* prev = into.lookup(pattern.var())) return *prev == subject;
        into.bind(pattern.var(), subject);
        return true;
    }
    if (subject.isVar() || !sameSymbol(pattern.symbol(), subject.symbol())) return false;
    auto ps = pattern.args();
    auto ss = subject.args();
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (!matchInto(ps[i], ss[i], into)) return false;
    return true;
}

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
    Substitution s;
    if (!matchInto(pattern, subject, s)) return std::nullopt;
    return s;
}

const Term& subtermAt(const Term& t, std::span<const std::size_t> p) {
    const Term* cur = &t;
    for (std::size_t i : p) {
        if (cur->isVar() || i >= cur->args().size()) {
            throw PositionError("position " + toString(Position(p.begin(), p.end())) + " is not valid in " +
                                toString(t));
        }
        cur = &cur->args()[i];
    }
    return *cur;
}

Term replaceAt(const Term& t, std::span<const std::size_t> p, Term u) {
    if (p.empty()) {
        if (u.sort() != t.sort()) {
            throw SortError("replacement of sort " + u.sort().name + " at a position of sort " + t.sort().name);
        }
        return u;
    }
    if (t.isVar() || p.front() >= t.args().size()) {
        throw PositionError("position index " + std::to_string(p.front()) + " is not valid in " + toString(t));
    }
    std::vector<Term> args(t.args().begin(), t.args().end());
    args[p.front()] = replaceAt(args[p.front()], p.subspan(1), std::move(u));
    return Term::apply(t.symbol(), std::move(args));
}

namespace {
void positionsWalk(const Term& t, Position& cur, std::vector<Position>& out) {
    out.push_back(cur);
    if (t.isVar()) return;
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        cur.push_back(i);
        positionsWalk(t.args()[i], cur, out);
        cur.pop_back();
    }
}

// Precedence levels, loosest first. Atoms bind tightest.
enum Level : int { LImp = 1, LOr, LAnd, LNot, LCmp, LAdd, LMul, LAtom };

struct InfixInfo {
    const char* text;
    int level;
    char assoc;  // 'l', 'r' or 'n'
};

std::optional<InfixInfo> infixOf(const FunSymbol& f) {
    switch (f.op) {
        case TheoryOp::Implies: return InfixInfo{"=>", LImp, 'r'};
        case TheoryOp::Or: return InfixInfo{"\\/", LOr, 'l'};
        case TheoryOp::And: return InfixInfo{"/\\", LAnd, 'l'};
        case TheoryOp::Eq: return InfixInfo{"=", LCmp, 'n'};
        case TheoryOp::Neq: return InfixInfo{"!=", LCmp, 'n'};
        case TheoryOp::Le: return InfixInfo{"<=", LCmp, 'n'};
        case TheoryOp::Lt: return InfixInfo{"<", LCmp, 'n'};
        case TheoryOp::Ge: return InfixInfo{">=", LCmp, 'n'};
        case TheoryOp::Gt: return InfixInfo{">", LCmp, 'n'};
        case TheoryOp::Add: return InfixInfo{"+", LAdd, 'l'};
        case TheoryOp::Sub: return InfixInfo{"-", LAdd, 'l'};
        case TheoryOp::Mul: return InfixInfo{"*", LMul, 'l'};
        default: return std::nullopt;
    }
}

int levelOf(const Term& t) {
    if (t.isVar()) return LAtom;
    if (t.symbol()->op == TheoryOp::Not) return LNot;
    if (auto info = infixOf(*t.symbol())) return info->level;
    return LAtom;
}

using VarText = std::function<std::string(const Var&)>;

void print(std::ostream& os, const Term& t, const VarText& vt);

void printWrapped(std::ostream& os, const Term& t, bool parens, const VarText& vt) {
    if (parens) os << '(';
    print(os, t, vt);
    if (parens) os << ')';
}

void print(std::ostream& os, const Term& t, const VarText& vt) {
    if (t.isVar()) {
        os << (vt ? vt(t.var()) : t.var().name);
        return;
    }
    const auto& f = *t.symbol();
    if (f.isValue()) {
        os << f.value->literal();
        return;
    }
    if (f.op == TheoryOp::Not) {
        os << "not ";
        printWrapped(os, t.arg(0), levelOf(t.arg(0)) != LAtom, vt);
        return;
    }
    if (auto info = infixOf(f)) {
        int l = levelOf(t.arg(0));
        int r = levelOf(t.arg(1));
        bool lp = l < info->level || (l == info->level && info->assoc != 'l');
        bool rp = r < info->level || (r == info->level && info->assoc != 'r');
        printWrapped(os, t.arg(0), lp, vt);
        os << ' ' << info->text << ' ';
        printWrapped(os, t.arg(1), rp, vt);
        return;
    }
    os << f.name;
    if (f.arity() == 0) return;
    os << '(';
    for (std::size_t i = 0; i < f.arity(); ++i) {
        if (i) os << ", ";
        print(os, t.arg(i), vt);
    }
    os << ')';
}
}  // namespace

std::vector<Position> positions(const Term& t) {
    std::vector<Position> out;
    Position cur;
    positionsWalk(t, cur, out);
    return out;
}

std::string toString(const Term& t) {
    std::ostringstream os;
    print(os, t, {});
    return os.str();
}

std::string toString(const Term& t, const std::function<std::string(const Var&)>& varText) {
    std::ostringstream os;
    print(os, t, varText);
    return os.str();
}

std::string toString(const Position& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(p[i]);
    }
    return out + "]";
}

std::string toString(const Substitution& s) {
    std::string out = "[";
    bool first = true;
    for (const auto& x : s.boundVars()) {
        if (!first) out += ", ";
        first = false;
        out += x.name + ":=" + toString(*s.lookup(x));
    }
    return out + "]";
}

}  // namespace lctrs
