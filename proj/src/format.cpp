#include "lctrs/format.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace lctrs {

const char* toString(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::Lexical: return "lexical";
        case ParseErrorKind::Syntax: return "syntax";
        case ParseErrorKind::UnknownTheory: return "unknown-theory";
        case ParseErrorKind::UnknownSort: return "unknown-sort";
        case ParseErrorKind::UnknownSymbol: return "unknown-symbol";
        case ParseErrorKind::Duplicate: return "duplicate";
        case ParseErrorKind::ArityMismatch: return "arity-mismatch";
        case ParseErrorKind::IllSorted: return "ill-sorted";
        case ParseErrorKind::AmbiguousSort: return "ambiguous-sort";
        case ParseErrorKind::ConstraintNotBool: return "constraint-not-bool";
        case ParseErrorKind::ConstraintNotLogical: return "constraint-not-logical";
        case ParseErrorKind::LhsVariable: return "lhs-variable";
        case ParseErrorKind::LhsLogical: return "lhs-logical";
        case ParseErrorKind::MixedComparison: return "mixed-comparison";
        case ParseErrorKind::TooDeep: return "too-deep";
    }
    return "?";
}

namespace {

std::string located(const Span& s, const std::string& msg, const std::string& expected) {
    std::string out = std::to_string(s.line) + ":" + std::to_string(s.column) + ": " + msg;
    if (!expected.empty()) out += " (expected " + expected + ")";
    return out;
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, Span span, std::string message, std::string expected)
    : std::runtime_error(located(span, message, expected)),
      kind_(kind),
      span_(span),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok {
    Ident, Int, Array,
    KwTheory, KwSorts, KwSignature, KwRules, KwNot,
    Arrow, DArrow, LBrack, RBrack, LParen, RParen, Comma, Colon,
    Star, Plus, Minus, Le, Lt, Ge, Gt, Eq, Neq, And, Or,
    End,
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Array: return "array literal";
        case Tok::KwTheory: return "THEORY";
        case Tok::KwSorts: return "SORTS";
        case Tok::KwSignature: return "SIGNATURE";
        case Tok::KwRules: return "RULES";
        case Tok::KwNot: return "'not'";
        case Tok::Arrow: return "'->'";
        case Tok::DArrow: return "'=>'";
        case Tok::LBrack: return "'['";
        case Tok::RBrack: return "']'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Star: return "'*'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Le: return "'<='";
        case Tok::Lt: return "'<'";
        case Tok::Ge: return "'>='";
        case Tok::Gt: return "'>'";
        case Tok::Eq: return "'='";
        case Tok::Neq: return "'!='";
        case Tok::And: return "'/\\'";
        case Tok::Or: return "'\\/'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
    BigInt num;
    IntArray arr;
};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipBlank();
            Token t;
            t.span = here();
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (identStart(c)) {
                std::size_t start = pos_;
                while (pos_ < src_.size() && identChar(src_[pos_])) advance();
                t.text = std::string(src_.substr(start, pos_ - start));
                t.kind = keyword(t.text);
            } else if (digit(c) || (c == '-' && peekDigit(1) && !operandBefore(out))) {
                t.kind = Tok::Int;
                t.num = number();
            } else if (c == '{') {
                t.kind = Tok::Array;
                t.arr = array();
            } else {
                t.kind = punct();
            }
            t.span.length = pos_ - t.span.offset;
            if (t.text.empty()) t.text = std::string(src_.substr(t.span.offset, t.span.length));
            out.push_back(std::move(t));
        }
    }

private:
    Span here() const { return Span{line_, col_, pos_, 0}; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipBlank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == ';' && pos_ + 1 < src_.size() && src_[pos_ + 1] == ';') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    bool peekDigit(std::size_t k) const { return pos_ + k < src_.size() && digit(src_[pos_ + k]); }

    static bool operandBefore(const std::vector<Token>& out) {
        if (out.empty()) return false;
        Tok k = out.back().kind;
        return k == Tok::Ident || k == Tok::Int || k == Tok::Array || k == Tok::RParen;
    }

    static Tok keyword(const std::string& s) {
        if (s == "THEORY") return Tok::KwTheory;
        if (s == "SORTS") return Tok::KwSorts;
        if (s == "SIGNATURE") return Tok::KwSignature;
        if (s == "RULES") return Tok::KwRules;
        if (s == "not") return Tok::KwNot;
        return Tok::Ident;
    }

    [[noreturn]] void fail(const std::string& msg, const std::string& expected = {}) const {
        Span s = here();
        s.length = pos_ < src_.size() ? 1 : 0;
        throw ParseError(ParseErrorKind::Lexical, s, msg, expected);
    }

    BigInt number() {
        std::string digits;
        if (src_[pos_] == '-') {
            digits += '-';
            advance();
        }
        if (pos_ >= src_.size() || !digit(src_[pos_])) fail("malformed integer literal", "digit");
        while (pos_ < src_.size() && digit(src_[pos_])) {
            digits += src_[pos_];
            advance();
        }
        if (pos_ < src_.size() && identStart(src_[pos_])) fail("identifier cannot start with a digit");
        return BigInt(digits);
    }

    IntArray array() {
        advance();  // {
        IntArray out;
        auto blank = [&] {
            while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) advance();
        };
        blank();
        if (pos_ < src_.size() && src_[pos_] == '}') {
            advance();
            return out;
        }
        while (true) {
            blank();
            if (pos_ >= src_.size() || !(digit(src_[pos_]) || (src_[pos_] == '-' && peekDigit(1))))
                fail("malformed array literal", "integer");
            out.push_back(number());
            blank();
            if (pos_ < src_.size() && src_[pos_] == ',') {
                advance();
                continue;
            }
            if (pos_ < src_.size() && src_[pos_] == '}') {
                advance();
                return out;
            }
            fail("malformed array literal", "',' or '}'");
        }
    }

    Tok punct() {
        char c = src_[pos_];
        char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        auto two = [&](Tok t) {
            advance();
            advance();
            return t;
        };
        auto one = [&](Tok t) {
            advance();
            return t;
        };
        switch (c) {
            case '-': return n == '>' ? two(Tok::Arrow) : one(Tok::Minus);
            case '=': return n == '>' ? two(Tok::DArrow) : one(Tok::Eq);
            case '<': return n == '=' ? two(Tok::Le) : one(Tok::Lt);
            case '>': return n == '=' ? two(Tok::Ge) : one(Tok::Gt);
            case '!':
                if (n == '=') return two(Tok::Neq);
                break;
            case '/':
                if (n == '\\') return two(Tok::And);
                break;
            case '\\':
                if (n == '/') return two(Tok::Or);
                break;
            case '[': return one(Tok::LBrack);
            case ']': return one(Tok::RBrack);
            case '(': return one(Tok::LParen);
            case ')': return one(Tok::RParen);
            case ',': return one(Tok::Comma);
            case ':': return one(Tok::Colon);
            case '*': return one(Tok::Star);
            case '+': return one(Tok::Plus);
            default: break;
        }
        auto uc = static_cast<unsigned char>(c);
        if (std::isprint(uc)) fail(std::string("unexpected character '") + c + "'");
        static const char* hex = "0123456789abcdef";
        fail(std::string("unexpected byte 0x") + hex[uc >> 4] + hex[uc & 15]);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// ---------------------------------------------------------------- syntax

struct Ast;
using AstPtr = std::unique_ptr<Ast>;

struct Ast {
    enum Kind { Int, Arr, Name, Call, Bin, Not } kind;
    Span span;
    std::string name;  // identifier or operator text
    BigInt num;
    IntArray arr;
    std::vector<AstPtr> kids;
    std::optional<std::string> annot;
    Span annotSpan;
};

Span cover(const Span& a, const Span& b) {
    Span s = a;
    if (b.offset + b.length > a.offset) s.length = b.offset + b.length - a.offset;
    return s;
}

constexpr std::size_t kMaxNesting = 256;

struct RuleAst {
    AstPtr lhs, rhs, constraint;
    Span span;
};

struct DeclAst {
    std::string name;
    Span span;
    std::vector<std::pair<std::string, Span>> inputs;
    std::pair<std::string, Span> output;
};

struct FileAst {
    std::optional<std::pair<std::string, Span>> theory;
    std::vector<std::pair<std::string, Span>> sorts;
    std::vector<DeclAst> decls;
    std::vector<RuleAst> rules;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    FileAst file() {
        FileAst f;
        if (accept(Tok::KwTheory)) {
            const Token& first = expect(Tok::Ident, "theory name");
            std::string name = first.text;
            Span span = first.span;
            while (at(Tok::Minus) && toks_[pos_ + 1].kind == Tok::Ident &&
                   toks_[pos_].span.offset == span.offset + span.length) {
                ++pos_;
                name += "-" + cur().text;
                span = cover(span, cur().span);
                ++pos_;
            }
            f.theory = {name, span};
        }
        if (accept(Tok::KwSorts)) {
            while (at(Tok::Ident)) {
                f.sorts.emplace_back(cur().text, cur().span);
                ++pos_;
            }
        }
        if (accept(Tok::KwSignature)) {
            while (at(Tok::Ident)) f.decls.push_back(decl());
        }
        if (accept(Tok::KwRules)) {
            while (!at(Tok::End) && !isSection(cur().kind)) f.rules.push_back(rule());
        }
        if (!at(Tok::End)) {
            if (isSection(cur().kind))
                fail(ParseErrorKind::Syntax, cur().span, std::string("section ") + describe(cur().kind) + " out of order",
                     "sections in the order THEORY, SORTS, SIGNATURE, RULES");
            fail(ParseErrorKind::Syntax, cur().span, std::string("unexpected ") + describe(cur().kind),
                 "section keyword");
        }
        return f;
    }

    AstPtr lone() {
        AstPtr e = expr();
        if (!at(Tok::End)) fail(ParseErrorKind::Syntax, cur().span, std::string("unexpected ") + describe(cur().kind), "end of term");
        return e;
    }

private:
    static bool isSection(Tok t) {
        return t == Tok::KwTheory || t == Tok::KwSorts || t == Tok::KwSignature || t == Tok::KwRules;
    }

    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok t) const { return cur().kind == t; }
    bool accept(Tok t) {
        if (!at(t)) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok t, const std::string& what) {
        if (!at(t)) fail(ParseErrorKind::Syntax, cur().span, std::string("unexpected ") + describe(cur().kind), what);
        return toks_[pos_++];
    }

    [[noreturn]] static void fail(ParseErrorKind k, const Span& s, const std::string& msg, const std::string& exp = {}) {
        throw ParseError(k, s, msg, exp);
    }

    DeclAst decl() {
        DeclAst d;
        d.name = cur().text;
        d.span = cur().span;
        ++pos_;
        expect(Tok::Colon, "':'");
        const Token& s0 = expect(Tok::Ident, "sort name");
        std::vector<std::pair<std::string, Span>> sorts{{s0.text, s0.span}};
        while (accept(Tok::Star)) {
            const Token& s = expect(Tok::Ident, "sort name");
            sorts.emplace_back(s.text, s.span);
        }
        if (accept(Tok::DArrow)) {
            const Token& out = expect(Tok::Ident, "sort name");
            d.inputs = std::move(sorts);
            d.output = {out.text, out.span};
        } else if (sorts.size() > 1) {
            fail(ParseErrorKind::Syntax, cur().span, "argument sorts without a result sort", "'=>'");
        } else {
            d.output = sorts.front();
        }
        return d;
    }

    RuleAst rule() {
        RuleAst r;
        r.span = cur().span;
        r.lhs = expr();
        expect(Tok::Arrow, "'->'");
        r.rhs = expr();
        if (accept(Tok::LBrack)) {
            r.constraint = expr();
            expect(Tok::RBrack, "']'");
        }
        r.span = cover(r.span, toks_[pos_ - 1].span);
        return r;
    }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& p) : p(p) {
            if (++p.depth_ > kMaxNesting)
                fail(ParseErrorKind::TooDeep, p.cur().span, "expression nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
    };

    AstPtr binary(std::string op, AstPtr l, AstPtr r) {
        auto n = std::make_unique<Ast>();
        n->kind = Ast::Bin;
        n->name = std::move(op);
        n->span = cover(l->span, r->span);
        n->kids.push_back(std::move(l));
        n->kids.push_back(std::move(r));
        return n;
    }

    AstPtr expr() { return implication(); }

    AstPtr implication() {
        DepthGuard g(*this);
        AstPtr l = disjunction();
        if (accept(Tok::DArrow)) return binary("=>", std::move(l), implication());
        return l;
    }

    AstPtr disjunction() {
        AstPtr l = conjunction();
        while (accept(Tok::Or)) l = binary("\\/", std::move(l), conjunction());
        return l;
    }

    AstPtr conjunction() {
        AstPtr l = negation();
        while (accept(Tok::And)) l = binary("/\\", std::move(l), negation());
        return l;
    }

    AstPtr negation() {
        if (at(Tok::KwNot)) {
            DepthGuard g(*this);
            Span s = cur().span;
            ++pos_;
            auto n = std::make_unique<Ast>();
            n->kind = Ast::Not;
            n->kids.push_back(negation());
            n->span = cover(s, n->kids[0]->span);
            return n;
        }
        return comparison();
    }

    static const char* comparisonText(Tok t) {
        switch (t) {
            case Tok::Le: return "<=";
            case Tok::Lt: return "<";
            case Tok::Ge: return ">=";
            case Tok::Gt: return ">";
            case Tok::Eq: return "=";
            case Tok::Neq: return "!=";
            default: return nullptr;
        }
    }

    AstPtr comparison() {
        AstPtr l = additive();
        if (const char* op = comparisonText(cur().kind)) {
            ++pos_;
            AstPtr n = binary(op, std::move(l), additive());
            if (comparisonText(cur().kind))
                fail(ParseErrorKind::MixedComparison, cur().span,
                     "comparison operators cannot be chained; add parentheses");
            return n;
        }
        return l;
    }

    AstPtr additive() {
        AstPtr l = multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            std::string op = at(Tok::Plus) ? "+" : "-";
            ++pos_;
            l = binary(op, std::move(l), multiplicative());
        }
        return l;
    }

    AstPtr multiplicative() {
        AstPtr l = atom();
        while (accept(Tok::Star)) l = binary("*", std::move(l), atom());
        return l;
    }

    AstPtr atom() {
        DepthGuard g(*this);
        auto n = std::make_unique<Ast>();
        n->span = cur().span;
        switch (cur().kind) {
            case Tok::Int:
                n->kind = Ast::Int;
                n->num = cur().num;
                ++pos_;
                return n;
            case Tok::Array:
                n->kind = Ast::Arr;
                n->arr = cur().arr;
                ++pos_;
                return n;
            case Tok::LParen: {
                ++pos_;
                AstPtr inner = expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident:
                break;
            default:
                fail(ParseErrorKind::Syntax, cur().span, std::string("unexpected ") + describe(cur().kind), "term");
        }
        n->name = cur().text;
        ++pos_;
        if (accept(Tok::LParen)) {
            n->kind = Ast::Call;
            if (!at(Tok::RParen)) {
                n->kids.push_back(expr());
                while (accept(Tok::Comma)) n->kids.push_back(expr());
            }
            n->span = cover(n->span, expect(Tok::RParen, "')' or ','").span);
            return n;
        }
        n->kind = Ast::Name;
        if (accept(Tok::Colon)) {
            const Token& s = expect(Tok::Ident, "sort name");
            n->annot = s.text;
            n->annotSpan = s.span;
            n->span = cover(n->span, s.span);
        }
        return n;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

// ---------------------------------------------------------------- typing

struct Signature {
    const Theory* theory = nullptr;
    std::vector<Sort> userSorts;
    std::map<std::string, SymbolRef> symbols;

    bool hasSort(const std::string& s) const {
        Sort so{s};
        return theory->isTheorySort(so) || std::find(userSorts.begin(), userSorts.end(), so) != userSorts.end();
    }
};

bool isBoolLiteral(const std::string& n) { return n == "true" || n == "false"; }

// Infers variable sorts for one rule (or one term), then builds terms.
class Elaborator {
public:
    Elaborator(const Signature& sig, VarFactory& fresh) : sig_(sig), fresh_(fresh) {}

    // Returns the sort of `n` if determined. Records variable sorts.
    std::optional<Sort> infer(const Ast& n, const std::optional<Sort>& expected) {
        std::optional<Sort> got;
        switch (n.kind) {
            case Ast::Int:
                got = requireTheorySort(intSort(), n.span, "integer literals");
                break;
            case Ast::Arr:
                got = requireTheorySort(arraySort(), n.span, "array literals");
                break;
            case Ast::Name:
                got = inferName(n, expected);
                break;
            case Ast::Call: {
                SymbolRef f = resolveCall(n);
                for (std::size_t i = 0; i < n.kids.size(); ++i) infer(*n.kids[i], f->inputs[i]);
                got = f->output;
                break;
            }
            case Ast::Not:
                requireTheorySort(boolSort(), n.span, "'not'");
                infer(*n.kids[0], boolSort());
                got = boolSort();
                break;
            case Ast::Bin:
                got = inferBinary(n);
                break;
        }
        if (got && expected && *got != *expected)
            throw ParseError(ParseErrorKind::IllSorted, n.span,
                             "term has sort " + got->name + " but sort " + expected->name + " is required");
        return got;
    }

    Term build(const Ast& n) {
        switch (n.kind) {
            case Ast::Int: return sig_.theory->valueTerm(Value(n.num));
            case Ast::Arr: return sig_.theory->valueTerm(Value(n.arr));
            case Ast::Not: return Term::apply(sig_.theory->calcByName("not").front(), {build(*n.kids[0])});
            case Ast::Call: {
                SymbolRef f = resolveCall(n);
                std::vector<Term> args;
                for (const auto& k : n.kids) args.push_back(build(*k));
                return Term::apply(f, std::move(args));
            }
            case Ast::Bin: {
                Term l = build(*n.kids[0]);
                Term r = build(*n.kids[1]);
                return Term::apply(binarySymbol(n, l.sort()), {l, r});
            }
            case Ast::Name: break;
        }
        if (auto f = constant(n.name)) return Term::apply(f);
        auto it = sorts_.find(n.name);
        if (it == sorts_.end())
            throw ParseError(ParseErrorKind::AmbiguousSort, n.span,
                             "cannot infer the sort of variable '" + n.name + "'; annotate it, e.g. `" + n.name +
                                 " : Int`");
        auto v = vars_.find(n.name);
        if (v == vars_.end()) v = vars_.emplace(n.name, fresh_.fresh(n.name, it->second)).first;
        return Term::variable(v->second);
    }

    std::size_t knownVariables() const { return sorts_.size(); }

    /// Nullary symbol named `name`, or null if `name` denotes a variable.
    SymbolRef constant(const std::string& name) const {
        if (auto it = sig_.symbols.find(name); it != sig_.symbols.end()) return it->second;
        if (isBoolLiteral(name) && sig_.theory->isTheorySort(boolSort()))
            return sig_.theory->valueSymbol(Value(name == "true"));
        return nullptr;
    }

private:
    Sort requireTheorySort(const Sort& s, const Span& span, const std::string& what) const {
        if (!sig_.theory->isTheorySort(s))
            throw ParseError(ParseErrorKind::IllSorted, span,
                             what + " need sort " + s.name + ", which theory " + sig_.theory->name() + " lacks");
        return s;
    }

    std::optional<Sort> inferName(const Ast& n, std::optional<Sort> expected) {
        std::optional<Sort> annot;
        if (n.annot) {
            if (!sig_.hasSort(*n.annot)) throw ParseError(ParseErrorKind::UnknownSort, n.annotSpan, "unknown sort '" + *n.annot + "'");
            annot = Sort{*n.annot};
        }
        if (auto f = constant(n.name)) {
            if (f->arity() != 0)
                throw ParseError(ParseErrorKind::ArityMismatch, n.span,
                                 "symbol '" + n.name + "' expects " + std::to_string(f->arity()) + " arguments");
            if (annot && *annot != f->output)
                throw ParseError(ParseErrorKind::IllSorted, n.span, "symbol '" + n.name + "' has sort " + f->output.name);
            return f->output;
        }
        if (!sig_.theory->calcByName(n.name).empty())
            throw ParseError(ParseErrorKind::ArityMismatch, n.span, "theory symbol '" + n.name + "' needs arguments");
        std::optional<Sort> want = annot ? annot : expected;
        auto it = sorts_.find(n.name);
        if (it != sorts_.end()) {
            if (annot && *annot != it->second)
                throw ParseError(ParseErrorKind::IllSorted, n.span,
                                 "variable '" + n.name + "' is used with sorts " + it->second.name + " and " + annot->name);
            return it->second;
        }
        if (want) sorts_.emplace(n.name, *want);
        return want;
    }

    SymbolRef resolveCall(const Ast& n) const {
        SymbolRef f;
        if (auto it = sig_.symbols.find(n.name); it != sig_.symbols.end()) {
            f = it->second;
        } else {
            auto cands = sig_.theory->calcByName(n.name);
            // Operators are written infix; only named theory symbols may be applied.
            if (cands.size() == 1 && identStart(n.name[0])) f = cands.front();
        }
        if (!f) throw ParseError(ParseErrorKind::UnknownSymbol, n.span, "unknown function symbol '" + n.name + "'");
        if (f->arity() != n.kids.size())
            throw ParseError(ParseErrorKind::ArityMismatch, n.span,
                             "symbol '" + n.name + "' expects " + std::to_string(f->arity()) + " arguments, got " +
                                 std::to_string(n.kids.size()));
        return f;
    }

    std::optional<Sort> inferBinary(const Ast& n) {
        const std::string& op = n.name;
        if (op == "=" || op == "!=") {
            requireTheorySort(boolSort(), n.span, "'" + op + "'");
            auto s = infer(*n.kids[0], std::nullopt);
            if (s) {
                infer(*n.kids[1], s);
            } else if ((s = infer(*n.kids[1], std::nullopt))) {
                infer(*n.kids[0], s);
            }
            if (s && !sig_.theory->isTheorySort(*s))
                throw ParseError(ParseErrorKind::IllSorted, n.span,
                                 "'" + op + "' compares theory values, not terms of sort " + s->name);
            return boolSort();
        }
        auto cands = sig_.theory->calcByName(op);
        if (cands.empty())
            throw ParseError(ParseErrorKind::UnknownSymbol, n.span,
                             "operator '" + op + "' is not available in theory " + sig_.theory->name());
        const SymbolRef& f = cands.front();
        infer(*n.kids[0], f->inputs[0]);
        infer(*n.kids[1], f->inputs[1]);
        return f->output;
    }

    SymbolRef binarySymbol(const Ast& n, const Sort& left) const {
        for (const auto& f : sig_.theory->calcByName(n.name))
            if (f->inputs[0] == left) return f;
        throw ParseError(ParseErrorKind::IllSorted, n.span, "operator '" + n.name + "' does not apply to sort " + left.name);
    }

    const Signature& sig_;
    VarFactory& fresh_;
    std::map<std::string, Sort> sorts_;
    std::map<std::string, Var> vars_;
};

// Runs inference to a fixpoint over several (node, expected sort) roots.
void inferAll(Elaborator& el, const std::vector<std::pair<const Ast*, std::optional<Sort>>>& roots) {
    while (true) {
        std::size_t before = el.knownVariables();
        for (const auto& [n, s] : roots)
            if (n) el.infer(*n, s);
        if (el.knownVariables() == before) return;
    }
}

Signature buildSignature(const FileAst& f, Theory& theoryOut, std::vector<SymbolRef>& declared) {
    if (f.theory) {
        auto th = Theory::byName(f.theory->first);
        if (!th)
            throw ParseError(ParseErrorKind::UnknownTheory, f.theory->second, "unknown theory '" + f.theory->first + "'",
                             "core-bool, ints or int-arrays");
        theoryOut = *th;
    }
    Signature sig;
    sig.theory = &theoryOut;
    for (const auto& [name, span] : f.sorts) {
        Sort s{name};
        if (theoryOut.isTheorySort(s) || std::find(sig.userSorts.begin(), sig.userSorts.end(), s) != sig.userSorts.end())
            throw ParseError(ParseErrorKind::Duplicate, span, "sort '" + name + "' is already declared");
        sig.userSorts.push_back(s);
    }
    auto sortRef = [&](const std::pair<std::string, Span>& s) {
        if (!sig.hasSort(s.first)) throw ParseError(ParseErrorKind::UnknownSort, s.second, "unknown sort '" + s.first + "'");
        return Sort{s.first};
    };
    for (const auto& d : f.decls) {
        if (sig.symbols.count(d.name))
            throw ParseError(ParseErrorKind::Duplicate, d.span, "symbol '" + d.name + "' is already declared");
        if (!theoryOut.calcByName(d.name).empty())
            throw ParseError(ParseErrorKind::Duplicate, d.span, "symbol '" + d.name + "' is a theory symbol");
        std::vector<Sort> in;
        for (const auto& s : d.inputs) in.push_back(sortRef(s));
        Sort out = sortRef(d.output);
        SymbolRef sym;
        if (isBoolLiteral(d.name)) {
            if (!in.empty() || out != boolSort() || !theoryOut.isTheorySort(boolSort()))
                throw ParseError(ParseErrorKind::IllSorted, d.span, "'" + d.name + "' can only be declared as '" + d.name + " : Bool'");
            auto v = std::make_shared<FunSymbol>(*theoryOut.valueSymbol(Value(d.name == "true")));
            v->kind = SymbolKind::Both;
            sym = v;
        } else {
            sym = makeSymbol(d.name, std::move(in), std::move(out));
        }
        sig.symbols.emplace(d.name, sym);
        declared.push_back(sym);
    }
    return sig;
}

bool hasTermSymbol(const Term& t) {
    if (t.isVar()) return false;
    if (t.symbol()->kind == SymbolKind::Terms) return true;
    for (const auto& a : t.args())
        if (hasTermSymbol(a)) return true;
    return false;
}

Rule elaborateRule(const Signature& sig, const RuleAst& r, VarFactory& fresh) {
    Elaborator el(sig, fresh);
    if (r.lhs->kind == Ast::Int || r.lhs->kind == Ast::Arr)
        throw ParseError(ParseErrorKind::LhsLogical, r.lhs->span, "left-hand side is a logical term");
    if (r.lhs->kind == Ast::Name && !el.constant(r.lhs->name))
        throw ParseError(ParseErrorKind::LhsVariable, r.lhs->span, "left-hand side is a variable");

    auto lsort = el.infer(*r.lhs, std::nullopt);
    inferAll(el, {{r.lhs.get(), std::nullopt}, {r.rhs.get(), std::nullopt}});
    if (!el.infer(*r.rhs, std::nullopt)) inferAll(el, {{r.lhs.get(), std::nullopt}, {r.rhs.get(), lsort}});
    if (r.constraint) {
        inferAll(el, {{r.lhs.get(), std::nullopt}, {r.rhs.get(), std::nullopt}, {r.constraint.get(), std::nullopt}});
        if (!el.infer(*r.constraint, std::nullopt))
            inferAll(el, {{r.lhs.get(), std::nullopt}, {r.rhs.get(), std::nullopt}, {r.constraint.get(), boolSort()}});
    }

    Term lhs = el.build(*r.lhs);
    Term rhs = el.build(*r.rhs);
    if (lhs.sort() != rhs.sort())
        throw ParseError(ParseErrorKind::IllSorted, r.rhs->span,
                         "right-hand side has sort " + rhs.sort().name + " but left-hand side has sort " + lhs.sort().name);
    if (isLogical(lhs)) throw ParseError(ParseErrorKind::LhsLogical, r.lhs->span, "left-hand side is a logical term");
    Term constraint = sig.theory->trueTerm();
    if (r.constraint) {
        constraint = el.build(*r.constraint);
        if (constraint.sort() != boolSort())
            throw ParseError(ParseErrorKind::ConstraintNotBool, r.constraint->span,
                             "constraint has sort " + constraint.sort().name + ", not Bool");
        if (hasTermSymbol(constraint))
            throw ParseError(ParseErrorKind::ConstraintNotLogical, r.constraint->span,
                             "constraint uses symbols outside the theory");
    }
    return Rule{lhs, rhs, constraint, false};
}

Span wholeSpan(std::string_view text) { return Span{1, 1, 0, text.size()}; }

}  // namespace

Lctrs parseSystem(std::string_view text) {
    FileAst f = Parser(Lexer(text).run()).file();
    Theory theory = Theory::ints();
    std::vector<SymbolRef> declared;
    Signature sig = buildSignature(f, theory, declared);
    VarFactory fresh(1);
    std::vector<Rule> rules;
    for (const auto& r : f.rules) {
        try {
            rules.push_back(elaborateRule(sig, r, fresh));
        } catch (const SortError& e) {
            throw ParseError(ParseErrorKind::IllSorted, r.span, e.what());
        }
    }
    try {
        return Lctrs(theory, sig.userSorts, declared, std::move(rules), fresh.peek());
    } catch (const SystemError& e) {
        throw ParseError(ParseErrorKind::IllSorted, wholeSpan(text), e.what());
    }
}

Term parseTerm(const Lctrs& sys, std::string_view text, VarFactory& fresh) {
    AstPtr ast = Parser(Lexer(text).run()).lone();
    Signature sig;
    sig.theory = &sys.theory();
    sig.userSorts = sys.userSorts();
    for (const auto& f : sys.termSymbols()) sig.symbols.emplace(f->name, f);
    Elaborator el(sig, fresh);
    inferAll(el, {{ast.get(), std::nullopt}});
    try {
        return el.build(*ast);
    } catch (const SortError& e) {
        throw ParseError(ParseErrorKind::IllSorted, ast->span, e.what());
    }
}

// ---------------------------------------------------------------- printing

namespace {

bool validIdent(const std::string& s) {
    if (s.empty() || !identStart(s[0])) return false;
    return std::all_of(s.begin(), s.end(), identChar);
}

bool reservedWord(const std::string& s) {
    return s == "THEORY" || s == "SORTS" || s == "SIGNATURE" || s == "RULES" || s == "not" || isBoolLiteral(s);
}

// First occurrence of each variable (pre-order over lhs, rhs, constraint),
// and whether that occurrence sits directly under `=` or `!=`.
void firstOccurrences(const Term& t, bool underEq, std::map<std::uint64_t, bool>& seen) {
    if (t.isVar()) {
        seen.emplace(t.var().id, underEq);
        return;
    }
    bool eq = t.symbol()->op == TheoryOp::Eq || t.symbol()->op == TheoryOp::Neq;
    for (const auto& a : t.args()) firstOccurrences(a, eq, seen);
}

std::string printRule(const Lctrs& sys, const Rule& r) {
    std::set<std::string> taken;
    for (const auto& f : sys.termSymbols()) taken.insert(f->name);
    for (const auto& f : sys.theory().calcSymbols()) taken.insert(f->name);
    std::map<std::uint64_t, std::string> names;
    for (const auto& x : r.allVars()) {
        std::string base = validIdent(x.name) && !reservedWord(x.name) ? x.name : "x";
        std::string name = base;
        for (int k = 1; taken.count(name); ++k) name = base + "_" + std::to_string(k);
        taken.insert(name);
        names[x.id] = name;
    }
    std::map<std::uint64_t, bool> needAnnot;
    firstOccurrences(r.lhs, false, needAnnot);
    firstOccurrences(r.rhs, false, needAnnot);
    firstOccurrences(r.constraint, false, needAnnot);
    std::set<std::uint64_t> annotated;
    auto text = [&](const Var& x) {
        std::string s = names.at(x.id);
        if (needAnnot[x.id] && annotated.insert(x.id).second) s += " : " + x.sort.name;
        return s;
    };
    std::string out = toString(r.lhs, text) + " -> " + toString(r.rhs, text);
    bool trivial = !r.constraint.isVar() && r.constraint.isValue() && valueOf(r.constraint) == Value(true);
    if (!trivial) out += " [" + toString(r.constraint, text) + "]";
    return out;
}

}  // namespace

std::string printSystem(const Lctrs& sys) {
    std::ostringstream os;
    os << "THEORY " << sys.theory().name() << "\n";
    if (!sys.userSorts().empty()) {
        os << "SORTS";
        for (const auto& s : sys.userSorts()) os << ' ' << s.name;
        os << "\n";
    }
    if (!sys.termSymbols().empty()) {
        os << "SIGNATURE\n";
        for (const auto& f : sys.termSymbols()) {
            os << "  " << f->name << " : ";
            for (std::size_t i = 0; i < f->inputs.size(); ++i) os << (i ? " * " : "") << f->inputs[i].name;
            if (!f->inputs.empty()) os << " => ";
            os << f->output.name << "\n";
        }
    }
    if (!sys.rules().empty()) {
        os << "RULES\n";
        for (const auto& r : sys.rules()) os << "  " << printRule(sys, r) << "\n";
    }
    return os.str();
}

bool sameSystem(const Lctrs& a, const Lctrs& b) {
    if (a.theory().name() != b.theory().name() || a.userSorts() != b.userSorts()) return false;
    const auto& fa = a.termSymbols();
    const auto& fb = b.termSymbols();
    if (fa.size() != fb.size() || a.rules().size() != b.rules().size()) return false;
    for (std::size_t i = 0; i < fa.size(); ++i)
        if (!sameSymbol(fa[i], fb[i]) || fa[i]->kind != fb[i]->kind) return false;
    for (std::size_t i = 0; i < a.rules().size(); ++i)
        if (!alphaEquivalent(a.rules()[i], b.rules()[i])) return false;
    return true;
}

}  // namespace lctrs
