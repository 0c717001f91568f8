#include <sstream>

#include "lctrs/solver.hpp"

namespace lctrs {

namespace {

std::string smtName(const Var& x) { return "v" + std::to_string(x.id); }

std::string smtInt(const BigInt& n) { return n < 0 ? "(- " + BigInt(-n).str() + ")" : n.str(); }

std::string smtSort(const Sort& s) { return s == boolSort() ? "Bool" : "Int"; }

// Arrays become a pair (map : Int -> Int, size : Int).
struct ArrayRepr {
    std::string map;
    std::string size;
};

struct Encoder {
    bool nonlinear = false;

    ArrayRepr array(const Term& t) {
        if (t.isVar()) return {smtName(t.var()) + "_m", smtName(t.var()) + "_n"};
        if (!t.isValue()) throw EvalError("array-valued term " + toString(t) + " is not encodable");
        const auto& a = valueOf(t).asArray();
        std::string m = "((as const (Array Int Int)) 0)";
        for (std::size_t i = 0; i < a.size(); ++i) m = "(store " + m + " " + std::to_string(i) + " " + smtInt(a[i]) + ")";
        return {m, std::to_string(a.size())};
    }

    std::string term(const Term& t) {
        if (t.isVar()) return smtName(t.var());
        const auto& f = *t.symbol();
        if (f.isValue()) {
            const Value& v = *f.value;
            if (v.isBool()) return v.asBool() ? "true" : "false";
            if (v.isInt()) return smtInt(v.asInt());
            throw EvalError("array value outside an array position");
        }
        auto bin = [&](const char* op) { return std::string("(") + op + " " + term(t.arg(0)) + " " + term(t.arg(1)) + ")"; };
        switch (f.op) {
            case TheoryOp::And: return bin("and");
            case TheoryOp::Or: return bin("or");
            case TheoryOp::Implies: return bin("=>");
            case TheoryOp::Not: return "(not " + term(t.arg(0)) + ")";
            case TheoryOp::Eq:
            case TheoryOp::Neq: {
                std::string eq;
                if (t.arg(0).sort() == arraySort()) {
                    auto a = array(t.arg(0));
                    auto b = array(t.arg(1));
                    eq = "(and (= " + a.size + " " + b.size + ") (forall ((i Int)) (=> (and (<= 0 i) (< i " + a.size +
                         ")) (= (select " + a.map + " i) (select " + b.map + " i)))))";
                } else {
                    eq = bin("=");
                }
                return f.op == TheoryOp::Eq ? eq : "(not " + eq + ")";
            }
            case TheoryOp::Add: return bin("+");
            case TheoryOp::Sub: return bin("-");
            case TheoryOp::Mul:
                if (!t.arg(0).isGround() && !t.arg(1).isGround()) nonlinear = true;
                return bin("*");
            case TheoryOp::Le: return bin("<=");
            case TheoryOp::Lt: return bin("<");
            case TheoryOp::Ge: return bin(">=");
            case TheoryOp::Gt: return bin(">");
            case TheoryOp::Size: return array(t.arg(0)).size;
            case TheoryOp::Select: {
                auto a = array(t.arg(0));
                std::string i = term(t.arg(1));
                return "(ite (and (<= 0 " + i + ") (< " + i + " " + a.size + ")) (select " + a.map + " " + i + ") 0)";
            }
            case TheoryOp::None: break;
        }
        throw EvalError("symbol '" + f.name + "' is not a theory symbol");
    }
};

}  // namespace

std::string encodeSmtLib(const ValidityQuery& q) {
    Encoder enc;
    std::string body;
    if (q.disjuncts.empty()) {
        body = "false";
    } else if (q.disjuncts.size() == 1) {
        body = enc.term(q.disjuncts.front());
    } else {
        body = "(or";
        for (const auto& d : q.disjuncts) body += " " + enc.term(d);
        body += ")";
    }

    std::vector<std::string> guards;
    if (!q.existential.empty()) {
        std::string binders;
        std::vector<std::string> sizes;
        for (const auto& y : q.existential) {
            if (y.sort == arraySort()) {
                binders += "(" + smtName(y) + "_m (Array Int Int)) (" + smtName(y) + "_n Int) ";
                sizes.push_back("(>= " + smtName(y) + "_n 0)");
            } else {
                binders += "(" + smtName(y) + " " + smtSort(y.sort) + ") ";
            }
        }
        binders.pop_back();
        if (!sizes.empty()) {
            std::string all = "(and";
            for (const auto& s : sizes) all += " " + s;
            body = all + " " + body + ")";
        }
        body = "(exists (" + binders + ") " + body + ")";
    }

    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    os << "(set-logic " << (enc.nonlinear ? "AUFNIA" : "AUFLIA") << ")\n";
    for (const auto& x : q.universal) {
        if (x.sort == arraySort()) {
            os << "(declare-const " << smtName(x) << "_m (Array Int Int))\n";
            os << "(declare-const " << smtName(x) << "_n Int)\n";
            guards.push_back("(>= " + smtName(x) + "_n 0)");
        } else {
            os << "(declare-const " << smtName(x) << " " << smtSort(x.sort) << ")\n";
        }
    }
    std::string negated = "(not " + body + ")";
    if (!guards.empty()) {
        std::string all = "(and";
        for (const auto& g : guards) all += " " + g;
        negated = all + " " + negated + ")";
    }
    os << "(assert " << negated << ")\n";
    os << "(check-sat)\n";
    return os.str();
}

}  // namespace lctrs
