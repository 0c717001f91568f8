#include "lctrs/theory.hpp"

#include <algorithm>

namespace lctrs {

const Sort& boolSort() {
    static const Sort s{"Bool"};
    return s;
}
const Sort& intSort() {
    static const Sort s{"Int"};
    return s;
}
const Sort& arraySort() {
    static const Sort s{"IntArray"};
    return s;
}

void Theory::addCalc(std::string name, TheoryOp op, std::vector<Sort> in, Sort out) {
    auto f = std::make_shared<FunSymbol>();
    f->name = std::move(name);
    f->inputs = std::move(in);
    f->output = std::move(out);
    f->kind = SymbolKind::Theory;
    f->op = op;
    calc_.push_back(std::move(f));
}

Theory Theory::coreBool() {
    Theory th;
    th.name_ = "core-bool";
    th.sorts_ = {boolSort()};
    const Sort& b = boolSort();
    th.addCalc("/\\", TheoryOp::And, {b, b}, b);
    th.addCalc("\\/", TheoryOp::Or, {b, b}, b);
    th.addCalc("=>", TheoryOp::Implies, {b, b}, b);
    th.addCalc("not", TheoryOp::Not, {b}, b);
    th.addCalc("=", TheoryOp::Eq, {b, b}, b);
    th.addCalc("!=", TheoryOp::Neq, {b, b}, b);
    return th;
}

Theory Theory::ints() {
    Theory th = coreBool();
    th.name_ = "ints";
    th.sorts_.push_back(intSort());
    const Sort& b = boolSort();
    const Sort& i = intSort();
    th.addCalc("+", TheoryOp::Add, {i, i}, i);
    th.addCalc("-", TheoryOp::Sub, {i, i}, i);
    th.addCalc("*", TheoryOp::Mul, {i, i}, i);
    th.addCalc("<=", TheoryOp::Le, {i, i}, b);
    th.addCalc("<", TheoryOp::Lt, {i, i}, b);
    th.addCalc(">=", TheoryOp::Ge, {i, i}, b);
    th.addCalc(">", TheoryOp::Gt, {i, i}, b);
    th.addCalc("=", TheoryOp::Eq, {i, i}, b);
    th.addCalc("!=", TheoryOp::Neq, {i, i}, b);
    return th;
}

Theory Theory::intArrays() {
    Theory th = ints();
    th.name_ = "int-arrays";
    th.sorts_.push_back(arraySort());
    const Sort& a = arraySort();
    th.addCalc("size", TheoryOp::Size, {a}, intSort());
    th.addCalc("select", TheoryOp::Select, {a, intSort()}, intSort());
    th.addCalc("=", TheoryOp::Eq, {a, a}, boolSort());
    th.addCalc("!=", TheoryOp::Neq, {a, a}, boolSort());
    return th;
}

std::optional<Theory> Theory::byName(const std::string& name) {
    if (name == "core-bool" || name == "bool") return coreBool();
    if (name == "ints") return ints();
    if (name == "int-arrays" || name == "arrays") return intArrays();
    return std::nullopt;
}

bool Theory::isTheorySort(const Sort& s) const {
    return std::find(sorts_.begin(), sorts_.end(), s) != sorts_.end();
}

std::vector<SymbolRef> Theory::calcByName(const std::string& name) const {
    std::vector<SymbolRef> out;
    for (const auto& f : calc_)
        if (f->name == name) out.push_back(f);
    return out;
}

Sort sortOfValue(const Value& v) {
    if (v.isBool()) return boolSort();
    if (v.isInt()) return intSort();
    return arraySort();
}

SymbolRef Theory::valueSymbol(const Value& v) const {
    Sort s = sortOfValue(v);
    if (!isTheorySort(s)) throw SortError("theory " + name_ + " has no sort " + s.name);
    auto f = std::make_shared<FunSymbol>();
    f->name = v.literal();
    f->output = std::move(s);
    // Booleans are constraint-only by default; numbers and arrays are also
    // ordinary term constants.
    f->kind = v.isBool() ? SymbolKind::Theory : SymbolKind::Both;
    f->value = v;
    return f;
}

Value Theory::interpret(const FunSymbol& f, std::span<const Value> a) const {
    if (a.size() != f.arity()) throw EvalError("wrong number of arguments for " + f.name);
    switch (f.op) {
        case TheoryOp::And: return Value(a[0].asBool() && a[1].asBool());
        case TheoryOp::Or: return Value(a[0].asBool() || a[1].asBool());
        case TheoryOp::Implies: return Value(!a[0].asBool() || a[1].asBool());
        case TheoryOp::Not: return Value(!a[0].asBool());
        case TheoryOp::Eq: return Value(a[0] == a[1]);
        case TheoryOp::Neq: return Value(!(a[0] == a[1]));
        case TheoryOp::Add: return Value(BigInt(a[0].asInt() + a[1].asInt()));
        case TheoryOp::Sub: return Value(BigInt(a[0].asInt() - a[1].asInt()));
        case TheoryOp::Mul: return Value(BigInt(a[0].asInt() * a[1].asInt()));
        case TheoryOp::Le: return Value(a[0].asInt() <= a[1].asInt());
        case TheoryOp::Lt: return Value(a[0].asInt() < a[1].asInt());
        case TheoryOp::Ge: return Value(a[0].asInt() >= a[1].asInt());
        case TheoryOp::Gt: return Value(a[0].asInt() > a[1].asInt());
        case TheoryOp::Size: return Value(BigInt(a[0].asArray().size()));
        case TheoryOp::Select: {
            const auto& arr = a[0].asArray();
            const BigInt& i = a[1].asInt();
            if (i >= 0 && i < BigInt(arr.size())) return Value(arr[static_cast<std::size_t>(i)]);
            return Value(BigInt(0));
        }
        case TheoryOp::None: break;
    }
    throw EvalError("symbol '" + f.name + "' has no interpretation");
}

bool isLogical(const Term& t) {
    if (t.isVar()) return true;
    if (!t.symbol()->inTheory()) return false;
    return std::all_of(t.args().begin(), t.args().end(), [](const Term& s) { return isLogical(s); });
}

bool isValue(const Term& t) { return t.isValue(); }

const Value& valueOf(const Term& t) {
    if (!t.isValue()) throw EvalError(toString(t) + " is not a value");
    return *t.symbol()->value;
}

Value evaluate(const Theory& th, const Term& t) {
    if (t.isVar()) throw EvalError("cannot evaluate non-ground term (variable " + t.var().name + ")");
    const auto& f = *t.symbol();
    if (f.isValue()) return *f.value;
    if (!f.inTheory()) throw EvalError("cannot evaluate non-logical symbol '" + f.name + "'");
    std::vector<Value> args;
    args.reserve(f.arity());
    for (const auto& s : t.args()) args.push_back(evaluate(th, s));
    return th.interpret(f, args);
}

bool respects(const Theory& th, const Substitution& gamma, const Term& constraint) {
    for (const auto& x : vars(constraint)) {
        const Term* img = gamma.lookup(x);
        if (!img || !img->isValue()) return false;
    }
    Value v = evaluate(th, apply(constraint, gamma));
    return v.isBool() && v.asBool();
}

std::vector<Term> conjuncts(const Term& phi) {
    std::vector<Term> out;
    std::vector<Term> stack{phi};
    while (!stack.empty()) {
        Term t = stack.back();
        stack.pop_back();
        if (!t.isVar() && t.symbol()->op == TheoryOp::And) {
            stack.push_back(t.arg(1));
            stack.push_back(t.arg(0));
        } else {
            out.push_back(t);
        }
    }
    return out;
}

}  // namespace lctrs
