#include "stochcert/expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "power.hpp"

namespace stochcert {

struct Expr::Node {
    ExprKind kind;
    Number value;
    int index = 0;
    std::vector<Expr> operands;
};

namespace {

const Number& zero_number()
{
    static const Number zero = Number::integer(0);
    return zero;
}

// Integer b-th root of v >= 0 when v is a perfect b-th power.
std::optional<std::int64_t> exact_root(std::int64_t v, std::int64_t b)
{
    if (v <= 1 || b == 1)
        return v;
    auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(b))));
    for (std::int64_t g = std::max<std::int64_t>(guess - 1, 1); g <= guess + 1; ++g) {
        std::optional<Rational> acc = Rational(1);
        for (std::int64_t i = 0; i < b && acc; ++i)
            acc = checked_mul(*acc, Rational(g));
        if (acc && acc->num() == v)
            return g;
    }
    return std::nullopt;
}

// |c|^r for a constant c, exact when c is tagged and the result is rational
// (small integer r, or r = p/q with |c| a perfect q-th power).
std::optional<Number> fold_abs_power(const Number& c, const Number& r)
{
    double base = std::fabs(c.value());
    if (base == 0.0) {
        if (r.value() > 0.0)
            return Number::integer(0);
        return std::nullopt;
    }
    if (c.is_exact() && r.is_exact() && std::llabs(r.exact()->num()) <= 64 && r.exact()->den() <= 64) {
        auto num = exact_root(std::llabs(c.exact()->num()), r.exact()->den());
        auto den = exact_root(c.exact()->den(), r.exact()->den());
        if (num && den) {
            Rational b(*num, *den);
            std::int64_t k = r.exact()->num();
            if (k < 0)
                b = Rational(b.den(), b.num());
            std::optional<Rational> acc = Rational(1);
            for (std::int64_t i = 0; i < std::llabs(k) && acc; ++i)
                acc = checked_mul(*acc, b);
            if (acc)
                return Number(*acc);
        }
    }
    return Number(detail::abs_power(base, r.value()));
}

Number sign_of(const Number& c)
{
    if (c.value() > 0.0)
        return Number::integer(1);
    if (c.value() < 0.0)
        return Number::integer(-1);
    return Number::integer(0);
}

} // namespace

Expr::Expr() : Expr(constant(Number::integer(0))) {}

Expr Expr::constant(Number value)
{
    return Expr(std::make_shared<const Node>(Node{ExprKind::Constant, value, 0, {}}));
}

Expr Expr::var(int index)
{
    if (index < 1)
        throw std::invalid_argument("variable index must be >= 1");
    return Expr(std::make_shared<const Node>(Node{ExprKind::Var, Number(), index, {}}));
}

Expr Expr::raw_sum(std::vector<Expr> terms)
{
    if (terms.empty())
        throw std::invalid_argument("empty sum");
    return Expr(std::make_shared<const Node>(Node{ExprKind::Sum, Number(), 0, std::move(terms)}));
}

Expr Expr::raw_product(std::vector<Expr> factors)
{
    if (factors.empty())
        throw std::invalid_argument("empty product");
    return Expr(std::make_shared<const Node>(Node{ExprKind::Product, Number(), 0, std::move(factors)}));
}

Expr Expr::raw_abs_pow(Expr base, Number exponent)
{
    if (!std::isfinite(exponent.value()))
        throw std::invalid_argument("non-finite exponent");
    return Expr(std::make_shared<const Node>(Node{ExprKind::AbsPow, exponent, 0, {std::move(base)}}));
}

Expr Expr::raw_sign(Expr base)
{
    return Expr(std::make_shared<const Node>(Node{ExprKind::Sign, Number(), 0, {std::move(base)}}));
}

Expr Expr::raw_spow(Expr base, Number exponent)
{
    if (!std::isfinite(exponent.value()))
        throw std::invalid_argument("non-finite exponent");
    return Expr(std::make_shared<const Node>(Node{ExprKind::SPow, exponent, 0, {std::move(base)}}));
}

Expr Expr::sum(std::vector<Expr> terms)
{
    std::vector<Expr> flat;
    Number folded = Number::integer(0);
    bool have_constant = false;
    for (auto& t : terms) {
        if (t.kind() == ExprKind::Sum) {
            for (const auto& inner : t.operands()) {
                if (inner.is_constant()) {
                    folded = folded + inner.value();
                    have_constant = true;
                } else {
                    flat.push_back(inner);
                }
            }
        } else if (t.is_constant()) {
            folded = folded + t.value();
            have_constant = true;
        } else {
            flat.push_back(std::move(t));
        }
    }
    if (have_constant && !folded.is_zero())
        flat.push_back(constant(folded));
    if (flat.empty())
        return constant(have_constant ? folded : Number::integer(0));
    if (flat.size() == 1)
        return flat.front();
    return raw_sum(std::move(flat));
}

Expr Expr::product(std::vector<Expr> factors)
{
    std::vector<Expr> flat;
    Number coeff = Number::integer(1);
    auto take = [&](const Expr& f) {
        if (f.is_constant())
            coeff = coeff * f.value();
        else
            flat.push_back(f);
    };
    for (const auto& f : factors) {
        if (f.kind() == ExprKind::Product) {
            for (const auto& inner : f.operands())
                take(inner);
        } else {
            take(f);
        }
    }
    if (coeff.is_zero())
        return constant(Number::integer(0));
    if (flat.empty())
        return constant(coeff);
    if (!coeff.is_one())
        flat.insert(flat.begin(), constant(coeff));
    if (flat.size() == 1)
        return flat.front();
    return raw_product(std::move(flat));
}

Expr Expr::abs_pow(Expr base, Number exponent)
{
    if (exponent.is_zero())
        return constant(Number::integer(1));
    switch (base.kind()) {
    case ExprKind::Constant:
        if (auto folded = fold_abs_power(base.value(), exponent))
            return constant(*folded);
        break;
    case ExprKind::AbsPow:
    case ExprKind::SPow: {
        Number merged = base.value() * exponent;
        return abs_pow(base.base(), merged);
    }
    default:
        break;
    }
    return raw_abs_pow(std::move(base), exponent);
}

Expr Expr::sign(Expr base)
{
    if (base.is_constant())
        return constant(sign_of(base.value()));
    if (base.kind() == ExprKind::Sign)
        return base;
    return raw_sign(std::move(base));
}

Expr Expr::spow(Expr base, Number exponent)
{
    if (exponent.is_zero())
        return sign(std::move(base));
    switch (base.kind()) {
    case ExprKind::Constant:
        if (auto folded = fold_abs_power(base.value(), exponent))
            return constant(sign_of(base.value()) * *folded);
        break;
    case ExprKind::SPow: {
        Number merged = base.value() * exponent;
        return spow(base.base(), merged);
    }
    default:
        break;
    }
    return raw_spow(std::move(base), exponent);
}

ExprKind Expr::kind() const { return node_->kind; }

const Number& Expr::value() const
{
    if (node_->kind == ExprKind::Constant || node_->kind == ExprKind::AbsPow || node_->kind == ExprKind::SPow)
        return node_->value;
    return zero_number();
}

int Expr::index() const { return node_->index; }

const std::vector<Expr>& Expr::operands() const { return node_->operands; }

Expr normalize(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Var:
        return e;
    case ExprKind::Sum:
    case ExprKind::Product: {
        std::vector<Expr> ops;
        ops.reserve(e.operands().size());
        for (const auto& op : e.operands())
            ops.push_back(normalize(op));
        return e.kind() == ExprKind::Sum ? Expr::sum(std::move(ops)) : Expr::product(std::move(ops));
    }
    case ExprKind::AbsPow:
        return Expr::abs_pow(normalize(e.base()), e.value());
    case ExprKind::Sign:
        return Expr::sign(normalize(e.base()));
    case ExprKind::SPow:
        return Expr::spow(normalize(e.base()), e.value());
    }
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case ExprKind::Constant:
        return a.value().same_as(b.value(), 1e-15);
    case ExprKind::Var:
        return a.index() == b.index();
    case ExprKind::AbsPow:
    case ExprKind::SPow:
        if (!a.value().same_as(b.value(), 1e-15))
            return false;
        [[fallthrough]];
    default:
        break;
    }
    const auto& x = a.operands();
    const auto& y = b.operands();
    if (x.size() != y.size())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!structurally_equal(x[i], y[i]))
            return false;
    return true;
}

namespace {

std::string number_text(const Number& n, bool wrap_negative)
{
    std::string s = n.str();
    bool compound = n.is_exact() && !n.exact()->is_integer();
    bool negative = n.value() < 0.0 || (!s.empty() && s[0] == '-');
    if (compound || (negative && wrap_negative))
        return "(" + s + ")";
    return s;
}

std::string joined(const std::vector<Expr>& ops, const char* sep)
{
    std::string out = "(";
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i)
            out += sep;
        out += to_string(ops[i]);
    }
    return out + ")";
}

} // namespace

std::string to_string(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Constant:
        return number_text(e.value(), true);
    case ExprKind::Var:
        return "x" + std::to_string(e.index());
    case ExprKind::Sum:
        return joined(e.operands(), " + ");
    case ExprKind::Product:
        return joined(e.operands(), "*");
    case ExprKind::AbsPow:
        if (e.value().is_one())
            return "abs(" + to_string(e.base()) + ")";
        return "pow(abs(" + to_string(e.base()) + "), " + e.value().str() + ")";
    case ExprKind::Sign:
        return "sign(" + to_string(e.base()) + ")";
    case ExprKind::SPow:
        return "spow(" + to_string(e.base()) + ", " + e.value().str() + ")";
    }
    return {};
}

double evaluate(const Expr& e, std::span<const double> point)
{
    switch (e.kind()) {
    case ExprKind::Constant:
        return e.value().value();
    case ExprKind::Var:
        if (static_cast<std::size_t>(e.index()) > point.size())
            throw std::out_of_range("variable x" + std::to_string(e.index()) + " outside point of dimension "
                                    + std::to_string(point.size()));
        return point[e.index() - 1];
    case ExprKind::Sum: {
        double acc = 0.0;
        for (const auto& t : e.operands())
            acc += evaluate(t, point);
        return acc;
    }
    case ExprKind::Product: {
        double acc = 1.0;
        for (const auto& f : e.operands())
            acc *= evaluate(f, point);
        return acc;
    }
    case ExprKind::AbsPow:
    case ExprKind::SPow: {
        double u = evaluate(e.base(), point);
        double r = e.value().value();
        if (u == 0.0 && r < 0.0)
            throw EvalError("singular evaluation of " + to_string(e) + ": negative exponent at zero base");
        double mag = detail::abs_power(std::fabs(u), r);
        return e.kind() == ExprKind::AbsPow ? mag : detail::sign(u) * mag;
    }
    case ExprKind::Sign:
        return detail::sign(evaluate(e.base(), point));
    }
    return 0.0;
}

Expr differentiate(const Expr& e, int index)
{
    switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Sign:
        return Expr();
    case ExprKind::Var:
        return Expr::constant(Number::integer(e.index() == index ? 1 : 0));
    case ExprKind::Sum: {
        std::vector<Expr> terms;
        for (const auto& t : e.operands()) {
            Expr d = differentiate(t, index);
            if (!d.is_zero())
                terms.push_back(std::move(d));
        }
        return terms.empty() ? Expr() : Expr::sum(std::move(terms));
    }
    case ExprKind::Product: {
        const auto& fs = e.operands();
        std::vector<Expr> terms;
        for (std::size_t k = 0; k < fs.size(); ++k) {
            Expr d = differentiate(fs[k], index);
            if (d.is_zero())
                continue;
            std::vector<Expr> parts;
            parts.reserve(fs.size());
            for (std::size_t j = 0; j < fs.size(); ++j)
                parts.push_back(j == k ? d : fs[j]);
            terms.push_back(Expr::product(std::move(parts)));
        }
        return terms.empty() ? Expr() : Expr::sum(std::move(terms));
    }
    case ExprKind::AbsPow:
    case ExprKind::SPow: {
        Expr inner = differentiate(e.base(), index);
        if (inner.is_zero())
            return Expr();
        const Number& r = e.value();
        Number lowered = r - Number::integer(1);
        // d|u|^r = r sign(u)|u|^{r-1} u',  d sign(u)|u|^r = r |u|^{r-1} u'
        Expr outer = e.kind() == ExprKind::AbsPow ? Expr::spow(e.base(), lowered) : Expr::abs_pow(e.base(), lowered);
        return Expr::product({Expr::constant(r), outer, inner});
    }
    }
    return Expr();
}

int max_var_index(const Expr& e)
{
    if (e.kind() == ExprKind::Var)
        return e.index();
    int m = 0;
    for (const auto& op : e.operands())
        m = std::max(m, max_var_index(op));
    return m;
}

bool provably_nonnegative(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Constant:
        return e.value().value() >= 0.0;
    case ExprKind::Var:
    case ExprKind::Sign:
        return false;
    case ExprKind::AbsPow:
        return true;
    case ExprKind::SPow:
        return e.value().is_even_integer() ? false : provably_nonnegative(e.base());
    case ExprKind::Sum:
    case ExprKind::Product:
        return std::all_of(e.operands().begin(), e.operands().end(), provably_nonnegative);
    }
    return false;
}

bool has_negative_exponent(const Expr& e)
{
    if ((e.kind() == ExprKind::AbsPow || e.kind() == ExprKind::SPow) && e.value().value() < 0.0)
        return true;
    return std::any_of(e.operands().begin(), e.operands().end(), has_negative_exponent);
}

CompiledExpr::CompiledExpr(const Expr& e) { emit(e, 1); }

void CompiledExpr::emit(const Expr& e, int depth)
{
    max_depth_ = std::max(max_depth_, depth);
    switch (e.kind()) {
    case ExprKind::Constant:
        code_.push_back({Op::Const, 0, e.value().value()});
        return;
    case ExprKind::Var:
        code_.push_back({Op::Var, e.index() - 1, 0.0});
        return;
    case ExprKind::Sum:
    case ExprKind::Product: {
        int slot = depth;
        for (const auto& op : e.operands())
            emit(op, slot++);
        code_.push_back({e.kind() == ExprKind::Sum ? Op::Add : Op::Mul, static_cast<int>(e.operands().size()), 0.0});
        return;
    }
    case ExprKind::AbsPow:
        emit(e.base(), depth);
        code_.push_back({Op::AbsPow, 0, e.value().value()});
        return;
    case ExprKind::Sign:
        emit(e.base(), depth);
        code_.push_back({Op::Sign, 0, 0.0});
        return;
    case ExprKind::SPow:
        emit(e.base(), depth);
        code_.push_back({Op::SPow, 0, e.value().value()});
        return;
    }
}

double CompiledExpr::operator()(std::span<const double> point) const
{
    if (code_.empty())
        return 0.0;
    std::array<double, 64> fixed; // left uninitialized: this is the simulator's inner loop
    fixed[0] = 0.0;
    std::vector<double> heap;
    double* stack = fixed.data();
    if (max_depth_ > static_cast<int>(fixed.size())) {
        heap.resize(max_depth_);
        stack = heap.data();
    }
    int top = 0;
    for (std::size_t pc = 0; pc < code_.size(); ++pc) {
        const Instr& in = code_[pc];
        switch (in.op) {
        case Op::Const:
            stack[top++] = in.value;
            break;
        case Op::Var:
            if (static_cast<std::size_t>(in.arg) >= point.size())
                throw std::out_of_range("variable x" + std::to_string(in.arg + 1) + " outside point of dimension "
                                        + std::to_string(point.size()));
            stack[top++] = point[in.arg];
            break;
        case Op::Add: {
            double acc = 0.0;
            for (int i = top - in.arg; i < top; ++i)
                acc += stack[i];
            top -= in.arg;
            stack[top++] = acc;
            break;
        }
        case Op::Mul: {
            double acc = 1.0;
            for (int i = top - in.arg; i < top; ++i)
                acc *= stack[i];
            top -= in.arg;
            stack[top++] = acc;
            break;
        }
        case Op::AbsPow:
        case Op::SPow: {
            double u = stack[top - 1];
            if (u == 0.0 && in.value < 0.0)
                throw EvalError("singular evaluation at instruction " + std::to_string(pc)
                                + ": negative exponent at zero base");
            double mag = detail::abs_power(std::fabs(u), in.value);
            stack[top - 1] = in.op == Op::AbsPow ? mag : detail::sign(u) * mag;
            break;
        }
        case Op::Sign:
            stack[top - 1] = detail::sign(stack[top - 1]);
            break;
        }
    }
    return stack[0];
}

} // namespace stochcert
