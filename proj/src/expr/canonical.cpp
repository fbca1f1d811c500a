#include "stochcert/canonical.hpp"

#include <algorithm>
#include <cmath>

#include "power.hpp"

namespace stochcert {

namespace {

// Merged coefficients this small relative to their parts count as cancelled
// when a coefficient has lost its exact tag.
constexpr double kInexactCancel = 1e-14;
constexpr int kMaxExpansionPower = 8;

bool factor_less(const std::pair<const int, SignedPowerFactor>& a, const std::pair<const int, SignedPowerFactor>& b)
{
    if (a.first != b.first)
        return a.first < b.first;
    if (a.second.abs_exponent.value() != b.second.abs_exponent.value())
        return a.second.abs_exponent.value() < b.second.abs_exponent.value();
    return a.second.sign_flag < b.second.sign_flag;
}

bool monomial_order(const Monomial& a, const Monomial& b)
{
    if (a.degree() != b.degree())
        return a.degree() > b.degree();
    return std::lexicographical_compare(a.factors().begin(), a.factors().end(), b.factors().begin(),
                                        b.factors().end(), factor_less);
}

Number abs_power_number(const Number& c, const Number& r)
{
    Expr folded = Expr::abs_pow(Expr::constant(c), r);
    if (folded.is_constant())
        return folded.value();
    return Number(detail::abs_power(std::fabs(c.value()), r.value()));
}

Number sign_number(const Number& c)
{
    return Number::integer(c.value() > 0.0 ? 1 : (c.value() < 0.0 ? -1 : 0));
}

Polynomial power(const Polynomial& p, std::int64_t k)
{
    Polynomial acc(std::vector<Monomial>{Monomial(Number::integer(1))});
    for (std::int64_t i = 0; i < k; ++i)
        acc = acc * p;
    return acc;
}

// Applies |.|^r (abs) or sign(.)|.|^r (signed) to a single monomial.
Monomial monomial_power(const Monomial& m, const Number& r, bool keep_signs)
{
    Number c = abs_power_number(m.coefficient(), r);
    if (keep_signs)
        c = sign_number(m.coefficient()) * c;
    Monomial out(c);
    for (const auto& [index, f] : m.factors()) {
        Number a = f.abs_exponent * r;
        int b = keep_signs ? f.sign_flag : 0;
        out = out * Monomial::variable(index, a, b);
    }
    return out;
}

} // namespace

Monomial Monomial::variable(int index, Number abs_exponent, int sign_flag)
{
    Monomial m;
    if (!abs_exponent.is_zero() || (sign_flag & 1))
        m.factors_[index] = SignedPowerFactor{abs_exponent, sign_flag & 1};
    return m;
}

Monomial operator*(const Monomial& a, const Monomial& b)
{
    Monomial out(a.coefficient_ * b.coefficient_);
    out.factors_ = a.factors_;
    for (const auto& [index, f] : b.factors_) {
        auto it = out.factors_.find(index);
        if (it == out.factors_.end()) {
            out.factors_.emplace(index, f);
            continue;
        }
        it->second.abs_exponent = it->second.abs_exponent + f.abs_exponent;
        it->second.sign_flag ^= f.sign_flag;
        if (it->second.abs_exponent.is_zero() && it->second.sign_flag == 0)
            out.factors_.erase(it);
    }
    return out;
}

bool Monomial::same_powers(const Monomial& other) const
{
    if (factors_.size() != other.factors_.size())
        return false;
    auto it = other.factors_.begin();
    for (const auto& [index, f] : factors_) {
        if (index != it->first || f.sign_flag != it->second.sign_flag
            || !f.abs_exponent.same_as(it->second.abs_exponent))
            return false;
        ++it;
    }
    return true;
}

double Monomial::degree() const
{
    double d = 0.0;
    for (const auto& [index, f] : factors_)
        d += f.abs_exponent.value();
    return d;
}

Expr Monomial::to_expr() const
{
    std::vector<Expr> parts;
    parts.push_back(Expr::constant(coefficient_));
    for (const auto& [index, f] : factors_) {
        Expr x = Expr::var(index);
        if (f.sign_flag == 0)
            parts.push_back(Expr::abs_pow(x, f.abs_exponent));
        else if (f.abs_exponent.is_one())
            parts.push_back(x);
        else
            parts.push_back(Expr::spow(x, f.abs_exponent));
    }
    return Expr::product(std::move(parts));
}

Polynomial::Polynomial(std::vector<Monomial> terms)
{
    std::vector<double> magnitude;
    for (auto& t : terms) {
        auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Monomial& m) { return m.same_powers(t); });
        if (it == terms_.end()) {
            magnitude.push_back(std::fabs(t.coefficient().value()));
            terms_.push_back(std::move(t));
        } else {
            it->set_coefficient(it->coefficient() + t.coefficient());
            magnitude[it - terms_.begin()] += std::fabs(t.coefficient().value());
        }
    }
    std::vector<Monomial> kept;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const Number& c = terms_[i].coefficient();
        if (c.is_zero())
            continue;
        if (!c.is_exact() && std::fabs(c.value()) <= kInexactCancel * magnitude[i])
            continue;
        kept.push_back(std::move(terms_[i]));
    }
    std::stable_sort(kept.begin(), kept.end(), monomial_order);
    terms_ = std::move(kept);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<Monomial> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return Polynomial(std::move(all));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    std::vector<Monomial> all;
    all.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_)
            all.push_back(x * y);
    return Polynomial(std::move(all));
}

double Polynomial::max_degree() const
{
    double d = 0.0;
    for (const auto& t : terms_)
        d = std::max(d, t.degree());
    return d;
}

Expr Polynomial::to_expr() const
{
    if (terms_.empty())
        return Expr::constant(Number::integer(0));
    std::vector<Expr> parts;
    for (const auto& t : terms_)
        parts.push_back(t.to_expr());
    return Expr::sum(std::move(parts));
}

bool Polynomial::equals(const Polynomial& other) const
{
    if (terms_.size() != other.terms_.size())
        return false;
    for (const auto& t : terms_) {
        auto it = std::find_if(other.terms_.begin(), other.terms_.end(),
                               [&](const Monomial& m) { return m.same_powers(t); });
        if (it == other.terms_.end() || !it->coefficient().same_as(t.coefficient()))
            return false;
    }
    return true;
}

std::optional<Polynomial> to_polynomial(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Constant:
        return Polynomial(std::vector<Monomial>{Monomial(e.value())});
    case ExprKind::Var:
        return Polynomial(std::vector<Monomial>{Monomial::variable(e.index(), Number::integer(1), 1)});
    case ExprKind::Sum: {
        Polynomial acc;
        for (const auto& t : e.operands()) {
            auto p = to_polynomial(t);
            if (!p)
                return std::nullopt;
            acc = acc + *p;
        }
        return acc;
    }
    case ExprKind::Product: {
        Polynomial acc(std::vector<Monomial>{Monomial(Number::integer(1))});
        for (const auto& f : e.operands()) {
            auto p = to_polynomial(f);
            if (!p)
                return std::nullopt;
            acc = acc * *p;
        }
        return acc;
    }
    case ExprKind::AbsPow:
    case ExprKind::SPow: {
        auto p = to_polynomial(e.base());
        if (!p)
            return std::nullopt;
        const Number& r = e.value();
        bool signed_pow = e.kind() == ExprKind::SPow;
        if (p->is_zero())
            return r.value() > 0.0 ? std::optional<Polynomial>(Polynomial()) : std::nullopt;
        if (p->terms().size() == 1)
            return Polynomial(std::vector<Monomial>{monomial_power(p->terms().front(), r, signed_pow)});
        // |u|^k = u^k for even k; sign(u)|u|^k = u^k for odd k.
        if (r.is_integer() && r.value() > 0.0 && r.value() <= kMaxExpansionPower
            && (signed_pow ? r.is_odd_integer() : r.is_even_integer()))
            return power(*p, static_cast<std::int64_t>(r.value()));
        return std::nullopt;
    }
    case ExprKind::Sign: {
        auto p = to_polynomial(e.base());
        if (!p)
            return std::nullopt;
        if (p->is_zero())
            return Polynomial();
        if (p->terms().size() == 1)
            return Polynomial(std::vector<Monomial>{monomial_power(p->terms().front(), Number::integer(0), true)});
        return std::nullopt;
    }
    }
    return std::nullopt;
}

namespace {

Expr simplify_partially(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Var:
        return e;
    case ExprKind::Sum:
    case ExprKind::Product: {
        std::vector<Expr> ops;
        for (const auto& op : e.operands())
            ops.push_back(canonicalize(op).expr);
        return e.kind() == ExprKind::Sum ? Expr::sum(std::move(ops)) : Expr::product(std::move(ops));
    }
    case ExprKind::AbsPow:
        return Expr::abs_pow(canonicalize(e.base()).expr, e.value());
    case ExprKind::Sign:
        return Expr::sign(canonicalize(e.base()).expr);
    case ExprKind::SPow:
        return Expr::spow(canonicalize(e.base()).expr, e.value());
    }
    return e;
}

} // namespace

CanonicalForm canonicalize(const Expr& e)
{
    if (auto p = to_polynomial(e))
        return CanonicalForm{p->to_expr(), true, std::move(p)};
    return CanonicalForm{simplify_partially(e), false, std::nullopt};
}

} // namespace stochcert
