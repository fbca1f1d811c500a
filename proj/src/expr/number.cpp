#include "stochcert/number.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stochcert {

namespace {

std::optional<Rational> from_wide(__int128 num, __int128 den)
{
    if (den == 0)
        return std::nullopt;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    constexpr auto lo = std::numeric_limits<std::int64_t>::min() + 1;
    constexpr auto hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi)
        return std::nullopt;
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

std::optional<Rational> checked_add(const Rational& a, const Rational& b)
{
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
}

std::optional<Rational> checked_mul(const Rational& a, const Rational& b)
{
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

std::string Rational::str() const
{
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Number::is_integer() const
{
    if (exact_)
        return exact_->is_integer();
    return std::isfinite(value_) && std::floor(value_) == value_;
}

bool Number::is_even_integer() const
{
    if (exact_)
        return exact_->is_integer() && exact_->num() % 2 == 0;
    return is_integer() && std::fmod(value_, 2.0) == 0.0;
}

bool Number::is_odd_integer() const
{
    if (exact_)
        return exact_->is_integer() && exact_->num() % 2 != 0;
    return is_integer() && std::fabs(std::fmod(value_, 2.0)) == 1.0;
}

Number Number::operator-() const
{
    if (exact_)
        return Number(Rational(-exact_->num(), exact_->den()));
    return Number(-value_);
}

Number operator+(const Number& a, const Number& b)
{
    if (a.exact_ && b.exact_) {
        if (auto r = checked_add(*a.exact_, *b.exact_))
            return Number(*r);
    }
    return Number(a.value_ + b.value_);
}

Number operator*(const Number& a, const Number& b)
{
    if (a.exact_ && b.exact_) {
        if (auto r = checked_mul(*a.exact_, *b.exact_))
            return Number(*r);
    }
    return Number(a.value_ * b.value_);
}

Number operator/(const Number& a, const Number& b)
{
    if (b.is_zero())
        throw std::domain_error("division by zero");
    if (a.exact_ && b.exact_) {
        if (auto r = checked_mul(*a.exact_, Rational(b.exact_->den(), b.exact_->num())))
            return Number(*r);
    }
    return Number(a.value_ / b.value_);
}

bool Number::same_as(const Number& other, double rel_tol) const
{
    if (exact_ && other.exact_)
        return *exact_ == *other.exact_;
    double scale = std::max({1.0, std::fabs(value_), std::fabs(other.value_)});
    return std::fabs(value_ - other.value_) <= rel_tol * scale;
}

std::string Number::str() const
{
    if (exact_)
        return exact_->str();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
}

std::optional<Rational> rational_from_decimal(const std::string& literal)
{
    // digits [. digits] [e|E [sign] digits]
    __int128 mantissa = 0;
    int scale = 0;
    std::size_t i = 0;
    bool any = false;
    constexpr __int128 cap = static_cast<__int128>(1) << 100;
    auto take_digit = [&](char ch) {
        if (mantissa > cap)
            return false;
        mantissa = mantissa * 10 + (ch - '0');
        any = true;
        return true;
    };
    for (; i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i])); ++i)
        if (!take_digit(literal[i]))
            return std::nullopt;
    if (i < literal.size() && literal[i] == '.') {
        ++i;
        for (; i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i])); ++i) {
            if (!take_digit(literal[i]))
                return std::nullopt;
            --scale;
        }
    }
    if (!any)
        return std::nullopt;
    if (i < literal.size() && (literal[i] == 'e' || literal[i] == 'E')) {
        ++i;
        int sign = 1;
        if (i < literal.size() && (literal[i] == '+' || literal[i] == '-')) {
            sign = literal[i] == '-' ? -1 : 1;
            ++i;
        }
        int e = 0;
        bool digits = false;
        for (; i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i])); ++i) {
            e = e * 10 + (literal[i] - '0');
            digits = true;
            if (e > 40)
                return std::nullopt;
        }
        if (!digits)
            return std::nullopt;
        scale += sign * e;
    }
    if (i != literal.size())
        return std::nullopt;
    __int128 num = mantissa;
    __int128 den = 1;
    for (; scale > 0; --scale) {
        num *= 10;
        if (num > cap)
            return std::nullopt;
    }
    for (; scale < 0; ++scale) {
        den *= 10;
        if (den > cap)
            return std::nullopt;
    }
    return from_wide(num, den);
}

} // namespace stochcert
