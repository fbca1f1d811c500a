#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace stochcert {

/// Exact rational p/q with q > 0 and gcd(|p|, q) = 1.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    // Checked arithmetic; nullopt on int64 overflow.
    friend std::optional<Rational> checked_add(const Rational& a, const Rational& b);
    friend std::optional<Rational> checked_mul(const Rational& a, const Rational& b);

    friend bool operator==(const Rational&, const Rational&) = default;
    friend auto operator<=>(const Rational& a, const Rational& b)
    {
        // Denominators are positive, so cross-multiplication preserves order.
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }

    std::string str() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// A real value with an optional exact rational tag. Arithmetic keeps the tag
/// only while every operand carries one and nothing overflows.
class Number {
public:
    Number() = default;
    Number(double v) : value_(v) {}
    Number(Rational r) : value_(r.to_double()), exact_(r) {}
    static Number integer(std::int64_t k) { return Number(Rational(k)); }
    /// Keeps a correctly rounded value alongside its exact tag.
    static Number tagged(double v, Rational r)
    {
        Number n(r);
        n.value_ = v;
        return n;
    }

    double value() const { return value_; }
    const std::optional<Rational>& exact() const { return exact_; }
    bool is_exact() const { return exact_.has_value(); }

    bool is_zero() const { return exact_ ? exact_->is_zero() : value_ == 0.0; }
    bool is_one() const { return exact_ ? *exact_ == Rational(1) : value_ == 1.0; }
    bool is_integer() const;
    bool is_even_integer() const;
    bool is_odd_integer() const;

    Number operator-() const;
    friend Number operator+(const Number& a, const Number& b);
    friend Number operator-(const Number& a, const Number& b) { return a + (-b); }
    friend Number operator*(const Number& a, const Number& b);
    friend Number operator/(const Number& a, const Number& b);

    /// Equal as exact rationals when both are tagged, else within rel_tol.
    bool same_as(const Number& other, double rel_tol = 1e-12) const;

    /// "p/q" or "p" when exact, %.17g otherwise.
    std::string str() const;

private:
    double value_ = 0.0;
    std::optional<Rational> exact_;
};

/// Exact rational for a decimal literal such as "0.125" or "1e-3", if it fits in int64.
std::optional<Rational> rational_from_decimal(const std::string& literal);

} // namespace stochcert
