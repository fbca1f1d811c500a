#pragma once

#include <map>
#include <optional>
#include <vector>

#include "stochcert/expr.hpp"

namespace stochcert {

/// Per-variable factor sign(x_i)^sign_flag * |x_i|^abs_exponent.
struct SignedPowerFactor {
    Number abs_exponent;
    int sign_flag = 0; // 0 or 1
};

/// coefficient * prod_i sign(x_i)^{b_i} |x_i|^{a_i}. Factors equal to 1 are not stored.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(Number coefficient) : coefficient_(coefficient) {}

    static Monomial variable(int index, Number abs_exponent, int sign_flag);

    const Number& coefficient() const { return coefficient_; }
    void set_coefficient(Number c) { coefficient_ = c; }
    const std::map<int, SignedPowerFactor>& factors() const { return factors_; }

    /// Sign flags add modulo 2, exponents add exactly when tagged.
    friend Monomial operator*(const Monomial& a, const Monomial& b);

    /// Same variables, exponents and sign flags (coefficient ignored).
    bool same_powers(const Monomial& other) const;

    /// Sum of absolute exponents.
    double degree() const;

    Expr to_expr() const;

private:
    Number coefficient_ = Number::integer(1);
    std::map<int, SignedPowerFactor> factors_;
};

/// Sum of monomials with like terms combined and zero terms removed.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Monomial> terms);

    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    /// Largest monomial degree, 0 for constants and the zero polynomial.
    double max_degree() const;

    Expr to_expr() const;

    /// Term-by-term equality after canonical ordering.
    bool equals(const Polynomial& other) const;

private:
    std::vector<Monomial> terms_;
};

/// Polynomial in {sign(x_i), |x_i|^r} when e has that form.
std::optional<Polynomial> to_polynomial(const Expr& e);

struct CanonicalForm {
    Expr expr;
    bool canonical = false; // false: partially simplified only
    std::optional<Polynomial> polynomial;
};

CanonicalForm canonicalize(const Expr& e);

} // namespace stochcert
