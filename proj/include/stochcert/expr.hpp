#pragma once

// Expression language over the signed-power algebra: constants, variables,
// sums, products, |u|^r, sign(u) and sign(u)|u|^r. Expressions are immutable
// and cheap to copy (shared nodes), so they can be shared across threads.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochcert/number.hpp"

namespace stochcert {

enum class ExprKind { Constant, Var, Sum, Product, AbsPow, Sign, SPow };

class Expr {
public:
    /// Defaults to the exact constant 0.
    Expr();

    // Leaf builders.
    static Expr constant(Number value);
    static Expr var(int index); // 1-based

    // Normalizing builders: flatten nested sums/products, fold constants,
    // drop exponent 0, merge |(|u|^a)|^r -> |u|^{ar}.
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr abs_pow(Expr base, Number exponent);
    static Expr sign(Expr base);
    static Expr spow(Expr base, Number exponent);

    // Structural builders; no rewriting beyond the node invariants.
    static Expr raw_sum(std::vector<Expr> terms);
    static Expr raw_product(std::vector<Expr> factors);
    static Expr raw_abs_pow(Expr base, Number exponent);
    static Expr raw_sign(Expr base);
    static Expr raw_spow(Expr base, Number exponent);

    ExprKind kind() const;
    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_zero() const { return is_constant() && value().is_zero(); }

    /// Constant value (Constant) or exponent (AbsPow, SPow).
    const Number& value() const;
    int index() const;
    /// Sum terms, Product factors, or the single base of AbsPow/Sign/SPow.
    const std::vector<Expr>& operands() const;
    const Expr& base() const { return operands().front(); }

    friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
    friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
    friend Expr operator-(const Expr& a) { return product({constant(Number::integer(-1)), a}); }
    friend Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Error raised for malformed expression text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Singular evaluation, e.g. a negative exponent at a zero base.
class EvalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parses the expression grammar; variables must satisfy 1 <= index <= dim.
Expr parse(const std::string& text, int dim);

/// Text in the expression grammar; parse(to_string(e)) rebuilds normalize(e).
std::string to_string(const Expr& e);

/// Rebuilds e bottom-up through the normalizing builders.
Expr normalize(const Expr& e);

/// Same shape, indices and numeric values (exponents/constants within 1e-15 relative).
bool structurally_equal(const Expr& a, const Expr& b);

/// Throws EvalError naming the offending subterm on singular evaluation.
double evaluate(const Expr& e, std::span<const double> point);

Expr differentiate(const Expr& e, int index);

/// Largest variable index referenced, 0 for constants.
int max_var_index(const Expr& e);

/// True when e is nonnegative for every real input by construction
/// (absolute powers, even integer powers, nonnegative constants, sums/products thereof).
bool provably_nonnegative(const Expr& e);

/// True if any AbsPow/SPow exponent is negative.
bool has_negative_exponent(const Expr& e);

/// Flat postfix program for repeated evaluation on hot paths.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    /// Same semantics as evaluate(); EvalError carries the instruction position.
    double operator()(std::span<const double> point) const;

private:
    enum class Op : unsigned char { Const, Var, Add, Mul, AbsPow, Sign, SPow };
    struct Instr {
        Op op;
        int arg = 0; // variable index (0-based) or arity
        double value = 0.0;
    };
    void emit(const Expr& e, int depth);
    std::vector<Instr> code_;
    int max_depth_ = 0;
};

} // namespace stochcert
