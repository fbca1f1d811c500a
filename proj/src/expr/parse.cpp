// Recursive-descent parser for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'x' integer | func '(' args ')' | '(' expr ')'
//   func    := abs | sign | spow | pow

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "stochcert/expr.hpp"

namespace stochcert {

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    Expr parse_all()
    {
        Expr e = parse_expr();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const { throw ParseError(message, at); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char ch)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char ch)
    {
        if (!accept(ch))
            fail(std::string("expected '") + ch + "'");
    }

    Expr parse_expr()
    {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = lhs + parse_term();
            else if (accept('-'))
                lhs = lhs - parse_term();
            else
                return lhs;
        }
    }

    Expr parse_term()
    {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * parse_unary();
            } else if (accept('/')) {
                skip_space();
                std::size_t at = pos_;
                Expr rhs = parse_unary();
                if (!rhs.is_constant())
                    fail_at("division is only allowed by constants", at);
                if (rhs.value().is_zero())
                    fail_at("division by zero", at);
                lhs = lhs * Expr::constant(Number::integer(1) / rhs.value());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary()
    {
        if (accept('-'))
            return -parse_unary();
        if (accept('+'))
            return parse_unary();
        return parse_power();
    }

    Expr parse_power()
    {
        skip_space();
        std::size_t at = pos_;
        Expr base = parse_primary();
        if (accept('^')) {
            skip_space();
            std::size_t exp_at = pos_;
            Expr exponent = parse_unary();
            if (!exponent.is_constant())
                fail_at("exponent must be a constant", exp_at);
            return make_pow(base, exponent.value(), at);
        }
        return base;
    }

    Expr make_pow(const Expr& base, const Number& r, std::size_t at) const
    {
        if (r.is_zero())
            return Expr::constant(Number::integer(1));
        if (r.is_one())
            return base;
        if (base.is_constant()) {
            if (base.value().value() < 0.0 && !r.is_integer())
                fail_at("non-integer power of a negative constant", at);
            return r.is_even_integer() ? Expr::abs_pow(base, r) : Expr::spow(base, r);
        }
        if (r.is_even_integer() || provably_nonnegative(base))
            return Expr::abs_pow(base, r);
        if (r.is_odd_integer())
            return Expr::spow(base, r);
        fail_at("power " + r.str() + " of a base that can be negative; write pow(abs(u), r) for |u|^r or "
                    "spow(u, r) for sign(u)|u|^r",
                at);
    }

    Number parse_constant_argument()
    {
        skip_space();
        std::size_t at = pos_;
        Expr e = parse_expr();
        if (!e.is_constant())
            fail_at("expected a constant", at);
        return e.value();
    }

    Expr parse_primary()
    {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_')
            return parse_identifier();
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    Expr parse_number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string literal = text_.substr(start, pos_ - start);
        char* end = nullptr;
        double v = std::strtod(literal.c_str(), &end);
        if (end != literal.c_str() + literal.size())
            fail_at("malformed number '" + literal + "'", start);
        if (auto r = rational_from_decimal(literal))
            return Expr::constant(Number::tagged(v, *r));
        return Expr::constant(Number(v));
    }

    Expr parse_identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name.size() > 1 && name[0] == 'x'
            && std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            long index = std::strtol(name.c_str() + 1, nullptr, 10);
            if (index < 1 || index > dim_)
                fail_at("variable index out of range: " + name + " (dimension " + std::to_string(dim_) + ")", start);
            return Expr::var(static_cast<int>(index));
        }
        if (name == "abs" || name == "sign") {
            expect('(');
            Expr arg = parse_expr();
            expect(')');
            return name == "abs" ? Expr::abs_pow(arg, Number::integer(1)) : Expr::sign(arg);
        }
        if (name == "spow" || name == "pow") {
            expect('(');
            Expr arg = parse_expr();
            expect(',');
            Number r = parse_constant_argument();
            expect(')');
            if (name == "spow")
                return Expr::spow(arg, r);
            return make_pow(arg, r, start);
        }
        fail_at("unknown identifier '" + name + "'", start);
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse(const std::string& text, int dim)
{
    if (dim < 1)
        throw std::invalid_argument("dimension must be >= 1");
    return Parser(text, dim).parse_all();
}

} // namespace stochcert
