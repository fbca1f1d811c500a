#include "stochcert/lyap.hpp"

#include <cmath>
#include <random>

namespace stochcert {

namespace {

// Value at the origin, falling back to the canonical constant term when the
// expression is singular there.
std::optional<double> value_at_origin(const Expr& e, int dim)
{
    std::vector<double> origin(dim, 0.0);
    try {
        return evaluate(e, origin);
    } catch (const EvalError&) {
    }
    auto form = canonicalize(e);
    if (!form.polynomial)
        return std::nullopt;
    for (const auto& t : form.polynomial->terms())
        if (t.factors().empty())
            return t.coefficient().value();
    return 0.0;
}

std::vector<double> random_direction(int dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    std::vector<double> d(dim);
    double norm = 0.0;
    while (norm < 1e-12) {
        norm = 0.0;
        for (auto& v : d) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    }
    for (auto& v : d)
        v /= norm;
    return d;
}

} // namespace

SdeModel make_model(std::string name, int dim, int brownian_dim, const std::vector<std::string>& drift,
                    const std::vector<std::vector<std::string>>& diffusion)
{
    SdeModel m;
    m.name = std::move(name);
    m.dim = dim;
    m.brownian_dim = brownian_dim;
    for (const auto& text : drift)
        m.drift.push_back(parse(text, dim));
    for (const auto& row : diffusion) {
        std::vector<Expr> parsed;
        for (const auto& text : row)
            parsed.push_back(parse(text, dim));
        m.diffusion.push_back(std::move(parsed));
    }
    return m;
}

std::vector<std::string> validate_model(const SdeModel& model)
{
    std::vector<std::string> issues;
    if (model.dim < 1)
        issues.push_back("dimension must be >= 1");
    if (model.brownian_dim < 1)
        issues.push_back("brownian dimension must be >= 1");
    if (static_cast<int>(model.drift.size()) != model.dim)
        issues.push_back("drift has " + std::to_string(model.drift.size()) + " components, expected "
                         + std::to_string(model.dim));
    if (static_cast<int>(model.diffusion.size()) != model.dim)
        issues.push_back("diffusion has " + std::to_string(model.diffusion.size()) + " rows, expected "
                         + std::to_string(model.dim));
    for (std::size_t i = 0; i < model.diffusion.size(); ++i)
        if (static_cast<int>(model.diffusion[i].size()) != model.brownian_dim)
            issues.push_back("diffusion row " + std::to_string(i + 1) + " has " + std::to_string(model.diffusion[i].size())
                             + " columns, expected " + std::to_string(model.brownian_dim));
    if (!issues.empty())
        return issues;

    auto check = [&](const Expr& e, const std::string& where, const char* origin_rule) {
        if (max_var_index(e) > model.dim) {
            issues.push_back(where + ": variable index out of range (x" + std::to_string(max_var_index(e))
                             + " with dimension " + std::to_string(model.dim) + ")");
            return;
        }
        if (has_negative_exponent(e)) {
            issues.push_back(where + ": negative exponent in a coefficient");
            return;
        }
        auto at0 = value_at_origin(e, model.dim);
        if (!at0 || *at0 != 0.0)
            issues.push_back(std::string(origin_rule) + " (" + where + ")");
    };
    for (int i = 0; i < model.dim; ++i) {
        check(model.drift[i], "drift[" + std::to_string(i + 1) + "]", "f(0) ≠ 0");
        for (int j = 0; j < model.brownian_dim; ++j)
            check(model.diffusion[i][j], "diffusion[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]",
                  "g(0) ≠ 0");
    }
    return issues;
}

LyapunovCandidate::LyapunovCandidate(Expr value, int dim) : value_(std::move(value))
{
    if (dim < 1)
        throw std::invalid_argument("dimension must be >= 1");
    if (max_var_index(value_) > dim)
        throw std::invalid_argument("candidate uses x" + std::to_string(max_var_index(value_)) + " beyond dimension "
                                    + std::to_string(dim));
    for (int i = 1; i <= dim; ++i)
        gradient_.push_back(canonicalize(differentiate(value_, i)).expr);
    hessian_.assign(dim, std::vector<Expr>(dim));
    for (int i = 0; i < dim; ++i)
        for (int k = i; k < dim; ++k) {
            hessian_[i][k] = canonicalize(differentiate(gradient_[i], k + 1)).expr;
            hessian_[k][i] = hessian_[i][k];
        }
}

CandidateCheck spot_check_candidate(const LyapunovCandidate& cand, bool require_radial, std::uint64_t seed)
{
    CandidateCheck out;
    const int n = cand.dim();
    CompiledExpr v(cand.value());

    auto at0 = value_at_origin(cand.value(), n);
    out.zero_at_origin = at0 && *at0 == 0.0;
    if (!out.zero_at_origin)
        out.failures.push_back("V(0) ≠ 0");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_radius(-6.0, 3.0);
    out.positive_definite = true;
    for (int k = 0; k < 1000; ++k) {
        auto p = random_direction(n, rng);
        double r = std::pow(10.0, log_radius(rng));
        for (auto& x : p)
            x *= r;
        double value = 0.0;
        try {
            value = v(p);
        } catch (const EvalError&) {
            value = -1.0;
        }
        if (!(value > 0.0)) {
            out.positive_definite = false;
            out.failures.push_back("V not positive at sampled point (|x| = " + std::to_string(r) + ")");
            break;
        }
    }

    if (require_radial) {
        out.radial_checked = true;
        out.radially_unbounded = true;
        for (int ray = 0; ray < 10 && out.radially_unbounded; ++ray) {
            auto d = random_direction(n, rng);
            double prev = -INFINITY;
            for (int e = 0; e <= 6; ++e) {
                std::vector<double> p = d;
                for (auto& x : p)
                    x *= std::pow(10.0, e);
                double value = v(p);
                if (!(value > prev)) {
                    out.radially_unbounded = false;
                    out.failures.push_back("V not increasing along a sampled ray");
                    break;
                }
                prev = value;
            }
        }
    }
    return out;
}

CanonicalForm generator(const SdeModel& model, const LyapunovCandidate& cand)
{
    if (cand.dim() != model.dim || static_cast<int>(model.drift.size()) != model.dim
        || static_cast<int>(model.diffusion.size()) != model.dim)
        throw std::invalid_argument("dimension mismatch between model and candidate");
    const int n = model.dim;
    const int m = model.brownian_dim;
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i)
        terms.push_back(cand.gradient()[i] * model.drift[i]);
    const Expr half = Expr::constant(Number(Rational(1, 2)));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                terms.push_back(Expr::product({half, model.diffusion[i][j], cand.hessian()[i][k], model.diffusion[k][j]}));
    return canonicalize(Expr::sum(std::move(terms)));
}

CanonicalForm diffusion_quadratic(const SdeModel& model, const LyapunovCandidate& cand)
{
    if (cand.dim() != model.dim || static_cast<int>(model.diffusion.size()) != model.dim)
        throw std::invalid_argument("dimension mismatch between model and candidate");
    std::vector<Expr> squares;
    for (int j = 0; j < model.brownian_dim; ++j) {
        std::vector<Expr> column;
        for (int i = 0; i < model.dim; ++i)
            column.push_back(cand.gradient()[i] * model.diffusion[i][j]);
        Expr s = Expr::sum(std::move(column));
        squares.push_back(s * s);
    }
    return canonicalize(Expr::sum(std::move(squares)));
}

} // namespace stochcert
