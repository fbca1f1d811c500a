#include "stochcert/kfunction.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "stochcert/quadrature.hpp"

namespace stochcert {

namespace {

void require_gamma(double gamma)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("K gamma must lie in (0, 1)");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

KFunction::KFunction(PowerK k) : family_(k) { require_gamma(k.gamma); }

KFunction::KFunction(PowerSumK k) : family_(k)
{
    require_gamma(k.gamma);
    if (!(k.alpha >= 1.0))
        throw std::invalid_argument("K alpha must be >= 1");
}

double KFunction::value(double s) const
{
    return std::visit(overloaded{[s](const PowerK& k) { return std::pow(s, k.gamma); },
                                 [s](const PowerSumK& k) { return std::pow(s, k.gamma) + std::pow(s, k.alpha); }},
                      family_);
}

double KFunction::derivative(double s) const
{
    return std::visit(overloaded{[s](const PowerK& k) { return k.gamma * std::pow(s, k.gamma - 1.0); },
                                 [s](const PowerSumK& k) {
                                     return k.gamma * std::pow(s, k.gamma - 1.0) + k.alpha * std::pow(s, k.alpha - 1.0);
                                 }},
                      family_);
}

double KFunction::gamma() const
{
    return std::visit([](const auto& k) { return k.gamma; }, family_);
}

std::string KFunction::describe() const
{
    char buf[96];
    std::visit(overloaded{[&](const PowerK& k) { std::snprintf(buf, sizeof buf, "s^%.10g", k.gamma); },
                          [&](const PowerSumK& k) {
                              std::snprintf(buf, sizeof buf, "s^%.10g + s^%.10g", k.gamma, k.alpha);
                          }},
               family_);
    return buf;
}

double recip_integral_quadrature(const KFunction& k, double v)
{
    if (!(v >= 0.0))
        throw std::invalid_argument("integral upper limit must be >= 0");
    if (v == 0.0)
        return 0.0;
    const double g = k.gamma();
    const double e = 1.0 - g;
    // s = u^{1/e}; ds/K(s) = s^g / (e K(s)) du
    auto integrand = [&k, g, e](double u) {
        if (u == 0.0)
            return 1.0 / e; // s^g / K(s) -> 1 as s -> 0
        double s = std::pow(u, 1.0 / e);
        if (std::isinf(s))
            return 0.0;
        return std::pow(s, g) / (e * k.value(s));
    };
    double upper = std::isinf(v) ? v : std::pow(v, e);
    auto result = integrate_adaptive(integrand, 0.0, upper, 1e-12);
    if (!result.converged)
        throw std::runtime_error("quadrature for the settling integral did not converge");
    return result.value;
}

double recip_integral(const KFunction& k, double v)
{
    if (std::isnan(v) || v < 0.0)
        throw std::invalid_argument("integral upper limit must be >= 0");
    if (v == 0.0)
        return 0.0;
    if (const auto* p = std::get_if<PowerK>(&k.family())) {
        if (std::isinf(v))
            throw DivergenceError("integral of 1/s^gamma over [0, inf) diverges");
        return std::pow(v, 1.0 - p->gamma) / (1.0 - p->gamma);
    }
    const auto& ps = std::get<PowerSumK>(k.family());
    if (std::isinf(v) && !(ps.alpha > 1.0))
        throw DivergenceError("integral of 1/K over [0, inf) diverges unless alpha > 1");
    return recip_integral_quadrature(k, v);
}

double settling_bound(const KFunction& k, double c, double v0)
{
    if (!(c > 0.0))
        throw std::invalid_argument("settling bound requires c > 0");
    return recip_integral(k, v0) / c;
}

} // namespace stochcert
