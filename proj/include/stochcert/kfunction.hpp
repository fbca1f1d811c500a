#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace stochcert {

/// K(s) = s^gamma, 0 < gamma < 1.
struct PowerK {
    double gamma;
};

/// K(s) = s^gamma + s^alpha, 0 < gamma < 1, alpha >= 1.
struct PowerSumK {
    double gamma;
    double alpha;
};

/// Gauge function of the settling-time condition. New families extend the
/// variant and the three functions below.
class KFunction {
public:
    KFunction(PowerK k);
    KFunction(PowerSumK k);

    double value(double s) const;
    double derivative(double s) const;
    /// Exponent of the leading term near s = 0; 1/K(s) ~ s^{-gamma}.
    double gamma() const;
    std::string describe() const;

    const std::variant<PowerK, PowerSumK>& family() const { return family_; }
    bool is_power() const { return std::holds_alternative<PowerK>(family_); }

private:
    std::variant<PowerK, PowerSumK> family_;
};

class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Integral of 1/K over [0, v]. v = +inf is allowed for PowerSumK with alpha > 1.
/// PowerK uses the closed form; PowerSumK uses quadrature after u = s^{1-gamma}.
double recip_integral(const KFunction& k, double v);

/// Quadrature route for any K: the substitution u = s^{1-gamma} turns the
/// endpoint singularity into the bounded integrand s^gamma / ((1-gamma) K(s)).
double recip_integral_quadrature(const KFunction& k, double v);

/// (1/c) * integral of 1/K over [0, v0].
double settling_bound(const KFunction& k, double c, double v0);

} // namespace stochcert
