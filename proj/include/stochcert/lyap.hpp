#pragma once

// SDE models dx = f(x)dt + g(x)dB and the generator
//   LV = (dV/dx) f + 1/2 Tr{g^T (d2V/dx2) g}.

#include <cstdint>
#include <string>
#include <vector>

#include "stochcert/canonical.hpp"
#include "stochcert/expr.hpp"

namespace stochcert {

struct SdeModel {
    std::string name;
    int dim = 1;
    int brownian_dim = 1;
    std::vector<Expr> drift;                  // n
    std::vector<std::vector<Expr>> diffusion; // n x m
};

/// Builds a model from expression text; throws ParseError on bad input.
SdeModel make_model(std::string name, int dim, int brownian_dim, const std::vector<std::string>& drift,
                    const std::vector<std::vector<std::string>>& diffusion);

/// Violated invariants; empty means the model is usable.
std::vector<std::string> validate_model(const SdeModel& model);

class LyapunovCandidate {
public:
    LyapunovCandidate(Expr value, int dim);

    const Expr& value() const { return value_; }
    int dim() const { return static_cast<int>(gradient_.size()); }
    const std::vector<Expr>& gradient() const { return gradient_; }
    const std::vector<std::vector<Expr>>& hessian() const { return hessian_; }

private:
    Expr value_;
    std::vector<Expr> gradient_;
    std::vector<std::vector<Expr>> hessian_;
};

struct CandidateCheck {
    bool zero_at_origin = false;
    bool positive_definite = false;
    bool radially_unbounded = false; // only meaningful when requested
    bool radial_checked = false;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Numerical spot checks: V(0) = 0, V > 0 on 10^3 points with |p| in [1e-6, 1e3],
/// and optionally V increasing along 10 random rays at radii 10^0..10^6.
CandidateCheck spot_check_candidate(const LyapunovCandidate& cand, bool require_radial, std::uint64_t seed = 1);

/// Canonical LV. Exact Constant 0 when the algebra cancels.
CanonicalForm generator(const SdeModel& model, const LyapunovCandidate& cand);

/// Canonical sum_j (sum_i dV/dx_i g_ij)^2.
CanonicalForm diffusion_quadratic(const SdeModel& model, const LyapunovCandidate& cand);

} // namespace stochcert
