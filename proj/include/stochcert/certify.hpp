#pragma once

// Sampled certificates for the finite-time stability criteria.
//
// Every "for all x != 0" condition is checked on a deterministic set of points:
// log-spaced radii times a direction set, plus seeded random points. Margins
// are normalized so that a passing condition has margin >= -tol. These are
// falsification checks, not proofs; verdicts carry the "sampled certificate" label.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochcert/kfunction.hpp"
#include "stochcert/lyap.hpp"

namespace stochcert {

struct SampleDomain {
    double r_min = 1e-6;
    double r_max = 1e3;
    int n_levels = 64;
    int n_dirs = 256;
    int n_random = 1024;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SamplePoint {
    std::vector<double> x;
    int level = -1; // radius level, -1 for random points
};

/// Level points first (level-major, direction-minor), then random points.
std::vector<SamplePoint> sample_points(const SampleDomain& domain, int dim);

enum class BoundaryTrend { None, TowardRMin, TowardRMax };
const char* to_string(BoundaryTrend t);

struct MarginReport {
    std::string condition;
    std::size_t samples = 0;
    std::size_t skipped = 0; // singular evaluations
    double min_margin = 0.0;
    std::vector<double> argmin;
    bool pass = false;
    double tolerance = 0.0;
    bool exact_zero = false; // decided from the canonical form alone
    BoundaryTrend trend = BoundaryTrend::None;
};

constexpr double kDefaultTolerance = 1e-9;

/// LW <= 0: margin -LW/(1+|LW|); pass iff LW <= tol (1 + |x|^deg) everywhere.
MarginReport check_nonpositive_generator(const SdeModel& model, const LyapunovCandidate& w, const SampleDomain& domain,
                                         double tol = kDefaultTolerance);

/// Gauge condition with normalized margin
///   m(x) = [K'(V)/2 |dV/dx g|^2 - K(V) LV] / K(V)^2 - c.
MarginReport check_condition_thm1(const SdeModel& model, const LyapunovCandidate& v, const KFunction& k, double c,
                                  const SampleDomain& domain, double tol = kDefaultTolerance);

/// Classical condition LV <= -c V^gamma, margin -LV/V^gamma - c.
MarginReport check_classical(const SdeModel& model, const LyapunovCandidate& v, double c, double gamma,
                             const SampleDomain& domain, double tol = kDefaultTolerance);

/// Power-gauge form V (c V^gamma + LV) <= gamma/2 |dV/dx g|^2, evaluated directly;
/// the difference is reported in units of c (divided by V^{1+gamma}).
MarginReport check_power_gauge(const SdeModel& model, const LyapunovCandidate& v, double gamma, double c,
                               const SampleDomain& domain, double tol = kDefaultTolerance);

struct FeasibleC {
    double c_max = 0.0;
    std::vector<double> argmin;
    BoundaryTrend trend = BoundaryTrend::None;
    bool feasible = false; // c_max > 0
    std::size_t samples = 0;
    std::size_t skipped = 0;
    std::string message;
};

/// Infimum of [K'(V)/2 |dV/dx g|^2 - K(V) LV] / K(V)^2 over the samples,
/// followed by one golden-section pass over radius and direction at the argmin.
FeasibleC max_feasible_c(const SdeModel& model, const LyapunovCandidate& v, const KFunction& k,
                         const SampleDomain& domain);

enum class Route { Theorem1, Theorem2, Theorem3 };
const char* to_string(Route r);

enum class CertStatus { Certified, NotCertified, Aborted };
const char* to_string(CertStatus s);

struct CertifyRequest {
    SdeModel model;
    Expr v;
    std::optional<Expr> u;
    KFunction k = KFunction(PowerK{0.5});
    std::optional<double> c;
    SampleDomain domain;
    std::optional<std::vector<double>> x0;
    double tol = kDefaultTolerance;
};

struct CertificateVerdict {
    Route route = Route::Theorem1;
    CertStatus status = CertStatus::NotCertified;
    std::string label = "sampled certificate";
    std::vector<MarginReport> reports;     // required conditions of the route
    std::optional<MarginReport> classical; // informational, PowerK only
    std::optional<FeasibleC> feasible;     // when c was not supplied
    double c_used = 0.0;
    std::optional<double> v0;
    std::optional<double> settling_bound;
    CandidateCheck v_check;
    std::optional<CandidateCheck> u_check;
    std::string generator_v;  // canonical LV, printed
    std::string generator_u;  // canonical LU, printed (Theorem 3)
    std::vector<std::string> diagnostics;

    bool certified() const { return status == CertStatus::Certified; }
};

/// Headroom applied to c_max when c is not supplied.
constexpr double kAutoCFactor = 0.99;

CertificateVerdict certify(const CertifyRequest& request);

} // namespace stochcert
