#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "stochcert/certify.hpp"
#include "stochcert/quadrature.hpp"
#include "support/models.hpp"

using namespace stochcert;
using namespace stochcert::testing;

namespace {

// Integral of 1/K over [0, v] straight from the raw integrand.
double oracle_recip_integral(const KFunction& k, double v)
{
    auto f = [&](double s) { return 1.0 / k.value(s); };
    boost::math::quadrature::tanh_sinh<double> ts;
    if (std::isfinite(v))
        return ts.integrate(f, 0.0, v);
    boost::math::quadrature::exp_sinh<double> es;
    return ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

LyapunovCandidate cand(const std::string& v, int n) { return LyapunovCandidate(parse(v, n), n); }

const KFunction k23 = PowerK{2.0 / 3.0};

} // namespace

TEST_CASE("adaptive quadrature")
{
    auto r = integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, 5.0);
    CHECK(r.converged);
    CHECK(rel(r.value, 1.0 - std::exp(-5.0)) < 1e-12);

    r = integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, INFINITY);
    CHECK(rel(r.value, std::numbers::pi / 2) < 1e-10);

    r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-8, 5000);
    CHECK(rel(r.value, 2.0) < 1e-6);
}

TEST_CASE("K functions")
{
    KFunction p = PowerK{0.5};
    CHECK(p.value(4.0) == doctest::Approx(2.0));
    CHECK(p.derivative(4.0) == doctest::Approx(0.25));
    KFunction ps = PowerSumK{0.5, 2.0};
    CHECK(ps.value(4.0) == doctest::Approx(18.0));
    CHECK(ps.derivative(4.0) == doctest::Approx(8.25));
    CHECK_THROWS(KFunction(PowerK{1.0}));
    CHECK_THROWS(KFunction(PowerSumK{0.5, 0.5}));
}

TEST_CASE("reciprocal integrals against an independent quadrature")
{
    for (double gamma : {0.2, 0.5, 2.0 / 3.0, 13.0 / 15.0})
        for (double v : {1e-6, 1.0, 1e3}) {
            KFunction k = PowerK{gamma};
            double closed = recip_integral(k, v);
            CHECK(closed == doctest::Approx(std::pow(v, 1 - gamma) / (1 - gamma)).epsilon(1e-14));
            CHECK(rel(recip_integral_quadrature(k, v), closed) <= 1e-8);
            CHECK(rel(oracle_recip_integral(k, v), closed) <= 1e-8);
        }
    KFunction ps = PowerSumK{0.5, 2.0};
    for (double v : {1e-3, 1.0, 50.0})
        CHECK(rel(recip_integral(ps, v), oracle_recip_integral(ps, v)) <= 1e-8);
    double total = recip_integral(ps, INFINITY);
    CHECK(std::fabs(total - 4 * std::numbers::pi / (3 * std::sqrt(3.0))) <= 1e-6);
    CHECK(std::fabs(total - oracle_recip_integral(ps, INFINITY)) <= 1e-6);
    CHECK_THROWS_AS(recip_integral(KFunction(PowerSumK{0.5, 1.0}), INFINITY), DivergenceError);
    CHECK_THROWS_AS(recip_integral(KFunction(PowerK{0.5}), INFINITY), DivergenceError);
}

TEST_CASE("settling bounds")
{
    CHECK(std::fabs(settling_bound(k23, 4.0 / 3.0, 1.44) - 2.5408) <= 1e-4);
    CHECK(std::fabs(settling_bound(KFunction(PowerK{13.0 / 15.0}), 2.4, 8.0) - 4.1235) <= 1e-4);
    CHECK(std::fabs(settling_bound(k23, 2.0, 1.0) - 1.5) <= 1e-12);
    CHECK(settling_bound(k23, 1.0, 0.0) == 0.0);
}

TEST_CASE("sample points")
{
    SampleDomain d;
    auto pts = sample_points(d, 2);
    CHECK(pts.size() == static_cast<std::size_t>(d.n_levels * d.n_dirs + d.n_random));
    double rmin = INFINITY, rmax = 0;
    for (const auto& p : pts) {
        double r = std::hypot(p.x[0], p.x[1]);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    CHECK(rmin == doctest::Approx(1e-6));
    CHECK(rmax == doctest::Approx(1e3));
    CHECK(sample_points(d, 2)[17].x == pts[17].x);
    d.r_min = 0.0;
    CHECK_THROWS(d.validate());
}

TEST_CASE("max_feasible_c on the examples")
{
    SampleDomain d;
    auto c1 = max_feasible_c(ex1_case1(), cand("x1^2", 1), k23, d);
    CHECK(std::fabs(c1.c_max - 4.0 / 3.0) <= 1e-6);
    CHECK(c1.trend == BoundaryTrend::None);

    auto c2 = max_feasible_c(ex1_case2(), cand("x1^2", 1), k23, d);
    CHECK(std::fabs(c2.c_max - 4.0 / 3.0) <= 1e-3);
    CHECK(c2.trend == BoundaryTrend::TowardRMin);

    auto c3 = max_feasible_c(ex1_case3(), cand("x1^2", 1), k23, d);
    CHECK(std::fabs(c3.c_max - 4.0 / 3.0) <= 1e-6);

    auto e3 = max_feasible_c(ex3(), cand("abs(x1)^3", 1), KFunction(PowerK{13.0 / 15.0}), d);
    CHECK(std::fabs(e3.c_max - 2.4) <= 1e-6);

    // Pointwise c for ex2 reduces to (|cos t|^{10/3} + |sin t|^{10/3}) / 3; dense angle scan.
    double dense = INFINITY;
    for (int i = 0; i < 200000; ++i) {
        double t = 2 * std::numbers::pi * i / 200000;
        dense = std::min(dense, (std::pow(std::fabs(std::cos(t)), 10.0 / 3) + std::pow(std::fabs(std::sin(t)), 10.0 / 3)) / 3);
    }
    auto e2 = max_feasible_c(ex2(), cand("x1^2 + x2^2", 2), k23, d);
    CHECK(std::fabs(e2.c_max - dense) <= 1e-6);
    CHECK(std::fabs(e2.c_max - 0.20999) <= 1e-3);
    CHECK(std::fabs(std::fabs(e2.argmin[0]) - std::fabs(e2.argmin[1])) <= 0.05 * std::hypot(e2.argmin[0], e2.argmin[1]));

    auto neg = max_feasible_c(make_model("unstable", 1, 1, {"x1"}, {{"0"}}), cand("x1^2", 1), k23, d);
    CHECK_FALSE(neg.feasible);
    CHECK(neg.message == "condition infeasible for any c>0");
}

TEST_CASE("condition checks")
{
    SampleDomain d;
    auto fail = check_condition_thm1(ex2(), cand("x1^2 + x2^2", 2), k23, 1.0 / 3.0, d);
    CHECK_FALSE(fail.pass);
    REQUIRE(fail.argmin.size() == 2);
    CHECK(std::fabs(std::fabs(fail.argmin[0]) - std::fabs(fail.argmin[1])) <= 0.05 * std::hypot(fail.argmin[0], fail.argmin[1]));

    auto pass = check_condition_thm1(ex1_case1(), cand("x1^2", 1), k23, 4.0 / 3.0, d);
    CHECK(pass.pass);

    // For power K the gauge condition and its direct power form share sign and argmin.
    for (double c : {0.1, 0.2, 0.25}) {
        auto a = check_condition_thm1(ex2(), cand("x1^2 + x2^2", 2), k23, c, d);
        auto b = check_power_gauge(ex2(), cand("x1^2 + x2^2", 2), 2.0 / 3.0, c, d);
        CHECK(a.pass == b.pass);
        CHECK(a.argmin == b.argmin);
    }

    auto classical = check_classical(det_cubicroot(), cand("x1^2", 1), 2.0, 2.0 / 3.0, d);
    CHECK(classical.pass);
    CHECK(std::fabs(classical.min_margin) < 1e-9);
    CHECK_FALSE(check_classical(ex1_case1(), cand("x1^2", 1), 0.5, 2.0 / 3.0, d).pass);

    auto zero = check_nonpositive_generator(ex1_case1(), cand("x1^2", 1), d);
    CHECK(zero.exact_zero);
    CHECK(zero.pass);
    auto pos = check_nonpositive_generator(ex3(), cand("abs(x1)^3", 1), d);
    CHECK_FALSE(pos.pass);
}

TEST_CASE("certify routes")
{
    CertifyRequest r;
    r.model = ex1_case1();
    r.v = parse("x1^2", 1);
    r.k = k23;
    r.x0 = std::vector<double>{1.2};
    auto v = certify(r);
    CHECK(v.certified());
    CHECK(v.route == Route::Theorem1);
    CHECK(v.c_used == doctest::Approx(1.32).epsilon(1e-6));
    CHECK(*v.settling_bound == doctest::Approx(2.5665).epsilon(1e-4));
    CHECK(v.label == "sampled certificate");

    r.c = 4.0 / 3.0;
    CHECK(std::fabs(*certify(r).settling_bound - 2.5408) <= 1e-4);

    CertifyRequest t3;
    t3.model = ex3();
    t3.v = parse("abs(x1)^3", 1);
    t3.u = parse("x1^2", 1);
    t3.k = KFunction(PowerK{13.0 / 15.0});
    auto v3 = certify(t3);
    CHECK(v3.certified());
    CHECK(v3.route == Route::Theorem3);

    CertifyRequest no_u = t3;
    no_u.u.reset();
    CHECK_FALSE(certify(no_u).certified());

    CertifyRequest det;
    det.model = det_cubicroot();
    det.v = parse("x1^2", 1);
    det.k = k23;
    det.c = 2.0;
    det.x0 = std::vector<double>{1.0};
    auto vd = certify(det);
    CHECK(vd.certified());
    CHECK(std::fabs(*vd.settling_bound - 1.5) <= 1e-12);

    CertifyRequest bad = det;
    bad.model = make_model("bad", 1, 1, {"x1 + 1"}, {{"0"}});
    auto vb = certify(bad);
    CHECK(vb.status == CertStatus::Aborted);
    REQUIRE_FALSE(vb.diagnostics.empty());
    CHECK(vb.diagnostics[0].find("f(0) ≠ 0") != std::string::npos);
}
