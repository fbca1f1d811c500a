#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "stochcert/lyap.hpp"
#include "support/fd_generator.hpp"
#include "support/models.hpp"

using namespace stochcert;
using namespace stochcert::testing;

namespace {

Polynomial poly(const std::string& text, int dim) { return *to_polynomial(parse(text, dim)); }

bool generator_is(const SdeModel& model, const std::string& v, const std::string& expected)
{
    auto lv = generator(model, LyapunovCandidate(parse(v, model.dim), model.dim));
    return lv.canonical && lv.polynomial && lv.polynomial->equals(poly(expected, model.dim));
}

} // namespace

TEST_CASE("validate_model accepts the examples")
{
    for (const auto& m : {ex1_case1(), ex1_case2(), ex1_case3(), ex2(), ex3(), det_cubicroot()})
        CHECK(validate_model(m).empty());
}

TEST_CASE("validate_model reports broken models")
{
    auto issues = validate_model(make_model("bad", 1, 1, {"x1+1"}, {{"x1"}}));
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("f(0) ≠ 0") != std::string::npos);

    issues = validate_model(make_model("bad", 1, 1, {"-x1"}, {{"1 + 0*x1"}}));
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("g(0) ≠ 0") != std::string::npos);

    SdeModel shape = ex1_case1();
    shape.diffusion[0].push_back(parse("x1", 1));
    CHECK_FALSE(validate_model(shape).empty());

    SdeModel wide = ex1_case1();
    wide.drift[0] = parse("x2", 2);
    issues = validate_model(wide);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("variable index out of range") != std::string::npos);
}

TEST_CASE("generator cancels exactly for the martingale examples")
{
    auto lv = generator(ex1_case1(), LyapunovCandidate(parse("x1^2", 1), 1));
    CHECK(lv.canonical);
    CHECK(lv.expr.is_zero());
    lv = generator(ex2(), LyapunovCandidate(parse("x1^2 + x2^2", 2), 2));
    CHECK(lv.expr.is_zero());
    lv = generator(ex3(), LyapunovCandidate(parse("x1^2", 1), 1));
    CHECK(lv.expr.is_zero());
}

TEST_CASE("generator closed forms")
{
    CHECK(generator_is(ex1_case2(), "x1^2", "-2*x1^2"));
    CHECK(generator_is(ex1_case3(), "x1^2", "-2*x1^4"));
    CHECK(generator_is(ex3(), "abs(x1)^3", "(3/2)*pow(abs(x1), 13/5)"));
    CHECK(generator_is(det_cubicroot(), "x1^2", "-2*pow(abs(x1), 4/3)"));
}

TEST_CASE("diffusion quadratic")
{
    auto q = diffusion_quadratic(ex2(), LyapunovCandidate(parse("x1^2 + x2^2", 2), 2));
    REQUIRE(q.polynomial);
    CHECK(q.polynomial->equals(poly("pow(abs(x1), 10/3) + pow(abs(x2), 10/3)", 2)));
}

TEST_CASE("symbolic generator matches finite differences")
{
    struct Case {
        SdeModel model;
        const char* v;
    };
    std::vector<Case> cases = {{ex1_case1(), "x1^2"},         {ex1_case2(), "x1^2"}, {ex1_case3(), "x1^2"},
                               {ex2(), "x1^2 + x2^2"},          {ex3(), "abs(x1)^3"},  {ex3(), "x1^2"},
                               {ex2(), "x1^4 + x1^2*x2^2 + abs(x2)^3"}};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> log_r(-2.0, 2.0);
    std::normal_distribution<double> gauss;
    for (const auto& c : cases) {
        const int n = c.model.dim;
        Expr v = parse(c.v, n);
        CompiledExpr lv(generator(c.model, LyapunovCandidate(v, n)).expr);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> x(n);
            double norm = 0.0;
            for (auto& xi : x) {
                xi = gauss(rng);
                norm += xi * xi;
            }
            double r = std::pow(10.0, log_r(rng)) / std::sqrt(norm);
            for (auto& xi : x)
                xi *= r;
            auto fd = fd_generator(c.model, v, x);
            worst = std::max(worst, std::fabs(lv(x) - fd.value) / fd.scale);
        }
        INFO(c.model.name << " V=" << c.v);
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("candidate spot checks")
{
    auto ok = spot_check_candidate(LyapunovCandidate(parse("x1^2 + x2^2", 2), 2), true);
    CHECK(ok.ok());
    CHECK(ok.radially_unbounded);

    auto indefinite = spot_check_candidate(LyapunovCandidate(parse("x1^2 - x2^2", 2), 2), false);
    CHECK_FALSE(indefinite.positive_definite);

    auto offset = spot_check_candidate(LyapunovCandidate(parse("x1^2 + 1", 1), 1), false);
    CHECK_FALSE(offset.zero_at_origin);

}
