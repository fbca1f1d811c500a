#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include "json.hpp"
#include <sstream>

#include "stochcert/mc.hpp"
#include "support/models.hpp"

using namespace stochcert;
using namespace stochcert::testing;

namespace {

SimParams det_params()
{
    SimParams p;
    p.absorb_eps = 1e-6;
    p.t_max = 15.0;
    return p;
}

} // namespace

TEST_CASE("wilson interval")
{
    auto [lo0, hi0] = wilson_interval(0, 10);
    CHECK(lo0 == 0.0);
    CHECK(hi0 == doctest::Approx(0.27753).epsilon(1e-4));
    auto [lo5, hi5] = wilson_interval(5, 10);
    CHECK(lo5 == doctest::Approx(0.23659).epsilon(1e-4));
    CHECK(hi5 == doctest::Approx(0.76341).epsilon(1e-4));
    auto [lo, hi] = wilson_interval(10, 10);
    CHECK(hi == doctest::Approx(1.0));
    CHECK(lo == doctest::Approx(0.72247).epsilon(1e-4));
}

TEST_CASE("parallel_for visits every index once")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits)
        CHECK(h == 1);
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
        if (i == 7)
            throw std::runtime_error("boom");
    }));
}

TEST_CASE("settling on the deterministic oracle")
{
    auto s = estimate_settling(det_cubicroot(), {1.0}, det_params(), 100, 1, 1.5);
    CHECK(s.n_absorbed == 100);
    CHECK(std::fabs(s.censored_mean - 1.5) <= 5e-3);
    CHECK(s.bound_verdict == true);
    CHECK(s.n_absorbed + s.n_unabsorbed + s.n_diverged == s.n_paths);
    CHECK_THROWS(estimate_settling(det_cubicroot(), {1.0}, det_params(), 1, 1));
}

TEST_CASE("settling statistics are independent of the worker count")
{
    SimParams p;
    p.t_max = 5.0;
    auto a = estimate_settling(ex1_case1(), {1.2}, p, 200, 77, 2.5408, 1);
    auto b = estimate_settling(ex1_case1(), {1.2}, p, 200, 77, 2.5408, 3);
    std::ostringstream ja, jb, ca, cb;
    write_stats_jsonl(ja, "r", a);
    write_stats_jsonl(jb, "r", b);
    write_hitting_times_csv(ca, a);
    write_hitting_times_csv(cb, b);
    CHECK(ja.str() == jb.str());
    CHECK(ca.str() == cb.str());
    CHECK(a.censored_mean <= a.t_max);
}

TEST_CASE("censored mean grows with the horizon")
{
    SimParams p;
    double prev = 0.0;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
        p.t_max = t;
        auto s = estimate_settling(ex1_case1(), {1.2}, p, 100, 5, std::nullopt, 1);
        CHECK(s.censored_mean >= prev);
        prev = s.censored_mean;
    }
}

TEST_CASE("standard error scales with the path count")
{
    SimParams p;
    p.t_max = 3.0;
    auto small = estimate_settling(ex1_case1(), {1.2}, p, 200, 11, std::nullopt, 1);
    auto large = estimate_settling(ex1_case1(), {1.2}, p, 800, 11, std::nullopt, 1);
    double ratio = small.se / large.se;
    CHECK(ratio >= 2.0 * 0.8);
    CHECK(ratio <= 2.0 * 1.2);
}

TEST_CASE("markov absorption check")
{
    SettlingStats s;
    s.n_paths = 10000;
    s.absorbed_fraction = 0.9;
    auto m = markov_absorption_check(s);
    CHECK(m.threshold == doctest::Approx(0.9 - 3 * std::sqrt(0.09 / 10000)));
    CHECK(m.pass);
    s.absorbed_fraction = 0.88;
    CHECK_FALSE(markov_absorption_check(s).pass);
}

TEST_CASE("exceedance")
{
    SimParams p;
    p.t_max = 5.0;
    Expr v = parse("x1^2", 1);
    auto e = estimate_exceedance(ex1_case1(), v, {1.2}, 9.0, p, 400, 3);
    CHECK(e.bound == doctest::Approx(2 * 1.44 / 9));
    CHECK(e.wilson_lo <= e.estimate);
    CHECK(e.estimate <= e.wilson_hi);
    CHECK(e.verdict);

    auto clamped = estimate_exceedance(ex1_case1(), v, {1.2}, 2.0, p, 50, 3);
    CHECK(clamped.bound == 1.0);
    CHECK(clamped.verdict);

    auto det = estimate_exceedance(det_cubicroot(), v, {1.0}, 1.5, det_params(), 20, 3);
    CHECK(det.events == 0);
    CHECK(det.estimate == 0.0);
    CHECK_THROWS(estimate_exceedance(det_cubicroot(), v, {1.0}, 0.0, det_params(), 20, 3));
}

TEST_CASE("empirical supermartingale")
{
    SimParams p;
    p.t_max = 4.0;
    std::vector<double> checkpoints{0, 0.5, 1, 2, 4};
    auto zero = empirical_supermartingale(make_model("zero", 1, 1, {"0"}, {{"0"}}), parse("x1^2", 1), {1.5},
                                          checkpoints, p, 10, 1);
    for (double m : zero.mean)
        CHECK(m == 2.25);
    CHECK(zero.verdict);

    auto ex = empirical_supermartingale(ex1_case1(), parse("x1^2", 1), {1.2}, checkpoints, p, 300, 1);
    CHECK(ex.mean.front() == doctest::Approx(1.44));
    CHECK(ex.allowance == doctest::Approx(p.dt));
    CHECK(ex.verdict);

    // A process that drifts outward must fail.
    auto up = empirical_supermartingale(make_model("up", 1, 1, {"x1"}, {{"0"}}), parse("x1^2", 1), {1.0},
                                        {0, 0.5, 1}, p, 10, 1);
    CHECK_FALSE(up.verdict);
    CHECK_THROWS(empirical_supermartingale(ex1_case1(), parse("x1^2", 1), {1.2}, {1, 0.5}, p, 10, 1));
}

TEST_CASE("statistics serialization")
{
    auto s = estimate_settling(det_cubicroot(), {1.0}, det_params(), 10, 1, 1.5);
    std::ostringstream out;
    write_stats_jsonl(out, "det", s);
    auto j = nlohmann::json::parse(out.str());
    CHECK(j["run_id"] == "det");
    CHECK(j["kind"] == "settling_censored_mean");
    CHECK(j["bound"] == 1.5);
    CHECK(j["verdict"] == "pass");
    CHECK(j.size() == 6);

    std::ostringstream csv;
    write_hitting_times_csv(csv, s);
    CHECK(csv.str().rfind("path_index,hitting_time,absorbed\n0,", 0) == 0);
}
