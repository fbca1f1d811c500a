#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "stochcert/sim.hpp"
#include "support/models.hpp"

using namespace stochcert;
using namespace stochcert::testing;

TEST_CASE("philox known answers")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("brownian increments")
{
    const double dt = 1e-3;
    const int n = 100000;
    BrownianStream a(42, 0, 1, dt), b(42, 1, 1, dt), a2(42, 0, 1, dt);
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int k = 0; k < n; ++k) {
        double x, y, x2;
        a.fill(k, std::span<double>(&x, 1));
        b.fill(k, std::span<double>(&y, 1));
        a2.fill(k, std::span<double>(&x2, 1));
        REQUIRE(x == x2);
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    double ma = sa / n, mb = sb / n;
    double va = saa / n - ma * ma, vb = sbb / n - mb * mb;
    double rho = (sab / n - ma * mb) / std::sqrt(va * vb);
    CHECK(std::fabs(ma) < 3 * std::sqrt(dt / n));
    CHECK(va / dt >= 0.97);
    CHECK(va / dt <= 1.03);
    CHECK(vb / dt >= 0.97);
    CHECK(vb / dt <= 1.03);
    CHECK(std::fabs(rho) < 0.01);

    // Components of one step are independent draws.
    BrownianStream m(42, 0, 3, 1.0);
    double z[3];
    m.fill(5, z);
    CHECK(z[0] != z[1]);
    CHECK(z[1] != z[2]);
    CHECK(z[0] == standard_normal(42, 0, 5, 0));
}

TEST_CASE("zero dynamics stay put")
{
    Simulator sim(make_model("zero", 1, 1, {"0"}, {{"0"}}));
    SimParams p;
    p.t_max = 1.0;
    Path path = sim.simulate(std::vector<double>{1.0}, p, 1, 0);
    CHECK_FALSE(path.absorbed);
    for (const auto& s : path.states)
        CHECK(s[0] == 1.0);
    CHECK(path.times.back() == doctest::Approx(1.0));
}

TEST_CASE("deterministic cubic-root oracle")
{
    Simulator sim(det_cubicroot());
    SimParams p;
    p.dt = 1e-4;
    p.absorb_eps = 1e-6;
    p.t_max = 3.0;
    HitResult hit = sim.run(std::vector<double>{1.0}, p, 1, 0);
    REQUIRE(hit.absorbed);
    CHECK(std::fabs(hit.hitting_time - 1.5) <= 5e-3);

    // Forward Euler by hand.
    double x = 1.0;
    int k = 0;
    while (std::fabs(x) > p.absorb_eps) {
        x -= std::cbrt(x) * p.dt;
        ++k;
    }
    CHECK(hit.hitting_time == doctest::Approx(k * p.dt).epsilon(1e-12));

    SimParams half = p;
    half.dt = p.dt / 2;
    HitResult refined = sim.run(std::vector<double>{1.0}, half, 1, 0);
    CHECK(std::fabs(refined.hitting_time - hit.hitting_time) <= 2 * p.dt);
}

TEST_CASE("absorption is permanent and paths are deterministic")
{
    Simulator sim(ex1_case1());
    SimParams p;
    p.t_max = 20.0;
    p.output_stride = 50;
    Path a = sim.simulate(std::vector<double>{1.2}, p, 9, 3);
    Path b = sim.simulate(std::vector<double>{1.2}, p, 9, 3);
    CHECK(a.states == b.states);
    REQUIRE(a.absorbed);
    REQUIRE(a.hitting_time);
    CHECK(*a.hitting_time <= p.t_max);
    for (std::size_t i = 0; i < a.times.size(); ++i)
        if (a.times[i] >= *a.hitting_time)
            CHECK(a.states[i][0] == 0.0);
    Path c = sim.simulate(std::vector<double>{1.2}, p, 9, 4);
    CHECK(c.states != a.states);
}

TEST_CASE("divergence guard")
{
    Simulator sim(make_model("blowup", 1, 1, {"x1^3"}, {{"0"}}));
    SimParams p;
    p.dt = 1e-2;
    p.t_max = 10.0;
    HitResult r = sim.run(std::vector<double>{2.0}, p, 1, 0);
    CHECK(r.diverged);
    CHECK_FALSE(r.absorbed);
}

TEST_CASE("start inside the absorbing ball")
{
    Simulator sim(ex1_case1());
    SimParams p;
    HitResult r = sim.run(std::vector<double>{1e-7}, p, 1, 0);
    CHECK(r.absorbed);
    CHECK(r.hitting_time == 0.0);
}

TEST_CASE("path csv")
{
    Simulator sim(ex2());
    SimParams p;
    p.t_max = 0.01;
    p.output_stride = 25;
    Path path = sim.simulate(std::vector<double>{1.5, 5.0}, p, 1, 0);
    std::ostringstream out;
    write_path_csv(out, path);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,x2,absorbed");
    std::getline(in, line);
    CHECK(line == "0,1.5,5,0");
    int rows = 1;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 5);
}

TEST_CASE("parameter validation")
{
    SimParams p;
    p.dt = 0;
    CHECK_THROWS(p.validate());
    p = SimParams{};
    p.output_stride = 0;
    CHECK_THROWS(p.validate());
    CHECK_THROWS(Simulator(make_model("bad", 1, 1, {"x1 + 1"}, {{"0"}})));
}
