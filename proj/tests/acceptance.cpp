// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "stochcert/mc.hpp"
#include "stochcert/registry.hpp"
#include "support/fd_generator.hpp"

using namespace stochcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [x]");
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RunConfig& preset(const char* name) { return find_example(name)->config; }

LyapunovCandidate cand(const RunConfig& c, bool use_u = false)
{
    return LyapunovCandidate(use_u ? *c.u_expr() : c.v_expr(), c.dim);
}

bool polynomial_is(const CanonicalForm& f, const std::string& expected, int dim)
{
    return f.canonical && f.polynomial && f.polynomial->equals(*to_polynomial(parse(expected, dim)))
           && f.polynomial->terms().size() == 1 && f.polynomial->terms()[0].coefficient().is_exact();
}

Outcome generator_identities()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto zero = [&](const char* name, bool use_u) {
        const RunConfig& c = preset(name);
        auto lv = generator(c.model(), cand(c, use_u));
        o.require(lv.canonical && lv.expr.is_zero() && lv.expr.value().is_exact(),
                  std::string(name) + (use_u ? " LU" : " LV") + " = " + to_string(lv.expr));
    };
    zero("ex1-case1", false);
    zero("ex2", false);
    zero("ex3", true);
    double t = seconds_since(t0);
    o.require(t < 1.0, fmt("%.3fs < 1s", t));
    return o;
}

Outcome generator_closed_forms()
{
    Outcome o;
    auto check = [&](const char* name, const char* expected) {
        const RunConfig& c = preset(name);
        auto lv = generator(c.model(), cand(c));
        o.require(polynomial_is(lv, expected, c.dim), std::string(name) + " LV = " + to_string(lv.expr));
    };
    check("ex1-case2", "-2*x1^2");
    check("ex1-case3", "-2*x1^4");
    check("ex3", "(3/2)*pow(abs(x1), 13/5)");
    return o;
}

Outcome oracle_agreement()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> log_r(-2.0, 2.0);
    std::normal_distribution<double> gauss;
    for (const auto& p : example_registry()) {
        for (bool use_u : {false, true}) {
            if (use_u && !p.config.u)
                continue;
            const int n = p.config.dim;
            SdeModel model = p.config.model();
            Expr v = use_u ? *p.config.u_expr() : p.config.v_expr();
            CompiledExpr lv(generator(model, LyapunovCandidate(v, n)).expr);
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
                auto fd = testing::fd_generator(model, v, x);
                double err = fd.scale > 0 ? std::fabs(lv(x) - fd.value) / fd.scale : std::fabs(lv(x));
                worst = std::max(worst, err);
            }
            o.require(worst <= 1e-6, p.name + (use_u ? "(U)" : "") + fmt(" %.1e", worst));
        }
    }
    double t = seconds_since(t0);
    o.require(t < 10.0, fmt("%.2fs < 10s", t));
    return o;
}

Outcome feasible_c()
{
    Outcome o;
    SampleDomain d;
    const KFunction k23 = PowerK{2.0 / 3.0};
    auto run = [&](const char* name, const KFunction& k) {
        const RunConfig& c = preset(name);
        return max_feasible_c(c.model(), cand(c), k, d);
    };
    auto c1 = run("ex1-case1", k23);
    o.require(std::fabs(c1.c_max - 4.0 / 3.0) <= 1e-6, fmt("ex1-case1 %.9f", c1.c_max));
    auto c2 = run("ex1-case2", k23);
    o.require(std::fabs(c2.c_max - 4.0 / 3.0) <= 1e-3 && c2.trend == BoundaryTrend::TowardRMin,
              fmt("ex1-case2 %.6f ", c2.c_max) + to_string(c2.trend));
    auto e3 = run("ex3", KFunction(PowerK{13.0 / 15.0}));
    o.require(std::fabs(e3.c_max - 2.4) <= 1e-6, fmt("ex3 %.9f", e3.c_max));
    auto e2 = run("ex2", k23);
    o.require(std::fabs(e2.c_max - 0.20999) <= 1e-3, fmt("ex2 %.6f", e2.c_max));

    const RunConfig& c = preset("ex2");
    auto r = check_condition_thm1(c.model(), cand(c), k23, 1.0 / 3.0, d);
    double gap = r.argmin.size() == 2 ? std::fabs(std::fabs(r.argmin[0]) - std::fabs(r.argmin[1])) : INFINITY;
    double radius = r.argmin.size() == 2 ? std::hypot(r.argmin[0], r.argmin[1]) : 0.0;
    o.require(!r.pass && gap <= 0.05 * radius, "ex2 c=1/3 fails at ||x1|-|x2||/|x|" + fmt("=%.2e", gap / radius));
    return o;
}

Outcome integrals()
{
    Outcome o;
    for (double v : {1e-6, 1.0, 1e3}) {
        KFunction k = PowerK{2.0 / 3.0};
        double closed = recip_integral(k, v);
        double quad = recip_integral_quadrature(k, v);
        double err = std::fabs(quad - closed) / closed;
        o.require(err <= 1e-8, fmt("v=%g", v) + fmt(" rel %.1e", err));
    }
    double total = recip_integral(KFunction(PowerSumK{0.5, 2.0}), INFINITY);
    double exact = 4 * std::numbers::pi / (3 * std::sqrt(3.0));
    o.require(std::fabs(total - exact) <= 1e-6, fmt("PowerSumK(1/2,2) total %.9f", total));
    return o;
}

Outcome settling_bounds()
{
    Outcome o;
    double b1 = settling_bound(KFunction(PowerK{2.0 / 3.0}), 4.0 / 3.0, 1.44);
    double b2 = settling_bound(KFunction(PowerK{13.0 / 15.0}), 2.4, 8.0);
    double b3 = settling_bound(KFunction(PowerK{2.0 / 3.0}), 2.0, 1.0);
    o.require(std::fabs(b1 - 2.5408) <= 1e-4, fmt("%.6f", b1));
    o.require(std::fabs(b2 - 4.1235) <= 1e-4, fmt("%.6f", b2));
    o.require(std::fabs(b3 - 1.5) <= 1e-12, fmt("%.15f", b3));
    return o;
}

Outcome deterministic_oracle()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const RunConfig& c = preset("det-cubicroot");
    SimParams p;
    p.dt = 1e-4;
    p.absorb_eps = 1e-6;
    p.t_max = 10.0;
    HitResult hit = Simulator(c.model()).run(std::vector<double>{1.0}, p, c.seed, 0);
    double bound = settling_bound(KFunction(PowerK{2.0 / 3.0}), 2.0, 1.0);
    o.require(hit.absorbed && std::fabs(hit.hitting_time - 1.5) <= 5e-3, fmt("hitting time %.4f", hit.hitting_time));
    o.require(std::fabs(hit.hitting_time - bound) <= 5e-3, fmt("bound %.4f", bound));
    double t = seconds_since(t0);
    o.require(t < 1.0, fmt("%.3fs < 1s", t));
    return o;
}

struct McRun {
    const char* name;
    double bound;
};
const McRun kMcRuns[] = {{"ex1-case1", 2.5408}, {"ex3", 4.1235}};

// Criterion 8 runs; stats.jsonl text per example.
std::string monte_carlo_stats(const McRun& run, int workers, Outcome* o)
{
    const RunConfig& c = preset(run.name);
    SimParams p = c.sim_params(10.0 * run.bound);
    p.t_max = 10.0 * run.bound;
    p.dt = 1e-4;
    auto t0 = std::chrono::steady_clock::now();
    SettlingStats s = estimate_settling(c.model(), c.x0, p, 10000, c.seed, run.bound, workers);
    MarkovCheck m = markov_absorption_check(s);
    double t = seconds_since(t0);
    std::ostringstream out;
    write_stats_jsonl(out, run.name, s);
    write_stats_jsonl(out, run.name, m);
    if (o) {
        o->require(s.valid && s.censored_mean <= run.bound + 3 * s.se,
                   std::string(run.name) + fmt(" mean %.4f", s.censored_mean) + fmt(" <= %.4f", run.bound)
                       + fmt(" + 3*%.4f", s.se));
        o->require(m.pass, fmt("absorbed %.4f", m.absorbed_fraction) + fmt(" >= %.4f", m.threshold));
        o->require(t <= 300.0, fmt("%.0fs", t));
    }
    return out.str();
}

std::string criterion8_files[2];

Outcome monte_carlo_bounds()
{
    Outcome o;
    for (int i = 0; i < 2; ++i)
        criterion8_files[i] = monte_carlo_stats(kMcRuns[i], 1, &o);
    return o;
}

Outcome exceedance()
{
    Outcome o;
    const RunConfig& c = preset("ex1-case1");
    SimParams p = c.sim_params(25.408);
    auto e = estimate_exceedance(c.model(), c.v_expr(), c.x0, 9.0, p, 4000, c.seed);
    o.require(e.valid && e.wilson_lo <= 0.32,
              fmt("estimate %.4f", e.estimate) + fmt(" [%.4f", e.wilson_lo) + fmt(", %.4f]", e.wilson_hi)
                  + fmt(" bound %.4f", e.bound));
    return o;
}

Outcome supermartingale()
{
    Outcome o;
    std::vector<double> checkpoints{0, 0.5, 1, 2, 4};
    auto run = [&](const char* name, bool use_u) {
        const RunConfig& c = preset(name);
        SimParams p = c.sim_params(4.0);
        p.t_max = 4.0;
        auto r = empirical_supermartingale(c.model(), use_u ? *c.u_expr() : c.v_expr(), c.x0, checkpoints, p, 4000,
                                           c.seed);
        std::string means;
        for (double m : r.mean)
            means += fmt(" %.3f", m);
        o.require(r.verdict, std::string(name) + (use_u ? " U:" : " V:") + means);
    };
    run("ex1-case1", false);
    run("ex3", true);
    return o;
}

Outcome reproducibility()
{
    Outcome o;
    auto dir = fs::temp_directory_path() / "stochcert_acceptance";
    fs::create_directories(dir);
    for (int i = 0; i < 2; ++i) {
        std::string again = monte_carlo_stats(kMcRuns[i], 4, nullptr);
        auto a = dir / (std::string(kMcRuns[i].name) + "_w1_stats.jsonl");
        auto b = dir / (std::string(kMcRuns[i].name) + "_w4_stats.jsonl");
        std::ofstream(a) << criterion8_files[i];
        std::ofstream(b) << again;
        std::ifstream ra(a, std::ios::binary), rb(b, std::ios::binary);
        std::string ba((std::istreambuf_iterator<char>(ra)), {}), bb((std::istreambuf_iterator<char>(rb)), {});
        o.require(!ba.empty() && ba == bb, std::string(kMcRuns[i].name) + " 1 vs 4 workers identical");
    }
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        const char* title;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"generator identities", generator_identities},
        {"generator closed forms", generator_closed_forms},
        {"symbolic vs finite-difference generator", oracle_agreement},
        {"max feasible c", feasible_c},
        {"reciprocal-K integrals", integrals},
        {"settling bounds", settling_bounds},
        {"deterministic simulation oracle", deterministic_oracle},
        {"Monte Carlo bound checks", monte_carlo_bounds},
        {"exceedance probability", exceedance},
        {"empirical supermartingale", supermartingale},
        {"reproducibility across worker counts", reproducibility},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.title, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
