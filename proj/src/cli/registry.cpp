#include "stochcert/registry.hpp"

namespace stochcert {

namespace {

RunConfig scalar(const std::string& name, const std::string& drift, const std::string& diffusion, const std::string& v,
                 Rational gamma, double x0)
{
    RunConfig c;
    c.name = name;
    c.dim = 1;
    c.brownian_dim = 1;
    c.drift = {drift};
    c.diffusion = {{diffusion}};
    c.v = v;
    c.k_family = "power";
    c.gamma = Number(gamma);
    c.x0 = {x0};
    return c;
}

std::vector<ExamplePreset> build()
{
    std::vector<ExamplePreset> out;

    // Scalar family dx = (-c1 x^alpha - x^{1/3}/2) dt + x^{2/3} dB with V = x^2.
    const std::string noise = "spow(x1,2/3)";
    out.push_back({"ex1-case1", "scalar, pure cubic-root drift; LV = 0, c_max = 4/3", Route::Theorem1,
                   scalar("ex1-case1", "-(1/2)*spow(x1,1/3)", noise, "x1^2", Rational(2, 3), 1.2)});
    out.push_back({"ex1-case2", "scalar, added linear drift; LV = -2V, infimum approached as |x| -> 0",
                   Route::Theorem1,
                   scalar("ex1-case2", "-x1 - (1/2)*spow(x1,1/3)", noise, "x1^2", Rational(2, 3), 1.2)});
    out.push_back({"ex1-case3", "scalar, added cubic drift; LV = -2V^2", Route::Theorem1,
                   scalar("ex1-case3", "-x1^3 - (1/2)*spow(x1,1/3)", noise, "x1^2", Rational(2, 3), 1.2)});

    RunConfig ex2;
    ex2.name = "ex2";
    ex2.dim = 2;
    ex2.brownian_dim = 2;
    ex2.drift = {"-(1/8)*spow(x1,1/3) + x2", "-x1 - (1/8)*spow(x2,1/3)"};
    ex2.diffusion = {{"(1/2)*spow(x1,2/3)", "0"}, {"0", "(1/2)*spow(x2,2/3)"}};
    ex2.v = "x1^2 + x2^2";
    ex2.gamma = Number(Rational(2, 3));
    ex2.x0 = {1.5, 5.0};
    out.push_back({"ex2", "planar rotation with cubic-root damping; LV = 0, c_max = 2^{-2/3}/3", Route::Theorem1,
                   ex2});

    RunConfig ex3 = scalar("ex3", "-(1/2)*spow(x1,3/5)", "spow(x1,4/5)", "abs(x1)^3", Rational(13, 15), 2.0);
    ex3.u = "x1^2";
    out.push_back({"ex3", "scalar, two-function criterion with U = x^2 and V = |x|^3; LU = 0, c_max = 2.4",
                   Route::Theorem3, ex3});

    RunConfig det = scalar("det-cubicroot", "-spow(x1,1/3)", "0", "x1^2", Rational(2, 3), 1.0);
    det.c = 2.0;
    det.absorb_eps = 1e-6;
    out.push_back({"det-cubicroot", "deterministic dx = -x^{1/3} dt; settling time 1.5 from x = 1", Route::Theorem1,
                   det});
    return out;
}

} // namespace

const std::vector<ExamplePreset>& example_registry()
{
    static const std::vector<ExamplePreset> presets = build();
    return presets;
}

const ExamplePreset* find_example(const std::string& name)
{
    for (const auto& p : example_registry())
        if (p.name == name)
            return &p;
    return nullptr;
}

} // namespace stochcert
