#pragma once

// Euler-Maruyama paths with an absorbing origin:
//   x_{k+1} = x_k + f(x_k) dt + g(x_k) dB_k,
// and once |x_{k+1}| <= absorb_eps the state is set to exactly zero for good.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochcert/lyap.hpp"
#include "stochcert/rng.hpp"

namespace stochcert {

struct SimParams {
    double dt = 1e-4;
    double t_max = 10.0;
    double absorb_eps = 1e-5;
    int output_stride = 100;
    double divergence_guard = 1e9;

    void validate() const;
    std::int64_t steps() const;
};

struct Path {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool absorbed = false;
    std::optional<double> hitting_time;
    bool diverged = false;
};

/// Outcome of a path without recorded states.
struct HitResult {
    bool absorbed = false;
    bool diverged = false;
    double hitting_time = 0.0; // valid when absorbed
    double stop_time = 0.0;    // time of the last computed state
};

/// Model with compiled coefficients, shared read-only by all paths.
class Simulator {
public:
    explicit Simulator(const SdeModel& model);

    int dim() const { return dim_; }
    int brownian_dim() const { return brownian_dim_; }

    /// Records every output_stride-th state; after absorption the recorded
    /// states are exact zeros up to t_max.
    Path simulate(std::span<const double> x0, const SimParams& params, std::uint64_t master_seed,
                  std::uint64_t path_index) const;

    /// Runs one path, calling observer(step, state) after each step k >= 1 (and
    /// once with step 0 for the initial state). Stops at absorption, divergence or t_max.
    template <class Observer>
    HitResult run(std::span<const double> x0, const SimParams& params, std::uint64_t master_seed,
                  std::uint64_t path_index, Observer&& observer) const;

    HitResult run(std::span<const double> x0, const SimParams& params, std::uint64_t master_seed,
                  std::uint64_t path_index) const
    {
        return run(x0, params, master_seed, path_index, [](std::int64_t, std::span<const double>) {});
    }

private:
    void step(std::vector<double>& x, std::vector<double>& drift, std::span<const double> increments, double dt) const;

    int dim_;
    int brownian_dim_;
    std::vector<CompiledExpr> drift_;
    std::vector<CompiledExpr> diffusion_; // row-major n x m
    std::vector<bool> diffusion_zero_;
    bool noisy_ = false;
};

/// CSV with header "t,x1,...,xn,absorbed", 17 significant digits.
void write_path_csv(std::ostream& out, const Path& path);

template <class Observer>
HitResult Simulator::run(std::span<const double> x0, const SimParams& params, std::uint64_t master_seed,
                         std::uint64_t path_index, Observer&& observer) const
{
    if (static_cast<int>(x0.size()) != dim_)
        throw std::invalid_argument("initial state has the wrong dimension");
    const std::int64_t n_steps = params.steps();
    const double eps2 = params.absorb_eps * params.absorb_eps;
    const double guard2 = params.divergence_guard * params.divergence_guard;
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> drift(dim_);
    std::vector<double> increments(brownian_dim_);
    BrownianStream noise(master_seed, path_index, brownian_dim_, params.dt);

    HitResult out;
    double r0 = 0.0;
    for (double v : x)
        r0 += v * v;
    if (r0 <= eps2) {
        std::fill(x.begin(), x.end(), 0.0);
        out.absorbed = true;
        observer(std::int64_t{0}, std::span<const double>(x));
        return out;
    }
    observer(std::int64_t{0}, std::span<const double>(x));
    for (std::int64_t k = 0; k < n_steps; ++k) {
        if (noisy_)
            noise.fill(k, increments);
        step(x, drift, increments, params.dt);
        const double t = static_cast<double>(k + 1) * params.dt;
        double r2 = 0.0;
        for (double v : x)
            r2 += v * v;
        out.stop_time = t;
        if (r2 <= eps2) {
            std::fill(x.begin(), x.end(), 0.0);
            out.absorbed = true;
            out.hitting_time = t;
            observer(k + 1, std::span<const double>(x));
            return out;
        }
        if (!(r2 < guard2)) {
            out.diverged = true;
            observer(k + 1, std::span<const double>(x));
            return out;
        }
        observer(k + 1, std::span<const double>(x));
    }
    return out;
}

} // namespace stochcert
