#include "stochcert/sim.hpp"

#include <cmath>
#include <cstdio>

namespace stochcert {

void SimParams::validate() const
{
    if (!(dt > 0.0))
        throw std::invalid_argument("dt must be positive");
    if (!(t_max >= dt))
        throw std::invalid_argument("t_max must be >= dt");
    if (!(absorb_eps > 0.0 && absorb_eps < 1.0))
        throw std::invalid_argument("absorb_eps must lie in (0, 1)");
    if (output_stride < 1)
        throw std::invalid_argument("output stride must be >= 1");
    if (!(divergence_guard > absorb_eps))
        throw std::invalid_argument("divergence guard must exceed absorb_eps");
}

std::int64_t SimParams::steps() const
{
    validate();
    return static_cast<std::int64_t>(std::llround(t_max / dt));
}

Simulator::Simulator(const SdeModel& model) : dim_(model.dim), brownian_dim_(model.brownian_dim)
{
    auto issues = validate_model(model);
    if (!issues.empty())
        throw std::invalid_argument("invalid model: " + issues.front());
    for (const auto& f : model.drift)
        drift_.emplace_back(f);
    for (const auto& row : model.diffusion)
        for (const auto& g : row) {
            diffusion_.emplace_back(g);
            diffusion_zero_.push_back(g.is_zero());
            noisy_ = noisy_ || !g.is_zero();
        }
}

void Simulator::step(std::vector<double>& x, std::vector<double>& drift, std::span<const double> increments,
                     double dt) const
{
    // Coefficients are evaluated at x_k before any component moves.
    for (int i = 0; i < dim_; ++i)
        drift[i] = drift_[i](x) * dt;
    std::vector<double>& delta = drift;
    if (noisy_) {
        thread_local std::vector<double> noise;
        noise.assign(dim_, 0.0);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < brownian_dim_; ++j) {
                std::size_t at = static_cast<std::size_t>(i) * brownian_dim_ + j;
                if (!diffusion_zero_[at])
                    noise[i] += diffusion_[at](x) * increments[j];
            }
        for (int i = 0; i < dim_; ++i)
            delta[i] += noise[i];
    }
    for (int i = 0; i < dim_; ++i)
        x[i] += delta[i];
}

Path Simulator::simulate(std::span<const double> x0, const SimParams& params, std::uint64_t master_seed,
                         std::uint64_t path_index) const
{
    Path path;
    const int stride = params.output_stride;
    auto record = [&](std::int64_t k, std::span<const double> x) {
        if (k % stride == 0) {
            path.times.push_back(static_cast<double>(k) * params.dt);
            path.states.emplace_back(x.begin(), x.end());
        }
    };
    HitResult hit = run(x0, params, master_seed, path_index, record);
    path.absorbed = hit.absorbed;
    path.diverged = hit.diverged;
    if (hit.absorbed) {
        path.hitting_time = hit.hitting_time;
        // The origin is absorbing: pad the remaining grid with exact zeros.
        const std::int64_t n_steps = params.steps();
        std::int64_t next = static_cast<std::int64_t>(std::llround(hit.hitting_time / params.dt));
        next = (next / stride + 1) * stride;
        for (std::int64_t k = next; k <= n_steps; k += stride) {
            path.times.push_back(static_cast<double>(k) * params.dt);
            path.states.emplace_back(dim_, 0.0);
        }
    }
    return path;
}

void write_path_csv(std::ostream& out, const Path& path)
{
    const std::size_t n = path.states.empty() ? 0 : path.states.front().size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i)
        out << ",x" << i;
    out << ",absorbed\n";
    char buf[32];
    for (std::size_t row = 0; row < path.times.size(); ++row) {
        std::snprintf(buf, sizeof buf, "%.17g", path.times[row]);
        out << buf;
        bool zero = true;
        for (double v : path.states[row]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
            zero = zero && v == 0.0;
        }
        bool absorbed = path.hitting_time && path.times[row] >= *path.hitting_time && zero;
        out << ',' << (absorbed ? 1 : 0) << '\n';
    }
}

} // namespace stochcert
