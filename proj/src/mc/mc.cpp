#include "stochcert/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace stochcert {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body)
{
    std::size_t count = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    count = std::min(count, std::max<std::size_t>(n, 1));
    if (count <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

SettlingStats estimate_settling(const SdeModel& model, const std::vector<double>& x0, const SimParams& params,
                                std::size_t n_paths, std::uint64_t master_seed, std::optional<double> bound,
                                int workers)
{
    if (n_paths < 2)
        throw std::invalid_argument("estimate_settling needs at least 2 paths");
    params.validate();
    Simulator sim(model);
    SettlingStats out;
    out.n_paths = n_paths;
    out.t_max = static_cast<double>(params.steps()) * params.dt;
    out.paths.resize(n_paths);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        HitResult hit = sim.run(x0, params, master_seed, i);
        out.paths[i] = PathRecord{i, hit.absorbed, hit.diverged, hit.hitting_time};
    });

    double sum = 0.0;
    for (const auto& p : out.paths) {
        if (p.diverged) {
            ++out.n_diverged;
            out.valid = false;
        } else if (p.absorbed) {
            ++out.n_absorbed;
            out.max_hitting_time = std::max(out.max_hitting_time, p.hitting_time);
        } else {
            ++out.n_unabsorbed;
        }
        sum += p.absorbed ? p.hitting_time : out.t_max;
    }
    const double n = static_cast<double>(n_paths);
    out.censored_mean = sum / n;
    double ss = 0.0;
    for (const auto& p : out.paths) {
        double d = (p.absorbed ? p.hitting_time : out.t_max) - out.censored_mean;
        ss += d * d;
    }
    out.se = std::sqrt(ss / (n - 1.0) / n);
    out.ci95_halfwidth = 1.96 * out.se;
    out.absorbed_fraction = static_cast<double>(out.n_absorbed) / n;
    if (bound) {
        out.bound = bound;
        out.bound_verdict = out.valid && out.censored_mean <= *bound + 3.0 * out.se;
    }
    return out;
}

MarkovCheck markov_absorption_check(const SettlingStats& stats)
{
    MarkovCheck out;
    out.horizon = stats.t_max;
    out.absorbed_fraction = stats.absorbed_fraction;
    out.threshold = 0.9 - 3.0 * std::sqrt(0.9 * 0.1 / static_cast<double>(stats.n_paths));
    out.pass = stats.valid && out.absorbed_fraction >= out.threshold;
    return out;
}

std::pair<double, double> wilson_interval(std::size_t events, std::size_t n)
{
    if (n == 0)
        return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(events) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ProbEstimate estimate_exceedance(const SdeModel& model, const Expr& v, const std::vector<double>& x0, double level,
                                 const SimParams& params, std::size_t n_paths, std::uint64_t master_seed, int workers)
{
    if (!(level > 0.0))
        throw std::invalid_argument("exceedance level must be positive");
    if (n_paths < 2)
        throw std::invalid_argument("estimate_exceedance needs at least 2 paths");
    Simulator sim(model);
    CompiledExpr v_eval(v);
    std::vector<char> hit(n_paths, 0);
    std::vector<char> diverged(n_paths, 0);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        bool reached = false;
        HitResult r = sim.run(x0, params, master_seed, i, [&](std::int64_t, std::span<const double> x) {
            if (!reached && v_eval(x) >= level)
                reached = true;
        });
        hit[i] = reached;
        diverged[i] = r.diverged;
    });
    ProbEstimate out;
    out.n_paths = n_paths;
    for (std::size_t i = 0; i < n_paths; ++i) {
        out.events += hit[i] ? 1 : 0;
        if (diverged[i])
            out.valid = false;
    }
    out.estimate = static_cast<double>(out.events) / static_cast<double>(n_paths);
    std::tie(out.wilson_lo, out.wilson_hi) = wilson_interval(out.events, n_paths);
    out.bound = std::min(1.0, 2.0 * evaluate(v, x0) / level);
    out.verdict = out.valid && out.wilson_lo <= out.bound;
    return out;
}

SupermartingaleReport empirical_supermartingale(const SdeModel& model, const Expr& v, const std::vector<double>& x0,
                                                const std::vector<double>& checkpoints, const SimParams& params,
                                                std::size_t n_paths, std::uint64_t master_seed, int workers,
                                                double allowance_constant)
{
    if (checkpoints.empty() || n_paths < 2)
        throw std::invalid_argument("supermartingale check needs checkpoints and at least 2 paths");
    for (std::size_t k = 1; k < checkpoints.size(); ++k)
        if (!(checkpoints[k] > checkpoints[k - 1]))
            throw std::invalid_argument("checkpoints must be increasing");
    if (checkpoints.front() < 0.0 || checkpoints.back() > params.t_max + 0.5 * params.dt)
        throw std::invalid_argument("checkpoints must lie within [0, t_max]");

    std::vector<std::int64_t> steps;
    for (double t : checkpoints)
        steps.push_back(std::llround(t / params.dt));

    Simulator sim(model);
    CompiledExpr v_eval(v);
    const std::size_t m = checkpoints.size();
    std::vector<double> values(n_paths * m, 0.0); // absorbed paths keep V = 0
    std::vector<char> diverged(n_paths, 0);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        std::size_t next = 0;
        double* row = values.data() + i * m;
        HitResult r = sim.run(x0, params, master_seed, i, [&](std::int64_t k, std::span<const double> x) {
            while (next < m && steps[next] == k)
                row[next++] = v_eval(x);
        });
        diverged[i] = r.diverged;
    });

    SupermartingaleReport out;
    out.checkpoints = checkpoints;
    out.n_paths = n_paths;
    out.allowance_constant = allowance_constant;
    out.allowance = allowance_constant * params.dt;
    const double n = static_cast<double>(n_paths);
    for (std::size_t k = 0; k < m; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i)
            sum += values[i * m + k];
        double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            double d = values[i * m + k] - mean;
            ss += d * d;
        }
        out.mean.push_back(mean);
        out.se.push_back(std::sqrt(ss / (n - 1.0) / n));
    }
    for (char d : diverged)
        if (d)
            out.valid = false;
    out.verdict = out.valid;
    for (std::size_t k = 0; k + 1 < m; ++k)
        if (out.mean[k + 1] > out.mean[k] + 2.0 * (out.se[k] + out.se[k + 1]) + out.allowance)
            out.verdict = false;
    return out;
}

} // namespace stochcert
