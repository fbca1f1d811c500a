#pragma once

// Monte Carlo estimators over independent absorbing paths. Paths are farmed out
// to worker threads, results are stored by path index and reduced in index
// order, so every statistic is independent of the worker count.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stochcert/sim.hpp"

namespace stochcert {

struct PathRecord {
    std::uint64_t index = 0;
    bool absorbed = false;
    bool diverged = false;
    double hitting_time = 0.0; // valid when absorbed
};

struct SettlingStats {
    std::size_t n_paths = 0;
    std::size_t n_absorbed = 0;
    std::size_t n_unabsorbed = 0;
    std::size_t n_diverged = 0;
    double t_max = 0.0;
    double censored_mean = 0.0; // mean of min(tau, t_max)
    double se = 0.0;
    double ci95_halfwidth = 0.0;
    double max_hitting_time = 0.0;
    double absorbed_fraction = 0.0;
    std::optional<double> bound;
    std::optional<bool> bound_verdict; // censored_mean <= bound + 3 se
    bool valid = true;                 // false if any path diverged
    std::vector<PathRecord> paths;
};

struct ProbEstimate {
    std::size_t events = 0;
    std::size_t n_paths = 0;
    double estimate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double bound = 1.0;
    bool verdict = false; // wilson_lo <= bound
    bool valid = true;
};

struct SupermartingaleReport {
    std::vector<double> checkpoints;
    std::vector<double> mean;
    std::vector<double> se;
    double allowance_constant = 1.0; // allowance = constant * dt per consecutive pair
    double allowance = 0.0;
    bool verdict = false;
    bool valid = true;
    std::size_t n_paths = 0;
};

struct MarkovCheck {
    double horizon = 0.0;
    double absorbed_fraction = 0.0;
    double threshold = 0.0; // 0.9 - 3 sqrt(0.9 * 0.1 / n)
    bool pass = false;
};

/// Worker count 0 means one per hardware thread.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// Runs path indices 0..n_paths-1. A bound enables the one-sided check
/// censored_mean <= bound + 3 se.
SettlingStats estimate_settling(const SdeModel& model, const std::vector<double>& x0, const SimParams& params,
                                std::size_t n_paths, std::uint64_t master_seed,
                                std::optional<double> bound = std::nullopt, int workers = 0);

/// Fraction absorbed by t_max compared against 0.9 - 3 binomial standard errors,
/// valid when t_max is ten times a sound mean settling-time bound.
MarkovCheck markov_absorption_check(const SettlingStats& stats);

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::size_t events, std::size_t n);

/// P(sup_{t <= t_max} V(x_t) >= level) against min(1, 2 V(x0) / level).
ProbEstimate estimate_exceedance(const SdeModel& model, const Expr& v, const std::vector<double>& x0, double level,
                                 const SimParams& params, std::size_t n_paths, std::uint64_t master_seed,
                                 int workers = 0);

/// Mean of V at checkpoints; passes when consecutive means never rise by more
/// than 2 (se_k + se_{k+1}) + allowance_constant * dt.
SupermartingaleReport empirical_supermartingale(const SdeModel& model, const Expr& v, const std::vector<double>& x0,
                                                const std::vector<double>& checkpoints, const SimParams& params,
                                                std::size_t n_paths, std::uint64_t master_seed, int workers = 0,
                                                double allowance_constant = 1.0);

// Serialization.

/// One JSON object per line: {run_id, kind, estimate, se, bound, verdict}.
void write_stats_jsonl(std::ostream& out, const std::string& run_id, const SettlingStats& stats);
void write_stats_jsonl(std::ostream& out, const std::string& run_id, const MarkovCheck& check);
void write_stats_jsonl(std::ostream& out, const std::string& run_id, const ProbEstimate& estimate);
void write_stats_jsonl(std::ostream& out, const std::string& run_id, const SupermartingaleReport& report);

/// "path_index,hitting_time,absorbed"; the hitting time is empty for unabsorbed paths.
void write_hitting_times_csv(std::ostream& out, const SettlingStats& stats);

} // namespace stochcert
