#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "stochcert/mc.hpp"

namespace stochcert {

namespace {

void emit(std::ostream& out, const std::string& run_id, const std::string& kind, double estimate, double se,
          std::optional<double> bound, std::optional<bool> verdict)
{
    nlohmann::ordered_json j;
    j["run_id"] = run_id;
    j["kind"] = kind;
    j["estimate"] = estimate;
    j["se"] = se;
    j["bound"] = bound ? nlohmann::ordered_json(*bound) : nlohmann::ordered_json(nullptr);
    j["verdict"] = verdict ? nlohmann::ordered_json(*verdict ? "pass" : "fail") : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
}

} // namespace

void write_stats_jsonl(std::ostream& out, const std::string& run_id, const SettlingStats& stats)
{
    std::optional<bool> verdict = stats.bound_verdict;
    if (!stats.valid)
        verdict = false;
    emit(out, run_id, "settling_censored_mean", stats.censored_mean, stats.se, stats.bound, verdict);
}

void write_stats_jsonl(std::ostream& out, const std::string& run_id, const MarkovCheck& check)
{
    // The threshold sits 3 null standard errors below 0.9.
    emit(out, run_id, "absorbed_fraction", check.absorbed_fraction, (0.9 - check.threshold) / 3.0, check.threshold,
         check.pass);
}

void write_stats_jsonl(std::ostream& out, const std::string& run_id, const ProbEstimate& estimate)
{
    double se = std::sqrt(estimate.estimate * (1.0 - estimate.estimate) / static_cast<double>(estimate.n_paths));
    emit(out, run_id, "exceedance", estimate.estimate, se, estimate.bound, estimate.verdict);
}

void write_stats_jsonl(std::ostream& out, const std::string& run_id, const SupermartingaleReport& report)
{
    for (std::size_t k = 0; k < report.checkpoints.size(); ++k) {
        char kind[64];
        std::snprintf(kind, sizeof kind, "supermartingale_mean_v@%.17g", report.checkpoints[k]);
        std::optional<double> bound;
        if (k > 0)
            bound = report.mean[k - 1] + 2.0 * (report.se[k - 1] + report.se[k]) + report.allowance;
        std::optional<bool> verdict;
        if (bound)
            verdict = report.valid && report.mean[k] <= *bound;
        emit(out, run_id, kind, report.mean[k], report.se[k], bound, verdict);
    }
}

void write_hitting_times_csv(std::ostream& out, const SettlingStats& stats)
{
    out << "path_index,hitting_time,absorbed\n";
    char buf[32];
    for (const auto& p : stats.paths) {
        out << p.index << ',';
        if (p.absorbed) {
            std::snprintf(buf, sizeof buf, "%.17g", p.hitting_time);
            out << buf;
        }
        out << ',' << (p.absorbed ? 1 : 0) << '\n';
    }
}

} // namespace stochcert
