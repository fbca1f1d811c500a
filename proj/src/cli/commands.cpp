#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stochcert/cli.hpp"
#include "stochcert/mc.hpp"
#include "stochcert/registry.hpp"

namespace stochcert {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string example;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::optional<int> n;
    std::optional<double> dt;
    std::optional<double> tmax;
    std::optional<double> eps;
    std::optional<double> c;
    std::optional<std::string> gamma;
    std::optional<std::string> k;
    std::optional<std::string> alpha;
    std::vector<double> x0;
    int workers = 0;
    std::optional<double> lambda;
    std::vector<double> checkpoints;
};

void add_shared(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "run configuration file");
    cmd->add_option("--example", o.example, "built-in preset (takes precedence over --config)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--n", o.n, "number of paths");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--tmax", o.tmax, "simulation horizon");
    cmd->add_option("--eps", o.eps, "absorption radius");
    cmd->add_option("--c", o.c, "certificate constant c (default: 0.99 c_max)");
    cmd->add_option("--gamma", o.gamma, "K exponent, e.g. 2/3");
    cmd->add_option("--k", o.k, "K family")->check(CLI::IsMember({"power", "powersum"}));
    cmd->add_option("--alpha", o.alpha, "second exponent of the powersum family");
    cmd->add_option("--x0", o.x0, "initial state");
    cmd->add_option("--workers", o.workers, "worker threads (0: one per core)");
}

Number constant_option(const std::string& flag, const std::string& text)
{
    try {
        Expr e = parse(text, 1);
        if (e.is_constant())
            return e.value();
    } catch (const ParseError&) {
    }
    throw UsageError(flag + " expects a constant such as 2/3, got '" + text + "'");
}

RunConfig resolve(const Options& o, std::ostream& err)
{
    RunConfig c;
    if (!o.example.empty()) {
        const ExamplePreset* p = find_example(o.example);
        if (!p)
            throw UsageError("unknown example '" + o.example + "' (see 'examples')");
        if (!o.config.empty())
            err << "note: --example " << o.example << " takes precedence over --config\n";
        c = p->config;
    } else if (!o.config.empty()) {
        c = load_config(o.config);
    } else {
        throw UsageError("one of --example or --config is required");
    }
    if (o.seed)
        c.seed = *o.seed;
    if (o.n)
        c.n_paths = *o.n;
    if (o.dt)
        c.dt = *o.dt;
    if (o.tmax)
        c.t_max = *o.tmax;
    if (o.eps)
        c.absorb_eps = *o.eps;
    if (o.c)
        c.c = *o.c;
    if (o.gamma)
        c.gamma = constant_option("--gamma", *o.gamma);
    if (o.k)
        c.k_family = *o.k;
    if (o.alpha)
        c.alpha = constant_option("--alpha", *o.alpha);
    if (!o.x0.empty())
        c.x0 = o.x0;
    c.validate();
    return c;
}

std::filesystem::path output_dir(const Options& o)
{
    std::filesystem::path dir(o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw UsageError("cannot create output directory " + o.out + ": " + ec.message());
    return dir;
}

json to_json(const MarginReport& r)
{
    json j;
    j["condition"] = r.condition;
    j["pass"] = r.pass;
    j["min_margin"] = r.min_margin;
    j["argmin"] = r.argmin;
    j["samples"] = r.samples;
    j["skipped"] = r.skipped;
    j["tolerance"] = r.tolerance;
    j["exact_zero"] = r.exact_zero;
    j["boundary_trend"] = to_string(r.trend);
    return j;
}

json to_json(const CertificateVerdict& v, const RunConfig& c)
{
    json j;
    j["run_id"] = c.name;
    j["label"] = v.label;
    j["route"] = to_string(v.route);
    j["status"] = to_string(v.status);
    j["K"] = c.k().describe();
    j["c_used"] = v.c_used;
    if (v.feasible) {
        json f;
        f["c_max"] = v.feasible->c_max;
        f["argmin"] = v.feasible->argmin;
        f["boundary_trend"] = to_string(v.feasible->trend);
        f["feasible"] = v.feasible->feasible;
        if (!v.feasible->message.empty())
            f["message"] = v.feasible->message;
        j["feasible_c"] = f;
    }
    j["generator_V"] = v.generator_v;
    if (!v.generator_u.empty())
        j["generator_U"] = v.generator_u;
    j["conditions"] = json::array();
    for (const auto& r : v.reports)
        j["conditions"].push_back(to_json(r));
    if (v.classical)
        j["classical"] = to_json(*v.classical);
    if (v.v0) {
        j["x0"] = c.x0;
        j["V_x0"] = *v.v0;
    }
    j["settling_bound"] = v.settling_bound ? json(*v.settling_bound) : json(nullptr);
    j["diagnostics"] = v.diagnostics;
    return j;
}

std::string fmt(double d)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", d);
    return buf;
}

void print_verdict(std::ostream& out, const CertificateVerdict& v, const RunConfig& c)
{
    out << c.name << ": " << to_string(v.status) << " via " << to_string(v.route) << " (" << v.label << ")\n";
    out << "  K = " << c.k().describe() << "\n";
    if (!v.generator_v.empty())
        out << "  LV = " << v.generator_v << "\n";
    if (!v.generator_u.empty())
        out << "  LU = " << v.generator_u << "\n";
    if (v.feasible)
        out << "  c_max = " << fmt(v.feasible->c_max) << " (boundary trend: " << to_string(v.feasible->trend)
            << ")\n";
    out << "  c = " << fmt(v.c_used) << "\n";
    for (const auto& r : v.reports)
        out << "  [" << (r.pass ? "pass" : "FAIL") << "] " << r.condition << "  min margin " << fmt(r.min_margin)
            << (r.exact_zero ? " (exact)" : "") << "\n";
    if (v.classical)
        out << "  [" << (v.classical->pass ? "pass" : "fail") << "] " << v.classical->condition << " (informational)\n";
    if (v.settling_bound)
        out << "  settling-time bound E[tau] <= " << fmt(*v.settling_bound) << " from V(x0) = " << fmt(*v.v0) << "\n";
    for (const auto& d : v.diagnostics)
        out << "  note: " << d << "\n";
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err)
{
    RunConfig c = resolve(o, err);
    CertificateVerdict v = certify(c.certify_request());
    print_verdict(out, v, c);
    auto path = output_dir(o) / "report.json";
    std::ofstream f(path);
    f << to_json(v, c).dump(2) << "\n";
    out << "wrote " << path.string() << "\n";
    if (v.status == CertStatus::Aborted)
        return 2;
    return v.certified() ? 0 : 1;
}

// Bound from the certificate when one is obtained, else nullopt.
std::optional<double> certified_bound(const RunConfig& c, std::ostream& out)
{
    if (c.x0.empty())
        throw UsageError("x0 is required (config simulation.x0 or --x0)");
    CertificateVerdict v = certify(c.certify_request());
    if (v.certified() && v.settling_bound) {
        out << c.name << ": certified via " << to_string(v.route) << ", bound " << fmt(*v.settling_bound) << "\n";
        return v.settling_bound;
    }
    out << c.name << ": no certificate (" << to_string(v.status) << "), running without a bound\n";
    return std::nullopt;
}

double default_horizon(const RunConfig& c, std::optional<double> bound, std::ostream& out)
{
    if (c.t_max)
        return *c.t_max;
    if (bound)
        return 10.0 * *bound;
    out << "  no bound and no t_max given; using t_max = 10\n";
    return 10.0;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err)
{
    RunConfig c = resolve(o, err);
    std::optional<double> bound = c.t_max ? std::nullopt : certified_bound(c, out);
    SimParams p = c.sim_params(default_horizon(c, bound, out));
    int n = o.n.value_or(1);
    if (n < 1)
        throw UsageError("--n must be >= 1");
    Simulator sim(c.model());
    auto dir = output_dir(o);
    bool diverged = false;
    for (int i = 0; i < n; ++i) {
        Path path = sim.simulate(c.x0, p, c.seed, static_cast<std::uint64_t>(i));
        auto file = dir / ("paths_" + std::to_string(i) + ".csv");
        std::ofstream f(file);
        write_path_csv(f, path);
        diverged = diverged || path.diverged;
        out << "path " << i << ": ";
        if (path.absorbed)
            out << "absorbed at t = " << fmt(*path.hitting_time);
        else
            out << (path.diverged ? "diverged" : "not absorbed by t_max");
        out << " -> " << file.string() << "\n";
    }
    return diverged ? 1 : 0;
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err)
{
    RunConfig c = resolve(o, err);
    std::optional<double> bound = certified_bound(c, out);
    SimParams p = c.sim_params(default_horizon(c, bound, out));
    const auto n = static_cast<std::size_t>(c.n_paths);
    auto dir = output_dir(o);
    std::ofstream stats(dir / "stats.jsonl");
    bool pass = true;

    SettlingStats s = estimate_settling(c.model(), c.x0, p, n, c.seed, bound, o.workers);
    write_stats_jsonl(stats, c.name, s);
    std::ofstream hits(dir / "hitting_times.csv");
    write_hitting_times_csv(hits, s);
    out << "  settling: censored mean " << fmt(s.censored_mean) << " +- " << fmt(s.se) << " (t_max " << fmt(s.t_max)
        << ", " << s.n_absorbed << "/" << s.n_paths << " absorbed, " << s.n_diverged << " diverged)";
    if (s.bound_verdict)
        out << ", bound " << fmt(*s.bound) << ": " << (*s.bound_verdict ? "pass" : "FAIL");
    out << "\n";
    pass = pass && s.valid && s.bound_verdict.value_or(true);

    if (bound && p.t_max >= 10.0 * *bound) {
        MarkovCheck m = markov_absorption_check(s);
        write_stats_jsonl(stats, c.name, m);
        out << "  absorbed fraction " << fmt(m.absorbed_fraction) << " vs threshold " << fmt(m.threshold) << ": "
            << (m.pass ? "pass" : "FAIL") << "\n";
        pass = pass && m.pass;
    }
    if (o.lambda) {
        ProbEstimate e = estimate_exceedance(c.model(), c.v_expr(), c.x0, *o.lambda, p, n, c.seed, o.workers);
        write_stats_jsonl(stats, c.name, e);
        out << "  P(sup V >= " << fmt(*o.lambda) << ") = " << fmt(e.estimate) << " [" << fmt(e.wilson_lo) << ", "
            << fmt(e.wilson_hi) << "], bound " << fmt(e.bound) << ": " << (e.verdict ? "pass" : "FAIL") << "\n";
        pass = pass && e.verdict;
    }
    if (!o.checkpoints.empty()) {
        Expr w = c.u ? *c.u_expr() : c.v_expr();
        SupermartingaleReport r =
            empirical_supermartingale(c.model(), w, c.x0, o.checkpoints, p, n, c.seed, o.workers);
        write_stats_jsonl(stats, c.name, r);
        out << "  mean " << (c.u ? "U" : "V") << " at checkpoints:";
        for (double m : r.mean)
            out << " " << fmt(m);
        out << ": " << (r.verdict ? "pass" : "FAIL") << "\n";
        pass = pass && r.verdict;
    }
    out << "wrote " << (dir / "stats.jsonl").string() << " and " << (dir / "hitting_times.csv").string() << "\n";
    return pass ? 0 : 1;
}

int cmd_examples(std::ostream& out)
{
    for (const auto& p : example_registry()) {
        out << p.name << "  [" << to_string(p.route) << "]  " << p.summary << "\n";
        out << "    drift:";
        for (const auto& d : p.config.drift)
            out << " " << d << ";";
        out << "  V = " << p.config.v;
        if (p.config.u)
            out << ", U = " << *p.config.u;
        out << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Finite-time stability certificates and settling-time estimates for SDEs"};
    app.require_subcommand(1);
    Options o;
    auto* certify_cmd = app.add_subcommand("certify", "check the certificate conditions and write report.json");
    auto* simulate_cmd = app.add_subcommand("simulate", "write sample paths as paths_<i>.csv");
    auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo settling statistics into stats.jsonl");
    app.add_subcommand("examples", "list the built-in presets");
    for (auto* cmd : {certify_cmd, simulate_cmd, estimate_cmd})
        add_shared(cmd, o);
    estimate_cmd->add_option("--lambda", o.lambda, "also estimate P(sup V >= lambda)");
    estimate_cmd->add_option("--checkpoints", o.checkpoints, "also check mean V (U when given) at these times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*certify_cmd)
            return cmd_certify(o, out, err);
        if (*simulate_cmd)
            return cmd_simulate(o, out, err);
        if (*estimate_cmd)
            return cmd_estimate(o, out, err);
        return cmd_examples(out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
    }
    return 2;
}

} // namespace stochcert
