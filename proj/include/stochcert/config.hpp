#pragma once

// Run configuration in a TOML subset: [section] headers, key = value lines,
// "strings", numbers, and (nested) arrays. Expression strings use the
// expression grammar and are parsed eagerly on load.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochcert/certify.hpp"
#include "stochcert/sim.hpp"

namespace stochcert {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string name = "model";

    // [model]
    int dim = 1;
    int brownian_dim = 1;
    std::vector<std::string> drift;
    std::vector<std::vector<std::string>> diffusion;

    // [lyapunov]
    std::string v;
    std::optional<std::string> u;

    // [certificate]
    std::string k_family = "power"; // power | powersum
    Number gamma = Number(Rational(1, 2));
    std::optional<Number> alpha;
    std::optional<double> c;
    SampleDomain domain;

    // [simulation]
    std::vector<double> x0;
    double dt = 1e-4;
    std::optional<double> t_max;
    double absorb_eps = 1e-5;
    int output_stride = 100;
    int n_paths = 1000;
    std::uint64_t seed = 20240601;

    SdeModel model() const;
    Expr v_expr() const;
    std::optional<Expr> u_expr() const;
    KFunction k() const;
    CertifyRequest certify_request() const;
    /// t_max falls back to the supplied default when unset.
    SimParams sim_params(double default_t_max) const;

    /// Parses every expression and checks the model; throws ConfigError.
    void validate() const;
};

/// Reads and validates a config file; errors name the file and line.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
std::string dump_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

} // namespace stochcert
