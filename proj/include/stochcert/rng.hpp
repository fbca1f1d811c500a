#pragma once

// Counter-based Gaussian increments. Every draw is a pure function of
// (master_seed, path_index, step, component), so paths can be computed in
// any order or on any worker and still produce identical streams.

#include <array>
#include <cstdint>
#include <span>

namespace stochcert {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal draw for one (seed, path, step, component) coordinate.
double standard_normal(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t step, int component);

class BrownianStream {
public:
    BrownianStream(std::uint64_t master_seed, std::uint64_t path_index, int components, double dt);

    /// Increments dB for step k: N(0, dt) per component.
    void fill(std::uint64_t step, std::span<double> out) const;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_index_;
    int components_;
    double sqrt_dt_;
};

} // namespace stochcert
