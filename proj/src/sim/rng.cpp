#include "stochcert/rng.hpp"

#include <cmath>
#include <numbers>

namespace stochcert {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Uniform in (0, 1]; never 0 so the logarithm below stays finite.
inline double open_unit(std::uint32_t hi, std::uint32_t lo)
{
    std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Two independent standard normals from one Philox block (Box-Muller).
std::array<double, 2> normal_pair(std::array<std::uint32_t, 2> key, std::uint64_t path, std::uint64_t step,
                                  std::uint32_t block)
{
    std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                        (static_cast<std::uint32_t>(step >> 32) << 16) | (block & 0xFFFFu),
                                        static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    auto r = philox4x32(ctr, key);
    double u1 = open_unit(r[0], r[1]);
    double u2 = open_unit(r[2], r[3]);
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::array<std::uint32_t, 2> split_key(std::uint64_t seed)
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

double standard_normal(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t step, int component)
{
    auto pair = normal_pair(split_key(master_seed), path_index, step, static_cast<std::uint32_t>(component / 2));
    return pair[component % 2];
}

BrownianStream::BrownianStream(std::uint64_t master_seed, std::uint64_t path_index, int components, double dt)
    : key_(split_key(master_seed)), path_index_(path_index), components_(components), sqrt_dt_(std::sqrt(dt))
{
}

void BrownianStream::fill(std::uint64_t step, std::span<double> out) const
{
    for (int j = 0; j < components_; j += 2) {
        auto pair = normal_pair(key_, path_index_, step, static_cast<std::uint32_t>(j / 2));
        out[j] = pair[0] * sqrt_dt_;
        if (j + 1 < components_)
            out[j + 1] = pair[1] * sqrt_dt_;
    }
}

} // namespace stochcert
