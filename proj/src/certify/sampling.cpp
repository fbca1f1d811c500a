#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "stochcert/certify.hpp"

namespace stochcert {

void SampleDomain::validate() const
{
    if (!(r_min > 0.0 && r_min < r_max))
        throw std::invalid_argument("sample domain needs 0 < r_min < r_max");
    if (n_levels < 1 || n_dirs < 1 || n_random < 0)
        throw std::invalid_argument("sample domain counts must be >= 1");
}

namespace {

std::vector<double> unit_gaussian(int dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    std::vector<double> d(dim);
    double norm = 0.0;
    while (norm < 1e-12) {
        norm = 0.0;
        for (auto& v : d) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    }
    for (auto& v : d)
        v /= norm;
    return d;
}

std::vector<std::vector<double>> directions(const SampleDomain& domain, int dim, std::mt19937_64& rng)
{
    std::vector<std::vector<double>> dirs;
    if (dim == 1) {
        dirs = {{1.0}, {-1.0}};
    } else if (dim == 2) {
        for (int j = 0; j < domain.n_dirs; ++j) {
            double theta = 2.0 * std::numbers::pi * j / domain.n_dirs;
            dirs.push_back({std::cos(theta), std::sin(theta)});
        }
    } else {
        // Axes and the main diagonals first, random directions fill the rest.
        for (int i = 0; i < dim && static_cast<int>(dirs.size()) < domain.n_dirs; ++i)
            for (double s : {1.0, -1.0}) {
                std::vector<double> e(dim, 0.0);
                e[i] = s;
                dirs.push_back(e);
            }
        dirs.push_back(std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
        dirs.push_back(std::vector<double>(dim, -1.0 / std::sqrt(static_cast<double>(dim))));
        while (static_cast<int>(dirs.size()) < domain.n_dirs)
            dirs.push_back(unit_gaussian(dim, rng));
    }
    return dirs;
}

} // namespace

std::vector<SamplePoint> sample_points(const SampleDomain& domain, int dim)
{
    domain.validate();
    std::mt19937_64 rng(domain.seed);
    auto dirs = directions(domain, dim, rng);
    std::vector<SamplePoint> out;
    out.reserve(domain.n_levels * dirs.size() + domain.n_random);
    const double log_lo = std::log(domain.r_min);
    const double log_hi = std::log(domain.r_max);
    for (int level = 0; level < domain.n_levels; ++level) {
        double r = domain.n_levels == 1 ? domain.r_min
                                        : std::exp(log_lo + (log_hi - log_lo) * level / (domain.n_levels - 1));
        if (level == 0)
            r = domain.r_min;
        else if (level == domain.n_levels - 1)
            r = domain.r_max;
        for (const auto& d : dirs) {
            SamplePoint p{d, level};
            for (auto& v : p.x)
                v *= r;
            out.push_back(std::move(p));
        }
    }
    std::uniform_real_distribution<double> log_radius(log_lo, log_hi);
    for (int k = 0; k < domain.n_random; ++k) {
        SamplePoint p{unit_gaussian(dim, rng), -1};
        double r = std::exp(log_radius(rng));
        for (auto& v : p.x)
            v *= r;
        out.push_back(std::move(p));
    }
    return out;
}

const char* to_string(BoundaryTrend t)
{
    switch (t) {
    case BoundaryTrend::None:
        return "none";
    case BoundaryTrend::TowardRMin:
        return "toward_r_min";
    case BoundaryTrend::TowardRMax:
        return "toward_r_max";
    }
    return "none";
}

} // namespace stochcert
