#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochcert/certify.hpp"

namespace stochcert {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kTrendTolerance = 1e-10;

double norm(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return std::sqrt(s);
}

struct Sweep {
    double min = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    std::size_t samples = 0;
    std::size_t skipped = 0;
    std::vector<double> level_min;
};

// Evaluates margin at every sample in order. The argmin is the first sample
// within kTieTolerance of the minimum, so near-constant margins pick a stable point.
template <class Margin>
Sweep sweep(const std::vector<SamplePoint>& points, int n_levels, Margin&& margin)
{
    Sweep out;
    out.level_min.assign(n_levels, std::numeric_limits<double>::infinity());
    std::vector<double> values(points.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            values[i] = margin(points[i].x);
        } catch (const EvalError&) {
            ++out.skipped;
            continue;
        }
        ++out.samples;
        out.min = std::min(out.min, values[i]);
        if (points[i].level >= 0)
            out.level_min[points[i].level] = std::min(out.level_min[points[i].level], values[i]);
    }
    double cutoff = out.min + kTieTolerance * (1.0 + std::fabs(out.min));
    for (std::size_t i = 0; i < points.size(); ++i)
        if (values[i] <= cutoff) {
            out.argmin = points[i].x;
            break;
        }
    return out;
}

BoundaryTrend trend_of(const std::vector<double>& level_min, const SampleDomain& domain)
{
    const int n = static_cast<int>(level_min.size());
    if (n < 2)
        return BoundaryTrend::None;
    const double step = std::log(domain.r_max / domain.r_min) / (n - 1);
    int decade = std::clamp(static_cast<int>(std::floor(std::log(10.0) / step)), 1, n - 1);
    auto lower = [&](double edge, double inner) {
        return std::isfinite(edge) && std::isfinite(inner) && edge < inner - kTrendTolerance * (1.0 + std::fabs(edge));
    };
    if (lower(level_min[0], level_min[decade]))
        return BoundaryTrend::TowardRMin;
    if (lower(level_min[n - 1], level_min[n - 1 - decade]))
        return BoundaryTrend::TowardRMax;
    return BoundaryTrend::None;
}

// Compiled V, LV and |dV/dx g|^2 for pointwise margins.
struct ConditionExprs {
    CanonicalForm lv;
    CanonicalForm q;
    CompiledExpr v;
    CompiledExpr lv_eval;
    CompiledExpr q_eval;

    ConditionExprs(const SdeModel& model, const LyapunovCandidate& cand)
        : lv(generator(model, cand)), q(diffusion_quadratic(model, cand)), v(cand.value()), lv_eval(lv.expr),
          q_eval(q.expr)
    {
    }

    double positive_v(std::span<const double> x) const
    {
        double value = v(x);
        if (!(value > 0.0))
            throw std::logic_error("V is not positive at a sample point away from the origin");
        return value;
    }
};

// [K'(V)/2 Q - K(V) LV] / K(V)^2, the largest admissible c at x.
double pointwise_c(const ConditionExprs& ex, const KFunction& k, std::span<const double> x)
{
    double v = ex.positive_v(x);
    double kv = k.value(v);
    if (!(kv > 0.0))
        throw std::logic_error("K(V(x)) = 0 at a sample point");
    return (0.5 * k.derivative(v) * ex.q_eval(x) - kv * ex.lv_eval(x)) / (kv * kv);
}

MarginReport make_report(std::string condition, const Sweep& s, double tol, const SampleDomain& domain)
{
    MarginReport r;
    r.condition = std::move(condition);
    r.samples = s.samples;
    r.skipped = s.skipped;
    r.min_margin = s.min;
    r.argmin = s.argmin;
    r.tolerance = tol;
    r.pass = s.skipped == 0 && s.samples > 0 && s.min >= -tol;
    r.trend = trend_of(s.level_min, domain);
    return r;
}

// Golden-section minimization of f on [lo, hi]; returns the best of the
// interior estimate and both endpoints.
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, int iterations = 60)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    std::pair<double, double> best{c, fc};
    if (fd < best.second)
        best = {d, fd};
    for (double edge : {lo, hi}) {
        double fe = f(edge);
        if (fe < best.second)
            best = {edge, fe};
    }
    return best;
}

} // namespace

MarginReport check_nonpositive_generator(const SdeModel& model, const LyapunovCandidate& w, const SampleDomain& domain,
                                         double tol)
{
    CanonicalForm lw = generator(model, w);
    if (lw.canonical && lw.expr.is_zero()) {
        MarginReport r;
        r.condition = "generator_nonpositive";
        r.pass = true;
        r.exact_zero = true;
        r.tolerance = tol;
        r.min_margin = 0.0;
        return r;
    }
    const double degree = lw.polynomial ? lw.polynomial->max_degree() : 0.0;
    CompiledExpr lw_eval(lw.expr);
    auto points = sample_points(domain, model.dim);
    bool within = true;
    Sweep s = sweep(points, domain.n_levels, [&](std::span<const double> x) {
        double value = lw_eval(x);
        if (value > tol * (1.0 + std::pow(norm(x), degree)))
            within = false;
        return -value / (1.0 + std::fabs(value));
    });
    MarginReport r = make_report("generator_nonpositive", s, tol, domain);
    r.pass = within && s.skipped == 0 && s.samples > 0;
    return r;
}

MarginReport check_condition_thm1(const SdeModel& model, const LyapunovCandidate& v, const KFunction& k, double c,
                                  const SampleDomain& domain, double tol)
{
    if (!(c > 0.0))
        throw std::invalid_argument("c must be positive");
    ConditionExprs ex(model, v);
    auto points = sample_points(domain, model.dim);
    Sweep s = sweep(points, domain.n_levels, [&](std::span<const double> x) { return pointwise_c(ex, k, x) - c; });
    return make_report("gauge_condition", s, tol, domain);
}

MarginReport check_classical(const SdeModel& model, const LyapunovCandidate& v, double c, double gamma,
                             const SampleDomain& domain, double tol)
{
    if (!(c > 0.0) || !(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("classical condition needs c > 0 and 0 < gamma < 1");
    ConditionExprs ex(model, v);
    auto points = sample_points(domain, model.dim);
    Sweep s = sweep(points, domain.n_levels, [&](std::span<const double> x) {
        double value = ex.positive_v(x);
        return -ex.lv_eval(x) / std::pow(value, gamma) - c;
    });
    return make_report("classical_condition", s, tol, domain);
}

MarginReport check_power_gauge(const SdeModel& model, const LyapunovCandidate& v, double gamma, double c,
                               const SampleDomain& domain, double tol)
{
    if (!(c > 0.0) || !(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("power gauge condition needs c > 0 and 0 < gamma < 1");
    ConditionExprs ex(model, v);
    auto points = sample_points(domain, model.dim);
    Sweep s = sweep(points, domain.n_levels, [&](std::span<const double> x) {
        double value = ex.positive_v(x);
        double difference = 0.5 * gamma * ex.q_eval(x) - value * (c * std::pow(value, gamma) + ex.lv_eval(x));
        return difference / std::pow(value, 1.0 + gamma);
    });
    return make_report("power_gauge_condition", s, tol, domain);
}

FeasibleC max_feasible_c(const SdeModel& model, const LyapunovCandidate& v, const KFunction& k,
                         const SampleDomain& domain)
{
    ConditionExprs ex(model, v);
    auto points = sample_points(domain, model.dim);
    auto at = [&](std::span<const double> x) { return pointwise_c(ex, k, x); };
    Sweep s = sweep(points, domain.n_levels, at);

    FeasibleC out;
    out.samples = s.samples;
    out.skipped = s.skipped;
    out.trend = trend_of(s.level_min, domain);
    if (s.argmin.empty()) {
        out.message = "no evaluable samples";
        return out;
    }
    out.c_max = s.min;
    out.argmin = s.argmin;

    // Refinement: radius, then direction, around the sampled argmin.
    auto safe = [&](const std::vector<double>& x) {
        try {
            return at(x);
        } catch (const EvalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const int n = model.dim;
    std::vector<double> best = s.argmin;
    double best_value = s.min;
    double radius = norm(best);
    std::vector<double> dir = best;
    for (auto& x : dir)
        x /= radius;
    const double ratio = domain.n_levels > 1 ? std::pow(domain.r_max / domain.r_min, 1.0 / (domain.n_levels - 1)) : 2.0;
    auto scaled = [&](double r, const std::vector<double>& d) {
        std::vector<double> x = d;
        for (auto& c : x)
            c *= r;
        return x;
    };
    {
        double lo = std::log(std::max(domain.r_min, radius / ratio));
        double hi = std::log(std::min(domain.r_max, radius * ratio));
        auto [arg, value] = golden_min([&](double lr) { return safe(scaled(std::exp(lr), dir)); }, lo, hi);
        if (value < best_value) {
            best_value = value;
            radius = std::exp(arg);
            best = scaled(radius, dir);
        }
    }
    if (n >= 2) {
        const double span = n == 2 ? 2.0 * std::numbers::pi / std::max(domain.n_dirs, 1) : 0.2;
        for (int axis = 0; axis < n; ++axis) {
            // Unit vector orthogonal to dir in the plane of dir and e_axis.
            std::vector<double> w(n, 0.0);
            w[axis] = 1.0;
            double dot = dir[axis];
            for (int i = 0; i < n; ++i)
                w[i] -= dot * dir[i];
            double wn = norm(w);
            if (wn < 1e-8)
                continue;
            for (auto& c : w)
                c /= wn;
            auto rotated = [&](double phi) {
                std::vector<double> d(n);
                for (int i = 0; i < n; ++i)
                    d[i] = std::cos(phi) * dir[i] + std::sin(phi) * w[i];
                return d;
            };
            auto [arg, value] = golden_min([&](double phi) { return safe(scaled(radius, rotated(phi))); }, -span, span);
            if (value < best_value) {
                best_value = value;
                dir = rotated(arg);
                best = scaled(radius, dir);
            }
        }
    }
    out.c_max = best_value;
    out.argmin = best;
    out.feasible = out.c_max > 0.0;
    if (!out.feasible)
        out.message = "condition infeasible for any c>0";
    return out;
}

} // namespace stochcert
