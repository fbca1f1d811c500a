#include "stochcert/certify.hpp"

namespace stochcert {

const char* to_string(Route r)
{
    switch (r) {
    case Route::Theorem1:
        return "theorem1";
    case Route::Theorem2:
        return "theorem2";
    case Route::Theorem3:
        return "theorem3";
    }
    return "theorem1";
}

const char* to_string(CertStatus s)
{
    switch (s) {
    case CertStatus::Certified:
        return "certified";
    case CertStatus::NotCertified:
        return "not_certified";
    case CertStatus::Aborted:
        return "aborted";
    }
    return "aborted";
}

CertificateVerdict certify(const CertifyRequest& req)
{
    CertificateVerdict out;
    out.route = req.u ? Route::Theorem3 : Route::Theorem1;
    const int n = req.model.dim;

    for (const auto& issue : validate_model(req.model))
        out.diagnostics.push_back("model: " + issue);
    if (!out.diagnostics.empty()) {
        out.status = CertStatus::Aborted;
        return out;
    }

    LyapunovCandidate v(req.v, n);
    // V must be radially unbounded on the Theorem 1 route; on the two-function
    // route that requirement moves to U.
    out.v_check = spot_check_candidate(v, !req.u, req.domain.seed);
    for (const auto& f : out.v_check.failures)
        out.diagnostics.push_back("V: " + f);
    std::optional<LyapunovCandidate> u;
    if (req.u) {
        u.emplace(*req.u, n);
        out.u_check = spot_check_candidate(*u, true, req.domain.seed + 1);
        for (const auto& f : out.u_check->failures)
            out.diagnostics.push_back("U: " + f);
    }
    if (!out.diagnostics.empty()) {
        out.status = CertStatus::Aborted;
        return out;
    }

    out.generator_v = to_string(generator(req.model, v).expr);
    if (u)
        out.generator_u = to_string(generator(req.model, *u).expr);

    if (req.c) {
        out.c_used = *req.c;
    } else {
        out.feasible = max_feasible_c(req.model, v, req.k, req.domain);
        out.c_used = out.feasible->feasible ? kAutoCFactor * out.feasible->c_max : 0.0;
        if (!out.feasible->feasible)
            out.diagnostics.push_back(out.feasible->message);
    }

    MarginReport nonpositive = check_nonpositive_generator(req.model, u ? *u : v, req.domain, req.tol);
    nonpositive.condition = u ? "LU <= 0" : "LV <= 0";
    out.reports.push_back(nonpositive);
    if (out.c_used > 0.0) {
        MarginReport gauge = check_condition_thm1(req.model, v, req.k, out.c_used, req.domain, req.tol);
        gauge.condition = "K(V)[cK(V) + LV] <= K'(V)/2 |dV/dx g|^2";
        out.reports.push_back(gauge);
    }

    bool all_pass = out.c_used > 0.0;
    for (const auto& r : out.reports)
        all_pass = all_pass && r.pass;

    if (req.k.is_power() && out.c_used > 0.0) {
        out.classical = check_classical(req.model, v, out.c_used, req.k.gamma(), req.domain, req.tol);
        out.classical->condition = "LV <= -c V^gamma";
    }
    if (all_pass) {
        out.status = CertStatus::Certified;
    } else if (!u && out.classical && out.classical->pass) {
        out.route = Route::Theorem2;
        out.status = CertStatus::Certified;
    } else {
        out.status = CertStatus::NotCertified;
    }

    if (req.x0) {
        if (static_cast<int>(req.x0->size()) != n)
            throw std::invalid_argument("x0 has the wrong dimension");
        out.v0 = evaluate(req.v, *req.x0);
        if (out.c_used > 0.0)
            out.settling_bound = settling_bound(req.k, out.c_used, *out.v0);
    }
    return out;
}

} // namespace stochcert
