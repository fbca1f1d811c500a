#pragma once

#include <cmath>

namespace stochcert::detail {

inline double sign(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

// b^r for b >= 0 with 0^r = 0 (r > 0) and b^0 = 1.
inline double abs_power(double b, double r)
{
    if (r == 1.0)
        return b;
    if (r == 2.0)
        return b * b;
    if (r == 0.0)
        return 1.0;
    if (b == 0.0)
        return r > 0.0 ? 0.0 : HUGE_VAL;
    if (r == 0.5)
        return std::sqrt(b);
    if (r == 1.0 / 3.0)
        return std::cbrt(b);
    if (r == 2.0 / 3.0) {
        double c = std::cbrt(b);
        return c * c;
    }
    return std::pow(b, r);
}

} // namespace stochcert::detail
