#pragma once

// Reference integrators for tests. They share no code with the library's
// Gauss-Kronrod scheme, so agreement between the two is meaningful.

#include <cmath>
#include <functional>

namespace oracle {

/// Double-exponential (tanh-sinh) rule on (a, b), finite a < b. Nodes that
/// round onto an endpoint are dropped.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                        int levels = 8) {
    const double pi_2 = 1.5707963267948966;
    const double c = 0.5 * (a + b);
    const double d = 0.5 * (b - a);
    const double h = std::ldexp(1.0, -levels);
    double sum = 0.0;
    for (int k = -static_cast<int>(6.5 / h); k <= static_cast<int>(6.5 / h); ++k) {
        const double t = k * h;
        const double s = pi_2 * std::sinh(t);
        const double ch = std::cosh(s);
        const double w = d * pi_2 * std::cosh(t) / (ch * ch);
        // Distance from the nearer endpoint, computed without cancellation.
        const double gap = d * 2.0 / (std::exp(2.0 * std::abs(s)) + 1.0);
        const double x = s < 0.0 ? a + gap : b - gap;
        if (!(x > a && x < b)) continue;
        if (w == 0.0) continue;
        sum += w * f(x);
    }
    return sum * h;
}

/// Composite midpoint rule with n cells.
inline double midpoint(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += f(a + (static_cast<double>(i) + 0.5) * h);
    return sum * h;
}

}  // namespace oracle
