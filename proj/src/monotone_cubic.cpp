#include "monotone_cubic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qcalc/errors.hpp"

namespace qcalc::detail {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             std::span<const double> slopes)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidParameter("monotone cubic needs >= 2 matching knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw InvalidParameter("knots must be strictly increasing");
        if (y_[i] < y_[i - 1]) throw InvalidParameter("values must be nondecreasing");
    }
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }
    m_.assign(n, 0.0);
    if (!slopes.empty()) {
        if (slopes.size() != n) throw InvalidParameter("slope count must match knots");
        for (std::size_t i = 0; i < n; ++i) {
            const double fallback = i == 0 ? secant[0] : (i == n - 1 ? secant[n - 2] : 0.5 * (secant[i - 1] + secant[i]));
            m_[i] = std::isfinite(slopes[i]) && slopes[i] >= 0.0 ? slopes[i] : fallback;
        }
    } else {
        m_[0] = secant[0];
        m_[n - 1] = secant[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (secant[i - 1] * secant[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                // Weighted harmonic mean (Fritsch-Butland).
                const double h0 = x_[i] - x_[i - 1];
                const double h1 = x_[i + 1] - x_[i];
                const double w1 = 2.0 * h1 + h0;
                const double w2 = h1 + 2.0 * h0;
                m_[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
            }
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (secant[i] == 0.0) {
            m_[i] = 0.0;
            m_[i + 1] = 0.0;
            continue;
        }
        const double a = m_[i] / secant[i];
        const double b = m_[i + 1] / secant[i];
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double t = 3.0 / std::sqrt(r);
            m_[i] = t * a * secant[i];
            m_[i + 1] = t * b * secant[i];
        }
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (3 * t2 - 4 * t + 1) * h * m_[i] +
            (-6 * t2 + 6 * t) * y_[i + 1] + (3 * t2 - 2 * t) * h * m_[i + 1]) /
           h;
}

double MonotoneCubic::inverse(double y) const {
    if (y <= y_.front()) return x_.front();
    if (y > y_.back()) return x_.back();
    // First knot whose value reaches y.
    auto it = std::lower_bound(y_.begin(), y_.end(), y);
    const std::size_t hi = static_cast<std::size_t>(it - y_.begin());
    if (hi == 0) return x_.front();
    const std::size_t i = hi - 1;
    double lo_x = x_[i];
    double hi_x = x_[i + 1];
    // Safeguarded Newton on the (monotone) segment.
    double x = lo_x + (hi_x - lo_x) * (y - y_[i]) / (y_[i + 1] - y_[i]);
    for (int iter = 0; iter < 100; ++iter) {
        const double fx = (*this)(x) - y;
        if (fx > 0.0) hi_x = x; else lo_x = x;
        if (hi_x - lo_x <= 1e-15 * std::max(1.0, std::abs(x)) || fx == 0.0) break;
        const double d = derivative(x);
        double next = d > 0.0 ? x - fx / d : 0.5 * (lo_x + hi_x);
        if (!(next > lo_x && next < hi_x)) next = 0.5 * (lo_x + hi_x);
        const bool settled = std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x));
        x = next;
        if (settled) break;
    }
    return x;
}

}  // namespace qcalc::detail
