#pragma once

#include <span>
#include <vector>

namespace qcalc::detail {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson limited).
/// Values outside the knot range are clamped to the end values.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    /// Knots must be strictly increasing and values nondecreasing. When
    /// `slopes` is empty, three-point slopes are used; otherwise the supplied
    /// slopes (non-finite entries replaced by secants) are limited to keep
    /// every segment monotone.
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::span<const double> slopes = {});

    double operator()(double x) const;
    double derivative(double x) const;
    /// Smallest x with value(x) >= y, for y within the value range.
    double inverse(double y) const;

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace qcalc::detail
