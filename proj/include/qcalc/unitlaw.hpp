#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qcalc/distributions.hpp"
#include "qcalc/test_function.hpp"

namespace qcalc::unitlaw {

/// An absolutely continuous law on (0, 1) given by its density.
///
/// The cumulative table is built eagerly at construction, so a UnitVariable
/// is immutable and safe to share across threads.
class UnitVariable {
public:
    UnitVariable(std::string provenance, RealFn density);

    double density(double u) const;
    /// int_0^p density, exact up to quadrature tolerance.
    double cdf(double p) const;
    /// Inverse of cdf (via the cached table and Newton refinement).
    double quantile(double p) const;
    /// Inverse of the cached Hermite table alone, without refinement; this is
    /// what sampling uses.
    double approximate_quantile(double p) const;
    /// int_0^1 density.
    double normalization() const;
    const std::string& provenance() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Number of Chebyshev-Lobatto cells in the cumulative table.
inline constexpr int kCdfCells = 2048;
/// Default size of the grid used to verify X <=st Y before forming Psi^L.
inline constexpr int kStGrid = 1024;

/// L(p) = E[X]^{-1} int_0^p Q(u) du.
double lorenz_curve(const QuantileModel& x, double p);

/// X^L, density Q(u) / E[X].
UnitVariable lift_XL(const QuantileModel& x);

/// Throws NotStochasticallyOrdered (largest Q_X - Q_Y excess as witness)
/// unless Q_X(u) <= Q_Y(u) + 1e-9 on `grid` Chebyshev points of (0, 1).
void require_st_on_grid(const QuantileModel& x, const QuantileModel& y, int grid = kStGrid);

/// Psi^L(X, Y), density (Q_Y - Q_X) / (E[Y] - E[X]). The st precondition is
/// checked on a grid, not proven; the provenance string says so.
UnitVariable psi_L(const QuantileModel& x, const QuantileModel& y, int grid = kStGrid);

/// L_{X,Y}(p) = int_0^p (Q_Y - Q_X) du / (E[Y] - E[X]).
double generalized_lorenz(const QuantileModel& x, const QuantileModel& y, double p);

struct MixtureCoefficient {
    /// c = E[Y] / (E[Y] - E[X]).
    double c = 0.0;
    /// Largest |f_Z - c f_{Y^L} - (1 - c) f_{X^L}| over the check grid.
    double max_deviation = 0.0;
};

/// Coefficient of f_{Z^L} = c f_{Y^L} + (1 - c) f_{X^L}, checked on 64 interior points.
MixtureCoefficient mixture_decomposition(const QuantileModel& x, const QuantileModel& y);

/// E[(X^L)^k] = E[U^k Q(U)] / E[Q(U)], k >= 0.
double unit_moment(const QuantileModel& x, int k);

/// E[h(X^L)] = E[X]^{-1} int_0^1 h(u) Q(u) du.
double expectation_h(const QuantileModel& x, const TestFunction& h);

struct GoldenReport {
    double alpha = 0.0;                ///< root found numerically
    double sup_distance = 0.0;         ///< sup_p |L(p) - p^alpha| on a 1001-point grid
    double analytic = 0.0;             ///< (1 + sqrt 5) / 2, from (alpha + 1) / alpha = alpha
    double reciprocal = 0.0;           ///< (-1 + sqrt 5) / 2, the sign-flipped candidate
    double reciprocal_distance = 0.0;  ///< sup distance at the reciprocal
    bool matches_reciprocal = false;
};

/// The alpha for which PowerUnit(alpha) satisfies X =d X^L, found by root
/// finding on L(1/2) - 2^{-alpha} with L computed by quadrature.
GoldenReport golden_fixed_point();

/// Inverse-transform sample; deterministic for a given seed. n = 0 gives an
/// empty vector.
std::vector<double> sample(const UnitVariable& v, std::size_t n, std::uint64_t seed);

/// Uniform (0, 1) variate from a 64-bit engine output, never 0 or 1.
inline double unit_from_bits(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace qcalc::unitlaw
