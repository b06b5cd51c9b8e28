#pragma once

#include <functional>

namespace qcalc::numerics {

using RealFn = std::function<double(double)>;

/// Controls for adaptive quadrature.
///
/// `endpoint_shrink` is the width of the open-interval clipping applied in
/// the mapped variable: nodes closer than this to either end of the mapped
/// interval are skipped, as are nodes that round onto an endpoint, so
/// integrands singular at 0 or 1 are never evaluated on the boundary.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;
    double endpoint_shrink = 1e-12;

    /// Throws InvalidParameter when a field is out of range.
    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions_used = 0;
    bool converged = false;
};

/// Tight tolerances for partial integrals whose magnitude may be tiny
/// (tail masses, cumulative tables).
QuadratureSpec fine_quadrature();

/// Adaptive Gauss-Kronrod (10/21) quadrature of f over (a, b).
///
/// Finite endpoints are handled through a polynomial change of variables
/// whose derivative vanishes to second order at both ends; this turns the
/// integrable algebraic and logarithmic endpoint singularities of quantile
/// densities into bounded integrands. `b` may be +infinity, in which case
/// x = a + s / (1 - s) is applied first.
///
/// Returns converged = false when max_subdivisions is exhausted; throws
/// NonFiniteEvaluation if f yields NaN or infinity at an abscissa, and
/// DomainError unless a < b.
IntegralResult integrate(const RealFn& f, double a, double b,
                         const QuadratureSpec& spec = {});

/// Convenience wrapper returning only the value; throws NonConvergence when
/// the adaptive scheme does not converge.
double integrate_value(const RealFn& f, double a, double b,
                       const QuadratureSpec& spec = {});

/// Brent's method on a sign-changing bracket. Returns x with bracket width
/// at most `tol`. Throws InvalidBracket if f(lo) and f(hi) share a sign.
double find_root(const RealFn& f, double lo, double hi, double tol = 1e-12);

/// Complementary error function.
double erfc(double x);

/// Upper incomplete gamma function Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt
/// for any real a and x > 0. Throws DomainError if x <= 0.
double upper_incomplete_gamma(double a, double x);

/// Exponential integral E1(x) = Gamma(0, x), x > 0.
double expint_e1(double x);

/// Logarithmic integral li(x) = int_0^x dt / ln t on (0, 1).
double log_integral(double x);

}  // namespace qcalc::numerics
