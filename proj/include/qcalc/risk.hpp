#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcalc/distributions.hpp"
#include "qcalc/orders.hpp"

namespace qcalc::risk {

/// VaR[X; p] = Q(p), 0 < p < 1.
double var(const QuantileModel& x, double p);

/// CVaR[X; p] = (1 - p)^{-1} int_p^1 [Q(t) - Q(p)] dt, the mean excess over
/// the p-quantile (not the tail mean). CVaR[X; 0] = E[X]. Needs class D.
double cvar(const QuantileModel& x, double p);

/// (1 - p) CVaR[X; p] = int_{Q(p)}^inf Fbar(y) dy.
double right_spread(const QuantileModel& x, double p);

/// AVaR[X; v] = v^{-1} int_0^v Q(u) du, 0 < v < 1.
double avar(const QuantileModel& x, double v);

/// Closed-form CVaR for Exponential, Uniform, GeoMaxExp and Rayleigh.
std::optional<double> cvar_closed_form(const QuantileModel& x, double p);

/// Closed-form AVaR for Uniform, PowerUnit, PowerScale and FrechetType,
/// the latter v^{-1} c^{1/gamma} Gamma(1 - 1/gamma, -ln v).
std::optional<double> avar_closed_form(const QuantileModel& x, double v);

enum class DerivedKind { ResidualAtQuantile, ProportionalResidual, StarModel, HatModel };

struct Derivation {
    DerivedKind kind;
    double parameter;  ///< p for the residual kinds, v for star and hat
};

/// "residual:p", "propresidual:p", "star:v" or "hat:v".
Derivation parse_derivation(const std::string& text);
std::string to_string(DerivedKind kind);

/// Materializes a derived law as a QuantileModel over the parent:
///
///   ResidualAtQuantile(p)    Q(p + u(1-p)) - Q(p), mean CVaR[X; p]
///   ProportionalResidual(p)  the residual divided by Q(p), mean CVaR / Q(p)
///   StarModel(v)             F(Q(v) u) / v on (0, 1), mean 1 - AVaR / Q(v)
///   HatModel(v)              F(Q(v) u) on (0, v), mean v (1 - AVaR / Q(v))
///
/// Residual kinds need class D; ProportionalResidual throws QZero when
/// Q(p) = 0. Star and hat use the parent pdf, or 1 / q(F(x)) when the parent
/// carries none.
QuantileModel derive(const QuantileModel& x, Derivation d);

struct Proportionality {
    orders::Verdict verdict;
    double ratio = 0.0;  ///< CVaR[X; p] / CVaR[Y; p] at the first grid point
};

/// Constancy of CVaR[X; p] / CVaR[Y; p] on p = (i + 1/2) / grid, within
/// tol * max(1, |ratio|). Both models must be in class D.
Proportionality proportionality_check(const QuantileModel& x, const QuantileModel& y,
                                      int grid = orders::kDefaultGrid, double tol = 1e-8);

enum class Measure { VaR, CVaR, AVaR, RightSpread, ProportionalCVaR };

Measure parse_measure(const std::string& name);
std::string to_string(Measure m);

struct RiskCurve {
    Measure measure;
    std::vector<std::pair<double, double>> points;
};

/// Evaluates `m` at each p; ps must be strictly increasing inside (0, 1).
RiskCurve risk_curve(const QuantileModel& x, Measure m, const std::vector<double>& ps);

/// `p,value` rows with a header, 12 significant digits.
void write_csv(std::ostream& out, const RiskCurve& curve);

}  // namespace qcalc::risk
