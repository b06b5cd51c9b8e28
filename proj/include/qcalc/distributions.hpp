#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcalc/numerics.hpp"

namespace qcalc {

using numerics::RealFn;

struct Support {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

namespace family {

struct Exponential { double rate; };
/// Uniform on (0, upper).
struct Uniform { double upper; };
/// F(x) = x^alpha on (0, 1).
struct PowerUnit { double alpha; };
/// F(x) = (x / scale)^shape on (0, scale).
struct PowerScale { double scale; double shape; };
/// Q(u) = scale [(1-u)^{-1/shape} - 1], shape > 1.
struct Lomax { double shape; double scale; };
/// F(x) = 1 - (scale / x)^shape on [scale, inf), shape > 1.
struct ParetoI { double scale; double shape; };
/// F(x) = 1 - exp(-alpha x^2).
struct Rayleigh { double alpha; };
/// Maximum of a geometric(delta) number of Exp(rate) variables.
struct GeoMaxExp { double rate; double delta; };
/// F(x) = exp(-c x^{-gamma}).
struct FrechetType { double c; double gamma; };
/// Piecewise law with reversed hazard 1/x^2, x, 1/x^2 on (0,1), [1,2), [2,inf).
struct BlockPiecewise {};
/// Quantile function given on a grid; u strictly increasing in (0,1), Q nondecreasing.
struct Tabulated { std::vector<double> u; std::vector<double> q; };

}  // namespace family

using FamilySpec =
    std::variant<family::Exponential, family::Uniform, family::PowerUnit, family::PowerScale,
                 family::Lomax, family::ParetoI, family::Rayleigh, family::GeoMaxExp,
                 family::FrechetType, family::BlockPiecewise, family::Tabulated>;

/// A distribution exposed through its quantile function.
///
/// Every quantile slot accepts u = 0 and returns the right limit Q(0+), which
/// is how class-D membership (Q(0+) = 0, finite nonzero mean) is decided at
/// construction. Models are immutable and cheap to copy.
class QuantileModel {
public:
    struct Slots {
        std::string name;
        RealFn quantile;
        RealFn quantile_density;
        RealFn cdf;
        RealFn survival;  ///< optional; defaults to 1 - cdf
        RealFn pdf;       ///< optional; empty means no density slot
        Support support;
        std::optional<double> mean;  ///< closed form, when known
        bool finite_mean = true;
        std::optional<FamilySpec> family;
    };

    explicit QuantileModel(Slots slots);

    double quantile(double u) const;
    double quantile_density(double u) const;
    double cdf(double x) const;
    double survival(double x) const;
    /// Throws MissingDensity when the model carries no density.
    double pdf(double x) const;
    bool has_pdf() const;

    /// Throws InfiniteMean when the mean diverges.
    double mean() const;
    bool has_finite_mean() const;
    /// True when the mean comes from a closed form rather than quadrature.
    bool has_closed_form_mean() const;
    bool class_d() const;
    const Support& support() const;
    const std::string& name() const;
    const std::optional<FamilySpec>& family() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Builds a catalog model; throws InvalidParameter on bad parameters.
QuantileModel make_model(const FamilySpec& spec);

/// Model mini-grammar "family:p1,p2": exp:rate, uniform:a, powerunit:a,
/// powerscale:scale,shape, lomax:shape,scale, pareto:scale,shape,
/// rayleigh:alpha, geomax:rate,delta, frechet:c,gamma, block, tab:path.csv.
FamilySpec parse_family(const std::string& spec);

/// Reads the two-column `u,Q` CSV (optional header line).
family::Tabulated read_tabulated_csv(std::istream& in);

/// Degenerate-at-zero law Q = 0, as a Tabulated model.
QuantileModel zero_model();

/// max(T1, T2) for independent T1 ~ Exp(rate1), T2 ~ Exp(rate2). IFRA (so
/// NBU) for any rates; not IFR when the rates are far apart. The quantile
/// has no closed form and is found by root finding on the cdf.
QuantileModel max_of_exponentials(double rate1, double rate2);

/// E[X]; closed form when available, otherwise the integral of Q over (0, 1).
double mean(const QuantileModel& model);
/// int_0^1 Q(u) du, computed regardless of any closed form.
double mean_by_quadrature(const QuantileModel& model);

/// tau(x) = f(x) / F(x).
double reversed_hazard(const QuantileModel& model, double x);

/// E[X - t | X > t], via (1 - F(t))^{-1} int_{F(t)}^1 (Q(u) - t) du.
double mean_residual_life(const QuantileModel& model, double t);

/// (1 - F(x)) / E[X].
double equilibrium_density(const QuantileModel& model, double x);

/// (p2 - p1)^{-1} int_{p1}^{p2} g(Q(u)) du = E[g(X) | Q(p1) < X <= Q(p2)].
double conditional_mean_between_quantiles(const QuantileModel& model, const RealFn& g, double p1,
                                          double p2);

/// Human readable family name, e.g. "Lomax(2, 1)".
std::string describe(const FamilySpec& spec);

}  // namespace qcalc
