#include "qcalc/unitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "monotone_cubic.hpp"
#include "qcalc/errors.hpp"
#include "text.hpp"

namespace qcalc::unitlaw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double safe_density(const RealFn& d, double u) {
    try {
        return d(u);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

void require_lorenz_ready(const QuantileModel& x) {
    if (!x.class_d()) throw DomainError(x.name() + " is not in class D");
}

double mean_gap(const QuantileModel& x, const QuantileModel& y) {
    const double ex = x.mean();
    const double ey = y.mean();
    const double gap = ey - ex;
    if (!(gap > 1e-12 * std::max(1.0, std::abs(ey)))) {
        std::ostringstream os;
        os << "Psi^L needs E[X] < E[Y]; got E[X]=" << text::format_number(ex)
           << ", E[Y]=" << text::format_number(ey);
        throw EqualMeans(os.str());
    }
    return gap;
}

}  // namespace

struct UnitVariable::Impl {
    std::string provenance;
    RealFn density;
    std::vector<double> knots;
    std::vector<double> cumulative;
    detail::MonotoneCubic table;
    double total = 0.0;
};

UnitVariable::UnitVariable(std::string provenance, RealFn density) {
    auto impl = std::make_shared<Impl>();
    impl->provenance = std::move(provenance);
    impl->density = std::move(density);
    const int n = kCdfCells;
    impl->knots.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        impl->knots[k] = 0.5 * (1.0 - std::cos(kPi * k / n));
    }
    impl->knots.front() = 0.0;
    impl->knots.back() = 1.0;
    impl->cumulative.assign(n + 1, 0.0);
    const auto spec = numerics::fine_quadrature();
    for (int k = 0; k < n; ++k) {
        const auto r =
            numerics::integrate(impl->density, impl->knots[k], impl->knots[k + 1], spec);
        // Clamp tiny negative cell masses (cancellation noise) to keep the table monotone.
        impl->cumulative[k + 1] = std::max(impl->cumulative[k], impl->cumulative[k] + r.value);
    }
    impl->total = impl->cumulative.back();
    std::vector<double> slopes(n + 1);
    for (int k = 0; k <= n; ++k) slopes[k] = safe_density(impl->density, impl->knots[k]);
    impl->table = detail::MonotoneCubic(impl->knots, impl->cumulative, slopes);
    impl_ = std::move(impl);
}

double UnitVariable::density(double u) const { return impl_->density(u); }

double UnitVariable::cdf(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return impl_->total;
    const auto& k = impl_->knots;
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), p) - k.begin()) - 1;
    if (p == k[i]) return impl_->cumulative[i];
    return impl_->cumulative[i] +
           numerics::integrate(impl_->density, k[i], p, numerics::fine_quadrature()).value;
}

double UnitVariable::quantile(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double target = p * impl_->total;
    double x = approximate_quantile(p);
    for (int iter = 0; iter < 3; ++iter) {
        const double d = safe_density(impl_->density, x);
        if (!(d > 0.0) || !std::isfinite(d)) break;
        const double next = x - (cdf(x) - target) / d;
        if (!(next > 0.0 && next < 1.0)) break;
        if (std::abs(next - x) <= 1e-15) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double UnitVariable::approximate_quantile(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return impl_->table.inverse(p * impl_->total);
}

double UnitVariable::normalization() const { return impl_->total; }

const std::string& UnitVariable::provenance() const { return impl_->provenance; }

double lorenz_curve(const QuantileModel& x, double p) {
    require_lorenz_ready(x);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Lorenz curve needs p in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    return numerics::integrate_value([&](double u) { return x.quantile(u); }, 0.0, p,
                                     numerics::fine_quadrature()) /
           x.mean();
}

UnitVariable lift_XL(const QuantileModel& x) {
    require_lorenz_ready(x);
    const double m = x.mean();
    return UnitVariable("lift of " + x.name(), [x, m](double u) { return x.quantile(u) / m; });
}

void require_st_on_grid(const QuantileModel& x, const QuantileModel& y, int grid) {
    if (grid < 2) throw InvalidParameter("st grid needs at least 2 points");
    double worst = 0.0;
    double where = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double u = 0.5 * (1.0 - std::cos(kPi * (k + 0.5) / grid));
        const double excess = x.quantile(u) - y.quantile(u);
        if (excess > worst) {
            worst = excess;
            where = u;
        }
    }
    if (worst > 1e-9) {
        std::ostringstream os;
        os << x.name() << " is not <=st " << y.name() << ": Q_X - Q_Y = "
           << text::format_number(worst) << " at u=" << text::format_number(where);
        throw NotStochasticallyOrdered(os.str(), where, worst);
    }
}

UnitVariable psi_L(const QuantileModel& x, const QuantileModel& y, int grid) {
    require_st_on_grid(x, y, grid);
    const double gap = mean_gap(x, y);
    std::ostringstream os;
    os << "Psi^L(" << x.name() << ", " << y.name() << "), st verified on grid of " << grid;
    return UnitVariable(os.str(), [x, y, gap](double u) {
        return (y.quantile(u) - x.quantile(u)) / gap;
    });
}

double generalized_lorenz(const QuantileModel& x, const QuantileModel& y, double p) {
    require_st_on_grid(x, y, kStGrid);
    const double gap = mean_gap(x, y);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("generalized Lorenz needs p in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    return numerics::integrate_value([&](double u) { return y.quantile(u) - x.quantile(u); }, 0.0,
                                     p, numerics::fine_quadrature()) /
           gap;
}

MixtureCoefficient mixture_decomposition(const QuantileModel& x, const QuantileModel& y) {
    require_lorenz_ready(x);
    require_lorenz_ready(y);
    require_st_on_grid(x, y, kStGrid);
    const double gap = mean_gap(x, y);
    const double ex = x.mean();
    const double ey = y.mean();
    MixtureCoefficient out;
    out.c = ey / gap;
    for (int i = 0; i < 64; ++i) {
        const double u = (i + 0.5) / 64.0;
        const double fz = (y.quantile(u) - x.quantile(u)) / gap;
        const double mix = out.c * y.quantile(u) / ey + (1.0 - out.c) * x.quantile(u) / ex;
        out.max_deviation = std::max(out.max_deviation, std::abs(fz - mix));
    }
    return out;
}

double unit_moment(const QuantileModel& x, int k) {
    require_lorenz_ready(x);
    if (k < 0) throw DomainError("unit moment needs k >= 0");
    if (k == 0) return 1.0;
    return numerics::integrate_value(
               [&](double u) { return std::pow(u, k) * x.quantile(u); }, 0.0, 1.0) /
           x.mean();
}

double expectation_h(const QuantileModel& x, const TestFunction& h) {
    require_lorenz_ready(x);
    return numerics::integrate_value([&](double u) { return h(u) * x.quantile(u); }, 0.0, 1.0) /
           x.mean();
}

GoldenReport golden_fixed_point() {
    auto lorenz_power = [](double alpha, double p) {
        return lorenz_curve(make_model(family::PowerUnit{alpha}), p);
    };
    auto sup_distance = [&](double alpha) {
        double worst = 0.0;
        for (int i = 1; i < 1000; ++i) {
            const double p = i / 1000.0;
            worst = std::max(worst, std::abs(lorenz_power(alpha, p) - std::pow(p, alpha)));
        }
        return worst;
    };
    GoldenReport r;
    try {
        r.alpha = numerics::find_root(
            [&](double a) { return lorenz_power(a, 0.5) - std::pow(0.5, a); }, 1.0, 2.0, 1e-13);
    } catch (const InvalidBracket& e) {
        throw NonConvergence(std::string("golden fixed point: ") + e.what());
    }
    r.sup_distance = sup_distance(r.alpha);
    r.analytic = 0.5 * (1.0 + std::sqrt(5.0));
    r.reciprocal = 0.5 * (-1.0 + std::sqrt(5.0));
    r.reciprocal_distance = sup_distance(r.reciprocal);
    r.matches_reciprocal = std::abs(r.alpha - r.reciprocal) <= 1e-8;
    return r;
}

std::vector<double> sample(const UnitVariable& v, std::size_t n, std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(n);
    std::mt19937_64 engine(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(v.approximate_quantile(unit_from_bits(engine())));
    return out;
}

}  // namespace qcalc::unitlaw
