#include "qcalc/distributions.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "monotone_cubic.hpp"
#include "qcalc/errors.hpp"
#include "text.hpp"

namespace qcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// -ln(u) without losing digits as u -> 1.
double neg_log(double u) { return u > 0.5 ? -std::log1p(u - 1.0) : -std::log(u); }

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Slots = QuantileModel::Slots;

Slots exponential_slots(const family::Exponential& p) {
    require(p.rate > 0.0 && std::isfinite(p.rate), "Exponential needs rate > 0");
    const double l = p.rate;
    Slots s;
    s.quantile = [l](double u) { return -std::log1p(-u) / l; };
    s.quantile_density = [l](double u) { return 1.0 / (l * (1.0 - u)); };
    s.cdf = [l](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-l * x); };
    s.survival = [l](double x) { return x <= 0.0 ? 1.0 : std::exp(-l * x); };
    s.pdf = [l](double x) { return x < 0.0 ? 0.0 : l * std::exp(-l * x); };
    s.mean = 1.0 / l;
    return s;
}

Slots uniform_slots(const family::Uniform& p) {
    require(p.upper > 0.0 && std::isfinite(p.upper), "Uniform needs upper > 0");
    const double a = p.upper;
    Slots s;
    s.quantile = [a](double u) { return a * u; };
    s.quantile_density = [a](double) { return a; };
    s.cdf = [a](double x) { return std::clamp(x / a, 0.0, 1.0); };
    s.survival = [a](double x) { return std::clamp(1.0 - x / a, 0.0, 1.0); };
    s.pdf = [a](double x) { return (x >= 0.0 && x <= a) ? 1.0 / a : 0.0; };
    s.support = {0.0, a};
    s.mean = a / 2.0;
    return s;
}

Slots power_scale_slots(double scale, double shape) {
    require(scale > 0.0 && std::isfinite(scale), "power law needs scale > 0");
    require(shape > 0.0 && std::isfinite(shape), "power law needs shape > 0");
    Slots s;
    s.quantile = [scale, shape](double u) { return scale * std::pow(u, 1.0 / shape); };
    s.quantile_density = [scale, shape](double u) {
        return scale / shape * std::pow(u, 1.0 / shape - 1.0);
    };
    s.cdf = [scale, shape](double x) {
        return x <= 0.0 ? 0.0 : (x >= scale ? 1.0 : std::pow(x / scale, shape));
    };
    s.pdf = [scale, shape](double x) {
        return (x <= 0.0 || x > scale) ? 0.0 : shape / scale * std::pow(x / scale, shape - 1.0);
    };
    s.support = {0.0, scale};
    s.mean = scale * shape / (shape + 1.0);
    return s;
}

Slots lomax_slots(const family::Lomax& p) {
    require(p.shape > 1.0 && std::isfinite(p.shape), "Lomax needs shape > 1 (finite mean)");
    require(p.scale > 0.0 && std::isfinite(p.scale), "Lomax needs scale > 0");
    const double a = p.shape;
    const double l = p.scale;
    Slots s;
    s.quantile = [a, l](double u) { return l * std::expm1(-std::log1p(-u) / a); };
    s.quantile_density = [a, l](double u) { return l / a * std::pow(1.0 - u, -1.0 / a - 1.0); };
    s.cdf = [a, l](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-a * std::log1p(x / l)); };
    s.survival = [a, l](double x) { return x <= 0.0 ? 1.0 : std::exp(-a * std::log1p(x / l)); };
    s.pdf = [a, l](double x) {
        return x < 0.0 ? 0.0 : a / l * std::exp(-(a + 1.0) * std::log1p(x / l));
    };
    s.mean = l / (a - 1.0);
    return s;
}

Slots pareto_slots(const family::ParetoI& p) {
    require(p.scale > 0.0 && std::isfinite(p.scale), "ParetoI needs scale > 0");
    require(p.shape > 1.0 && std::isfinite(p.shape), "ParetoI needs shape > 1 (finite mean)");
    const double a = p.scale;
    const double b = p.shape;
    Slots s;
    s.quantile = [a, b](double u) { return a * std::pow(1.0 - u, -1.0 / b); };
    s.quantile_density = [a, b](double u) { return a / b * std::pow(1.0 - u, -1.0 / b - 1.0); };
    s.cdf = [a, b](double x) { return x <= a ? 0.0 : -std::expm1(b * std::log(a / x)); };
    s.survival = [a, b](double x) { return x <= a ? 1.0 : std::pow(a / x, b); };
    s.pdf = [a, b](double x) { return x < a ? 0.0 : b / a * std::pow(a / x, b + 1.0); };
    s.support = {a, kInf};
    s.mean = a * b / (b - 1.0);
    return s;
}

Slots rayleigh_slots(const family::Rayleigh& p) {
    require(p.alpha > 0.0 && std::isfinite(p.alpha), "Rayleigh needs alpha > 0");
    const double a = p.alpha;
    Slots s;
    s.quantile = [a](double u) { return std::sqrt(-std::log1p(-u) / a); };
    s.quantile_density = [a](double u) {
        return 1.0 / (2.0 * (1.0 - u) * std::sqrt(-a * std::log1p(-u)));
    };
    s.cdf = [a](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-a * x * x); };
    s.survival = [a](double x) { return x <= 0.0 ? 1.0 : std::exp(-a * x * x); };
    s.pdf = [a](double x) { return x < 0.0 ? 0.0 : 2.0 * a * x * std::exp(-a * x * x); };
    s.mean = 0.5 * std::sqrt(kPi / a);
    return s;
}

Slots geomax_slots(const family::GeoMaxExp& p) {
    require(p.rate > 0.0 && std::isfinite(p.rate), "GeoMaxExp needs rate > 0");
    require(p.delta > 0.0 && p.delta < 1.0, "GeoMaxExp needs delta in (0, 1)");
    const double l = p.rate;
    const double d = p.delta;
    Slots s;
    s.quantile = [l, d](double u) {
        return (std::log1p((1.0 - d) * u / d) - std::log1p(-u)) / l;
    };
    s.quantile_density = [l, d](double u) { return 1.0 / (l * (1.0 - u) * (d + (1.0 - d) * u)); };
    s.cdf = [l, d](double x) {
        if (x <= 0.0) return 0.0;
        const double y = std::exp(-l * x);
        return -d * std::expm1(-l * x) / (d + (1.0 - d) * y);
    };
    s.survival = [l, d](double x) {
        if (x <= 0.0) return 1.0;
        const double y = std::exp(-l * x);
        return y / (d + (1.0 - d) * y);
    };
    s.pdf = [l, d](double x) {
        if (x < 0.0) return 0.0;
        const double y = std::exp(-l * x);
        const double den = d + (1.0 - d) * y;
        return l * d * y / (den * den);
    };
    s.mean = -std::log(d) / (l * (1.0 - d));
    return s;
}

Slots frechet_slots(const family::FrechetType& p) {
    require(p.c > 0.0 && std::isfinite(p.c), "FrechetType needs c > 0");
    require(p.gamma > 0.0 && std::isfinite(p.gamma), "FrechetType needs gamma > 0");
    const double c = p.c;
    const double g = p.gamma;
    Slots s;
    s.quantile = [c, g](double u) {
        if (u <= 0.0) return 0.0;
        return std::pow(c / neg_log(u), 1.0 / g);
    };
    s.quantile_density = [c, g](double u) {
        const double t = neg_log(u);
        return std::pow(c / t, 1.0 / g) / (g * u * t);
    };
    s.cdf = [c, g](double x) { return x <= 0.0 ? 0.0 : std::exp(-c * std::pow(x, -g)); };
    s.survival = [c, g](double x) { return x <= 0.0 ? 1.0 : -std::expm1(-c * std::pow(x, -g)); };
    s.pdf = [c, g](double x) {
        if (x <= 0.0) return 0.0;
        const double z = c * std::pow(x, -g);
        return g * z / x * std::exp(-z);
    };
    if (g > 1.0) {
        s.mean = std::pow(c, 1.0 / g) * std::tgamma(1.0 - 1.0 / g);
    } else {
        s.finite_mean = false;
    }
    return s;
}

Slots block_slots() {
    // log F on the three pieces; the knots take the right-hand piece.
    auto log_cdf = [](double x) {
        if (x < 1.0) return -1.0 - 1.0 / x;
        if (x < 2.0) return 0.5 * (x * x - 5.0);
        return -1.0 / x;
    };
    auto tau = [](double x) { return (x >= 1.0 && x < 2.0) ? x : 1.0 / (x * x); };
    Slots s;
    s.cdf = [log_cdf](double x) { return x <= 0.0 ? 0.0 : std::exp(log_cdf(x)); };
    s.survival = [log_cdf](double x) { return x <= 0.0 ? 1.0 : -std::expm1(log_cdf(x)); };
    s.pdf = [log_cdf, tau](double x) { return x <= 0.0 ? 0.0 : tau(x) * std::exp(log_cdf(x)); };
    auto quantile = [](double u) {
        if (u <= 0.0) return 0.0;
        const double lu = u > 0.5 ? std::log1p(u - 1.0) : std::log(u);
        if (lu < -2.0) return 1.0 / (-lu - 1.0);
        if (lu < -0.5) return std::sqrt(5.0 + 2.0 * lu);
        return -1.0 / lu;
    };
    s.quantile = quantile;
    s.quantile_density = [quantile, log_cdf, tau](double u) {
        const double x = quantile(u);
        return 1.0 / (tau(x) * std::exp(log_cdf(x)));
    };
    s.finite_mean = false;
    return s;
}

Slots tabulated_slots(const family::Tabulated& t) {
    const auto& u = t.u;
    const auto& q = t.q;
    require(u.size() >= 2 && u.size() == q.size(), "Tabulated needs at least two (u, Q) rows");
    for (std::size_t i = 0; i < u.size(); ++i) {
        require(u[i] > 0.0 && u[i] < 1.0, "Tabulated u must lie in (0, 1)");
        require(std::isfinite(q[i]), "Tabulated Q must be finite");
        if (i > 0) {
            require(u[i] > u[i - 1], "Tabulated u must be strictly increasing");
            require(q[i] >= q[i - 1], "Tabulated Q must be nondecreasing");
        }
    }
    auto interp = std::make_shared<const detail::MonotoneCubic>(u, q);
    constexpr double h = 1e-6;
    Slots s;
    s.quantile = [interp](double x) { return (*interp)(x); };
    s.quantile_density = [interp](double x) {
        const double lo = x - h < 0.0 ? x : x - h;
        const double hi = x + h > 1.0 ? x : x + h;
        return ((*interp)(hi) - (*interp)(lo)) / (hi - lo);
    };
    const double q_first = q.front();
    const double q_last = q.back();
    s.cdf = [interp, q_first, q_last](double x) {
        if (x < q_first) return 0.0;
        if (x >= q_last) return 1.0;
        return interp->inverse(x);
    };
    const double lower = std::min(0.0, q_first);
    s.support = {lower, std::max(q_last, std::nextafter(lower, kInf))};
    return s;
}

}  // namespace

struct QuantileModel::Impl {
    Slots slots;
    double mean_value = 0.0;
    bool class_d = false;
};

QuantileModel::QuantileModel(Slots slots) {
    if (!slots.quantile || !slots.quantile_density || !slots.cdf) {
        throw InvalidParameter("a quantile model needs quantile, quantile density and cdf slots");
    }
    if (!(slots.support.lower < slots.support.upper)) {
        throw InvalidParameter("support must satisfy lower < upper");
    }
    if (!slots.survival) {
        slots.survival = [cdf = slots.cdf](double x) { return 1.0 - cdf(x); };
    }
    auto impl = std::make_shared<Impl>();
    if (slots.finite_mean) {
        if (slots.mean) {
            impl->mean_value = *slots.mean;
        } else {
            const auto r = numerics::integrate(slots.quantile, 0.0, 1.0);
            if (r.converged && std::isfinite(r.value)) {
                impl->mean_value = r.value;
                slots.mean.reset();
            } else {
                slots.finite_mean = false;
            }
        }
    }
    const double q0 = slots.quantile(0.0);
    impl->class_d = slots.finite_mean && slots.support.lower >= 0.0 && std::abs(q0) <= 1e-9 &&
                    impl->mean_value > 0.0;
    impl->slots = std::move(slots);
    impl_ = std::move(impl);
}

double QuantileModel::quantile(double u) const { return impl_->slots.quantile(u); }
double QuantileModel::quantile_density(double u) const {
    return impl_->slots.quantile_density(u);
}
double QuantileModel::cdf(double x) const { return impl_->slots.cdf(x); }
double QuantileModel::survival(double x) const { return impl_->slots.survival(x); }
bool QuantileModel::has_pdf() const { return static_cast<bool>(impl_->slots.pdf); }
double QuantileModel::pdf(double x) const {
    if (!impl_->slots.pdf) throw MissingDensity(impl_->slots.name + " carries no density");
    return impl_->slots.pdf(x);
}
double QuantileModel::mean() const {
    if (!impl_->slots.finite_mean) throw InfiniteMean(impl_->slots.name + " has an infinite mean");
    return impl_->mean_value;
}
bool QuantileModel::has_finite_mean() const { return impl_->slots.finite_mean; }
bool QuantileModel::has_closed_form_mean() const { return impl_->slots.mean.has_value(); }
bool QuantileModel::class_d() const { return impl_->class_d; }
const Support& QuantileModel::support() const { return impl_->slots.support; }
const std::string& QuantileModel::name() const { return impl_->slots.name; }
const std::optional<FamilySpec>& QuantileModel::family() const { return impl_->slots.family; }

std::string describe(const FamilySpec& spec) {
    using text::format_number;
    return std::visit(
        Overloaded{
            [](const family::Exponential& p) { return "Exponential(" + format_number(p.rate) + ")"; },
            [](const family::Uniform& p) { return "Uniform(0, " + format_number(p.upper) + ")"; },
            [](const family::PowerUnit& p) { return "PowerUnit(" + format_number(p.alpha) + ")"; },
            [](const family::PowerScale& p) {
                return "PowerScale(" + format_number(p.scale) + ", " + format_number(p.shape) + ")";
            },
            [](const family::Lomax& p) {
                return "Lomax(" + format_number(p.shape) + ", " + format_number(p.scale) + ")";
            },
            [](const family::ParetoI& p) {
                return "ParetoI(" + format_number(p.scale) + ", " + format_number(p.shape) + ")";
            },
            [](const family::Rayleigh& p) { return "Rayleigh(" + format_number(p.alpha) + ")"; },
            [](const family::GeoMaxExp& p) {
                return "GeoMaxExp(" + format_number(p.rate) + ", " + format_number(p.delta) + ")";
            },
            [](const family::FrechetType& p) {
                return "FrechetType(" + format_number(p.c) + ", " + format_number(p.gamma) + ")";
            },
            [](const family::BlockPiecewise&) { return std::string("BlockPiecewise"); },
            [](const family::Tabulated& t) {
                return "Tabulated(" + std::to_string(t.u.size()) + " rows)";
            },
        },
        spec);
}

QuantileModel make_model(const FamilySpec& spec) {
    Slots s = std::visit(
        Overloaded{
            [](const family::Exponential& p) { return exponential_slots(p); },
            [](const family::Uniform& p) { return uniform_slots(p); },
            [](const family::PowerUnit& p) { return power_scale_slots(1.0, p.alpha); },
            [](const family::PowerScale& p) { return power_scale_slots(p.scale, p.shape); },
            [](const family::Lomax& p) { return lomax_slots(p); },
            [](const family::ParetoI& p) { return pareto_slots(p); },
            [](const family::Rayleigh& p) { return rayleigh_slots(p); },
            [](const family::GeoMaxExp& p) { return geomax_slots(p); },
            [](const family::FrechetType& p) { return frechet_slots(p); },
            [](const family::BlockPiecewise&) { return block_slots(); },
            [](const family::Tabulated& t) { return tabulated_slots(t); },
        },
        spec);
    s.name = describe(spec);
    s.family = spec;
    return QuantileModel(std::move(s));
}

family::Tabulated read_tabulated_csv(std::istream& in) {
    family::Tabulated t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        try {
            row = text::parse_numbers(line);
        } catch (const ParseError&) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw;
        }
        first = false;
        if (row.size() != 2) throw ParseError("tabulated rows must have two columns: u,Q");
        t.u.push_back(row[0]);
        t.q.push_back(row[1]);
    }
    // Validate eagerly so bad files are rejected at load time.
    (void)tabulated_slots(t);
    return t;
}

FamilySpec parse_family(const std::string& spec) {
    const auto [head, args] = text::split_spec(spec);
    if (head == "tab" || head == "tabulated") {
        std::ifstream in(args);
        if (!in) throw ParseError("cannot open tabulated file '" + args + "'");
        return read_tabulated_csv(in);
    }
    const auto v = text::parse_numbers(args);
    auto want = [&](std::size_t n, const char* usage) {
        if (v.size() != n) throw ParseError(std::string("expected ") + usage);
    };
    if (head == "exp" || head == "exponential") {
        want(1, "exp:rate");
        return family::Exponential{v[0]};
    }
    if (head == "uniform") {
        want(1, "uniform:upper");
        return family::Uniform{v[0]};
    }
    if (head == "powerunit") {
        want(1, "powerunit:alpha");
        return family::PowerUnit{v[0]};
    }
    if (head == "powerscale") {
        want(2, "powerscale:scale,shape");
        return family::PowerScale{v[0], v[1]};
    }
    if (head == "lomax") {
        want(2, "lomax:shape,scale");
        return family::Lomax{v[0], v[1]};
    }
    if (head == "pareto" || head == "paretoi") {
        want(2, "pareto:scale,shape");
        return family::ParetoI{v[0], v[1]};
    }
    if (head == "rayleigh") {
        want(1, "rayleigh:alpha");
        return family::Rayleigh{v[0]};
    }
    if (head == "geomax") {
        want(2, "geomax:rate,delta");
        return family::GeoMaxExp{v[0], v[1]};
    }
    if (head == "frechet") {
        want(2, "frechet:c,gamma");
        return family::FrechetType{v[0], v[1]};
    }
    if (head == "block") {
        want(0, "block (no parameters)");
        return family::BlockPiecewise{};
    }
    throw ParseError("unknown family '" + head + "'");
}

QuantileModel zero_model() {
    return make_model(family::Tabulated{{0.25, 0.75}, {0.0, 0.0}});
}

QuantileModel max_of_exponentials(double rate1, double rate2) {
    require(rate1 > 0.0 && std::isfinite(rate1) && rate2 > 0.0 && std::isfinite(rate2),
            "max_of_exponentials needs positive rates");
    const double a = rate1;
    const double b = rate2;
    const double m = std::min(a, b);
    Slots s;
    s.cdf = [a, b](double x) { return x <= 0.0 ? 0.0 : std::expm1(-a * x) * std::expm1(-b * x); };
    s.survival = [a, b](double x) {
        if (x <= 0.0) return 1.0;
        return std::exp(-a * x) + std::exp(-b * x) - std::exp(-(a + b) * x);
    };
    s.pdf = [a, b](double x) {
        if (x < 0.0) return 0.0;
        return -a * std::exp(-a * x) * std::expm1(-b * x) - b * std::exp(-b * x) * std::expm1(-a * x);
    };
    // (1 - e^{-m x})^2 <= F(x) <= 1 - e^{-m x} brackets the root.
    s.quantile = [cdf = s.cdf, m](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return kInf;
        const double lo = -std::log1p(-u) / m;
        const double hi = -std::log1p(-std::sqrt(u)) / m;
        if (!(hi > lo) || cdf(lo) >= u) return lo;
        if (cdf(hi) <= u) return hi;
        return numerics::find_root([&](double x) { return cdf(x) - u; }, lo, hi, 4e-16 * hi);
    };
    s.quantile_density = [quantile = s.quantile, pdf = s.pdf](double u) { return 1.0 / pdf(quantile(u)); };
    s.support = {0.0, kInf};
    s.mean = 1.0 / a + 1.0 / b - 1.0 / (a + b);
    s.name = "MaxOfExponentials(" + text::format_number(a) + ", " + text::format_number(b) + ")";
    return QuantileModel(std::move(s));
}

double mean(const QuantileModel& model) { return model.mean(); }

double mean_by_quadrature(const QuantileModel& model) {
    if (!model.has_finite_mean()) throw InfiniteMean(model.name() + " has an infinite mean");
    return numerics::integrate_value([&](double u) { return model.quantile(u); }, 0.0, 1.0);
}

double reversed_hazard(const QuantileModel& model, double x) {
    const auto& s = model.support();
    if (!(x > s.lower && x < s.upper)) {
        throw DomainError("reversed hazard needs x inside the support");
    }
    const double F = model.cdf(x);
    if (!(F > 0.0)) throw DomainError("reversed hazard needs F(x) > 0");
    return model.pdf(x) / F;
}

double mean_residual_life(const QuantileModel& model, double t) {
    if (!model.class_d()) throw DomainError(model.name() + " is not in class D");
    if (t < 0.0) throw DomainError("mean residual life needs t >= 0");
    const double p = model.cdf(t);
    if (!(p < 1.0)) throw DomainError("mean residual life needs F(t) < 1");
    const double tail = numerics::integrate_value(
        [&](double u) { return model.quantile(u) - t; }, p, 1.0, numerics::fine_quadrature());
    return tail / (1.0 - p);
}

double equilibrium_density(const QuantileModel& model, double x) {
    if (!model.class_d()) throw DomainError(model.name() + " is not in class D");
    if (x < 0.0) throw DomainError("equilibrium density needs x >= 0");
    return model.survival(x) / model.mean();
}

double conditional_mean_between_quantiles(const QuantileModel& model, const RealFn& g, double p1,
                                          double p2) {
    if (!(p1 >= 0.0 && p1 < p2 && p2 <= 1.0)) {
        throw DomainError("conditional mean needs 0 <= p1 < p2 <= 1");
    }
    const double integral =
        numerics::integrate_value([&](double u) { return g(model.quantile(u)); }, p1, p2);
    return integral / (p2 - p1);
}

}  // namespace qcalc
