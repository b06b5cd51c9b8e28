#include "qcalc/risk.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "qcalc/errors.hpp"
#include "text.hpp"

namespace qcalc::risk {

namespace {

constexpr double kPi = 3.14159265358979323846;
using Slots = QuantileModel::Slots;

void require_open_unit(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1)");
}

void require_class_d(const QuantileModel& x) {
    if (!x.class_d()) throw DomainError(x.name() + " is not in class D");
}

// Integral over (a, b) with tolerances scaled to the interval length.
double integral(const RealFn& f, double a, double b) {
    auto spec = numerics::fine_quadrature();
    spec.abs_tol *= std::min(1.0, b - a);
    const auto r = numerics::integrate(f, a, b, spec);
    if (!r.converged && r.error_estimate > 1e-9 * std::max(1.0, std::abs(r.value))) {
        throw NonConvergence("risk integral did not converge on (" + text::format_number(a) + ", " +
                             text::format_number(b) + ")");
    }
    return r.value;
}

// 1 - (1 - u)(1 - p), kept strictly below 1 for u < 1.
double upper_image(double u, double p) {
    const double w = 1.0 - (1.0 - u) * (1.0 - p);
    return u < 1.0 ? std::min(w, std::nextafter(1.0, 0.0)) : 1.0;
}

RealFn parent_pdf(const QuantileModel& x) {
    if (x.has_pdf()) return [x](double t) { return x.pdf(t); };
    return [x](double t) {
        const double F = x.cdf(t);
        if (!(F > 0.0 && F < 1.0)) return 0.0;
        return 1.0 / x.quantile_density(F);
    };
}

template <class F>
const F* family_as(const QuantileModel& x) {
    return x.family() ? std::get_if<F>(&*x.family()) : nullptr;
}

Slots residual(const QuantileModel& x, double p, double scale) {
    const double qp = x.quantile(p);
    const double s = 1.0 - p;
    Slots out;
    out.quantile = [x, p, qp, scale](double u) {
        if (u <= 0.0) return 0.0;
        return (x.quantile(upper_image(u, p)) - qp) / scale;
    };
    out.quantile_density = [x, p, s, scale](double u) {
        return x.quantile_density(upper_image(u, p)) * s / scale;
    };
    out.cdf = [x, p, qp, s, scale](double t) {
        if (t <= 0.0) return 0.0;
        return std::clamp((x.cdf(qp + t * scale) - p) / s, 0.0, 1.0);
    };
    out.survival = [x, qp, s, scale](double t) {
        if (t <= 0.0) return 1.0;
        return std::clamp(x.survival(qp + t * scale) / s, 0.0, 1.0);
    };
    if (x.has_pdf()) {
        out.pdf = [x, qp, s, scale](double t) {
            return t < 0.0 ? 0.0 : scale * x.pdf(qp + t * scale) / s;
        };
    }
    out.support = {0.0, (x.support().upper - qp) / scale};
    out.mean = cvar(x, p) / scale;
    return out;
}

Slots star_or_hat(const QuantileModel& x, double v, bool star) {
    const double qv = x.quantile(v);
    if (!(qv > 0.0)) throw QZero(x.name() + " has Q(v) = 0 at v = " + text::format_number(v));
    const double k = star ? 1.0 / v : 1.0;  // Q* = F(Q(v) u) / v, Q-hat = F(Q(v) u)
    const double top = star ? 1.0 : v;      // upper end of the support
    const RealFn f = parent_pdf(x);
    Slots out;
    out.quantile = [x, qv, k](double u) { return u <= 0.0 ? 0.0 : k * x.cdf(qv * u); };
    out.quantile_density = [f, qv, k](double u) { return k * qv * f(qv * u); };
    // F*(x) = Q(v x) / Q(v) and F-hat(x) = Q(x) / Q(v).
    const double m = star ? v : 1.0;
    out.cdf = [x, qv, m, top](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= top) return 1.0;
        return std::min(1.0, x.quantile(m * t) / qv);
    };
    out.pdf = [x, qv, m, top](double t) {
        if (t <= 0.0 || t >= top) return 0.0;
        return m * x.quantile_density(m * t) / qv;
    };
    out.support = {0.0, top};
    out.mean = top * (1.0 - avar(x, v) / qv);
    return out;
}

}  // namespace

double var(const QuantileModel& x, double p) {
    require_open_unit(p, "VaR level p");
    return x.quantile(p);
}

double cvar(const QuantileModel& x, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("CVaR level p must lie in [0, 1)");
    require_class_d(x);
    if (p == 0.0) return x.mean();
    const double qp = x.quantile(p);
    return integral([&](double t) { return x.quantile(t) - qp; }, p, 1.0) / (1.0 - p);
}

double right_spread(const QuantileModel& x, double p) { return (1.0 - p) * cvar(x, p); }

double avar(const QuantileModel& x, double v) {
    require_open_unit(v, "AVaR level v");
    return integral([&](double u) { return x.quantile(u); }, 0.0, v) / v;
}

std::optional<double> cvar_closed_form(const QuantileModel& x, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("CVaR level p must lie in [0, 1)");
    if (const auto* e = family_as<family::Exponential>(x)) return 1.0 / e->rate;
    if (const auto* u = family_as<family::Uniform>(x)) return u->upper * (1.0 - p) / 2.0;
    if (const auto* g = family_as<family::GeoMaxExp>(x)) {
        return -std::log(p + (1.0 - p) * g->delta) / (g->rate * (1.0 - p) * (1.0 - g->delta));
    }
    if (const auto* r = family_as<family::Rayleigh>(x)) {
        return std::sqrt(kPi) * numerics::erfc(std::sqrt(-std::log1p(-p))) /
               (2.0 * std::sqrt(r->alpha) * (1.0 - p));
    }
    return std::nullopt;
}

std::optional<double> avar_closed_form(const QuantileModel& x, double v) {
    require_open_unit(v, "AVaR level v");
    if (const auto* u = family_as<family::Uniform>(x)) return u->upper * v / 2.0;
    if (const auto* a = family_as<family::PowerUnit>(x)) {
        return std::pow(v, 1.0 / a->alpha) * a->alpha / (a->alpha + 1.0);
    }
    if (const auto* s = family_as<family::PowerScale>(x)) {
        return s->scale * std::pow(v, 1.0 / s->shape) * s->shape / (s->shape + 1.0);
    }
    if (const auto* f = family_as<family::FrechetType>(x)) {
        return std::pow(f->c, 1.0 / f->gamma) *
               numerics::upper_incomplete_gamma(1.0 - 1.0 / f->gamma, -std::log(v)) / v;
    }
    return std::nullopt;
}

Derivation parse_derivation(const std::string& spec) {
    const auto [head, rest] = text::split_spec(spec);
    const double value = text::parse_number(rest);
    if (head == "residual") return {DerivedKind::ResidualAtQuantile, value};
    if (head == "propresidual") return {DerivedKind::ProportionalResidual, value};
    if (head == "star") return {DerivedKind::StarModel, value};
    if (head == "hat") return {DerivedKind::HatModel, value};
    throw ParseError("unknown derived model '" + head + "'");
}

std::string to_string(DerivedKind kind) {
    switch (kind) {
        case DerivedKind::ResidualAtQuantile: return "residual";
        case DerivedKind::ProportionalResidual: return "propresidual";
        case DerivedKind::StarModel: return "star";
        case DerivedKind::HatModel: return "hat";
    }
    return "?";
}

QuantileModel derive(const QuantileModel& x, Derivation d) {
    require_open_unit(d.parameter, "derived model parameter");
    Slots s;
    switch (d.kind) {
        case DerivedKind::ResidualAtQuantile:
            require_class_d(x);
            s = residual(x, d.parameter, 1.0);
            break;
        case DerivedKind::ProportionalResidual: {
            require_class_d(x);
            const double qp = x.quantile(d.parameter);
            if (!(qp > 0.0)) throw QZero("Q(p) = 0, so " + x.name() + " has no proportional residual at p");
            s = residual(x, d.parameter, qp);
            break;
        }
        case DerivedKind::StarModel:
            s = star_or_hat(x, d.parameter, true);
            break;
        case DerivedKind::HatModel:
            s = star_or_hat(x, d.parameter, false);
            break;
    }
    s.name = to_string(d.kind) + "[" + x.name() + "; " + text::format_number(d.parameter) + "]";
    return QuantileModel(std::move(s));
}

Proportionality proportionality_check(const QuantileModel& x, const QuantileModel& y, int grid,
                                      double tol) {
    if (grid < 2) throw InvalidParameter("proportionality check needs a grid of at least 2 points");
    Proportionality out;
    out.verdict.grid_size = grid;
    out.verdict.tolerance = tol;
    for (int i = 0; i < grid; ++i) {
        const double p = (i + 0.5) / grid;
        const double r = cvar(x, p) / cvar(y, p);
        if (i == 0) {
            out.ratio = r;
            continue;
        }
        const double dev = std::abs(r - out.ratio);
        if (dev > tol * std::max(1.0, std::abs(out.ratio))) {
            out.verdict.status = orders::Status::Fails;
            out.verdict.witness = orders::Witness{p, dev};
            out.verdict.detail = "CVaR ratio moves from " + text::format_number(out.ratio) + " to " +
                                 text::format_number(r) + " at p=" + text::format_number(p);
            return out;
        }
    }
    out.verdict.status = orders::Status::HoldsOnGrid;
    out.verdict.detail = "CVaR ratio constant on grid at " + text::format_number(out.ratio);
    return out;
}

Measure parse_measure(const std::string& name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "var") return Measure::VaR;
    if (s == "cvar") return Measure::CVaR;
    if (s == "avar") return Measure::AVaR;
    if (s == "rightspread" || s == "right-spread") return Measure::RightSpread;
    if (s == "propcvar" || s == "proportionalcvar") return Measure::ProportionalCVaR;
    throw ParseError("unknown risk measure '" + name + "'");
}

std::string to_string(Measure m) {
    switch (m) {
        case Measure::VaR: return "VaR";
        case Measure::CVaR: return "CVaR";
        case Measure::AVaR: return "AVaR";
        case Measure::RightSpread: return "RightSpread";
        case Measure::ProportionalCVaR: return "ProportionalCVaR";
    }
    return "?";
}

RiskCurve risk_curve(const QuantileModel& x, Measure m, const std::vector<double>& ps) {
    RiskCurve curve{m, {}};
    double prev = 0.0;
    for (double p : ps) {
        require_open_unit(p, "risk curve level");
        if (!curve.points.empty() && !(p > prev)) throw InvalidParameter("risk curve levels must increase");
        prev = p;
        double value = 0.0;
        switch (m) {
            case Measure::VaR: value = var(x, p); break;
            case Measure::CVaR: value = cvar(x, p); break;
            case Measure::AVaR: value = avar(x, p); break;
            case Measure::RightSpread: value = right_spread(x, p); break;
            case Measure::ProportionalCVaR: {
                const double qp = x.quantile(p);
                if (!(qp > 0.0)) throw QZero("proportional CVaR needs Q(p) > 0");
                value = cvar(x, p) / qp;
                break;
            }
        }
        curve.points.emplace_back(p, value);
    }
    return curve;
}

void write_csv(std::ostream& out, const RiskCurve& curve) {
    out << "p,value\n";
    for (const auto& [p, v] : curve.points) {
        out << text::format_number(p) << ',' << text::format_number(v) << '\n';
    }
}

}  // namespace qcalc::risk
