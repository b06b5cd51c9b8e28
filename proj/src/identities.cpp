#include "qcalc/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qcalc/errors.hpp"
#include "qcalc/orders.hpp"
#include "qcalc/risk.hpp"
#include "qcalc/unitlaw.hpp"
#include "text.hpp"

namespace qcalc::identities {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kDensityPoints = 64;
constexpr double kStrictSlack = 1e-10;

using text::format_number;

// Quadrature over (0, 1) that tracks the worst error estimate seen.
class Integrator {
public:
    double operator()(const RealFn& f, double a = 0.0, double b = 1.0) {
        const auto r = numerics::integrate(f, a, b, numerics::fine_quadrature());
        if (!r.converged && r.error_estimate > 1e-9 * std::max(1.0, std::abs(r.value))) {
            throw NonConvergence("identity integral did not converge (error estimate " +
                                 format_number(r.error_estimate) + ")");
        }
        worst_ = std::max(worst_, r.error_estimate);
        return r.value;
    }
    std::string note() const { return "quadrature error <= " + format_number(worst_); }

private:
    double worst_ = 0.0;
};

std::string join_notes(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "; " + b;
}

std::string class_d_note(const QuantileModel& x) {
    if (!x.has_finite_mean()) throw DomainError(x.name() + " has an infinite mean");
    if (x.class_d()) return "";
    return x.name() + " is not in class D (Q(0+) = " + format_number(x.quantile(0.0)) +
           "), so the identity is not expected to hold";
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double cvar_value(const QuantileModel& x, double p) {
    return risk::cvar_closed_form(x, p).value_or(risk::cvar(x, p));
}

double avar_value(const QuantileModel& x, double v) {
    return risk::avar_closed_form(x, v).value_or(risk::avar(x, v));
}

// 1 - (1 - u)(1 - p)
double lift_level(double u, double p) { return 1.0 - (1.0 - u) * (1.0 - p); }

void require_pair(double lo, double hi, const char* names) {
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
        throw DomainError(std::string("application parameters need 0 < ") + names + " < 1");
    }
}

void require_verdict(const orders::Verdict& v, const std::string& what) {
    if (v.holds()) return;
    const double at = v.witness ? v.witness->location : 0.0;
    const double by = v.witness ? v.witness->violation : 0.0;
    throw HypothesisFailed(what + " fails on grid: " + v.detail, at, by);
}

void require_strictly_decreasing(const RealFn& f, const std::string& what) {
    double prev = f(0.5 / kDensityPoints);
    for (int i = 1; i < kDensityPoints; ++i) {
        const double p = (i + 0.5) / kDensityPoints;
        const double v = f(p);
        if (v > prev - kStrictSlack) {
            throw HypothesisFailed(what + " is not strictly decreasing near " + format_number(p), p,
                                   v - prev);
        }
        prev = v;
    }
}

IdentityReport mvt_with(const QuantileModel& x, const QuantileModel& y,
                        const unitlaw::UnitVariable& z, const TestFunction& g,
                        const Tolerances& tol) {
    Integrator integ;
    const double g1 = g.boundary_value();
    const double lhs = integ([&](double u) {
        return (g1 - g(u)) * (y.quantile_density(u) - x.quantile_density(u));
    });
    const double gap = y.mean() - x.mean();
    const double rhs = integ([&](double u) { return g.derivative(1, u) * z.density(u); }) * gap;
    std::string notes = join_notes(class_d_note(x), class_d_note(y));
    return make_report("mvt", lhs, rhs, tol, join_notes(notes, integ.note()));
}

struct Pair {
    QuantileModel a;
    QuantileModel b;
};

Pair build_pair(Application app, const QuantileModel& x, ApplicationParams prm) {
    using risk::DerivedKind;
    auto d = [&](DerivedKind k, double t) { return risk::derive(x, {k, t}); };
    switch (app) {
        case Application::Nbu: {
            const double p = prm.a;
            if (!(p > 0.0 && p < 1.0)) throw DomainError("app-nbu needs 0 < p < 1");
            require_verdict(orders::check_nbu(x), x.name() + " NBU");
            const double c = cvar_value(x, p);
            if (!(c < x.mean())) {
                throw HypothesisFailed("CVaR[X;p] >= E[X] for " + x.name(), p, c - x.mean());
            }
            return {d(DerivedKind::ResidualAtQuantile, p), x};
        }
        case Application::Ifr: {
            require_pair(prm.a, prm.b, "r < p");
            require_verdict(orders::check_ifr(x), x.name() + " IFR");
            require_strictly_decreasing([&](double p) { return cvar_value(x, p); }, "CVaR[X;p]");
            return {d(DerivedKind::ResidualAtQuantile, prm.b), d(DerivedKind::ResidualAtQuantile, prm.a)};
        }
        case Application::Risk1: {
            const double p = prm.a;
            if (!(p > 0.0 && p < 1.0)) throw DomainError("app-risk1 needs 0 < p < 1");
            auto a = d(DerivedKind::ProportionalResidual, p);
            require_verdict(orders::check_order(a, x, orders::Relation::st), "X~_p <=st X");
            const double c = cvar_value(x, p);
            const double bound = x.mean() * x.quantile(p);
            if (!(c < bound)) throw HypothesisFailed("CVaR[X;p] >= E[X] Q(p)", p, c - bound);
            return {a, x};
        }
        case Application::Risk2: {
            require_pair(prm.a, prm.b, "r < p");
            auto a = d(DerivedKind::ProportionalResidual, prm.b);
            auto b = d(DerivedKind::ProportionalResidual, prm.a);
            require_verdict(orders::check_order(a, b, orders::Relation::st), "X~_p <=st X~_r");
            require_strictly_decreasing([&](double p) { return cvar_value(x, p) / x.quantile(p); },
                                        "CVaR[X;p]/Q(p)");
            return {a, b};
        }
        case Application::Avar: {
            require_pair(prm.a, prm.b, "v < w");
            require_verdict(orders::check_xtau_decreasing(x), "x tau(x) decreasing");
            require_strictly_decreasing([&](double v) { return avar_value(x, v) / x.quantile(v); },
                                        "AVaR[X;v]/Q(v)");
            return {d(DerivedKind::StarModel, prm.a), d(DerivedKind::StarModel, prm.b)};
        }
        case Application::Hat: {
            require_pair(prm.a, prm.b, "v < w");
            if (!x.class_d()) {
                throw HypothesisFailed(x.name() + " is not in class D", 0.0, x.quantile(0.0));
            }
            return {d(DerivedKind::HatModel, prm.a), d(DerivedKind::HatModel, prm.b)};
        }
    }
    throw InvalidParameter("unknown application");
}

double max_rel_diff(const RealFn& numeric, const RealFn& reference) {
    double worst = 0.0;
    for (int i = 0; i < kDensityPoints; ++i) {
        const double u = (i + 0.5) / kDensityPoints;
        const double ref = reference(u);
        const double diff = std::abs(numeric(u) - ref);
        worst = std::max(worst, diff / std::max(std::abs(ref), 1e-300));
    }
    return worst;
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

template <class F>
Moments sample_moments(std::size_t n, F&& draw) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = draw(i);
        sum += v;
        sum_sq += v * v;
    }
    const double m = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * m * m) / (n - 1)) : 0.0;
    return {m, std::sqrt(var / n)};
}

// Seed for the second stream, so the two sides use independent draws.
std::uint64_t second_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

MonteCarloReport finish_mc(IdentityReport quad, std::size_t n, std::uint64_t seed, Moments lhs,
                           Moments rhs) {
    MonteCarloReport r;
    r.quadrature = std::move(quad);
    r.n = n;
    r.seed = seed;
    r.lhs_mc = lhs.mean;
    r.lhs_se = lhs.se;
    r.rhs_mc = rhs.mean;
    r.rhs_se = rhs.se;
    r.lhs_ok = std::abs(r.quadrature.lhs - lhs.mean) <= 4.0 * lhs.se;
    r.rhs_ok = std::abs(r.quadrature.rhs - rhs.mean) <= 4.0 * rhs.se;
    return r;
}

void require_samples(std::size_t n) {
    if (n == 0) throw InvalidSampleSize("Monte Carlo needs n >= 1");
}

}  // namespace

IdentityReport make_report(std::string id, double lhs, double rhs, const Tolerances& tol,
                           std::string notes) {
    IdentityReport r;
    r.id = std::move(id);
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_residual = scale > 0.0 ? r.abs_residual / scale : 0.0;
    r.pass = r.abs_residual <= tol.abs || r.rel_residual <= tol.rel;
    r.notes = std::move(notes);
    return r;
}

std::string csv_header() { return "identity_id,lhs,rhs,abs_res,rel_res,pass"; }

std::string csv_row(const IdentityReport& r) {
    return r.id + "," + format_number(r.lhs) + "," + format_number(r.rhs) + "," +
           format_number(r.abs_residual) + "," + format_number(r.rel_residual) + "," +
           (r.pass ? "true" : "false");
}

IdentityReport verify_taylor1(const QuantileModel& x, const TestFunction& g, const Tolerances& tol) {
    auto r = verify_taylor_n(x, g, 1, tol);
    r.id = "taylor1";
    return r;
}

IdentityReport verify_taylor_n(const QuantileModel& x, const TestFunction& g, int n,
                               const Tolerances& tol) {
    if (n < 1) throw InvalidParameter("Taylor order n must be >= 1");
    if (g.max_order() < n) {
        throw InsufficientDerivatives(g.name() + " has derivatives up to order " +
                                      std::to_string(g.max_order()) + ", n = " + std::to_string(n));
    }
    const std::string notes = class_d_note(x);
    Integrator integ;
    const double g1 = g.boundary_value();
    const double lhs = integ([&](double u) { return (g1 - g(u)) * x.quantile_density(u); });
    double rhs = 0.0;
    for (int k = 1; k < n; ++k) {
        rhs += integ([&](double u) {
                   return g.derivative(k, u) * std::pow(1.0 - u, k) * x.quantile_density(u);
               }) /
               factorial(k);
    }
    rhs += integ([&](double u) {
               return g.derivative(n, u) * std::pow(1.0 - u, n - 1) * x.quantile(u);
           }) /
           factorial(n - 1);
    return make_report("taylorN", lhs, rhs, tol, join_notes(notes, integ.note()));
}

IdentityReport verify_corollary_power(const QuantileModel& x, double alpha, int n,
                                      const Tolerances& tol) {
    if (!(alpha > 0.0)) throw InvalidParameter("corollary needs alpha > 0");
    if (n < 1) throw InvalidParameter("corollary needs n >= 1");
    const std::string notes = class_d_note(x);
    Integrator integ;
    const double lhs = integ([&](double u) { return (1.0 - std::pow(u, alpha)) * x.quantile_density(u); });
    double rhs = 0.0;
    for (int k = 1; k < n; ++k) {
        const double c = generalized_binomial(alpha, k);
        if (c == 0.0) continue;
        rhs += c * integ([&](double u) {
                   return std::pow(u, alpha - k) * std::pow(1.0 - u, k) * x.quantile_density(u);
               });
    }
    const double cn = n * generalized_binomial(alpha, n);
    if (cn != 0.0) {
        rhs += cn * integ([&](double u) {
                   return std::pow(u, alpha - n) * std::pow(1.0 - u, n - 1) * x.quantile(u);
               });
    }
    return make_report("corollary", lhs, rhs, tol, join_notes(notes, integ.note()));
}

std::vector<IdentityReport> verify_corollary_examples(const QuantileModel& x, const Tolerances& tol) {
    const std::string notes = class_d_note(x);
    Integrator integ;
    auto q = [&](double u) { return x.quantile_density(u); };
    auto Q = [&](double u) { return x.quantile(u); };
    std::vector<IdentityReport> out;
    out.push_back(make_report("corollary-alpha1", integ([&](double u) { return (1 - u) * q(u); }),
                              integ(Q), tol, notes));
    out.push_back(make_report("corollary-alpha2-a", integ([&](double u) { return (1 - u * u) * q(u); }),
                              2.0 * integ([&](double u) { return u * Q(u); }), tol, notes));
    out.push_back(make_report("corollary-alpha2-b",
                              integ([&](double u) { return (1 - u) * (1 - u) * q(u); }),
                              2.0 * integ([&](double u) { return (1 - u) * Q(u); }), tol, notes));
    return out;
}

IdentityReport verify_mvt(const QuantileModel& x, const QuantileModel& y, const TestFunction& g,
                          const Tolerances& tol) {
    const auto z = unitlaw::psi_L(x, y);
    return mvt_with(x, y, z, g, tol);
}

Phi phi_from_model(const QuantileModel& x) {
    return {"Q of " + x.name(), [x](double u) { return x.quantile(u); },
            [x](double u) { return x.quantile_density(u); }};
}

Phi phi_power(double beta) {
    if (!(beta > 0.0)) throw InvalidParameter("phi_power needs beta > 0");
    return {"u^(1/" + format_number(beta) + ")", [beta](double u) { return std::pow(u, 1.0 / beta); },
            [beta](double u) { return std::pow(u, 1.0 / beta - 1.0) / beta; }};
}

Phi phi_pareto(double beta) {
    if (!(beta > 1.0)) throw InvalidParameter("phi_pareto needs beta > 1 for a finite eta");
    return {"(1-u)^(-1/" + format_number(beta) + ")",
            [beta](double u) { return std::pow(1.0 - u, -1.0 / beta); },
            [beta](double u) { return std::pow(1.0 - u, -1.0 / beta - 1.0) / beta; }};
}

IdentityReport verify_proportional(const Phi& phi, const TestFunction& g, const Tolerances& tol) {
    for (int i = 0; i < kDensityPoints; ++i) {
        const double u = (i + 0.5) / kDensityPoints;
        const double d = phi.derivative(u);
        if (!(d >= 0.0)) {
            throw NonMonotonePhi(phi.name + " has phi'(" + format_number(u) + ") = " + format_number(d));
        }
    }
    Integrator integ;
    const double eta = integ(phi.value);
    const double g1 = g.boundary_value();
    const double lhs = integ([&](double u) { return (g1 - g(u)) * phi.derivative(u); });
    const double expect = integ([&](double u) { return g.derivative(1, u) * phi.value(u) / eta; });
    const double rhs = eta * expect;
    std::string notes = "eta = " + format_number(eta);
    const double phi0 = phi.value(0.0);
    if (phi0 != 0.0) {
        notes += "; phi(0+) = " + format_number(phi0) +
                 " != 0, so rhs - lhs = phi(0+)(g(1)-g(0)) = " +
                 format_number(phi0 * (g1 - g(0.0)));
    }
    return make_report("proportional", lhs, rhs, tol, join_notes(notes, integ.note()));
}

Application parse_application(const std::string& id) {
    if (id == "app-nbu") return Application::Nbu;
    if (id == "app-ifr") return Application::Ifr;
    if (id == "app-risk1") return Application::Risk1;
    if (id == "app-risk2") return Application::Risk2;
    if (id == "app-avar") return Application::Avar;
    if (id == "app-hat") return Application::Hat;
    throw ParseError("unknown application '" + id + "'");
}

std::string to_string(Application app) {
    switch (app) {
        case Application::Nbu: return "app-nbu";
        case Application::Ifr: return "app-ifr";
        case Application::Risk1: return "app-risk1";
        case Application::Risk2: return "app-risk2";
        case Application::Avar: return "app-avar";
        case Application::Hat: return "app-hat";
    }
    return "?";
}

RealFn closed_form_density(Application app, const QuantileModel& x, ApplicationParams prm) {
    auto Q = [x](double u) { return x.quantile(u); };
    switch (app) {
        case Application::Nbu: {
            const double p = prm.a;
            const double den = x.mean() - cvar_value(x, p);
            const double qp = Q(p);
            return [=](double u) { return (Q(u) + qp - Q(lift_level(u, p))) / den; };
        }
        case Application::Ifr: {
            const double r = prm.a, p = prm.b;
            const double den = cvar_value(x, r) - cvar_value(x, p);
            const double qr = Q(r), qp = Q(p);
            return [=](double u) {
                return (Q(lift_level(u, r)) - qr - Q(lift_level(u, p)) + qp) / den;
            };
        }
        case Application::Risk1: {
            const double p = prm.a;
            const double qp = Q(p);
            const double den = x.mean() * qp - cvar_value(x, p);
            return [=](double u) { return ((1.0 + Q(u)) * qp - Q(lift_level(u, p))) / den; };
        }
        case Application::Risk2: {
            const double r = prm.a, p = prm.b;
            const double qr = Q(r), qp = Q(p);
            const double den = qp * cvar_value(x, r) - qr * cvar_value(x, p);
            return [=](double u) { return (qp * Q(lift_level(u, r)) - qr * Q(lift_level(u, p))) / den; };
        }
        case Application::Avar: {
            const double v = prm.a, w = prm.b;
            const double qv = Q(v), qw = Q(w);
            const double den = avar_value(x, v) / qv - avar_value(x, w) / qw;
            return [=](double u) { return (x.cdf(qw * u) / w - x.cdf(qv * u) / v) / den; };
        }
        case Application::Hat: {
            const double v = prm.a, w = prm.b;
            const double qv = Q(v), qw = Q(w);
            const double den = w * (1.0 - avar_value(x, w) / qw) - v * (1.0 - avar_value(x, v) / qv);
            return [=](double u) { return (x.cdf(qw * u) - x.cdf(qv * u)) / den; };
        }
    }
    throw InvalidParameter("unknown application");
}

double density_rayleigh_risk(double r, double p, double u) {
    const double lr = std::log1p(-r);
    const double lp = std::log1p(-p);
    const double lu = std::log1p(-u);
    const double num = 2.0 * (1.0 - p) * (1.0 - r) *
                       (std::sqrt(lr * (lp + lu)) - std::sqrt(lp * (lr + lu)));
    const double den = std::sqrt(kPi) * ((1.0 - r) * numerics::erfc(std::sqrt(-lp)) * std::sqrt(-lr) -
                                         (1.0 - p) * numerics::erfc(std::sqrt(-lr)) * std::sqrt(-lp));
    return num / den;
}

double density_frechet_star(double v, double w, double u) {
    const double den = numerics::log_integral(v) * std::log(v) / v -
                       numerics::log_integral(w) * std::log(w) / w;
    return (std::pow(w, 1.0 / u - 1.0) - std::pow(v, 1.0 / u - 1.0)) / den;
}

double density_exponential_hat(double v, double w, double u) {
    const double den = w / std::log1p(-w) - v / std::log1p(-v);
    return (std::pow(1.0 - v, u) - std::pow(1.0 - w, u)) / den;
}

ApplicationReport verify_application(Application app, const QuantileModel& x,
                                     ApplicationParams params, const TestFunction& g,
                                     const Tolerances& tol) {
    const Pair pair = build_pair(app, x, params);
    const auto z = unitlaw::psi_L(pair.a, pair.b);
    ApplicationReport out;
    out.identity = mvt_with(pair.a, pair.b, z, g, tol);
    out.identity.id = to_string(app);
    out.pair = "Psi^L(" + pair.a.name() + ", " + pair.b.name() + ")";
    const RealFn numeric = [&](double u) { return z.density(u); };
    out.density_max_rel = max_rel_diff(numeric, closed_form_density(app, x, params));
    out.density_pass = out.density_max_rel <= 1e-6;

    const auto& fam = x.family();
    RealFn example;
    if (fam && app == Application::Risk2 && std::holds_alternative<family::Rayleigh>(*fam)) {
        out.example_density = "Rayleigh proportional residual closed form";
        example = [&](double u) { return density_rayleigh_risk(params.a, params.b, u); };
    } else if (fam && app == Application::Avar && std::holds_alternative<family::FrechetType>(*fam) &&
               std::get<family::FrechetType>(*fam).gamma == 1.0) {
        out.example_density = "Frechet (gamma = 1) star closed form with li";
        example = [&](double u) { return density_frechet_star(params.a, params.b, u); };
    } else if (fam && app == Application::Hat && std::holds_alternative<family::Exponential>(*fam)) {
        out.example_density = "exponential hat closed form";
        example = [&](double u) { return density_exponential_hat(params.a, params.b, u); };
    }
    if (example) {
        out.example_max_rel = max_rel_diff(numeric, example);
        out.density_pass = out.density_pass && out.example_max_rel <= 1e-6;
    }
    return out;
}

MonteCarloReport monte_carlo_taylor1(const QuantileModel& x, const TestFunction& g, std::size_t n,
                                     std::uint64_t seed) {
    require_samples(n);
    auto quad = verify_taylor1(x, g);
    const double g1 = g.boundary_value();
    std::mt19937_64 rng(seed);
    const Moments lhs = sample_moments(n, [&](std::size_t) {
        const double u = unitlaw::unit_from_bits(rng());
        return (g1 - g(u)) * x.quantile_density(u);
    });
    const auto lift = unitlaw::lift_XL(x);
    const auto zs = unitlaw::sample(lift, n, second_seed(seed));
    const double mean = x.mean();
    const Moments rhs = sample_moments(n, [&](std::size_t i) { return g.derivative(1, zs[i]) * mean; });
    return finish_mc(std::move(quad), n, seed, lhs, rhs);
}

MonteCarloReport monte_carlo_mvt(const QuantileModel& x, const QuantileModel& y,
                                 const TestFunction& g, std::size_t n, std::uint64_t seed) {
    require_samples(n);
    const auto z = unitlaw::psi_L(x, y);
    auto quad = mvt_with(x, y, z, g, {});
    const double g1 = g.boundary_value();
    std::mt19937_64 rng(seed);
    const Moments lhs = sample_moments(n, [&](std::size_t) {
        const double u = unitlaw::unit_from_bits(rng());
        return (g1 - g(u)) * (y.quantile_density(u) - x.quantile_density(u));
    });
    const auto zs = unitlaw::sample(z, n, second_seed(seed));
    const double gap = y.mean() - x.mean();
    const Moments rhs = sample_moments(n, [&](std::size_t i) { return g.derivative(1, zs[i]) * gap; });
    return finish_mc(std::move(quad), n, seed, lhs, rhs);
}

}  // namespace qcalc::identities
