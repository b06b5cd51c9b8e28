#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcalc/distributions.hpp"
#include "qcalc/test_function.hpp"

namespace qcalc::identities {

struct Tolerances {
    double abs = 1e-6;
    double rel = 1e-6;
};

/// Both sides of one identity and their agreement. pass iff
/// abs_residual <= tol.abs or rel_residual <= tol.rel.
struct IdentityReport {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;  ///< abs_residual / max(|lhs|, |rhs|), 0 when both vanish
    bool pass = false;
    std::string notes;
};

IdentityReport make_report(std::string id, double lhs, double rhs, const Tolerances& tol = {},
                           std::string notes = "");

/// `identity_id,lhs,rhs,abs_res,rel_res,pass`
std::string csv_header();
std::string csv_row(const IdentityReport& r);

/// E[{g(1) - g(U)} q(U)] = E[g'(X^L)] E[X]. The right side is evaluated as
/// int_0^1 g'(u) Q(u) du. For X outside class D the report is still
/// computed and the notes name the missing hypothesis.
IdentityReport verify_taylor1(const QuantileModel& x, const TestFunction& g,
                              const Tolerances& tol = {});

/// n-th order version: the left side as above, the right side
///   sum_{k=1}^{n-1} (1/k!) int g^(k)(u) (1-u)^k q(u) du
///   + (1/(n-1)!) int g^(n)(u) (1-u)^{n-1} Q(u) du.
/// n = 1 reproduces verify_taylor1 exactly. Throws InsufficientDerivatives
/// when g.max_order() < n.
IdentityReport verify_taylor_n(const QuantileModel& x, const TestFunction& g, int n,
                               const Tolerances& tol = {});

/// The n-th order identity for g(u) = u^alpha, written with generalized
/// binomial coefficients instead of the derivatives of g.
IdentityReport verify_corollary_power(const QuantileModel& x, double alpha, int n,
                                      const Tolerances& tol = {});

/// The three worked cases: E[(1-U) q] = E[Q], E[(1-U^2) q] = 2 E[U Q] and
/// E[(1-U)^2 q] = 2 E[(1-U) Q].
std::vector<IdentityReport> verify_corollary_examples(const QuantileModel& x,
                                                      const Tolerances& tol = {});

/// E[{g(1)-g(U)}{q_Y(U)-q_X(U)}] = E[g'(Z^L)] (E[Y] - E[X]) with
/// Z^L = Psi^L(X, Y). Throws NotStochasticallyOrdered or EqualMeans.
IdentityReport verify_mvt(const QuantileModel& x, const QuantileModel& y, const TestFunction& g,
                          const Tolerances& tol = {});

/// The common shape phi of a proportional pair Q_X = a phi, Q_Y = b phi.
struct Phi {
    std::string name;
    RealFn value;
    RealFn derivative;
};

/// phi = Q_X, phi' = q_X.
Phi phi_from_model(const QuantileModel& x);
/// u^{1/beta}, the power-law shape.
Phi phi_power(double beta);
/// (1-u)^{-1/beta}, the Pareto shape (phi(0) = 1).
Phi phi_pareto(double beta);

/// E[{g(1)-g(U)} phi'(U)] = eta E[g'(Z^L)], f_{Z^L} = phi / eta,
/// eta = int phi. Throws NonMonotonePhi if phi' < 0 on the check grid.
/// The identity needs phi(0+) = 0; otherwise the two sides differ by
/// phi(0+) (g(1) - g(0)), which the notes report.
IdentityReport verify_proportional(const Phi& phi, const TestFunction& g,
                                   const Tolerances& tol = {});

enum class Application { Nbu, Ifr, Risk1, Risk2, Avar, Hat };

/// "app-nbu", "app-ifr", "app-risk1", "app-risk2", "app-avar", "app-hat".
Application parse_application(const std::string& id);
std::string to_string(Application app);

/// Parameters of an application pair. Nbu and Risk1 use `a` = p; Ifr and
/// Risk2 use (a, b) = (r, p) with r < p; Avar and Hat use (a, b) = (v, w)
/// with v < w.
struct ApplicationParams {
    double a = 0.0;
    double b = 0.0;
};

struct ApplicationReport {
    IdentityReport identity;
    std::string pair;               ///< the ordered pair handed to Psi^L
    double density_max_rel = 0.0;   ///< numeric vs closed-form density, 64 points
    bool density_pass = false;
    /// Set when a family-specific closed form was also compared.
    std::string example_density;
    double example_max_rel = 0.0;
};

/// Builds the application's ordered pair with risk::derive, gates on its
/// hypothesis (throwing HypothesisFailed with a witness), applies
/// verify_mvt, and compares the numeric Z^L density with the closed form.
///
///   Nbu    (X_{Q(p)}, X)           X NBU, CVaR[X;p] < E[X]
///   Ifr    (X_{Q(p)}, X_{Q(r)})    X IFR, CVaR strictly decreasing
///   Risk1  (X~_p, X)               X~_p <=st X, CVaR[X;p] < E[X] Q(p)
///   Risk2  (X~_p, X~_r)            X~_p <=st X~_r, CVaR/Q strictly decreasing
///   Avar   (X*_v, X*_w)            x tau(x) decreasing, AVaR/Q strictly decreasing
///   Hat    (X^_v, X^_w)            X in class D
///
/// "Strictly decreasing" is checked on 64 midpoints with slack 1e-10.
ApplicationReport verify_application(Application app, const QuantileModel& x,
                                     ApplicationParams params, const TestFunction& g,
                                     const Tolerances& tol = {});

/// The closed-form Z^L density for the pair above.
RealFn closed_form_density(Application app, const QuantileModel& x, ApplicationParams params);

/// Family-specific closed forms. Rayleigh, proportional residuals
/// at r < p (independent of alpha):
double density_rayleigh_risk(double r, double p, double u);
/// Frechet with gamma = 1, star models at v < w (independent of c), using li:
double density_frechet_star(double v, double w, double u);
/// Exponential, hat models at v < w (independent of lambda):
double density_exponential_hat(double v, double w, double u);

struct MonteCarloReport {
    IdentityReport quadrature;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double lhs_mc = 0.0;
    double lhs_se = 0.0;
    double rhs_mc = 0.0;
    double rhs_se = 0.0;
    bool lhs_ok = false;  ///< |quadrature - MC| <= 4 SE on the left side
    bool rhs_ok = false;
    bool pass() const { return lhs_ok && rhs_ok; }
};

/// Left side from n uniforms, right side from n draws of X^L via
/// unitlaw::sample. Throws InvalidSampleSize when n = 0.
MonteCarloReport monte_carlo_taylor1(const QuantileModel& x, const TestFunction& g, std::size_t n,
                                     std::uint64_t seed);

/// As above for the mean value identity, with draws of Z^L = Psi^L(X, Y).
MonteCarloReport monte_carlo_mvt(const QuantileModel& x, const QuantileModel& y,
                                 const TestFunction& g, std::size_t n, std::uint64_t seed);

}  // namespace qcalc::identities
