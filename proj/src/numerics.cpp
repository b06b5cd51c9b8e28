#include "qcalc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "qcalc/errors.hpp"

namespace qcalc::numerics {

namespace {

// Kronrod 21-point abscissae on [-1, 1] (non-negative half) and weights; the
// odd-indexed abscissae are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980376052, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// Smoothstep of order 5: w(0)=0, w(1)=1, w'(t) = 30 t^2 (1-t)^2.
double smooth_map(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smooth_jacobian(double t) {
    const double s = t * (1.0 - t);
    return 30.0 * s * s;
}

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Segment& a, const Segment& b) const { return a.error < b.error; }
};

// Integrand pulled back to t in (0, 1).
class Pullback {
public:
    Pullback(const RealFn& f, double a, double b, double shrink)
        : f_(f), a_(a), b_(b), width_(b - a), shrink_(shrink) {}

    double operator()(double t) const {
        // The pulled-back integrand is bounded, so clipping in t costs at most
        // shrink times its bound.
        if (t < shrink_ || t > 1.0 - shrink_) return 0.0;
        const double jac = smooth_jacobian(t);
        // Distance to the nearer endpoint is formed directly so that abscissae
        // close to b keep their precision: 1 - w(t) = w(1 - t).
        const double x =
            t <= 0.5 ? a_ + width_ * smooth_map(t) : b_ - width_ * smooth_map(1.0 - t);
        // Below floating-point resolution of the endpoint.
        if (!(x > a_ && x < b_)) return 0.0;
        const double y = f_(x);
        if (!std::isfinite(y)) {
            std::ostringstream os;
            os << "integrand is not finite at x=" << x;
            throw NonFiniteEvaluation(os.str(), x);
        }
        return y * jac * width_;
    }

private:
    const RealFn& f_;
    double a_;
    double b_;
    double width_;
    double shrink_;
};

Segment kronrod(const Pullback& g, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = g(center);
    double resg = 0.0;
    double resk = fc * kWgk[10];
    double resabs = std::abs(resk);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = g(center - dx);
        f2[j] = g(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    }
    resk *= half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    return {lo, hi, resk, err};
}

IntegralResult integrate_unit(const Pullback& g, const QuadratureSpec& spec) {
    std::priority_queue<Segment, std::vector<Segment>, ByError> active;
    std::vector<Segment> frozen;  // too narrow to bisect further
    constexpr int kInitial = 4;
    for (int i = 0; i < kInitial; ++i) {
        active.push(kronrod(g, static_cast<double>(i) / kInitial,
                            static_cast<double>(i + 1) / kInitial));
    }
    int count = kInitial;

    auto totals = [&]() {
        double value = 0.0;
        double error = 0.0;
        auto copy = active;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        for (const auto& s : frozen) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };

    double value = 0.0;
    double error = 0.0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) && !active.empty()) {
        if (count + 1 > spec.max_subdivisions) break;
        Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi) || (worst.hi - worst.lo) < 64.0 * kEps) {
            frozen.push_back(worst);
            continue;
        }
        Segment left = kronrod(g, worst.lo, mid);
        Segment right = kronrod(g, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
        ++count;
    }
    // Re-sum to shed drift from the running updates.
    auto [v, e] = totals();
    IntegralResult out;
    out.value = v;
    out.error_estimate = e;
    out.subdivisions_used = count;
    out.converged = e <= std::max(spec.abs_tol, spec.rel_tol * std::abs(v));
    return out;
}

// Continued fraction for Gamma(a, x) (modified Lentz), valid for x > 0.
double gamma_cf(double a, double x) {
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return std::exp(-x + a * std::log(x)) * h;
    }
    throw NonConvergence("incomplete gamma continued fraction did not converge");
}

// Gamma(a, x) = Gamma(a) (1 - P(a, x)) with the series for P; a > 0.
double gamma_series_upper(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            const double lower_reg = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
            return std::tgamma(a) * (1.0 - lower_reg);
        }
    }
    throw NonConvergence("incomplete gamma series did not converge");
}

double gamma_positive(double a, double x) {
    return x < a + 1.0 ? gamma_series_upper(a, x) : gamma_cf(a, x);
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) throw InvalidParameter("max_subdivisions must be at least 1");
    if (!(endpoint_shrink > 0.0) || !(endpoint_shrink < 1e-3)) {
        throw InvalidParameter("endpoint_shrink must lie in (0, 1e-3)");
    }
}

QuadratureSpec fine_quadrature() {
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-12;
    return spec;
}

IntegralResult integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(a) || std::isnan(b) || !(a < b)) {
        throw DomainError("integrate requires a < b");
    }
    if (!std::isfinite(a)) throw DomainError("integrate requires a finite lower limit");
    if (std::isinf(b)) {
        RealFn folded = [&f, a](double s) {
            const double rest = 1.0 - s;
            return f(a + s / rest) / (rest * rest);
        };
        return integrate_unit(Pullback(folded, 0.0, 1.0, spec.endpoint_shrink), spec);
    }
    return integrate_unit(Pullback(f, a, b, spec.endpoint_shrink), spec);
}

double integrate_value(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
    const IntegralResult r = integrate(f, a, b, spec);
    if (!r.converged) {
        std::ostringstream os;
        os << "quadrature on (" << a << ", " << b << ") did not converge: value=" << r.value
           << " error=" << r.error_estimate;
        throw NonConvergence(os.str());
    }
    return r.value;
}

double find_root(const RealFn& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw InvalidParameter("root tolerance must be positive");
    double a = lo;
    double b = hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream os;
        os << "f(" << lo << ")=" << fa << " and f(" << hi << ")=" << fb << " share a sign";
        throw InvalidBracket(os.str());
    }
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p = 0.0;
            double q = 0.0;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw NonConvergence("find_root exceeded its iteration budget");
}

double erfc(double x) { return std::erfc(x); }

double expint_e1(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("E1 requires x > 0");
    if (x >= 1.0) return gamma_cf(0.0, x);
    constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
}

double upper_incomplete_gamma(double a, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Gamma(a, x) requires x > 0");
    if (!std::isfinite(a)) throw DomainError("Gamma(a, x) requires finite a");
    if (a > 0.0) return gamma_positive(a, x);
    if (x >= 1.0) return gamma_cf(a, x);

    // Lift a to a + k > 0.5 (or to 0 for non-positive integers), then run the
    // recurrence Gamma(s, x) = (Gamma(s + 1, x) - x^s e^{-x}) / s downwards.
    const bool integer_order = a == std::floor(a);
    double start = 0.0;
    double value = 0.0;
    if (integer_order) {
        start = 0.0;
        value = expint_e1(x);
    } else {
        start = a + std::ceil(0.5 - a);
        value = gamma_positive(start, x);
    }
    const double log_x = std::log(x);
    for (double s = start - 1.0; s >= a - 0.5; s -= 1.0) {
        value = (value - std::exp(s * log_x - x)) / s;
    }
    return value;
}

double log_integral(double x) {
    if (!(x > 0.0) || !(x < 1.0)) throw DomainError("log_integral requires 0 < x < 1");
    return -expint_e1(-std::log(x));
}

}  // namespace qcalc::numerics
