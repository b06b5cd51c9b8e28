#include "qcalc/orders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "qcalc/errors.hpp"
#include "text.hpp"

namespace qcalc::orders {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFloor = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_grid(int grid) {
    if (grid < 2) throw InvalidParameter("order checks need a grid of at least 2 points");
}

Verdict make_verdict(Status status, int grid, double tol, std::string detail) {
    Verdict v;
    v.status = status;
    v.grid_size = grid;
    v.tolerance = tol;
    v.detail = std::move(detail);
    return v;
}

// Below the floor the ratio is undefined (0/0) or unbounded (x/0).
double ratio_or_nan(double num, double den) {
    if (den > kFloor) return num / den;
    return num > kFloor ? std::numeric_limits<double>::infinity() : kNaN;
}

std::vector<double> x_grid(const QuantileModel& x, const QuantileModel& y, int grid) {
    const double lo = std::min(x.quantile(1e-4), y.quantile(1e-4));
    const double hi = std::max(x.quantile(1.0 - 1e-4), y.quantile(1.0 - 1e-4));
    std::vector<double> out(grid);
    if (lo > 0.0) {
        const double a = std::log(lo);
        const double b = std::log(hi);
        for (int i = 0; i < grid; ++i) out[i] = std::exp(a + (b - a) * i / (grid - 1));
    } else {
        for (int i = 0; i < grid; ++i) out[i] = lo + (hi - lo) * i / (grid - 1);
    }
    return out;
}

// Partial integrals of f at each grid point: from 0 (lower) and to 1 (upper).
struct Partials {
    std::vector<double> lower;
    std::vector<double> upper;
};

Partials partial_integrals(const RealFn& f, const std::vector<double>& grid) {
    const auto spec = numerics::fine_quadrature();
    const std::size_t n = grid.size();
    std::vector<double> cell(n + 1);
    cell[0] = numerics::integrate(f, 0.0, grid[0], spec).value;
    for (std::size_t i = 1; i < n; ++i) cell[i] = numerics::integrate(f, grid[i - 1], grid[i], spec).value;
    cell[n] = numerics::integrate(f, grid[n - 1], 1.0, spec).value;
    Partials p;
    p.lower.resize(n);
    p.upper.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += cell[i];
        p.lower[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        acc += cell[i + 1];
        p.upper[i] = acc;
    }
    return p;
}

std::string label(Relation rel, const std::string& a, const std::string& b) {
    return a + " <=" + to_string(rel) + " " + b;
}

}  // namespace

Relation parse_relation(const std::string& name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "st") return Relation::st;
    if (s == "hr") return Relation::hr;
    if (s == "rh") return Relation::rh;
    if (s == "lr") return Relation::lr;
    if (s == "star" || s == "*") return Relation::star;
    if (s == "ps") return Relation::ps;
    if (s == "rps") return Relation::rps;
    throw ParseError("unknown order relation '" + name + "'");
}

std::string to_string(Relation rel) {
    switch (rel) {
        case Relation::st: return "st";
        case Relation::hr: return "hr";
        case Relation::rh: return "rh";
        case Relation::lr: return "lr";
        case Relation::star: return "star";
        case Relation::ps: return "PS";
        case Relation::rps: return "RPS";
    }
    return "?";
}

std::string to_string(Status status) {
    switch (status) {
        case Status::HoldsOnGrid: return "HoldsOnGrid";
        case Status::Fails: return "Fails";
        case Status::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::vector<double> chebyshev_grid(int grid) {
    require_grid(grid);
    std::vector<double> out(grid);
    for (int k = 0; k < grid; ++k) out[k] = 0.5 * (1.0 - std::cos(kPi * (k + 0.5) / grid));
    return out;
}

Verdict check_decreasing(const std::vector<double>& locations, const std::vector<double>& values,
                         double tol) {
    const int n = static_cast<int>(values.size());
    int valid = 0;
    double prev = kNaN;
    for (int i = 0; i < n; ++i) {
        const double v = values[i];
        if (std::isnan(v)) continue;
        ++valid;
        if (!std::isnan(prev)) {
            const double excess = v - prev - tol * std::max(1.0, std::abs(prev));
            if (excess > 0.0) {
                Verdict out = make_verdict(Status::Fails, n, tol, "");
                out.witness = Witness{locations[i], v - prev};
                std::ostringstream os;
                os << "increases by " << text::format_number(v - prev) << " at "
                   << text::format_number(locations[i]);
                out.detail = os.str();
                return out;
            }
        }
        prev = v;
    }
    if (valid < 2) return make_verdict(Status::Inconclusive, n, tol, "fewer than two evaluable points");
    return make_verdict(Status::HoldsOnGrid, n, tol, "nonincreasing on grid");
}

Verdict check_order(const QuantileModel& x, const QuantileModel& y, Relation rel, int grid,
                    double tol) {
    require_grid(grid);
    Verdict out;
    switch (rel) {
        case Relation::st: {
            const auto u = chebyshev_grid(grid);
            for (double p : u) {
                const double qy = y.quantile(p);
                const double excess = x.quantile(p) - qy;
                if (excess > tol * std::max(1.0, std::abs(qy))) {
                    out = make_verdict(Status::Fails, grid, tol, "");
                    out.witness = Witness{p, excess};
                    std::ostringstream os;
                    os << "Q_X - Q_Y = " << text::format_number(excess) << " at u="
                       << text::format_number(p);
                    out.detail = os.str();
                    break;
                }
            }
            if (!out.witness) out = make_verdict(Status::HoldsOnGrid, grid, tol, "Q_X <= Q_Y on grid");
            break;
        }
        case Relation::star: {
            const auto u = chebyshev_grid(grid);
            std::vector<double> r(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) r[i] = ratio_or_nan(x.quantile(u[i]), y.quantile(u[i]));
            out = check_decreasing(u, r, tol);
            break;
        }
        case Relation::ps:
        case Relation::rps: {
            const auto u = chebyshev_grid(grid);
            const auto px = partial_integrals([&](double t) { return x.quantile(t); }, u);
            const auto py = partial_integrals([&](double t) { return y.quantile(t); }, u);
            const auto& a = rel == Relation::ps ? px.upper : px.lower;
            const auto& b = rel == Relation::ps ? py.upper : py.lower;
            std::vector<double> r(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) r[i] = ratio_or_nan(a[i], b[i]);
            out = check_decreasing(u, r, tol);
            break;
        }
        case Relation::hr:
        case Relation::rh:
        case Relation::lr: {
            if (rel == Relation::lr && (!x.has_pdf() || !y.has_pdf())) {
                throw MissingDensity("lr order needs densities of both " + x.name() + " and " + y.name());
            }
            const auto g = x_grid(x, y, grid);
            std::vector<double> r(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double t = g[i];
                if (rel == Relation::hr) r[i] = ratio_or_nan(x.survival(t), y.survival(t));
                if (rel == Relation::rh) r[i] = ratio_or_nan(x.cdf(t), y.cdf(t));
                if (rel == Relation::lr) r[i] = ratio_or_nan(x.pdf(t), y.pdf(t));
            }
            out = check_decreasing(g, r, tol);
            break;
        }
    }
    out.detail = label(rel, x.name(), y.name()) + ": " + out.detail;
    return out;
}

Verdict check_unit_order(const unitlaw::UnitVariable& a, const unitlaw::UnitVariable& b,
                         Relation rel, int grid, double tol) {
    const auto u = chebyshev_grid(grid);
    const std::string name = label(rel, a.provenance(), b.provenance());
    RealFn da = [&](double t) { return a.density(t); };
    RealFn db = [&](double t) { return b.density(t); };
    Verdict out;
    switch (rel) {
        case Relation::st: {
            const auto pa = partial_integrals(da, u);
            const auto pb = partial_integrals(db, u);
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double excess = pb.lower[i] - pa.lower[i];
                if (excess > tol) {
                    out = make_verdict(Status::Fails, grid, tol, "");
                    out.witness = Witness{u[i], excess};
                    out.detail = "F_B - F_A = " + text::format_number(excess) + " at u=" +
                                 text::format_number(u[i]);
                    break;
                }
            }
            if (!out.witness) out = make_verdict(Status::HoldsOnGrid, grid, tol, "F_A >= F_B on grid");
            break;
        }
        case Relation::hr:
        case Relation::rh: {
            const auto pa = partial_integrals(da, u);
            const auto pb = partial_integrals(db, u);
            const auto& na = rel == Relation::hr ? pa.upper : pa.lower;
            const auto& nb = rel == Relation::hr ? pb.upper : pb.lower;
            std::vector<double> r(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) r[i] = ratio_or_nan(na[i], nb[i]);
            out = check_decreasing(u, r, tol);
            break;
        }
        case Relation::lr: {
            std::vector<double> r(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) r[i] = ratio_or_nan(a.density(u[i]), b.density(u[i]));
            out = check_decreasing(u, r, tol);
            break;
        }
        default:
            throw InvalidParameter("unit-interval order checks support st, hr, rh and lr only");
    }
    out.detail = name + ": " + out.detail;
    return out;
}

Verdict check_nbu(const QuantileModel& x, int grid, double tol) {
    const auto u = chebyshev_grid(grid);
    std::vector<double> q(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) q[i] = x.quantile(u[i]);
    double worst = 0.0;
    std::optional<Witness> w;
    std::string where;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i; j < u.size(); ++j) {
            const double lhs = x.survival(q[i] + q[j]);
            const double rhs = (1.0 - u[i]) * (1.0 - u[j]);
            if (lhs - rhs > tol && lhs - rhs > worst) {
                worst = lhs - rhs;
                w = Witness{u[i], lhs - rhs};
                where = "p=" + text::format_number(u[i]) + ", r=" + text::format_number(u[j]);
            }
        }
    }
    const std::string name = x.name() + " NBU";
    if (w) {
        Verdict out = make_verdict(Status::Fails, grid, tol,
                                   name + ": Fbar(Q(p)+Q(r)) exceeds (1-p)(1-r) by " +
                                       text::format_number(worst) + " at " + where);
        out.witness = w;
        return out;
    }
    return make_verdict(Status::HoldsOnGrid, grid, tol, name + ": holds on grid");
}

Verdict check_ifr(const QuantileModel& x, int grid, double tol) {
    const auto u = chebyshev_grid(grid);
    std::vector<double> q(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) q[i] = x.quantile(u[i]);
    const std::string name = x.name() + " IFR";
    for (std::size_t s = 0; s < u.size(); ++s) {
        double running_min = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < u.size(); ++p) {
            const double sf = x.survival(q[s] + q[p]);
            if (!(sf > 1e-300)) continue;
            const double h = sf / (1.0 - u[p]);
            if (h > running_min * (1.0 + tol)) {
                Verdict out = make_verdict(
                    Status::Fails, grid, tol,
                    name + ": Fbar(Q(s)+Q(p))/(1-p) increases at s=" + text::format_number(u[s]) +
                        ", p=" + text::format_number(u[p]));
                out.witness = Witness{u[p], h / running_min - 1.0};
                return out;
            }
            running_min = std::min(running_min, h);
        }
    }
    return make_verdict(Status::HoldsOnGrid, grid, tol, name + ": holds on grid");
}

Verdict check_xtau_decreasing(const QuantileModel& x, int grid, double tol) {
    if (!x.has_pdf()) throw MissingDensity(x.name() + " carries no density for x tau(x)");
    const auto g = x_grid(x, x, grid);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double f = x.cdf(g[i]);
        v[i] = f > 1e-300 ? g[i] * x.pdf(g[i]) / f : kNaN;
    }
    Verdict out = check_decreasing(g, v, tol);
    out.detail = x.name() + " x tau(x) decreasing: " + out.detail;
    return out;
}

ImplicationReport implication_suite(const QuantileModel& x, const QuantileModel& y, int grid,
                                    double tol) {
    const auto lx = unitlaw::lift_XL(x);
    const auto ly = unitlaw::lift_XL(y);
    ImplicationReport report;
    std::optional<unitlaw::UnitVariable> z;
    try {
        z = unitlaw::psi_L(x, y);
        report.st_holds = true;
    } catch (const NotStochasticallyOrdered&) {
    } catch (const EqualMeans&) {
    }

    struct Part {
        const char* tag;
        Relation antecedent;
        Relation consequent;
    };
    const Part parts[] = {{"(i)", Relation::star, Relation::lr},
                          {"(ii)", Relation::ps, Relation::hr},
                          {"(iii)", Relation::rps, Relation::rh}};
    for (const auto& part : parts) {
        const Verdict ant = check_order(x, y, part.antecedent, grid, tol);
        for (int which = 0; which < 2; ++which) {
            const auto& lift = which == 0 ? lx : ly;
            ImplicationRow row;
            row.label = std::string(part.tag) + " X <=" + to_string(part.antecedent) + " Y => " +
                        (which == 0 ? "X^L" : "Y^L") + " <=" + to_string(part.consequent) + " Z^L";
            row.antecedent = ant.status;
            if (!z) {
                row.applicable = false;
            } else {
                row.consequent = check_unit_order(lift, *z, part.consequent, grid, tol).status;
                row.violation = ant.holds() && row.consequent == Status::Fails;
            }
            report.rows.push_back(row);
        }
    }

    const Status s_xy = check_unit_order(lx, ly, Relation::st, grid, tol).status;
    report.rows.push_back({"(iv) X^L <=st Y^L", std::nullopt, s_xy, true, false});
    if (z) {
        const Status s_xz = check_unit_order(lx, *z, Relation::st, grid, tol).status;
        const Status s_yz = check_unit_order(ly, *z, Relation::st, grid, tol).status;
        report.rows.push_back({"(iv) X^L <=st Z^L", std::nullopt, s_xz, true, false});
        report.rows.push_back({"(iv) Y^L <=st Z^L", std::nullopt, s_yz, true, false});
        const bool agree = s_xy == s_xz && s_xz == s_yz;
        report.rows.push_back({"(iv) the three st comparisons agree", std::nullopt,
                               agree ? Status::HoldsOnGrid : Status::Fails, true, !agree});
    } else {
        report.rows.push_back({"(iv) the three st comparisons agree", std::nullopt,
                               Status::Inconclusive, false, false});
    }
    for (const auto& row : report.rows) report.violations += row.violation ? 1 : 0;
    return report;
}

}  // namespace qcalc::orders
