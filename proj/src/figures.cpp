#include "qcalc/figures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qcalc/distributions.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/identities.hpp"
#include "qcalc/risk.hpp"
#include "qcalc/unitlaw.hpp"
#include "text.hpp"

namespace qcalc::figures {

namespace {

using identities::Application;
using text::format_number;

constexpr int kCheckPoints = 64;

struct Layout {
    const char* title;
    const char* first;   // parameter names
    const char* second;
    std::vector<std::pair<double, double>> params;
    double probe;
    bool increasing;
};

Layout layout(FigureId id) {
    switch (id) {
        case FigureId::Fig1:
            return {"Rayleigh proportional residuals, density of Psi^L", "r", "p",
                    {{0.1, 0.3}, {0.4, 0.6}, {0.7, 0.9}}, 0.02, false};
        case FigureId::Fig2a:
            return {"Frechet (gamma = 1) star models, w = 0.9", "v", "w",
                    {{0.1, 0.9}, {0.3, 0.9}, {0.5, 0.9}, {0.7, 0.9}}, 0.02, true};
        case FigureId::Fig2b:
            return {"Frechet (gamma = 1) star models, v = 0.1", "v", "w",
                    {{0.1, 0.3}, {0.1, 0.5}, {0.1, 0.7}, {0.1, 0.9}}, 0.98, false};
        case FigureId::Fig3:
            return {"Exponential hat models, density of Psi^L", "v", "w",
                    {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}, {0.7, 0.8}}, 0.02, true};
    }
    throw InvalidParameter("unknown figure");
}

numerics::RealFn closed_form(FigureId id, double a, double b) {
    switch (id) {
        case FigureId::Fig1:
            return [a, b](double u) { return identities::density_rayleigh_risk(a, b, u); };
        case FigureId::Fig2a:
        case FigureId::Fig2b:
            return [a, b](double u) { return identities::density_frechet_star(a, b, u); };
        case FigureId::Fig3:
            return [a, b](double u) { return identities::density_exponential_hat(a, b, u); };
    }
    throw InvalidParameter("unknown figure");
}

// The ordered pair whose Psi^L density the closed form describes.
unitlaw::UnitVariable numeric_law(FigureId id, double a, double b) {
    using risk::DerivedKind;
    QuantileModel parent = make_model(family::Exponential{1.0});
    DerivedKind kind = DerivedKind::HatModel;
    double lo = a, hi = b;
    if (id == FigureId::Fig1) {
        parent = make_model(family::Rayleigh{1.0});
        kind = DerivedKind::ProportionalResidual;
        std::swap(lo, hi);  // X~_p <=st X~_r for r < p
    } else if (id != FigureId::Fig3) {
        parent = make_model(family::FrechetType{1.0, 1.0});
        kind = DerivedKind::StarModel;
    }
    return unitlaw::psi_L(risk::derive(parent, {kind, lo}), risk::derive(parent, {kind, hi}));
}

double max_rel(const numerics::RealFn& f, const numerics::RealFn& ref, const std::vector<double>& us) {
    double worst = 0.0;
    for (double u : us) {
        const double r = ref(u);
        worst = std::max(worst, std::abs(f(u) - r) / std::max(std::abs(r), 1e-300));
    }
    return worst;
}

std::vector<double> check_points() {
    std::vector<double> us;
    for (int i = 0; i < kCheckPoints; ++i) us.push_back((i + 0.5) / kCheckPoints);
    return us;
}

double independence(FigureId id) {
    const auto us = check_points();
    if (id == FigureId::Fig1) {
        const auto f1 = identities::closed_form_density(Application::Risk2, make_model(family::Rayleigh{1.0}),
                                                    {0.1, 0.3});
        const auto f4 = identities::closed_form_density(Application::Risk2, make_model(family::Rayleigh{4.0}),
                                                    {0.1, 0.3});
        return max_rel(f4, f1, us);
    }
    if (id == FigureId::Fig3) {
        const auto f1 = identities::closed_form_density(Application::Hat, make_model(family::Exponential{1.0}),
                                                    {0.1, 0.2});
        const auto f3 = identities::closed_form_density(Application::Hat, make_model(family::Exponential{3.0}),
                                                    {0.1, 0.2});
        return max_rel(f3, f1, us);
    }
    return 0.0;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Series {
    std::string label;
    const std::vector<double>* u;
    const std::vector<double>* v;
};

void svg_plot(std::ostream& out, const std::string& title, const std::vector<Series>& series) {
    const double w = 640, h = 420, left = 60, right = 20, top = 40, bottom = 50;
    double ymax = 0.0;
    for (const auto& s : series) {
        for (double v : *s.v) {
            if (std::isfinite(v)) ymax = std::max(ymax, v);
        }
    }
    ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;
    auto px = [&](double u) { return left + u * (w - left - right); };
    auto py = [&](double y) { return h - bottom - y / ymax * (h - top - bottom); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << top
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double u = i / 4.0;
        out << "<text x=\"" << px(u) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">"
            << format_number(u) << "</text>\n";
        const double y = ymax * i / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
            << text::format_number(std::round(y * 1000) / 1000) << "</text>\n";
    }
    out << "<text x=\"" << px(0.5) << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">u</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % std::size(kColors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.u->size(); ++i) {
            const double v = (*s.v)[i];
            if (!std::isfinite(v)) continue;
            out << format_number(px((*s.u)[i])) << ',' << format_number(py(v)) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 16.0 * k + 6;
        out << "<line x1=\"" << w - 170 << "\" y1=\"" << ly << "\" x2=\"" << w - 150 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << w - 145 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace

FigureId parse_figure(const std::string& id) {
    std::string s = id;
    if (s.rfind("fig", 0) == 0) s = s.substr(3);
    if (s == "1") return FigureId::Fig1;
    if (s == "2a") return FigureId::Fig2a;
    if (s == "2b") return FigureId::Fig2b;
    if (s == "3") return FigureId::Fig3;
    throw ParseError("unknown figure '" + id + "'");
}

std::string to_string(FigureId id) {
    switch (id) {
        case FigureId::Fig1: return "1";
        case FigureId::Fig2a: return "2a";
        case FigureId::Fig2b: return "2b";
        case FigureId::Fig3: return "3";
    }
    return "?";
}

std::vector<FigureId> all_figures() {
    return {FigureId::Fig1, FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig3};
}

std::vector<double> interior_grid(int n) {
    if (n < 1) throw InvalidParameter("grid needs at least one point");
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = (i + 1.0) / (n + 1.0);
    return u;
}

Figure make_figure(FigureId id, int grid, bool cross_check) {
    const Layout lay = layout(id);
    const auto us = interior_grid(grid);
    Figure fig;
    fig.id = id;
    fig.title = lay.title;
    fig.probe = lay.probe;
    fig.increasing = lay.increasing;
    fig.normalization_ok = true;
    for (const auto& [a, b] : lay.params) {
        Curve c;
        c.a = a;
        c.b = b;
        c.label = std::string(lay.first) + "=" + format_number(a) + "," + lay.second + "=" + format_number(b);
        c.slug = std::string(lay.first) + format_number(a) + "_" + lay.second + format_number(b);
        c.density = closed_form(id, a, b);
        c.u = us;
        c.values.reserve(us.size());
        for (double u : us) c.values.push_back(c.density(u));
        c.normalization = numerics::integrate_value(c.density, 0.0, 1.0, numerics::fine_quadrature());
        if (!(std::abs(c.normalization - 1.0) <= kNormalizationTol)) fig.normalization_ok = false;
        if (cross_check) {
            const auto z = numeric_law(id, a, b);
            c.cross_check_max_rel = max_rel([&](double u) { return z.density(u); }, c.density, check_points());
        }
        fig.curves.push_back(std::move(c));
    }

    fig.ordering_ok = true;
    std::string detail;
    for (std::size_t k = 0; k < fig.curves.size(); ++k) {
        const double v = fig.curves[k].density(lay.probe);
        detail += (k ? " " : "") + fig.curves[k].label + ":" + format_number(v);
        if (k == 0) continue;
        const double prev = fig.curves[k - 1].density(lay.probe);
        if (lay.increasing ? !(v > prev) : !(v < prev)) fig.ordering_ok = false;
    }
    fig.ordering_detail = std::string(lay.increasing ? "increasing" : "decreasing") + " at u=" +
                          format_number(lay.probe) + " [" + detail + "]";
    fig.independence_max_rel = independence(id);
    return fig;
}

void write_csv(std::ostream& out, const Curve& curve) {
    out << "u,density\n";
    for (std::size_t i = 0; i < curve.u.size(); ++i) {
        out << format_number(curve.u[i]) << ',' << format_number(curve.values[i]) << '\n';
    }
}

void write_svg(std::ostream& out, const Figure& fig) {
    std::vector<Series> series;
    for (const auto& c : fig.curves) series.push_back({c.label, &c.u, &c.values});
    svg_plot(out, "Figure " + to_string(fig.id) + ": " + fig.title, series);
}

void write_svg(std::ostream& out, const std::string& title, const std::vector<double>& u,
               const std::vector<double>& values) {
    svg_plot(out, title, {{"density", &u, &values}});
}

}  // namespace qcalc::figures
