#include "qcalc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "qcalc/distributions.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/figures.hpp"
#include "qcalc/identities.hpp"
#include "qcalc/orders.hpp"
#include "qcalc/risk.hpp"
#include "qcalc/unitlaw.hpp"
#include "text.hpp"

namespace qcalc::cli {

namespace {

namespace fs = std::filesystem;
using text::format_number;

class Usage : public Error {
public:
    using Error::Error;
};

QuantileModel model_from(const std::string& spec) { return make_model(parse_family(spec)); }

QuantileModel require_model(const std::string& spec, const char* flag) {
    if (spec.empty()) throw Usage(std::string(flag) + " is required");
    return model_from(spec);
}

// Writes to a sibling temporary file and renames it into place.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Usage("cannot write " + tmp.string());
        body(f);
        if (!f) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// ---- density ---------------------------------------------------------------

struct DensityArgs {
    std::string family;
    std::optional<double> lambda;
    bool lift = false;
    std::string construction = "lift";
    std::string x, y;
    int grid = figures::kDefaultGrid;
    std::string output;
    std::string format = "csv";
};

int run_density(const DensityArgs& a, std::ostream& out) {
    std::optional<unitlaw::UnitVariable> law;
    if (a.lift || a.construction == "lift") {
        std::string spec = a.family;
        if (a.lambda) spec += ":" + format_number(*a.lambda);
        law = unitlaw::lift_XL(require_model(spec, "--family"));
    } else {
        law = unitlaw::psi_L(require_model(a.x, "--x"), require_model(a.y, "--y"));
    }
    const auto us = figures::interior_grid(a.grid);
    std::vector<double> vals;
    vals.reserve(us.size());
    for (double u : us) vals.push_back(law->density(u));

    auto csv = [&](std::ostream& o) {
        o << "u,density\n";
        for (std::size_t i = 0; i < us.size(); ++i) o << format_number(us[i]) << ',' << format_number(vals[i]) << '\n';
    };
    auto svg = [&](std::ostream& o) { figures::write_svg(o, law->provenance(), us, vals); };

    if (a.output.empty()) {
        if (a.format == "both") throw Usage("--format both needs --output");
        a.format == "svg" ? svg(out) : csv(out);
        return kExitPass;
    }
    fs::path base(a.output);
    if (a.format != "svg") write_atomically(base, csv);
    if (a.format != "csv") write_atomically(a.format == "svg" ? base : fs::path(base).replace_extension(".svg"), svg);
    return kExitPass;
}

// ---- figure ----------------------------------------------------------------

struct FigureArgs {
    std::string id = "all";
    std::string out_dir = "figures";
    int grid = figures::kDefaultGrid;
    std::string format = "both";
    bool cross_check = true;
};

int run_figure(const FigureArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<figures::FigureId> ids;
    if (a.id == "all") {
        ids = figures::all_figures();
    } else {
        ids.push_back(figures::parse_figure(a.id));
    }
    fs::create_directories(a.out_dir);
    out << "figure,curve,normalization,cross_check_max_rel,ordering_ok,independence_max_rel\n";
    bool ok = true;
    for (auto id : ids) {
        figures::Figure fig = figures::make_figure(id, a.grid, a.cross_check);
        const std::string stem = "fig" + figures::to_string(id);
        for (const auto& c : fig.curves) {
            if (a.format != "svg") {
                write_atomically(fs::path(a.out_dir) / (stem + "_" + c.slug + ".csv"),
                                 [&](std::ostream& o) { figures::write_csv(o, c); });
            }
            out << figures::to_string(id) << ',' << csv_quote(c.label) << ',' << format_number(c.normalization)
                << ',' << format_number(c.cross_check_max_rel) << ',' << (fig.ordering_ok ? "true" : "false") << ','
                << format_number(fig.independence_max_rel) << '\n';
        }
        if (a.format != "csv") {
            write_atomically(fs::path(a.out_dir) / (stem + ".svg"), [&](std::ostream& o) { figures::write_svg(o, fig); });
        }
        if (!fig.ordering_ok) err << "figure " << figures::to_string(id) << ": ordering fails, " << fig.ordering_detail << '\n';
        if (!fig.normalization_ok) err << "figure " << figures::to_string(id) << ": a curve is not normalized to 1 +- 1e-5\n";
        ok = ok && fig.ok();
    }
    return ok ? kExitPass : kExitFail;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    std::string id;
    std::string family, x, y;
    std::string g = "pow:2";
    std::string phi;
    int n = 1;
    double alpha = 2.0;
    std::optional<double> p, r, v, w;
    double tol_abs = 1e-6;
    double tol_rel = 1e-6;
    std::size_t mc = 0;
    std::uint64_t seed = 1;
};

double require_level(const std::optional<double>& v, const char* flag) {
    if (!v) throw Usage(std::string(flag) + " is required");
    return *v;
}

identities::Phi phi_from_spec(const std::string& spec) {
    if (spec.empty()) throw Usage("--phi is required");
    const auto [head, rest] = text::split_spec(spec);
    if (head == "power") return identities::phi_power(text::parse_number(rest));
    if (head == "pareto") return identities::phi_pareto(text::parse_number(rest));
    return identities::phi_from_model(model_from(spec));
}

void print_mc(std::ostream& out, const identities::MonteCarloReport& m) {
    out << "\nmc_n,seed,lhs_mc,lhs_se,rhs_mc,rhs_se,pass\n"
        << m.n << ',' << m.seed << ',' << format_number(m.lhs_mc) << ',' << format_number(m.lhs_se) << ','
        << format_number(m.rhs_mc) << ',' << format_number(m.rhs_se) << ',' << (m.pass() ? "true" : "false")
        << '\n';
}

int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    using namespace identities;
    const Tolerances tol{a.tol_abs, a.tol_rel};
    const TestFunction g = TestFunction::parse(a.g);
    std::vector<IdentityReport> reports;
    bool extra_ok = true;
    std::optional<MonteCarloReport> mc;

    if (a.id == "taylor1") {
        const auto x = require_model(a.family, "--family");
        reports.push_back(verify_taylor1(x, g, tol));
        if (a.mc > 0) mc = monte_carlo_taylor1(x, g, a.mc, a.seed);
    } else if (a.id == "taylorN") {
        reports.push_back(verify_taylor_n(require_model(a.family, "--family"), g, a.n, tol));
    } else if (a.id == "corollary") {
        reports.push_back(verify_corollary_power(require_model(a.family, "--family"), a.alpha, a.n, tol));
    } else if (a.id == "mvt") {
        const auto x = require_model(a.x, "--x");
        const auto y = require_model(a.y, "--y");
        reports.push_back(verify_mvt(x, y, g, tol));
        if (a.mc > 0) mc = monte_carlo_mvt(x, y, g, a.mc, a.seed);
    } else if (a.id == "proportional") {
        reports.push_back(verify_proportional(phi_from_spec(a.phi), g, tol));
    } else if (a.id.rfind("app-", 0) == 0) {
        const Application app = parse_application(a.id);
        ApplicationParams prm;
        switch (app) {
            case Application::Nbu:
            case Application::Risk1: prm = {require_level(a.p, "--p"), 0.0}; break;
            case Application::Ifr:
            case Application::Risk2: prm = {require_level(a.r, "--r"), require_level(a.p, "--p")}; break;
            case Application::Avar:
            case Application::Hat: prm = {require_level(a.v, "--v"), require_level(a.w, "--w")}; break;
        }
        const auto rep = verify_application(app, require_model(a.family, "--family"), prm, g, tol);
        reports.push_back(rep.identity);
        err << "pair " << rep.pair << "; closed-form density max rel " << format_number(rep.density_max_rel);
        if (!rep.example_density.empty()) {
            err << "; " << rep.example_density << " max rel " << format_number(rep.example_max_rel);
        }
        err << '\n';
        extra_ok = rep.density_pass;
    } else {
        throw Usage("unknown identity '" + a.id + "'");
    }

    out << csv_header() << '\n';
    bool ok = extra_ok;
    for (const auto& r : reports) {
        out << csv_row(r) << '\n';
        if (!r.notes.empty()) err << r.id << ": " << r.notes << '\n';
        ok = ok && r.pass;
    }
    if (mc) {
        print_mc(out, *mc);
        ok = ok && mc->pass();
    }
    return ok ? kExitPass : kExitFail;
}

// ---- order -----------------------------------------------------------------

struct OrderArgs {
    std::string relation;
    std::string x, y;
    int grid = orders::kDefaultGrid;
    double tol = orders::kDefaultTol;
};

int run_order(const OrderArgs& a, std::ostream& out) {
    orders::Verdict v;
    std::string name = a.relation;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (name == "nbu") {
        v = orders::check_nbu(require_model(a.x, "--x"), a.grid, a.tol);
    } else if (name == "ifr") {
        v = orders::check_ifr(require_model(a.x, "--x"), a.grid, a.tol);
    } else if (name == "xtau") {
        v = orders::check_xtau_decreasing(require_model(a.x, "--x"), a.grid, a.tol);
    } else {
        const auto rel = orders::parse_relation(name);
        name = orders::to_string(rel);
        v = orders::check_order(require_model(a.x, "--x"), require_model(a.y, "--y"), rel, a.grid, a.tol);
    }
    out << "relation,status,grid,tol,witness,violation,detail\n"
        << name << ',' << orders::to_string(v.status) << ',' << v.grid_size << ',' << format_number(v.tolerance)
        << ',' << (v.witness ? format_number(v.witness->location) : "") << ','
        << (v.witness ? format_number(v.witness->violation) : "") << ',' << csv_quote(v.detail) << '\n';
    return v.holds() ? kExitPass : kExitFail;
}

// ---- risk ------------------------------------------------------------------

struct RiskArgs {
    std::string measure;
    std::string family;
    std::vector<double> p;
    int grid = 0;
};

int run_risk(const RiskArgs& a, std::ostream& out) {
    const auto m = risk::parse_measure(a.measure);
    const auto x = require_model(a.family, "--family");
    std::vector<double> ps = a.p;
    if (ps.empty()) {
        if (a.grid < 1) throw Usage("give --p or --grid");
        ps = figures::interior_grid(a.grid);
    }
    risk::write_csv(out, risk::risk_curve(x, m, ps));
    return kExitPass;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const HypothesisFailed*>(&e) || dynamic_cast<const NotStochasticallyOrdered*>(&e) ||
        dynamic_cast<const EqualMeans*>(&e) || dynamic_cast<const NonMonotonePhi*>(&e) ||
        dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const NonFiniteEvaluation*>(&e)) {
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantile calculus: Psi^L densities, identities, orders and risk measures", "qcalc"};
    app.require_subcommand(1);

    DensityArgs da;
    auto* density = app.add_subcommand("density", "Density of a lift X^L or of Psi^L(X, Y) on a grid");
    density->add_option("--family", da.family, "Model spec family:p1,p2 for the lift");
    density->add_option("--lambda", da.lambda, "Parameter appended to --family");
    density->add_flag("--lift", da.lift, "Lift of --family (the default)");
    density->add_option("--construction", da.construction, "lift or psi")->check(CLI::IsMember({"lift", "psi"}));
    density->add_option("--x", da.x, "Smaller model for psi");
    density->add_option("--y", da.y, "Larger model for psi");
    density->add_option("--grid", da.grid, "Number of interior points");
    density->add_option("--output", da.output, "Output path (stdout when absent)");
    density->add_option("--format", da.format)->check(CLI::IsMember({"csv", "svg", "both"}));

    FigureArgs fa;
    auto* figure = app.add_subcommand("figure", "Regenerate the figure curves as CSV and SVG");
    figure->add_option("--id", fa.id, "1, 2a, 2b, 3 or all");
    figure->add_option("--out-dir", fa.out_dir);
    figure->add_option("--grid", fa.grid);
    figure->add_option("--format", fa.format)->check(CLI::IsMember({"csv", "svg", "both"}));
    figure->add_flag("!--no-cross-check", fa.cross_check, "Skip the Psi^L comparison");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Check one identity and print its report row");
    verify->add_option("id", va.id, "taylor1, taylorN, corollary, mvt, proportional, app-*")->required();
    verify->add_option("--family", va.family);
    verify->add_option("--x", va.x);
    verify->add_option("--y", va.y);
    verify->add_option("--g", va.g, "pow:a, poly:c0,c1,..., exp, log1p, const[:c]");
    verify->add_option("--phi", va.phi, "power:beta, pareto:beta or a model spec");
    verify->add_option("--n", va.n, "Taylor order");
    verify->add_option("--alpha", va.alpha, "Exponent for corollary");
    verify->add_option("--p", va.p);
    verify->add_option("--r", va.r);
    verify->add_option("--v", va.v);
    verify->add_option("--w", va.w);
    verify->add_option("--tol-abs", va.tol_abs);
    verify->add_option("--tol-rel", va.tol_rel);
    verify->add_option("--mc", va.mc, "Monte Carlo sample size (taylor1 and mvt)");
    verify->add_option("--seed", va.seed);

    OrderArgs oa;
    auto* order = app.add_subcommand("order", "Check a stochastic order or aging class on a grid");
    order->add_option("relation", oa.relation, "st, hr, rh, lr, star, ps, rps, nbu, ifr, xtau")->required();
    order->add_option("--x", oa.x)->required();
    order->add_option("--y", oa.y);
    order->add_option("--grid", oa.grid);
    order->add_option("--tol", oa.tol);

    RiskArgs ra;
    auto* riskcmd = app.add_subcommand("risk", "Evaluate a risk measure at levels p");
    riskcmd->add_option("measure", ra.measure, "var, cvar, avar, rightspread, propcvar")->required();
    riskcmd->add_option("--family", ra.family)->required();
    riskcmd->add_option("--p", ra.p)->delimiter(',');
    riskcmd->add_option("--grid", ra.grid, "Interior grid of levels when --p is absent");

    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*density) return run_density(da, out);
        if (*figure) return run_figure(fa, out, err);
        if (*verify) return run_verify(va, out, err);
        if (*order) return run_order(oa, out);
        if (*riskcmd) return run_risk(ra, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace qcalc::cli
