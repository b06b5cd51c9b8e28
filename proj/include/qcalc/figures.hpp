#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qcalc/numerics.hpp"

namespace qcalc::figures {

enum class FigureId { Fig1, Fig2a, Fig2b, Fig3 };

/// "1", "2a", "2b", "3" (a leading "fig" is accepted).
FigureId parse_figure(const std::string& id);
std::string to_string(FigureId id);
std::vector<FigureId> all_figures();

struct Curve {
    std::string label;   ///< e.g. "r=0.1,p=0.3"
    std::string slug;    ///< file-name friendly, e.g. "r0.1_p0.3"
    double a = 0.0;      ///< (r, p) for Fig 1, (v, w) otherwise
    double b = 0.0;
    numerics::RealFn density;
    std::vector<double> u;
    std::vector<double> values;
    double normalization = 0.0;
    /// Largest relative gap to the density built numerically through Psi^L.
    double cross_check_max_rel = 0.0;
};

struct Figure {
    FigureId id = FigureId::Fig1;
    std::string title;
    std::vector<Curve> curves;
    double probe = 0.0;       ///< u at which the expected ordering is read
    bool increasing = false;  ///< curves listed in increasing order at the probe
    bool ordering_ok = false;
    std::string ordering_detail;
    bool normalization_ok = false;
    /// Fig 1: max relative change from alpha = 1 to alpha = 4 of the Rayleigh
    /// density; Fig 3: from lambda = 1 to lambda = 3 of the exponential one.
    /// Zero for Fig 2.
    double independence_max_rel = 0.0;
    bool ok() const { return ordering_ok && normalization_ok; }
};

inline constexpr int kDefaultGrid = 513;
inline constexpr double kNormalizationTol = 1e-5;

/// `n` interior points (i + 1) / (n + 1), endpoints excluded.
std::vector<double> interior_grid(int n);

/// Evaluates every curve of the figure on `grid` interior points, checks
/// normalization to 1 +- 1e-5, the expected ordering at the probe point and
/// the parameter independence. With cross_check set each closed form is
/// also compared with the Psi^L construction on 64 points.
Figure make_figure(FigureId id, int grid = kDefaultGrid, bool cross_check = true);

/// `u,density` rows with a header.
void write_csv(std::ostream& out, const Curve& curve);
/// All curves of the figure as one SVG line plot.
void write_svg(std::ostream& out, const Figure& fig);

/// Same plot for a single `u,density` series.
void write_svg(std::ostream& out, const std::string& title, const std::vector<double>& u,
               const std::vector<double>& values);

}  // namespace qcalc::figures
