#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcalc/distributions.hpp"
#include "qcalc/unitlaw.hpp"

namespace qcalc::orders {

enum class Relation { st, hr, rh, lr, star, ps, rps };

/// "st", "hr", "rh", "lr", "star", "ps", "rps" (case-insensitive).
Relation parse_relation(const std::string& name);
std::string to_string(Relation rel);

enum class Status { HoldsOnGrid, Fails, Inconclusive };
std::string to_string(Status status);

struct Witness {
    double location = 0.0;   ///< u or x where the check failed
    double violation = 0.0;  ///< size of the excess beyond the allowed slack
};

/// Outcome of a finite-grid check. HoldsOnGrid is evidence, not proof.
struct Verdict {
    Status status = Status::Inconclusive;
    std::optional<Witness> witness;
    int grid_size = 0;
    double tolerance = 0.0;
    std::string detail;

    bool holds() const { return status == Status::HoldsOnGrid; }
    bool fails() const { return status == Status::Fails; }
};

inline constexpr int kDefaultGrid = 512;
inline constexpr double kDefaultTol = 1e-9;

/// `grid` Chebyshev-Gauss points on (0, 1), clustered at both ends.
std::vector<double> chebyshev_grid(int grid);

/// Non-strict decrease of `values` along consecutive entries: a step up by
/// more than tol * max(1, |previous|) fails. NaN entries are skipped.
Verdict check_decreasing(const std::vector<double>& locations, const std::vector<double>& values,
                         double tol);

/// X <=_rel Y on a grid. st, star, PS and RPS use a u-grid; hr, rh and lr use
/// an x-grid spanning [Q(1e-4), Q(1 - 1e-4)] of both laws (log-spaced when
/// the lower end is positive). A ratio whose denominator is at most 1e-12 is
/// skipped when the numerator is too, and taken as +inf otherwise. lr throws MissingDensity without both pdfs.
Verdict check_order(const QuantileModel& x, const QuantileModel& y, Relation rel,
                    int grid = kDefaultGrid, double tol = kDefaultTol);

/// A <=_rel B for laws on (0, 1); rel must be st, hr, rh or lr.
Verdict check_unit_order(const unitlaw::UnitVariable& a, const unitlaw::UnitVariable& b,
                         Relation rel, int grid = kDefaultGrid, double tol = kDefaultTol);

/// Fbar(Q(p) + Q(r)) <= (1 - p)(1 - r) + tol on a grid x grid set of (p, r);
/// the witness is the largest excess.
Verdict check_nbu(const QuantileModel& x, int grid = kDefaultGrid, double tol = kDefaultTol);

/// Fbar(Q(s) + Q(p)) / (1 - p) nonincreasing in p for every s, i.e.
/// Fbar(Q(s)+Q(p)) / Fbar(Q(s)+Q(r)) >= (1-p)/(1-r) for p < r.
Verdict check_ifr(const QuantileModel& x, int grid = kDefaultGrid, double tol = kDefaultTol);

/// x tau(x) = x f(x) / F(x) nonincreasing on a log-spaced x-grid.
Verdict check_xtau_decreasing(const QuantileModel& x, int grid = kDefaultGrid,
                              double tol = kDefaultTol);

struct ImplicationRow {
    std::string label;
    std::optional<Status> antecedent;  ///< empty for the equivalence rows
    Status consequent = Status::Inconclusive;
    bool applicable = true;
    bool violation = false;
};

struct ImplicationReport {
    std::vector<ImplicationRow> rows;
    int violations = 0;
    bool st_holds = false;  ///< X <=st Y, so Z^L exists
};

/// Checks each antecedent (star, PS, RPS between X and Y) and, where it
/// holds, the consequent (lr, hr, rh between the lifts and Z^L = Psi^L(X, Y));
/// also checks that the three st comparisons of part (iv) agree. Rows that
/// need Z^L are marked not applicable when X <=st Y fails.
ImplicationReport implication_suite(const QuantileModel& x, const QuantileModel& y,
                                    int grid = kDefaultGrid, double tol = kDefaultTol);

}  // namespace qcalc::orders
