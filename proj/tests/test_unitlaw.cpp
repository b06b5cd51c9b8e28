#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/unitlaw.hpp"

using namespace qcalc;
using namespace qcalc::unitlaw;

namespace {

QuantileModel exp_model(double rate) { return make_model(family::Exponential{rate}); }
QuantileModel uniform_model(double a) { return make_model(family::Uniform{a}); }

std::vector<double> probe_grid() {
    std::vector<double> g;
    for (int i = 1; i < 40; ++i) g.push_back(i / 40.0);
    g.push_back(0.001);
    g.push_back(0.999);
    return g;
}

}  // namespace

TEST(Lorenz, Examples) {
    for (double a : {1.0, 3.0}) {
        for (double p : probe_grid()) EXPECT_NEAR(lorenz_curve(uniform_model(a), p), p * p, 1e-12);
    }
    EXPECT_DOUBLE_EQ(lorenz_curve(exp_model(1.0), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(lorenz_curve(exp_model(1.0), 0.0), 0.0);
    const double ref = oracle::tanh_sinh([](double u) { return -std::log1p(-u); }, 0.0, 0.5);
    EXPECT_NEAR(ref, 0.1534264097, 1e-10);
    EXPECT_NEAR(lorenz_curve(exp_model(1.0), 0.5), ref, 1e-12);
    EXPECT_THROW(lorenz_curve(make_model(family::ParetoI{1.0, 2.0}), 0.5), DomainError);
}

TEST(Lift, Examples) {
    const auto lomax = lift_XL(make_model(family::Lomax{2.0, 1.0}));
    EXPECT_NEAR(lomax.density(0.75), 1.0, 1e-14);
    for (double u : probe_grid()) {
        EXPECT_NEAR(lomax.density(u), (2.0 - 1.0) * (std::pow(1.0 - u, -0.5) - 1.0), 1e-12);
    }
    EXPECT_NEAR(lift_XL(uniform_model(2.0)).density(0.5), 1.0, 1e-15);
    EXPECT_NEAR(unit_moment(exp_model(1.0), 1), 0.75, 1e-10);
}

TEST(Lift, CdfEqualsLorenzCurve) {
    for (const FamilySpec& spec :
         {FamilySpec{family::Exponential{1.0}}, FamilySpec{family::Lomax{2.0, 1.0}},
          FamilySpec{family::Rayleigh{1.0}}, FamilySpec{family::GeoMaxExp{1.0, 0.5}},
          FamilySpec{family::PowerScale{2.0, 0.5}}, FamilySpec{family::FrechetType{1.0, 2.0}}}) {
        const auto m = make_model(spec);
        const auto lift = lift_XL(m);
        // Lomax shape 2 sits on the sqrt(eps) floor of a (1-u)^{-1/2} singularity.
        EXPECT_NEAR(lift.normalization(), 1.0, 3e-8) << m.name();
        for (double p : probe_grid()) {
            EXPECT_NEAR(lift.cdf(p), lorenz_curve(m, p), 1e-8) << m.name() << " p=" << p;
            EXPECT_NEAR(lift.cdf(lift.quantile(p)), p * lift.normalization(), 1e-10) << m.name();
        }
    }
}

TEST(Psi, Examples) {
    const auto z = psi_L(exp_model(2.0), exp_model(1.0));
    EXPECT_NEAR(z.density(1.0 - std::exp(-1.0)), 1.0, 1e-14);
    for (double u : probe_grid()) EXPECT_NEAR(z.density(u), -std::log1p(-u), 1e-13);
    EXPECT_NEAR(z.normalization(), 1.0, 1e-9);

    const auto w = psi_L(uniform_model(1.0), uniform_model(2.0));
    EXPECT_NEAR(w.density(0.5), 1.0, 1e-15);
    for (double u : probe_grid()) EXPECT_NEAR(w.density(u), 2.0 * u, 1e-14);

    try {
        psi_L(exp_model(1.0), exp_model(2.0));
        FAIL() << "expected NotStochasticallyOrdered";
    } catch (const NotStochasticallyOrdered& e) {
        EXPECT_GT(e.violation, 0.0);
        EXPECT_GT(e.witness_u, 0.0);
        EXPECT_LT(e.witness_u, 1.0);
    }
    EXPECT_THROW(psi_L(exp_model(1.0), exp_model(1.0)), EqualMeans);
    EXPECT_NE(z.provenance().find("verified on grid"), std::string::npos);
}

TEST(Psi, NonnegativeAndNormalizedForOrderedPairs) {
    const std::vector<std::pair<FamilySpec, FamilySpec>> pairs = {
        {family::Exponential{2.0}, family::Rayleigh{0.1}},
        {family::Uniform{1.0}, family::Exponential{0.5}},
        {family::Lomax{3.0, 1.0}, family::Lomax{2.0, 1.0}},
        {family::ParetoI{1.0, 3.0}, family::ParetoI{1.5, 2.0}},
        {family::GeoMaxExp{2.0, 0.5}, family::GeoMaxExp{1.0, 0.5}}};
    for (const auto& [a, b] : pairs) {
        const auto x = make_model(a);
        const auto y = make_model(b);
        const auto z = psi_L(x, y);
        for (double u : probe_grid()) EXPECT_GE(z.density(u), -1e-9);
        EXPECT_NEAR(z.normalization(), 1.0, 1e-6) << z.provenance();
        const double oracle_norm = oracle::tanh_sinh([&](double u) { return z.density(u); }, 0, 1, 9);
        EXPECT_NEAR(oracle_norm, 1.0, 1e-6) << z.provenance();
    }
}

TEST(GeneralizedLorenz, Examples) {
    EXPECT_DOUBLE_EQ(generalized_lorenz(exp_model(2.0), exp_model(1.0), 1.0), 1.0);
    EXPECT_NEAR(generalized_lorenz(uniform_model(1.0), uniform_model(2.0), 0.5), 0.25, 1e-12);
    const auto y = make_model(family::Rayleigh{1.0});
    for (double p : probe_grid()) {
        EXPECT_NEAR(generalized_lorenz(zero_model(), y, p), lorenz_curve(y, p), 1e-12);
        EXPECT_NEAR(generalized_lorenz(exp_model(2.0), exp_model(1.0), p),
                    psi_L(exp_model(2.0), exp_model(1.0)).cdf(p), 1e-9);
    }
}

TEST(Mixture, Examples) {
    const auto m = mixture_decomposition(exp_model(2.0), exp_model(1.0));
    EXPECT_NEAR(m.c, 2.0, 1e-14);
    EXPECT_LT(m.max_deviation, 1e-8);
    // E[X] = 1, E[Y] = 2
    EXPECT_NEAR(mixture_decomposition(uniform_model(2.0), uniform_model(4.0)).c, 2.0, 1e-14);
    // at u = 0.5 the mixture reproduces -ln(1-u)
    const double u = 0.5;
    const double mix = 2.0 * (-std::log1p(-u)) / 1.0 + (1.0 - 2.0) * (-std::log1p(-u) / 2.0) / 0.5;
    EXPECT_NEAR(mix, -std::log1p(-u), 1e-14);
    const auto tiny = make_model(family::Tabulated{{0.25, 0.75}, {0.0, 1e-9}});
    const auto near_one = mixture_decomposition(tiny, exp_model(1.0));
    EXPECT_NEAR(near_one.c, 1.0, 1e-8);
}

TEST(UnitMoment, Examples) {
    EXPECT_DOUBLE_EQ(unit_moment(exp_model(1.0), 0), 1.0);
    const double ref = oracle::tanh_sinh([](double u) { return -u * std::log1p(-u); }, 0.0, 1.0);
    EXPECT_NEAR(unit_moment(exp_model(1.0), 1), ref, 1e-10);
    EXPECT_NEAR(unit_moment(uniform_model(1.0), 1), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(unit_moment(uniform_model(1.0), 2), 0.5, 1e-12);
}

TEST(ExpectationH, ExamplesAndMonteCarlo) {
    EXPECT_NEAR(expectation_h(exp_model(1.0), TestFunction::constant(1.0)), 1.0, 1e-10);
    EXPECT_NEAR(expectation_h(exp_model(1.0), TestFunction::power(1.0)), 0.75, 1e-10);
    EXPECT_NEAR(expectation_h(uniform_model(1.0), TestFunction::power(2.0)), 0.5, 1e-12);

    // E[h(F(X)) X] / E[X] with X drawn by inverse transform.
    const auto x = make_model(family::Rayleigh{1.0});
    const auto h = TestFunction::exponential();
    std::mt19937_64 eng(42);
    const int n = 400000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = x.quantile(unit_from_bits(eng()));
        const double v = h(x.cdf(xi)) * xi / x.mean();
        s += v;
        s2 += v * v;
    }
    const double mc = s / n;
    const double se = std::sqrt((s2 / n - mc * mc) / n);
    EXPECT_NEAR(expectation_h(x, h), mc, 4.0 * se);
}

TEST(Golden, FixedPoint) {
    const auto r = golden_fixed_point();
    EXPECT_NEAR(r.alpha, (1.0 + std::sqrt(5.0)) / 2.0, 1e-8);
    EXPECT_LT(r.sup_distance, 1e-8);
    EXPECT_FALSE(r.matches_reciprocal);
    EXPECT_GT(r.reciprocal_distance, 0.1);
    const auto m = make_model(family::PowerUnit{r.alpha});
    EXPECT_NEAR(unit_moment(m, 1), m.mean(), 1e-7);
}

TEST(Sample, MomentsAndDeterminism) {
    const auto v = lift_XL(uniform_model(1.0));
    const auto xs = sample(v, 100000, 7);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    EXPECT_NEAR(mean, 2.0 / 3.0, 0.005);
    EXPECT_TRUE(sample(v, 0, 7).empty());
    EXPECT_EQ(sample(v, 1000, 99), sample(v, 1000, 99));
    EXPECT_NE(sample(v, 10, 1), sample(v, 10, 2));
    for (double s : xs) {
        ASSERT_GT(s, 0.0);
        ASSERT_LT(s, 1.0);
    }
}

TEST(Proportional, IdenticalLiftsIffProportional) {
    for (double beta : {0.5, 2.0, 3.0}) {
        const auto a = lift_XL(make_model(family::PowerScale{1.0, beta}));
        const auto b = lift_XL(make_model(family::PowerScale{4.0, beta}));
        double worst = 0.0;
        for (double u : probe_grid()) worst = std::max(worst, std::abs(a.density(u) - b.density(u)));
        EXPECT_LE(worst, 1e-9);
    }
    const auto e = lift_XL(exp_model(1.0));
    const auto r = lift_XL(make_model(family::Rayleigh{1.0}));
    double worst = 0.0;
    for (double u : probe_grid()) worst = std::max(worst, std::abs(e.density(u) - r.density(u)));
    EXPECT_GT(worst, 0.01);
}

TEST(Proportional, PsiEqualsPhiOverEta) {
    // Q = scale * phi with phi(u) = u^{1/beta}, eta = beta / (beta + 1).
    for (double beta : {0.5, 2.0, 3.0}) {
        const auto x = make_model(family::PowerScale{1.0, beta});
        const auto y = make_model(family::PowerScale{2.5, beta});
        const auto z = psi_L(x, y);
        const auto lx = lift_XL(x);
        for (double u : probe_grid()) {
            const double expected = (beta + 1.0) / beta * std::pow(u, 1.0 / beta);
            EXPECT_NEAR(z.density(u), expected, 1e-8 * (1.0 + expected));
            EXPECT_NEAR(z.density(u), lx.density(u), 1e-8 * (1.0 + expected));
        }
    }
    // phi(u) = (1-u)^{-1/beta}, eta = beta / (beta - 1).
    for (double beta : {1.5, 2.0, 4.0}) {
        const auto x = make_model(family::ParetoI{1.0, beta});
        const auto y = make_model(family::ParetoI{3.0, beta});
        const auto z = psi_L(x, y);
        for (double u : probe_grid()) {
            const double expected = (beta - 1.0) / (beta * std::pow(1.0 - u, 1.0 / beta));
            EXPECT_NEAR(z.density(u), expected, 1e-8 * (1.0 + expected));
        }
    }
}
