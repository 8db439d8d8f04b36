#include "torsolve/error.hpp"
#include "torsolve/plasticity.hpp"
#include "torsolve/postprocess.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

using namespace torsolve;

namespace {

DiscretizationOptions small(int n, int m) {
    DiscretizationOptions d;
    d.boundary_elements = n;
    d.collocation_target = m;
    return d;
}

const TorsionModel& rect_epp() {
    static const auto model = std::make_unique<TorsionModel>(SectionShape::rectangle(5, 10),
                                                             BilinearCurve{210600, 0.3, 24, 0}, small(120, 120));
    return *model;
}

TtoFgm fgm(double k) {
    TtoFgm f;
    f.ceramic = {5000, 0.25};
    f.metal = {3000, 0.25, 5, 500};
    f.exponent = k;
    f.q = std::numeric_limits<double>::infinity();
    f.height = 10;
    return f;
}

}  // namespace

TEST(DeriveFields, CircleShearIsTangentialAndLinearInRadius) {
    const TorsionModel m(SectionShape::circle(1), BilinearCurve{210600, 0.3, 1e9, 0}, small(200, 300));
    const double theta = 1e-3;
    const PlasticState s = m.solve(theta, SolverOptions{});
    const double G = 210600 / 2.6;
    const std::vector<Vec2> extra{{0.3, 0.1}, {-0.5, 0.5}, {0.0, -0.8}};
    const FieldTable t = derive_fields(s, m, extra);
    ASSERT_EQ(t.rows.size(), static_cast<std::size_t>(m.size()) + 3);
    EXPECT_EQ(t.collocation_rows, m.size());
    for (const FieldRow& row : t.rows) {
        const double r = std::hypot(row.x, row.y);
        if (r < 0.05) continue;
        const double tau = std::hypot(row.tau_xz, row.tau_yz);
        EXPECT_NEAR(tau / (G * theta * r), 1.0, 0.01);
        // radial component x tau_xz + y tau_yz vanishes
        EXPECT_LT(std::abs(row.x * row.tau_xz + row.y * row.tau_yz) / r, 0.01 * tau);
    }
    EXPECT_NEAR(s.moment / (G * theta * std::numbers::pi / 2), 1.0, 0.005);
}

TEST(DeriveFields, IntensityIdentities) {
    const TorsionModel& m = rect_epp();
    const PlasticState s = m.solve_continued(2.0 * m.first_yield().theta, SolverOptions{});
    std::vector<Vec2> extra{{0.5, 0.5}, {-1.7, 3.9}, {2.2, -4.6}};
    const FieldTable t = derive_fields(s, m, extra);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const FieldRow& r = t.rows[i];
        EXPECT_DOUBLE_EQ(r.sigma_eq, std::sqrt(3.0) * std::hypot(r.tau_xz, r.tau_yz));
        EXPECT_NEAR(r.sigma_eq / r.eps_eq, r.E_eff, 1e-8 * r.E_eff);
        EXPECT_DOUBLE_EQ(r.w, s.theta * r.phi);
        EXPECT_EQ(r.plastic, r.eps_eq > 24.0 / 210600) << i;
    }
}

TEST(DeriveFields, ElasticPeakSitsOnTheLongSide) {
    const TorsionModel& m = rect_epp();
    const PlasticState s = m.solve(0.5 * m.first_yield().theta, SolverOptions{});
    const FieldTable t = derive_fields(s, m);
    const auto peak = std::max_element(t.rows.begin(), t.rows.end(),
                                       [](const FieldRow& a, const FieldRow& b) { return a.sigma_eq < b.sigma_eq; });
    double max_x = 0.0;
    for (const FieldRow& r : t.rows) max_x = std::max(max_x, std::abs(r.x));
    EXPECT_DOUBLE_EQ(std::abs(peak->x), max_x);
    EXPECT_LT(std::abs(peak->y), 1.0);
    // Probe strain at the long-side midpoint against the series peak shear.
    const double tau_peak = 210600 / 2.6 * s.theta * 5.0 * 0.9300;
    const Eigen::VectorXd eps = m.probe_strain(s.response.warping, s.theta);
    const double gamma_peak = eps.maxCoeff() * 2.0 * 1.3 / std::sqrt(3.0);
    EXPECT_NEAR(210600 / 2.6 * gamma_peak / tau_peak, 1.0, 0.02);
}

TEST(DeriveFields, GaugeShiftLeavesStressesUnchanged) {
    const TorsionModel& m = rect_epp();
    const PlasticState s = m.solve_continued(1.5 * m.first_yield().theta, SolverOptions{});
    PlasticState shifted = s;
    shifted.response.warping.interior[0].array() += 3.25;
    shifted.response.warping.phi_boundary.array() += 3.25;
    const FieldTable a = derive_fields(s, m);
    const FieldTable b = derive_fields(shifted, m);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].tau_xz, b.rows[i].tau_xz);
        EXPECT_EQ(a.rows[i].tau_yz, b.rows[i].tau_yz);
        EXPECT_EQ(a.rows[i].sigma_eq, b.rows[i].sigma_eq);
        EXPECT_NEAR(b.rows[i].phi - a.rows[i].phi, 3.25, 1e-12);
    }
}

TEST(Moment, RoutesAgreeAndReverseWithTwist) {
    const TorsionModel& m = rect_epp();
    const double theta = 2.0 * m.first_yield().theta;
    const PlasticState pos = m.solve_continued(theta, SolverOptions{});
    const PlasticState neg = m.solve_continued(-theta, SolverOptions{});
    EXPECT_DOUBLE_EQ(torsional_moment(pos, m), pos.moment);
    EXPECT_NEAR(pos.moment_direct / pos.moment, 1.0, 0.01);
    EXPECT_NEAR(neg.moment, -pos.moment, 1e-6 * pos.moment);
    const double scale = pos.response.tau_xz.cwiseAbs().maxCoeff();
    EXPECT_LT((pos.response.tau_xz + neg.response.tau_xz).cwiseAbs().maxCoeff(), 1e-6 * scale);
    EXPECT_LT((pos.response.tau_yz + neg.response.tau_yz).cwiseAbs().maxCoeff(), 1e-6 * scale);
}

TEST(Moment, InvariantUnderHalfTurnOfTheSection) {
    const BilinearCurve steel{210600, 0.3, 24, 0};
    const TorsionModel a(SectionShape::rectangle(5, 10), steel, small(120, 120));
    // Same rectangle, boundary traversed from the opposite corner.
    const TorsionModel b(SectionShape::polygon({{2.5, 5}, {-2.5, 5}, {-2.5, -5}, {2.5, -5}}), steel,
                         small(120, 120));
    EXPECT_NEAR(b.first_yield().theta / a.first_yield().theta, 1.0, 1e-9);
    const double theta = 2.0 * a.first_yield().theta;
    const PlasticState sa = a.solve_continued(theta, SolverOptions{});
    const PlasticState sb = b.solve_continued(theta, SolverOptions{});
    EXPECT_NEAR(sb.moment / sa.moment, 1.0, 1e-7);
}

TEST(AnalyticReferences, PrintedValues) {
    const AnalyticReference r = analytic_references(SectionShape::rectangle(5, 10), 24);
    EXPECT_NEAR(r.elastic / 852.2, 1.0, 1e-3);
    EXPECT_NEAR(r.plastic / 1443.4, 1.0, 1e-3);
    const AnalyticReference t = analytic_references(SectionShape::equilateral_triangle(10), 24);
    EXPECT_NEAR(t.elastic / 692.3, 1.0, 1e-3);
    EXPECT_NEAR(t.plastic / 1154.7, 1.0, 1e-3);
    const AnalyticReference g = analytic_references(SectionShape::rectangle(5, 10), 5);
    EXPECT_NEAR(g.elastic / 177.53, 1.0, 1e-3);
    EXPECT_NEAR(g.plastic / 300.62, 1.0, 1e-3);
}

TEST(AnalyticReferences, RectangleOrientationDoesNotMatter) {
    const AnalyticReference a = analytic_references(SectionShape::rectangle(5, 10), 24);
    const AnalyticReference b = analytic_references(SectionShape::rectangle(10, 5), 24);
    EXPECT_DOUBLE_EQ(a.elastic, b.elastic);
    EXPECT_DOUBLE_EQ(a.plastic, b.plastic);
}

TEST(AnalyticReferences, UnsupportedShape) {
    EXPECT_THROW(analytic_references(SectionShape::ellipse(2, 1), 24), ConfigError);
    EXPECT_THROW(analytic_references(SectionShape::rectangle(5, 10), 0), ConfigError);
}

TEST(RectangleTorsionConstant, TabulatedCoefficients) {
    // k1 = J / (h b^3) for h / b = 1, 2 and the thin-strip limit 1/3.
    EXPECT_NEAR(rectangle_torsion_constant(1, 1), 0.1406, 1e-4);
    EXPECT_NEAR(rectangle_torsion_constant(5, 10) / 1250, 0.2287, 1e-4);
    EXPECT_NEAR(rectangle_torsion_constant(1, 1000) / 1000, 1.0 / 3.0, 1e-3);
}

TEST(PlasticRegion, EmptyBeforeFirstYield) {
    const TorsionModel& m = rect_epp();
    const PlasticState s = m.solve(m.first_yield().theta, SolverOptions{});
    const PlasticRegion r = plastic_region(s, m);
    EXPECT_EQ(r.count, 0);
    EXPECT_EQ(r.fraction, 0.0);
    EXPECT_EQ(r.area_fraction, 0.0);
}

TEST(PlasticRegion, GrowsAlongTheSweep) {
    const TorsionModel& m = rect_epp();
    const std::vector<double> ratios{2.18, 4.75};
    const SweepResult r = m.sweep(ratios, SolverOptions{});
    ASSERT_TRUE(r.complete) << r.failure;
    const PlasticRegion early = plastic_region(r.steps[0].state, m);
    const PlasticRegion late = plastic_region(r.steps[1].state, m);
    EXPECT_GT(late.fraction, early.fraction);
    EXPECT_GT(late.area_fraction, early.area_fraction);
    EXPECT_NEAR(late.fraction, r.steps[1].state.plastic_fraction(), 1e-15);
}

TEST(PlasticRegion, GradedSpreadOrderingInExponent) {
    // Plastic fraction at theta / theta_el = 1.85 for k = 3 against k = 0.1.
    const double ratio = 1.85;
    const TorsionModel lo(SectionShape::rectangle(5, 10), fgm(0.1), small(200, 200));
    const TorsionModel hi(SectionShape::rectangle(5, 10), fgm(3.0), small(200, 200));
    const PlasticState a = lo.solve_continued(ratio * lo.first_yield().theta, SolverOptions{});
    const PlasticState b = hi.solve_continued(ratio * hi.first_yield().theta, SolverOptions{});
    EXPECT_GE(plastic_region(b, hi).fraction, plastic_region(a, lo).fraction)
        << "k=0.1: " << plastic_region(a, lo).fraction << "  k=3: " << plastic_region(b, hi).fraction;
}
