#include "torsolve/postprocess.hpp"

#include "torsolve/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

namespace torsolve {

FieldTable derive_fields(const PlasticState& state, const TorsionModel& model, std::span<const Vec2> extra_points) {
    const Response& r = state.response;
    const std::vector<Vec2>& pts = model.collocation().points;
    FieldTable table;
    table.collocation_rows = model.size();
    table.rows.reserve(pts.size() + extra_points.size());
    for (int j = 0; j < model.size(); ++j) {
        FieldRow row;
        row.x = pts[j].x();
        row.y = pts[j].y();
        row.phi = r.warping.phi()[j];
        row.w = state.theta * row.phi;
        row.gamma_xz = r.gamma_xz[j];
        row.gamma_yz = r.gamma_yz[j];
        row.tau_xz = r.tau_xz[j];
        row.tau_yz = r.tau_yz[j];
        row.sigma_eq = r.sigma_eq[j];
        row.eps_eq = r.eps_eq[j];
        row.E_eff = r.E_eff[j];
        row.plastic = state.plastic[j];
        table.rows.push_back(row);
    }
    if (extra_points.empty()) return table;

    const FieldEvaluator eval(model.operators(), model.mesh(), extra_points, model.options().exec);
    const std::vector<FieldSample> samples = eval.evaluate(r.warping);
    const MaterialField material = sample_field(model.material_model(), extra_points);
    const double sqrt3 = std::sqrt(3.0);
    for (std::size_t i = 0; i < extra_points.size(); ++i) {
        const Vec2& p = extra_points[i];
        const BilinearCurve& c = material.curves[i];
        const double e = eval_series(pts, model.options().shape_parameter, state.coefficients, p).value;
        const double nu_eff = effective_poisson(e, c.E, c.nu);
        const double G = effective_shear(e, nu_eff);
        FieldRow row;
        row.x = p.x();
        row.y = p.y();
        row.phi = samples[i].phi;
        row.w = state.theta * row.phi;
        row.gamma_xz = state.theta * (samples[i].phi_x - p.y());
        row.gamma_yz = state.theta * (samples[i].phi_y + p.x());
        row.tau_xz = G * row.gamma_xz;
        row.tau_yz = G * row.gamma_yz;
        row.sigma_eq = sqrt3 * std::hypot(row.tau_xz, row.tau_yz);
        row.eps_eq = sqrt3 * std::hypot(row.gamma_xz, row.gamma_yz) / (2.0 * (1.0 + nu_eff));
        row.E_eff = e;
        row.plastic = row.eps_eq > c.yield_strain();
        table.rows.push_back(row);
    }
    return table;
}

Eigen::VectorXd moment_density(std::span<const Vec2> points, const Eigen::VectorXd& tau_xz,
                               const Eigen::VectorXd& tau_yz) {
    Eigen::VectorXd R(static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        R[k] = points[j].x() * tau_yz[k] - points[j].y() * tau_xz[k];
    }
    return R;
}

double boundary_moment(const InterpolationMatrix& interp, const Eigen::VectorXd& flux_integrals,
                       const Eigen::VectorXd& density) {
    // int_Omega R = sum_j abar_j int_Omega f_j = sum_j abar_j int_Gamma du_j/dn
    return flux_integrals.dot(interp.fit(density));
}

double direct_moment(std::span<const double> weights, const Eigen::VectorXd& density) {
    double m = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) m += weights[j] * density[static_cast<Eigen::Index>(j)];
    return m;
}

double torsional_moment(const PlasticState& state, const TorsionModel& model) {
    const Eigen::VectorXd density =
        moment_density(model.collocation().points, state.response.tau_xz, state.response.tau_yz);
    return boundary_moment(model.interpolation(), model.operators().flux_integrals, density);
}

namespace {

constexpr double kPi = std::numbers::pi;

// Sums over odd n of the classical rectangle series, short side b, long side h.
struct RectangleSeries {
    double stiffness;  // J / (h b^3)
    double peak;       // tau_max / (G theta b)
};

RectangleSeries rectangle_series(double b, double h) {
    double s_tanh = 0.0;
    double s_cosh = 0.0;
    for (int n = 1; n < 400; n += 2) {
        const double a = n * kPi * h / (2.0 * b);
        s_tanh += std::tanh(a) / std::pow(n, 5);
        s_cosh += a < 700.0 ? 1.0 / (n * n * std::cosh(a)) : 0.0;
    }
    return {1.0 / 3.0 - 64.0 / std::pow(kPi, 5) * (b / h) * s_tanh, 1.0 - 8.0 / (kPi * kPi) * s_cosh};
}

}  // namespace

double rectangle_torsion_constant(double b, double h) {
    if (!(b > 0.0 && h > 0.0)) throw GeometryError("rectangle sides must be positive");
    const double s = std::min(b, h);
    const double l = std::max(b, h);
    return rectangle_series(s, l).stiffness * l * s * s * s;
}

AnalyticReference analytic_references(const SectionShape& shape, double sigma_y) {
    if (!(sigma_y > 0.0)) throw ConfigError("yield stress must be positive");
    const double tau_y = sigma_y / std::sqrt(3.0);
    AnalyticReference ref;
    if (const auto* rect = std::get_if<Rectangle>(&shape.kind())) {
        const double s = std::min(rect->b, rect->h);
        const double l = std::max(rect->b, rect->h);
        const RectangleSeries series = rectangle_series(s, l);
        ref.elastic = tau_y * series.stiffness * l * s * s / series.peak;
        ref.plastic = tau_y * s * s * (3.0 * l - s) / 6.0;
    } else if (const auto* tri = std::get_if<EquilateralTriangle>(&shape.kind())) {
        const double b3 = tri->b * tri->b * tri->b;
        ref.elastic = tau_y * b3 / 20.0;
        ref.plastic = tau_y * b3 / 12.0;
    } else if (const auto* circ = std::get_if<Circle>(&shape.kind())) {
        const double r3 = circ->radius * circ->radius * circ->radius;
        ref.elastic = tau_y * kPi * r3 / 2.0;
        ref.plastic = tau_y * 2.0 * kPi * r3 / 3.0;
    } else {
        std::ostringstream msg;
        msg << "no closed-form torque references for a " << shape.name() << " section";
        throw ConfigError(msg.str());
    }
    return ref;
}

PlasticRegion plastic_region(const PlasticState& state, const TorsionModel& model) {
    PlasticRegion region;
    region.plastic = state.plastic;
    const std::vector<double>& w = model.collocation().weights;
    double total = 0.0;
    double yielded = 0.0;
    for (std::size_t j = 0; j < state.plastic.size(); ++j) {
        total += w[j];
        if (state.plastic[j]) {
            ++region.count;
            yielded += w[j];
        }
    }
    region.fraction = state.plastic.empty() ? 0.0 : static_cast<double>(region.count) / state.plastic.size();
    region.area_fraction = total > 0.0 ? yielded / total : 0.0;
    return region;
}

}  // namespace torsolve
