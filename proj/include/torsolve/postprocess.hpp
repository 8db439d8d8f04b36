#pragma once

#include "torsolve/geometry.hpp"
#include "torsolve/plasticity.hpp"
#include "torsolve/rbf.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace torsolve {

struct FieldRow {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double w = 0.0;
    double gamma_xz = 0.0;
    double gamma_yz = 0.0;
    double tau_xz = 0.0;
    double tau_yz = 0.0;
    double sigma_eq = 0.0;
    double eps_eq = 0.0;
    double E_eff = 0.0;
    bool plastic = false;
};

struct FieldTable {
    std::vector<FieldRow> rows;
    /// Rows past this index are extra query points evaluated off the collocation set.
    int collocation_rows = 0;
};

/// Strains, stresses and intensities at the collocation points, followed by any extra interior points.
FieldTable derive_fields(const PlasticState& state, const TorsionModel& model,
                         std::span<const Vec2> extra_points = {});

/// Integrand x tau_yz - y tau_xz of the torque.
Eigen::VectorXd moment_density(std::span<const Vec2> points, const Eigen::VectorXd& tau_xz,
                               const Eigen::VectorXd& tau_yz);

/// Torque from the RBF fit of the integrand and the boundary integrals of the particular-solution fluxes.
double boundary_moment(const InterpolationMatrix& interp, const Eigen::VectorXd& flux_integrals,
                       const Eigen::VectorXd& density);

/// Torque by the cell-weighted midpoint rule over the collocation grid.
double direct_moment(std::span<const double> weights, const Eigen::VectorXd& density);

double torsional_moment(const PlasticState& state, const TorsionModel& model);

struct AnalyticReference {
    double elastic = 0.0;  ///< M_el, torque at first yield
    double plastic = 0.0;  ///< M_pl, fully plastic torque
};

/// Closed-form first-yield and fully plastic torques (rectangle and equilateral triangle).
AnalyticReference analytic_references(const SectionShape& shape, double sigma_y);

/// Classical series torsion constant J of a b x h rectangle.
double rectangle_torsion_constant(double b, double h);

struct PlasticRegion {
    std::vector<bool> plastic;
    int count = 0;
    double fraction = 0.0;       ///< plastic points / M
    double area_fraction = 0.0;  ///< cell-weighted
};

PlasticRegion plastic_region(const PlasticState& state, const TorsionModel& model);

}  // namespace torsolve
