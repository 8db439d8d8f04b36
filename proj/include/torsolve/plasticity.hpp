#pragma once

#include "torsolve/bem.hpp"
#include "torsolve/geometry.hpp"
#include "torsolve/material.hpp"
#include "torsolve/rbf.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace torsolve {

struct DiscretizationOptions {
    int boundary_elements = 300;
    int collocation_target = 450;
    double inset = 0.0;            ///< <= 0 selects perimeter / boundary_elements
    double shape_parameter = 0.1;  ///< MQ c, in section length units
    int quadrature_order = 8;
    InterpolationOptions interpolation{};
    Execution exec = Execution::parallel;
};

enum class JacobianMode { finite_difference, broyden };

struct SolverOptions {
    double tol = 1e-6;  ///< on max|r| / min(sigma_Y)
    int max_iter = 50;
    JacobianMode jacobian = JacobianMode::finite_difference;
    /// Broyden only: rebuild the finite-difference Jacobian every this many updates.
    int broyden_refresh = 8;
    /// Lower bound eta on E_h / E used in the residual (0 keeps perfect plasticity).
    double hardening_floor = 0.0;
    int max_halvings = 20;
    Execution exec = Execution::parallel;
};

/// Everything the residual needs at the collocation points for one trial E_eff field.
struct Response {
    double theta = 0.0;
    Eigen::VectorXd E_eff;
    Eigen::VectorXd nu_eff;
    ShearModulusField shear;
    WarpingSolution warping;
    Eigen::VectorXd gamma_xz, gamma_yz;
    Eigen::VectorXd tau_xz, tau_yz;
    Eigen::VectorXd sigma_eq, eps_eq;
    Eigen::VectorXd residual;  ///< sigma_eq - curve(eps_eq)
};

struct PlasticState {
    double theta = 0.0;
    Eigen::VectorXd coefficients;  ///< k_j of the E_eff series
    Response response;
    std::vector<bool> plastic;  ///< eps_eq > local yield strain
    double residual_norm = 0.0;  ///< max|r| / min(sigma_Y)
    int iterations = 0;          ///< residual evaluations along the accepted path, 1 when the start converges
    std::vector<double> history;
    double moment = 0.0;         ///< boundary-only route
    double moment_direct = 0.0;  ///< cell-weighted area quadrature
    bool moment_mismatch = false;

    int plastic_count() const;
    double plastic_fraction() const;
};

struct FirstYield {
    double theta = 0.0;             ///< twist at first yield
    double moment = 0.0;            ///< torque at that twist
    double moment_per_twist = 0.0;  ///< elastic M_t / theta
    bool on_boundary_probe = false;
    int index = -1;  ///< into the collocation points, or into the probes when on_boundary_probe
    Vec2 location = Vec2::Zero();
};

struct SweepStep {
    double theta = 0.0;
    double theta_ratio = 0.0;
    double moment = 0.0;
    double moment_ratio = 0.0;
    PlasticState state;
};

struct SweepResult {
    FirstYield first_yield;
    std::vector<SweepStep> steps;
    bool complete = true;
    std::string failure;
    bool failure_is_convergence = false;
};

/**
 * Discretized section plus material: the fixed operators that every trial
 * E_eff field reuses. Immutable after construction, so solves may run
 * concurrently on one model.
 */
class TorsionModel {
public:
    TorsionModel(SectionShape shape, MaterialModel material, DiscretizationOptions options = {});

    const SectionShape& shape() const noexcept { return shape_; }
    const MaterialModel& material_model() const noexcept { return model_; }
    const DiscretizationOptions& options() const noexcept { return options_; }
    const BoundaryMesh& mesh() const noexcept { return mesh_; }
    const CollocationSet& collocation() const noexcept { return collocation_; }
    const MaterialField& material() const noexcept { return material_; }
    const InterpolationMatrix& interpolation() const noexcept { return interp_; }
    const BemOperators& operators() const noexcept { return ops_; }
    /// Yield probes: the boundary-element midpoints.
    const std::vector<Vec2>& probes() const noexcept { return probe_points_; }
    const MaterialField& probe_material() const noexcept { return probe_material_; }
    const FirstYield& first_yield() const noexcept { return first_yield_; }
    int size() const noexcept { return collocation_.size(); }

    /// Local elastic moduli at the collocation points.
    Eigen::VectorXd elastic_moduli() const;

    /// Nodal E_eff values and series coefficients are related by values = Phi k.
    Eigen::VectorXd coefficients(const Eigen::VectorXd& nodal) const;
    Eigen::VectorXd nodal_values(const Eigen::VectorXd& coefficients) const;

    /// d/dx and d/dy of the E_eff series at the collocation points, as maps from nodal values.
    const Eigen::MatrixXd& gradient_x() const noexcept { return grad_x_; }
    const Eigen::MatrixXd& gradient_y() const noexcept { return grad_y_; }

    ShearModulusField shear_field(const Eigen::VectorXd& nodal_E_eff) const;

    /// Full response to a nodal E_eff field at twist theta. Throws NumericalError if any E_eff <= 0.
    Response respond(const Eigen::VectorXd& nodal_E_eff, double theta, double hardening_floor = 0.0) const;

    Eigen::VectorXd residual(const Eigen::VectorXd& nodal_E_eff, double theta, double hardening_floor = 0.0) const;
    /// The residual in terms of the series coefficients k.
    Eigen::VectorXd residual_from_coefficients(const Eigen::VectorXd& k, double theta,
                                               double hardening_floor = 0.0) const;

    /// Newton solve at one twist. The start is warm_start (nodal E_eff) or the elastic field.
    PlasticState solve(double theta, const SolverOptions& options,
                       const std::optional<Eigen::VectorXd>& warm_start = std::nullopt) const;

    /// Walks from first yield up to theta in geometric steps no larger than max_step, warm-starting each solve.
    PlasticState solve_continued(double theta, const SolverOptions& options, double max_step = 1.25) const;

    /// Sequential warm-started solves at theta = ratio * theta_el. Stops at the first failure.
    SweepResult sweep(std::span<const double> ratios, const SolverOptions& options) const;

    /// Elastic strain intensity at the probes from the boundary traces of a warping solution.
    Eigen::VectorXd probe_strain(const WarpingSolution& warping, double theta) const;

private:
    FirstYield compute_first_yield() const;
    PlasticState finish(double theta, Response response, const SolverOptions& options, int iterations,
                        std::vector<double> history) const;

    SectionShape shape_;
    MaterialModel model_;
    DiscretizationOptions options_;
    BoundaryMesh mesh_;
    CollocationSet collocation_;
    MaterialField material_;
    InterpolationMatrix interp_;
    Eigen::MatrixXd grad_x_;
    Eigen::MatrixXd grad_y_;
    BemOperators ops_;
    std::vector<Vec2> probe_points_;
    MaterialField probe_material_;
    double sigma_y_min_ = 0.0;
    double modulus_scale_ = 0.0;
    FirstYield first_yield_;
};

/// theta_max_ratio reached in `steps` geometric steps starting at 0.5.
std::vector<double> default_schedule(double max_ratio, int steps = 12);

}  // namespace torsolve
