#pragma once

#include "torsolve/geometry.hpp"
#include "torsolve/kernels.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace torsolve {

struct BemOptions {
    int quadrature_order = 8;  ///< Gauss points per element for the particular-solution flux integrals
    Execution exec = Execution::parallel;
};

/**
 * Boundary values in terms of the source coefficients: phi = S a + s.
 *
 * The pure-Neumann problem leaves phi free up to a constant. The boundary
 * system is bordered with the gauge sum(phi) = 0 and a multiplier lambda
 * that absorbs the part of the right-hand side outside the range of H:
 *
 *   H phi + lambda 1 = G beta3 - F a,     lambda = lambda_a . a + lambda_0
 */
struct BoundaryReduction {
    Eigen::MatrixXd S;
    Eigen::VectorXd s;
    Eigen::RowVectorXd lambda_a;
    double lambda_0 = 0.0;
};

/// Field operators in reduced form: d phi = A a + b, one block per Derivative.
struct ReducedField {
    std::array<Eigen::MatrixXd, kDerivativeCount> A;
    std::array<Eigen::VectorXd, kDerivativeCount> b;
};

struct BemOperators {
    double shape_parameter = 0.0;
    std::vector<Vec2> points;  ///< collocation points

    Eigen::MatrixXd H;  ///< Htilde - I/2 (N x N)
    Eigen::MatrixXd G;  ///< single layer (N x N)
    Eigen::MatrixXd F;  ///< source coupling (N x M)
    Eigen::VectorXd beta3;
    ParticularTraces traces;

    FieldKernels field;                                   ///< kernels at the collocation points
    std::array<Eigen::MatrixXd, kDerivativeCount> F_field;  ///< F_kl at the collocation points
    Eigen::MatrixXd laplacian;                            ///< lap(phi) = Phi a at the collocation points

    BoundaryReduction reduction;
    ReducedField reduced;

    Eigen::VectorXd flux_integrals;  ///< int_Gamma du_j/dn ds
    std::vector<std::string> warnings;

    int boundary_size() const noexcept { return static_cast<int>(H.rows()); }
    int collocation_size() const noexcept { return static_cast<int>(points.size()); }
};

BemOperators assemble(const BoundaryMesh& mesh, const CollocationSet& collocation, double c,
                      const BemOptions& options = {});

BoundaryReduction reduce_boundary(const BemOperators& ops);

/// G_eff and its gradient at the collocation points.
struct ShearModulusField {
    Eigen::VectorXd G;
    Eigen::VectorXd Gx;
    Eigen::VectorXd Gy;
};

struct WarpingSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd g;
};

/// Equilibrium rows G lap(phi) + G_x phi_x + G_y phi_y = y G_x - x G_y at every collocation point.
WarpingSystem build_warping_system(const BemOperators& ops, const ShearModulusField& shear);

struct WarpingSolution {
    Eigen::VectorXd a;              ///< source coefficients
    Eigen::VectorXd phi_boundary;   ///< gauge: sum = 0
    Eigen::VectorXd flux_boundary;  ///< = beta3
    std::array<Eigen::VectorXd, kDerivativeCount> interior;  ///< at the collocation points
    double equilibrium_residual = 0.0;  ///< max|K a - g| / max|g|
    double condition = 0.0;

    const Eigen::VectorXd& phi() const { return interior[0]; }
    const Eigen::VectorXd& phi_x() const { return interior[1]; }
    const Eigen::VectorXd& phi_y() const { return interior[2]; }
};

WarpingSolution solve_warping(const BemOperators& ops, const ShearModulusField& shear);

struct FieldSample {
    double phi = 0.0;
    double phi_x = 0.0;
    double phi_y = 0.0;
    double phi_xx = 0.0;
    double phi_yy = 0.0;
    bool near_boundary = false;  ///< closer to the boundary than one element length
};

/// Reduced field operators for a fixed set of interior query points.
class FieldEvaluator {
public:
    FieldEvaluator(const BemOperators& ops, const BoundaryMesh& mesh, std::span<const Vec2> queries,
                   Execution exec = Execution::parallel);

    int size() const noexcept { return static_cast<int>(queries_.size()); }
    const std::vector<Vec2>& queries() const noexcept { return queries_; }
    const ReducedField& operators() const noexcept { return reduced_; }
    const std::vector<bool>& near_boundary() const noexcept { return near_boundary_; }

    Eigen::VectorXd component(const WarpingSolution& solution, Derivative d) const;
    std::vector<FieldSample> evaluate(const WarpingSolution& solution) const;

private:
    std::vector<Vec2> queries_;
    std::vector<bool> near_boundary_;
    ReducedField reduced_;
};

/**
 * Derivative of the boundary values along the contour at each element
 * midpoint, from a three-point fit to neighbouring midpoints on the same
 * side (one-sided next to corners). Together with the imposed flux this
 * gives the full gradient on the boundary, where the interior representation
 * of constant elements loses the tangential component.
 */
Eigen::VectorXd boundary_tangential_derivative(const BoundaryMesh& mesh, const Eigen::VectorXd& values);

std::vector<FieldSample> eval_fields(const WarpingSolution& solution, const BemOperators& ops,
                                     const BoundaryMesh& mesh, std::span<const Vec2> queries);

}  // namespace torsolve
