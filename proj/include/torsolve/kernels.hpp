#pragma once

#include "torsolve/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace torsolve {

/// Serial loops are the reference; parallel runs the same loop body under OpenMP.
enum class Execution { serial, parallel };

/// Field-point derivative orders carried by the field operators.
enum class Derivative : int { value = 0, x = 1, y = 2, xx = 3, yy = 4 };
inline constexpr int kDerivativeCount = 5;

/**
 * Integrals over one straight element of the Laplace kernels
 *   single = (1/2pi) ln r,   dbl = (1/2pi) d/dn_xi ln r
 * and their derivatives with respect to the field point, indexed by Derivative.
 * Exact (closed form); the field point must not lie on the element.
 */
struct ElementIntegrals {
    std::array<double, kDerivativeCount> single{};
    std::array<double, kDerivativeCount> dbl{};
};

ElementIntegrals integrate_element(const BoundaryElement& element, const Vec2& field_point);

/// (1/2pi) int ln r over a straight element from its own midpoint.
double self_single_layer(double length);

/// Boundary-to-boundary kernels: Htilde (double layer, zero diagonal) and G.
struct BoundaryKernels {
    Eigen::MatrixXd H;
    Eigen::MatrixXd G;
};

BoundaryKernels boundary_kernels(const BoundaryMesh& mesh, Execution exec);

/// Interior-point kernels, one M x N block per Derivative.
struct FieldKernels {
    std::array<Eigen::MatrixXd, kDerivativeCount> H;
    std::array<Eigen::MatrixXd, kDerivativeCount> G;
};

FieldKernels field_kernels(const BoundaryMesh& mesh, std::span<const Vec2> points, Execution exec);

/// Particular solution u_j and its normal derivative at the element midpoints (N x M).
struct ParticularTraces {
    Eigen::MatrixXd value;
    Eigen::MatrixXd normal;
};

ParticularTraces particular_traces(const BoundaryMesh& mesh, std::span<const Vec2> centers, double c,
                                   Execution exec);

/// Particular-solution derivatives at query points (rows) for every center (cols), per Derivative.
std::array<Eigen::MatrixXd, kDerivativeCount> particular_field(std::span<const Vec2> points,
                                                               std::span<const Vec2> centers, double c,
                                                               Execution exec);

struct GaussRule {
    std::vector<double> nodes;  ///< on [-1, 1]
    std::vector<double> weights;

    static GaussRule legendre(int order);
};

/// int_Gamma du_j/dn ds for each center (the boundary form of int_Omega f_j dOmega).
Eigen::VectorXd particular_flux_integrals(const BoundaryMesh& mesh, std::span<const Vec2> centers, double c,
                                          const GaussRule& rule, Execution exec);

}  // namespace torsolve
