#pragma once

#include "torsolve/geometry.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace torsolve {

/// Multiquadric sqrt(r^2 + c^2).
double mq_value(double r, double c);

/**
 * Particular solution u of lap(u) = sqrt(r^2 + c^2):
 *
 *   u = -(c^3/3) ln(c sqrt(r^2+c^2) + c^2) + (1/9)(r^2 + 4c^2) sqrt(r^2+c^2)
 *
 * The shape parameter c carries length units, so these are not scale-free.
 */
double mq_particular(double r, double c);

/// du/dr of the particular solution.
double mq_particular_dr(double r, double c);

/// Closed-form Laplacian of the particular solution (equals mq_value).
double mq_particular_laplacian(double r, double c);

/// Derivatives of a radial function evaluated at offset d = x - center.
struct RadialDerivatives {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

RadialDerivatives mq_particular_derivatives(const Vec2& d, double c);

struct InterpolationOptions {
    /// Diagonal shift added to the collocation matrix (0 = off).
    double tikhonov = 0.0;
    /// Largest acceptable condition estimate.
    double condition_cap = 1e12;
};

/// Factorised MQ collocation matrix Phi_ij = f_j(|x_i - x_j|).
class InterpolationMatrix {
public:
    InterpolationMatrix(std::span<const Vec2> centers, double c, InterpolationOptions options = {});

    int size() const noexcept { return static_cast<int>(matrix_.rows()); }
    double shape_parameter() const noexcept { return c_; }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    const std::vector<Vec2>& centers() const noexcept { return centers_; }
    double condition_estimate() const noexcept { return condition_; }

    /// Coefficients a with Phi a = values.
    Eigen::VectorXd fit(const Eigen::VectorXd& values) const;
    /// Phi^{-1} B for a block of right-hand sides.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    std::vector<Vec2> centers_;
    double c_;
    Eigen::MatrixXd matrix_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_ = 0.0;
};

Eigen::VectorXd fit_field(const InterpolationMatrix& interp, const Eigen::VectorXd& values);

struct SeriesValue {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
};

/// sum_j k_j f_j(p) and its analytic gradient.
SeriesValue eval_series(std::span<const Vec2> centers, double c, const Eigen::VectorXd& coefficients,
                        const Vec2& point);

/// Matrices mapping coefficients to d/dx and d/dy of the series at the centers.
struct SeriesGradientOperators {
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

SeriesGradientOperators series_gradient_operators(std::span<const Vec2> centers, double c);

}  // namespace torsolve
