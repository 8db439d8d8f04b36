#include "torsolve/rbf.hpp"

#include "torsolve/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace torsolve {

double mq_value(double r, double c) { return std::sqrt(r * r + c * c); }

double mq_particular(double r, double c) {
    const double f = mq_value(r, c);
    return -(c * c * c / 3.0) * std::log(c * f + c * c) + (r * r + 4.0 * c * c) * f / 9.0;
}

namespace {

// u'(r) = r g(r) with g smooth at r = 0; h(r) = g'(r)/r is smooth as well.
double radial_g(double r, double c) {
    const double f = mq_value(r, c);
    return (r * r + 2.0 * c * c) / (3.0 * f) - c * c * c / (3.0 * f * (f + c));
}

double radial_h(double r, double c) {
    const double f = mq_value(r, c);
    const double f3 = f * f * f;
    return r * r / (3.0 * f3) + (c * c * c / 3.0) * (2.0 * f + c) / (f3 * (f + c) * (f + c));
}

}  // namespace

double mq_particular_dr(double r, double c) { return r * radial_g(r, c); }

double mq_particular_laplacian(double r, double c) {
    return 2.0 * radial_g(r, c) + r * r * radial_h(r, c);
}

RadialDerivatives mq_particular_derivatives(const Vec2& d, double c) {
    const double r = d.norm();
    const double g = radial_g(r, c);
    const double h = radial_h(r, c);
    RadialDerivatives out;
    out.value = mq_particular(r, c);
    out.gradient = g * d;
    out.xx = g + h * d.x() * d.x();
    out.yy = g + h * d.y() * d.y();
    out.xy = h * d.x() * d.y();
    return out;
}

InterpolationMatrix::InterpolationMatrix(std::span<const Vec2> centers, double c,
                                         InterpolationOptions options)
    : centers_(centers.begin(), centers.end()), c_(c) {
    if (!(c > 0.0)) throw NumericalError("MQ shape parameter c must be positive");
    const int m = static_cast<int>(centers_.size());
    if (m < 1) throw NumericalError("interpolation needs at least one center");
    matrix_.resize(m, m);
    for (int i = 0; i < m; ++i) {
        matrix_(i, i) = c;
        for (int j = i + 1; j < m; ++j) {
            const double v = mq_value((centers_[i] - centers_[j]).norm(), c);
            matrix_(i, j) = v;
            matrix_(j, i) = v;
        }
    }
    Eigen::MatrixXd shifted = matrix_;
    if (options.tikhonov > 0.0) shifted.diagonal().array() += options.tikhonov;
    lu_.compute(shifted);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition_ <= options.condition_cap)) {
        std::ostringstream msg;
        msg << "MQ collocation matrix is ill-conditioned (condition estimate " << condition_
            << " > cap " << options.condition_cap << ") for shape parameter c = " << c
            << "; rescale the section coordinates or choose a different c";
        throw NumericalError(msg.str());
    }
}

Eigen::VectorXd InterpolationMatrix::fit(const Eigen::VectorXd& values) const {
    if (values.size() != size()) throw NumericalError("fit: value count does not match the centers");
    return lu_.solve(values);
}

Eigen::MatrixXd InterpolationMatrix::solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

Eigen::VectorXd fit_field(const InterpolationMatrix& interp, const Eigen::VectorXd& values) {
    return interp.fit(values);
}

SeriesValue eval_series(std::span<const Vec2> centers, double c, const Eigen::VectorXd& coefficients,
                        const Vec2& point) {
    SeriesValue out;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Vec2 d = point - centers[j];
        const double f = mq_value(d.norm(), c);
        out.value += coefficients[static_cast<Eigen::Index>(j)] * f;
        out.gradient += coefficients[static_cast<Eigen::Index>(j)] * d / f;
    }
    return out;
}

SeriesGradientOperators series_gradient_operators(std::span<const Vec2> centers, double c) {
    const auto m = static_cast<Eigen::Index>(centers.size());
    SeriesGradientOperators ops{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const Vec2 d = centers[i] - centers[j];
            const double f = mq_value(d.norm(), c);
            ops.dx(i, j) = d.x() / f;
            ops.dy(i, j) = d.y() / f;
        }
    }
    return ops;
}

}  // namespace torsolve
