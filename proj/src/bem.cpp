#include "torsolve/bem.hpp"

#include "torsolve/error.hpp"
#include "torsolve/rbf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace torsolve {

namespace {

// F_kl = U_kl + G_kl Un - H_kl U   (interior points, free term 1)
std::array<Eigen::MatrixXd, kDerivativeCount> source_operators(const FieldKernels& kernels,
                                                               const std::array<Eigen::MatrixXd, kDerivativeCount>& u,
                                                               const ParticularTraces& traces) {
    std::array<Eigen::MatrixXd, kDerivativeCount> f;
    for (int d = 0; d < kDerivativeCount; ++d) {
        f[d] = u[d];
        f[d].noalias() += kernels.G[d] * traces.normal;
        f[d].noalias() -= kernels.H[d] * traces.value;
    }
    return f;
}

// d phi = F a + H phi_b - G phi_n  with phi_b = S a + s and phi_n = beta3
ReducedField reduce_field(const FieldKernels& kernels, const std::array<Eigen::MatrixXd, kDerivativeCount>& f,
                          const BoundaryReduction& reduction, const Eigen::VectorXd& beta3) {
    ReducedField r;
    for (int d = 0; d < kDerivativeCount; ++d) {
        r.A[d] = f[d];
        r.A[d].noalias() += kernels.H[d] * reduction.S;
        r.b[d] = kernels.H[d] * reduction.s - kernels.G[d] * beta3;
    }
    return r;
}

}  // namespace

BemOperators assemble(const BoundaryMesh& mesh, const CollocationSet& collocation, double c,
                      const BemOptions& options) {
    if (mesh.size() < 3) throw GeometryError("boundary mesh has fewer than 3 elements");
    if (collocation.size() < 1) throw GeometryError("collocation set is empty");
    for (int k = 0; k < mesh.size(); ++k) {
        if (!(mesh.elements[k].length > 0.0)) {
            std::ostringstream msg;
            msg << "boundary element " << k << " has zero length; quadrature is undefined";
            throw GeometryError(msg.str());
        }
    }

    BemOperators ops;
    ops.shape_parameter = c;
    ops.points = collocation.points;
    const int n = mesh.size();
    const int m = collocation.size();

    for (int j = 0; j < m; ++j) {
        const Vec2& p = ops.points[j];
        if (!mesh.encloses(p)) {
            std::ostringstream msg;
            msg << "collocation point " << j << " (" << p.x() << ", " << p.y() << ") is not inside the boundary mesh";
            throw GeometryError(msg.str());
        }
        double best = std::numeric_limits<double>::infinity();
        int nearest = 0;
        for (int k = 0; k < n; ++k) {
            const double d = (mesh.elements[k].midpoint - p).norm();
            if (d < best) {
                best = d;
                nearest = k;
            }
        }
        const double clearance = mesh.distance(p);
        if (collocation.inset > 0.0 && clearance < collocation.inset * (1.0 - 1e-9)) {
            std::ostringstream msg;
            msg << "near-singular kernels: collocation point " << j << " is " << clearance
                << " from boundary element " << nearest << " (inset " << collocation.inset << ")";
            ops.warnings.push_back(msg.str());
        }
    }

    BoundaryKernels bk = boundary_kernels(mesh, options.exec);
    ops.H = std::move(bk.H);
    ops.H.diagonal().array() -= 0.5;
    ops.G = std::move(bk.G);

    ops.beta3.resize(n);
    for (int k = 0; k < n; ++k) {
        const BoundaryElement& e = mesh.elements[k];
        ops.beta3[k] = e.midpoint.y() * e.normal.x() - e.midpoint.x() * e.normal.y();
    }

    ops.traces = particular_traces(mesh, ops.points, c, options.exec);
    // 1/2 u - Htilde u + G un = -H u + G un
    ops.F = ops.G * ops.traces.normal;
    ops.F.noalias() -= ops.H * ops.traces.value;

    ops.field = field_kernels(mesh, ops.points, options.exec);
    const auto u = particular_field(ops.points, ops.points, c, options.exec);
    ops.F_field = source_operators(ops.field, u, ops.traces);

    ops.laplacian.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) ops.laplacian(i, j) = mq_value((ops.points[i] - ops.points[j]).norm(), c);
    }

    ops.reduction = reduce_boundary(ops);
    ops.reduced = reduce_field(ops.field, ops.F_field, ops.reduction, ops.beta3);
    ops.flux_integrals =
        particular_flux_integrals(mesh, ops.points, c, GaussRule::legendre(options.quadrature_order), options.exec);
    return ops;
}

BoundaryReduction reduce_boundary(const BemOperators& ops) {
    const int n = ops.boundary_size();
    const int m = static_cast<int>(ops.F.cols());
    Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = ops.H;
    bordered.topRightCorner(n, 1).setOnes();
    bordered.bottomLeftCorner(1, n).setOnes();

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << "boundary operator is rank deficient beyond the constant mode (rcond " << rcond << ")";
        throw NumericalError(msg.str());
    }

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 1, m + 1);
    rhs.topLeftCorner(n, m) = -ops.F;
    rhs.topRightCorner(n, 1) = ops.G * ops.beta3;
    const Eigen::MatrixXd sol = lu.solve(rhs);

    BoundaryReduction r;
    r.S = sol.topLeftCorner(n, m);
    r.s = sol.topRightCorner(n, 1);
    r.lambda_a = sol.bottomLeftCorner(1, m);
    r.lambda_0 = sol(n, m);
    return r;
}

WarpingSystem build_warping_system(const BemOperators& ops, const ShearModulusField& shear) {
    const int m = ops.collocation_size();
    if (shear.G.size() != m || shear.Gx.size() != m || shear.Gy.size() != m) {
        throw NumericalError("shear-modulus field does not match the collocation set");
    }
    for (int j = 0; j < m; ++j) {
        if (!(shear.G[j] > 0.0) || !std::isfinite(shear.Gx[j]) || !std::isfinite(shear.Gy[j])) {
            std::ostringstream msg;
            msg << "non-positive or non-finite shear modulus at collocation point " << j << " (G = " << shear.G[j]
                << ")";
            throw NumericalError(msg.str());
        }
    }
    const auto x = Derivative::x;
    const auto y = Derivative::y;
    const Eigen::MatrixXd& ax = ops.reduced.A[static_cast<int>(x)];
    const Eigen::MatrixXd& ay = ops.reduced.A[static_cast<int>(y)];
    const Eigen::VectorXd& bx = ops.reduced.b[static_cast<int>(x)];
    const Eigen::VectorXd& by = ops.reduced.b[static_cast<int>(y)];

    WarpingSystem sys;
    sys.K.resize(m, m);
    sys.g.resize(m);
    for (int j = 0; j < m; ++j) {
        const Vec2& p = ops.points[j];
        sys.K.row(j) = shear.G[j] * ops.laplacian.row(j) + shear.Gx[j] * ax.row(j) + shear.Gy[j] * ay.row(j);
        sys.g[j] = p.y() * shear.Gx[j] - p.x() * shear.Gy[j] - shear.Gx[j] * bx[j] - shear.Gy[j] * by[j];
    }
    return sys;
}

WarpingSolution solve_warping(const BemOperators& ops, const ShearModulusField& shear) {
    const WarpingSystem sys = build_warping_system(ops, shear);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.K);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) {
        std::ostringstream msg;
        msg << "warping system is singular (condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY) << ")";
        throw NumericalError(msg.str());
    }

    WarpingSolution sol;
    sol.condition = 1.0 / rcond;
    sol.a = lu.solve(sys.g);
    sol.phi_boundary = ops.reduction.S * sol.a + ops.reduction.s;
    sol.flux_boundary = ops.beta3;
    for (int d = 0; d < kDerivativeCount; ++d) sol.interior[d] = ops.reduced.A[d] * sol.a + ops.reduced.b[d];
    const double scale = sys.g.cwiseAbs().maxCoeff();
    const double res = (sys.K * sol.a - sys.g).cwiseAbs().maxCoeff();
    sol.equilibrium_residual = scale > 0.0 ? res / scale : res;
    return sol;
}

FieldEvaluator::FieldEvaluator(const BemOperators& ops, const BoundaryMesh& mesh, std::span<const Vec2> queries,
                               Execution exec)
    : queries_(queries.begin(), queries.end()) {
    const double min_length = std::min_element(mesh.elements.begin(), mesh.elements.end(), [](auto& a, auto& b) {
                                  return a.length < b.length;
                              })->length;
    near_boundary_.resize(queries_.size());
    for (std::size_t i = 0; i < queries_.size(); ++i) {
        const Vec2& p = queries_[i];
        if (!mesh.encloses(p)) {
            std::ostringstream msg;
            msg << "field query (" << p.x() << ", " << p.y()
                << ") is on or outside the boundary; kernels are singular there";
            throw GeometryError(msg.str());
        }
        near_boundary_[i] = mesh.distance(p) < min_length;
    }
    const FieldKernels kernels = field_kernels(mesh, queries_, exec);
    const auto u = particular_field(queries_, ops.points, ops.shape_parameter, exec);
    reduced_ = reduce_field(kernels, source_operators(kernels, u, ops.traces), ops.reduction, ops.beta3);
}

Eigen::VectorXd FieldEvaluator::component(const WarpingSolution& solution, Derivative d) const {
    const int i = static_cast<int>(d);
    return reduced_.A[i] * solution.a + reduced_.b[i];
}

std::vector<FieldSample> FieldEvaluator::evaluate(const WarpingSolution& solution) const {
    std::array<Eigen::VectorXd, kDerivativeCount> v;
    for (int d = 0; d < kDerivativeCount; ++d) v[d] = component(solution, static_cast<Derivative>(d));
    std::vector<FieldSample> out(queries_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out[i] = FieldSample{v[0][k], v[1][k], v[2][k], v[3][k], v[4][k], near_boundary_[i]};
    }
    return out;
}

namespace {

// d/ds at s0 of the quadratic through (s[i], v[i]).
double lagrange_slope(const std::array<double, 3>& s, const std::array<double, 3>& v, double s0) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
        double denom = 1.0;
        double num = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            denom *= s[i] - s[j];
            double term = 1.0;
            for (int k = 0; k < 3; ++k) {
                if (k != i && k != j) term *= s0 - s[k];
            }
            num += term;
        }
        d += v[i] * num / denom;
    }
    return d;
}

}  // namespace

Eigen::VectorXd boundary_tangential_derivative(const BoundaryMesh& mesh, const Eigen::VectorXd& values) {
    const int n = mesh.size();
    if (values.size() != n) throw NumericalError("boundary values do not match the mesh");
    // Turns sharper than this mark a corner; inscribed curves turn by about 2 pi / N.
    const double corner_cos = std::cos(10.0 * std::numbers::pi / 180.0);
    auto wrap = [n](int k) { return ((k % n) + n) % n; };
    auto smooth = [&](int a, int b) {  // a and b adjacent, a before b
        return mesh.elements[wrap(a)].tangent.dot(mesh.elements[wrap(b)].tangent) > corner_cos;
    };
    auto gap = [&](int a, int b) { return 0.5 * (mesh.elements[wrap(a)].length + mesh.elements[wrap(b)].length); };

    Eigen::VectorXd d(n);
    for (int k = 0; k < n; ++k) {
        int first = k - 1;
        if (!smooth(k - 1, k) && smooth(k, k + 1) && smooth(k + 1, k + 2)) first = k;
        else if (!smooth(k, k + 1) && smooth(k - 1, k) && smooth(k - 2, k - 1)) first = k - 2;
        const std::array<double, 3> s{0.0, gap(first, first + 1), gap(first, first + 1) + gap(first + 1, first + 2)};
        const std::array<double, 3> v{values[wrap(first)], values[wrap(first + 1)], values[wrap(first + 2)]};
        d[k] = lagrange_slope(s, v, s[k - first]);
    }
    return d;
}

std::vector<FieldSample> eval_fields(const WarpingSolution& solution, const BemOperators& ops,
                                     const BoundaryMesh& mesh, std::span<const Vec2> queries) {
    return FieldEvaluator(ops, mesh, queries).evaluate(solution);
}

}  // namespace torsolve
