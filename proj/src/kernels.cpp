#include "torsolve/kernels.hpp"

#include "torsolve/error.hpp"
#include "torsolve/rbf.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <complex>
#include <numbers>

namespace torsolve {

namespace {

using cd = std::complex<double>;

constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;

cd as_complex(const Vec2& v) { return {v.x(), v.y()}; }

// Integrals of ln(xi - z) and n/(xi - z) along the element are holomorphic in the
// field point z; real parts give the kernels, derivatives follow from
// d/dx Re F = Re F' and d/dy Re F = -Im F'.
template <bool Derivatives>
ElementIntegrals integrate(const BoundaryElement& e, const Vec2& z) {
    const cd w1 = as_complex(e.start - z);
    const cd w2 = as_complex(e.end - z);
    const cd ebar = std::conj(as_complex(e.tangent));
    const cd L = std::log(w2 / w1);  // i * subtended angle + ln(|w2|/|w1|)
    constexpr cd n_ebar{0.0, -1.0};  // outward normal times conj(tangent)

    ElementIntegrals out;
    const cd ig = e.length * (std::log(w1) - 1.0) + ebar * w2 * L;
    out.single[0] = kInv2Pi * ig.real();
    out.dbl[0] = kInv2Pi * (n_ebar * L).real();
    if constexpr (Derivatives) {
        const cd inv1 = 1.0 / w1;
        const cd inv2 = 1.0 / w2;
        const cd ig1 = -ebar * L;
        const cd ig2 = ebar * (inv2 - inv1);
        const cd ih1 = n_ebar * (inv1 - inv2);
        const cd ih2 = n_ebar * (inv1 * inv1 - inv2 * inv2);
        out.single[1] = kInv2Pi * ig1.real();
        out.single[2] = -kInv2Pi * ig1.imag();
        out.single[3] = kInv2Pi * ig2.real();
        out.single[4] = -kInv2Pi * ig2.real();
        out.dbl[1] = kInv2Pi * ih1.real();
        out.dbl[2] = -kInv2Pi * ih1.imag();
        out.dbl[3] = kInv2Pi * ih2.real();
        out.dbl[4] = -kInv2Pi * ih2.real();
    }
    return out;
}

}  // namespace

ElementIntegrals integrate_element(const BoundaryElement& element, const Vec2& field_point) {
    return integrate<true>(element, field_point);
}

double self_single_layer(double length) { return kInv2Pi * length * (std::log(0.5 * length) - 1.0); }

BoundaryKernels boundary_kernels(const BoundaryMesh& mesh, Execution exec) {
    const int n = mesh.size();
    BoundaryKernels k{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
#pragma omp parallel for if (exec == Execution::parallel) schedule(static)
    for (int m = 0; m < n; ++m) {
        const Vec2& x = mesh.elements[m].midpoint;
        for (int e = 0; e < n; ++e) {
            if (e == m) {
                k.H(m, e) = 0.0;
                k.G(m, e) = self_single_layer(mesh.elements[e].length);
                continue;
            }
            const ElementIntegrals in = integrate<false>(mesh.elements[e], x);
            k.H(m, e) = in.dbl[0];
            k.G(m, e) = in.single[0];
        }
    }
    return k;
}

FieldKernels field_kernels(const BoundaryMesh& mesh, std::span<const Vec2> points, Execution exec) {
    const int n = mesh.size();
    const int m = static_cast<int>(points.size());
    FieldKernels k;
    for (int d = 0; d < kDerivativeCount; ++d) {
        k.H[d].resize(m, n);
        k.G[d].resize(m, n);
    }
#pragma omp parallel for if (exec == Execution::parallel) schedule(static)
    for (int i = 0; i < m; ++i) {
        for (int e = 0; e < n; ++e) {
            const ElementIntegrals in = integrate<true>(mesh.elements[e], points[i]);
            for (int d = 0; d < kDerivativeCount; ++d) {
                k.H[d](i, e) = in.dbl[d];
                k.G[d](i, e) = in.single[d];
            }
        }
    }
    return k;
}

ParticularTraces particular_traces(const BoundaryMesh& mesh, std::span<const Vec2> centers, double c,
                                   Execution exec) {
    const int n = mesh.size();
    const int m = static_cast<int>(centers.size());
    ParticularTraces t{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
#pragma omp parallel for if (exec == Execution::parallel) schedule(static)
    for (int k = 0; k < n; ++k) {
        const BoundaryElement& e = mesh.elements[k];
        for (int j = 0; j < m; ++j) {
            const Vec2 d = e.midpoint - centers[j];
            const double r = d.norm();
            t.value(k, j) = mq_particular(r, c);
            // du/dn = u'(r) (d/r).n, written without the 1/r for r -> 0
            t.normal(k, j) = r > 0.0 ? mq_particular_dr(r, c) / r * d.dot(e.normal) : 0.0;
        }
    }
    return t;
}

std::array<Eigen::MatrixXd, kDerivativeCount> particular_field(std::span<const Vec2> points,
                                                               std::span<const Vec2> centers, double c,
                                                               Execution exec) {
    const int p = static_cast<int>(points.size());
    const int m = static_cast<int>(centers.size());
    std::array<Eigen::MatrixXd, kDerivativeCount> u;
    for (auto& block : u) block.resize(p, m);
#pragma omp parallel for if (exec == Execution::parallel) schedule(static)
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < m; ++j) {
            const RadialDerivatives rd = mq_particular_derivatives(points[i] - centers[j], c);
            u[0](i, j) = rd.value;
            u[1](i, j) = rd.gradient.x();
            u[2](i, j) = rd.gradient.y();
            u[3](i, j) = rd.xx;
            u[4](i, j) = rd.yy;
        }
    }
    return u;
}

GaussRule GaussRule::legendre(int order) {
    if (order < 1) throw NumericalError("Gauss-Legendre order must be at least 1");
    GaussRule rule;
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
    for (const double x : zeros) {
        const double dp = boost::math::legendre_p_prime(order, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes.push_back(x);
        rule.weights.push_back(w);
        if (x != 0.0) {
            rule.nodes.push_back(-x);
            rule.weights.push_back(w);
        }
    }
    return rule;
}

Eigen::VectorXd particular_flux_integrals(const BoundaryMesh& mesh, std::span<const Vec2> centers, double c,
                                          const GaussRule& rule, Execution exec) {
    const int m = static_cast<int>(centers.size());
    Eigen::VectorXd q(m);
#pragma omp parallel for if (exec == Execution::parallel) schedule(static)
    for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (const BoundaryElement& e : mesh.elements) {
            const double half = 0.5 * e.length;
            for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
                const Vec2 x = e.midpoint + rule.nodes[g] * half * e.tangent;
                const Vec2 d = x - centers[j];
                const double r = d.norm();
                const double dudn = r > 0.0 ? mq_particular_dr(r, c) / r * d.dot(e.normal) : 0.0;
                sum += rule.weights[g] * half * dudn;
            }
        }
        q[j] = sum;
    }
    return q;
}

}  // namespace torsolve
