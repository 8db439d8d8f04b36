#include "torsolve/plasticity.hpp"

#include "torsolve/error.hpp"
#include "torsolve/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace torsolve {

namespace {

double default_inset(const SectionShape& shape, const DiscretizationOptions& o) {
    if (o.inset > 0.0) return o.inset;
    if (o.boundary_elements < 1) throw ConfigError("boundary element count must be positive");
    return shape.perimeter() / o.boundary_elements;
}

std::vector<Vec2> midpoints(const BoundaryMesh& mesh) {
    std::vector<Vec2> probes;
    probes.reserve(mesh.elements.size());
    for (const BoundaryElement& e : mesh.elements) probes.push_back(e.midpoint);
    return probes;
}

double curve_stress(double eps, const BilinearCurve& c, double hardening_floor) {
    const double eps_y = c.yield_strain();
    if (eps <= eps_y) return c.E * eps;
    return c.sigma_y + std::max(c.E_h, hardening_floor * c.E) * (eps - eps_y);
}

}  // namespace

int PlasticState::plastic_count() const {
    return static_cast<int>(std::count(plastic.begin(), plastic.end(), true));
}

double PlasticState::plastic_fraction() const {
    return plastic.empty() ? 0.0 : static_cast<double>(plastic_count()) / static_cast<double>(plastic.size());
}

TorsionModel::TorsionModel(SectionShape shape, MaterialModel material, DiscretizationOptions options)
    : shape_(std::move(shape)),
      model_(std::move(material)),
      options_(options),
      mesh_(discretize_boundary(shape_, options_.boundary_elements)),
      collocation_(generate_collocation(shape_, options_.collocation_target, default_inset(shape_, options_))),
      material_(sample_field(model_, collocation_.points)),
      interp_(collocation_.points, options_.shape_parameter, options_.interpolation) {
    const SeriesGradientOperators d = series_gradient_operators(collocation_.points, options_.shape_parameter);
    // Phi is symmetric, so D Phi^{-1} = (Phi^{-1} D^T)^T.
    grad_x_ = interp_.solve(d.dx.transpose()).transpose();
    grad_y_ = interp_.solve(d.dy.transpose()).transpose();
    // MQ with a small shape parameter reproduces constants only roughly; zero row sums make
    // the gradient of a uniform field vanish exactly.
    const Eigen::VectorXd sx = grad_x_.rowwise().sum();
    const Eigen::VectorXd sy = grad_y_.rowwise().sum();
    grad_x_.diagonal() -= sx;
    grad_y_.diagonal() -= sy;

    ops_ = assemble(mesh_, collocation_, options_.shape_parameter,
                    BemOptions{options_.quadrature_order, options_.exec});

    probe_points_ = midpoints(mesh_);
    probe_material_ = sample_field(model_, probe_points_);

    sigma_y_min_ = std::min(material_.min_yield_stress(), probe_material_.min_yield_stress());
    modulus_scale_ = material_.max_modulus();
    first_yield_ = compute_first_yield();
}

Eigen::VectorXd TorsionModel::elastic_moduli() const {
    Eigen::VectorXd e(size());
    for (int j = 0; j < size(); ++j) e[j] = material_.curves[j].E;
    return e;
}

Eigen::VectorXd TorsionModel::coefficients(const Eigen::VectorXd& nodal) const { return interp_.fit(nodal); }

Eigen::VectorXd TorsionModel::nodal_values(const Eigen::VectorXd& k) const { return interp_.matrix() * k; }

ShearModulusField TorsionModel::shear_field(const Eigen::VectorXd& e) const {
    const int m = size();
    const Eigen::VectorXd ex = grad_x_ * e;
    const Eigen::VectorXd ey = grad_y_ * e;
    ShearModulusField s{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m)};
    for (int j = 0; j < m; ++j) {
        const BilinearCurve& c = material_.curves[j];
        const Vec2& gE = material_.grad_E[j];
        const Vec2& gnu = material_.grad_nu[j];
        // G = E_eff / D with D = 2(1 + nu_eff) = 3 + (2 nu - 1) E_eff / E
        const double ratio = e[j] / c.E;
        const double D = 3.0 + (2.0 * c.nu - 1.0) * ratio;
        const double Dx = 2.0 * gnu.x() * ratio + (2.0 * c.nu - 1.0) * (ex[j] - ratio * gE.x()) / c.E;
        const double Dy = 2.0 * gnu.y() * ratio + (2.0 * c.nu - 1.0) * (ey[j] - ratio * gE.y()) / c.E;
        s.G[j] = e[j] / D;
        s.Gx[j] = (ex[j] * D - e[j] * Dx) / (D * D);
        s.Gy[j] = (ey[j] * D - e[j] * Dy) / (D * D);
    }
    return s;
}

Response TorsionModel::respond(const Eigen::VectorXd& e, double theta, double hardening_floor) const {
    const int m = size();
    if (e.size() != m) throw NumericalError("E_eff field does not match the collocation set");
    for (int j = 0; j < m; ++j) {
        if (!(e[j] > 0.0) || !std::isfinite(e[j])) {
            std::ostringstream msg;
            msg << "effective modulus must be positive (got " << e[j] << " at collocation point " << j << ")";
            throw NumericalError(msg.str());
        }
    }

    Response r;
    r.theta = theta;
    r.E_eff = e;
    r.shear = shear_field(e);
    r.warping = solve_warping(ops_, r.shear);

    const Eigen::VectorXd& px = r.warping.phi_x();
    const Eigen::VectorXd& py = r.warping.phi_y();
    r.nu_eff.resize(m);
    r.gamma_xz.resize(m);
    r.gamma_yz.resize(m);
    r.tau_xz.resize(m);
    r.tau_yz.resize(m);
    r.sigma_eq.resize(m);
    r.eps_eq.resize(m);
    r.residual.resize(m);
    const double sqrt3 = std::sqrt(3.0);
    for (int j = 0; j < m; ++j) {
        const Vec2& p = collocation_.points[j];
        const BilinearCurve& c = material_.curves[j];
        r.nu_eff[j] = effective_poisson(e[j], c.E, c.nu);
        r.gamma_xz[j] = theta * (px[j] - p.y());
        r.gamma_yz[j] = theta * (py[j] + p.x());
        r.tau_xz[j] = r.shear.G[j] * r.gamma_xz[j];
        r.tau_yz[j] = r.shear.G[j] * r.gamma_yz[j];
        r.sigma_eq[j] = sqrt3 * std::hypot(r.tau_xz[j], r.tau_yz[j]);
        r.eps_eq[j] = sqrt3 * std::hypot(r.gamma_xz[j], r.gamma_yz[j]) / (2.0 * (1.0 + r.nu_eff[j]));
        r.residual[j] = r.sigma_eq[j] - curve_stress(r.eps_eq[j], c, hardening_floor);
    }
    return r;
}

Eigen::VectorXd TorsionModel::residual(const Eigen::VectorXd& e, double theta, double hardening_floor) const {
    return respond(e, theta, hardening_floor).residual;
}

Eigen::VectorXd TorsionModel::residual_from_coefficients(const Eigen::VectorXd& k, double theta,
                                                         double hardening_floor) const {
    return residual(nodal_values(k), theta, hardening_floor);
}

Eigen::VectorXd TorsionModel::probe_strain(const WarpingSolution& warping, double theta) const {
    // The flux condition makes the normal shear strain vanish, leaving the tangential one.
    const Eigen::VectorXd phi_s = boundary_tangential_derivative(mesh_, warping.phi_boundary);
    Eigen::VectorXd eps(phi_s.size());
    for (int k = 0; k < mesh_.size(); ++k) {
        const BoundaryElement& e = mesh_.elements[k];
        const Vec2& p = e.midpoint;
        const double g = std::abs(theta * (phi_s[k] - p.y() * e.tangent.x() + p.x() * e.tangent.y()));
        eps[k] = std::sqrt(3.0) * g / (2.0 * (1.0 + probe_material_.curves[k].nu));
    }
    return eps;
}

FirstYield TorsionModel::compute_first_yield() const {
    const Response r = respond(elastic_moduli(), 1.0);
    FirstYield fy;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < size(); ++j) {
        if (r.eps_eq[j] <= 0.0) continue;
        const double t = material_.curves[j].yield_strain() / r.eps_eq[j];
        if (t < best) {
            best = t;
            fy.index = j;
            fy.on_boundary_probe = false;
            fy.location = collocation_.points[j];
        }
    }
    const Eigen::VectorXd eps = probe_strain(r.warping, 1.0);
    for (int i = 0; i < static_cast<int>(eps.size()); ++i) {
        if (eps[i] <= 0.0) continue;
        const double t = probe_material_.curves[i].yield_strain() / eps[i];
        if (t < best) {
            best = t;
            fy.index = i;
            fy.on_boundary_probe = true;
            fy.location = probe_points_[i];
        }
    }
    if (!std::isfinite(best)) throw NumericalError("elastic strain field vanishes; first yield is undefined");
    fy.theta = best;
    const Eigen::VectorXd density = moment_density(collocation_.points, r.tau_xz, r.tau_yz);
    fy.moment_per_twist = boundary_moment(interp_, ops_.flux_integrals, density);
    fy.moment = fy.theta * fy.moment_per_twist;
    return fy;
}

PlasticState TorsionModel::finish(double theta, Response response, const SolverOptions&, int iterations,
                                  std::vector<double> history) const {
    PlasticState s;
    s.theta = theta;
    s.coefficients = interp_.fit(response.E_eff);
    s.plastic.resize(static_cast<std::size_t>(size()));
    for (int j = 0; j < size(); ++j) s.plastic[j] = response.eps_eq[j] > material_.curves[j].yield_strain();
    s.residual_norm = response.residual.cwiseAbs().maxCoeff() / sigma_y_min_;
    s.iterations = iterations;
    s.history = std::move(history);
    const Eigen::VectorXd density = moment_density(collocation_.points, response.tau_xz, response.tau_yz);
    s.moment = boundary_moment(interp_, ops_.flux_integrals, density);
    s.moment_direct = direct_moment(collocation_.weights, density);
    s.moment_mismatch = std::abs(s.moment - s.moment_direct) > 0.01 * std::abs(s.moment_direct);
    s.response = std::move(response);
    return s;
}

PlasticState TorsionModel::solve(double theta, const SolverOptions& opt,
                                 const std::optional<Eigen::VectorXd>& warm_start) const {
    if (!std::isfinite(theta) || theta == 0.0) throw ConfigError("twist theta must be finite and nonzero");
    if (!(opt.tol > 0.0) || opt.max_iter < 1 || opt.max_halvings < 0) {
        throw ConfigError("solver tolerance, iteration and halving limits must be positive");
    }
    const int m = size();
    const double floor = opt.hardening_floor;
    Eigen::VectorXd e = warm_start ? *warm_start : elastic_moduli();
    Response cur = respond(e, theta, floor);
    auto scaled = [&](const Eigen::VectorXd& r) { return r.cwiseAbs().maxCoeff() / sigma_y_min_; };
    double norm = scaled(cur.residual);
    std::vector<double> history{norm};

    auto fd_jacobian = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& r0) {
        Eigen::MatrixXd J(m, m);
        bool failed = false;
        std::string reason;
#pragma omp parallel for if (opt.exec == Execution::parallel) schedule(dynamic)
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd xj = x;
            const double h = std::max(1e-6 * std::abs(x[j]), 1e-6 * modulus_scale_);
            xj[j] += h;
            try {
                J.col(j) = (residual(xj, theta, floor) - r0) / h;
            } catch (const Error& err) {
#pragma omp critical(torsolve_jacobian_error)
                {
                    failed = true;
                    reason = err.what();
                }
            }
        }
        if (failed) throw NumericalError("finite-difference Jacobian column failed: " + reason);
        return J;
    };

    Eigen::MatrixXd J;
    bool fresh = false;
    int since_refresh = 0;
    int updates = 0;
    while (!(norm < opt.tol)) {
        if (updates >= opt.max_iter) {
            std::ostringstream msg;
            msg << "Newton iteration did not converge at theta = " << theta << " after " << opt.max_iter
                << " updates (scaled residual " << norm << ")";
            throw ConvergenceError(msg.str(), history);
        }
        if (opt.jacobian == JacobianMode::finite_difference || J.size() == 0 ||
            since_refresh >= opt.broyden_refresh) {
            J = fd_jacobian(e, cur.residual);
            fresh = true;
            since_refresh = 0;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd delta = -lu.solve(cur.residual);
        if (!delta.allFinite()) {
            throw ConvergenceError("Newton step is not finite (singular Jacobian)", history);
        }

        const double base = cur.residual.norm();
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial_e;
        Response trial;
        for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5) {
            trial_e = e + step * delta;
            if ((trial_e.array() <= 0.0).any()) continue;
            try {
                trial = respond(trial_e, theta, floor);
            } catch (const NumericalError&) {
                continue;
            }
            if (trial.residual.norm() < base) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (opt.jacobian == JacobianMode::broyden && !fresh) {
                J.resize(0, 0);
                since_refresh = opt.broyden_refresh;
                continue;
            }
            std::ostringstream msg;
            msg << "line search failed at theta = " << theta << " after " << opt.max_halvings
                << " halvings (scaled residual " << norm << ")";
            throw ConvergenceError(msg.str(), history);
        }
        if (opt.jacobian == JacobianMode::broyden) {
            const Eigen::VectorXd de = trial_e - e;
            const Eigen::VectorXd dr = trial.residual - cur.residual;
            J.noalias() += ((dr - J * de) / de.squaredNorm()) * de.transpose();
            fresh = false;
            ++since_refresh;
        }
        e = std::move(trial_e);
        cur = std::move(trial);
        norm = scaled(cur.residual);
        history.push_back(norm);
        ++updates;
    }
    return finish(theta, std::move(cur), opt, updates + 1, std::move(history));
}

namespace {

// Solve at `to` starting from `from`; on failure bisect the twist interval a few times.
PlasticState advance(const TorsionModel& model, const SolverOptions& opt, double from_theta,
                     const std::optional<Eigen::VectorXd>& from_e, double to_theta, int depth) {
    try {
        return model.solve(to_theta, opt, from_e);
    } catch (const Error&) {
        if (depth >= 4) throw;
    }
    const double mid = 0.5 * (from_theta + to_theta);
    const PlasticState half = advance(model, opt, from_theta, from_e, mid, depth + 1);
    return advance(model, opt, mid, half.response.E_eff, to_theta, depth + 1);
}

}  // namespace

PlasticState TorsionModel::solve_continued(double theta, const SolverOptions& opt, double max_step) const {
    if (!(max_step > 1.0)) throw ConfigError("continuation step ratio must exceed 1");
    const double theta_el = first_yield_.theta;
    const double ratio = std::abs(theta) / theta_el;
    if (ratio <= 1.0) return solve(theta, opt);
    const double sign = theta < 0.0 ? -1.0 : 1.0;
    const int steps = static_cast<int>(std::ceil(std::log(ratio) / std::log(max_step)));
    std::optional<Eigen::VectorXd> warm;
    double from = sign * theta_el;
    PlasticState state;
    for (int i = 1; i <= steps; ++i) {
        const double t = i == steps ? theta : sign * theta_el * std::pow(ratio, static_cast<double>(i) / steps);
        state = advance(*this, opt, from, warm, t, 0);
        warm = state.response.E_eff;
        from = t;
    }
    return state;
}

SweepResult TorsionModel::sweep(std::span<const double> ratios, const SolverOptions& opt) const {
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0) || (i > 0 && !(ratios[i] > ratios[i - 1]))) {
            throw ConfigError("twist schedule must be positive and strictly increasing");
        }
    }
    SweepResult result;
    result.first_yield = first_yield_;
    std::optional<Eigen::VectorXd> warm;
    double from = first_yield_.theta * std::min(1.0, ratios.empty() ? 1.0 : ratios.front());
    for (const double ratio : ratios) {
        const double theta = ratio * first_yield_.theta;
        try {
            PlasticState state = warm              ? advance(*this, opt, from, warm, theta, 0)
                                 : ratio > 1.0 ? solve_continued(theta, opt)
                                               : solve(theta, opt);
            SweepStep step;
            step.theta = theta;
            step.theta_ratio = ratio;
            step.moment = state.moment;
            step.moment_ratio = state.moment / first_yield_.moment;
            warm = state.response.E_eff;
            from = theta;
            step.state = std::move(state);
            result.steps.push_back(std::move(step));
        } catch (const ConvergenceError& err) {
            result.complete = false;
            result.failure = err.what();
            result.failure_is_convergence = true;
            break;
        } catch (const Error& err) {
            result.complete = false;
            result.failure = err.what();
            break;
        }
    }
    return result;
}

std::vector<double> default_schedule(double max_ratio, int steps) {
    if (!(max_ratio > 0.5) || steps < 2) throw ConfigError("schedule needs max ratio > 0.5 and at least 2 steps");
    std::vector<double> r(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) r[i] = 0.5 * std::pow(max_ratio / 0.5, static_cast<double>(i) / (steps - 1));
    r.back() = max_ratio;
    return r;
}

}  // namespace torsolve
