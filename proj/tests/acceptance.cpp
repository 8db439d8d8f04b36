// Acceptance checks for the solver, one criterion per invocation:
//   acceptance --criterion N      (N = 1..7, or "all")
// Each check prints a single [PASS]/[FAIL] line and the exit status is
// nonzero on failure. Detail lines go to stdout before the verdict.

#include "torsolve/bem.hpp"
#include "torsolve/error.hpp"
#include "torsolve/plasticity.hpp"
#include "torsolve/postprocess.hpp"
#include "torsolve/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace torsolve;

namespace {

const BilinearCurve kSteel{210600, 0.3, 24, 0};

DiscretizationOptions grid(int n, int m) {
    DiscretizationOptions d;
    d.boundary_elements = n;
    d.collocation_target = m;
    return d;
}

TtoFgm graded(double k) {
    TtoFgm f;
    f.ceramic = {5000, 0.25};
    f.metal = {3000, 0.25, 5, 500};
    f.exponent = k;
    f.q = std::numeric_limits<double>::infinity();
    f.height = 10;
    return f;
}

struct Verdict {
    bool pass = true;
    std::string summary;
};

void detail(const char* fmt, auto... args) {
    std::printf("  ");
    std::printf(fmt, args...);
    std::printf("\n");
}

// Rectangle sweep against reference torque ratios.
Verdict criterion1() {
    const TorsionModel m(SectionShape::rectangle(5, 10), kSteel, grid(300, 450));
    const std::vector<double> ratios{1.09, 1.50, 1.90, 2.45, 3.00};
    const std::vector<double> expected{1.08, 1.36, 1.50, 1.58, 1.63};
    const SweepResult r = m.sweep(ratios, SolverOptions{});
    Verdict v;
    if (!r.complete) return {false, "sweep failed: " + r.failure};
    double worst = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double err = r.steps[i].moment_ratio - expected[i];
        worst = std::max(worst, std::abs(err));
        detail("theta/theta_el %.2f  Mt/M_el %.4f  target %.2f  error %+.4f", ratios[i], r.steps[i].moment_ratio,
               expected[i], err);
        if (std::abs(err) > 0.03) v.pass = false;
    }
    std::ostringstream s;
    s << "Mt/M_el within 0.03 at five twists (worst deviation " << worst << ")";
    v.summary = s.str();
    return v;
}

// Torque ratio at theta/theta_el = 3 over a range of collocation counts.
Verdict criterion2() {
    const std::vector<int> counts{98, 162, 200, 300, 450};
    const std::vector<double> expected{1.66, 1.65, 1.65, 1.64, 1.63};
    Verdict v;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const TorsionModel m(SectionShape::rectangle(5, 10), kSteel, grid(300, counts[i]));
        const PlasticState s = m.solve_continued(3.0 * m.first_yield().theta, SolverOptions{});
        const double ratio = s.moment / m.first_yield().moment;
        detail("M target %d (actual %d)  Mt/M_el %.4f  target %.2f", counts[i], m.size(), ratio, expected[i]);
        if (std::abs(ratio - expected[i]) > 0.03) v.pass = false;
        if (counts[i] >= 200) {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    detail("spread over M >= 200: %.4f", hi - lo);
    if (hi - lo > 0.02) v.pass = false;
    std::ostringstream s;
    s << "convergence table within 0.03 and spread " << hi - lo << " <= 0.02 for M >= 200";
    v.summary = s.str();
    return v;
}

Verdict criterion3() {
    Verdict v;
    const TorsionModel rect(SectionShape::rectangle(5, 10), kSteel, grid(300, 450));
    const double e_rect = rect.first_yield().moment / 852.2 - 1;
    detail("rectangle M_el %.2f (852.2, %+.3f%%)", rect.first_yield().moment, 100 * e_rect);

    const TorsionModel tri(SectionShape::equilateral_triangle(10), kSteel, grid(300, 450));
    const double e_tri = tri.first_yield().moment / 692.3 - 1;
    detail("triangle M_el %.2f (692.3, %+.3f%%)", tri.first_yield().moment, 100 * e_tri);

    const BilinearCurve elastic{210600, 0.3, 1e9, 0};
    const TorsionModel circ(SectionShape::circle(1), elastic, grid(300, 450));
    const double theta = 1e-3;
    const PlasticState cs = circ.solve(theta, SolverOptions{});
    const double G = 210600 / 2.6;
    const double e_circ = cs.moment / (G * theta * std::numbers::pi / 2) - 1;
    detail("circle Mt / (G theta pi R^4 / 2) - 1 = %+.4f%%", 100 * e_circ);

    const double J = rect.first_yield().moment_per_twist / (210600 / 2.6);
    const double J_ref = rectangle_torsion_constant(5, 10);
    const double e_J = J / J_ref - 1;
    detail("rectangle J %.4f (series %.4f, %+.3f%%)", J, J_ref, 100 * e_J);

    v.pass = std::abs(e_rect) <= 0.02 && std::abs(e_tri) <= 0.02 && std::abs(e_circ) <= 0.005 &&
             std::abs(e_J) <= 0.01;
    v.summary = "first-yield torques within 2%, circle within 0.5%, torsion constant within 1%";
    return v;
}

Verdict criterion4() {
    const TorsionModel m(SectionShape::equilateral_triangle(10), kSteel, grid(300, 450));
    const PlasticState s = m.solve_continued(4.0 * m.first_yield().theta, SolverOptions{});
    const double ratio = s.moment / m.first_yield().moment;
    detail("triangle theta/theta_el 4  Mt/M_el %.4f", ratio);
    Verdict v;
    v.pass = std::abs(ratio - 1.645) <= 0.025 && ratio >= 1.60 && ratio <= 1.67;
    std::ostringstream str;
    str << "triangle Mt/M_el = " << ratio << " in 1.645 +- 0.025 and [1.60, 1.67]";
    v.summary = str.str();
    return v;
}

Verdict criterion5() {
    const TorsionModel m(SectionShape::rectangle(5, 10), kSteel, grid(300, 450));
    const double m_pl = 1443.4;
    const SweepResult r = m.sweep(default_schedule(4.75, 12), SolverOptions{});
    if (!r.complete) return {false, "sweep failed: " + r.failure};
    Verdict v;
    for (const SweepStep& s : r.steps) {
        detail("theta/theta_el %.3f  Mt %.2f  Mt/M_pl %.4f", s.theta_ratio, s.moment, s.moment / m_pl);
        if (s.moment >= m_pl) v.pass = false;
    }
    const double last = r.steps.back().moment;
    if (last <= 0.9 * m_pl) v.pass = false;
    std::ostringstream str;
    str << "Mt below 1443.4 along the sweep, final Mt/M_pl = " << last / m_pl << " > 0.9";
    v.summary = str.str();
    return v;
}

Verdict criterion6() {
    Verdict v;
    const DiscretizationOptions d = grid(300, 450);
    const auto shape = SectionShape::rectangle(5, 10);
    const std::vector<double> ratios{1.0, 1.5, 2.0, 3.0};

    // Limits: graded sweeps against the pure end members at the same absolute twist.
    auto compare = [&](double k, const BilinearCurve& pure, double tol, const char* label) {
        const TorsionModel fg(shape, graded(k), d);
        const TorsionModel ref(shape, pure, d);
        const SweepResult r = fg.sweep(ratios, SolverOptions{});
        if (!r.complete) {
            detail("k = %g sweep failed: %s", k, r.failure.c_str());
            return false;
        }
        bool ok = true;
        for (const SweepStep& s : r.steps) {
            const PlasticState p = ref.solve_continued(s.theta, SolverOptions{});
            const double err = s.moment / p.moment - 1;
            detail("k = %g vs pure %s  theta %.4e  Mt %.4f / %.4f  (%+.3f%%)", k, label, s.theta, s.moment, p.moment,
                   100 * err);
            if (std::abs(err) > tol) ok = false;
        }
        return ok;
    };
    const TtoFgm shape_fgm = graded(1.0);
    const BilinearCurve ceramic = tto_point(0.5 * shape_fgm.height, shape_fgm);
    const BilinearCurve metal = tto_point(-0.5 * shape_fgm.height, shape_fgm);
    const bool lim_c = compare(0.001, ceramic, 0.01, "ceramic");
    const bool lim_m = compare(100.0, metal, 0.02, "metal");

    // Onset location and spread ordering.
    const std::vector<double> ks{0.1, 1.0, 3.0, 10.0};
    const double fixed_ratio = 1.85;
    bool onset = true;
    bool ordered = true;
    double prev = -1.0;
    for (double k : ks) {
        const TorsionModel fg(shape, graded(k), d);
        const FirstYield& fy = fg.first_yield();
        detail("k = %g  first yield at (%.3f, %.3f) %s", k, fy.location.x(), fy.location.y(),
               fy.on_boundary_probe ? "boundary probe" : "interior point");
        if (!fy.on_boundary_probe) onset = false;
        const PlasticState s = fg.solve_continued(fixed_ratio * fy.theta, SolverOptions{});
        const double frac = plastic_region(s, fg).fraction;
        detail("k = %g  plastic fraction at theta/theta_el %.2f: %.4f", k, fixed_ratio, frac);
        if (frac < prev) ordered = false;
        prev = frac;
    }
    detail("limits: ceramic %s, metal %s; onset %s; ordering in k %s", lim_c ? "ok" : "FAIL", lim_m ? "ok" : "FAIL",
           onset ? "ok" : "FAIL", ordered ? "ok" : "FAIL");
    v.pass = lim_c && lim_m && onset && ordered;
    v.summary = "graded limits (1%, 2%), boundary onset, plastic fraction nondecreasing in k";
    return v;
}

// Properties that every converged state must satisfy.
bool check_state(const TorsionModel& m, const PlasticState& s, const SolverOptions& opt, std::string& why) {
    const double sy = m.material().min_yield_stress();
    const Eigen::VectorXd fresh = m.residual(s.response.E_eff, s.theta, opt.hardening_floor);
    std::ostringstream w;
    bool ok = true;
    if (!(s.response.warping.equilibrium_residual < 1e-8)) {
        w << " equilibrium " << s.response.warping.equilibrium_residual;
        ok = false;
    }
    if (!(fresh.cwiseAbs().maxCoeff() <= 1e-6 * sy)) {
        w << " membership " << fresh.cwiseAbs().maxCoeff() / sy;
        ok = false;
    }
    for (int j = 0; j < m.size(); ++j) {
        const double E = m.material().curves[j].E;
        const double Ee = s.response.E_eff[j];
        if (Ee > E * (1 + 1e-6)) {
            w << " E_eff>E at " << j;
            ok = false;
            break;
        }
        const double sig = s.response.sigma_eq[j];
        if (std::abs(sig - Ee * s.response.eps_eq[j]) > 1e-10 * std::max(std::abs(sig), 1e-300)) {
            w << " secant identity at " << j;
            ok = false;
            break;
        }
    }
    if (std::abs(s.moment - s.moment_direct) > 0.01 * std::abs(s.moment_direct)) {
        w << " moments " << s.moment << " vs " << s.moment_direct;
        ok = false;
    }
    why = w.str();
    return ok;
}

Verdict criterion7() {
    Verdict v;
    int states = 0;
    auto run = [&](const char* name, const TorsionModel& m, const std::vector<double>& ratios) {
        const Eigen::VectorXd h1 = m.operators().H.rowwise().sum();
        const double scale = m.operators().H.cwiseAbs().maxCoeff();
        if (h1.cwiseAbs().maxCoeff() > 1e-12 * scale * m.operators().boundary_size()) {
            detail("%s: H 1 = %.3e", name, h1.cwiseAbs().maxCoeff());
            v.pass = false;
        }
        const SweepResult r = m.sweep(ratios, SolverOptions{});
        if (!r.complete) {
            detail("%s: sweep failed: %s", name, r.failure.c_str());
            v.pass = false;
        }
        for (const SweepStep& s : r.steps) {
            std::string why;
            ++states;
            if (!check_state(m, s.state, SolverOptions{}, why)) {
                detail("%s theta/theta_el %.3f:%s", name, s.theta_ratio, why.c_str());
                v.pass = false;
            }
        }
        detail("%s: %zu converged states checked", name, r.steps.size());
    };
    const std::vector<double> ratios{0.5, 1.09, 1.5, 2.45, 3.0};
    run("rectangle EPP", TorsionModel(SectionShape::rectangle(5, 10), kSteel, grid(300, 450)), ratios);
    run("triangle EPP", TorsionModel(SectionShape::equilateral_triangle(10), kSteel, grid(240, 300)),
        {0.5, 1.5, 2.5, 4.0});
    run("triangle hardening",
        TorsionModel(SectionShape::equilateral_triangle(10), BilinearCurve{210600, 0.3, 24, 0.3 * 210600},
                     grid(240, 300)),
        {1.5, 3.0});
    run("graded k=1", TorsionModel(SectionShape::rectangle(5, 10), graded(1.0), grid(200, 250)), {1.0, 1.85, 2.6});

    // Laplacian of the particular solution against a five-point stencil.
    double worst = 0.0;
    for (double c : {0.05, 0.1, 0.5, 1.0}) {
        for (double r : {0.01, 0.05, 0.1, 0.5, 1.0, 3.0, 10.0}) {
            const double h = 1e-3 * std::max(r, c);
            auto u = [&](double x, double y) { return mq_particular(std::hypot(x, y), c); };
            const double fd = (u(r + h, 0) + u(r - h, 0) + u(r, h) + u(r, -h) - 4 * u(r, 0)) / (h * h);
            const double f = mq_value(r, c);
            worst = std::max(worst, std::abs(fd - f) / f);
        }
    }
    detail("particular-solution Laplacian: worst relative FD error %.2e", worst);
    if (worst >= 1e-6) v.pass = false;
    std::ostringstream str;
    str << "standing properties over " << states << " converged states, H 1 = 0, particular Laplacian";
    v.summary = str.str();
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::string which = "all";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which = argv[++i];
    }
    const std::vector<std::function<Verdict()>> all{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7};
    std::vector<int> selected;
    if (which == "all") {
        for (int i = 1; i <= 7; ++i) selected.push_back(i);
    } else {
        const int n = std::atoi(which.c_str());
        if (n < 1 || n > 7) {
            std::cerr << "usage: acceptance [--criterion 1..7|all]\n";
            return 2;
        }
        selected.push_back(n);
    }
    int failures = 0;
    for (int n : selected) {
        Verdict v;
        try {
            v = all[n - 1]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.summary.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
