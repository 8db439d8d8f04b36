#include "torsolve/material.hpp"

#include "torsolve/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace torsolve {

BilinearCurve BilinearCurve::from_ratio(double E, double nu, double sigma_y, double alpha) {
    BilinearCurve c{E, nu, sigma_y, alpha * E};
    c.validate();
    return c;
}

void BilinearCurve::validate() const {
    if (!(E > 0.0)) throw ConfigError("Young's modulus E must be positive");
    if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("Poisson ratio must lie in [0, 0.5)");
    if (!(sigma_y > 0.0)) throw ConfigError("yield stress must be positive");
    if (!(E_h >= 0.0 && E_h <= E * (1.0 + 1e-12))) {
        throw ConfigError("hardening modulus must satisfy 0 <= E_h <= E");
    }
}

double uniaxial_stress(double strain, const BilinearCurve& curve) {
    const double eps_y = curve.yield_strain();
    if (strain <= eps_y) return curve.E * strain;
    return curve.sigma_y + curve.E_h * (strain - eps_y);
}

double TtoFgm::ratio() const {
    if (std::isinf(q)) return 1.0;
    return (q + ceramic.E) / (q + metal.E);
}

double TtoFgm::ceramic_fraction(double y) const {
    const double s = std::clamp(0.5 + y / height, 0.0, 1.0);
    if (exponent == 0.0) return 1.0;
    return std::pow(s, exponent);
}

double TtoFgm::ceramic_fraction_dy(double y) const {
    const double s = std::clamp(0.5 + y / height, 0.0, 1.0);
    if (exponent == 0.0) return 0.0;
    if (exponent == 1.0) return 1.0 / height;
    // Unbounded at the ceramic-free edge when k < 1.
    return exponent / height * std::pow(s, exponent - 1.0);
}

void TtoFgm::validate() const {
    if (!(ceramic.E > 0.0 && metal.E > 0.0)) throw ConfigError("phase moduli must be positive");
    if (!(ceramic.nu >= 0.0 && ceramic.nu < 0.5 && metal.nu >= 0.0 && metal.nu < 0.5)) {
        throw ConfigError("phase Poisson ratios must lie in [0, 0.5)");
    }
    if (!(metal.sigma_y > 0.0)) throw ConfigError("metal yield stress must be positive");
    if (!(metal.E_h >= 0.0 && metal.E_h <= metal.E)) {
        throw ConfigError("metal hardening modulus must satisfy 0 <= E_h <= E_m");
    }
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) throw ConfigError("power-law exponent k must be >= 0");
    if (!(q >= 0.0)) throw ConfigError("stress-transfer parameter q must be >= 0 or inf");
    if (!(height > 0.0)) throw ConfigError("graded section height must be positive");
}

namespace {

struct Mixture {
    double E, nu, sigma_y, E_h;
    double dE_dV, dnu_dV;
};

Mixture mix(double vc, const TtoFgm& fgm) {
    const double R = fgm.ratio();
    const double vm = 1.0 - vc;
    const double Ec = fgm.ceramic.E;
    const double Em = fgm.metal.E;
    const double den = R * vm + vc;
    const double num = R * Em * vm + Ec * vc;
    Mixture m{};
    m.E = num / den;
    m.nu = fgm.metal.nu * vm + fgm.ceramic.nu * vc;
    m.sigma_y = fgm.metal.sigma_y * (vm + (Ec / (R * Em)) * vc);
    m.E_h = (R * fgm.metal.E_h * vm + Ec * vc) / den;
    m.dE_dV = ((Ec - R * Em) * den - num * (1.0 - R)) / (den * den);
    m.dnu_dV = fgm.ceramic.nu - fgm.metal.nu;
    return m;
}

void check_strip(double y, const TtoFgm& fgm) {
    const double half = 0.5 * fgm.height;
    if (std::abs(y) > half * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "y = " << y << " lies outside the graded strip [-" << half << ", " << half << "]";
        throw ConfigError(msg.str());
    }
}

}  // namespace

BilinearCurve tto_point(double y, const TtoFgm& fgm) {
    check_strip(y, fgm);
    const Mixture m = mix(fgm.ceramic_fraction(y), fgm);
    return BilinearCurve{m.E, m.nu, m.sigma_y, m.E_h};
}

double effective_poisson(double E_eff, double E, double nu) {
    if (!(E_eff > 0.0)) {
        std::ostringstream msg;
        msg << "effective modulus must be positive (got " << E_eff << ")";
        throw NumericalError(msg.str());
    }
    return 0.5 + (nu - 0.5) * E_eff / E;
}

double effective_shear(double E_eff, double nu_eff) {
    if (!(E_eff > 0.0)) {
        std::ostringstream msg;
        msg << "effective modulus must be positive (got " << E_eff << ")";
        throw NumericalError(msg.str());
    }
    return E_eff / (2.0 * (1.0 + nu_eff));
}

double MaterialField::min_yield_stress() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) s = std::min(s, c.sigma_y);
    return s;
}

double MaterialField::max_modulus() const {
    double e = 0.0;
    for (const auto& c : curves) e = std::max(e, c.E);
    return e;
}

MaterialField sample_field(const MaterialModel& model, std::span<const Vec2> points) {
    MaterialField field;
    field.curves.reserve(points.size());
    field.grad_E.assign(points.size(), Vec2::Zero());
    field.grad_nu.assign(points.size(), Vec2::Zero());
    if (const auto* curve = std::get_if<BilinearCurve>(&model)) {
        curve->validate();
        field.curves.assign(points.size(), *curve);
        return field;
    }
    const auto& fgm = std::get<TtoFgm>(model);
    fgm.validate();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double y = points[i].y();
        check_strip(y, fgm);
        const double vc = fgm.ceramic_fraction(y);
        const Mixture m = mix(vc, fgm);
        field.curves.push_back(BilinearCurve{m.E, m.nu, m.sigma_y, m.E_h});
        const double dv = fgm.ceramic_fraction_dy(y);
        field.grad_E[i] = Vec2(0.0, m.dE_dV * dv);
        field.grad_nu[i] = Vec2(0.0, m.dnu_dV == 0.0 ? 0.0 : m.dnu_dV * dv);
    }
    return field;
}

}  // namespace torsolve
