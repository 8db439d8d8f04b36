#pragma once

#include "torsolve/geometry.hpp"

#include <span>
#include <variant>
#include <vector>

namespace torsolve {

/// Elastic / linear-hardening uniaxial curve.
struct BilinearCurve {
    double E = 0.0;
    double nu = 0.0;
    double sigma_y = 0.0;
    double E_h = 0.0;

    /// Validated construction from the hardening ratio alpha = E_h / E.
    static BilinearCurve from_ratio(double E, double nu, double sigma_y, double alpha);

    double alpha() const noexcept { return E_h / E; }
    double yield_strain() const noexcept { return sigma_y / E; }
    void validate() const;
};

double uniaxial_stress(double strain, const BilinearCurve& curve);

struct CeramicPhase {
    double E = 0.0;
    double nu = 0.0;
};

struct MetalPhase {
    double E = 0.0;
    double nu = 0.0;
    double sigma_y = 0.0;
    double E_h = 0.0;
};

/**
 * Ceramic-metal graded section with the TTO rule of mixtures. The ceramic
 * fraction follows (0.5 + y/h)^k over y in [-h/2, h/2]; q = +inf is the
 * equal-strain (Voigt) limit.
 */
struct TtoFgm {
    CeramicPhase ceramic;
    MetalPhase metal;
    double exponent = 1.0;  ///< k >= 0
    double q = 0.0;         ///< stress-transfer parameter, 0 <= q <= inf
    double height = 1.0;    ///< h

    double ratio() const;  ///< R = (q + E_c)/(q + E_m)
    double ceramic_fraction(double y) const;
    double ceramic_fraction_dy(double y) const;
    void validate() const;
};

BilinearCurve tto_point(double y, const TtoFgm& fgm);

double effective_poisson(double E_eff, double E, double nu);
double effective_shear(double E_eff, double nu_eff);

using MaterialModel = std::variant<BilinearCurve, TtoFgm>;

/// Curves sampled at a point set, with the spatial gradients of E and nu.
struct MaterialField {
    std::vector<BilinearCurve> curves;
    std::vector<Vec2> grad_E;
    std::vector<Vec2> grad_nu;

    int size() const noexcept { return static_cast<int>(curves.size()); }
    double min_yield_stress() const;
    double max_modulus() const;
};

MaterialField sample_field(const MaterialModel& model, std::span<const Vec2> points);

}  // namespace torsolve
